#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tgc/chern.hpp>
#include <tgc/dsl.hpp>
#include <tgc/gauduchon.hpp>
#include <tgc/models.hpp>

using namespace tgc;

TEST_CASE("model names round-trip and reject unknowns") {
  for (const char* name : {"flat", "fubini_study", "hopf", "hopf_lambda",
                           "iwasawa", "random_poly"})
    CHECK(to_string(model_from_string(name)) == name);
  CHECK_THROWS_AS(model_from_string("torus"), ConfigError);
}

TEST_CASE("builtin rejects inconsistent parameters") {
  CHECK_THROWS_AS(builtin({ModelName::Hopf, 1}), InvalidParameter);
  CHECK_THROWS_AS(builtin({ModelName::Iwasawa, 2}), InvalidParameter);
  ModelSpec degenerate{ModelName::HopfLambda, 2, -1.0};
  CHECK_THROWS_AS(builtin(degenerate), InvalidParameter);
  ModelSpec bad_degree{ModelName::RandomPoly, 2, 0.0, 0, 0.3, 1};
  CHECK_THROWS_AS(builtin(bad_degree), InvalidParameter);
}

TEST_CASE("flat metric is the identity with empty derivatives") {
  MetricField f = builtin({ModelName::Flat, 3});
  ChartPoint p{{cx(5, 2), cx(-3, 1), cx(0, 0)}};
  MetricJet j = evaluate_jet(f, p, 2);
  CHECK((j.g - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& m : j.dh) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& m : j.ha) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Fubini-Study chart values") {
  MetricField f = builtin({ModelName::FubiniStudy, 2});
  ChartPoint p{{cx(1, 0), cx(0, 1)}};
  double r2 = 3.0;  // 1 + |z|^2
  Mat g = f.value(p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cx want = (i == j ? cx(1, 0) : cx(0, 0)) / r2 -
                std::conj(p.z[i]) * p.z[j] / (r2 * r2);
      CHECK(std::abs(g(i, j) - want) < 1e-15);
    }
}

TEST_CASE("round Hopf metric matches 4/|z|^2 times the identity") {
  MetricField f = builtin({ModelName::Hopf, 3});
  ChartPoint p{{cx(1, 1), cx(0, -1), cx(0.5, 0)}};
  double z2 = 2.0 + 1.0 + 0.25;
  Mat g = f.value(p);
  CHECK((g - (4.0 / z2) * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("Iwasawa metric values at a marked point") {
  MetricField f = builtin({ModelName::Iwasawa, 3});
  ChartPoint p{{cx(1, 0), cx(0.3, -0.2), cx(-0.1, 0.4)}};
  Mat g = f.value(p);
  CHECK(std::abs(g(0, 0) - cx(1, 0)) < 1e-15);
  CHECK(std::abs(g(1, 1) - cx(2, 0)) < 1e-15);  // 1 + |z1|^2
  CHECK(std::abs(g(1, 2) - cx(-1, 0)) < 1e-15);  // -z1
  CHECK(std::abs(g(2, 1) - cx(-1, 0)) < 1e-15);  // -conj(z1)
  CHECK(std::abs(g(2, 2) - cx(1, 0)) < 1e-15);
  CHECK(std::abs(g(0, 1)) < 1e-15);
}

TEST_CASE("hopf_lambda at lambda = 0 is the round Hopf metric") {
  MetricField a = builtin({ModelName::Hopf, 2});
  MetricField b = builtin({ModelName::HopfLambda, 2, 0.0});
  for (const auto& p : sample_points({ModelName::Hopf, 2}, 6, 45)) {
    MetricJet ja = evaluate_jet(a, p, 2);
    MetricJet jb = evaluate_jet(b, p, 2);
    CHECK(jet_relative_difference(ja, jb, 2) < 1e-12);
  }
}

TEST_CASE("Hopf family is pinned to the first Ricci form of its base") {
  // g_lambda = g_0 + 4 lambda Ric1(g_0) where Ric1 is taken at t = 0.
  for (int n : {2, 3}) {
    ModelSpec base{ModelName::Hopf, n};
    MetricField f0 = builtin(base);
    for (double lambda : {-0.6, 0.8, 2.0}) {
      MetricField fl = builtin({ModelName::HopfLambda, n, lambda});
      for (const auto& p : sample_points(base, 4, 51)) {
        CurvaturePackage pkg = chern_package(f0, p);
        GauduchonCurvature c0 = curvature_closed_form(0.0, pkg);
        Mat want = pkg.g.m + 4.0 * lambda * c0.ricci1;
        CHECK((fl.value(p) - want).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("critical family parameter: closed form and range guard") {
  CHECK(hopf_ricci_flat_lambda(0.0, 2) == doctest::Approx(-0.5));
  CHECK(hopf_ricci_flat_lambda(-1.0, 2) == doctest::Approx(0.0));
  CHECK(hopf_ricci_flat_lambda(1.0 / 3.0, 2) ==
        doctest::Approx(-2.0 / 3.0));
  CHECK(hopf_ricci_flat_lambda(0.0, 3) == doctest::Approx(-1.0 / 3.0));
  CHECK_THROWS_AS(hopf_ricci_flat_lambda(1.0, 2), OutOfRange);
  CHECK_THROWS_AS(hopf_ricci_flat_lambda(1.5, 3), OutOfRange);
}

TEST_CASE("first Ricci form of the family is proportional to the base's") {
  // ^tRic1(g_lambda) = (n(1+lambda) + (t-1)(n-1)) / (1+lambda) * alpha
  // where alpha = Ric1(g_0) at t = 0. Verified pointwise for a spread of
  // lambda and t.
  const int n = 2;
  MetricField f0 = builtin({ModelName::Hopf, n});
  for (double lambda : {-0.5, 0.7}) {
    MetricField fl = builtin({ModelName::HopfLambda, n, lambda});
    for (double t : {-1.0, 0.0, 0.5}) {
      for (const auto& p : sample_points({ModelName::Hopf, n}, 3, 63)) {
        CurvaturePackage pkg0 = chern_package(f0, p);
        Mat alpha = curvature_closed_form(0.0, pkg0).ricci1;
        CurvaturePackage pkgl = chern_package(fl, p);
        Mat got = curvature_closed_form(t, pkgl).ricci1;
        double coef =
            (n * (1 + lambda) + (t - 1) * (n - 1)) / (1 + lambda);
        CHECK((got - coef * alpha).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("point sampler is deterministic and respects chart domains") {
  ModelSpec spec{ModelName::Hopf, 2};
  auto a = sample_points(spec, 10, 7);
  auto b = sample_points(spec, 10, 7);
  auto c = sample_points(spec, 10, 8);
  REQUIRE(a.size() == 10);
  bool identical = true, differs = false;
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 2; ++i) {
      identical = identical && a[k].z[i] == b[k].z[i];
      differs = differs || a[k].z[i] != c[k].z[i];
    }
    double r = a[k].max_abs();
    double norm = 0;
    for (const auto& z : a[k].z) norm += std::norm(z);
    norm = std::sqrt(norm);
    CHECK(norm >= 0.4);
    CHECK(norm <= 3.0);
    CHECK(r <= 3.0);
  }
  CHECK(identical);
  CHECK(differs);

  MetricField f = builtin(spec);
  for (const auto& p : a) CHECK_NOTHROW(evaluate_jet(f, p, 2));
}

TEST_CASE("random polynomial metrics are reproducible per seed") {
  std::string s1 = random_poly_source(2, 2, 0.3, 42);
  std::string s2 = random_poly_source(2, 2, 0.3, 42);
  std::string s3 = random_poly_source(2, 2, 0.3, 43);
  CHECK(s1 == s2);
  CHECK(s1 != s3);
  MetricField f = builtin({ModelName::RandomPoly, 2, 0.0, 2, 0.3, 42});
  ChartPoint p{{cx(0.4, -0.2), cx(0.1, 0.3)}};
  MetricJet j = evaluate_jet(f, p, 2);
  CHECK(j.conjugation_residual() < 1e-13);
  CHECK(HermitianMatrix(j.g).positive_definite());
}

TEST_CASE("every builtin agrees with its own DSL rendering") {
  std::vector<ModelSpec> specs;
  specs.push_back({ModelName::Flat, 2});
  specs.push_back({ModelName::FubiniStudy, 2});
  specs.push_back({ModelName::Hopf, 2});
  specs.push_back({ModelName::Hopf, 3});
  specs.push_back({ModelName::HopfLambda, 2, -0.4});
  specs.push_back({ModelName::Iwasawa, 3});
  specs.push_back({ModelName::RandomPoly, 2, 0.0, 2, 0.3, 5});
  for (const auto& spec : specs) {
    MetricField direct = builtin(spec);
    MetricField rendered = expression_field(parse_metric(dsl_rendering(spec)));
    for (const auto& p : sample_points(spec, 4, 29)) {
      MetricJet a = evaluate_jet(direct, p, 2);
      MetricJet b = evaluate_jet(rendered, p, 2);
      CHECK_MESSAGE(jet_relative_difference(a, b, 2) < 1e-12,
                    "DSL round-trip failed for " << direct.name);
    }
  }
}
