#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <tgc/dsl.hpp>
#include <tgc/jet.hpp>
#include <tgc/metric.hpp>
#include <tgc/models.hpp>
#include <tgc/rng.hpp>

using namespace tgc;

namespace {

// Scalar reference function used to exercise every jet operation:
// f(x, y) = exp(w) / (3 + w*conj(w)) + log(2 + w*conj(w)) - w^3, w = x + iy.
cx reference_value(double x, double y) {
  cx w(x, y);
  return std::exp(w) / (3.0 + w * std::conj(w)) +
         std::log(2.0 + w * std::conj(w)) - w * w * w;
}

Jet reference_jet(double x, double y, int order) {
  Jet jx = Jet::variable(2, order, 0, cx(x, 0));
  Jet jy = Jet::variable(2, order, 1, cx(y, 0));
  Jet w = jx + cx(0, 1) * jy;
  Jet a2 = w * conj(w);
  return exp(w) / (a2 + cx(3, 0)) + log(a2 + cx(2, 0)) - pow(w, 3);
}

}  // namespace

TEST_CASE("jet arithmetic reproduces finite differences of the reference") {
  const double h = 1e-4;
  auto f = [](double x, double y) { return reference_value(x, y); };
  for (auto [x, y] : {std::pair{0.3, -0.2}, std::pair{-0.7, 0.45},
                      std::pair{0.05, 1.1}}) {
    Jet j = reference_jet(x, y, 3);
    CHECK(std::abs(j.value() - f(x, y)) < 1e-14);

    cx dx = (f(x + h, y) - f(x - h, y)) / (2 * h);
    cx dy = (f(x, y + h) - f(x, y - h)) / (2 * h);
    CHECK(std::abs(j.d1(0) - dx) < 1e-7);
    CHECK(std::abs(j.d1(1) - dy) < 1e-7);

    cx dxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
    cx dxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) +
              f(x - h, y - h)) /
             (4 * h * h);
    CHECK(std::abs(j.d2(0, 0) - dxx) < 1e-6);
    CHECK(std::abs(j.d2(0, 1) - dxy) < 1e-6);
    CHECK(j.d2(0, 1) == j.d2(1, 0));

    // Third derivative: d3_xxy via nested differences of d2_xx. A larger
    // step keeps roundoff (eps / h^3) below the tolerance.
    const double h3 = 2e-3;
    auto dxx_at = [&](double yy) {
      return (f(x + h3, yy) - 2.0 * f(x, yy) + f(x - h3, yy)) / (h3 * h3);
    };
    cx dxxy = (dxx_at(y + h3) - dxx_at(y - h3)) / (2 * h3);
    CHECK(std::abs(j.d3(0, 0, 1) - dxxy) < 1e-4);
    CHECK(j.d3(0, 0, 1) == j.d3(0, 1, 0));
    CHECK(j.d3(0, 0, 1) == j.d3(1, 0, 0));
  }
}

TEST_CASE("jet conjugation acts coefficientwise") {
  Jet jx = Jet::variable(2, 2, 0, cx(0.4, 0));
  Jet jy = Jet::variable(2, 2, 1, cx(-0.3, 0));
  Jet w = jx + cx(0, 1) * jy;
  Jet g = exp(w) * w + cx(0, 2);
  Jet gc = conj(g);
  CHECK(gc.value() == std::conj(g.value()));
  for (int a = 0; a < 2; ++a) {
    CHECK(gc.d1(a) == std::conj(g.d1(a)));
    for (int b = 0; b < 2; ++b) CHECK(gc.d2(a, b) == std::conj(g.d2(a, b)));
  }
}

TEST_CASE("jet division and log validate their arguments") {
  Jet zero = Jet::constant(1, 1, cx(0, 0));
  Jet one = Jet::constant(1, 1, cx(1, 0));
  CHECK_THROWS_AS(one / zero, InvalidParameter);
  CHECK_THROWS_AS(log(zero), InvalidParameter);
  Jet other(2, 1, cx(1, 0));
  CHECK_THROWS_AS(one + other, InvalidParameter);
}

TEST_CASE("pow matches repeated multiplication including negative powers") {
  Jet jx = Jet::variable(1, 3, 0, cx(1.3, 0));
  Jet p3 = pow(jx, 3);
  Jet m3 = jx * jx * jx;
  for (int a = 0; a < 1; ++a) CHECK(std::abs(p3.d1(a) - m3.d1(a)) < 1e-12);
  CHECK(std::abs(p3.d3(0, 0, 0) - m3.d3(0, 0, 0)) < 1e-12);
  Jet pm2 = pow(jx, -2);
  Jet dm2 = cx(1, 0) / (jx * jx);
  CHECK(std::abs(pm2.value() - dm2.value()) < 1e-14);
  CHECK(std::abs(pm2.d2(0, 0) - dm2.d2(0, 0)) < 1e-12);
}

TEST_CASE("analytic metric jets match finite differences (orders 1-2)") {
  std::vector<ModelSpec> specs;
  specs.push_back({ModelName::Flat, 2});
  specs.push_back({ModelName::FubiniStudy, 2});
  specs.push_back({ModelName::Hopf, 2});
  specs.push_back({ModelName::Hopf, 3});
  specs.push_back({ModelName::HopfLambda, 2, -0.5});
  specs.push_back({ModelName::Iwasawa, 3});
  specs.push_back({ModelName::RandomPoly, 2, 0.0, 2, 0.3, 7});
  for (const auto& spec : specs) {
    MetricField field = builtin(spec);
    int count = (spec.name == ModelName::Hopf ||
                 spec.name == ModelName::RandomPoly)
                    ? 20
                    : 5;
    auto points = sample_points(spec, count, 99);
    for (const auto& p : points) {
      MetricJet a = evaluate_jet(field, p, 2);
      MetricJet b = finite_difference_jet(field, p, 2);
      // The oracle is a second-order stencil, so its own truncation sets
      // the achievable agreement.
      CHECK_MESSAGE(jet_relative_difference(a, b, 2) < 5e-6,
                    field.name << " at point failed order-2 comparison");
      CHECK(a.conjugation_residual() < 1e-12);
      CHECK(a.exchange_residual() < 1e-12);
    }
  }
}

TEST_CASE("analytic metric jets match finite differences (order 3)") {
  std::vector<ModelSpec> specs;
  specs.push_back({ModelName::FubiniStudy, 2});
  specs.push_back({ModelName::Hopf, 2});
  specs.push_back({ModelName::HopfLambda, 2, 0.7});
  specs.push_back({ModelName::Iwasawa, 3});
  specs.push_back({ModelName::RandomPoly, 2, 0.0, 3, 0.2, 3});
  for (const auto& spec : specs) {
    MetricField field = builtin(spec);
    auto points = sample_points(spec, 3, 17);
    for (const auto& p : points) {
      MetricJet a = evaluate_jet(field, p, 3);
      MetricJet b = finite_difference_jet(field, p, 3);
      CHECK_MESSAGE(jet_relative_difference(a, b, 3) < 1e-4,
                    field.name << " failed order-3 comparison");
      CHECK(a.conjugation_residual() < 1e-12);
      CHECK(a.exchange_residual() < 1e-12);
    }
  }
}

TEST_CASE("metric value shortcut agrees with the jet") {
  ModelSpec spec{ModelName::Hopf, 2};
  MetricField field = builtin(spec);
  ChartPoint p{{cx(0.9, 0.1), cx(-0.4, 0.7)}};
  MetricJet j = evaluate_jet(field, p, 0);
  CHECK((field.value(p) - j.g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jet evaluation enforces the chart domain") {
  MetricField field = builtin({ModelName::Hopf, 2});
  ChartPoint origin{{cx(0, 0), cx(0, 0)}};
  CHECK_THROWS_AS(evaluate_jet(field, origin, 2), PointOutsideChart);
  CHECK_THROWS_AS(finite_difference_jet(field, origin, 1),
                  PointOutsideChart);
}

TEST_CASE("jet evaluation rejects non-positive-definite values") {
  MetricField field =
      expression_field(parse_metric("dim 1\ng[1,1] = 1 - abs2(z_1)\n"));
  ChartPoint inside{{cx(0.5, 0)}};
  CHECK_NOTHROW(evaluate_jet(field, inside, 1));
  ChartPoint outside{{cx(2.0, 0)}};
  CHECK_THROWS_AS(evaluate_jet(field, outside, 1), NonPositiveDefinite);
}

TEST_CASE("numeric field derivative recovers Wirtinger derivatives") {
  // f(z) = (z1^2 conj(z2), z2) has known dz and dzbar.
  auto f = [](const ChartPoint& p) {
    return std::vector<cx>{p.z[0] * p.z[0] * std::conj(p.z[1]), p.z[1]};
  };
  ChartPoint p{{cx(0.7, -0.2), cx(0.3, 0.5)}};
  FieldDerivative d = numeric_field_derivative(f, p);
  cx z1 = p.z[0], z2 = p.z[1];
  CHECK(std::abs(d.dz[0][0] - 2.0 * z1 * std::conj(z2)) < 1e-8);
  CHECK(std::abs(d.dz[1][0]) < 1e-8);
  CHECK(std::abs(d.dw[1][0] - z1 * z1) < 1e-8);
  CHECK(std::abs(d.dz[1][1] - 1.0) < 1e-10);
  CHECK(std::abs(d.dw[0][1]) < 1e-10);
}
