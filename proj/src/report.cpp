#include "tgc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <Eigen/QR>
#include <json.hpp>

#include "tgc/rng.hpp"

namespace tgc {

namespace {

using json = nlohmann::ordered_json;

const std::vector<double> kTList = {-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0, 2.0};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// The model grid most identity checks run over.
std::vector<std::pair<std::string, ModelSpec>> check_models() {
  std::vector<std::pair<std::string, ModelSpec>> out;
  ModelSpec m;
  m.name = ModelName::Hopf;
  m.n = 2;
  out.push_back({"hopf2", m});
  m.n = 3;
  out.push_back({"hopf3", m});
  m = ModelSpec{};
  m.name = ModelName::HopfLambda;
  m.n = 2;
  m.lambda = -0.5;
  out.push_back({"hopf-lambda", m});
  m = ModelSpec{};
  m.name = ModelName::Iwasawa;
  m.n = 3;
  out.push_back({"iwasawa", m});
  m = ModelSpec{};
  m.name = ModelName::FubiniStudy;
  m.n = 2;
  out.push_back({"fubini-study", m});
  for (std::uint64_t s = 1; s <= 3; ++s) {
    m = ModelSpec{};
    m.name = ModelName::RandomPoly;
    m.n = 2;
    m.seed = s;
    out.push_back({"random-poly-" + std::to_string(s), m});
  }
  return out;
}

Mat hopf_alpha(const ChartPoint& p) {
  const int n = p.n();
  double r2 = 0.0;
  for (const cx& z : p.z) r2 += std::norm(z);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = ((i == j) ? 1.0 / r2 : 0.0) -
                std::conj(p.z[i]) * p.z[j] / (r2 * r2);
  return a;
}

Mat random_unitary(int n, Rng& rng) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.gaussian_cx();
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  return q;
}

double antisym_r20_diff(const LabeledTensor& a, const LabeledTensor& b) {
  const int n = a.n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx av = 0.5 * (a.at({i, j, k, l}) - a.at({j, i, k, l}));
          cx bv = 0.5 * (b.at({i, j, k, l}) - b.at({j, i, k, l}));
          worst = std::max(worst, std::abs(av - bv));
        }
  return worst;
}

struct Runner {
  VerificationReport& report;
  const VerifyConfig& cfg;

  // body returns the worst residual and may lower/raise the tolerance (used
  // by statistical checks); the default tolerance is overridden globally by
  // the config when requested.
  void check(const std::string& suite, const std::string& id,
             const std::string& desc, const std::string& identity,
             double default_tol,
             const std::function<double(CheckResult&)>& body) {
    CheckResult c;
    c.id = id;
    c.suite = suite;
    c.description = desc;
    c.identity = identity;
    c.tolerance =
        cfg.tolerance_override > 0.0 ? cfg.tolerance_override : default_tol;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.residual = body(c);
      c.status = c.residual <= c.tolerance ? "pass" : "fail";
    } catch (const Error& e) {
      c.residual = std::numeric_limits<double>::quiet_NaN();
      c.status = "fail";
      c.note = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    report.checks.push_back(std::move(c));
  }
};

// ---------------------------------------------------------------- suites

void suite_kahler(Runner& r) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  ModelSpec m;
  m.name = ModelName::Flat;
  m.n = 2;
  models.push_back({"flat", m});
  m.name = ModelName::FubiniStudy;
  m.n = 2;
  models.push_back({"fubini-study", m});
  m.n = 1;
  models.push_back({"fubini-line", m});
  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 4, r.cfg.seed);
    r.check("kahler", "kahler-" + tag, "vanishing torsion and coinciding "
            "Ricci forms on the Kaehler model " + tag,
            "T = 0, dw = 0, ric1 = ric2 = ric3 = ric4, R11(t) = R(chern)",
            1e-9, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        worst = std::max(worst, pkg.torsion_coord.max_abs());
        worst = std::max(worst, pkg.del_omega.max_abs());
        worst = std::max(worst, (pkg.ricci1 - pkg.ricci2).cwiseAbs().maxCoeff());
        worst = std::max(worst, (pkg.ricci1 - pkg.ricci3).cwiseAbs().maxCoeff());
        worst = std::max(worst, (pkg.ricci1 - pkg.ricci4).cwiseAbs().maxCoeff());
        for (double t : {-1.0, 0.0, 0.5}) {
          GauduchonCurvature g = curvature_closed_form(t, pkg);
          worst = std::max(worst, max_abs_diff(g.R11, pkg.R));
          worst = std::max(worst, g.R20.max_abs());
        }
      }
      return worst;
    });
    r.check("kahler", "kahler-profile-" + tag, "torsion norm profile "
            "degenerates on the Kaehler model " + tag,
            "|T(t)|^2 constant zero", 0.5, [&](CheckResult& c) {
      try {
        torsion_norm_profile(field, pts.front(), {-1.0, 0.0, 1.0});
        c.note = "expected DegenerateFit was not raised";
        return 1.0;
      } catch (const DegenerateFit&) {
        return 0.0;
      }
    });
  }
}

void suite_dual_route(Runner& r) {
  for (const auto& [tag, spec] : check_models()) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("dual-route", "dual-route-" + tag,
            "curvature via covariant A-field derivatives matches the "
            "closed-form expression on " + tag,
            "R11/R20 (direct) = R11/R20 (closed form)", 1e-8,
            [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (double t : kTList) {
          GauduchonCurvature d = curvature_direct(t, pkg);
          GauduchonCurvature c =
              curvature_closed_form(t, pkg, r.cfg.formula_perturbation);
          worst = std::max(worst, max_abs_diff(d.R11, c.R11));
          worst = std::max(worst, antisym_r20_diff(d.R20, c.R20));
        }
      }
      return worst;
    });
  }
}

void suite_hopf_ricci_flat(Runner& r) {
  for (int n : {2, 3}) {
    for (double t : {-1.0, 0.0, 1.0 / 3.0, 0.5}) {
      double lam = hopf_ricci_flat_lambda(t, n);
      ModelSpec spec;
      spec.name = ModelName::HopfLambda;
      spec.n = n;
      spec.lambda = lam;
      std::ostringstream id;
      id << "hopf-ricci-flat-n" << n << "-t" << fmt(t);
      r.check("hopf-ricci-flat", id.str(),
              "first Ricci form vanishes on the diagonal Hopf family at the "
              "critical parameter",
              "ric1(t) = 0 at lambda = (t(1-n)-1)/n", 1e-8, [&](CheckResult&) {
        MetricField field = builtin(spec);
        auto pts = sample_points(spec, 10, r.cfg.seed);
        double worst = 0.0;
        for (const ChartPoint& p : pts) {
          CurvaturePackage pkg = chern_package(field, p);
          GauduchonCurvature g = curvature_closed_form(t, pkg);
          worst = std::max(worst, g.ricci1.cwiseAbs().maxCoeff());
        }
        return worst;
      });
    }
    r.check("hopf-ricci-flat", "hopf-proportional-n" + std::to_string(n),
            "first Ricci form of the Hopf family is the predicted multiple "
            "of the reference form",
            "ric1(t) = ((n(1+lambda)+(t-1)(n-1))/(1+lambda)) alpha", 1e-6,
            [&](CheckResult&) {
      double worst = 0.0;
      for (double lam : {-0.8, -0.3, 0.4, 1.2, 2.0}) {
        ModelSpec spec;
        spec.name = ModelName::HopfLambda;
        spec.n = n;
        spec.lambda = lam;
        MetricField field = builtin(spec);
        auto pts = sample_points(spec, 5, r.cfg.seed + 7);
        for (double t : {-1.0, 0.0, 1.0 / 3.0, 0.5}) {
          double coef =
              (n * (1.0 + lam) + (t - 1.0) * (n - 1)) / (1.0 + lam);
          for (const ChartPoint& p : pts) {
            CurvaturePackage pkg = chern_package(field, p);
            GauduchonCurvature g = curvature_closed_form(t, pkg);
            Mat ref = coef * hopf_alpha(p);
            double dev = (g.ricci1 - ref).cwiseAbs().maxCoeff();
            double scale = std::abs(coef) * hopf_alpha(p).cwiseAbs().maxCoeff();
            worst = std::max(worst, dev / scale);
          }
        }
      }
      return worst;
    });
  }
}

void suite_ricci_routes(Runner& r) {
  for (const auto& [tag, spec] : check_models()) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("ricci-routes", "ricci-routes-" + tag,
            "the four Ricci forms agree across trace, combination, and "
            "P/Q-organized formulas on " + tag,
            "ric_k(t) from traces = combination formulas = P/Q formulas",
            1e-7, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (double t : kTList) {
          RicciConsistency rc = gauduchon_ricci(t, pkg);
          worst = std::max(
              {worst, rc.residual_combination, rc.residual_pq});
        }
      }
      return worst;
    });
  }
}

void suite_scalars(Runner& r) {
  for (const auto& [tag, spec] : check_models()) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("scalars", "scalars-" + tag,
            "scalar curvature relations against Ricci traces on " + tag,
            "scal(t) = t cScal + (1-t) cScalTilde; scal~(t) = t cScalTilde "
            "+ (1-t) cScal - ((1-t)^2/4)(|T|^2+|tau|^2)",
            1e-8, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (double t : kTList)
          worst = std::max(worst, gauduchon_scalars(t, pkg).residual);
      }
      return worst;
    });
  }
  {
    auto models = check_models();
    r.check("scalars", "scalars-identities",
            "endpoint and midpoint consequences of the scalar relations",
            "scal(0) = cScalTilde; scal(1/2) - scal~(1/2) = "
            "(1/16)(|T|^2+|tau|^2)",
            1e-10, [&](CheckResult&) {
      double worst = 0.0;
      for (const auto& [tag, spec] : models) {
        MetricField field = builtin(spec);
        auto pts = sample_points(spec, 3, r.cfg.seed + 1);
        for (const ChartPoint& p : pts) {
          CurvaturePackage pkg = chern_package(field, p);
          ScalarPair s0 = gauduchon_scalars(0.0, pkg);
          worst = std::max(worst, std::abs(s0.scal - pkg.scal_tilde));
          ScalarPair sh = gauduchon_scalars(0.5, pkg);
          worst = std::max(worst,
                           std::abs((sh.scal - sh.scal_tilde) -
                                    (pkg.normT2 + pkg.normTau2) / 16.0));
        }
      }
      return worst;
    });
  }
}

void suite_hsc(Runner& r) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  ModelSpec m;
  m.name = ModelName::Hopf;
  m.n = 2;
  models.push_back({"hopf2", m});
  m = ModelSpec{};
  m.name = ModelName::Iwasawa;
  m.n = 3;
  models.push_back({"iwasawa", m});
  m = ModelSpec{};
  m.name = ModelName::RandomPoly;
  m.n = 2;
  m.seed = 1;
  models.push_back({"random-poly-1", m});

  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 4, r.cfg.seed);
    r.check("hsc", "hsc-duality-" + tag,
            "holomorphic sectional curvature is symmetric about t = 1 on " +
                tag,
            "hsc(t, v) = hsc(2-t, v)", 1e-10, [&](CheckResult&) {
      Rng rng(r.cfg.seed + 11);
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (int k = 0; k < 25; ++k) {
          double t = -1.0 + 3.0 * rng.uniform();
          Vec v(pkg.n);
          for (int i = 0; i < pkg.n; ++i) v(i) = rng.gaussian_cx();
          if (v.norm() < 1e-8) continue;
          worst = std::max(worst, std::abs(hsc(t, pkg, v) -
                                           hsc(2.0 - t, pkg, v)));
        }
      }
      return worst;
    });
    r.check("hsc", "hsc-max-at-chern-" + tag,
            "holomorphic sectional curvature is maximized by the Chern "
            "connection on " + tag,
            "hsc(t, v) <= hsc(1, v)", 1e-10, [&](CheckResult&) {
      Rng rng(r.cfg.seed + 13);
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        GauduchonCurvature ref = curvature_closed_form(1.0, pkg);
        for (int k = 0; k < 25; ++k) {
          double t = -1.0 + 3.0 * rng.uniform();
          Vec v(pkg.n);
          for (int i = 0; i < pkg.n; ++i) v(i) = rng.gaussian_cx();
          if (v.norm() < 1e-8) continue;
          double excess = hsc(t, pkg, v) - hsc(ref, pkg.g, v);
          worst = std::max(worst, excess);
        }
      }
      return std::max(worst, 0.0);
    });
    r.check("hsc", "hsc-altered-gap-" + tag,
            "altered sectional curvature equals its Chern value minus the "
            "torsion gap on " + tag,
            "altered(t) = altered(1) - ((t-1)^2/(4|l|^2)) * torsion quadratic",
            1e-8, [&](CheckResult&) {
      Rng rng(r.cfg.seed + 17);
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (int k = 0; k < 6; ++k) {
          Mat U = random_unitary(pkg.n, rng);
          Eigen::VectorXd lam(pkg.n);
          for (int i = 0; i < pkg.n; ++i) lam(i) = 2.0 * rng.uniform();
          double t = -1.0 + 3.0 * rng.uniform();
          AlteredHsc a = altered_hsc(t, pkg, U, lam);
          worst = std::max(worst,
                           std::abs(a.value - (a.reference - a.gap)));
        }
      }
      return worst;
    });
  }
  r.check("hsc", "hsc-strict-gap-witness",
          "the monotonicity gap is strictly positive at a known Hopf "
          "configuration",
          "gap(t=-1, lambda=(1,1), z=(1,0)) = 3/8", 1e-9, [&](CheckResult& c) {
    ModelSpec spec;
    spec.name = ModelName::Hopf;
    spec.n = 2;
    MetricField field = builtin(spec);
    ChartPoint p{{cx(1.0, 0.0), cx(0.0, 0.0)}};
    CurvaturePackage pkg = chern_package(field, p);
    Eigen::VectorXd lam(2);
    lam << 1.0, 1.0;
    AlteredHsc a = altered_hsc(-1.0, pkg, Mat::Identity(2, 2), lam);
    c.note = "gap = " + fmt(a.gap);
    if (a.gap <= 1e-4) return 1.0;
    return std::abs(a.gap - 0.375);
  });
}

void suite_torsion_decomposition(Runner& r) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  ModelSpec m;
  m.name = ModelName::Hopf;
  m.n = 2;
  models.push_back({"hopf2", m});
  m = ModelSpec{};
  m.name = ModelName::Iwasawa;
  m.n = 3;
  models.push_back({"iwasawa", m});
  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 2, r.cfg.seed);
    r.check("torsion-decomposition", "torsion-decomposition-" + tag,
            "defining decomposition of the full torsion under the cyclic "
            "projector on " + tag,
            "T11_b = 0; B(T11_c) = ((t-1)/3) dc_omega; "
            "B(T20 - T11_c) = (1/3) dc_omega",
            1e-9, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        for (double t : kTList) {
          TorsionDecomposition d = torsion_type_decomposition(t, pkg);
          worst = std::max({worst, d.t11b_norm, d.kernel_image_residual,
                            d.gauduchon_residual, d.dcomega_residual,
                            d.reassembly_residual});
        }
      }
      return worst;
    });
  }
}

void suite_balanced(Runner& r) {
  ModelSpec iw;
  iw.name = ModelName::Iwasawa;
  iw.n = 3;
  MetricField field = builtin(iw);
  auto pts = sample_points(iw, 5, r.cfg.seed);
  r.check("balanced", "balanced-ric1-t-independent",
          "first Ricci form of the balanced nilmanifold metric does not "
          "depend on t",
          "ric1(t) = ric1(1) when tau = 0", 1e-9, [&](CheckResult&) {
    double worst = 0.0;
    for (const ChartPoint& p : pts) {
      CurvaturePackage pkg = chern_package(field, p);
      GauduchonCurvature ref = curvature_closed_form(1.0, pkg);
      for (double t : {-1.0, 0.0, 0.5}) {
        GauduchonCurvature g = curvature_closed_form(t, pkg);
        worst = std::max(worst,
                         (g.ricci1 - ref.ricci1).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  });
  r.check("balanced", "balanced-trace-torsion-zero",
          "the torsion trace and its paired quadratic vanish on the "
          "balanced metric",
          "tau = 0 and T-heart = 0", 1e-10, [&](CheckResult&) {
    double worst = 0.0;
    for (const ChartPoint& p : pts) {
      CurvaturePackage pkg = chern_package(field, p);
      worst = std::max(worst, pkg.tau.cwiseAbs().maxCoeff());
      worst = std::max(worst, pkg.t_heart.cwiseAbs().maxCoeff());
    }
    return worst;
  });
  r.check("balanced", "balanced-hopf-contrast",
          "the Hopf metric, by contrast, has strongly t-dependent first "
          "Ricci form",
          "max |ric1(0) - ric1(1)| > 1e-2 on the diagonal Hopf metric", 0.0,
          [&](CheckResult& c) {
    ModelSpec hs;
    hs.name = ModelName::Hopf;
    hs.n = 2;
    MetricField hopf = builtin(hs);
    auto hpts = sample_points(hs, 5, r.cfg.seed);
    double best = 0.0;
    for (const ChartPoint& p : hpts) {
      CurvaturePackage pkg = chern_package(hopf, p);
      Mat d = curvature_closed_form(0.0, pkg).ricci1 -
              curvature_closed_form(1.0, pkg).ricci1;
      best = std::max(best, d.cwiseAbs().maxCoeff());
    }
    c.note = "max difference = " + fmt(best);
    return best > 1e-2 ? 0.0 : 1e-2 - best;
  });
}

void suite_vertex(Runner& r) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  ModelSpec m;
  m.name = ModelName::Hopf;
  m.n = 2;
  models.push_back({"hopf2", m});
  m = ModelSpec{};
  m.name = ModelName::Iwasawa;
  m.n = 3;
  models.push_back({"iwasawa", m});
  const std::vector<double> ts = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("vertex", "vertex-" + tag,
            "the full-torsion norm is minimized at t = 1/3 on " + tag,
            "argmin_t |T(t)|^2 = 1/3", 1e-3, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        TorsionNormProfile prof = torsion_norm_profile(field, p, ts);
        worst = std::max(worst, std::abs(prof.vertex - 1.0 / 3.0));
      }
      return worst;
    });
    r.check("vertex", "vertex-norm-formula-" + tag,
            "the norm profile matches its quadratic expression in the "
            "frame torsion on " + tag,
            "|T(t)|^2 = (2t^2 + (1-t)^2) |T|^2", 1e-8, [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        TorsionNormProfile prof = torsion_norm_profile(field, p, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
          double t = ts[i];
          double expect = (2.0 * t * t + (1.0 - t) * (1.0 - t)) * pkg.normT2;
          worst = std::max(worst, std::abs(prof.norms[i] - expect));
        }
      }
      return worst;
    });
  }
}

void suite_bianchi(Runner& r) {
  for (const auto& [tag, spec] : check_models()) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("bianchi", "bianchi-" + tag,
            "first Bianchi identity of the Chern curvature against the "
            "antiholomorphic torsion derivative on " + tag,
            "T^k_{ji,lbar} = R_{i lbar j}{}^k - R_{j lbar i}{}^k", 1e-8,
            [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        const int n = pkg.n;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l) {
                cx lhs = pkg.nablaT_anti_frame.at({l, k, j, i});
                cx rhs = pkg.R_frame.at({i, l, j, k}) -
                         pkg.R_frame.at({j, l, i, k});
                worst = std::max(worst, std::abs(lhs - rhs));
              }
      }
      return worst;
    });
  }
}

void suite_dclosed(Runner& r) {
  std::vector<std::pair<std::string, ModelSpec>> models;
  ModelSpec m;
  m.name = ModelName::Hopf;
  m.n = 2;
  models.push_back({"hopf2", m});
  m = ModelSpec{};
  m.name = ModelName::RandomPoly;
  m.n = 2;
  m.seed = 1;
  models.push_back({"random-poly-1", m});
  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 3, r.cfg.seed);
    r.check("dclosed", "dclosed-ric1-" + tag,
            "the first Chern Ricci form is d-closed (numeric exterior "
            "derivative) on " + tag,
            "d ric1 = 0", 1e-5, [&](CheckResult&) {
      const int n = field.n;
      auto eval = [&](const ChartPoint& q) {
        Mat ric = chern_package(field, q).ricci1;
        std::vector<cx> flat(static_cast<std::size_t>(n) * n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            flat[static_cast<std::size_t>(a) * n + b] = ric(a, b);
        return flat;
      };
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        FieldDerivative fd = numeric_field_derivative(eval, p);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
              // (2,1) component: d_i ric_{k jbar} - d_k ric_{i jbar}
              cx h = fd.dz[i][static_cast<std::size_t>(k) * n + j] -
                     fd.dz[k][static_cast<std::size_t>(i) * n + j];
              // (1,2) component: dbar_k ric_{i jbar} - dbar_j ric_{i kbar}
              cx a = fd.dw[k][static_cast<std::size_t>(i) * n + j] -
                     fd.dw[j][static_cast<std::size_t>(i) * n + k];
              worst = std::max({worst, std::abs(h), std::abs(a)});
            }
      }
      return worst;
    });
  }
}

void suite_berger(Runner& r) {
  ModelSpec spec;
  spec.name = ModelName::Hopf;
  spec.n = 2;
  MetricField field = builtin(spec);
  auto pts = sample_points(spec, 3, r.cfg.seed);
  const double t = 0.5;
  const std::vector<std::pair<std::string, BergerPairing>> pairings = {
      {"ric1", BergerPairing::HbcRic1},
      {"ric2", BergerPairing::HbcRic2},
      {"ric3", BergerPairing::AlteredRic3},
      {"ric4", BergerPairing::AlteredRic4}};
  r.check("berger", "berger-exact",
          "exact sphere averages of the bisectional curvature reproduce the "
          "Ricci references",
          "avg_w HBC(v, w) = ric(v, vbar)/n for all four pairings", 1e-10,
          [&](CheckResult&) {
    Rng rng(r.cfg.seed + 23);
    double worst = 0.0;
    for (const ChartPoint& p : pts) {
      CurvaturePackage pkg = chern_package(field, p);
      for (int k = 0; k < 3; ++k) {
        Vec v(pkg.n);
        for (int i = 0; i < pkg.n; ++i) v(i) = rng.gaussian_cx();
        for (const auto& [ptag, pairing] : pairings) {
          BergerResult b = berger_average(t, pkg, v, pairing,
                                          BergerMode::Exact, 0, 0);
          worst = std::max(worst, b.residual);
        }
      }
    }
    return worst;
  });
  r.check("berger", "berger-montecarlo",
          "Monte Carlo sphere averages agree with the Ricci references "
          "within three standard errors",
          "|avg - ref| <= 3 se, both slot pairings", 1.0, [&](CheckResult& c) {
    Rng rng(r.cfg.seed + 29);
    CurvaturePackage pkg = chern_package(field, pts.front());
    Vec v(pkg.n);
    for (int i = 0; i < pkg.n; ++i) v(i) = rng.gaussian_cx();
    double worst = 0.0;
    std::ostringstream note;
    for (const auto& [ptag, pairing] :
         {std::pair<std::string, BergerPairing>{"ric1",
                                                BergerPairing::HbcRic1},
          std::pair<std::string, BergerPairing>{"ric3",
                                                BergerPairing::AlteredRic3}}) {
      BergerResult b =
          berger_average(t, pkg, v, pairing, BergerMode::MonteCarlo,
                         r.cfg.mc_samples, r.cfg.seed + 31);
      double ratio = b.residual / std::max(3.0 * b.std_error, 1e-300);
      worst = std::max(worst, ratio);
      note << ptag << ": avg " << fmt(b.average) << " ref " << fmt(b.reference)
           << " se " << fmt(b.std_error) << "; ";
    }
    c.note = note.str();
    return worst;
  });
}

void suite_lambda_identity(Runner& r) {
  r.check("lambda-identity", "lambda-identity-random",
          "trace-of-ddbar identity relating the first two Chern Ricci forms "
          "on random polynomial metrics",
          "ric2 = ric1 - trace(ddbar omega) - (P + Q) + T-diamond", 1e-8,
          [&](CheckResult&) {
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      ModelSpec spec;
      spec.name = ModelName::RandomPoly;
      spec.n = (k % 2 == 0) ? 2 : 3;
      spec.seed = r.cfg.seed + 40 + static_cast<std::uint64_t>(k);
      MetricField field = builtin(spec);
      auto pts = sample_points(spec, 2, r.cfg.seed + 3);
      for (const ChartPoint& p : pts) {
        CurvaturePackage pkg = chern_package(field, p);
        Mat rhs = pkg.ricci1 - pkg.lambda_ddbar_omega - (pkg.P + pkg.Q) +
                  pkg.t_diamond_coord;
        worst = std::max(worst,
                         (pkg.ricci2 - rhs).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  });
}

void suite_lck(Runner& r) {
  ModelSpec spec;
  spec.name = ModelName::Hopf;
  spec.n = 2;
  MetricField field = builtin(spec);
  auto pts = sample_points(spec, 10, r.cfg.seed);
  r.check("lck", "lck-hopf-surface",
          "Bismut Ricci relation specific to the locally conformally "
          "Kaehler Hopf surface",
          "ric1(-1) = cRic2 + (cScalTilde - cScal) g", 1e-7,
          [&](CheckResult&) {
    double worst = 0.0;
    for (const ChartPoint& p : pts) {
      CurvaturePackage pkg = chern_package(field, p);
      GauduchonCurvature g = curvature_closed_form(-1.0, pkg);
      Mat rhs = pkg.ricci2 + (pkg.scal_tilde - pkg.scal) * pkg.jet.g;
      worst = std::max(worst, (g.ricci1 - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
  });
}

void suite_jets(Runner& r) {
  auto models = check_models();
  ModelSpec flat;
  flat.name = ModelName::Flat;
  flat.n = 2;
  models.push_back({"flat", flat});
  for (const auto& [tag, spec] : models) {
    MetricField field = builtin(spec);
    auto pts = sample_points(spec, 5, r.cfg.seed);
    r.check("jets", "jets-fd-" + tag,
            "analytic metric jets match the finite-difference oracle on " +
                tag,
            "jet blocks (orders 1-2) = central differences", 1e-6,
            [&](CheckResult&) {
      double worst = 0.0;
      for (const ChartPoint& p : pts) {
        MetricJet a = evaluate_jet(field, p, 2);
        MetricJet b = finite_difference_jet(field, p, 2);
        worst = std::max(worst, jet_relative_difference(a, b, 2));
      }
      return worst;
    });
  }
}

using SuiteFn = void (*)(Runner&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"kahler", suite_kahler},
      {"dual-route", suite_dual_route},
      {"hopf-ricci-flat", suite_hopf_ricci_flat},
      {"ricci-routes", suite_ricci_routes},
      {"scalars", suite_scalars},
      {"hsc", suite_hsc},
      {"torsion-decomposition", suite_torsion_decomposition},
      {"balanced", suite_balanced},
      {"vertex", suite_vertex},
      {"bianchi", suite_bianchi},
      {"dclosed", suite_dclosed},
      {"berger", suite_berger},
      {"lambda-identity", suite_lambda_identity},
      {"lck", suite_lck},
      {"jets", suite_jets},
  };
  return table;
}

}  // namespace

bool VerificationReport::all_passed() const {
  for (const CheckResult& c : checks)
    if (c.status == "fail") return false;
  return true;
}

double VerificationReport::max_residual() const {
  double m = 0.0;
  for (const CheckResult& c : checks)
    if (std::isfinite(c.residual)) m = std::max(m, c.residual);
  return m;
}

std::vector<std::string> known_suites() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : suite_table()) out.push_back(name);
  return out;
}

VerificationReport run_verification_suite(const VerifyConfig& cfg) {
  if (cfg.tolerance_override < 0.0)
    throw ConfigError("tolerance override must be positive");
  if (cfg.mc_samples < 2) throw ConfigError("mc_samples must be >= 2");
  VerificationReport report;
  report.config = cfg;
  Runner runner{report, cfg};
  bool all = false;
  for (const std::string& s : cfg.suites)
    if (s == "all") all = true;
  std::vector<std::string> wanted;
  if (all) {
    wanted = known_suites();
  } else {
    wanted = cfg.suites;
    for (const std::string& s : wanted) {
      bool known = false;
      for (const auto& [name, fn] : suite_table()) known |= (name == s);
      if (!known) throw ConfigError("unknown verification suite '" + s + "'");
    }
  }
  for (const std::string& s : wanted)
    for (const auto& [name, fn] : suite_table())
      if (name == s) fn(runner);
  return report;
}

SweepTable sweep(const ModelSpec& spec, const std::string& quantity,
                 double t_begin, double t_end, double t_step, int points,
                 std::uint64_t seed) {
  if (t_step <= 0.0) throw ConfigError("sweep step must be positive");
  if (t_end < t_begin) throw ConfigError("sweep range is empty");
  if (points < 1) throw ConfigError("sweep needs at least one point");
  static const std::vector<std::string> quantities = {
      "ric1_norm", "scal", "scal_tilde", "hsc_min", "hsc_max", "torsion_norm"};
  if (std::find(quantities.begin(), quantities.end(), quantity) ==
      quantities.end())
    throw ConfigError("unknown sweep quantity '" + quantity + "'");

  SweepTable table;
  table.model = to_string(spec.name);
  table.quantity = quantity;
  for (double t = t_begin; t <= t_end + t_step / 2.0; t += t_step)
    table.t_grid.push_back(t);

  MetricField field = builtin(spec);
  table.points = sample_points(spec, points, seed);
  table.per_point.assign(table.points.size(),
                         std::vector<double>(table.t_grid.size(), 0.0));

  for (std::size_t pi = 0; pi < table.points.size(); ++pi) {
    const ChartPoint& p = table.points[pi];
    CurvaturePackage pkg = chern_package(field, p);
    for (std::size_t ti = 0; ti < table.t_grid.size(); ++ti) {
      double t = table.t_grid[ti];
      double val = 0.0;
      if (quantity == "ric1_norm") {
        val = curvature_closed_form(t, pkg).ricci1.cwiseAbs().maxCoeff();
      } else if (quantity == "scal") {
        val = curvature_closed_form(t, pkg).scal;
      } else if (quantity == "scal_tilde") {
        val = curvature_closed_form(t, pkg).scal_tilde;
      } else if (quantity == "torsion_norm") {
        TensorCube cube = full_torsion_frame(t, pkg.torsion_frame);
        double sum = 0.0;
        for (const cx& x : cube.v) sum += std::norm(x);
        val = sum;
      } else {
        HscSamplingConfig cfg;
        cfg.directions = 32;
        cfg.climb_steps = 40;
        cfg.seed = seed + 101 * (pi + 1);
        HscExtrema ex = hsc_extrema(t, field, {p}, cfg);
        val = (quantity == "hsc_min") ? ex.min_value : ex.max_value;
      }
      table.per_point[pi][ti] = val;
    }
  }
  table.values.assign(table.t_grid.size(), 0.0);
  for (std::size_t ti = 0; ti < table.t_grid.size(); ++ti) {
    double acc = 0.0;
    for (std::size_t pi = 0; pi < table.points.size(); ++pi)
      acc += table.per_point[pi][ti];
    table.values[ti] = acc / static_cast<double>(table.points.size());
  }
  return table;
}

void parse_t_range(const std::string& text, double& a, double& b,
                   double& step) {
  std::size_t c1 = text.find(':');
  std::size_t c2 = (c1 == std::string::npos) ? std::string::npos
                                             : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("t-range must look like a:b:step, got '" + text + "'");
  try {
    std::size_t used = 0;
    std::string sa = text.substr(0, c1);
    std::string sb = text.substr(c1 + 1, c2 - c1 - 1);
    std::string ss = text.substr(c2 + 1);
    a = std::stod(sa, &used);
    if (used != sa.size()) throw std::invalid_argument(sa);
    b = std::stod(sb, &used);
    if (used != sb.size()) throw std::invalid_argument(sb);
    step = std::stod(ss, &used);
    if (used != ss.size()) throw std::invalid_argument(ss);
  } catch (const std::exception&) {
    throw ConfigError("t-range must look like a:b:step, got '" + text + "'");
  }
  if (step <= 0.0) throw ConfigError("t-range step must be positive");
  if (b < a) throw ConfigError("t-range is empty");
}

std::string report_json(const VerificationReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = report.version;
  json cfg;
  cfg["suites"] = report.config.suites;
  cfg["seed"] = report.config.seed;
  cfg["tolerance_override"] = report.config.tolerance_override;
  cfg["stable_output"] = report.config.stable_output;
  cfg["formula_perturbation"] = report.config.formula_perturbation;
  cfg["mc_samples"] = report.config.mc_samples;
  j["config"] = cfg;
  j["overall_status"] = report.all_passed() ? "pass" : "fail";
  json checks = json::array();
  for (const CheckResult& c : report.checks) {
    json e;
    e["id"] = c.id;
    e["suite"] = c.suite;
    e["description"] = c.description;
    e["identity"] = c.identity;
    if (std::isfinite(c.residual))
      e["residual"] = c.residual;
    else
      e["residual"] = nullptr;
    e["tolerance"] = c.tolerance;
    e["status"] = c.status;
    if (!report.config.stable_output) e["seconds"] = c.seconds;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

std::string report_text(const VerificationReport& report) {
  std::ostringstream out;
  int passed = 0, failed = 0;
  for (const CheckResult& c : report.checks) {
    out << (c.status == "pass" ? "[PASS] " : "[FAIL] ") << c.id
        << "  residual " << fmt(c.residual) << "  tol " << fmt(c.tolerance);
    if (!report.config.stable_output)
      out << "  (" << fmt(c.seconds) << " s)";
    out << "\n";
    if (!c.note.empty()) out << "       " << c.note << "\n";
    (c.status == "pass" ? passed : failed) += 1;
  }
  out << (report.all_passed() ? "OK" : "FAILED") << ": " << passed
      << " passed, " << failed << " failed, " << report.checks.size()
      << " total\n";
  return out.str();
}

std::string sweep_json(const SweepTable& table) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = table.model;
  j["quantity"] = table.quantity;
  j["t"] = table.t_grid;
  j["mean"] = table.values;
  json pp = json::array();
  for (std::size_t pi = 0; pi < table.per_point.size(); ++pi) {
    json e;
    json coords = json::array();
    for (const cx& z : table.points[pi].z)
      coords.push_back({z.real(), z.imag()});
    e["point"] = coords;
    e["values"] = table.per_point[pi];
    pp.push_back(e);
  }
  j["per_point"] = pp;
  return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "t,mean";
  for (std::size_t pi = 0; pi < table.per_point.size(); ++pi)
    out << ",point" << pi;
  out << "\n";
  for (std::size_t ti = 0; ti < table.t_grid.size(); ++ti) {
    out << fmt(table.t_grid[ti]) << "," << fmt(table.values[ti]);
    for (std::size_t pi = 0; pi < table.per_point.size(); ++pi)
      out << "," << fmt(table.per_point[pi][ti]);
    out << "\n";
  }
  return out.str();
}

std::string sweep_text(const SweepTable& table) {
  std::ostringstream out;
  out << table.model << " " << table.quantity << " sweep\n";
  out << "    t            mean\n";
  for (std::size_t ti = 0; ti < table.t_grid.size(); ++ti) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%9.4f  %14.8g\n", table.t_grid[ti],
                  table.values[ti]);
    out << buf;
  }
  return out.str();
}

void emit(const std::string& content, const std::string& destination) {
  if (destination.empty() || destination == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(destination);
  if (!f) throw IoError("cannot open '" + destination + "' for writing");
  f << content;
  if (!f.good()) throw IoError("failed writing '" + destination + "'");
}

}  // namespace tgc
