#include "tgc/models.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tgc/dsl.hpp"
#include "tgc/rng.hpp"

namespace tgc {

ModelName model_from_string(const std::string& name) {
  if (name == "flat") return ModelName::Flat;
  if (name == "fubini_study") return ModelName::FubiniStudy;
  if (name == "hopf") return ModelName::Hopf;
  if (name == "hopf_lambda") return ModelName::HopfLambda;
  if (name == "iwasawa") return ModelName::Iwasawa;
  if (name == "random_poly") return ModelName::RandomPoly;
  throw ConfigError("unknown model '" + name + "'");
}

std::string to_string(ModelName name) {
  switch (name) {
    case ModelName::Flat:
      return "flat";
    case ModelName::FubiniStudy:
      return "fubini_study";
    case ModelName::Hopf:
      return "hopf";
    case ModelName::HopfLambda:
      return "hopf_lambda";
    case ModelName::Iwasawa:
      return "iwasawa";
    case ModelName::RandomPoly:
      return "random_poly";
  }
  return "?";
}

namespace {

struct CoordJets {
  std::vector<Jet> z, zb;
  Jet zero, one;
};

CoordJets coord_jets(const ChartPoint& p, int order) {
  const int n = p.n();
  const int m = 2 * n;
  CoordJets c;
  c.zero = Jet::constant(m, order, cx(0.0));
  c.one = Jet::constant(m, order, cx(1.0));
  c.z.resize(n, c.zero);
  c.zb.resize(n, c.zero);
  for (int a = 0; a < n; ++a) {
    Jet zj(m, order, p.z[a]);
    Jet zbj(m, order, std::conj(p.z[a]));
    if (order >= 1) {
      zj.d1_ref(2 * a) = cx(1.0);
      zj.d1_ref(2 * a + 1) = cx(0.0, 1.0);
      zbj.d1_ref(2 * a) = cx(1.0);
      zbj.d1_ref(2 * a + 1) = cx(0.0, -1.0);
    }
    c.z[a] = zj;
    c.zb[a] = zbj;
  }
  return c;
}

Jet norm2_jet(const CoordJets& c) {
  Jet s = c.zero;
  for (std::size_t a = 0; a < c.z.size(); ++a) s += c.z[a] * c.zb[a];
  return s;
}

MetricField flat_field(int n) {
  MetricField f;
  f.n = n;
  f.name = "flat";
  f.eval_entries = [n](const ChartPoint& p, int order) {
    CoordJets c = coord_jets(p, order);
    std::vector<Jet> out(static_cast<std::size_t>(n) * n, c.zero);
    for (int i = 0; i < n; ++i) out[i * n + i] = c.one;
    return out;
  };
  return f;
}

MetricField fubini_study_field(int n) {
  MetricField f;
  f.n = n;
  f.name = "fubini_study";
  f.eval_entries = [n](const ChartPoint& p, int order) {
    CoordJets c = coord_jets(p, order);
    Jet w = c.one + norm2_jet(c);
    std::vector<Jet> out(static_cast<std::size_t>(n) * n, c.zero);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet v = c.zero - c.zb[i] * c.z[j] / (w * w);
        if (i == j) v += c.one / w;
        out[i * n + j] = v;
      }
    return out;
  };
  return f;
}

MetricField hopf_family_field(int n, double lambda, const std::string& name) {
  MetricField f;
  f.n = n;
  f.name = name;
  f.in_domain = [](const ChartPoint& p) {
    double r2 = 0.0;
    for (const cx& v : p.z) r2 += std::norm(v);
    return r2 > 1e-12;
  };
  f.eval_entries = [n, lambda](const ChartPoint& p, int order) {
    CoordJets c = coord_jets(p, order);
    Jet r2 = norm2_jet(c);
    Jet scale = cx(4.0) / r2;
    std::vector<Jet> out(static_cast<std::size_t>(n) * n, c.zero);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet v = c.zero - cx(lambda) * (c.zb[i] * c.z[j] / r2);
        if (i == j) v += cx(1.0 + lambda) * c.one;
        out[i * n + j] = scale * v;
      }
    return out;
  };
  return f;
}

MetricField iwasawa_field() {
  MetricField f;
  f.n = 3;
  f.name = "iwasawa";
  f.eval_entries = [](const ChartPoint& p, int order) {
    CoordJets c = coord_jets(p, order);
    std::vector<Jet> out(9, c.zero);
    out[0] = c.one;                              // g_{1 1bar}
    out[4] = c.one + c.z[0] * c.zb[0];           // g_{2 2bar} = 1 + |z1|^2
    out[5] = c.zero - c.z[0];                    // g_{2 3bar} = -z1
    out[7] = c.zero - c.zb[0];                   // g_{3 2bar} = -conj(z1)
    out[8] = c.one;                              // g_{3 3bar}
    return out;
  };
  return f;
}

std::string format_complex(cx v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%.17g+%.17gi)", v.real(), v.imag());
  return buf;
}

// Monomials of total degree <= degree in n variables, multi-index exponents.
std::vector<std::vector<int>> monomials(int n, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  // Counting in base (degree+1) and filtering keeps the order stable.
  while (true) {
    int total = 0;
    for (int e : cur) total += e;
    if (total <= degree) out.push_back(cur);
    int pos = n - 1;
    while (pos >= 0 && ++cur[pos] > degree) cur[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

std::string monomial_text(const std::vector<int>& alpha, bool conjugated) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] == 0) continue;
    if (!first) os << "*";
    os << (conjugated ? "zb_" : "z_") << (a + 1);
    if (alpha[a] > 1) os << "^" << alpha[a];
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

}  // namespace

std::string random_poly_source(int n, int degree, double amplitude,
                               std::uint64_t seed) {
  if (n < 1) throw InvalidParameter("random_poly needs n >= 1");
  if (degree < 1 || degree > 4)
    throw InvalidParameter("random_poly degree must be 1..4");
  std::vector<std::vector<int>> mono = monomials(n, degree);
  Rng rng(seed);
  // F[k][i] = sum over monomials of c * z^alpha; coefficients damped by
  // total degree so the perturbation of the identity stays well-conditioned.
  std::vector<std::vector<std::vector<cx>>> F(
      n, std::vector<std::vector<cx>>(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      F[k][i].resize(mono.size());
      for (std::size_t m = 0; m < mono.size(); ++m) {
        int deg = 0;
        for (int e : mono[m]) deg += e;
        double damp = amplitude / ((1.0 + deg) * (1.0 + deg));
        F[k][i][m] = damp * cx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      }
    }
  std::ostringstream os;
  os << "# random polynomial metric g = I + F^dagger F\n";
  os << "# degree " << degree << ", amplitude " << amplitude << ", seed "
     << seed << "\n";
  os << "dim " << n << "\n";
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      os << "g[" << i << "," << j << "] = ";
      if (i == j) os << "1";
      bool wrote = (i == j);
      for (int k = 0; k < n; ++k) {
        // conj(F[k][i-1]) * F[k][j-1]
        os << (wrote ? " + " : "") << "(";
        bool inner = false;
        for (std::size_t m = 0; m < mono.size(); ++m) {
          cx c = std::conj(F[k][i - 1][m]);
          if (inner) os << " + ";
          os << format_complex(c) << "*" << monomial_text(mono[m], true);
          inner = true;
        }
        os << ")*(";
        inner = false;
        for (std::size_t m = 0; m < mono.size(); ++m) {
          if (inner) os << " + ";
          os << format_complex(F[k][j - 1][m]) << "*"
             << monomial_text(mono[m], false);
          inner = true;
        }
        os << ")";
        wrote = true;
      }
      os << "\n";
    }
  return os.str();
}

MetricField builtin(const ModelSpec& spec) {
  switch (spec.name) {
    case ModelName::Flat:
      if (spec.n < 1) throw InvalidParameter("flat needs n >= 1");
      return flat_field(spec.n);
    case ModelName::FubiniStudy:
      if (spec.n < 1) throw InvalidParameter("fubini_study needs n >= 1");
      return fubini_study_field(spec.n);
    case ModelName::Hopf:
      if (spec.n < 2) throw InvalidParameter("hopf needs n >= 2");
      return hopf_family_field(spec.n, 0.0, "hopf");
    case ModelName::HopfLambda:
      if (spec.n < 2) throw InvalidParameter("hopf_lambda needs n >= 2");
      if (!(spec.lambda > -1.0))
        throw InvalidParameter("hopf_lambda needs lambda > -1");
      return hopf_family_field(spec.n, spec.lambda, "hopf_lambda");
    case ModelName::Iwasawa:
      if (spec.n != 3 && spec.n != 0)
        throw InvalidParameter("iwasawa fixes n = 3");
      return iwasawa_field();
    case ModelName::RandomPoly: {
      MetricExpression expr = parse_metric(
          random_poly_source(spec.n, spec.degree, spec.amplitude, spec.seed));
      MetricField f =
          expression_field(expr, nullptr,
                           "random_poly(seed=" + std::to_string(spec.seed) + ")");
      return f;
    }
  }
  throw InvalidParameter("unknown model");
}

double hopf_ricci_flat_lambda(double t, int n) {
  if (n < 2) throw InvalidParameter("hopf family needs n >= 2");
  double lambda = (t * (1.0 - n) - 1.0) / n;
  if (!(lambda > -1.0))
    throw OutOfRange("family parameter " + std::to_string(lambda) +
                     " is not > -1 (no positive-definite member; t >= 1)");
  return lambda;
}

std::vector<ChartPoint> sample_points(const ModelSpec& spec, int count,
                                      std::uint64_t seed) {
  if (count < 1) throw InvalidParameter("need count >= 1");
  Rng rng(seed);
  int n = spec.name == ModelName::Iwasawa ? 3 : spec.n;
  std::vector<ChartPoint> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    ChartPoint p;
    p.z.resize(n);
    if (spec.name == ModelName::Hopf || spec.name == ModelName::HopfLambda) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) {
        p.z[a] = rng.gaussian_cx();
        r2 += std::norm(p.z[a]);
      }
      double radius = rng.uniform(0.4, 3.0);
      double scale = radius / std::sqrt(std::max(r2, 1e-300));
      for (int a = 0; a < n; ++a) p.z[a] *= scale;
    } else {
      for (int a = 0; a < n; ++a)
        p.z[a] = cx(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string dsl_rendering(const ModelSpec& spec) {
  std::ostringstream os;
  int n = spec.name == ModelName::Iwasawa ? 3 : spec.n;
  auto abs2_all = [&]() {
    std::ostringstream a;
    a << "abs2(";
    for (int k = 1; k <= n; ++k) a << (k > 1 ? "," : "") << "z_" << k;
    a << ")";
    return a.str();
  };
  switch (spec.name) {
    case ModelName::Flat:
      os << "dim " << n << "\n";
      break;
    case ModelName::FubiniStudy: {
      os << "dim " << n << "\n";
      std::string w = "(1+" + abs2_all() + ")";
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
          os << "g[" << i << "," << j << "] = ";
          if (i == j) os << "1/" << w << " - ";
          else os << "0 - ";
          os << "zb_" << i << "*z_" << j << "/" << w << "^2\n";
        }
      break;
    }
    case ModelName::Hopf:
      os << "dim " << n << "\n";
      for (int i = 1; i <= n; ++i)
        os << "g[" << i << "," << i << "] = 4/" << abs2_all() << "\n";
      break;
    case ModelName::HopfLambda: {
      os << "dim " << n << "\n";
      char lam[64];
      std::snprintf(lam, sizeof(lam), "%.17g", spec.lambda);
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
          os << "g[" << i << "," << j << "] = ";
          if (i == j)
            os << "4*(1+" << lam << ")/" << abs2_all() << " - ";
          else
            os << "0 - ";
          os << "4*" << lam << "*zb_" << i << "*z_" << j << "/"
             << abs2_all() << "^2\n";
        }
      break;
    }
    case ModelName::Iwasawa:
      os << "dim 3\n";
      os << "g[2,2] = 1 + abs2(z_1)\n";
      os << "g[2,3] = 0 - z_1\n";
      break;
    case ModelName::RandomPoly:
      return random_poly_source(spec.n, spec.degree, spec.amplitude,
                                spec.seed);
  }
  return os.str();
}

}  // namespace tgc
