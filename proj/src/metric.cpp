#include "tgc/metric.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace tgc {

double ChartPoint::max_abs() const {
  double m = 0.0;
  for (const cx& v : z) m = std::max(m, std::abs(v));
  return m;
}

Mat MetricField::value(const ChartPoint& p) const {
  std::vector<Jet> entries = eval_entries(p, 0);
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = entries[i * n + j].value();
  return g;
}

namespace {

// Wirtinger weights: d_z = (d_x - i d_y)/2, d_zbar = (d_x + i d_y)/2.
// kind 0 = holomorphic, 1 = antiholomorphic; sel 0 = x part, 1 = y part.
cx wirt_weight(int kind, int sel) {
  if (sel == 0) return cx(0.5, 0.0);
  return kind == 0 ? cx(0.0, -0.5) : cx(0.0, 0.5);
}

// Assemble all Wirtinger blocks from real-coordinate derivatives supplied by
// accessor callables (shared by the jet and finite-difference paths).
template <typename D1, typename D2, typename D3>
MetricJet assemble(int n, int order, Mat g_value, D1&& d1r, D2&& d2r,
                   D3&& d3r) {
  MetricJet out;
  out.n = n;
  out.order = order;
  out.g = std::move(g_value);
  if (order >= 1) {
    out.dh.assign(n, Mat::Zero(n, n));
    out.da.assign(n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int s = 0; s < 2; ++s) {
        Mat d = d1r(2 * a + s);
        out.dh[a] += wirt_weight(0, s) * d;
        out.da[a] += wirt_weight(1, s) * d;
      }
  }
  if (order >= 2) {
    out.hh.assign(n * n, Mat::Zero(n, n));
    out.ha.assign(n * n, Mat::Zero(n, n));
    out.aa.assign(n * n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int s = 0; s < 2; ++s)
          for (int u = 0; u < 2; ++u) {
            Mat d = d2r(2 * a + s, 2 * b + u);
            out.hh[a * n + b] += wirt_weight(0, s) * wirt_weight(0, u) * d;
            out.ha[a * n + b] += wirt_weight(0, s) * wirt_weight(1, u) * d;
            out.aa[a * n + b] += wirt_weight(1, s) * wirt_weight(1, u) * d;
          }
  }
  if (order >= 3) {
    out.hhh.assign(n * n * n, Mat::Zero(n, n));
    out.hha.assign(n * n * n, Mat::Zero(n, n));
    out.haa.assign(n * n * n, Mat::Zero(n, n));
    out.aaa.assign(n * n * n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          int abc = (a * n + b) * n + c;
          for (int s = 0; s < 2; ++s)
            for (int u = 0; u < 2; ++u)
              for (int w = 0; w < 2; ++w) {
                Mat d = d3r(2 * a + s, 2 * b + u, 2 * c + w);
                cx ws = wirt_weight(0, s), wu0 = wirt_weight(0, u);
                cx wa = wirt_weight(1, s), wu1 = wirt_weight(1, u);
                cx wc0 = wirt_weight(0, w), wc1 = wirt_weight(1, w);
                out.hhh[abc] += ws * wu0 * wc0 * d;
                out.hha[abc] += ws * wu0 * wc1 * d;
                out.haa[abc] += ws * wu1 * wc1 * d;
                out.aaa[abc] += wa * wu1 * wc1 * d;
              }
        }
  }
  return out;
}

double mat_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

double MetricJet::conjugation_residual() const {
  double r = 0.0;
  auto swapped_conj = [&](const Mat& m) { return m.transpose().conjugate(); };
  for (int a = 0; a < n && order >= 1; ++a)
    r = std::max(r, mat_diff(da[a], swapped_conj(dh[a])));
  for (int a = 0; a < n && order >= 2; ++a)
    for (int b = 0; b < n; ++b) {
      r = std::max(r, mat_diff(aa[a * n + b], swapped_conj(hh[a * n + b])));
      // d_{z_a} d_{zbar_b} g_{i jbar} = conj(d_{z_b} d_{zbar_a} g_{j ibar})
      r = std::max(r, mat_diff(ha[a * n + b], swapped_conj(ha[b * n + a])));
    }
  for (int a = 0; a < n && order >= 3; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        int abc = (a * n + b) * n + c;
        r = std::max(r, mat_diff(aaa[abc], swapped_conj(hhh[abc])));
        // two holomorphic + one anti <-> conj of one holomorphic + two anti
        int cab = (c * n + a) * n + b;
        r = std::max(r, mat_diff(haa[cab], swapped_conj(hha[abc])));
      }
  return r;
}

double MetricJet::exchange_residual() const {
  double r = 0.0;
  for (int a = 0; a < n && order >= 2; ++a)
    for (int b = 0; b < a; ++b) {
      r = std::max(r, mat_diff(hh[a * n + b], hh[b * n + a]));
      r = std::max(r, mat_diff(aa[a * n + b], aa[b * n + a]));
    }
  for (int a = 0; a < n && order >= 3; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        int abc = (a * n + b) * n + c;
        r = std::max(r, mat_diff(hhh[abc], hhh[(b * n + a) * n + c]));
        r = std::max(r, mat_diff(hhh[abc], hhh[(a * n + c) * n + b]));
        r = std::max(r, mat_diff(hha[abc], hha[(b * n + a) * n + c]));
        r = std::max(r, mat_diff(haa[abc], haa[(a * n + c) * n + b]));
        r = std::max(r, mat_diff(aaa[abc], aaa[(b * n + a) * n + c]));
        r = std::max(r, mat_diff(aaa[abc], aaa[(a * n + c) * n + b]));
      }
  return r;
}

MetricJet evaluate_jet(const MetricField& field, const ChartPoint& p,
                       int order) {
  if (order < 0 || order > 3) throw InvalidParameter("jet order must be 0..3");
  if (p.n() != field.n) throw InvalidParameter("point dimension mismatch");
  if (field.in_domain && !field.in_domain(p))
    throw PointOutsideChart("point outside the chart of " + field.name);
  std::vector<Jet> entries = field.eval_entries(p, order);
  const int n = field.n;
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = entries[i * n + j].value();
  auto d1r = [&](int a) {
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = entries[i * n + j].d1(a);
    return d;
  };
  auto d2r = [&](int a, int b) {
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = entries[i * n + j].d2(a, b);
    return d;
  };
  auto d3r = [&](int a, int b, int c) {
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = entries[i * n + j].d3(a, b, c);
    return d;
  };
  MetricJet jet = assemble(n, order, std::move(g), d1r, d2r, d3r);

  Eigen::LLT<Mat> llt(jet.g);
  if (llt.info() != Eigen::Success)
    throw NonPositiveDefinite("metric not positive-definite at point (" +
                              field.name + ")");
  double scale = std::max(1.0, jet.g.cwiseAbs().maxCoeff());
  if (jet.conjugation_residual() > 1e-10 * scale)
    throw ConsistencyFailure("metric jet violates conjugation symmetry");
  if (jet.exchange_residual() > 1e-12 * scale)
    throw ConsistencyFailure("metric jet violates derivative exchange "
                             "symmetry");
  return jet;
}

namespace {

// Real-coordinate derivative tensors of the metric value by recursive
// central differences; rank-k tensor stored as a flat vector of matrices.
struct FdTable {
  int m = 0;
  std::vector<Mat> d0;  // 1
  std::vector<Mat> d1;  // m
  std::vector<Mat> d2;  // m*m
  std::vector<Mat> d3;  // m*m*m
};

ChartPoint shift(const ChartPoint& p, int real_var, double h) {
  ChartPoint q = p;
  int a = real_var / 2;
  if (real_var % 2 == 0)
    q.z[a] += h;
  else
    q.z[a] += cx(0.0, h);
  return q;
}

Mat fd_value(const MetricField& field, const ChartPoint& p) {
  if (field.in_domain && !field.in_domain(p))
    throw PointOutsideChart("finite-difference stencil leaves the chart of " +
                            field.name);
  return field.value(p);
}

// Derivatives up to the requested order at p.
FdTable fd_derivs(const MetricField& field, const ChartPoint& p, int order,
                  double h) {
  FdTable t;
  t.m = 2 * field.n;
  const int m = t.m;
  t.d0.push_back(fd_value(field, p));
  if (order >= 1) {
    t.d1.resize(m);
    for (int a = 0; a < m; ++a)
      t.d1[a] = (fd_value(field, shift(p, a, h)) -
                 fd_value(field, shift(p, a, -h))) /
                (2.0 * h);
  }
  if (order >= 2) {
    t.d2.resize(m * m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        Mat plus = (fd_value(field, shift(shift(p, a, h), b, h)) -
                    fd_value(field, shift(shift(p, a, h), b, -h))) /
                   (2.0 * h);
        Mat minus = (fd_value(field, shift(shift(p, a, -h), b, h)) -
                     fd_value(field, shift(shift(p, a, -h), b, -h))) /
                    (2.0 * h);
        t.d2[a * m + b] = (plus - minus) / (2.0 * h);
        t.d2[b * m + a] = t.d2[a * m + b];
      }
  }
  if (order >= 3) {
    t.d3.resize(static_cast<std::size_t>(m) * m * m);
    // d3[a,b,c] = central difference in c of the (a,b) second difference.
    auto second = [&](const ChartPoint& q, int a, int b) {
      Mat plus = (fd_value(field, shift(shift(q, a, h), b, h)) -
                  fd_value(field, shift(shift(q, a, h), b, -h))) /
                 (2.0 * h);
      Mat minus = (fd_value(field, shift(shift(q, a, -h), b, h)) -
                   fd_value(field, shift(shift(q, a, -h), b, -h))) /
                  (2.0 * h);
      return Mat(((plus - minus) / (2.0 * h)).eval());
    };
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b)
        for (int c = b; c < m; ++c) {
          Mat v = (second(shift(p, c, h), a, b) -
                   second(shift(p, c, -h), a, b)) /
                  (2.0 * h);
          int idx[3] = {a, b, c};
          int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
          for (auto& pm : perms) {
            std::size_t flat =
                (static_cast<std::size_t>(idx[pm[0]]) * m + idx[pm[1]]) * m +
                idx[pm[2]];
            t.d3[flat] = v;
          }
        }
  }
  return t;
}

}  // namespace

MetricJet finite_difference_jet(const MetricField& field, const ChartPoint& p,
                                int order, double step) {
  if (order < 1 || order > 3)
    throw InvalidParameter("finite-difference order must be 1..3");
  double scale = std::max(1.0, p.max_abs());
  double h = step > 0.0 ? step : (order == 3 ? 2e-3 : 1e-4) * scale;
  FdTable tab = fd_derivs(field, p, order, h);
  const int m = tab.m;
  auto d1r = [&](int a) { return tab.d1[a]; };
  auto d2r = [&](int a, int b) { return tab.d2[a * m + b]; };
  auto d3r = [&](int a, int b, int c) {
    return tab.d3[(static_cast<std::size_t>(a) * m + b) * m + c];
  };
  return assemble(field.n, order, tab.d0[0], d1r, d2r, d3r);
}

double jet_relative_difference(const MetricJet& a, const MetricJet& b,
                               int max_order) {
  int order = std::min({a.order, b.order, max_order});
  double r = 0.0;
  auto acc = [&](const Mat& x, const Mat& y) {
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j)
        r = std::max(r, std::abs(x(i, j) - y(i, j)) /
                            (1.0 + std::abs(x(i, j))));
  };
  acc(a.g, b.g);
  const int n = a.n;
  if (order >= 1)
    for (int i = 0; i < n; ++i) {
      acc(a.dh[i], b.dh[i]);
      acc(a.da[i], b.da[i]);
    }
  if (order >= 2)
    for (int i = 0; i < n * n; ++i) {
      acc(a.hh[i], b.hh[i]);
      acc(a.ha[i], b.ha[i]);
      acc(a.aa[i], b.aa[i]);
    }
  if (order >= 3)
    for (int i = 0; i < n * n * n; ++i) {
      acc(a.hhh[i], b.hhh[i]);
      acc(a.hha[i], b.hha[i]);
      acc(a.haa[i], b.haa[i]);
      acc(a.aaa[i], b.aaa[i]);
    }
  return r;
}

FieldDerivative numeric_field_derivative(
    const std::function<std::vector<cx>(const ChartPoint&)>& f,
    const ChartPoint& p, double step) {
  double h = step > 0.0 ? step : 1e-4 * std::max(1.0, p.max_abs());
  const int n = p.n();
  FieldDerivative out;
  out.dz.resize(n);
  out.dw.resize(n);
  for (int a = 0; a < n; ++a) {
    ChartPoint px1 = p, px2 = p, py1 = p, py2 = p;
    px1.z[a] += h;
    px2.z[a] -= h;
    py1.z[a] += cx(0.0, h);
    py2.z[a] -= cx(0.0, h);
    std::vector<cx> fx1 = f(px1), fx2 = f(px2), fy1 = f(py1), fy2 = f(py2);
    std::size_t c = fx1.size();
    out.dz[a].resize(c);
    out.dw[a].resize(c);
    for (std::size_t k = 0; k < c; ++k) {
      cx dx = (fx1[k] - fx2[k]) / (2.0 * h);
      cx dy = (fy1[k] - fy2[k]) / (2.0 * h);
      out.dz[a][k] = 0.5 * (dx - cx(0.0, 1.0) * dy);
      out.dw[a][k] = 0.5 * (dx + cx(0.0, 1.0) * dy);
    }
  }
  return out;
}

}  // namespace tgc
