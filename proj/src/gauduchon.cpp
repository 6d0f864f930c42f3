#include "tgc/gauduchon.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tgc/rng.hpp"

namespace tgc {

namespace {

Mat plain_inverse(const InverseMetric& ginv) { return ginv.gik.transpose(); }

double trace_against(const Mat& r, const Mat& gim) {
  return (r * gim).trace().real();
}

// Adjoint of an endomorphism with respect to the metric value.
Mat metric_adjoint(const Mat& M, const Mat& G) {
  Mat GT = G.transpose();
  return GT.partialPivLu().solve(M.adjoint() * GT);
}

// A-tensor coefficient matrices in coordinates, Am[i](k,j) = (A_{ibar})^k_j.
std::vector<Mat> a_matrices(double t, const CurvaturePackage& pkg) {
  const int n = pkg.n;
  const double s = GauduchonParams::s(t);
  Mat gim = plain_inverse(pkg.ginv);
  Mat GT = pkg.jet.g.transpose();
  std::vector<Mat> out(n);
  for (int i = 0; i < n; ++i) {
    Mat Ti(n, n);  // Ti(r,m) = T^r_{im}
    for (int r = 0; r < n; ++r)
      for (int m = 0; m < n; ++m) Ti(r, m) = pkg.torsion_coord.at({r, i, m});
    out[i] = s * (gim.transpose() * Ti.adjoint() * GT);
  }
  return out;
}

// One unitary slot rotation: out[.. a ..] = sum_i M(i, a) in[.. i ..].
LabeledTensor rotate_slot(const LabeledTensor& t, int pos, const Mat& M) {
  LabeledTensor out(t.n, t.labels, t.frame);
  const int r = t.rank();
  std::vector<int> idx(r, 0), src(r, 0);
  const std::size_t total = t.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int i = r - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % t.n);
      rem /= t.n;
    }
    src = idx;
    cx sum(0.0, 0.0);
    for (int i = 0; i < t.n; ++i) {
      src[pos] = i;
      sum += M(i, idx[pos]) * t.data[t.flat_index(src.data())];
    }
    out.data[flat] = sum;
  }
  return out;
}

// Change of unitary frame by a unitary matrix U whose columns are the new
// frame vectors in the old frame.
LabeledTensor rotate_frame(const LabeledTensor& t, const Mat& U) {
  LabeledTensor out = t;
  for (int pos = 0; pos < t.rank(); ++pos) {
    switch (t.labels[pos]) {
      case IndexKind::HolDown:
        out = rotate_slot(out, pos, U);
        break;
      case IndexKind::AntiDown:
        out = rotate_slot(out, pos, U.conjugate());
        break;
      case IndexKind::HolUp:
        out = rotate_slot(out, pos, U.conjugate());
        break;
      case IndexKind::AntiUp:
        out = rotate_slot(out, pos, U);
        break;
    }
  }
  return out;
}

void check_unitary(const Mat& U, int n) {
  if (U.rows() != n || U.cols() != n)
    throw IncompatibleIndices("rotation matrix has the wrong size");
  double dev = (U.adjoint() * U - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw InvalidParameter("rotation matrix is not unitary (residual " +
                           std::to_string(dev) + ")");
}

void fill_traces(GauduchonCurvature& out, const CurvaturePackage& pkg) {
  RicciTraces rt = ricci_traces(out.R11, pkg.ginv);
  out.ricci1 = std::move(rt.r1);
  out.ricci2 = std::move(rt.r2);
  out.ricci3 = std::move(rt.r3);
  out.ricci4 = std::move(rt.r4);
  Mat gim = plain_inverse(pkg.ginv);
  out.scal = trace_against(out.ricci1, gim);
  out.scal_tilde = trace_against(out.ricci3, gim);
}

}  // namespace

GauduchonParams GauduchonParams::preset(const std::string& name) {
  if (name == "chern") return {1.0};
  if (name == "lichnerowicz") return {0.0};
  if (name == "bismut") return {-1.0};
  if (name == "minimal") return {1.0 / 3.0};
  if (name == "hermitian_conformal") return {0.5};
  throw ConfigError("unknown connection preset '" + name + "'");
}

void GauduchonCurvature::validate() const {
  const int n = R11.n;
  double s11 = std::max(1.0, R11.max_abs());
  double s20 = std::max(1.0, R20.max_abs());
  double dev11 = 0.0, dev20 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          dev11 = std::max(dev11, std::abs(R11.at({i, j, k, l}) -
                                           std::conj(R11.at({j, i, l, k}))));
          dev20 = std::max(
              dev20, std::abs(R20.at({i, j, k, l}) + R20.at({j, i, k, l})));
        }
  if (dev11 > 1e-9 * s11)
    throw ConsistencyFailure("R11 lacks conjugate symmetry (residual " +
                             std::to_string(dev11) + ")");
  if (dev20 > 1e-10 * s20)
    throw ConsistencyFailure("R20 is not antisymmetric (residual " +
                             std::to_string(dev20) + ")");
}

LabeledTensor a_tensor_frame(double t, const LabeledTensor& torsion_frame) {
  if (torsion_frame.frame != Frame::Unitary)
    throw IncompatibleIndices("frame A-tensor needs the unitary torsion");
  const int n = torsion_frame.n;
  const double s = GauduchonParams::s(t);
  LabeledTensor A(n, {IndexKind::AntiDown, IndexKind::HolUp, IndexKind::HolDown},
                  Frame::Unitary);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        A.at({i, k, j}) = s * std::conj(torsion_frame.at({j, i, k}));
  return A;
}

LabeledTensor a_tensor(double t, const CurvaturePackage& pkg) {
  const int n = pkg.n;
  std::vector<Mat> Am = a_matrices(t, pkg);
  LabeledTensor A(n, {IndexKind::AntiDown, IndexKind::HolUp, IndexKind::HolDown},
                  Frame::Coordinate);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) A.at({i, k, j}) = Am[i](k, j);
  return A;
}

ConnectionCoefficients gauduchon_coefficients(double t,
                                              const CurvaturePackage& pkg) {
  const int n = pkg.n;
  std::vector<Mat> Am = a_matrices(t, pkg);
  ConnectionCoefficients out;
  out.hol.resize(n);
  out.anti.resize(n);
  for (int i = 0; i < n; ++i) {
    out.hol[i] = pkg.gamma[i] - metric_adjoint(Am[i], pkg.jet.g);
    out.anti[i] = Am[i];
  }
  return out;
}

GauduchonCurvature curvature_direct(double t, const CurvaturePackage& pkg) {
  const int n = pkg.n;
  const double s = GauduchonParams::s(t);
  const Mat& G = pkg.jet.g;
  Mat gim = plain_inverse(pkg.ginv);
  Mat GT = G.transpose();
  const LabeledTensor& T = pkg.torsion_coord;
  ConnectionDerivatives dgam = connection_derivatives(pkg.jet);

  // Coordinate torsion as per-i matrices and their Wirtinger derivatives.
  std::vector<Mat> Tmat(n);
  for (int i = 0; i < n; ++i) {
    Tmat[i] = Mat(n, n);
    for (int r = 0; r < n; ++r)
      for (int m = 0; m < n; ++m) Tmat[i](r, m) = T.at({r, i, m});
  }
  std::vector<std::vector<Mat>> dzT(n, std::vector<Mat>(n)),
      dwT(n, std::vector<Mat>(n));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      Mat Z(n, n), W(n, n);
      for (int r = 0; r < n; ++r)
        for (int m = 0; m < n; ++m) {
          Z(r, m) = dgam.dz[a * n + i](r, m) - dgam.dz[a * n + m](r, i);
          W(r, m) = dgam.dw[a * n + i](r, m) - dgam.dw[a * n + m](r, i);
        }
      dzT[a][i] = Z;
      dwT[a][i] = W;
    }

  // A-field and its analytic Wirtinger derivatives.
  std::vector<Mat> Am(n), adjA(n), dzGi(n), dwGi(n);
  for (int i = 0; i < n; ++i)
    Am[i] = s * (gim.transpose() * Tmat[i].adjoint() * GT);
  for (int i = 0; i < n; ++i) adjA[i] = metric_adjoint(Am[i], G);
  for (int a = 0; a < n; ++a) {
    dzGi[a] = -gim * pkg.jet.dh[a] * gim;
    dwGi[a] = -gim * pkg.jet.da[a] * gim;
  }
  std::vector<std::vector<Mat>> dzA(n, std::vector<Mat>(n)),
      dwA(n, std::vector<Mat>(n));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      dzA[a][i] = s * (gim.transpose() * dwT[a][i].adjoint() * GT +
                       gim.transpose() * Tmat[i].adjoint() *
                           pkg.jet.dh[a].transpose() +
                       dzGi[a].transpose() * Tmat[i].adjoint() * GT);
      dwA[a][i] = s * (gim.transpose() * dzT[a][i].adjoint() * GT +
                       gim.transpose() * Tmat[i].adjoint() *
                           pkg.jet.da[a].transpose() +
                       dwGi[a].transpose() * Tmat[i].adjoint() * GT);
    }

  // Chern-covariant derivatives of the A-field. The antiholomorphic slot of
  // A rides along: the holomorphic direction differentiates only the
  // endomorphism part, the antiholomorphic one also hits the form slot.
  std::vector<std::vector<Mat>> nabA(n, std::vector<Mat>(n)),
      nabbA(n, std::vector<Mat>(n));
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      nabA[a][j] = dzA[a][j] + pkg.gamma[a] * Am[j] - Am[j] * pkg.gamma[a];
      Mat acc = dwA[a][j];
      for (int r = 0; r < n; ++r) acc -= std::conj(pkg.gamma[a](r, j)) * Am[r];
      nabbA[a][j] = acc;
    }

  GauduchonCurvature out;
  out.t = t;
  out.route = "direct";
  out.R11 = LabeledTensor(n, {IndexKind::HolDown, IndexKind::AntiDown,
                              IndexKind::HolDown, IndexKind::AntiDown});
  out.R20 = LabeledTensor(n, {IndexKind::HolDown, IndexKind::HolDown,
                              IndexKind::HolDown, IndexKind::AntiDown});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat cTheta = Mat::Zero(n, n);
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            cTheta(m, k) += pkg.R.at({i, j, k, l}) * gim(l, m);
      Mat TH = cTheta + nabA[i][j] + metric_adjoint(nabA[j][i], G) -
               (adjA[i] * Am[j] - Am[j] * adjA[i]);
      Mat TH2 = adjA[i] * adjA[j] - adjA[j] * adjA[i] +
                metric_adjoint(nabbA[j][i], G) -
                metric_adjoint(nabbA[i][j], G);
      for (int r = 0; r < n; ++r) TH2 -= T.at({r, i, j}) * adjA[r];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx v11(0.0, 0.0), v20(0.0, 0.0);
          for (int m = 0; m < n; ++m) {
            v11 += TH(m, k) * G(m, l);
            v20 += TH2(m, k) * G(m, l);
          }
          out.R11.at({i, j, k, l}) = v11;
          out.R20.at({i, j, k, l}) = v20;
        }
    }
  out.R11_frame = to_unitary_frame(out.R11, pkg.frame);
  out.R20_frame = to_unitary_frame(out.R20, pkg.frame);
  fill_traces(out, pkg);
  out.validate();
  return out;
}

GauduchonCurvature curvature_closed_form(double t, const CurvaturePackage& pkg,
                                         double formula_perturbation) {
  const int n = pkg.n;
  const double s = GauduchonParams::s(t);
  const double s2 = s * s;
  const double s2p = s2 * (1.0 + formula_perturbation);
  const LabeledTensor& cRf = pkg.R_frame;
  const LabeledTensor& Tf = pkg.torsion_frame;
  const LabeledTensor& nh = pkg.nablaT_hol_frame;  // [a,k,i,j]=(nabla_a T)^k_ij

  GauduchonCurvature out;
  out.t = t;
  out.route = "closed_form";
  LabeledTensor R11f(n, {IndexKind::HolDown, IndexKind::AntiDown,
                         IndexKind::HolDown, IndexKind::AntiDown},
                     Frame::Unitary);
  LabeledTensor R20f(n, {IndexKind::HolDown, IndexKind::HolDown,
                         IndexKind::HolDown, IndexKind::AntiDown},
                     Frame::Unitary);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx quad(0.0, 0.0), q2(0.0, 0.0), last(0.0, 0.0);
          for (int r = 0; r < n; ++r) {
            quad += Tf.at({r, i, k}) * std::conj(Tf.at({r, j, l})) -
                    Tf.at({l, i, r}) * std::conj(Tf.at({k, j, r}));
            q2 += Tf.at({r, j, k}) * Tf.at({l, i, r}) -
                  Tf.at({r, i, k}) * Tf.at({l, j, r});
            last += Tf.at({r, i, j}) * Tf.at({l, r, k});
          }
          R11f.at({i, j, k, l}) =
              t * cRf.at({i, j, k, l}) +
              s * (cRf.at({k, j, i, l}) + cRf.at({i, l, k, j})) + s2p * quad;
          R20f.at({i, j, k, l}) =
              s * (nh.at({j, l, i, k}) - nh.at({i, l, j, k})) + s2 * q2 -
              s * last;
        }
  out.R11_frame = R11f;
  out.R20_frame = R20f;
  out.R11 = from_unitary_frame(R11f, pkg.frame);
  out.R20 = from_unitary_frame(R20f, pkg.frame);
  fill_traces(out, pkg);
  out.validate();
  return out;
}

RicciConsistency gauduchon_ricci(double t, const CurvaturePackage& pkg) {
  GauduchonCurvature cf = curvature_closed_form(t, pkg);
  const double s = GauduchonParams::s(t);
  const double s2 = s * s;
  const Mat &c1 = pkg.ricci1, &c2 = pkg.ricci2, &c3 = pkg.ricci3,
            &c4 = pkg.ricci4;
  const Mat &Td = pkg.t_diamond_coord, &Tc = pkg.t_circle_coord,
            &Th = pkg.t_heart_coord;

  Mat b1 = t * c1 + s * (c3 + c4);
  Mat b2 = t * c2 + s * (c3 + c4) + s2 * (Td - Tc);
  Mat b3 = t * c3 + s * (c1 + c2) - s2 * (Td + Th);
  Mat b4 = t * c4 + s * (c1 + c2) - s2 * (Td + Th.adjoint().eval());

  Mat PQ = pkg.P + pkg.Q;
  Mat h1 = c1 + ((t - 1.0) / 2.0) * PQ;
  Mat h2 = t * c2 + (1.0 - t) * c1 + ((t - 1.0) / 2.0) * PQ + s2 * (Td - Tc);
  const Mat &h3 = b3, &h4 = b4;

  auto dev = [](const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };
  RicciConsistency out;
  out.ricci1 = cf.ricci1;
  out.ricci2 = cf.ricci2;
  out.ricci3 = cf.ricci3;
  out.ricci4 = cf.ricci4;
  out.residual_combination =
      std::max({dev(cf.ricci1, b1), dev(cf.ricci2, b2), dev(cf.ricci3, b3),
                dev(cf.ricci4, b4)});
  out.residual_pq = std::max({dev(cf.ricci1, h1), dev(cf.ricci2, h2),
                              dev(cf.ricci3, h3), dev(cf.ricci4, h4)});
  if (std::max(out.residual_combination, out.residual_pq) > 1e-7)
    throw ConsistencyFailure(
        "Ricci computation routes disagree (residuals " +
        std::to_string(out.residual_combination) + ", " +
        std::to_string(out.residual_pq) + ")");
  return out;
}

ScalarPair gauduchon_scalars(double t, const CurvaturePackage& pkg) {
  ScalarPair out;
  out.scal = t * pkg.scal + (1.0 - t) * pkg.scal_tilde;
  out.scal_tilde = t * pkg.scal_tilde + (1.0 - t) * pkg.scal -
                   ((1.0 - t) * (1.0 - t) / 4.0) * (pkg.normT2 + pkg.normTau2);
  GauduchonCurvature cf = curvature_closed_form(t, pkg);
  out.residual = std::max(std::abs(out.scal - cf.scal),
                          std::abs(out.scal_tilde - cf.scal_tilde));
  if (out.residual > 1e-8 * std::max({1.0, std::abs(out.scal),
                                      std::abs(out.scal_tilde)}))
    throw ConsistencyFailure("scalar curvature relations disagree (residual " +
                             std::to_string(out.residual) + ")");
  return out;
}

double hsc(const GauduchonCurvature& curv, const HermitianMatrix& g,
           const Vec& v) {
  const int n = g.n;
  if (v.size() != n) throw IncompatibleIndices("direction has the wrong size");
  cx nv(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) nv += v(i) * std::conj(v(j)) * g.m(i, j);
  if (!(nv.real() > 1e-280)) throw ZeroVector("direction vector is zero");
  cx num(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          num += curv.R11.at({i, j, k, l}) * v(i) * std::conj(v(j)) * v(k) *
                 std::conj(v(l));
  return num.real() / (nv.real() * nv.real());
}

double hsc(double t, const CurvaturePackage& pkg, const Vec& v) {
  return hsc(curvature_closed_form(t, pkg), pkg.g, v);
}

double rbc(double t, const CurvaturePackage& pkg, const Mat& U,
           const Eigen::VectorXd& lambda) {
  check_unitary(U, pkg.n);
  double l2 = lambda.squaredNorm();
  if (!(l2 > 1e-280)) throw ZeroVector("weight vector is zero");
  LabeledTensor Rt =
      rotate_frame(curvature_closed_form(t, pkg).R11_frame, U);
  cx acc(0.0, 0.0);
  for (int a = 0; a < pkg.n; ++a)
    for (int c = 0; c < pkg.n; ++c)
      acc += Rt.at({a, a, c, c}) * lambda(a) * lambda(c);
  return acc.real() / l2;
}

double altered_rbc(double t, const CurvaturePackage& pkg, const Mat& U,
                   const Eigen::VectorXd& lambda) {
  check_unitary(U, pkg.n);
  double l2 = lambda.squaredNorm();
  if (!(l2 > 1e-280)) throw ZeroVector("weight vector is zero");
  LabeledTensor Rt =
      rotate_frame(curvature_closed_form(t, pkg).R11_frame, U);
  cx acc(0.0, 0.0);
  for (int a = 0; a < pkg.n; ++a)
    for (int c = 0; c < pkg.n; ++c)
      acc += Rt.at({a, c, c, a}) * lambda(a) * lambda(c);
  return acc.real() / l2;
}

AlteredHsc altered_hsc(double t, const CurvaturePackage& pkg, const Mat& U,
                       const Eigen::VectorXd& lambda) {
  check_unitary(U, pkg.n);
  const int n = pkg.n;
  double l2 = lambda.squaredNorm();
  if (!(l2 > 1e-280)) throw ZeroVector("weight vector is zero");
  LabeledTensor Rt = rotate_frame(curvature_closed_form(t, pkg).R11_frame, U);
  LabeledTensor Rc = rotate_frame(pkg.R_frame, U);  // the t = 1 curvature
  LabeledTensor Tt = rotate_frame(pkg.torsion_frame, U);
  auto quad = [&](const LabeledTensor& R) {
    cx acc(0.0, 0.0);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        acc += (R.at({a, a, c, c}) + R.at({a, c, c, a})) * lambda(a) *
               lambda(c);
    return acc.real() / l2;
  };
  AlteredHsc out;
  out.value = quad(Rt);
  out.reference = quad(Rc);
  cx acc(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      cx term(0.0, 0.0);
      for (int q = 0; q < n; ++q)
        term += Tt.at({i, i, q}) * std::conj(Tt.at({k, k, q})) +
                Tt.at({k, i, q}) * std::conj(Tt.at({k, i, q}));
      acc += term * lambda(i) * lambda(k);
    }
  out.gap = ((t - 1.0) * (t - 1.0) / (4.0 * l2)) * acc.real();
  double resid = std::abs(out.value - (out.reference - out.gap));
  if (resid > 1e-8 * std::max(1.0, std::abs(out.reference)))
    throw ConsistencyFailure("altered sectional curvature gap mismatch (" +
                             std::to_string(resid) + ")");
  return out;
}

HscExtrema hsc_extrema(double t, const MetricField& field,
                       const std::vector<ChartPoint>& points,
                       const HscSamplingConfig& cfg) {
  if (points.empty())
    throw InvalidParameter("sectional curvature sampling needs points");
  const int n = field.n;
  Rng rng(cfg.seed);
  auto random_direction = [&]() {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.gaussian_cx();
    double nm = v.norm();
    if (nm < 1e-12) v(0) = 1.0;
    else v /= nm;
    return v;
  };
  HscExtrema ex;
  bool first = true;
  for (const ChartPoint& p : points) {
    CurvaturePackage pkg = chern_package(field, p);
    GauduchonCurvature cf = curvature_closed_form(t, pkg);
    Vec vmin, vmax;
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < cfg.directions; ++d) {
      Vec v = random_direction();
      double h = hsc(cf, pkg.g, v);
      if (h < bmin) {
        bmin = h;
        vmin = v;
      }
      if (h > bmax) {
        bmax = h;
        vmax = v;
      }
    }
    auto climb = [&](Vec v, double best, int sign) {
      double step = 0.5;
      for (int it = 0; it < cfg.climb_steps; ++it) {
        Vec w = v + step * random_direction();
        double nm = w.norm();
        if (nm < 1e-12) continue;
        w /= nm;
        double h = hsc(cf, pkg.g, w);
        if (sign > 0 ? h > best : h < best) {
          best = h;
          v = w;
        } else {
          step *= 0.85;
        }
      }
      return std::make_pair(best, v);
    };
    auto [lo, vlo] = climb(vmin, bmin, -1);
    auto [hi, vhi] = climb(vmax, bmax, +1);
    if (first || lo < ex.min_value) {
      ex.min_value = lo;
      ex.argmin_point = p;
      ex.argmin_direction = vlo;
    }
    if (first || hi > ex.max_value) {
      ex.max_value = hi;
      ex.argmax_point = p;
      ex.argmax_direction = vhi;
    }
    first = false;
  }
  return ex;
}

double TensorCube::max_abs() const {
  double m = 0.0;
  for (const cx& x : v) m = std::max(m, std::abs(x));
  return m;
}

TensorCube operator-(const TensorCube& a, const TensorCube& b) {
  TensorCube out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
  return out;
}

TensorCube full_torsion_frame(double t, const LabeledTensor& torsion_frame) {
  if (torsion_frame.frame != Frame::Unitary)
    throw IncompatibleIndices("full torsion needs the unitary-frame torsion");
  const int n = torsion_frame.n;
  const int N = 2 * n;
  const double s = GauduchonParams::s(t);
  const LabeledTensor& Tf = torsion_frame;
  TensorCube Tt(N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        Tt.at(k, a, b) = t * Tf.at({k, a, b});
        Tt.at(n + k, n + a, n + b) = t * std::conj(Tf.at({k, a, b}));
        Tt.at(k, a, n + b) = -s * std::conj(Tf.at({a, b, k}));
        Tt.at(n + k, a, n + b) = s * Tf.at({b, a, k});
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int C = 0; C < N; ++C) Tt.at(C, n + b, a) = -Tt.at(C, a, n + b);
  return Tt;
}

namespace {

// Cyclic pairing sum: B(X)(u,v,w) = (1/3) sum_cyc <X(u,v), w> with the
// complexified pairing that couples holomorphic and antiholomorphic slots.
TensorCube bianchi_image(const TensorCube& X, int n) {
  const int N = 2 * n;
  TensorCube XV(N), out(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int w = 0; w < N; ++w) {
        int c = (w < n) ? w + n : w - n;
        XV.at(a, b, w) = X.at(c, a, b);
      }
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < N; ++q)
      for (int r = 0; r < N; ++r)
        out.at(p, q, r) =
            (XV.at(p, q, r) + XV.at(r, p, q) + XV.at(q, r, p)) / 3.0;
  return out;
}

// d^c omega as a 3-form on the complexified unitary frame.
TensorCube dc_omega_frame(const CurvaturePackage& pkg) {
  const int n = pkg.n;
  const int N = 2 * n;
  LabeledTensor F21 = to_unitary_frame(pkg.del_omega, pkg.frame);
  LabeledTensor F12 = to_unitary_frame(pkg.delbar_omega, pkg.frame);
  TensorCube W(N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        cx v = F21.at({a, b, k});
        W.at(a, b, n + k) = v;
        W.at(b, n + k, a) = v;
        W.at(n + k, a, b) = v;
        W.at(b, a, n + k) = -v;
        W.at(a, n + k, b) = -v;
        W.at(n + k, b, a) = -v;
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        cx v = F12.at({a, b, k});
        W.at(a, n + b, n + k) = v;
        W.at(n + b, n + k, a) = v;
        W.at(n + k, a, n + b) = v;
        W.at(n + b, a, n + k) = -v;
        W.at(a, n + k, n + b) = -v;
        W.at(n + k, n + b, a) = -v;
      }
  return W;
}

}  // namespace

TorsionDecomposition torsion_type_decomposition(double t,
                                                const CurvaturePackage& pkg) {
  const int n = pkg.n;
  const int N = 2 * n;
  TorsionDecomposition out;
  out.t = t;
  out.n = n;
  out.full = full_torsion_frame(t, pkg.torsion_frame);
  out.t20 = TensorCube(N);
  TensorCube T11(N);
  for (int C = 0; C < N; ++C)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        out.t20.at(C, a, b) = out.full.at(C, a, b);
        out.t20.at(C, n + a, n + b) = out.full.at(C, n + a, n + b);
        T11.at(C, a, n + b) = out.full.at(C, a, n + b);
        T11.at(C, n + b, a) = out.full.at(C, n + b, a);
      }
  {
    TensorCube sum = out.t20;
    for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += T11.v[i];
    out.reassembly_residual = (out.full - sum).max_abs();
  }

  // The projector as a matrix on the free mixed-part coordinates
  // (value index C, holomorphic arg a, antiholomorphic arg b).
  const int dim = N * n * n;
  Eigen::MatrixXcd Bm(N * N * N, dim);
  for (int idx = 0; idx < dim; ++idx) {
    int C = idx / (n * n);
    int rem = idx % (n * n);
    int a = rem / n;
    int b = rem % n;
    TensorCube X(N);
    X.at(C, a, n + b) = 1.0;
    X.at(C, n + b, a) = -1.0;
    TensorCube BX = bianchi_image(X, n);
    for (std::size_t f = 0; f < BX.v.size(); ++f)
      Bm(static_cast<Eigen::Index>(f), idx) = BX.v[f];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Bm, Eigen::ComputeThinV);
  const auto& S = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < S.size(); ++i)
    if (S(i) > 1e-10 * S(0)) ++rank;
  out.projector_rank = rank;
  Eigen::MatrixXcd Vr = svd.matrixV().leftCols(rank);
  Eigen::VectorXcd x(dim);
  for (int idx = 0; idx < dim; ++idx) {
    int C = idx / (n * n);
    int rem = idx % (n * n);
    int a = rem / n;
    int b = rem % n;
    x(idx) = T11.at(C, a, n + b);
  }
  Eigen::VectorXcd xc = Vr * (Vr.adjoint() * x);
  Eigen::VectorXcd xb = x - xc;
  out.t11c = TensorCube(N);
  out.t11b = TensorCube(N);
  for (int idx = 0; idx < dim; ++idx) {
    int C = idx / (n * n);
    int rem = idx % (n * n);
    int a = rem / n;
    int b = rem % n;
    out.t11c.at(C, a, n + b) = xc(idx);
    out.t11c.at(C, n + b, a) = -xc(idx);
    out.t11b.at(C, a, n + b) = xb(idx);
    out.t11b.at(C, n + b, a) = -xb(idx);
  }
  out.b_t11c = bianchi_image(out.t11c, n);
  out.b_t20_minus_t11c = bianchi_image(out.t20 - out.t11c, n);
  out.dc_omega = dc_omega_frame(pkg);
  out.t11b_norm = out.t11b.max_abs();
  out.kernel_image_residual = bianchi_image(out.t11b, n).max_abs();
  TensorCube ref1 = out.dc_omega, ref2 = out.dc_omega;
  for (auto& v : ref1.v) v *= (t - 1.0) / 3.0;
  for (auto& v : ref2.v) v *= 1.0 / 3.0;
  out.gauduchon_residual = (out.b_t11c - ref1).max_abs();
  out.dcomega_residual = (out.b_t20_minus_t11c - ref2).max_abs();
  return out;
}

TorsionDecomposition torsion_type_decomposition(double t,
                                                const MetricField& field,
                                                const ChartPoint& p) {
  CurvaturePackage pkg = chern_package(field, p);
  return torsion_type_decomposition(t, pkg);
}

TorsionNormProfile torsion_norm_profile(const MetricField& field,
                                        const ChartPoint& p,
                                        const std::vector<double>& ts) {
  std::set<double> distinct(ts.begin(), ts.end());
  if (distinct.size() < 3)
    throw InvalidParameter("norm profile needs at least 3 distinct t values");
  CurvaturePackage pkg = chern_package(field, p);
  TorsionNormProfile out;
  out.t_values = ts;
  for (double tv : ts) {
    TensorCube Tt = full_torsion_frame(tv, pkg.torsion_frame);
    double sum = 0.0;
    for (const cx& v : Tt.v) sum += std::norm(v);
    out.norms.push_back(sum);
  }
  double maxnorm = *std::max_element(out.norms.begin(), out.norms.end());
  double minnorm = *std::min_element(out.norms.begin(), out.norms.end());
  if (maxnorm - minnorm < 1e-12 * std::max(1.0, maxnorm))
    throw DegenerateFit("torsion norm profile is flat");
  Eigen::Matrix3d AtA = Eigen::Matrix3d::Zero();
  Eigen::Vector3d Aty = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Eigen::Vector3d row(ts[i] * ts[i], ts[i], 1.0);
    AtA += row * row.transpose();
    Aty += row * out.norms[i];
  }
  Eigen::Vector3d coef = AtA.ldlt().solve(Aty);
  out.a = coef(0);
  out.b = coef(1);
  out.c = coef(2);
  if (std::abs(out.a) < 1e-12 * std::max(1.0, maxnorm))
    throw DegenerateFit("torsion norm profile has no quadratic term");
  out.vertex = -out.b / (2.0 * out.a);
  return out;
}

BergerResult berger_average(double t, const CurvaturePackage& pkg,
                            const Vec& v, BergerPairing pairing,
                            BergerMode mode, long samples,
                            std::uint64_t seed) {
  const int n = pkg.n;
  if (v.size() != n) throw IncompatibleIndices("vector has the wrong size");
  double vn2 = v.squaredNorm();
  if (!(vn2 > 1e-280)) throw ZeroVector("average direction is zero");
  Vec vn = v / std::sqrt(vn2);
  GauduchonCurvature cf = curvature_closed_form(t, pkg);
  const LabeledTensor& Rf = cf.R11_frame;

  Mat r1f = Mat::Zero(n, n), r2f = Mat::Zero(n, n), r3f = Mat::Zero(n, n),
      r4f = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        r1f(i, j) += Rf.at({i, j, k, k});
        r2f(i, j) += Rf.at({k, k, i, j});
        r3f(i, j) += Rf.at({i, k, k, j});
        r4f(i, j) += Rf.at({k, j, i, k});
      }
  auto herm_eval = [&](const Mat& m) {
    cx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += m(i, j) * vn(i) * std::conj(vn(j));
    return acc.real();
  };

  // Partial contraction over the fixed pair of slots; the remaining pair is
  // what gets averaged.
  Mat PC = Mat::Zero(n, n);
  double ref = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx val = Rf.at({i, j, k, l});
          switch (pairing) {
            case BergerPairing::HbcRic1:
              PC(k, l) += val * vn(i) * std::conj(vn(j));
              break;
            case BergerPairing::HbcRic2:
              PC(i, j) += val * vn(k) * std::conj(vn(l));
              break;
            case BergerPairing::AlteredRic3:
              PC(j, k) += val * vn(i) * std::conj(vn(l));
              break;
            case BergerPairing::AlteredRic4:
              PC(i, l) += val * std::conj(vn(j)) * vn(k);
              break;
          }
        }
  switch (pairing) {
    case BergerPairing::HbcRic1:
      ref = herm_eval(r1f) / n;
      break;
    case BergerPairing::HbcRic2:
      ref = herm_eval(r2f) / n;
      break;
    case BergerPairing::AlteredRic3:
      ref = herm_eval(r3f) / n;
      break;
    case BergerPairing::AlteredRic4: {
      cx acc(0.0, 0.0);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          acc += r4f(k, j) * vn(k) * std::conj(vn(j));
      ref = acc.real() / n;
      break;
    }
  }

  BergerResult out;
  out.reference = ref;
  if (mode == BergerMode::Exact) {
    out.average = PC.trace().real() / n;
    out.residual = std::abs(out.average - out.reference);
    out.samples = 0;
    return out;
  }
  if (samples < 2) throw InvalidParameter("montecarlo needs >= 2 samples");
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (long s = 0; s < samples; ++s) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = rng.gaussian_cx();
    double nm = w.norm();
    if (nm < 1e-12) {
      w.setZero();
      w(0) = 1.0;
      nm = 1.0;
    }
    w /= nm;
    cx acc(0.0, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        switch (pairing) {
          case BergerPairing::HbcRic1:
            acc += PC(a, b) * w(a) * std::conj(w(b));
            break;
          case BergerPairing::HbcRic2:
            acc += PC(a, b) * w(a) * std::conj(w(b));
            break;
          case BergerPairing::AlteredRic3:
            acc += PC(a, b) * std::conj(w(a)) * w(b);
            break;
          case BergerPairing::AlteredRic4:
            acc += PC(a, b) * w(a) * std::conj(w(b));
            break;
        }
      }
    double val = acc.real();
    double delta = val - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (val - mean);
  }
  out.average = mean;
  out.std_error =
      std::sqrt(m2 / static_cast<double>(samples - 1) /
                static_cast<double>(samples));
  out.residual = std::abs(out.average - out.reference);
  out.samples = samples;
  return out;
}

}  // namespace tgc
