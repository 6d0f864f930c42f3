#include "tgc/chern.hpp"

#include <cmath>
#include <string>

namespace tgc {

namespace {

// Plain matrix inverse of g; entries gim(l,k) = g^{k lbar}.
Mat plain_inverse(const InverseMetric& ginv) { return ginv.gik.transpose(); }

double trace_against(const Mat& r, const Mat& gim) {
  return (r * gim).trace().real();
}

}  // namespace

std::vector<Mat> chern_connection(const MetricJet& jet) {
  if (jet.order < 1)
    throw IncompatibleIndices("connection needs a jet of order >= 1");
  const int n = jet.n;
  Mat gplain = plain_inverse(hermitian_inverse(HermitianMatrix(jet.g)));
  std::vector<Mat> gamma(n);
  for (int i = 0; i < n; ++i) gamma[i] = (jet.dh[i] * gplain).transpose();
  return gamma;
}

LabeledTensor chern_torsion(const std::vector<Mat>& gamma) {
  const int n = static_cast<int>(gamma.size());
  LabeledTensor T(n, {IndexKind::HolUp, IndexKind::HolDown, IndexKind::HolDown});
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T.at({k, i, j}) = gamma[i](k, j) - gamma[j](k, i);
  return T;
}

ConnectionDerivatives connection_derivatives(const MetricJet& jet) {
  if (jet.order < 2)
    throw IncompatibleIndices("connection derivatives need a jet of order >= 2");
  const int n = jet.n;
  Mat gplain = plain_inverse(hermitian_inverse(HermitianMatrix(jet.g)));
  ConnectionDerivatives out;
  out.dz.resize(n * n);
  out.dw.resize(n * n);
  for (int a = 0; a < n; ++a) {
    Mat dz_gi = -gplain * jet.dh[a] * gplain;
    Mat dw_gi = -gplain * jet.da[a] * gplain;
    for (int i = 0; i < n; ++i) {
      out.dz[a * n + i] =
          (jet.dh[i] * dz_gi).transpose() + (jet.hh[a * n + i] * gplain).transpose();
      out.dw[a * n + i] =
          (jet.dh[i] * dw_gi).transpose() + (jet.ha[i * n + a] * gplain).transpose();
    }
  }
  return out;
}

TorsionDerivatives torsion_covariant_derivative(const MetricJet& jet) {
  const int n = jet.n;
  std::vector<Mat> gamma = chern_connection(jet);
  LabeledTensor T = chern_torsion(gamma);
  ConnectionDerivatives dg = connection_derivatives(jet);
  TorsionDerivatives out{
      LabeledTensor(n, {IndexKind::HolDown, IndexKind::HolUp, IndexKind::HolDown,
                        IndexKind::HolDown}),
      LabeledTensor(n, {IndexKind::AntiDown, IndexKind::HolUp, IndexKind::HolDown,
                        IndexKind::HolDown})};
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cx dz = dg.dz[a * n + i](k, j) - dg.dz[a * n + j](k, i);
          cx corr(0.0, 0.0);
          for (int m = 0; m < n; ++m)
            corr += gamma[a](k, m) * T.at({m, i, j}) -
                    gamma[a](m, i) * T.at({k, m, j}) -
                    gamma[a](m, j) * T.at({k, i, m});
          out.hol.at({a, k, i, j}) = dz + corr;
          out.anti.at({a, k, i, j}) =
              dg.dw[a * n + i](k, j) - dg.dw[a * n + j](k, i);
        }
  return out;
}

LabeledTensor chern_curvature(const MetricJet& jet) {
  if (jet.order < 2)
    throw IncompatibleIndices("curvature needs a jet of order >= 2");
  const int n = jet.n;
  Mat gplain = plain_inverse(hermitian_inverse(HermitianMatrix(jet.g)));
  LabeledTensor R(n, {IndexKind::HolDown, IndexKind::AntiDown, IndexKind::HolDown,
                      IndexKind::AntiDown});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx quad(0.0, 0.0);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              quad += gplain(q, p) * jet.dh[i](k, q) * jet.da[j](p, l);
          R.at({i, j, k, l}) = -jet.ha[i * n + j](k, l) + quad;
        }
  return R;
}

RicciTraces ricci_traces(const LabeledTensor& R, const InverseMetric& ginv) {
  if (R.rank() != 4 || R.labels != std::vector<IndexKind>{IndexKind::HolDown,
                                                          IndexKind::AntiDown,
                                                          IndexKind::HolDown,
                                                          IndexKind::AntiDown})
    throw IncompatibleIndices("ricci traces need (1,1)-curvature labels");
  const int n = R.n;
  Mat gim = plain_inverse(ginv);
  RicciTraces out{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n),
                  Mat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cx v = R.at({i, j, k, l});
          out.r1(i, j) += v * gim(l, k);
          out.r2(k, l) += v * gim(j, i);
          out.r3(i, l) += v * gim(j, k);
          out.r4(k, j) += v * gim(l, i);
        }
  return out;
}

TorsionQuadratics torsion_quadratics(const LabeledTensor& torsion_frame) {
  if (torsion_frame.frame != Frame::Unitary)
    throw IncompatibleIndices("torsion quadratics need the unitary frame");
  const int n = torsion_frame.n;
  const LabeledTensor& T = torsion_frame;
  TorsionQuadratics out{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n),
                        Vec::Zero(n)};
  Vec colsum = Vec::Zero(n);
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) colsum(q) += T.at({k, k, q});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
          out.diamond(i, j) += T.at({k, i, q}) * std::conj(T.at({k, j, q}));
      for (int s = 0; s < n; ++s)
        for (int p = 0; p < n; ++p)
          out.circle(i, j) += T.at({j, s, p}) * std::conj(T.at({i, s, p}));
      for (int q = 0; q < n; ++q)
        out.heart(i, j) += T.at({j, i, q}) * std::conj(colsum(q));
    }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) out.tau(i) += T.at({k, i, k});
  for (const cx& v : T.data) out.normT2 += std::norm(v);
  out.normTau2 = out.tau.squaredNorm();
  return out;
}

OmegaDerivatives omega_derivative_forms(const MetricJet& jet) {
  if (jet.order < 2)
    throw IncompatibleIndices("omega derivative forms need a jet of order >= 2");
  const int n = jet.n;
  Mat gim = plain_inverse(hermitian_inverse(HermitianMatrix(jet.g)));
  OmegaDerivatives out{
      LabeledTensor(n, {IndexKind::HolDown, IndexKind::HolDown, IndexKind::AntiDown}),
      LabeledTensor(n, {IndexKind::HolDown, IndexKind::AntiDown, IndexKind::AntiDown}),
      LabeledTensor(n, {IndexKind::HolDown, IndexKind::HolDown, IndexKind::AntiDown,
                        IndexKind::AntiDown}),
      Mat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        out.del.at({i, j, k}) = jet.dh[i](j, k) - jet.dh[j](i, k);
        out.delbar.at({i, j, k}) = jet.da[j](i, k) - jet.da[k](i, j);
      }
  const cx mi(0.0, -1.0);
  auto d2 = [&](int a, int b, int c, int d) { return jet.ha[a * n + b](c, d); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.ddbar.at({i, j, k, l}) =
              mi * (d2(i, k, j, l) - d2(j, k, i, l) - d2(i, l, j, k) +
                    d2(j, l, i, k));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      cx acc(0.0, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += gim(j, i) * (d2(i, j, k, l) + d2(k, l, i, j) - d2(i, l, k, j) -
                              d2(k, j, i, l));
      out.lambda_ddbar(k, l) = acc;
    }
  return out;
}

void CurvaturePackage::validate() const {
  auto herm_dev = [](const Mat& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
  };
  double scale = std::max({1.0, ricci1.cwiseAbs().maxCoeff(),
                           ricci2.cwiseAbs().maxCoeff(),
                           ricci3.cwiseAbs().maxCoeff(),
                           ricci4.cwiseAbs().maxCoeff()});
  // Conjugate symmetry of R makes ricci1 and ricci2 Hermitian and pairs
  // ricci3 with ricci4 as mutual adjoints; ricci3 alone need not be
  // Hermitian for a generic metric.
  for (const Mat* r : {&ricci1, &ricci2})
    if (herm_dev(*r) > 1e-10 * scale)
      throw ConsistencyFailure("a Ricci trace is not Hermitian (residual " +
                               std::to_string(herm_dev(*r)) + ")");
  double pair_dev = (ricci4 - ricci3.adjoint()).cwiseAbs().maxCoeff();
  if (pair_dev > 1e-10 * scale)
    throw ConsistencyFailure(
        "third and fourth Ricci traces are not mutually adjoint (residual " +
        std::to_string(pair_dev) + ")");
  double qscale = std::max(1.0, normT2);
  for (const Mat* q : {&t_diamond, &t_circle})
    if (herm_dev(*q) > 1e-10 * qscale ||
        q->diagonal().real().minCoeff() < -1e-12 * qscale ||
        q->diagonal().imag().cwiseAbs().maxCoeff() > 1e-12 * qscale)
      throw ConsistencyFailure(
          "a Gram-type torsion quadratic is not Hermitian nonnegative");
  Mat gim = plain_inverse(ginv);
  double tr2 = trace_against(ricci2, gim);
  double tr4 = trace_against(ricci4, gim);
  double sscale = std::max({1.0, std::abs(scal), std::abs(scal_tilde)});
  if (std::abs(tr2 - scal) > 1e-9 * sscale ||
      std::abs(tr4 - scal_tilde) > 1e-9 * sscale)
    throw ConsistencyFailure("scalar curvature trace pairings disagree");
  double rdev = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          rdev = std::max(rdev, std::abs(R.at({i, j, k, l}) -
                                         std::conj(R.at({j, i, l, k}))));
  if (rdev > 1e-10 * std::max(1.0, R.max_abs()))
    throw ConsistencyFailure("curvature lacks conjugate symmetry (residual " +
                             std::to_string(rdev) + ")");
}

CurvaturePackage chern_package(const MetricField& field, const ChartPoint& p) {
  CurvaturePackage pkg;
  pkg.point = p;
  pkg.n = field.n;
  pkg.jet = evaluate_jet(field, p, 2);
  pkg.g = HermitianMatrix(pkg.jet.g);
  pkg.ginv = hermitian_inverse(pkg.g);
  pkg.frame = unitary_frame(pkg.g);

  pkg.gamma = chern_connection(pkg.jet);
  pkg.torsion_coord = chern_torsion(pkg.gamma);
  pkg.torsion_frame = to_unitary_frame(pkg.torsion_coord, pkg.frame);

  TorsionDerivatives dT = torsion_covariant_derivative(pkg.jet);
  pkg.nablaT_hol = std::move(dT.hol);
  pkg.nablaT_anti = std::move(dT.anti);
  pkg.nablaT_hol_frame = to_unitary_frame(pkg.nablaT_hol, pkg.frame);
  pkg.nablaT_anti_frame = to_unitary_frame(pkg.nablaT_anti, pkg.frame);

  pkg.R = chern_curvature(pkg.jet);
  pkg.R_frame = to_unitary_frame(pkg.R, pkg.frame);

  RicciTraces rt = ricci_traces(pkg.R, pkg.ginv);
  pkg.ricci1 = std::move(rt.r1);
  pkg.ricci2 = std::move(rt.r2);
  pkg.ricci3 = std::move(rt.r3);
  pkg.ricci4 = std::move(rt.r4);
  Mat gim = plain_inverse(pkg.ginv);
  pkg.scal = trace_against(pkg.ricci1, gim);
  pkg.scal_tilde = trace_against(pkg.ricci3, gim);

  TorsionQuadratics tq = torsion_quadratics(pkg.torsion_frame);
  pkg.tau = std::move(tq.tau);
  pkg.normT2 = tq.normT2;
  pkg.normTau2 = tq.normTau2;
  pkg.t_diamond = std::move(tq.diamond);
  pkg.t_circle = std::move(tq.circle);
  pkg.t_heart = std::move(tq.heart);
  auto to_coord = [&](const Mat& m) {
    return tensor_to_matrix(from_unitary_frame(
        matrix_to_tensor(m, IndexKind::HolDown, IndexKind::AntiDown,
                         Frame::Unitary),
        pkg.frame));
  };
  pkg.t_diamond_coord = to_coord(pkg.t_diamond);
  pkg.t_circle_coord = to_coord(pkg.t_circle);
  pkg.t_heart_coord = to_coord(pkg.t_heart);

  OmegaDerivatives od = omega_derivative_forms(pkg.jet);
  pkg.del_omega = std::move(od.del);
  pkg.delbar_omega = std::move(od.delbar);
  pkg.ddbar_omega = std::move(od.ddbar);
  pkg.lambda_ddbar_omega = std::move(od.lambda_ddbar);

  pkg.P = pkg.ricci1 - pkg.ricci3;
  pkg.Q = pkg.ricci1 - pkg.ricci4;
  pkg.validate();
  return pkg;
}

}  // namespace tgc
