#pragma once

#include <vector>

#include "tgc/metric.hpp"
#include "tgc/tensor.hpp"

namespace tgc {

// All Chern-connection data of one Hermitian metric at one point.
//
// Index conventions (coordinate frame):
//   gamma[i](k,j)          = Gamma^k_{ij} = g^{k lbar} d_{z_i} g_{j lbar}
//   torsion_coord[k,i,j]   = T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}
//   R[i,j,k,l]             = R_{i jbar k lbar}
//   nablaT_hol[a,k,i,j]    = (nabla_a T)^k_{ij}
//   nablaT_anti[a,k,i,j]   = (nabla_{abar} T)^k_{ij} = d_{zbar_a} T^k_{ij}
// Ricci matrices have a holomorphic row index and an antiholomorphic column
// index. Torsion quadratics and tau live in the unitary frame; their
// coordinate views are obtained by the inverse frame transform.
struct CurvaturePackage {
  ChartPoint point;
  int n = 0;
  MetricJet jet;  // order >= 2
  HermitianMatrix g;
  InverseMetric ginv;
  FrameMatrix frame;

  std::vector<Mat> gamma;
  LabeledTensor torsion_coord;
  LabeledTensor torsion_frame;

  LabeledTensor nablaT_hol;
  LabeledTensor nablaT_anti;
  LabeledTensor nablaT_hol_frame;
  LabeledTensor nablaT_anti_frame;

  LabeledTensor R;
  LabeledTensor R_frame;

  Mat ricci1, ricci2, ricci3, ricci4;
  double scal = 0.0;
  double scal_tilde = 0.0;

  Vec tau;  // tau_i = sum_k Tf^k_{ik}, unitary frame
  double normT2 = 0.0;
  double normTau2 = 0.0;
  Mat t_diamond, t_circle, t_heart;                    // unitary frame
  Mat t_diamond_coord, t_circle_coord, t_heart_coord;  // coordinate views

  // del_omega[i,j,k]    = d_{z_i} g_{j kbar} - d_{z_j} g_{i kbar}
  //                       (the (2,1)-form d-omega on slots d_i, d_j, dbar_k)
  // delbar_omega[i,j,k] = d_{zbar_j} g_{i kbar} - d_{zbar_k} g_{i jbar}
  //                       (the (1,2)-form on slots d_i, dbar_j, dbar_k)
  LabeledTensor del_omega;
  LabeledTensor delbar_omega;
  // ddbar_omega[i,j,k,l] = dd-bar omega on slots (d_i, d_j, dbar_k, dbar_l).
  LabeledTensor ddbar_omega;
  // The (1,1)-contraction of ddbar_omega entering the trace identity
  // Ric2 = Ric1 - lambda_ddbar_omega - (P + Q) + t_diamond_coord.
  Mat lambda_ddbar_omega;
  Mat P;  // Ric1 - Ric3
  Mat Q;  // Ric1 - Ric4

  // Checks the structural invariants: conjugate symmetry of R, Hermitian
  // ricci1/ricci2, ricci4 = ricci3^dagger, real nonnegative diagonals of
  // the Gram-type quadratics, trace pairings. Throws ConsistencyFailure.
  void validate() const;
};

// Connection coefficients Gamma^k_{ij}; gamma[i](k,j). Needs order >= 1.
std::vector<Mat> chern_connection(const MetricJet& jet);

// Torsion T^k_{ij} in coordinates; labels (HolUp, HolDown, HolDown).
LabeledTensor chern_torsion(const std::vector<Mat>& gamma);

// First Wirtinger derivatives of the connection coefficients.
//   dz[a*n+i](k,j) = d_{z_a}    Gamma^k_{ij}
//   dw[a*n+i](k,j) = d_{zbar_a} Gamma^k_{ij}
// Needs order >= 2.
struct ConnectionDerivatives {
  std::vector<Mat> dz, dw;
};
ConnectionDerivatives connection_derivatives(const MetricJet& jet);

// Chern-covariant derivatives of the torsion, coordinates:
//   hol[a,k,i,j]  = (nabla_a T)^k_{ij}
//   anti[a,k,i,j] = (nabla_{abar} T)^k_{ij}
// The antiholomorphic derivative is the plain d_{zbar_a} since the
// connection has no mixed coefficients. Needs order >= 2.
struct TorsionDerivatives {
  LabeledTensor hol, anti;
};
TorsionDerivatives torsion_covariant_derivative(const MetricJet& jet);

// Curvature R_{i jbar k lbar}; labels (HolDown, AntiDown, HolDown,
// AntiDown). Needs order >= 2.
LabeledTensor chern_curvature(const MetricJet& jet);

// The four metric traces of a (1,1)-curvature tensor in coordinates:
//   r1_{i jbar} = g^{k lbar} R_{i jbar k lbar}
//   r2_{k lbar} = g^{i jbar} R_{i jbar k lbar}
//   r3_{i lbar} = g^{k jbar} R_{i jbar k lbar}
//   r4_{k jbar} = g^{i lbar} R_{i jbar k lbar}
struct RicciTraces {
  Mat r1, r2, r3, r4;
};
RicciTraces ricci_traces(const LabeledTensor& R, const InverseMetric& ginv);

// Gram-type torsion quadratics from the unitary-frame torsion:
//   diamond_{i jbar} = sum_{k,q} T^k_{iq} conj(T^k_{jq})
//   circle_{i jbar}  = sum_{s,p} T^j_{sp} conj(T^i_{sp})
//   heart_{i jbar}   = sum_q T^j_{iq} conj(sum_k T^k_{kq})
//   tau_i            = sum_k T^k_{ik}
struct TorsionQuadratics {
  Mat diamond, circle, heart;
  Vec tau;
  double normT2 = 0.0;
  double normTau2 = 0.0;
};
TorsionQuadratics torsion_quadratics(const LabeledTensor& torsion_frame);

// Derivative forms of the fundamental form: del_omega / delbar_omega
// patterns, the (2,2) components of ddbar omega, and its (1,1) trace
// contraction (see CurvaturePackage field comments). Needs order >= 2.
struct OmegaDerivatives {
  LabeledTensor del, delbar, ddbar;
  Mat lambda_ddbar;
};
OmegaDerivatives omega_derivative_forms(const MetricJet& jet);

// Aggregate everything at one point (jet order 2 evaluation).
CurvaturePackage chern_package(const MetricField& field, const ChartPoint& p);

}  // namespace tgc
