#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgc/chern.hpp"

namespace tgc {

// The one-parameter family of Hermitian connections interpolating the
// Lichnerowicz (t = 0) and Chern (t = 1) connections.
struct GauduchonParams {
  double t = 1.0;

  // Named members of the family: chern = 1, lichnerowicz = 0, bismut = -1,
  // minimal = 1/3, hermitian_conformal = 1/2. Throws ConfigError.
  static GauduchonParams preset(const std::string& name);
  // The recurring coefficient (1 - t)/2.
  static double s(double t) { return (1.0 - t) / 2.0; }
};

// Curvature of the t-connection at one point, by one computation route.
//   R11[i,j,k,l] = R_{i jbar k lbar}   labels (H, A, H, A)
//   R20[i,j,k,l] = R_{i j k lbar}      labels (H, H, H, A), antisymmetric in (i,j)
struct GauduchonCurvature {
  double t = 1.0;
  std::string route;  // "direct" or "closed_form"
  LabeledTensor R11, R20;
  LabeledTensor R11_frame, R20_frame;
  Mat ricci1, ricci2, ricci3, ricci4;
  double scal = 0.0;
  double scal_tilde = 0.0;

  // Conjugate symmetry of R11 and antisymmetry of R20. Throws
  // ConsistencyFailure.
  void validate() const;
};

// The difference tensor between the t-connection and the Chern connection,
// stored with slot order [i,k,j] = (A_{ibar})^k_j and labels
// (AntiDown, HolUp, HolDown). In the unitary frame
// (A_{ibar})^k_j = ((1-t)/2) conj(T^j_{ik}); the coordinate version lowers
// the same invariant with the metric.
LabeledTensor a_tensor_frame(double t, const LabeledTensor& torsion_frame);
LabeledTensor a_tensor(double t, const CurvaturePackage& pkg);

// Coefficient matrices of the t-connection in coordinates: hol[i](k,j) is
// the dz_i-direction endomorphism, anti[i](k,j) the dzbar_i one. Both are
// affine in t.
struct ConnectionCoefficients {
  std::vector<Mat> hol, anti;
};
ConnectionCoefficients gauduchon_coefficients(double t,
                                              const CurvaturePackage& pkg);

// Route 1: assemble the curvature from the A-tensor field and its analytic
// Chern-covariant derivatives (consumes order-2 jets through the package).
GauduchonCurvature curvature_direct(double t, const CurvaturePackage& pkg);

// Route 2: closed-form expression in the unitary frame from the Chern
// curvature, torsion, and covariant torsion derivatives.
// formula_perturbation is a verification hook: it scales the second-order
// torsion term of R11 by (1 + formula_perturbation) so that negative-control
// tests can witness a detectable corruption. Production callers leave it 0.
GauduchonCurvature curvature_closed_form(double t, const CurvaturePackage& pkg,
                                         double formula_perturbation = 0.0);

// The four Ricci forms by three routes: (a) traces of the closed-form R11,
// (b) scalar combinations of the Chern Riccis and torsion quadratics,
// (c) the equivalent form organized through P and Q. Returned matrices are
// route (a). Throws ConsistencyFailure if the routes disagree beyond 1e-7.
struct RicciConsistency {
  Mat ricci1, ricci2, ricci3, ricci4;
  double residual_combination = 0.0;  // route (a) vs (b)
  double residual_pq = 0.0;           // route (a) vs (c)
};
RicciConsistency gauduchon_ricci(double t, const CurvaturePackage& pkg);

// Scalar curvatures of the t-connection:
//   scal       = t cScal + (1-t) cScalTilde
//   scal_tilde = t cScalTilde + (1-t) cScal - ((1-t)^2/4)(|T|^2 + |tau|^2)
// cross-checked against traces of the closed-form Riccis; residual is the
// larger of the two deviations. Throws ConsistencyFailure beyond 1e-8.
struct ScalarPair {
  double scal = 0.0;
  double scal_tilde = 0.0;
  double residual = 0.0;
};
ScalarPair gauduchon_scalars(double t, const CurvaturePackage& pkg);

// Holomorphic sectional curvature R(v, vbar, v, vbar)/|v|^4 for a coordinate
// tangent vector v. Scale-invariant. Throws ZeroVector.
double hsc(const GauduchonCurvature& curv, const HermitianMatrix& g,
           const Vec& v);
double hsc(double t, const CurvaturePackage& pkg, const Vec& v);

// Real bisectional curvature in the unitary frame rotated by U:
//   rbc         = (1/|lambda|^2) sum_{a,c} R_{a abar c cbar} lambda_a lambda_c
//   altered_rbc = (1/|lambda|^2) sum_{a,c} R_{a cbar c abar} lambda_a lambda_c
// U must be unitary (InvalidParameter), lambda nonzero (ZeroVector).
double rbc(double t, const CurvaturePackage& pkg, const Mat& U,
           const Eigen::VectorXd& lambda);
double altered_rbc(double t, const CurvaturePackage& pkg, const Mat& U,
                   const Eigen::VectorXd& lambda);

// Altered holomorphic sectional curvature rbc + altered_rbc, together with
// its value at t = 1 and the predicted monotonicity gap
//   gap = ((t-1)^2 / (4 |lambda|^2)) sum_{i,k,q} (T_{iq}^i conj(T_{kq}^k)
//         + |T_{iq}^k|^2) lambda_i lambda_k
// in the rotated frame. Throws ConsistencyFailure if
// value != reference - gap beyond 1e-8.
struct AlteredHsc {
  double value = 0.0;
  double reference = 0.0;  // value at t = 1
  double gap = 0.0;
};
AlteredHsc altered_hsc(double t, const CurvaturePackage& pkg, const Mat& U,
                       const Eigen::VectorXd& lambda);

// Sampled extrema of the holomorphic sectional curvature over the given
// points and random unit directions, refined by a stochastic hill-climb on
// the direction sphere. Deterministic under the seed.
struct HscSamplingConfig {
  int directions = 48;
  int climb_steps = 60;
  std::uint64_t seed = 1;
};
struct HscExtrema {
  double min_value = 0.0;
  double max_value = 0.0;
  ChartPoint argmin_point, argmax_point;
  Vec argmin_direction, argmax_direction;
};
HscExtrema hsc_extrema(double t, const MetricField& field,
                       const std::vector<ChartPoint>& points,
                       const HscSamplingConfig& cfg);

// Dense complex array with three slots of extent N = 2n, indexing the
// complexified frame (first n entries holomorphic, last n conjugates).
struct TensorCube {
  int N = 0;
  std::vector<cx> v;

  TensorCube() = default;
  explicit TensorCube(int N_)
      : N(N_), v(static_cast<std::size_t>(N_) * N_ * N_, cx(0.0, 0.0)) {}
  cx& at(int a, int b, int c) {
    return v[(static_cast<std::size_t>(a) * N + b) * N + c];
  }
  cx at(int a, int b, int c) const {
    return v[(static_cast<std::size_t>(a) * N + b) * N + c];
  }
  double max_abs() const;
};
TensorCube operator-(const TensorCube& a, const TensorCube& b);

// Decomposition of the full torsion of the t-connection on the complexified
// tangent bundle through the cyclic-sum (Bianchi) projector B. t20 is the
// like-degree part, t11b the kernel component of the mixed part, t11c its
// orthogonal complement. dc_omega is the reference 3-form built from the
// first metric derivatives; the defining identities are
//   t11b = 0,  B(t11c) = ((t-1)/3) dc_omega,  B(t20 - t11c) = (1/3) dc_omega
// and the residual fields record how well each holds.
struct TorsionDecomposition {
  double t = 1.0;
  int n = 0;
  int projector_rank = 0;
  TensorCube full, t20, t11b, t11c;
  TensorCube b_t11c, b_t20_minus_t11c, dc_omega;
  double reassembly_residual = 0.0;
  double t11b_norm = 0.0;
  double kernel_image_residual = 0.0;  // |B(t11b)|
  double gauduchon_residual = 0.0;     // |B(t11c) - ((t-1)/3) dc_omega|
  double dcomega_residual = 0.0;       // |B(t20 - t11c) - (1/3) dc_omega|
};
TorsionDecomposition torsion_type_decomposition(double t,
                                                const CurvaturePackage& pkg);
TorsionDecomposition torsion_type_decomposition(double t,
                                                const MetricField& field,
                                                const ChartPoint& p);

// Full torsion components of the t-connection in the complexified unitary
// frame (the object decomposed above).
TensorCube full_torsion_frame(double t, const LabeledTensor& torsion_frame);

// Squared norm of the full torsion per t plus the exact quadratic fit
// a t^2 + b t + c and its vertex. Throws InvalidParameter for fewer than
// three distinct t values and DegenerateFit when the profile is flat
// (Kaehler case).
struct TorsionNormProfile {
  std::vector<double> t_values;
  std::vector<double> norms;
  double a = 0.0, b = 0.0, c = 0.0;
  double vertex = 0.0;
};
TorsionNormProfile torsion_norm_profile(const MetricField& field,
                                        const ChartPoint& p,
                                        const std::vector<double>& ts);

// Sphere averages of the holomorphic bisectional curvature against the four
// Ricci references. v is a unitary-frame vector; the pairing selects which
// slot pair is averaged and which Ricci form supplies the reference:
//   HbcRic1:     average over w of R(v, vbar, w, wbar)  vs  Ric1(v, vbar)/n
//   HbcRic2:     average over v of R(v, vbar, w, wbar)  vs  Ric2(w, wbar)/n
//   AlteredRic3: average over w of R(v, wbar, w, vbar)  vs  Ric3(v, vbar)/n
//   AlteredRic4: average over v of R(v, wbar, w, vbar)  vs  Ric4(w, wbar)/n
// (the fixed vector is always the argument v, normalized). Exact mode
// contracts with the identity/n; montecarlo averages over unit-sphere
// samples and reports the standard error. Throws ZeroVector.
enum class BergerMode { Exact, MonteCarlo };
enum class BergerPairing { HbcRic1, HbcRic2, AlteredRic3, AlteredRic4 };
struct BergerResult {
  double average = 0.0;
  double reference = 0.0;
  double residual = 0.0;
  double std_error = 0.0;
  long samples = 0;
};
BergerResult berger_average(double t, const CurvaturePackage& pkg,
                            const Vec& v, BergerPairing pairing,
                            BergerMode mode, long samples, std::uint64_t seed);

}  // namespace tgc
