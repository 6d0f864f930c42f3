#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "tgc/error.hpp"

namespace tgc {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Index variance of one tensor slot. Holomorphic indices range over the
// coordinate vector fields d/dz_i (or frame vectors e_a), antiholomorphic
// over their conjugates.
enum class IndexKind : std::uint8_t { HolUp, HolDown, AntiDown, AntiUp };

enum class Frame : std::uint8_t { Coordinate, Unitary };

IndexKind conjugate_kind(IndexKind k);

// Hermitian matrix value, e.g. the metric g_{i jbar} at a point.
// entry(i,j) = conj(entry(j,i)) is checked on validate().
struct HermitianMatrix {
  int n = 0;
  Mat m;

  HermitianMatrix() = default;
  explicit HermitianMatrix(Mat value);

  // Throws ConsistencyFailure if conjugate symmetry is violated beyond
  // 1e-12 relative to the largest entry.
  void validate() const;
  // Cholesky-based positive definiteness test.
  bool positive_definite() const;
};

// g^{k lbar} with the convention g^{k lbar} g_{m lbar} = delta_{km}.
// Stored so that gik(k,l) = g^{k lbar}; as a matrix this is the transpose
// of the plain matrix inverse of g.
struct InverseMetric {
  int n = 0;
  Mat gik;
};

// Unitary coframe data for a metric value g. The stored matrix E is
// lower-triangular with strictly positive real diagonal and satisfies
// E^dagger g E = I. The frame vectors are the conjugated columns,
// e_a = sum_i conj(E(i,a)) d/dz_i, which makes E^dagger g E = I exactly the
// statement g(e_a, conj(e_b)) = delta_ab.
struct FrameMatrix {
  int n = 0;
  Mat E;
};

// Dense complex tensor with per-index variance labels and a frame tag.
// Extent is n in every slot; data is stored row-major in index order.
struct LabeledTensor {
  int n = 0;
  std::vector<IndexKind> labels;
  Frame frame = Frame::Coordinate;
  std::vector<cx> data;

  LabeledTensor() = default;
  LabeledTensor(int n_, std::vector<IndexKind> labels_,
                Frame frame_ = Frame::Coordinate);

  int rank() const { return static_cast<int>(labels.size()); }
  std::size_t size() const { return data.size(); }

  cx& at(std::initializer_list<int> idx);
  cx at(std::initializer_list<int> idx) const;
  cx& operator[](std::size_t flat) { return data[flat]; }
  cx operator[](std::size_t flat) const { return data[flat]; }

  std::size_t flat_index(const int* idx) const;

  double max_abs() const;
};

LabeledTensor operator+(const LabeledTensor& a, const LabeledTensor& b);
LabeledTensor operator-(const LabeledTensor& a, const LabeledTensor& b);
LabeledTensor operator*(cx s, const LabeledTensor& a);

// Largest componentwise |a - b|; labels must match.
double max_abs_diff(const LabeledTensor& a, const LabeledTensor& b);

// Inverse of a Hermitian positive-definite metric value, in the
// g^{k lbar} convention above. Throws SingularMetric.
InverseMetric hermitian_inverse(const HermitianMatrix& g);

// Canonical unitary frame for g: deterministic, lower-triangular E with
// positive real diagonal and E^dagger g E = I. Built from the Cholesky
// factorization of the index-reversed matrix. Throws SingularMetric.
FrameMatrix unitary_frame(const HermitianMatrix& g);

// Trace over a dual pair of slots: (HolUp, HolDown) or (AntiUp, AntiDown)
// in either order. Throws IncompatibleIndices otherwise.
LabeledTensor contract(const LabeledTensor& t, int a, int b);

// Metric-weighted trace over a (HolDown, AntiDown) pair using
// weight(p, q) = g^{p qbar} (pass hermitian_inverse(g).gik), or over a
// (HolUp, AntiUp) pair using weight(p, q) = g_{p qbar}. Position a must
// carry the holomorphic slot.
LabeledTensor contract(const LabeledTensor& t, int a, int b,
                       const Mat& weight);

// Frame conversion. HolDown slots contract with conj(E) reading columns as
// frame vectors; AntiDown with E; upper slots with the corresponding
// inverses. Converting g itself yields the identity matrix.
LabeledTensor to_unitary_frame(const LabeledTensor& t, const FrameMatrix& E);
LabeledTensor from_unitary_frame(const LabeledTensor& t,
                                 const FrameMatrix& E);

// Helpers used across modules.
LabeledTensor matrix_to_tensor(const Mat& m, IndexKind k0, IndexKind k1,
                               Frame frame);
Mat tensor_to_matrix(const LabeledTensor& t);

}  // namespace tgc
