#include "tgc/tensor.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace tgc {

IndexKind conjugate_kind(IndexKind k) {
  switch (k) {
    case IndexKind::HolUp:
      return IndexKind::AntiUp;
    case IndexKind::HolDown:
      return IndexKind::AntiDown;
    case IndexKind::AntiDown:
      return IndexKind::HolDown;
    case IndexKind::AntiUp:
      return IndexKind::HolUp;
  }
  return k;
}

HermitianMatrix::HermitianMatrix(Mat value)
    : n(static_cast<int>(value.rows())), m(std::move(value)) {
  if (m.rows() != m.cols()) throw IncompatibleIndices("matrix not square");
}

void HermitianMatrix::validate() const {
  double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * std::max(1.0, scale))
    throw ConsistencyFailure("matrix is not conjugate-symmetric (residual " +
                             std::to_string(dev) + ")");
}

bool HermitianMatrix::positive_definite() const {
  Eigen::LLT<Mat> llt(m);
  return llt.info() == Eigen::Success;
}

InverseMetric hermitian_inverse(const HermitianMatrix& g) {
  Eigen::LLT<Mat> llt(g.m);
  if (llt.info() != Eigen::Success)
    throw SingularMetric("metric value is not positive-definite");
  Mat inv = llt.solve(Mat::Identity(g.n, g.n));
  // inv(l,k) solves g * inv = I, i.e. g_{k lbar} inv(l,m) = delta; the
  // g^{k lbar} convention stores the transpose.
  InverseMetric out;
  out.n = g.n;
  out.gik = inv.transpose();
  return out;
}

FrameMatrix unitary_frame(const HermitianMatrix& g) {
  const int n = g.n;
  // Reverse the index order, factor, and reverse back: this yields the
  // unique lower-triangular E with positive diagonal and E^dagger g E = I.
  Mat rev = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) rev(i, n - 1 - i) = 1.0;
  Eigen::LLT<Mat> llt(rev * g.m * rev);
  if (llt.info() != Eigen::Success)
    throw SingularMetric("metric value is not positive-definite");
  Mat K = llt.matrixL();          // J g J = K K^dagger, K lower
  Mat R = K.adjoint();            // J g J = R^dagger R, R upper
  Mat Rinv = R.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  FrameMatrix out;
  out.n = n;
  out.E = rev * Rinv * rev;
  return out;
}

LabeledTensor::LabeledTensor(int n_, std::vector<IndexKind> labels_,
                             Frame frame_)
    : n(n_), labels(std::move(labels_)), frame(frame_) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) total *= n;
  data.assign(total, cx(0.0, 0.0));
}

std::size_t LabeledTensor::flat_index(const int* idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < rank(); ++i) flat = flat * n + idx[i];
  return flat;
}

cx& LabeledTensor::at(std::initializer_list<int> idx) {
  return data[flat_index(idx.begin())];
}

cx LabeledTensor::at(std::initializer_list<int> idx) const {
  return data[flat_index(idx.begin())];
}

double LabeledTensor::max_abs() const {
  double m = 0.0;
  for (const cx& v : data) m = std::max(m, std::abs(v));
  return m;
}

static void require_same_shape(const LabeledTensor& a,
                               const LabeledTensor& b) {
  if (a.n != b.n || a.labels != b.labels || a.frame != b.frame)
    throw IncompatibleIndices("tensor shapes/labels/frames differ");
}

LabeledTensor operator+(const LabeledTensor& a, const LabeledTensor& b) {
  require_same_shape(a, b);
  LabeledTensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

LabeledTensor operator-(const LabeledTensor& a, const LabeledTensor& b) {
  require_same_shape(a, b);
  LabeledTensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

LabeledTensor operator*(cx s, const LabeledTensor& a) {
  LabeledTensor out = a;
  for (auto& v : out.data) v *= s;
  return out;
}

double max_abs_diff(const LabeledTensor& a, const LabeledTensor& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

namespace {

// Iterate over all multi-indices of the given rank; callback gets idx array.
template <typename F>
void for_each_index(int n, int rank, F&& f) {
  std::vector<int> idx(std::max(rank, 1), 0);
  if (rank == 0) {
    f(idx.data());
    return;
  }
  while (true) {
    f(idx.data());
    int pos = rank - 1;
    while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
    if (pos < 0) break;
  }
}

LabeledTensor contract_impl(const LabeledTensor& t, int a, int b,
                            const Mat* weight) {
  const int r = t.rank();
  if (a == b || a < 0 || b < 0 || a >= r || b >= r)
    throw IncompatibleIndices("invalid contraction positions");
  std::vector<IndexKind> labels;
  for (int i = 0; i < r; ++i)
    if (i != a && i != b) labels.push_back(t.labels[i]);
  LabeledTensor out(t.n, labels, t.frame);
  std::vector<int> full(r, 0);
  for_each_index(t.n, r - 2, [&](const int* idx) {
    int k = 0;
    for (int i = 0; i < r; ++i)
      if (i != a && i != b) full[i] = idx[k++];
    cx sum(0.0, 0.0);
    for (int p = 0; p < t.n; ++p)
      for (int q = 0; q < t.n; ++q) {
        if (!weight && p != q) continue;
        full[a] = p;
        full[b] = q;
        cx w = weight ? (*weight)(p, q) : cx(1.0, 0.0);
        sum += w * t.data[t.flat_index(full.data())];
      }
    std::size_t flat = 0;
    for (int i = 0; i < r - 2; ++i) flat = flat * t.n + idx[i];
    out.data[flat] = sum;
  });
  return out;
}

}  // namespace

LabeledTensor contract(const LabeledTensor& t, int a, int b) {
  IndexKind ka = t.labels[a], kb = t.labels[b];
  bool dual = (ka == IndexKind::HolUp && kb == IndexKind::HolDown) ||
              (ka == IndexKind::HolDown && kb == IndexKind::HolUp) ||
              (ka == IndexKind::AntiUp && kb == IndexKind::AntiDown) ||
              (ka == IndexKind::AntiDown && kb == IndexKind::AntiUp);
  if (!dual)
    throw IncompatibleIndices(
        "contract without weights needs a dual index pair");
  return contract_impl(t, a, b, nullptr);
}

LabeledTensor contract(const LabeledTensor& t, int a, int b,
                       const Mat& weight) {
  IndexKind ka = t.labels[a], kb = t.labels[b];
  bool down_pair = ka == IndexKind::HolDown && kb == IndexKind::AntiDown;
  bool up_pair = ka == IndexKind::HolUp && kb == IndexKind::AntiUp;
  if (!down_pair && !up_pair)
    throw IncompatibleIndices(
        "weighted contract needs (HolDown, AntiDown) or (HolUp, AntiUp) with "
        "the holomorphic slot first");
  return contract_impl(t, a, b, &weight);
}

namespace {

// T'[.. a ..] = sum_i M(i, a) T[.. i ..] applied at one slot.
LabeledTensor apply_slot(const LabeledTensor& t, int pos, const Mat& M) {
  LabeledTensor out(t.n, t.labels, t.frame);
  const int r = t.rank();
  std::vector<int> src(r, 0);
  for_each_index(t.n, r, [&](const int* idx) {
    for (int i = 0; i < r; ++i) src[i] = idx[i];
    cx sum(0.0, 0.0);
    for (int i = 0; i < t.n; ++i) {
      src[pos] = i;
      sum += M(i, idx[pos]) * t.data[t.flat_index(src.data())];
    }
    out.data[out.flat_index(idx)] = sum;
  });
  return out;
}

}  // namespace

LabeledTensor to_unitary_frame(const LabeledTensor& t, const FrameMatrix& F) {
  if (t.frame != Frame::Coordinate)
    throw IncompatibleIndices("tensor is already in a unitary frame");
  // Plain-column equivalent of the conjugated-column frame vectors.
  Mat Ep = F.E.conjugate();
  Mat Epi = Ep.inverse();
  LabeledTensor out = t;
  for (int pos = 0; pos < t.rank(); ++pos) {
    switch (t.labels[pos]) {
      case IndexKind::HolDown:
        out = apply_slot(out, pos, Ep);
        break;
      case IndexKind::AntiDown:
        out = apply_slot(out, pos, Ep.conjugate());
        break;
      case IndexKind::HolUp:
        out = apply_slot(out, pos, Epi.transpose());
        break;
      case IndexKind::AntiUp:
        out = apply_slot(out, pos, Epi.conjugate().transpose());
        break;
    }
  }
  out.frame = Frame::Unitary;
  return out;
}

LabeledTensor from_unitary_frame(const LabeledTensor& t,
                                 const FrameMatrix& F) {
  if (t.frame != Frame::Unitary)
    throw IncompatibleIndices("tensor is not in a unitary frame");
  Mat Ep = F.E.conjugate();
  Mat Epi = Ep.inverse();
  LabeledTensor out = t;
  for (int pos = 0; pos < t.rank(); ++pos) {
    switch (t.labels[pos]) {
      case IndexKind::HolDown:
        out = apply_slot(out, pos, Epi);
        break;
      case IndexKind::AntiDown:
        out = apply_slot(out, pos, Epi.conjugate());
        break;
      case IndexKind::HolUp:
        out = apply_slot(out, pos, Ep.transpose());
        break;
      case IndexKind::AntiUp:
        out = apply_slot(out, pos, Ep.conjugate().transpose());
        break;
    }
  }
  out.frame = Frame::Coordinate;
  return out;
}

LabeledTensor matrix_to_tensor(const Mat& m, IndexKind k0, IndexKind k1,
                               Frame frame) {
  LabeledTensor t(static_cast<int>(m.rows()), {k0, k1}, frame);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) t.at({i, j}) = m(i, j);
  return t;
}

Mat tensor_to_matrix(const LabeledTensor& t) {
  if (t.rank() != 2) throw IncompatibleIndices("rank-2 tensor expected");
  Mat m(t.n, t.n);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) m(i, j) = t.at({i, j});
  return m;
}

}  // namespace tgc
