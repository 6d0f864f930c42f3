#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tgc/rng.hpp>
#include <tgc/tensor.hpp>

using namespace tgc;

namespace {

Mat random_hermitian_pd(int n, std::uint64_t seed) {
  Rng rng(seed);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.4 * rng.gaussian_cx();
  Mat g = a.adjoint() * a + Mat::Identity(n, n);
  return g;
}

LabeledTensor random_tensor(int n, std::vector<IndexKind> labels,
                            std::uint64_t seed) {
  Rng rng(seed);
  LabeledTensor t(n, std::move(labels));
  for (auto& v : t.data) v = rng.gaussian_cx();
  return t;
}

}  // namespace

TEST_CASE("hermitian matrix validation") {
  Mat good(2, 2);
  good << cx(2, 0), cx(0.3, 0.1), cx(0.3, -0.1), cx(1, 0);
  CHECK_NOTHROW(HermitianMatrix(good).validate());
  CHECK(HermitianMatrix(good).positive_definite());

  Mat bad = good;
  bad(0, 1) = cx(0.3, 0.2);
  CHECK_THROWS_AS(HermitianMatrix(bad).validate(), ConsistencyFailure);

  Mat indefinite(1, 1);
  indefinite << cx(-1, 0);
  CHECK_FALSE(HermitianMatrix(indefinite).positive_definite());

  Mat rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(HermitianMatrix{rect}, IncompatibleIndices);
}

TEST_CASE("inverse metric convention gik(k,l) * g(m,l) = delta") {
  for (int n : {1, 2, 3, 4}) {
    HermitianMatrix g(random_hermitian_pd(n, 10 + n));
    InverseMetric gi = hermitian_inverse(g);
    Mat should_be_id = gi.gik * g.m.transpose();
    CHECK((should_be_id - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverse metric rejects singular values") {
  Mat z = Mat::Zero(2, 2);
  CHECK_THROWS_AS(hermitian_inverse(HermitianMatrix(z)), SingularMetric);
}

TEST_CASE("unitary frame: triangular, positive diagonal, E^dagger g E = I") {
  for (int n : {1, 2, 3, 5}) {
    HermitianMatrix g(random_hermitian_pd(n, 20 + n));
    FrameMatrix f = unitary_frame(g);
    REQUIRE(f.E.rows() == n);
    // E^dagger g E = I
    Mat gram = f.E.adjoint() * g.m * f.E;
    CHECK((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    // lower-triangular with strictly positive real diagonal
    for (int i = 0; i < n; ++i) {
      CHECK(f.E(i, i).imag() == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(f.E(i, i).real() > 0.0);
      for (int j = i + 1; j < n; ++j) CHECK(std::abs(f.E(i, j)) < 1e-14);
    }
  }
}

TEST_CASE("unitary frame of a scaled identity is the scalar frame") {
  Mat g = 4.0 * Mat::Identity(2, 2);
  FrameMatrix f = unitary_frame(HermitianMatrix(g));
  CHECK((f.E - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("labeled tensor storage is row-major in index order") {
  LabeledTensor t(3, {IndexKind::HolDown, IndexKind::AntiDown});
  REQUIRE(t.size() == 9);
  t.at({1, 2}) = cx(5, 0);
  CHECK(t[1 * 3 + 2] == cx(5, 0));
  int idx[2] = {2, 1};
  CHECK(t.flat_index(idx) == 2 * 3 + 1);
}

TEST_CASE("tensor arithmetic requires matching labels") {
  LabeledTensor a(2, {IndexKind::HolDown});
  LabeledTensor b(2, {IndexKind::AntiDown});
  CHECK_THROWS_AS(a + b, IncompatibleIndices);
  CHECK_THROWS_AS(max_abs_diff(a, b), IncompatibleIndices);
  LabeledTensor c(2, {IndexKind::HolDown});
  c.at({0}) = cx(0, 2);
  CHECK((a + c).at({0}) == cx(0, 2));
  CHECK((cx(2, 0) * c).at({0}) == cx(0, 4));
  CHECK((a - c).max_abs() == doctest::Approx(2.0));
}

TEST_CASE("unweighted contract sums a dual pair") {
  // t[k, i] with (HolUp, HolDown): contraction is the matrix trace.
  LabeledTensor t(2, {IndexKind::HolUp, IndexKind::HolDown});
  t.at({0, 0}) = cx(1, 0);
  t.at({1, 1}) = cx(2, 0);
  t.at({0, 1}) = cx(7, 0);
  LabeledTensor tr = contract(t, 0, 1);
  REQUIRE(tr.rank() == 0);
  CHECK(tr[0] == cx(3, 0));

  // Non-dual pairs are rejected.
  LabeledTensor bad(2, {IndexKind::HolDown, IndexKind::HolDown});
  CHECK_THROWS_AS(contract(bad, 0, 1), IncompatibleIndices);
  LabeledTensor mixed(2, {IndexKind::HolUp, IndexKind::AntiDown});
  CHECK_THROWS_AS(contract(mixed, 0, 1), IncompatibleIndices);
  CHECK_THROWS_AS(contract(t, 0, 0), IncompatibleIndices);
  CHECK_THROWS_AS(contract(t, 0, 2), IncompatibleIndices);
}

TEST_CASE("weighted contract of the metric against its inverse gives n") {
  int n = 3;
  HermitianMatrix g(random_hermitian_pd(n, 31));
  InverseMetric gi = hermitian_inverse(g);
  LabeledTensor gt = matrix_to_tensor(g.m, IndexKind::HolDown,
                                      IndexKind::AntiDown, Frame::Coordinate);
  LabeledTensor tr = contract(gt, 0, 1, gi.gik);
  REQUIRE(tr.rank() == 0);
  CHECK(std::abs(tr[0] - cx(n, 0)) < 1e-12);

  // The holomorphic slot must come first.
  LabeledTensor swapped = matrix_to_tensor(
      g.m, IndexKind::AntiDown, IndexKind::HolDown, Frame::Coordinate);
  CHECK_THROWS_AS(contract(swapped, 0, 1, gi.gik), IncompatibleIndices);
}

TEST_CASE("weighted contract matches the explicit sum on a rank-3 tensor") {
  int n = 2;
  HermitianMatrix g(random_hermitian_pd(n, 47));
  InverseMetric gi = hermitian_inverse(g);
  LabeledTensor t = random_tensor(
      n, {IndexKind::HolDown, IndexKind::HolDown, IndexKind::AntiDown}, 48);
  LabeledTensor c = contract(t, 1, 2, gi.gik);
  REQUIRE(c.rank() == 1);
  for (int i = 0; i < n; ++i) {
    cx want(0, 0);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) want += gi.gik(p, q) * t.at({i, p, q});
    CHECK(std::abs(c.at({i}) - want) < 1e-13);
  }
}

TEST_CASE("frame conversion sends the metric to the identity") {
  for (int n : {2, 3}) {
    HermitianMatrix g(random_hermitian_pd(n, 52 + n));
    FrameMatrix f = unitary_frame(g);
    LabeledTensor gt = matrix_to_tensor(
        g.m, IndexKind::HolDown, IndexKind::AntiDown, Frame::Coordinate);
    LabeledTensor gf = to_unitary_frame(gt, f);
    CHECK(gf.frame == Frame::Unitary);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        CHECK(std::abs(gf.at({a, b}) - (a == b ? cx(1, 0) : cx(0, 0))) <
              1e-12);
  }
}

TEST_CASE("frame round-trip is the identity for every slot kind") {
  int n = 3;
  HermitianMatrix g(random_hermitian_pd(n, 61));
  FrameMatrix f = unitary_frame(g);
  LabeledTensor t = random_tensor(n,
                                  {IndexKind::HolUp, IndexKind::HolDown,
                                   IndexKind::AntiDown, IndexKind::AntiUp},
                                  62);
  LabeledTensor round = from_unitary_frame(to_unitary_frame(t, f), f);
  CHECK(max_abs_diff(round, t) < 1e-12);

  // Frame tags are enforced.
  LabeledTensor already = to_unitary_frame(t, f);
  CHECK_THROWS_AS(to_unitary_frame(already, f), IncompatibleIndices);
  CHECK_THROWS_AS(from_unitary_frame(t, f), IncompatibleIndices);
}

TEST_CASE("frame conversion preserves weighted traces") {
  // Contracting (HolDown, AntiDown) against g^* in coordinates equals the
  // plain Kronecker contraction in the unitary frame.
  int n = 3;
  HermitianMatrix g(random_hermitian_pd(n, 71));
  InverseMetric gi = hermitian_inverse(g);
  FrameMatrix f = unitary_frame(g);
  LabeledTensor t = random_tensor(
      n, {IndexKind::HolDown, IndexKind::AntiDown, IndexKind::HolDown}, 72);
  LabeledTensor coord = contract(t, 0, 1, gi.gik);
  LabeledTensor tf = to_unitary_frame(t, f);
  LabeledTensor framewise(n, {IndexKind::HolDown}, Frame::Unitary);
  for (int k = 0; k < n; ++k) {
    cx s(0, 0);
    for (int a = 0; a < n; ++a) s += tf.at({a, a, k});
    framewise.at({k}) = s;
  }
  LabeledTensor back = from_unitary_frame(framewise, f);
  CHECK(max_abs_diff(back, coord) < 1e-12);
}

TEST_CASE("matrix/tensor conversion round-trip") {
  Mat m(2, 2);
  m << cx(1, 2), cx(3, -1), cx(0, 0.5), cx(-2, 0);
  LabeledTensor t = matrix_to_tensor(m, IndexKind::HolUp, IndexKind::HolDown,
                                     Frame::Coordinate);
  CHECK(t.at({1, 0}) == m(1, 0));
  Mat back = tensor_to_matrix(t);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  LabeledTensor r3(2, {IndexKind::HolUp, IndexKind::HolDown,
                       IndexKind::HolDown});
  CHECK_THROWS_AS(tensor_to_matrix(r3), IncompatibleIndices);
}

TEST_CASE("conjugate kind swaps holomorphic and antiholomorphic") {
  CHECK(conjugate_kind(IndexKind::HolUp) == IndexKind::AntiUp);
  CHECK(conjugate_kind(IndexKind::HolDown) == IndexKind::AntiDown);
  CHECK(conjugate_kind(IndexKind::AntiUp) == IndexKind::HolUp);
  CHECK(conjugate_kind(IndexKind::AntiDown) == IndexKind::HolDown);
}
