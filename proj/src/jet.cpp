#include "tgc/jet.hpp"

#include <cmath>

namespace tgc {

Jet::Jet(int m, int order, cx value) : m_(m), order_(order), v_(value) {
  if (order < 0 || order > 3) throw InvalidParameter("jet order must be 0..3");
  if (order >= 1) g_.assign(m, cx(0));
  if (order >= 2) h_.assign(static_cast<std::size_t>(m) * m, cx(0));
  if (order >= 3) t_.assign(static_cast<std::size_t>(m) * m * m, cx(0));
}

Jet Jet::variable(int m, int order, int var, cx value) {
  Jet j(m, order, value);
  if (order >= 1) j.g_[var] = cx(1.0);
  return j;
}

void Jet::check_compatible(const Jet& o) const {
  if (m_ != o.m_ || order_ != o.order_)
    throw InvalidParameter("jet variable count / order mismatch");
}

Jet Jet::operator-() const {
  Jet out = *this;
  out.v_ = -out.v_;
  for (auto& x : out.g_) x = -x;
  for (auto& x : out.h_) x = -x;
  for (auto& x : out.t_) x = -x;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  check_compatible(o);
  v_ += o.v_;
  for (std::size_t i = 0; i < g_.size(); ++i) g_[i] += o.g_[i];
  for (std::size_t i = 0; i < h_.size(); ++i) h_[i] += o.h_[i];
  for (std::size_t i = 0; i < t_.size(); ++i) t_[i] += o.t_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_compatible(o);
  v_ -= o.v_;
  for (std::size_t i = 0; i < g_.size(); ++i) g_[i] -= o.g_[i];
  for (std::size_t i = 0; i < h_.size(); ++i) h_[i] -= o.h_[i];
  for (std::size_t i = 0; i < t_.size(); ++i) t_[i] -= o.t_[i];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  const int m = a.m_;
  Jet out(m, a.order_, a.v_ * b.v_);
  if (a.order_ >= 1)
    for (int p = 0; p < m; ++p)
      out.g_[p] = a.g_[p] * b.v_ + a.v_ * b.g_[p];
  if (a.order_ >= 2)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        out.h_[p * m + q] = a.h_[p * m + q] * b.v_ + a.g_[p] * b.g_[q] +
                            a.g_[q] * b.g_[p] + a.v_ * b.h_[p * m + q];
  if (a.order_ >= 3)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r) {
          std::size_t pqr = (static_cast<std::size_t>(p) * m + q) * m + r;
          out.t_[pqr] = a.t_[pqr] * b.v_ + a.h_[p * m + q] * b.g_[r] +
                        a.h_[p * m + r] * b.g_[q] + a.h_[q * m + r] * b.g_[p] +
                        a.g_[p] * b.h_[q * m + r] + a.g_[q] * b.h_[p * m + r] +
                        a.g_[r] * b.h_[p * m + q] + a.v_ * b.t_[pqr];
        }
  return out;
}

Jet operator*(Jet a, cx s) {
  a.v_ *= s;
  for (auto& x : a.g_) x *= s;
  for (auto& x : a.h_) x *= s;
  for (auto& x : a.t_) x *= s;
  return a;
}

Jet compose(const Jet& f, cx h0, cx h1, cx h2, cx h3) {
  const int m = f.m_;
  Jet out(m, f.order_, h0);
  if (f.order_ >= 1)
    for (int p = 0; p < m; ++p) out.g_[p] = h1 * f.g_[p];
  if (f.order_ >= 2)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        out.h_[p * m + q] =
            h2 * f.g_[p] * f.g_[q] + h1 * f.h_[p * m + q];
  if (f.order_ >= 3)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r) {
          std::size_t pqr = (static_cast<std::size_t>(p) * m + q) * m + r;
          out.t_[pqr] = h3 * f.g_[p] * f.g_[q] * f.g_[r] +
                        h2 * (f.h_[p * m + q] * f.g_[r] +
                              f.h_[p * m + r] * f.g_[q] +
                              f.h_[q * m + r] * f.g_[p]) +
                        h1 * f.t_[pqr];
        }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  cx v = b.value();
  if (v == cx(0)) throw InvalidParameter("jet division by zero value");
  cx iv = cx(1.0) / v;
  Jet rec = compose(b, iv, -iv * iv, 2.0 * iv * iv * iv,
                    -6.0 * iv * iv * iv * iv);
  return a * rec;
}

Jet operator/(cx s, const Jet& b) {
  cx v = b.value();
  if (v == cx(0)) throw InvalidParameter("jet division by zero value");
  cx iv = cx(1.0) / v;
  return s * compose(b, iv, -iv * iv, 2.0 * iv * iv * iv,
                     -6.0 * iv * iv * iv * iv);
}

Jet conj(const Jet& a) {
  Jet out = a;
  out.v_ = std::conj(out.v_);
  for (auto& x : out.g_) x = std::conj(x);
  for (auto& x : out.h_) x = std::conj(x);
  for (auto& x : out.t_) x = std::conj(x);
  return out;
}

Jet exp(const Jet& a) {
  cx e = std::exp(a.value());
  return compose(a, e, e, e, e);
}

Jet log(const Jet& a) {
  cx v = a.value();
  if (v == cx(0)) throw InvalidParameter("jet log of zero value");
  cx iv = cx(1.0) / v;
  return compose(a, std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet pow(const Jet& a, int k) {
  if (k == 0) return Jet::constant(a.vars(), a.order(), cx(1.0));
  bool neg = k < 0;
  int e = neg ? -k : k;
  Jet acc = a;
  for (int i = 1; i < e; ++i) acc = acc * a;
  if (neg) return cx(1.0) / acc;
  return acc;
}

}  // namespace tgc
