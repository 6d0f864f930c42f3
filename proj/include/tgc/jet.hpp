#pragma once

#include <complex>
#include <vector>

#include "tgc/error.hpp"

namespace tgc {

using cx = std::complex<double>;

// Truncated Taylor expansion of a complex-valued function of m real
// variables, carried exactly through arithmetic up to the given order
// (0..3). Derivative arrays store all index permutations; symmetry is kept
// by construction. Because the variables are real, conjugation acts
// coefficientwise.
class Jet {
 public:
  Jet() = default;
  Jet(int m, int order, cx value);

  static Jet constant(int m, int order, cx value) {
    return Jet(m, order, value);
  }
  // The coordinate function x_var (value given), with unit first derivative.
  static Jet variable(int m, int order, int var, cx value);

  int vars() const { return m_; }
  int order() const { return order_; }

  cx value() const { return v_; }
  cx d1(int a) const { return order_ >= 1 ? g_[a] : cx(0); }
  cx d2(int a, int b) const { return order_ >= 2 ? h_[a * m_ + b] : cx(0); }
  cx d3(int a, int b, int c) const {
    return order_ >= 3 ? t_[(a * m_ + b) * m_ + c] : cx(0);
  }

  cx& value_ref() { return v_; }
  cx& d1_ref(int a) { return g_[a]; }
  cx& d2_ref(int a, int b) { return h_[a * m_ + b]; }
  cx& d3_ref(int a, int b, int c) { return t_[(a * m_ + b) * m_ + c]; }

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, cx s) {
    a.v_ += s;
    return a;
  }
  friend Jet operator+(cx s, Jet a) {
    a.v_ += s;
    return a;
  }
  friend Jet operator-(Jet a, cx s) {
    a.v_ -= s;
    return a;
  }
  friend Jet operator-(cx s, const Jet& a) { return -a + s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cx s);
  friend Jet operator*(cx s, Jet a) { return std::move(a) * s; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, cx s) { return std::move(a) * (cx(1.0) / s); }
  friend Jet operator/(cx s, const Jet& b);

  friend Jet conj(const Jet& a);
  friend Jet exp(const Jet& a);
  // Principal branch; intended for positive real arguments (metric
  // potentials). Throws InvalidParameter at zero.
  friend Jet log(const Jet& a);
  friend Jet pow(const Jet& a, int k);

  // Composition h(f) for scalar h with derivatives h1..h3 at f.value().
  friend Jet compose(const Jet& f, cx h0, cx h1, cx h2, cx h3);

 private:
  void check_compatible(const Jet& o) const;

  int m_ = 0;
  int order_ = 0;
  cx v_{0.0, 0.0};
  std::vector<cx> g_;  // m
  std::vector<cx> h_;  // m*m
  std::vector<cx> t_;  // m*m*m (order 3 only)
};

}  // namespace tgc
