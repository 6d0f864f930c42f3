#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tgc/jet.hpp"
#include "tgc/tensor.hpp"

namespace tgc {

// A point in one coordinate chart, z = (z_1, ..., z_n).
struct ChartPoint {
  std::vector<cx> z;

  int n() const { return static_cast<int>(z.size()); }
  double max_abs() const;
};

// Value and Wirtinger derivatives of the metric at one point. Derivatives
// are stored as n x n matrices over the (i,j) entry indices of g_{i jbar}:
//   dh[a](i,j)        = d_{z_a} g_{i jbar}
//   da[a](i,j)        = d_{zbar_a} g_{i jbar}
//   hh[a*n+b](i,j)    = d_{z_a} d_{z_b} g_{i jbar}        (symmetric in a,b)
//   ha[a*n+b](i,j)    = d_{z_a} d_{zbar_b} g_{i jbar}
//   aa[a*n+b](i,j)    = d_{zbar_a} d_{zbar_b} g_{i jbar}  (symmetric in a,b)
// and at order 3 analogously hhh, hha (two holomorphic then one
// antiholomorphic), haa, aaa, each flattened with the holomorphic block
// first.
struct MetricJet {
  int n = 0;
  int order = 0;
  Mat g;
  std::vector<Mat> dh, da;
  std::vector<Mat> hh, ha, aa;
  std::vector<Mat> hhh, hha, haa, aaa;

  const Mat& d2_mixed(int i, int j) const { return ha[i * n + j]; }

  // Largest violation of d_{zbar_a} g_{i jbar} = conj(d_{z_a} g_{j ibar})
  // and its order-2/3 analogues.
  double conjugation_residual() const;
  // Largest violation of symmetry under exchange of like derivative slots.
  double exchange_residual() const;
};

// One chart of a Hermitian metric: a domain predicate plus jet evaluators.
struct MetricField {
  int n = 0;
  std::string name;
  bool analytic_jets = true;
  std::function<bool(const ChartPoint&)> in_domain;
  // Returns the n*n entries of g (row-major) as jets over the 2n real
  // coordinates (x_a = var 2a, y_a = var 2a+1) at the given order.
  std::function<std::vector<Jet>(const ChartPoint&, int)> eval_entries;

  // Metric value only (order-0 shortcut used by finite differences).
  Mat value(const ChartPoint& p) const;
};

// Evaluate the metric jet at a point. Checks the chart domain, positive
// definiteness, and the MetricJet conjugation/exchange invariants.
// Throws PointOutsideChart, NonPositiveDefinite, ConsistencyFailure.
MetricJet evaluate_jet(const MetricField& field, const ChartPoint& p,
                       int order);

// Central-difference oracle for the same derivatives, truncation order 2 in
// the step. step <= 0 selects the default 1e-4 * max(1,|p|) for orders 1-2
// and 2e-3 * max(1,|p|) for order 3. Throws PointOutsideChart if any stencil
// point leaves the chart.
MetricJet finite_difference_jet(const MetricField& field, const ChartPoint& p,
                                int order, double step = 0.0);

// Componentwise max of |a - b| over all blocks up to min(a.order, b.order),
// scaled by 1/(1 + |a block entry|).
double jet_relative_difference(const MetricJet& a, const MetricJet& b,
                               int max_order);

// First Wirtinger derivatives of an arbitrary tensor-valued field by central
// differences: dz[a][c] = d_{z_a} f_c, dw[a][c] = d_{zbar_a} f_c.
struct FieldDerivative {
  std::vector<std::vector<cx>> dz, dw;
};
FieldDerivative numeric_field_derivative(
    const std::function<std::vector<cx>(const ChartPoint&)>& f,
    const ChartPoint& p, double step = 0.0);

}  // namespace tgc
