#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tgc/metric.hpp"

namespace tgc {
namespace dsl {

// Expression AST over z_1..z_n, zb_1..zb_n, complex literals, + - * / ^int,
// exp, log, abs2. zb_k is an independent symbol bound to conj(z_k) only at
// evaluation time.
struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Op { Add, Sub, Mul, Div };

struct Node {
  enum class Kind { Number, Var, Binary, Negate, Power, Call } kind;
  int line = 0, col = 0;

  cx number{};                   // Number
  bool var_conjugated = false;   // Var: zb_k vs z_k
  int var_index = 0;             // Var: 1-based k
  Op op = Op::Add;               // Binary
  int exponent = 0;              // Power
  std::string callee;            // Call: exp | log | abs2
  std::vector<NodePtr> args;     // Binary (2), Negate/Power (1), Call (>=1)
};

}  // namespace dsl

// Parsed metric definition: upper triangle plus diagonal; the lower triangle
// is the conjugate-swap by construction and unreferenced entries default to
// the identity.
struct MetricExpression {
  int n = 0;
  struct Entry {
    int i = 0, j = 0;  // 1-based, i <= j
    dsl::NodePtr expr;
  };
  std::vector<Entry> entries;
};

// Parse the metric grammar:
//   dim <n>
//   g[i,j] = <expr>     (1 <= i <= j <= n)
// '#' starts a comment. Throws SyntaxError (with line/column) and
// DimensionError.
MetricExpression parse_metric(const std::string& source);

// Evaluate one entry at a complex point (zb bound to conj(z)); used for
// probing and finite differences.
cx evaluate_entry(const dsl::NodePtr& expr, const std::vector<cx>& z);

// Build a metric field whose jets evaluate the ASTs in jet arithmetic.
// Diagonal entries are probed numerically for realness at construction
// (NonHermitianEntry). Positive definiteness is checked per evaluation.
MetricField expression_field(
    const MetricExpression& expr,
    std::function<bool(const ChartPoint&)> domain = nullptr,
    const std::string& name = "dsl");

}  // namespace tgc
