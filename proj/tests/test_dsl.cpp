#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <tgc/dsl.hpp>
#include <tgc/metric.hpp>
#include <tgc/rng.hpp>

using namespace tgc;

namespace {

MetricExpression parse(const std::string& s) { return parse_metric(s); }

cx entry_at(const MetricExpression& e, int i, int j,
            const std::vector<cx>& z) {
  for (const auto& en : e.entries)
    if (en.i == i && en.j == j) return evaluate_entry(en.expr, z);
  return i == j ? cx(1, 0) : cx(0, 0);  // unreferenced defaults
}

}  // namespace

TEST_CASE("grammar basics: header, entries, comments, whitespace") {
  MetricExpression e = parse(
      "# comment line\n"
      "dim 2\n"
      "\n"
      "g[1,1] = 1 + abs2(z_1)   # trailing comment\n"
      "g[1,2] = 0.25 * z_1 * zb_2\n");
  CHECK(e.n == 2);
  REQUIRE(e.entries.size() == 2);
  std::vector<cx> z{cx(1, 1), cx(0, 2)};
  CHECK(entry_at(e, 1, 1, z) == cx(3, 0));
  // z_1 * conj(z_2) = (1+i) * (0-2i) = 2 - 2i, scaled by 0.25
  CHECK(entry_at(e, 1, 2, z) == cx(0.5, -0.5));
  // g[2,2] unreferenced: defaults to 1.
  CHECK(entry_at(e, 2, 2, z) == cx(1, 0));
}

TEST_CASE("expression forms: literals, power, unary minus, functions") {
  MetricExpression e = parse(
      "dim 1\n"
      "g[1,1] = 2 + exp(-abs2(z_1))^2 / (1 + abs2(z_1))^3 - 0.5\n");
  std::vector<cx> z{cx(0, 0)};
  CHECK(std::abs(entry_at(e, 1, 1, z) - cx(2.5, 0)) < 1e-15);
  MetricExpression l = parse(
      "dim 1\n"
      "g[1,1] = log(1 + z_1*zb_1) + 1i*z_1 - 1i*zb_1\n");
  std::vector<cx> z2{cx(0.5, 0.25)};
  cx want = std::log(1.0 + std::norm(z2[0])) + cx(0, 1) * z2[0] -
            cx(0, 1) * std::conj(z2[0]);
  CHECK(std::abs(entry_at(l, 1, 1, z2) - want) < 1e-15);
}

TEST_CASE("abs2 of several arguments sums the squared moduli") {
  MetricExpression e = parse("dim 2\ng[1,1] = abs2(z_1, z_2)\n");
  std::vector<cx> z{cx(3, 4), cx(0, 2)};
  CHECK(entry_at(e, 1, 1, z) == cx(29, 0));
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse("dim 2\ng[1,1] = 1 +\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& err) {
    CHECK(err.line == 2);
    CHECK(err.col > 8);
  }
  try {
    parse("dim x\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& err) {
    CHECK(err.line == 1);
  }
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("dim 1\ng[1,1] = (1 + z_1\n"), SyntaxError);
  CHECK_THROWS_AS(parse("dim 1\ng[1,1] = 2 ** 3\n"), SyntaxError);
  CHECK_THROWS_AS(parse("dim 1\ng[1,1] = sin(z_1)\n"), SyntaxError);
  CHECK_THROWS_AS(parse("dim 1\nh[1,1] = 1\n"), SyntaxError);
  CHECK_THROWS_AS(parse("dim 1\ng[1,1] = z_1^zb_1\n"), SyntaxError);
}

TEST_CASE("dimension errors: bad n, out-of-range indices, lower triangle") {
  CHECK_THROWS_AS(parse("dim 0\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 17\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[1,3] = 1\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[0,1] = 1\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[2,1] = z_1\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[1,1] = z_3\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[1,1] = zb_3\n"), DimensionError);
  CHECK_THROWS_AS(parse("dim 2\ng[1,1] = 1\ng[1,1] = 2\n"), SyntaxError);
}

TEST_CASE("non-real diagonal entries are rejected at field construction") {
  MetricExpression bad = parse("dim 1\ng[1,1] = 1 + 1i*z_1\n");
  CHECK_THROWS_AS(expression_field(bad), NonHermitianEntry);
  // Real-valued combinations of z and zb pass the probe.
  MetricExpression good =
      parse("dim 1\ng[1,1] = 1 + 1i*z_1 - 1i*zb_1 + abs2(z_1)\n");
  CHECK_NOTHROW(expression_field(good));
}

TEST_CASE("expression field evaluates jets that match finite differences") {
  MetricExpression e = parse(
      "dim 2\n"
      "g[1,1] = 1 + abs2(z_1) + 0.5*abs2(z_2)\n"
      "g[1,2] = 0.25 * z_2 * zb_1 / (1 + abs2(z_1, z_2))\n"
      "g[2,2] = exp(-abs2(z_1)) + abs2(z_1, z_2)\n");
  MetricField field = expression_field(e);
  ChartPoint p{{cx(0.4, -0.3), cx(0.2, 0.6)}};
  MetricJet a = evaluate_jet(field, p, 2);
  MetricJet b = finite_difference_jet(field, p, 2);
  CHECK(jet_relative_difference(a, b, 2) < 1e-6);
  CHECK(a.conjugation_residual() < 1e-13);
}

TEST_CASE("lower-triangle values come from conjugate symmetry") {
  MetricExpression e = parse("dim 2\ng[1,2] = 0.3*z_1*zb_2\n");
  MetricField field = expression_field(e);
  ChartPoint p{{cx(0.5, 0.1), cx(-0.2, 0.4)}};
  Mat g = field.value(p);
  CHECK(g(1, 0) == std::conj(g(0, 1)));
  CHECK(std::abs(g(0, 1) - 0.3 * p.z[0] * std::conj(p.z[1])) < 1e-15);
}

TEST_CASE("fuzzed mutations fail cleanly or parse") {
  const std::string base =
      "dim 2\n"
      "g[1,1] = 1 + abs2(z_1)\n"
      "g[1,2] = 0.1 * z_1 * zb_2 / (2 + abs2(z_2))\n"
      "g[2,2] = exp(-abs2(z_2)) + 1\n";
  const std::string alphabet = "gz_[]()=+-*/^.,0123456789ab ximpel#\n";
  Rng rng(2024);
  int parsed = 0, rejected = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::string s = base;
    int edits = 1 + static_cast<int>(rng.uniform() * 3);
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = static_cast<std::size_t>(rng.uniform() * s.size());
      char c = alphabet[static_cast<std::size_t>(rng.uniform() *
                                                 alphabet.size())];
      if (rng.uniform() < 0.5)
        s[pos] = c;
      else
        s.insert(pos, 1, c);
    }
    try {
      MetricExpression e = parse(s);
      ++parsed;
      // Whatever parsed must evaluate without crashing.
      std::vector<cx> z{cx(0.3, 0.2), cx(-0.1, 0.4)};
      for (const auto& en : e.entries) (void)evaluate_entry(en.expr, z);
    } catch (const SyntaxError&) {
      ++rejected;
    } catch (const DimensionError&) {
      ++rejected;
    } catch (const InvalidParameter&) {
      ++rejected;  // evaluation-time domain faults (log/0, division)
    }
  }
  CHECK(parsed + rejected == 500);
  CHECK(rejected > 50);  // the mutations really do break the grammar
  CHECK(parsed > 10);    // and sometimes leave it intact
}
