#include "tgc/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

namespace tgc {

namespace {

using dsl::Node;
using dsl::NodePtr;
using dsl::Op;

struct Token {
  enum class Kind {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    End
  } kind;
  std::string text;
  cx number{};
  bool number_is_integer = false;
  int line = 0, col = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, int line) : s_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] == '#') break;
      out.push_back(next());
    }
    Token end;
    end.kind = Token::Kind::End;
    end.line = line_;
    end.col = static_cast<int>(pos_) + 1;
    out.push_back(end);
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Token next() {
    Token t;
    t.line = line_;
    t.col = static_cast<int>(pos_) + 1;
    char c = s_[pos_];
    auto single = [&](Token::Kind k) {
      t.kind = k;
      t.text = std::string(1, c);
      ++pos_;
      return t;
    };
    switch (c) {
      case '+':
        return single(Token::Kind::Plus);
      case '-':
        return single(Token::Kind::Minus);
      case '*':
        return single(Token::Kind::Star);
      case '/':
        return single(Token::Kind::Slash);
      case '^':
        return single(Token::Kind::Caret);
      case '(':
        return single(Token::Kind::LParen);
      case ')':
        return single(Token::Kind::RParen);
      case '[':
        return single(Token::Kind::LBracket);
      case ']':
        return single(Token::Kind::RBracket);
      case ',':
        return single(Token::Kind::Comma);
      case '=':
        return single(Token::Kind::Equals);
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return ident();
    throw SyntaxError("unexpected character '" + std::string(1, c) + "'",
                      t.line, t.col);
  }

  Token number() {
    Token t;
    t.kind = Token::Kind::Number;
    t.line = line_;
    t.col = static_cast<int>(pos_) + 1;
    std::size_t start = pos_;
    bool integer = true;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      integer = false;
      ++pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      integer = false;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ >= s_.size() ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw SyntaxError("malformed exponent", line_,
                          static_cast<int>(pos_) + 1);
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    t.text = s_.substr(start, pos_ - start);
    double value = std::strtod(t.text.c_str(), nullptr);
    bool imaginary = pos_ < s_.size() && s_[pos_] == 'i';
    if (imaginary) {
      ++pos_;
      integer = false;
      t.number = cx(0.0, value);
    } else {
      t.number = cx(value, 0.0);
    }
    t.number_is_integer = integer;
    return t;
  }

  Token ident() {
    Token t;
    t.kind = Token::Kind::Ident;
    t.line = line_;
    t.col = static_cast<int>(pos_) + 1;
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    t.text = s_.substr(start, pos_ - start);
    return t;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int n) : toks_(std::move(tokens)), n_(n) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  bool at_end() const { return peek().kind == Token::Kind::End; }

  Token expect(Token::Kind kind, const std::string& what) {
    if (peek().kind != kind)
      throw SyntaxError("expected " + what, peek().line, peek().col);
    return take();
  }

  NodePtr parse_expression() {
    NodePtr left = parse_term();
    while (peek().kind == Token::Kind::Plus ||
           peek().kind == Token::Kind::Minus) {
      Token op = take();
      NodePtr right = parse_term();
      left = binary(op, op.kind == Token::Kind::Plus ? Op::Add : Op::Sub,
                    left, right);
    }
    return left;
  }

 private:
  static NodePtr binary(const Token& at, Op op, NodePtr a, NodePtr b) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Binary;
    node->op = op;
    node->line = at.line;
    node->col = at.col;
    node->args = {std::move(a), std::move(b)};
    return node;
  }

  NodePtr parse_term() {
    NodePtr left = parse_unary();
    while (peek().kind == Token::Kind::Star ||
           peek().kind == Token::Kind::Slash) {
      Token op = take();
      NodePtr right = parse_unary();
      left = binary(op, op.kind == Token::Kind::Star ? Op::Mul : Op::Div,
                    left, right);
    }
    return left;
  }

  NodePtr parse_unary() {
    if (peek().kind == Token::Kind::Minus) {
      Token op = take();
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::Negate;
      node->line = op.line;
      node->col = op.col;
      node->args = {parse_unary()};
      return node;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (peek().kind != Token::Kind::Caret) return base;
    Token caret = take();
    int sign = 1;
    if (peek().kind == Token::Kind::Minus) {
      take();
      sign = -1;
    }
    Token e = expect(Token::Kind::Number, "integer exponent");
    if (!e.number_is_integer)
      throw SyntaxError("exponent must be an integer", e.line, e.col);
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Power;
    node->line = caret.line;
    node->col = caret.col;
    node->exponent = sign * static_cast<int>(e.number.real());
    node->args = {std::move(base)};
    return node;
  }

  NodePtr parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      Token num = take();
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::Number;
      node->line = num.line;
      node->col = num.col;
      node->number = num.number;
      return node;
    }
    if (t.kind == Token::Kind::LParen) {
      take();
      NodePtr inner = parse_expression();
      expect(Token::Kind::RParen, "')'");
      return inner;
    }
    if (t.kind == Token::Kind::Ident) {
      Token id = take();
      if (id.text == "exp" || id.text == "log" || id.text == "abs2")
        return parse_call(id);
      return parse_var(id);
    }
    throw SyntaxError("expected a number, variable, function call, or '('",
                      t.line, t.col);
  }

  NodePtr parse_call(const Token& id) {
    expect(Token::Kind::LParen, "'(' after " + id.text);
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Call;
    node->line = id.line;
    node->col = id.col;
    node->callee = id.text;
    node->args.push_back(parse_expression());
    while (peek().kind == Token::Kind::Comma) {
      take();
      node->args.push_back(parse_expression());
    }
    expect(Token::Kind::RParen, "')'");
    if (node->callee != "abs2" && node->args.size() != 1)
      throw SyntaxError(node->callee + " takes exactly one argument", id.line,
                        id.col);
    return node;
  }

  NodePtr parse_var(const Token& id) {
    bool conjugated = false;
    std::string suffix;
    if (id.text.rfind("zb_", 0) == 0) {
      conjugated = true;
      suffix = id.text.substr(3);
    } else if (id.text.rfind("z_", 0) == 0) {
      suffix = id.text.substr(2);
    } else {
      throw SyntaxError("unknown identifier '" + id.text + "'", id.line,
                        id.col);
    }
    if (suffix.empty()) throw SyntaxError("missing variable index", id.line, id.col);
    for (char c : suffix)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw SyntaxError("malformed variable '" + id.text + "'", id.line,
                          id.col);
    int k = std::atoi(suffix.c_str());
    if (k < 1 || k > n_)
      throw DimensionError("variable index " + std::to_string(k) +
                           " out of range 1.." + std::to_string(n_));
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Var;
    node->line = id.line;
    node->col = id.col;
    node->var_conjugated = conjugated;
    node->var_index = k;
    return node;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int n_;
};

std::vector<std::string> split_lines(const std::string& source) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : source) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t') return false;
  }
  return true;
}

}  // namespace

MetricExpression parse_metric(const std::string& source) {
  std::vector<std::string> lines = split_lines(source);
  MetricExpression out;
  bool have_dim = false;
  std::map<std::pair<int, int>, bool> seen;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    if (blank_or_comment(lines[li])) continue;
    if (!have_dim) {
      std::vector<Token> toks = Lexer(lines[li], lineno).run();
      if (toks.size() < 2 || toks[0].kind != Token::Kind::Ident ||
          toks[0].text != "dim")
        throw SyntaxError("expected 'dim <n>' header", lineno, 1);
      if (toks[1].kind != Token::Kind::Number || !toks[1].number_is_integer)
        throw SyntaxError("expected an integer dimension", toks[1].line,
                          toks[1].col);
      if (toks[2].kind != Token::Kind::End)
        throw SyntaxError("trailing input after dimension", toks[2].line,
                          toks[2].col);
      out.n = static_cast<int>(toks[1].number.real());
      if (out.n < 1 || out.n > 16)
        throw DimensionError("dimension must be between 1 and 16");
      have_dim = true;
      continue;
    }
    LineParser p(Lexer(lines[li], lineno).run(), out.n);
    Token g = p.expect(Token::Kind::Ident, "'g'");
    if (g.text != "g")
      throw SyntaxError("expected a 'g[i,j] = ...' entry", g.line, g.col);
    p.expect(Token::Kind::LBracket, "'['");
    Token ti = p.expect(Token::Kind::Number, "row index");
    p.expect(Token::Kind::Comma, "','");
    Token tj = p.expect(Token::Kind::Number, "column index");
    p.expect(Token::Kind::RBracket, "']'");
    p.expect(Token::Kind::Equals, "'='");
    if (!ti.number_is_integer || !tj.number_is_integer)
      throw SyntaxError("entry indices must be integers", ti.line, ti.col);
    int i = static_cast<int>(ti.number.real());
    int j = static_cast<int>(tj.number.real());
    if (i < 1 || j < 1 || i > out.n || j > out.n)
      throw DimensionError("entry g[" + std::to_string(i) + "," +
                           std::to_string(j) + "] outside dimension " +
                           std::to_string(out.n));
    if (i > j)
      throw DimensionError(
          "only the upper triangle may be specified; g[" + std::to_string(i) +
          "," + std::to_string(j) + "] is below the diagonal");
    if (seen[{i, j}])
      throw SyntaxError("duplicate entry g[" + std::to_string(i) + "," +
                            std::to_string(j) + "]",
                        ti.line, ti.col);
    seen[{i, j}] = true;
    MetricExpression::Entry entry;
    entry.i = i;
    entry.j = j;
    entry.expr = p.parse_expression();
    if (!p.at_end())
      throw SyntaxError("unexpected trailing input", p.peek().line,
                        p.peek().col);
    out.entries.push_back(std::move(entry));
  }
  if (!have_dim) throw SyntaxError("empty metric definition", 1, 1);
  return out;
}

namespace {

cx conj_value(const cx& v) { return std::conj(v); }
Jet conj_value(const Jet& j) { return conj(j); }

template <typename T>
T eval_node(const dsl::Node& node, const std::vector<T>& z,
            const std::vector<T>& zb, const T& zero) {
  using dsl::Node;
  switch (node.kind) {
    case Node::Kind::Number:
      return zero + node.number;
    case Node::Kind::Var:
      return node.var_conjugated ? zb[node.var_index - 1]
                                 : z[node.var_index - 1];
    case Node::Kind::Binary: {
      T a = eval_node(*node.args[0], z, zb, zero);
      T b = eval_node(*node.args[1], z, zb, zero);
      switch (node.op) {
        case dsl::Op::Add:
          return a + b;
        case dsl::Op::Sub:
          return a - b;
        case dsl::Op::Mul:
          return a * b;
        case dsl::Op::Div:
          return a / b;
      }
      return a;
    }
    case Node::Kind::Negate:
      return zero - eval_node(*node.args[0], z, zb, zero);
    case Node::Kind::Power: {
      T base = eval_node(*node.args[0], z, zb, zero);
      using std::pow;
      return pow(base, node.exponent);
    }
    case Node::Kind::Call: {
      if (node.callee == "abs2") {
        T sum = zero;
        for (const auto& arg : node.args) {
          T v = eval_node(*arg, z, zb, zero);
          sum = sum + v * conj_value(v);
        }
        return sum;
      }
      T v = eval_node(*node.args[0], z, zb, zero);
      using std::exp;
      using std::log;
      if (node.callee == "exp") return exp(v);
      return log(v);
    }
  }
  return zero;
}

cx scalar_of(const cx& v) { return v; }
cx scalar_of(const Jet& j) { return j.value(); }

// Recursive evaluator; identical to eval_node except that log and division
// arguments are validated so errors carry source locations.
template <typename T>
T eval_checked(const dsl::Node& node, const std::vector<T>& z,
               const std::vector<T>& zb, const T& zero) {
  using dsl::Node;
  switch (node.kind) {
    case Node::Kind::Number:
    case Node::Kind::Var:
      return eval_node(node, z, zb, zero);
    case Node::Kind::Binary: {
      T a = eval_checked(*node.args[0], z, zb, zero);
      T b = eval_checked(*node.args[1], z, zb, zero);
      switch (node.op) {
        case dsl::Op::Add:
          return a + b;
        case dsl::Op::Sub:
          return a - b;
        case dsl::Op::Mul:
          return a * b;
        case dsl::Op::Div:
          if (std::abs(scalar_of(b)) < 1e-300)
            throw InvalidParameter("division by zero at line " +
                                   std::to_string(node.line) + ", col " +
                                   std::to_string(node.col));
          return a / b;
      }
      return a;
    }
    case Node::Kind::Negate:
      return zero - eval_checked(*node.args[0], z, zb, zero);
    case Node::Kind::Power: {
      T base = eval_checked(*node.args[0], z, zb, zero);
      if (node.exponent < 0 && std::abs(scalar_of(base)) < 1e-300)
        throw InvalidParameter("negative power of zero at line " +
                               std::to_string(node.line) + ", col " +
                               std::to_string(node.col));
      using std::pow;
      return pow(base, node.exponent);
    }
    case Node::Kind::Call: {
      if (node.callee == "abs2") {
        T sum = zero;
        for (const auto& arg : node.args) {
          T v = eval_checked(*arg, z, zb, zero);
          sum = sum + v * conj_value(v);
        }
        return sum;
      }
      T v = eval_checked(*node.args[0], z, zb, zero);
      if (node.callee == "log") {
        cx val = scalar_of(v);
        if (std::abs(val) < 1e-300 ||
            (val.real() <= 0.0 &&
             std::abs(val.imag()) <= 1e-14 * (1.0 + std::abs(val))))
          throw InvalidParameter("log of a non-positive value at line " +
                                 std::to_string(node.line) + ", col " +
                                 std::to_string(node.col));
        using std::log;
        return log(v);
      }
      using std::exp;
      return exp(v);
    }
  }
  return zero;
}

}  // namespace

cx evaluate_entry(const dsl::NodePtr& expr, const std::vector<cx>& z) {
  std::vector<cx> zb(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) zb[k] = std::conj(z[k]);
  return eval_checked<cx>(*expr, z, zb, cx(0.0));
}

MetricField expression_field(const MetricExpression& expr,
                             std::function<bool(const ChartPoint&)> domain,
                             const std::string& name) {
  const int n = expr.n;
  // Index the entries for dense assembly.
  std::vector<dsl::NodePtr> upper(static_cast<std::size_t>(n) * n);
  for (const auto& e : expr.entries)
    upper[(e.i - 1) * n + (e.j - 1)] = e.expr;

  // Diagonal realness probe at two generic points.
  for (int k = 0; k < n; ++k) {
    const auto& e = upper[k * n + k];
    if (!e) continue;
    for (double scale : {1.0, 0.2}) {
      std::vector<cx> z(n);
      for (int a = 0; a < n; ++a)
        z[a] = scale * cx(0.37 + 0.11 * a, 0.13 - 0.07 * a);
      try {
        cx v = evaluate_entry(e, z);
        if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v)))
          throw NonHermitianEntry(
              "diagonal entry g[" + std::to_string(k + 1) + "," +
              std::to_string(k + 1) + "] evaluates to a non-real value");
        break;
      } catch (const NonHermitianEntry&) {
        throw;
      } catch (const Error&) {
        // Probe outside this entry's domain; try the next probe.
        continue;
      }
    }
  }

  MetricField field;
  field.n = n;
  field.name = name;
  field.analytic_jets = true;
  field.in_domain = std::move(domain);
  field.eval_entries = [n, upper](const ChartPoint& p,
                                  int order) -> std::vector<Jet> {
    const int m = 2 * n;
    std::vector<Jet> z(n), zb(n);
    for (int a = 0; a < n; ++a) {
      Jet zj(m, order, p.z[a]);
      Jet zbj(m, order, std::conj(p.z[a]));
      if (order >= 1) {
        zj.d1_ref(2 * a) = cx(1.0);
        zj.d1_ref(2 * a + 1) = cx(0.0, 1.0);
        zbj.d1_ref(2 * a) = cx(1.0);
        zbj.d1_ref(2 * a + 1) = cx(0.0, -1.0);
      }
      z[a] = zj;
      zb[a] = zbj;
    }
    Jet zero = Jet::constant(m, order, cx(0.0));
    Jet one = Jet::constant(m, order, cx(1.0));
    std::vector<Jet> out(static_cast<std::size_t>(n) * n, zero);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet value = zero;
        if (upper[i * n + j])
          value = eval_checked<Jet>(*upper[i * n + j], z, zb, zero);
        else if (i == j)
          value = one;
        out[i * n + j] = value;
        if (i != j) out[j * n + i] = conj(value);
      }
    return out;
  };
  return field;
}

}  // namespace tgc
