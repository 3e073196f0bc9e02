#include "liestab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace liestab {

ParseError::ParseError(const std::string& what, std::size_t pos)
    : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}

Expr Expr::make(ExprKind kind, double value, int index, std::vector<Expr> kids) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  n->index = index;
  n->kids = std::move(kids);
  return Expr(std::move(n));
}

Expr::Expr() : Expr(make(ExprKind::Constant, 0.0, 0, {})) {}

Expr constant(double c) { return Expr::make(ExprKind::Constant, c, 0, {}); }
Expr var(int index) { return Expr::make(ExprKind::Variable, 0.0, index, {}); }
Expr sin(Expr a) { return Expr::make(ExprKind::Sin, 0.0, 0, {std::move(a)}); }
Expr cos(Expr a) { return Expr::make(ExprKind::Cos, 0.0, 0, {std::move(a)}); }
Expr exp(Expr a) { return Expr::make(ExprKind::Exp, 0.0, 0, {std::move(a)}); }
Expr neg(Expr a) { return Expr::make(ExprKind::Neg, 0.0, 0, {std::move(a)}); }
Expr pow(Expr base, int exponent) {
  return Expr::make(ExprKind::Pow, 0.0, exponent, {std::move(base)});
}
Expr operator+(Expr a, Expr b) {
  return Expr::make(ExprKind::Add, 0.0, 0, {std::move(a), std::move(b)});
}
Expr operator-(Expr a, Expr b) {
  return Expr::make(ExprKind::Sub, 0.0, 0, {std::move(a), std::move(b)});
}
Expr operator*(Expr a, Expr b) {
  return Expr::make(ExprKind::Mul, 0.0, 0, {std::move(a), std::move(b)});
}
Expr operator/(Expr a, Expr b) {
  return Expr::make(ExprKind::Div, 0.0, 0, {std::move(a), std::move(b)});
}
Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms[0];
  return Expr::make(ExprKind::Add, 0.0, 0, std::move(terms));
}
Expr product(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors[0];
  return Expr::make(ExprKind::Mul, 0.0, 0, std::move(factors));
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const Expr& k : e.children()) n += node_count(k);
  return n;
}

int max_var_index(const Expr& e) {
  int m = e.kind() == ExprKind::Variable ? e.var_index() : 0;
  for (const Expr& k : e.children()) m = std::max(m, max_var_index(k));
  return m;
}

namespace {

int kind_rank(ExprKind k) {
  switch (k) {
    case ExprKind::Constant: return 0;
    case ExprKind::Variable: return 1;
    case ExprKind::Sin: return 2;
    case ExprKind::Cos: return 3;
    case ExprKind::Exp: return 4;
    case ExprKind::Pow: return 5;
    case ExprKind::Div: return 6;
    case ExprKind::Mul: return 7;
    case ExprKind::Add: return 8;
    case ExprKind::Neg: return 9;
    case ExprKind::Sub: return 10;
  }
  return 11;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::Constant: {
      double va = a.constant_value(), vb = b.constant_value();
      if (va < vb) return -1;
      if (va > vb) return 1;
      return 0;
    }
    case ExprKind::Variable:
      return a.var_index() == b.var_index() ? 0 : (a.var_index() < b.var_index() ? -1 : 1);
    case ExprKind::Pow: {
      int c = compare(a.children()[0], b.children()[0]);
      if (c != 0) return c;
      return a.exponent() == b.exponent() ? 0 : (a.exponent() < b.exponent() ? -1 : 1);
    }
    default: {
      auto ka = a.children(), kb = b.children();
      if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
      for (std::size_t i = 0; i < ka.size(); ++i) {
        int c = compare(ka[i], kb[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
}

bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// --------------------------------------------------------------------------
// Canonical constructors. All inputs are assumed already canonical.
// --------------------------------------------------------------------------
namespace {

Expr c_mul(std::vector<Expr> factors);

double ipow(double base, int k) {
  // 0^0 = 1 under this convention (x^0 simplifies to 1 everywhere).
  double r = 1.0, b = base;
  for (int e = k; e > 0; e >>= 1, b *= b)
    if (e & 1) r *= b;
  return r;
}

Expr c_pow(const Expr& base, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return base;
  if (base.kind() == ExprKind::Constant) {
    double v = ipow(base.constant_value(), k);
    if (std::isfinite(v)) return constant(v);
  }
  if (base.kind() == ExprKind::Pow)
    return c_pow(base.children()[0], k * base.exponent());
  if (base.kind() == ExprKind::Mul) {
    std::vector<Expr> kids;
    kids.reserve(base.children().size());
    for (const Expr& c : base.children()) kids.push_back(c_pow(c, k));
    return c_mul(std::move(kids));
  }
  return pow(base, k);
}

// Splits a canonical term into (coefficient, core) for like-term merging.
std::pair<double, Expr> split_coeff(const Expr& t) {
  if (t.kind() == ExprKind::Mul && t.children()[0].kind() == ExprKind::Constant) {
    auto kids = t.children();
    std::vector<Expr> rest(kids.begin() + 1, kids.end());
    return {kids[0].constant_value(),
            rest.size() == 1 ? rest[0] : Expr::make(ExprKind::Mul, 0.0, 0, std::move(rest))};
  }
  return {1.0, t};
}

Expr with_coeff(double c, const Expr& core) {
  if (c == 1.0) return core;
  std::vector<Expr> kids;
  if (core.kind() == ExprKind::Mul) {
    kids.reserve(core.children().size() + 1);
    kids.push_back(constant(c));
    kids.insert(kids.end(), core.children().begin(), core.children().end());
  } else {
    kids = {constant(c), core};
  }
  return Expr::make(ExprKind::Mul, 0.0, 0, std::move(kids));
}

Expr c_add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (Expr& t : terms) {
    if (t.kind() == ExprKind::Add)
      flat.insert(flat.end(), t.children().begin(), t.children().end());
    else
      flat.push_back(std::move(t));
  }
  double c = 0.0;
  std::vector<std::pair<Expr, double>> merged;  // (core, coeff)
  for (const Expr& t : flat) {
    if (t.kind() == ExprKind::Constant) {
      c += t.constant_value();
      continue;
    }
    auto [coeff, core] = split_coeff(t);
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& p) {
      return structurally_equal(p.first, core);
    });
    if (it == merged.end())
      merged.emplace_back(core, coeff);
    else
      it->second += coeff;
  }
  std::vector<Expr> out;
  if (c != 0.0) out.push_back(constant(c));
  for (auto& [core, coeff] : merged)
    if (coeff != 0.0) out.push_back(with_coeff(coeff, core));
  if (out.empty()) return constant(0.0);
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  if (out.size() == 1) return out[0];
  return Expr::make(ExprKind::Add, 0.0, 0, std::move(out));
}

Expr c_mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (Expr& f : factors) {
    if (f.kind() == ExprKind::Mul)
      flat.insert(flat.end(), f.children().begin(), f.children().end());
    else
      flat.push_back(std::move(f));
  }
  double c = 1.0;
  std::vector<std::pair<Expr, int>> merged;  // (base, exponent)
  for (const Expr& f : flat) {
    if (f.kind() == ExprKind::Constant) {
      c *= f.constant_value();
      continue;
    }
    Expr base = f;
    int k = 1;
    if (f.kind() == ExprKind::Pow) {
      base = f.children()[0];
      k = f.exponent();
    }
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& p) {
      return structurally_equal(p.first, base);
    });
    if (it == merged.end())
      merged.emplace_back(base, k);
    else
      it->second += k;
  }
  if (c == 0.0) return constant(0.0);
  std::vector<Expr> out;
  for (auto& [base, k] : merged) {
    Expr p = c_pow(base, k);
    if (p.kind() == ExprKind::Constant)
      c *= p.constant_value();
    else
      out.push_back(std::move(p));
  }
  if (out.empty()) return constant(c);
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  if (c != 1.0) out.insert(out.begin(), constant(c));
  if (out.size() == 1) return out[0];
  return Expr::make(ExprKind::Mul, 0.0, 0, std::move(out));
}

Expr c_div(const Expr& a, const Expr& b) {
  if (b.kind() == ExprKind::Constant && b.constant_value() != 0.0)
    return c_mul({constant(1.0 / b.constant_value()), a});
  // Denominator kept symbolic (including literal 0, so the evaluation error
  // is preserved rather than folded away).
  return a / b;
}

Expr c_fun(ExprKind kind, const Expr& a) {
  if (a.kind() == ExprKind::Constant) {
    double v = a.constant_value();
    double r = kind == ExprKind::Sin ? std::sin(v) : kind == ExprKind::Cos ? std::cos(v) : std::exp(v);
    if (std::isfinite(r)) return constant(r);
  }
  return Expr::make(kind, 0.0, 0, {a});
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.constant_value() == 0.0 ? constant(0.0) : e;  // normalizes -0.0
    case ExprKind::Variable:
      return e;
    case ExprKind::Neg:
      return c_mul({constant(-1.0), simplify(e.children()[0])});
    case ExprKind::Sub:
      return c_add({simplify(e.children()[0]), c_mul({constant(-1.0), simplify(e.children()[1])})});
    case ExprKind::Add: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const Expr& k : e.children()) kids.push_back(simplify(k));
      return c_add(std::move(kids));
    }
    case ExprKind::Mul: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const Expr& k : e.children()) kids.push_back(simplify(k));
      return c_mul(std::move(kids));
    }
    case ExprKind::Div:
      return c_div(simplify(e.children()[0]), simplify(e.children()[1]));
    case ExprKind::Pow:
      return c_pow(simplify(e.children()[0]), e.exponent());
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Exp:
      return c_fun(e.kind(), simplify(e.children()[0]));
  }
  return e;
}

namespace {

Expr deriv_raw(const Expr& e, int i) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return constant(0.0);
    case ExprKind::Variable:
      return constant(e.var_index() == i ? 1.0 : 0.0);
    case ExprKind::Neg:
      return neg(deriv_raw(e.children()[0], i));
    case ExprKind::Sub:
      return deriv_raw(e.children()[0], i) - deriv_raw(e.children()[1], i);
    case ExprKind::Add: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      for (const Expr& k : e.children()) kids.push_back(deriv_raw(k, i));
      return sum(std::move(kids));
    }
    case ExprKind::Mul: {
      auto kids = e.children();
      std::vector<Expr> terms;
      terms.reserve(kids.size());
      for (std::size_t j = 0; j < kids.size(); ++j) {
        std::vector<Expr> f(kids.begin(), kids.end());
        f[j] = deriv_raw(kids[j], i);
        terms.push_back(product(std::move(f)));
      }
      return sum(std::move(terms));
    }
    case ExprKind::Div: {
      const Expr& a = e.children()[0];
      const Expr& b = e.children()[1];
      return (deriv_raw(a, i) * b - a * deriv_raw(b, i)) / pow(b, 2);
    }
    case ExprKind::Pow: {
      const Expr& b = e.children()[0];
      int k = e.exponent();
      if (k == 0) return constant(0.0);
      return constant(static_cast<double>(k)) * pow(b, k - 1) * deriv_raw(b, i);
    }
    case ExprKind::Sin:
      return cos(e.children()[0]) * deriv_raw(e.children()[0], i);
    case ExprKind::Cos:
      return neg(sin(e.children()[0])) * deriv_raw(e.children()[0], i);
    case ExprKind::Exp:
      return exp(e.children()[0]) * deriv_raw(e.children()[0], i);
  }
  return constant(0.0);
}

}  // namespace

Expr derivative(const Expr& e, int var_index) { return simplify(deriv_raw(e, var_index)); }

double eval(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.constant_value();
    case ExprKind::Variable: {
      int i = e.var_index();
      if (i < 1 || static_cast<std::size_t>(i) > x.size())
        throw DimensionError("variable x" + std::to_string(i) + " out of range for point of dimension " +
                             std::to_string(x.size()));
      return x[static_cast<std::size_t>(i - 1)];
    }
    case ExprKind::Neg:
      return -eval(e.children()[0], x);
    case ExprKind::Sub:
      return eval(e.children()[0], x) - eval(e.children()[1], x);
    case ExprKind::Add: {
      double s = 0.0;
      for (const Expr& k : e.children()) s += eval(k, x);
      return s;
    }
    case ExprKind::Mul: {
      double p = 1.0;
      for (const Expr& k : e.children()) p *= eval(k, x);
      return p;
    }
    case ExprKind::Div: {
      double d = eval(e.children()[1], x);
      if (d == 0.0) throw EvalError("division by zero in " + to_string(e));
      return eval(e.children()[0], x) / d;
    }
    case ExprKind::Pow:
      return ipow(eval(e.children()[0], x), e.exponent());
    case ExprKind::Sin:
      return std::sin(eval(e.children()[0], x));
    case ExprKind::Cos:
      return std::cos(eval(e.children()[0], x));
    case ExprKind::Exp:
      return std::exp(eval(e.children()[0], x));
  }
  return 0.0;
}

// --------------------------------------------------------------------------
// Printing. Constants use shortest-exact formatting so print/parse round
// trips reproduce the identical double.
// --------------------------------------------------------------------------
namespace {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

enum Prec { kAdd = 0, kMul = 1, kUnary = 2, kPow = 3, kAtom = 4 };

int precedence_of(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return kAdd;
    case ExprKind::Mul:
    case ExprKind::Div:
      return kMul;
    case ExprKind::Neg:
      return kUnary;
    case ExprKind::Pow:
      return kPow;
    case ExprKind::Constant:
      return e.constant_value() < 0 ? kUnary : kAtom;
    default:
      return kAtom;
  }
}

std::string print(const Expr& e, int context) {
  std::string s;
  switch (e.kind()) {
    case ExprKind::Constant:
      s = format_double(e.constant_value());
      break;
    case ExprKind::Variable:
      s = "x" + std::to_string(e.var_index());
      break;
    case ExprKind::Sin:
      return "sin(" + print(e.children()[0], kAdd) + ")";
    case ExprKind::Cos:
      return "cos(" + print(e.children()[0], kAdd) + ")";
    case ExprKind::Exp:
      return "exp(" + print(e.children()[0], kAdd) + ")";
    case ExprKind::Neg:
      s = "-" + print(e.children()[0], kUnary);
      break;
    case ExprKind::Sub:
      s = print(e.children()[0], kAdd) + " - " + print(e.children()[1], kAdd + 1);
      break;
    case ExprKind::Pow:
      s = print(e.children()[0], kAtom) + "^" + std::to_string(e.exponent());
      break;
    case ExprKind::Div:
      s = print(e.children()[0], kMul) + "/" + print(e.children()[1], kPow);
      break;
    case ExprKind::Mul: {
      auto kids = e.children();
      std::size_t start = 0;
      if (kids[0].kind() == ExprKind::Constant && kids[0].constant_value() == -1.0 && kids.size() > 1) {
        s = "-";
        start = 1;
      }
      for (std::size_t i = start; i < kids.size(); ++i) {
        if (i > start) s += "*";
        s += print(kids[i], kMul + 1);
      }
      if (!s.empty() && s[0] == '-') {
        if (context > kUnary) return "(" + s + ")";
        return s;
      }
      break;
    }
    case ExprKind::Add: {
      auto kids = e.children();
      s = print(kids[0], kAdd);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        // Fold a leading negative coefficient into a binary minus.
        const Expr& t = kids[i];
        bool negative = false;
        Expr body = t;
        if (t.kind() == ExprKind::Constant && t.constant_value() < 0) {
          negative = true;
          body = constant(-t.constant_value());
        } else if (t.kind() == ExprKind::Mul && t.children()[0].kind() == ExprKind::Constant &&
                   t.children()[0].constant_value() < 0) {
          negative = true;
          double c = -t.children()[0].constant_value();
          std::vector<Expr> rest(t.children().begin() + 1, t.children().end());
          if (c != 1.0) rest.insert(rest.begin(), constant(c));
          body = rest.size() == 1 ? rest[0] : Expr::make(ExprKind::Mul, 0.0, 0, std::move(rest));
        }
        s += negative ? " - " : " + ";
        s += print(body, kAdd + 1);
      }
      break;
    }
  }
  if (precedence_of(e) < context) return "(" + s + ")";
  return s;
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, kAdd); }

// --------------------------------------------------------------------------
// Recursive-descent parser.
// --------------------------------------------------------------------------
namespace {

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = e + term();
      else if (eat('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*'))
        e = e * factor();
      else if (eat('/'))
        e = e / factor();
      else
        return e;
    }
  }

  Expr factor() {
    if (eat('-')) return neg(factor());
    if (eat('+')) return factor();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (eat('^')) {
      skip_ws();
      std::size_t at = pos_;
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '.'))
        throw ParseError("exponent must be a nonnegative integer", at);
      int k = 0;
      bool any = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        k = k * 10 + (src_[pos_] - '0');
        ++pos_;
        any = true;
        if (k > 1000000) throw ParseError("exponent too large", at);
      }
      if (!any) throw ParseError("exponent must be a nonnegative integer", at);
      if (pos_ < src_.size() && src_[pos_] == '.')
        throw ParseError("exponent must be a nonnegative integer", at);
      return pow(base, k);
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr number() {
    std::size_t at = pos_;
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) throw ParseError("malformed number", at);
    pos_ += static_cast<std::size_t>(ptr - begin);
    return constant(v);
  }

  Expr identifier() {
    std::size_t at = pos_;
    std::string name;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
      name += src_[pos_];
      ++pos_;
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
      int idx = std::stoi(name.substr(1));
      if (idx < 1 || idx > dim_)
        throw ParseError("unknown variable " + name + " (dimension is " + std::to_string(dim_) + ")", at);
      return var(idx);
    }
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!eat('(')) throw ParseError("expected '(' after " + name, pos_);
      Expr a = expression();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      if (name == "sin") return sin(a);
      if (name == "cos") return cos(a);
      return exp(a);
    }
    throw ParseError("unknown identifier '" + name + "'", at);
  }
};

}  // namespace

Expr parse_expression(std::string_view source, int dimension) {
  return Parser(source, dimension).run();
}

ScalarField parse(std::string_view source, int dimension) {
  if (dimension < 1) throw PreconditionError("dimension must be positive");
  return ScalarField{dimension, simplify(parse_expression(source, dimension))};
}

double evaluate(const ScalarField& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.dim)
    throw DimensionError("point dimension " + std::to_string(x.size()) + " does not match field dimension " +
                         std::to_string(f.dim));
  return eval(f.body, x);
}

ScalarField partial(const ScalarField& f, int var_index) {
  if (var_index < 1 || var_index > f.dim)
    throw DimensionError("partial index " + std::to_string(var_index) + " out of range");
  return ScalarField{f.dim, derivative(f.body, var_index)};
}

std::string to_string(const ScalarField& f) { return to_string(f.body); }

}  // namespace liestab
