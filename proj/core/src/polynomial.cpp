#include "hmvp/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace hmvp {

namespace {

double int_pow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct Parser {
  const std::string& s;
  int n;
  std::size_t pos = 0;

  explicit Parser(const std::string& str, int group_index) : s(str), n(group_index) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("polynomial parse error at position " + std::to_string(pos) +
                                ": " + what + " in \"" + s + "\"");
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
      ++pos;
    if (pos == start) fail("expected number");
    double value = std::stod(s.substr(start, pos - start));
    if (peek() == '/') {
      ++pos;
      std::size_t dstart = pos;
      skip_ws();
      dstart = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == dstart) fail("expected denominator");
      const double den = std::stod(s.substr(dstart, pos - dstart));
      if (den == 0.0) fail("zero denominator");
      value /= den;
    }
    return value;
  }

  int integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected integer exponent");
    return std::stoi(s.substr(start, pos - start));
  }

  // One multiplicative factor into the running term.
  void factor(Polynomial::Term& term) {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      term.coeff *= number();
      return;
    }
    int var = -1;  // 0 = t, k = x_k
    if (c == 't') {
      ++pos;
      var = 0;
    } else if (c == 'x') {
      ++pos;
      const int k = integer();
      if (k < 1 || k > 2 * n + 1) fail("coordinate index out of range for n=" + std::to_string(n));
      var = k;
    } else {
      fail("expected number or variable");
    }
    int exp = 1;
    if (peek() == '^') {
      ++pos;
      exp = integer();
      if (exp < 0) fail("negative exponent");
    }
    if (var == 0)
      term.t_exp += exp;
    else
      term.x_exps[var - 1] += exp;
  }

  bool starts_factor(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 't' || c == 'x';
  }

  Polynomial::Term term() {
    Polynomial::Term t;
    t.coeff = 1.0;
    t.x_exps.assign(2 * n + 1, 0);
    factor(t);
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos;
        factor(t);
      } else if (starts_factor(c)) {
        factor(t);  // adjacency means multiplication
      } else {
        break;
      }
    }
    return t;
  }

  std::vector<Polynomial::Term> expr() {
    std::vector<Polynomial::Term> terms;
    double sign = 1.0;
    char c = peek();
    if (c == '+' || c == '-') {
      ++pos;
      sign = (c == '-') ? -1.0 : 1.0;
    }
    for (;;) {
      Polynomial::Term t = term();
      t.coeff *= sign;
      terms.push_back(std::move(t));
      c = peek();
      if (c == '\0') break;
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      ++pos;
      sign = (c == '-') ? -1.0 : 1.0;
    }
    return terms;
  }
};

}  // namespace

Polynomial::Polynomial(int group_index, std::vector<Term> terms)
    : n_(group_index), terms_(std::move(terms)) {
  if (n_ < 1) throw std::invalid_argument("Polynomial: group index must be >= 1");
  for (auto& t : terms_)
    if (static_cast<int>(t.x_exps.size()) != 2 * n_ + 1)
      throw std::invalid_argument("Polynomial: term exponent list must have length 2n+1");
  normalize();
}

Polynomial Polynomial::parse(const std::string& expr, int group_index) {
  Parser p(expr, group_index);
  return Polynomial(group_index, p.expr());
}

void Polynomial::normalize() {
  std::map<std::pair<int, std::vector<int>>, double> acc;
  for (const auto& t : terms_) acc[{t.t_exp, t.x_exps}] += t.coeff;
  terms_.clear();
  for (const auto& [key, c] : acc) {
    if (c == 0.0) continue;
    terms_.push_back(Term{c, key.first, key.second});
  }
}

double Polynomial::operator()(double t, const HPoint& x) const {
  if (x.n != n_) throw std::invalid_argument("Polynomial: group index mismatch");
  double sum = 0.0;
  for (const auto& term : terms_) {
    double v = term.coeff * int_pow(t, term.t_exp);
    for (int k = 0; k < 2 * n_ + 1; ++k) v *= int_pow(x.coords[k], term.x_exps[k]);
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::d_dt() const {
  std::vector<Term> out;
  for (const auto& term : terms_) {
    if (term.t_exp == 0) continue;
    Term d = term;
    d.coeff *= term.t_exp;
    d.t_exp -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::d_dx(int coord) const {
  if (coord < 1 || coord > 2 * n_ + 1) throw std::invalid_argument("d_dx: coordinate out of range");
  std::vector<Term> out;
  for (const auto& term : terms_) {
    const int e = term.x_exps[coord - 1];
    if (e == 0) continue;
    Term d = term;
    d.coeff *= e;
    d.x_exps[coord - 1] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(n_, std::move(out));
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& term : terms_) {
    double c = term.coeff;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = std::abs(c);
    } else if (c < 0) {
      os << "-";
      c = -c;
    }
    first = false;
    bool wrote = false;
    if (c != 1.0 || (term.t_exp == 0 &&
                     std::all_of(term.x_exps.begin(), term.x_exps.end(),
                                 [](int e) { return e == 0; }))) {
      os << c;
      wrote = true;
    }
    auto piece = [&](const std::string& name, int e) {
      if (e == 0) return;
      if (wrote) os << "*";
      os << name;
      if (e > 1) os << "^" << e;
      wrote = true;
    };
    piece("t", term.t_exp);
    for (int k = 0; k < 2 * n_ + 1; ++k) piece("x" + std::to_string(k + 1), term.x_exps[k]);
  }
  return os.str();
}

ScalarField Polynomial::field(const std::string& label) const {
  struct Jets {
    Polynomial value, dt;
    std::vector<Polynomial> grad;               // 2n+1
    std::vector<std::vector<Polynomial>> hess;  // (2n+1)^2
    int n;
  };
  auto jets = std::make_shared<Jets>();
  jets->n = n_;
  jets->value = *this;
  jets->dt = d_dt();
  const int d = 2 * n_ + 1;
  jets->grad.reserve(d);
  for (int k = 1; k <= d; ++k) jets->grad.push_back(d_dx(k));
  jets->hess.resize(d);
  for (int k = 1; k <= d; ++k)
    for (int l = 1; l <= d; ++l) jets->hess[k - 1].push_back(jets->grad[k - 1].d_dx(l));

  ScalarField f;
  f.n = n_;
  f.label = label;
  f.evaluator = [jets](double t, const HPoint& x) { return jets->value(t, x); };
  f.analytic_jet = [jets](double t, const HPoint& x) {
    const int dd = 2 * jets->n + 1;
    Eigen::VectorXd g(dd);
    Eigen::MatrixXd H(dd, dd);
    for (int k = 0; k < dd; ++k) {
      g[k] = jets->grad[k](t, x);
      for (int l = 0; l < dd; ++l) H(k, l) = jets->hess[k][l](t, x);
    }
    return assemble_jet(jets->n, x, jets->value(t, x), jets->dt(t, x), g, H);
  };
  return f;
}

namespace {
struct BuiltinEntry {
  BuiltinFieldInfo info;
};

const std::vector<BuiltinFieldInfo>& catalogue() {
  static const std::vector<BuiltinFieldInfo> entries = {
      // The quartic caloric field: solves u_t = Delta_H u on H^1.
      {"heat-quartic", 1, "12t^2 + 12x1^2*t + x1^4"},
      {"x1", 1, "x1"},
      {"x2", 1, "x2"},
      {"vert", 1, "x3"},
      {"x1sq", 1, "x1^2"},
      {"harmonic-xy", 1, "x1*x2"},
      {"linear-mix", 1, "x1 + 2x2 + t"},
      {"quad-aniso", 1, "x1^2 + 2x2^2 + x1*x2 - t"},
      {"cubic-mix", 1, "x1^3 + x2^2 + t*x1"},
      {"quartic-radial", 1, "x1^4 + x2^4 + x1^2*x2^2"},
  };
  return entries;
}
}  // namespace

const std::vector<BuiltinFieldInfo>& builtin_field_catalogue() { return catalogue(); }

ScalarField builtin_field(const std::string& id) {
  for (const auto& e : catalogue())
    if (e.id == id) return Polynomial::parse(e.expression, e.n).field(e.id);
  throw std::invalid_argument("unknown field id: " + id);
}

}  // namespace hmvp
