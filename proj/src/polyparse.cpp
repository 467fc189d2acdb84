#include "momopt/polyparse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "momopt/error.hpp"

namespace momopt {

VariableTable::VariableTable(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!valid_name(names_[i]))
      throw Error(ErrorCode::InvalidArgument, "invalid variable name '" + names_[i] + "'");
    if (!index_.emplace(names_[i], i).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate variable name '" + names_[i] + "'");
  }
}

VariableTable VariableTable::from_list(std::string_view comma_separated) {
  std::vector<std::string> names;
  std::string cur;
  auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t");
    std::size_t e = cur.find_last_not_of(" \t");
    names.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : comma_separated) {
    if (c == ',') flush();
    else cur.push_back(c);
  }
  flush();
  return VariableTable(std::move(names));
}

std::optional<std::size_t> VariableTable::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool VariableTable::all_single_letter() const noexcept {
  for (const auto& n : names_)
    if (n.size() != 1) return false;
  return true;
}

VariableTable VariableTable::extended(const std::vector<std::string>& extra) const {
  std::vector<std::string> all = names_;
  all.insert(all.end(), extra.begin(), extra.end());
  return VariableTable(std::move(all));
}

bool VariableTable::valid_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
      kind_(kind),
      position_(position) {}

namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  Parser(std::string_view text, const VariableTable& vars) : s_(text), vars_(vars) {}

  Polynomial run() {
    skip_ws();
    if (pos_ >= s_.size()) fail("empty expression");
    Polynomial p = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  Polynomial expr() {
    if (++depth_ > kMaxDepth) fail("expression nested too deeply");
    Polynomial acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        break;
      }
    }
    --depth_;
    return acc;
  }

  Polynomial term() {
    bool last_was_number = false;
    Polynomial acc = factor(&last_was_number);
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) break;
      char c = s_[pos_];
      bool explicit_mul = c == '*';
      bool implicit_mul =
          last_was_number && (std::isalpha(static_cast<unsigned char>(c)) || c == '(');
      if (!explicit_mul && !implicit_mul) break;
      if (explicit_mul) ++pos_;
      std::size_t at = pos_;
      acc = checked_product(acc, factor(&last_was_number), at);
    }
    return acc;
  }

  Polynomial factor(bool* was_number) {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a factor");
    char c = s_[pos_];
    if (c == '-' || c == '+') {
      if (++depth_ > kMaxDepth) fail("expression nested too deeply");
      ++pos_;
      Polynomial p = factor(was_number);
      --depth_;
      return c == '-' ? -p : p;
    }
    std::size_t start = pos_;
    Polynomial base = primary(was_number);
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      skip_ws();
      int e = exponent();
      base = checked_power(base, e, start);
    }
    return base;
  }

  Polynomial primary(bool* was_number) {
    char c = s_[pos_];
    *was_number = false;
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      *was_number = true;
      return Polynomial::constant(vars_.size(), number());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  double number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - b;
    };
    std::size_t nd = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        // "2e" with e not an exponent: leave it for implicit multiplication.
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec == std::errc::result_out_of_range || !std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  int exponent() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a non-negative integer exponent");
    std::string_view digits = s_.substr(start, pos_ - start);
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return 0;
    digits = digits.substr(first);
    if (digits.size() > 2 || std::stoi(std::string(digits)) > kMaxExponent)
      throw ParseError(ParseError::Kind::ExponentOverflow, start,
                       "exponent exceeds " + std::to_string(kMaxExponent));
    return std::stoi(std::string(digits));
  }

  Polynomial identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    if (auto idx = vars_.index_of(name)) return Polynomial::variable(vars_.size(), *idx);
    // Juxtaposed single-letter variables: "xy" -> x*y.
    if (vars_.all_single_letter() && name.size() > 1) {
      Polynomial p = Polynomial::constant(vars_.size(), 1.0);
      bool ok = true;
      for (char c : name) {
        auto idx = vars_.index_of(std::string_view(&c, 1));
        if (!idx) {
          ok = false;
          break;
        }
        p = p * Polynomial::variable(vars_.size(), *idx);
      }
      if (ok) {
        check_exponents(p, start);
        return p;
      }
    }
    throw ParseError(ParseError::Kind::UnknownVariable, start,
                     "unknown variable '" + std::string(name) + "'");
  }

  static int max_exponent(const Polynomial& p) {
    int m = 0;
    for (const auto& [mono, c] : p.terms())
      for (int e : mono.exponents()) m = std::max(m, e);
    return m;
  }

  static std::vector<int> max_exponents(const Polynomial& p) {
    std::vector<int> m(p.nvars(), 0);
    for (const auto& [mono, c] : p.terms())
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], mono[i]);
    return m;
  }

  void check_exponents(const Polynomial& p, std::size_t at) const {
    if (max_exponent(p) > kMaxExponent)
      throw ParseError(ParseError::Kind::ExponentOverflow, at,
                       "resulting exponent exceeds " + std::to_string(kMaxExponent));
  }

  // The top power of each variable in a product is the sum of the factors' top
  // powers, so overflow is rejected before multiplying.
  Polynomial checked_product(const Polynomial& a, const Polynomial& b, std::size_t at) const {
    if (!a.is_zero() && !b.is_zero()) {
      std::vector<int> ea = max_exponents(a), eb = max_exponents(b);
      for (std::size_t i = 0; i < ea.size(); ++i)
        if (ea[i] + eb[i] > kMaxExponent)
          throw ParseError(ParseError::Kind::ExponentOverflow, at,
                           "resulting exponent exceeds " + std::to_string(kMaxExponent));
    }
    return a * b;
  }

  Polynomial checked_power(const Polynomial& base, int e, std::size_t at) const {
    if (static_cast<long>(max_exponent(base)) * e > kMaxExponent)
      throw ParseError(ParseError::Kind::ExponentOverflow, at,
                       "resulting exponent exceeds " + std::to_string(kMaxExponent));
    return base.pow(static_cast<unsigned>(e));
  }

  std::string_view s_;
  const VariableTable& vars_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

std::string format_coefficient(double c) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c);
  return std::string(buf, ptr);
}

}  // namespace

Polynomial parse_polynomial(std::string_view text, const VariableTable& vars) {
  return Parser(text, vars).run();
}

std::string format_polynomial(const Polynomial& p, const VariableTable& vars) {
  if (vars.size() != p.nvars())
    throw Error(ErrorCode::LengthMismatch, "variable table does not match polynomial");
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  // Highest degree first; within a degree, graded-lex order.
  std::vector<std::pair<Monomial, double>> terms(p.terms().begin(), p.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.first.degree() > b.first.degree();
  });
  for (const auto& [m, c] : terms) {
    double mag = std::fabs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += vars.name(i);
      if (m[i] > 1) mono += "^" + std::to_string(m[i]);
    }
    if (mono.empty()) {
      out << format_coefficient(mag);
    } else if (mag == 1.0) {
      out << mono;
    } else {
      out << format_coefficient(mag) << "*" << mono;
    }
  }
  return out.str();
}

}  // namespace momopt
