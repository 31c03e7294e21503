#include "fputlab/expression.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace fputlab::sym {

ParseError::ParseError(const std::string& message, std::size_t position)
    : SymbolicError(message + " at position " + std::to_string(position)), position_(position) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  DiffPoly run() {
    DiffPoly p = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return p;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::string integerText() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer", pos_);
    return std::string(s_.substr(start, pos_ - start));
  }

  DiffPoly expr() {
    DiffPoly acc;
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    acc = term();
    if (negate) acc = -acc;
    for (;;) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        return acc;
    }
  }

  DiffPoly term() {
    DiffPoly acc = power();
    for (;;) {
      if (accept('*')) {
        acc *= power();
      } else if (peek('/')) {
        std::size_t at = pos_;
        ++pos_;
        DiffPoly d = power();
        try {
          acc *= invert(d);
        } catch (const std::exception&) {
          throw ParseError("division by a non-invertible expression", at);
        }
      } else {
        return acc;
      }
    }
  }

  DiffPoly power() {
    DiffPoly base = primary();
    if (!accept('^')) return base;
    skip();
    std::size_t at = pos_;
    bool neg = accept('-');
    long e = std::stol(integerText());
    if (neg) e = -e;
    try {
      return sym::power(base, static_cast<int>(e));
    } catch (const std::exception&) {
      throw ParseError("negative power of a non-invertible expression", at);
    }
  }

  DiffPoly primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t at = pos_;
      std::string digits = integerText();
      try {
        return DiffPoly(Rational::parse(digits));
      } catch (const std::exception&) {
        throw ParseError("malformed number", at);
      }
    }
    if (accept('(')) {
      DiffPoly p = expr();
      expect(')');
      return p;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string_view word = s_.substr(start, pos_ - start);
      if (word == "av" || word == "pr") {
        expect('(');
        DiffPoly inner = expr();
        expect(')');
        try {
          return word == "av" ? average(inner) : primitive(inner);
        } catch (const SymbolicError& e) {
          throw ParseError(e.what(), start);
        }
      }
      if (word == "u") return DiffPoly::u(0);
      if (word.starts_with("u_")) return derivative(word, start);
      if (auto id = findParam(word)) return DiffPoly::param(*id);
      throw ParseError("unknown identifier '" + std::string(word) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  DiffPoly derivative(std::string_view word, std::size_t start) {
    std::string_view rest = word.substr(2);
    if (rest.empty() && pos_ < s_.size() && s_[pos_] == '-')
      throw ParseError("negative derivative order", start);
    if (rest == "x") return DiffPoly::u(1);
    if (rest.size() >= 2 && rest.back() == 'x') {
      std::string_view num = rest.substr(0, rest.size() - 1);
      bool digits = true;
      for (char ch : num) digits = digits && std::isdigit(static_cast<unsigned char>(ch));
      if (digits) return DiffPoly::u(std::stoi(std::string(num)));
    }
    throw ParseError("malformed derivative '" + std::string(word) + "'", start);
  }
};

void appendPower(std::ostringstream& os, bool& first, const std::string& base, long e) {
  if (!first) os << '*';
  first = false;
  os << base;
  if (e != 1) os << '^' << e;
}

std::string orderName(int k) {
  if (k == 0) return "u";
  if (k == 1) return "u_x";
  return "u_" + std::to_string(k) + "x";
}

// Local monomial, factors printed in ascending derivative order.
void appendLocal(std::ostringstream& os, bool& first, const Orders& desc) {
  for (std::size_t i = desc.size(); i-- > 0;) {
    if (i + 1 < desc.size() && desc[i] == desc[i + 1]) continue;
    long e = 0;
    for (std::size_t j = i + 1; j-- > 0 && desc[j] == desc[i];) ++e;
    appendPower(os, first, orderName(desc[i]), e);
  }
}

std::string localText(const Orders& desc) {
  std::ostringstream os;
  bool first = true;
  appendLocal(os, first, desc);
  return os.str();
}

void appendAtoms(std::ostringstream& os, bool& first, const std::vector<Orders>& atoms, const char* fn) {
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t j = i;
    while (j < atoms.size() && atoms[j] == atoms[i]) ++j;
    appendPower(os, first, std::string(fn) + "(" + localText(atoms[i]) + ")", static_cast<long>(j - i));
    i = j;
  }
}

}  // namespace

DiffPoly parse(std::string_view text) { return Parser(text).run(); }

std::string printFactors(const Factors& f) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [id, e] : f.params) appendPower(os, first, paramName(id), e);
  appendAtoms(os, first, f.averages, "av");
  appendLocal(os, first, f.derivs);
  appendAtoms(os, first, f.primitives, "pr");
  return first ? "1" : os.str();
}

std::string print(const DiffPoly& p) {
  if (p.isZero()) return "0";
  std::ostringstream os;
  bool firstTerm = true;
  for (const auto& [f, c] : p) {
    bool neg = c.sign() < 0;
    if (firstTerm)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    firstTerm = false;
    Rational mag = c.abs();
    bool bare = f == Factors{};
    if (bare)
      os << mag.str();
    else if (mag.isOne())
      os << printFactors(f);
    else
      os << mag.str() << '*' << printFactors(f);
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const DiffPoly& p) { return os << print(p); }

}  // namespace fputlab::sym
