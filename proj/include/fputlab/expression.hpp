#pragma once

// Text form of differential polynomials.
//
//   expr    := ['+'|'-'] term { ('+'|'-') term }
//   term    := power { '*' power | '/' power }
//   power   := primary [ '^' ['-'] integer ]
//   primary := integer | 'u' | 'u_x' | 'u_<k>x' | parameter
//            | 'av(' expr ')' | 'pr(' expr ')' | '(' expr ')'
//
// av(e) is the spatial average, pr(e) the zero-mean primitive of e - av(e).
// Division and negative powers are only allowed for invertible constants
// (a number times parameters).  Whitespace is ignored.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fputlab/diffpoly.hpp"

namespace fputlab::sym {

class ParseError : public SymbolicError {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

DiffPoly parse(std::string_view text);
std::string print(const DiffPoly& p);
std::string printFactors(const Factors& f);  // without coefficient; "1" if empty
std::ostream& operator<<(std::ostream& os, const DiffPoly& p);

}  // namespace fputlab::sym
