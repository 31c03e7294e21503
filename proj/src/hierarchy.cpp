#include "fputlab/hierarchy.hpp"

#include <array>
#include <stdexcept>

#include "fputlab/expression.hpp"

namespace fputlab::sym {

const DiffPoly& kdv(int which) {
  static const std::array<DiffPoly, 4> fields = {
      parse("u_x"),
      parse("u_3x + 6*u*u_x"),
      parse("u_5x + 20*u_x*u_2x + 10*u*u_3x + 30*u^2*u_x"),
      parse("u_7x + 70*u_2x*u_3x + 42*u_x*u_4x + 14*u*u_5x + 70*u_x^3 + 280*u*u_x*u_2x + 70*u^2*u_3x + "
            "140*u^3*u_x"),
  };
  switch (which) {
    case 1: return fields[0];
    case 3: return fields[1];
    case 5: return fields[2];
    case 7: return fields[3];
    default: throw std::invalid_argument("KdV field index must be 1, 3, 5 or 7");
  }
}

namespace {

constexpr const char* K3 = "u_3x + 6*u*u_x";
constexpr const char* X1 = "u_2x";
constexpr const char* X2 = "u^2 - av(u^2)";
constexpr const char* X3 = "u_x*pr(u) + av(u^2) - av(u)^2";
constexpr const char* X4 = "av(u)*(u - av(u))";
constexpr const char* Y1 = "u_5x";
constexpr const char* Y2 = "u_x*u_2x";
constexpr const char* Y3 = "u*u_3x";
constexpr const char* Y4 = "u^2*u_x";
constexpr const char* Y5 = "av(u^2)*u_x";
constexpr const char* Y6 = "av(u)^2*u_x";
constexpr const char* Y7 = "av(u)*(u_3x + 6*u*u_x)";

}  // namespace

const std::vector<BracketIdentity>& bracketTables() {
  static const std::vector<BracketIdentity> rows = {
      // Generators of the first normalisation step against K3.
      {1, 1, X1, K3, "12*u_x*u_2x"},
      {1, 2, X2, K3, "-6*u_x*u_2x - 6*u^2*u_x + 6*av(u^2)*u_x"},
      {1, 3, X3, K3,
       "-3*u_x*u_2x - 3*u*u_3x - 3*u^2*u_x - 9*av(u^2)*u_x + 6*av(u)^2*u_x + 6*av(u)*u*u_x + 3*av(u)*u_3x"},
      {1, 4, X4, K3, "-6*av(u)*u*u_x + 6*av(u)^2*u_x"},

      // First-step generators against the pieces of F5 + N5.
      {2, 1, X1, Y1, "0"},
      {2, 2, X1, Y2, "2*u_2x*u_3x"},
      {2, 3, X1, Y3, "2*u_x*u_4x"},
      {2, 4, X1, Y4, "2*u_x^3 + 4*u*u_x*u_2x"},
      {2, 5, X1, Y5, "2*av(u_x^2)*u_x"},
      {2, 6, X1, Y6, "0"},
      {2, 7, X1, Y7, "12*av(u)*u_x*u_2x"},
      {2, 8, X2, Y1, "-20*u_2x*u_3x - 10*u_x*u_4x"},
      {2, 9, X2, Y2, "-2*u_x^3 - 2*u*u_x*u_2x + av(u_x^3)"},
      {2, 10, X2, Y3, "-6*u*u_x*u_2x - u^2*u_3x - 2*av(u_x^3) + av(u^2)*u_3x"},
      {2, 11, X2, Y4, "-2*u^3*u_x + 2*av(u^2)*u*u_x"},
      {2, 12, X2, Y5, "-2*av(u^3)*u_x + 2*av(u)*av(u^2)*u_x"},
      {2, 13, X2, Y6, "0"},
      {2, 14, X2, Y7, "-6*av(u)*u_x*u_2x - 6*av(u)*u^2*u_x + 6*av(u)*av(u^2)*u_x"},
      {2, 15, X3, Y1, "-15*u_2x*u_3x - 10*u_x*u_4x - 5*u*u_5x + 5*av(u)*u_5x"},
      {2, 16, X3, Y2, "-1/2*u_x^3 - 3*u*u_x*u_2x - 1/2*av(u_x^2)*u_x - av(u_x^3) + 3*av(u)*u_x*u_2x"},
      {2, 17, X3, Y3,
       "-1/2*u_x^3 - 3*u*u_x*u_2x - 3*u^2*u_3x + 3/2*av(u_x^2)*u_x + 2*av(u_x^3) - av(u^2)*u_3x + "
       "av(u)^2*u_3x + 3*av(u)*u*u_3x"},
      {2, 18, X3, Y4,
       "-2/3*u^3*u_x - 1/3*av(u^3)*u_x - 2*av(u^2)*u*u_x + 2*av(u)^2*u*u_x + av(u)*u^2*u_x"},
      {2, 19, X3, Y5, "av(u^3)*u_x - 3*av(u)*av(u^2)*u_x + 2*av(u)^3*u_x"},
      {2, 20, X3, Y6, "0"},
      {2, 21, X3, Y7,
       "-3*av(u)*u_x*u_2x - 3*av(u)*u*u_3x - 3*av(u)*u^2*u_x + 3*av(u)^2*u_3x + 6*av(u)^2*u*u_x + "
       "6*av(u)^3*u_x - 9*av(u)*av(u^2)*u_x"},
      {2, 22, X4, Y1, "0"},
      {2, 23, X4, Y2, "-av(u)*u_x*u_2x"},
      {2, 24, X4, Y3, "av(u)^2*u_3x - av(u)*u*u_3x"},
      {2, 25, X4, Y4, "2*av(u)^2*u*u_x - 2*av(u)*u^2*u_x"},
      {2, 26, X4, Y5, "2*av(u)^3*u_x - 2*av(u)*av(u^2)*u_x"},
      {2, 27, X4, Y6, "0"},
      {2, 28, X4, Y7, "6*av(u)^3*u_x - 6*av(u)^2*u*u_x"},

      // Second-step generator pieces against K3.
      {3, 1, "u_4x", K3, "60*u_2x*u_3x + 24*u_x*u_4x"},
      {3, 2, "u_x^2 - av(u_x^2)", K3, "-6*u_2x*u_3x + 6*u_x^3 - 6*av(u_x^3) + 6*av(u_x^2)*u_x"},
      {3, 3, "u*u_2x + av(u_x^2)", K3,
       "-3*u_2x*u_3x - 3*u_x*u_4x + 12*u*u_x*u_2x + 6*av(u_x^3) - 6*av(u_x^2)*u_x"},
      {3, 4, "u^3 - av(u^3)", K3, "-6*u_x^3 - 18*u*u_x*u_2x - 6*u^3*u_x - 3*av(u_x^3) + 6*av(u^3)*u_x"},
      {3, 5, "u_x*pr(u^2) + av(u^3) - av(u)*av(u^2)", K3,
       "-3*u_x^3 - 6*u*u_x*u_2x - 3*u^2*u_3x - 2*u^3*u_x + 3*av(u^2)*u_3x + 3*av(u_x^2)*u_x + "
       "6*av(u^2)*u*u_x - 10*av(u^3)*u_x + 3*av(u_x^3) + 6*av(u)*av(u^2)*u_x"},
      {3, 6, "(u_3x + 6*u*u_x)*pr(u) + 3*av(u^3) - av(u_x^2) - 3*av(u^2)*av(u)", K3,
       "-3*u_x*u_4x - 3*u*u_5x - 18*u_x^3 - 72*u*u_x*u_2x - 21*u^2*u_3x - 18*u^3*u_x - 3*av(u^2)*u_3x + "
       "6*av(u_x^2)*u_x + 3*av(u_x^3) - 18*av(u^3)*u_x - 18*av(u^2)*u*u_x + 18*av(u)*av(u^2)*u_x + "
       "3*av(u)*(u_5x + 18*u_x*u_2x + 8*u*u_3x + 12*u^2*u_x)"},
      {3, 7, "av(u)*u_2x", K3, "12*av(u)*u_x*u_2x"},
      {3, 8, "av(u)*(u^2 - av(u^2))", K3, "-6*av(u)*u_x*u_2x - 6*av(u)*u^2*u_x + 6*av(u)*av(u^2)*u_x"},
      {3, 9, "av(u)*(u_x*pr(u) + av(u^2) - av(u)^2)", K3,
       "-3*av(u)*u_x*u_2x - 3*av(u)*u*u_3x - 3*av(u)*u^2*u_x - 9*av(u)*av(u^2)*u_x + 6*av(u)^3*u_x + "
       "6*av(u)^2*u*u_x + 3*av(u)^2*u_3x"},
      {3, 10, "av(u)^2*(u - av(u))", K3, "-6*av(u)^2*u*u_x + 6*av(u)^3*u_x"},
      {3, 11, "av(u^2)*(u - av(u))", K3, "6*av(u^2)*av(u)*u_x - 6*av(u^2)*u*u_x"},
      {3, 12, "av(u_x^2)", K3, "-6*av(u_x^2)*u_x + 6*av(u_x^3)"},
      {3, 13, "av(u^3)", K3, "-6*av(u^3)*u_x + 3*av(u_x^3)"},
  };
  return rows;
}

std::vector<BracketCheck> verifyBracketTables() {
  const auto& rows = bracketTables();
  std::vector<BracketCheck> out(rows.size());
  const long n = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    DiffPoly got = lieBracket(parse(r.x), parse(r.y));
    out[static_cast<std::size_t>(i)] = {r, got == parse(r.expected), print(got)};
  }
  return out;
}

std::vector<CommutatorCheck> verifyHierarchy() {
  std::vector<std::pair<int, int>> pairs;
  for (int i : {1, 3, 5, 7})
    for (int j : {1, 3, 5, 7})
      if (i <= j) pairs.emplace_back(i, j);
  for (int k : {1, 3, 5, 7}) kdv(k);  // build the statics before going parallel
  std::vector<CommutatorCheck> out(pairs.size());
  const long n = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < n; ++idx) {
    auto [i, j] = pairs[static_cast<std::size_t>(idx)];
    DiffPoly b = lieBracket(kdv(i), kdv(j));
    out[static_cast<std::size_t>(idx)] = {i, j, b.isZero(), b.size()};
  }
  return out;
}

}  // namespace fputlab::sym
