#pragma once

#include <string>
#include <vector>

#include "fputlab/diffpoly.hpp"

namespace fputlab::sym {

// KdV hierarchy fields K1, K3, K5, K7; `which` must be 1, 3, 5 or 7.
const DiffPoly& kdv(int which);

// One bracket identity [x, y] = expected, in expression-grammar text.
struct BracketIdentity {
  int table;  // 1, 2 or 3
  int row;    // 1-based within the table
  const char* x;
  const char* y;
  const char* expected;
};

const std::vector<BracketIdentity>& bracketTables();

struct BracketCheck {
  BracketIdentity identity;
  bool passed;
  std::string computed;  // canonical text of lieBracket(x, y)
};

// Evaluates every table identity (in parallel when OpenMP is enabled).
std::vector<BracketCheck> verifyBracketTables();

struct CommutatorCheck {
  int i, j;
  bool passed;
  std::size_t terms;  // size of [K_i, K_j]; zero when passed
};

std::vector<CommutatorCheck> verifyHierarchy();

}  // namespace fputlab::sym
