#include "doctest.h"
#include "sym_helpers.hpp"

using namespace fputlab::sym;
using testing_sym::P;

TEST_CASE("parse and print round trip") {
  DiffPoly k3 = P("u_3x + 6*u*u_x");
  CHECK(k3.size() == 2);
  CHECK(print(k3) == "u_3x + 6*u*u_x");
  CHECK(P("0").isZero());
  CHECK(print(DiffPoly()) == "0");
  CHECK(print(P("6*av(u^2)*u_x")) == "6*av(u^2)*u_x");
  CHECK(print(P("1/24*u_3x")) == "1/24*u_3x");
  CHECK(print(P("-u")) == "-u");
  CHECK(print(P("u_1x")) == "u_x");
  CHECK(print(P("180*beta/alpha^2 - 130")) == "-130 + 180*alpha^-2*beta");
  for (const char* s : {"u_7x + 420*u_2x*u_3x - 1/2*av(u_x^3)", "av(u)^2*u_x*pr(u^2)", "lam3*B12*u_x^3"}) {
    DiffPoly p = P(s);
    CHECK(P(print(p).c_str()) == p);
  }
}

TEST_CASE("parse arithmetic") {
  CHECK(P("(u + 1)^2") == P("u^2 + 2*u + 1"));
  CHECK(P("u_x/2") == P("1/2*u_x"));
  CHECK(P("  u *  u_x ") == P("u*u_x"));
  CHECK(P("alpha^-1*alpha") == P("1"));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(P("u_-1x"), ParseError);
  try {
    P("u + * u");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(P("u^-1"), ParseError);
  CHECK_THROWS_AS(P("u/u"), ParseError);
  CHECK_THROWS_AS(P("1/0"), ParseError);
  CHECK_THROWS_AS(P("foo"), ParseError);
  CHECK_THROWS_AS(P("(u"), ParseError);
  CHECK_THROWS_AS(P("u_3"), ParseError);
}
