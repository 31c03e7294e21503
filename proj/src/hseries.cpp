#include "fputlab/hseries.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "fputlab/expression.hpp"

namespace fputlab::sym {

namespace {

std::size_t slot(int exponent) {
  if (exponent < 0 || exponent >= HSeries::kTruncation || exponent % 2 != 0)
    throw std::out_of_range("h-series exponent must be one of 0, 2, 4, 6");
  return static_cast<std::size_t>(exponent / 2);
}

}  // namespace

HSeries::HSeries(DiffPoly c0) { c_[0] = std::move(c0); }

HSeries HSeries::monomial(int exponent, DiffPoly c) {
  HSeries s;
  s[exponent] = std::move(c);
  return s;
}

DiffPoly& HSeries::operator[](int exponent) { return c_[slot(exponent)]; }
const DiffPoly& HSeries::operator[](int exponent) const { return c_[slot(exponent)]; }

bool HSeries::isZero() const {
  return std::all_of(c_.begin(), c_.end(), [](const DiffPoly& p) { return p.isZero(); });
}

HSeries HSeries::truncated(int maxExponent) const {
  HSeries s;
  for (int e = 0; e <= std::min(maxExponent, kTruncation - 2); e += 2) s[e] = (*this)[e];
  return s;
}

HSeries& HSeries::operator+=(const HSeries& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
HSeries& HSeries::operator-=(const HSeries& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
HSeries& HSeries::operator*=(const Rational& c) {
  for (auto& p : c_) p *= c;
  return *this;
}
HSeries HSeries::operator-() const {
  HSeries r = *this;
  for (auto& p : r.c_) p = -p;
  return r;
}

HSeries operator*(const HSeries& a, const HSeries& b) {
  HSeries r;
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].isZero()) continue;
    for (std::size_t j = 0; i + j < a.c_.size(); ++j)
      if (!b.c_[j].isZero()) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return r;
}

namespace {

template <class F>
HSeries mapSeries(const HSeries& s, F&& f) {
  HSeries r;
  for (int e = 0; e < HSeries::kTruncation; e += 2) r[e] = f(s[e]);
  return r;
}

}  // namespace

HSeries dx(const HSeries& s) {
  return mapSeries(s, [](const DiffPoly& p) { return dx(p); });
}
HSeries dx(const HSeries& s, int times) {
  return mapSeries(s, [times](const DiffPoly& p) { return dx(p, times); });
}
HSeries average(const HSeries& s) {
  return mapSeries(s, [](const DiffPoly& p) { return average(p); });
}
HSeries antiderivative(const HSeries& s) {
  return mapSeries(s, [](const DiffPoly& p) { return antiderivative(p); });
}
HSeries substitute(const HSeries& s, const std::map<ParamId, Rational>& values) {
  return mapSeries(s, [&](const DiffPoly& p) { return substitute(p, values); });
}

HSeries gateaux(const HSeries& f, const HSeries& g) {
  HSeries r;
  for (int i = 0; i < HSeries::kTruncation; i += 2) {
    if (f[i].isZero()) continue;
    for (int j = 0; i + j < HSeries::kTruncation; j += 2)
      if (!g[j].isZero()) r[i + j] += gateaux(f[i], g[j]);
  }
  return r;
}

HSeries lieBracket(const HSeries& f, const HSeries& g) { return gateaux(f, g) - gateaux(g, f); }

std::string print(const HSeries& s) {
  std::ostringstream os;
  for (int e = 0; e < HSeries::kTruncation; e += 2) os << "h^" << e << ": " << print(s[e]) << '\n';
  return os.str();
}

// ---- BiPoly ------------------------------------------------------------------

BiPoly::BiPoly(DiffPoly uPart) { add({}, uPart); }

BiPoly BiPoly::v(int order) {
  BiPoly p;
  p.add({order}, DiffPoly(1));
  return p;
}

void BiPoly::add(const Orders& vOrders, const DiffPoly& coeff) {
  if (coeff.isZero()) return;
  auto [it, inserted] = t_.try_emplace(vOrders, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.isZero()) t_.erase(it);
  }
}

BiPoly& BiPoly::operator+=(const BiPoly& o) {
  for (const auto& [k, c] : o.t_) add(k, c);
  return *this;
}
BiPoly& BiPoly::operator-=(const BiPoly& o) {
  for (const auto& [k, c] : o.t_) add(k, -c);
  return *this;
}
BiPoly& BiPoly::operator*=(const Rational& c) {
  if (c.isZero()) t_.clear();
  for (auto& [k, v] : t_) v *= c;
  return *this;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  BiPoly r;
  for (const auto& [ka, ca] : a.t_)
    for (const auto& [kb, cb] : b.t_) {
      Orders k;
      std::merge(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(k), std::greater<>());
      r.add(k, ca * cb);
    }
  return r;
}

BiPoly dx(const BiPoly& p) {
  BiPoly r;
  for (const auto& [k, c] : p.terms()) {
    r.add(k, dx(c));
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i > 0 && k[i] == k[i - 1]) continue;
      auto mult = std::count(k.begin(), k.end(), k[i]);
      Orders bumped = k;
      bumped[i] += 1;
      std::sort(bumped.begin(), bumped.end(), std::greater<>());
      r.add(bumped, c * Rational(static_cast<long>(mult)));
    }
  }
  return r;
}

// ---- BiSeries ------------------------------------------------------------------

BiSeries::BiSeries(BiPoly c0) { c_[0] = std::move(c0); }

BiSeries BiSeries::monomial(int exponent, BiPoly c) {
  BiSeries s;
  s[exponent] = std::move(c);
  return s;
}

BiPoly& BiSeries::operator[](int exponent) { return c_[slot(exponent)]; }
const BiPoly& BiSeries::operator[](int exponent) const { return c_[slot(exponent)]; }

BiSeries& BiSeries::operator+=(const BiSeries& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
BiSeries& BiSeries::operator*=(const Rational& c) {
  for (auto& p : c_) p *= c;
  return *this;
}

BiSeries operator*(const BiSeries& a, const BiSeries& b) {
  BiSeries r;
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; i + j < a.c_.size(); ++j)
      if (!a.c_[i].isZero() && !b.c_[j].isZero()) r.c_[i + j] += a.c_[i] * b.c_[j];
  return r;
}

BiSeries dx(const BiSeries& s) {
  BiSeries r;
  for (int e = 0; e < HSeries::kTruncation; e += 2) r[e] = dx(s[e]);
  return r;
}

BiSeries dx(const BiSeries& s, int times) {
  BiSeries r = s;
  for (int i = 0; i < times; ++i) r = dx(r);
  return r;
}

HSeries compose(const BiSeries& f, const HSeries& c) {
  std::vector<HSeries> cd{c};
  auto cDeriv = [&](int k) -> const HSeries& {
    while (static_cast<int>(cd.size()) <= k) cd.push_back(dx(cd.back()));
    return cd[static_cast<std::size_t>(k)];
  };
  HSeries out;
  for (int e = 0; e < HSeries::kTruncation; e += 2) {
    for (const auto& [vOrders, coeff] : f[e].terms()) {
      HSeries term = HSeries::monomial(e, coeff);
      for (int k : vOrders) term = term * cDeriv(k);
      out += term;
    }
  }
  return out;
}

}  // namespace fputlab::sym
