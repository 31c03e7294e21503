#include "fputlab/diffpoly.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <unordered_map>

namespace fputlab::sym {

// ---- parameter registry ------------------------------------------------------

namespace {

struct Registry {
  std::vector<std::string> names;
  std::unordered_map<std::string, ParamId> ids;
  Registry() {
    auto add = [&](std::string n) {
      ids.emplace(n, static_cast<ParamId>(names.size()));
      names.push_back(std::move(n));
    };
    add("alpha");
    add("beta");
    add("gamma");
    for (int i = 1; i <= 4; ++i) add("A" + std::to_string(i));
    for (int i = 1; i <= 20; ++i) add("B" + std::to_string(i));
    for (int i : {1, 3, 5, 7}) add("C" + std::to_string(i));
    for (int i = 1; i <= 4; ++i) add("a" + std::to_string(i));
    for (int i = 1; i <= 13; ++i) add("b" + std::to_string(i));
    for (int i = 1; i <= 7; ++i) add("lam" + std::to_string(i));
  }
};

const Registry& registry() {
  static const Registry r;
  return r;
}

}  // namespace

std::optional<ParamId> findParam(std::string_view name) {
  const auto& r = registry();
  auto it = r.ids.find(std::string(name));
  if (it == r.ids.end()) return std::nullopt;
  return it->second;
}

ParamId paramId(std::string_view name) {
  auto id = findParam(name);
  if (!id) throw SymbolicError("unknown parameter '" + std::string(name) + "'");
  return *id;
}

const std::string& paramName(ParamId id) { return registry().names.at(static_cast<std::size_t>(id)); }

int paramCount() { return static_cast<int>(registry().names.size()); }

// ---- factors -------------------------------------------------------------------

int Factors::degree() const {
  int d = static_cast<int>(derivs.size());
  for (const auto& a : averages) d += static_cast<int>(a.size());
  for (const auto& q : primitives) d += static_cast<int>(q.size());
  return d;
}

bool GradedOrder::operator()(const Factors& a, const Factors& b) const {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  if (a.derivs != b.derivs) return a.derivs < b.derivs;
  if (a.averages != b.averages) return a.averages < b.averages;
  if (a.primitives != b.primitives) return a.primitives < b.primitives;
  return a.params < b.params;
}

namespace {

template <class T, class Cmp = std::less<>>
std::vector<T> mergeSorted(const std::vector<T>& a, const std::vector<T>& b, Cmp cmp = {}) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), cmp);
  return out;
}

template <class T, class Cmp = std::less<>>
void insertSorted(std::vector<T>& v, const T& x, Cmp cmp = {}) {
  v.insert(std::upper_bound(v.begin(), v.end(), x, cmp), x);
}

template <class T>
void eraseOne(std::vector<T>& v, const T& x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

Factors constPart(const Factors& f) {
  Factors k;
  k.params = f.params;
  k.averages = f.averages;
  return k;
}

Factors withDerivs(Factors f, const Orders& d) {
  f.derivs = mergeSorted(f.derivs, d, std::greater<>());
  return f;
}

void sortDesc(Orders& o) { std::sort(o.begin(), o.end(), std::greater<>()); }

}  // namespace

Factors multiply(const Factors& a, const Factors& b) {
  Factors r;
  // Parameters: merge by id, adding exponents.
  auto ia = a.params.begin(), ib = b.params.begin();
  while (ia != a.params.end() || ib != b.params.end()) {
    if (ib == b.params.end() || (ia != a.params.end() && ia->first < ib->first)) {
      r.params.push_back(*ia++);
    } else if (ia == a.params.end() || ib->first < ia->first) {
      r.params.push_back(*ib++);
    } else {
      int e = ia->second + ib->second;
      if (e != 0) r.params.emplace_back(ia->first, e);
      ++ia;
      ++ib;
    }
  }
  r.averages = mergeSorted(a.averages, b.averages);
  r.derivs = mergeSorted(a.derivs, b.derivs, std::greater<>());
  r.primitives = mergeSorted(a.primitives, b.primitives);
  return r;
}

// ---- DiffPoly basics -----------------------------------------------------------

DiffPoly::DiffPoly(const Rational& c) {
  if (!c.isZero()) terms_.emplace(Factors{}, c);
}

DiffPoly DiffPoly::u(int order) {
  if (order < 0) throw SymbolicError("negative derivative order");
  Factors f;
  f.derivs = {order};
  return term(1, std::move(f));
}

DiffPoly DiffPoly::param(ParamId id, int exponent) {
  if (exponent == 0) return DiffPoly(1);
  Factors f;
  f.params = {{id, exponent}};
  return term(1, std::move(f));
}

DiffPoly DiffPoly::param(std::string_view name, int exponent) { return param(paramId(name), exponent); }

DiffPoly DiffPoly::term(const Rational& coeff, Factors f) {
  DiffPoly p;
  p.addTerm(f, coeff);
  return p;
}

DiffPoly DiffPoly::local(Orders orders) {
  sortDesc(orders);
  Factors f;
  f.derivs = std::move(orders);
  return term(1, std::move(f));
}

DiffPoly DiffPoly::averageOf(Orders orders) {
  sortDesc(orders);
  if (orders.empty()) return DiffPoly(1);
  DiffPoly out;
  for (const auto& [atom, c] : reduceLocal(orders).residual) {
    Factors f;
    f.averages = {atom};
    out.addTerm(f, c);
  }
  return out;
}

DiffPoly DiffPoly::primitiveOf(Orders orders) {
  sortDesc(orders);
  if (orders.empty()) return DiffPoly();
  const auto& red = reduceLocal(orders);
  DiffPoly out = red.exact - average(red.exact);
  for (const auto& [atom, c] : red.residual) {
    Factors f;
    f.primitives = {atom};
    out.addTerm(f, c);
  }
  return out;
}

void DiffPoly::addTerm(const Factors& f, const Rational& c) {
  if (c.isZero()) return;
  auto [it, inserted] = terms_.try_emplace(f, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) terms_.erase(it);
  }
}

bool DiffPoly::isConstant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.isConstant(); });
}

std::optional<Rational> DiffPoly::asRational() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first == Factors{}) return terms_.begin()->second;
  return std::nullopt;
}

int DiffPoly::maxOrder() const {
  int m = -1;
  auto scan = [&](const Orders& o) {
    if (!o.empty()) m = std::max(m, o.front());
  };
  for (const auto& [f, c] : terms_) {
    scan(f.derivs);
    for (const auto& a : f.averages) scan(a);
    for (const auto& q : f.primitives) scan(q);
  }
  return m;
}

bool DiffPoly::hasPrimitives() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return !t.first.primitives.empty(); });
}

bool DiffPoly::hasParam(ParamId id) const {
  for (const auto& [f, c] : terms_)
    for (const auto& [pid, e] : f.params)
      if (pid == id) return true;
  return false;
}

Rational DiffPoly::coeff(const Factors& f) const {
  auto it = terms_.find(f);
  return it == terms_.end() ? Rational(0) : it->second;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
  for (const auto& [f, c] : o.terms_) addTerm(f, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
  for (const auto& [f, c] : o.terms_) addTerm(f, -c);
  return *this;
}

DiffPoly& DiffPoly::operator*=(const Rational& c) {
  if (c.isZero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [f, v] : terms_) v *= c;
  return *this;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) {
  *this = *this * o;
  return *this;
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r = *this;
  for (auto& [f, v] : r.terms_) v = -v;
  return r;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  for (const auto& [fa, ca] : a.terms_)
    for (const auto& [fb, cb] : b.terms_) r.addTerm(multiply(fa, fb), ca * cb);
  return r;
}

DiffPoly invert(const DiffPoly& p) {
  if (p.size() != 1) throw SymbolicError("cannot invert a sum of terms");
  const auto& [f, c] = *p.begin();
  if (!f.averages.empty() || !f.derivs.empty() || !f.primitives.empty())
    throw SymbolicError("can only invert a coefficient times parameters");
  Factors g;
  for (const auto& [id, e] : f.params) g.params.emplace_back(id, -e);
  return DiffPoly::term(c.inverse(), g);
}

DiffPoly power(const DiffPoly& p, int exponent) {
  DiffPoly base = exponent < 0 ? invert(p) : p;
  int e = exponent < 0 ? -exponent : exponent;
  DiffPoly result(1);
  while (e) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

// ---- derivatives ---------------------------------------------------------------

DiffPoly dx(const DiffPoly& p) {
  DiffPoly out;
  for (const auto& [f, c] : p) {
    // Local factors: bump one factor of each distinct order.
    for (std::size_t i = 0; i < f.derivs.size(); ++i) {
      if (i > 0 && f.derivs[i] == f.derivs[i - 1]) continue;
      auto mult = std::count(f.derivs.begin(), f.derivs.end(), f.derivs[i]);
      Factors g = f;
      g.derivs[i] += 1;
      sortDesc(g.derivs);
      out.addTerm(g, c * Rational(static_cast<long>(mult)));
    }
    // Primitive factors: dx P(q) = q - <q>.
    for (std::size_t i = 0; i < f.primitives.size(); ++i) {
      if (i > 0 && f.primitives[i] == f.primitives[i - 1]) continue;
      const Orders& q = f.primitives[i];
      auto mult = std::count(f.primitives.begin(), f.primitives.end(), q);
      Factors rest = f;
      eraseOne(rest.primitives, q);
      DiffPoly restPoly = DiffPoly::term(c * Rational(static_cast<long>(mult)), rest);
      out += restPoly * (DiffPoly::local(q) - DiffPoly::averageOf(q));
    }
  }
  return out;
}

DiffPoly dx(const DiffPoly& p, int times) {
  DiffPoly r = p;
  for (int i = 0; i < times; ++i) r = dx(r);
  return r;
}

// ---- integration by parts ----------------------------------------------------------

namespace {

std::mutex& cacheMutex() {
  static std::mutex m;
  return m;
}

std::map<Orders, LocalReduction>& cache() {
  static std::map<Orders, LocalReduction> c;
  return c;
}

LocalReduction computeReduction(const Orders& m) {
  LocalReduction r;
  if (m.empty()) {
    r.residual[m] = 1;
    return r;
  }
  const int k = m[0];
  if (k == 0 || (m.size() >= 2 && m[1] == k)) {
    r.residual[m] = 1;
    return r;
  }
  // m = R' V^p U_{kx} with V = U_{(k-1)x} and R' of order <= k-2:
  // m = dx(R' V^{p+1})/(p+1) - dx(R') V^{p+1}/(p+1).
  Orders rest(m.begin() + 1, m.end());
  const long p = std::count(rest.begin(), rest.end(), k - 1);
  Orders rprime;
  for (int o : rest)
    if (o != k - 1) rprime.push_back(o);
  Orders vpow(static_cast<std::size_t>(p + 1), k - 1);
  const Rational inv(1, p + 1);
  Orders base = rprime;
  base.insert(base.end(), vpow.begin(), vpow.end());
  r.exact = DiffPoly::local(base) * inv;
  if (!rprime.empty()) {
    DiffPoly tail = dx(DiffPoly::local(rprime)) * DiffPoly::local(vpow);
    for (const auto& [f, c] : tail) {
      const LocalReduction& sub = reduceLocal(f.derivs);
      Rational w = c * inv;
      r.exact -= sub.exact * w;
      for (const auto& [atom, rc] : sub.residual) {
        Rational& slot = r.residual[atom];
        slot -= w * rc;
      }
    }
    std::erase_if(r.residual, [](const auto& kv) { return kv.second.isZero(); });
  }
  return r;
}

// Writes C = dx(T) + Res for a primitive-free polynomial C.
void splitExact(const DiffPoly& c, DiffPoly& t, DiffPoly& res) {
  for (const auto& [f, v] : c) {
    if (!f.primitives.empty()) throw NotRepresentable("primitive factor inside a primitive cofactor");
    if (f.derivs.empty()) {
      res.addTerm(f, v);
      continue;
    }
    const LocalReduction& red = reduceLocal(f.derivs);
    Factors k = constPart(f);
    if (!red.exact.isZero()) t += DiffPoly::term(v, k) * red.exact;
    for (const auto& [atom, rc] : red.residual) res.addTerm(withDerivs(k, atom), v * rc);
  }
}

// Groups terms carrying exactly one primitive atom by that atom; returns the
// primitive-free remainder.
DiffPoly groupByPrimitive(const DiffPoly& p, std::map<Orders, DiffPoly>& groups) {
  DiffPoly localPart;
  for (const auto& [f, c] : p) {
    if (f.primitives.empty()) {
      localPart.addTerm(f, c);
    } else if (f.primitives.size() == 1) {
      Factors cof = f;
      cof.primitives.clear();
      groups[f.primitives[0]].addTerm(cof, c);
    } else {
      throw NotRepresentable("product of two primitive factors");
    }
  }
  return localPart;
}

}  // namespace

const LocalReduction& reduceLocal(const Orders& m) {
  {
    std::lock_guard lock(cacheMutex());
    auto it = cache().find(m);
    if (it != cache().end()) return it->second;
  }
  LocalReduction r = computeReduction(m);
  std::lock_guard lock(cacheMutex());
  return cache().emplace(m, std::move(r)).first->second;
}

DiffPoly average(const DiffPoly& p) {
  std::map<Orders, DiffPoly> groups;
  DiffPoly localPart = groupByPrimitive(p, groups);
  DiffPoly out;
  for (const auto& [f, c] : localPart) {
    if (f.derivs.empty()) {
      out.addTerm(f, c);
      continue;
    }
    Factors k = constPart(f);
    for (const auto& [atom, rc] : reduceLocal(f.derivs).residual) {
      Factors g = k;
      insertSorted(g.averages, atom);
      out.addTerm(g, c * rc);
    }
  }
  // <C P(q)> with C = dx(T) + const:  <C P(q)> = -<T (q - <q>)>.
  for (const auto& [q, cof] : groups) {
    DiffPoly t, res;
    splitExact(cof, t, res);
    if (!res.isConstant())
      throw NotRepresentable("average of a primitive times a non-exact factor");
    if (!t.isZero()) out -= average(t * (DiffPoly::local(q) - DiffPoly::averageOf(q)));
  }
  return out;
}

DiffPoly antiderivative(const DiffPoly& p) {
  if (!average(p).isZero()) throw PreconditionError("antiderivative: input has nonzero average");
  std::map<Orders, DiffPoly> groups;
  DiffPoly localPart = groupByPrimitive(p, groups);
  DiffPoly s;
  // Integrate C P(q) by parts: C = dx(T) gives T P(q) - int T (q - <q>).
  for (const auto& [q, cof] : groups) {
    DiffPoly t, res;
    splitExact(cof, t, res);
    if (!res.isZero()) throw NotRepresentable("antiderivative needs a primitive of a primitive");
    Factors pf;
    pf.primitives = {q};
    s += t * DiffPoly::term(1, pf);
    localPart -= t * (DiffPoly::local(q) - DiffPoly::averageOf(q));
  }
  DiffPoly exact, res;
  splitExact(localPart, exact, res);
  s += exact;
  // Non-exact remainder: sum c_i m_i + const, integrated with primitive atoms.
  for (const auto& [f, c] : res) {
    if (f.derivs.empty()) continue;
    Factors g = constPart(f);
    insertSorted(g.primitives, f.derivs);
    s.addTerm(g, c);
  }
  return s - average(s);
}

DiffPoly primitive(const DiffPoly& p) { return antiderivative(p - average(p)); }

DiffPoly gateaux(const DiffPoly& f, const DiffPoly& g) {
  std::vector<DiffPoly> gd{g};
  auto gDeriv = [&](int k) -> const DiffPoly& {
    while (static_cast<int>(gd.size()) <= k) gd.push_back(dx(gd.back()));
    return gd[static_cast<std::size_t>(k)];
  };
  std::map<Orders, DiffPoly> avgDir, primDir;
  auto atomDirection = [&](const Orders& a) -> const DiffPoly& {
    auto it = avgDir.find(a);
    if (it == avgDir.end()) it = avgDir.emplace(a, gateaux(DiffPoly::local(a), g)).first;
    return it->second;
  };
  DiffPoly out;
  for (const auto& [fac, c] : f) {
    for (std::size_t i = 0; i < fac.derivs.size(); ++i) {
      if (i > 0 && fac.derivs[i] == fac.derivs[i - 1]) continue;
      int k = fac.derivs[i];
      auto mult = std::count(fac.derivs.begin(), fac.derivs.end(), k);
      Factors rest = fac;
      eraseOne(rest.derivs, k);
      out += DiffPoly::term(c * Rational(static_cast<long>(mult)), rest) * gDeriv(k);
    }
    for (std::size_t i = 0; i < fac.averages.size(); ++i) {
      if (i > 0 && fac.averages[i] == fac.averages[i - 1]) continue;
      const Orders& a = fac.averages[i];
      auto mult = std::count(fac.averages.begin(), fac.averages.end(), a);
      Factors rest = fac;
      eraseOne(rest.averages, a);
      out += DiffPoly::term(c * Rational(static_cast<long>(mult)), rest) * average(atomDirection(a));
    }
    for (std::size_t i = 0; i < fac.primitives.size(); ++i) {
      if (i > 0 && fac.primitives[i] == fac.primitives[i - 1]) continue;
      const Orders& q = fac.primitives[i];
      auto mult = std::count(fac.primitives.begin(), fac.primitives.end(), q);
      Factors rest = fac;
      eraseOne(rest.primitives, q);
      auto it = primDir.find(q);
      if (it == primDir.end()) it = primDir.emplace(q, primitive(atomDirection(q))).first;
      out += DiffPoly::term(c * Rational(static_cast<long>(mult)), rest) * it->second;
    }
  }
  return out;
}

DiffPoly lieBracket(const DiffPoly& f, const DiffPoly& g) { return gateaux(f, g) - gateaux(g, f); }

DiffPoly canonicalize(const DiffPoly& p) {
  DiffPoly out;
  for (const auto& [f, c] : p) {
    Factors k;
    k.params = f.params;
    DiffPoly t = DiffPoly::term(c, k) * DiffPoly::local(f.derivs);
    for (const auto& a : f.averages) t *= DiffPoly::averageOf(a);
    for (const auto& q : f.primitives) t *= DiffPoly::primitiveOf(q);
    out += t;
  }
  return out;
}

DiffPoly substitute(const DiffPoly& p, const std::map<ParamId, Rational>& values) {
  DiffPoly out;
  for (const auto& [f, c] : p) {
    Rational coeff = c;
    Factors g = f;
    g.params.clear();
    for (const auto& [id, e] : f.params) {
      auto it = values.find(id);
      if (it == values.end())
        g.params.emplace_back(id, e);
      else
        coeff *= pow(it->second, e);
    }
    out.addTerm(g, coeff);
  }
  return out;
}

}  // namespace fputlab::sym
