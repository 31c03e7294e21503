#include "fputlab/lattice.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fputlab/kernels.hpp"

namespace fputlab::lattice {

ChainState::ChainState(std::vector<double> q_, std::vector<double> p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size()) throw std::invalid_argument("ChainState: q and p differ in length");
}

namespace {

void requireValid(const ChainState& s) {
  if (s.n() < 2) throw std::invalid_argument("chain needs at least 2 particles");
  if (s.p.size() != s.n()) throw std::invalid_argument("ChainState: q and p differ in length");
  for (std::size_t j = 0; j < s.n(); ++j)
    if (!std::isfinite(s.q[j]) || !std::isfinite(s.p[j]))
      throw std::invalid_argument("non-finite chain state at particle " + std::to_string(j));
}

double stateNorm(const ChainState& s) {
  return std::max(kernels::maxAbs(s.q.data(), s.n()), kernels::maxAbs(s.p.data(), s.n()));
}

void force(const ChainState& s, const Potential& w, std::vector<double>& dp) {
  dp.resize(s.n());
  kernels::latticeForce(w, s.q.data(), dp.data(), s.n());
}

void verletStep(ChainState& s, const Potential& w, double dt, std::vector<double>& f) {
  const std::size_t n = s.n();
  kernels::axpy(dt / 2, f.data(), s.p.data(), n);
  kernels::axpy(dt, s.p.data(), s.q.data(), n);
  force(s, w, f);
  kernels::axpy(dt / 2, f.data(), s.p.data(), n);
}

void rk4Step(ChainState& s, const Potential& w, double dt) {
  const std::size_t n = s.n();
  auto stage = [&](const ChainState& base, const Derivative* d, double c) {
    ChainState t = base;
    if (d) {
      kernels::axpy(c, d->dq.data(), t.q.data(), n);
      kernels::axpy(c, d->dp.data(), t.p.data(), n);
    }
    return rhs(t, w);
  };
  const Derivative k1 = stage(s, nullptr, 0);
  const Derivative k2 = stage(s, &k1, dt / 2);
  const Derivative k3 = stage(s, &k2, dt / 2);
  const Derivative k4 = stage(s, &k3, dt);
  for (std::size_t j = 0; j < n; ++j) {
    s.q[j] += dt / 6 * (k1.dq[j] + 2 * k2.dq[j] + 2 * k3.dq[j] + k4.dq[j]);
    s.p[j] += dt / 6 * (k1.dp[j] + 2 * k2.dp[j] + 2 * k3.dp[j] + k4.dp[j]);
  }
}

}  // namespace

Derivative rhs(const ChainState& s, const Potential& w) {
  requireValid(s);
  Derivative d{s.p, {}};
  force(s, w, d.dp);
  return d;
}

double energy(const ChainState& s, const Potential& w) {
  const std::size_t n = s.n();
  double e = 0;
  for (std::size_t j = 0; j < n; ++j) e += s.p[j] * s.p[j] / 2 + w.W(s.q[(j + 1) % n] - s.q[j]);
  return e;
}

double totalMomentum(const ChainState& s) { return kernels::sum(s.p.data(), s.p.size()); }

const char* schemeName(Scheme s) { return s == Scheme::verlet ? "verlet" : "rk4"; }

Trajectory integrate(const ChainState& s0, const Potential& w, const IntegrateOptions& opt) {
  if (!(opt.dt > 0)) throw std::invalid_argument("integrate: dt must be positive");
  if (opt.steps < 0 || opt.stride < 1) throw std::invalid_argument("integrate: bad steps or stride");
  requireValid(s0);

  Trajectory traj;
  ChainState s = s0;
  traj.samples.push_back({0.0, s, energy(s, w)});
  std::vector<double> f;
  if (opt.scheme == Scheme::verlet) force(s, w, f);
  for (long step = 1; step <= opt.steps; ++step) {
    if (opt.scheme == Scheme::verlet)
      verletStep(s, w, opt.dt, f);
    else
      rk4Step(s, w, opt.dt);
    const double norm = stateNorm(s);
    if (!std::isfinite(norm) || norm > opt.blowUpNorm) {
      std::ostringstream os;
      os << "lattice blow-up at step " << step << " (t = " << step * opt.dt << "): max |q|,|p| = " << norm;
      throw BlowUpError(os.str());
    }
    if (step % opt.stride == 0 || step == opt.steps) traj.samples.push_back({step * opt.dt, s, energy(s, w)});
  }
  return traj;
}

ChainState sampleFromProfile(const GridFunction& u, const GridFunction& v, double h) {
  if (!(h > 0)) throw std::invalid_argument("sampleFromProfile: h must be positive");
  const double nReal = 1 / h;
  const auto n = static_cast<std::size_t>(std::llround(nReal));
  if (n < 2 || std::abs(nReal - double(n)) > 1e-9 * nReal)
    throw std::invalid_argument("sampleFromProfile: 1/h must be an integer >= 2");
  if (u.size() != v.size() || u.size() % n != 0)
    throw std::invalid_argument("sampleFromProfile: grid size must be a multiple of 1/h");
  const std::size_t stride = u.size() / n;
  ChainState s(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.q[j] = h * u[j * stride];
    s.p[j] = h * h * v[j * stride];
  }
  return s;
}

void writeTrajectory(const Trajectory& traj, const TrajectoryMeta& meta, const std::filesystem::path& csv) {
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out.precision(17);
  out << "t,j,q,p\n";
  for (const auto& smp : traj.samples)
    for (std::size_t j = 0; j < smp.state.n(); ++j)
      out << smp.t << ',' << j << ',' << smp.state.q[j] << ',' << smp.state.p[j] << '\n';
  if (!out) throw std::runtime_error("write failed: " + csv.string());

  nlohmann::json side;
  side["n"] = traj.samples.empty() ? 0 : traj.samples.front().state.n();
  side["h"] = meta.h;
  side["potential"] = {{"kind", meta.potential.kind == Potential::Kind::toda ? "toda" : "polynomial"},
                       {"alpha", meta.potential.alpha},
                       {"beta", meta.potential.beta},
                       {"gamma", meta.potential.gamma}};
  side["scheme"] = schemeName(meta.options.scheme);
  side["dt"] = meta.options.dt;
  side["stride"] = meta.options.stride;
  auto& es = side["energy"] = nlohmann::json::array();
  for (const auto& smp : traj.samples) es.push_back({{"t", smp.t}, {"E", smp.energy}});
  auto sidecar = csv;
  sidecar.replace_extension(".json");
  std::ofstream js(sidecar);
  if (!js) throw std::runtime_error("cannot write " + sidecar.string());
  js << side.dump(2) << '\n';
}

}  // namespace fputlab::lattice
