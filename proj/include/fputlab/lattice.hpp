#pragma once

// The periodic n-particle chain
//   q_j' = p_j,  p_j' = W'(q_{j+1} - q_j) - W'(q_j - q_{j-1}),  j mod n.

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "fputlab/grid.hpp"
#include "fputlab/potential.hpp"

namespace fputlab::lattice {

struct ChainState {
  std::vector<double> q, p;

  ChainState() = default;
  explicit ChainState(std::size_t n) : q(n, 0.0), p(n, 0.0) {}
  ChainState(std::vector<double> q_, std::vector<double> p_);
  std::size_t n() const { return q.size(); }
};

struct Derivative {
  std::vector<double> dq, dp;
};

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument for n < 2 or non-finite entries.
Derivative rhs(const ChainState& s, const Potential& w);

double energy(const ChainState& s, const Potential& w);
double totalMomentum(const ChainState& s);

enum class Scheme { verlet, rk4 };
const char* schemeName(Scheme s);

struct IntegrateOptions {
  double dt = 1e-3;
  long steps = 0;
  Scheme scheme = Scheme::verlet;
  long stride = 1;             // record every stride-th step (and the last)
  double blowUpNorm = 1e8;     // max |q_j|, |p_j| before aborting
};

struct Sample {
  double t;
  ChainState state;
  double energy;
};

struct Trajectory {
  std::vector<Sample> samples;
  const ChainState& final() const { return samples.back().state; }
};

// Samples at t = 0, every stride steps, and at the end.  Throws BlowUpError
// with the step and norm when the state leaves the allowed region.
Trajectory integrate(const ChainState& s0, const Potential& w, const IntegrateOptions& opt);

// q_j = h u(h j), p_j = h^2 v(h j) with n = 1/h particles.  The grid size must
// be a multiple of n.
ChainState sampleFromProfile(const GridFunction& u, const GridFunction& v, double h);

struct TrajectoryMeta {
  double h = 0;
  Potential potential;
  IntegrateOptions options;
};

// Writes t,j,q,p rows to `csv` and a JSON sidecar next to it (same stem,
// .json) with n, h, potential, scheme, dt and the energy series.
void writeTrajectory(const Trajectory& traj, const TrajectoryMeta& meta, const std::filesystem::path& csv);

}  // namespace fputlab::lattice
