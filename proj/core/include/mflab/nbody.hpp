#pragma once

#include <cstddef>
#include <vector>

#include "mflab/particles.hpp"
#include "mflab/rotation.hpp"

namespace mflab {
namespace nbody {

/// Right-hand side of the conservative system:
///   v_i = sum_{j != i} a_j (J grad g)(x_i - x_j).
/// Direct O(N^2) summation; each target row is accumulated in ascending
/// source order with compensated summation, and rows are distributed over
/// threads, so the result is bit-identical for any thread count.
/// Throws SingularityError (with the pair) on coincident particles.
std::vector<double> velocity(const ParticleConfig& state, const RotationMatrix& J);

/// H = (1/2) sum_{i != j} a_i a_j g(x_i - x_j). Strictly positive for
/// identically-signed intensities. Deterministic chunked pair reduction.
double hamiltonian(const ParticleConfig& state);

/// Minimum pairwise distance; requires N >= 2.
double min_separation(const ParticleConfig& state);

/// Step-size and safety controls for `integrate`.
struct StepControls {
  double rel_tol = 1e-10;        // embedded-pair error control
  double abs_tol = 1e-12;
  double energy_tol = 1e-6;      // abort when |H - H0|/|H0| exceeds this
  double collision_floor = 1e-9; // abort when min separation falls below
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double minsep_dt_coef = 1.0;   // extra cap dt <= coef * minsep^{d-1}
  std::size_t max_steps = 10'000'000;
};

/// Recorded time series of a run. One state per sample time; the
/// Hamiltonian series is constant up to the integrator's conservation
/// tolerance; the separation series never touches the collision floor.
struct Trajectory {
  std::vector<double> times;
  std::vector<ParticleConfig> states;
  std::vector<double> hamiltonians;
  std::vector<double> min_separations;

  std::size_t size() const { return times.size(); }

  /// Fitted prefactor of the conservation-derived separation floor,
  /// minsep(t) * (N^2 sup H)^{1/(d-2)}, at sample k. Energy positivity
  /// forces this to stay >= c_d^{1/(d-2)}; dropping below that hard bound
  /// signals a numerical failure, not physics.
  double separation_floor_coefficient(std::size_t k) const;
};

/// Integrate with an adaptive embedded Dormand-Prince 5(4) pair, recording
/// `samples + 1` states at uniform times over [0, t_end] (including both
/// endpoints). Aborts (RuntimeAbort) if the energy monitor or collision
/// floor trips. t_end = 0 returns the initial state only.
Trajectory integrate(const ParticleConfig& initial, const RotationMatrix& J,
                     double t_end, const StepControls& controls = {},
                     std::size_t samples = 32);

/// Single-state advance by `dt` (same controls, no sampling). Used by the
/// finite-difference diagnostics.
ParticleConfig advance(const ParticleConfig& state, const RotationMatrix& J,
                       double dt, const StepControls& controls = {});

}  // namespace nbody
}  // namespace mflab
