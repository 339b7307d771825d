#include "mflab/nbody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dopri5_step.hpp"
#include "mflab/errors.hpp"
#include "mflab/kernel.hpp"
#include "mflab/parallel.hpp"
#include "mflab/vecops.hpp"

namespace mflab {
namespace nbody {

namespace {

constexpr int kMaxDim = 16;

void pair_displacement(const ParticleConfig& s, std::size_t i, std::size_t j,
                       std::span<double> diff, double& r2) {
  auto xi = s.position(i);
  auto xj = s.position(j);
  r2 = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    diff[k] = xi[k] - xj[k];
    r2 += diff[k] * diff[k];
  }
}

}  // namespace

std::vector<double> velocity(const ParticleConfig& state, const RotationMatrix& J) {
  const int d = state.dim();
  const std::size_t n = state.size();
  const double cd = kernel::coulomb_constant(state.dim());
  std::vector<double> v(n * d, 0.0);

  parallel_for(n, [&](std::size_t b, std::size_t e) {
    double diff[kMaxDim], jd[kMaxDim];
    for (std::size_t i = b; i < e; ++i) {
      KahanSum acc[kMaxDim];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double r2;
        pair_displacement(state, i, j, std::span<double>(diff, d), r2);
        if (r2 <= 0.0)
          throw SingularityError(std::min(i, j), std::max(i, j),
                                 "velocity: coincident particles");
        double c = -cd * (d - 2) * std::pow(r2, -0.5 * d);  // grad g prefactor
        J.apply(std::span<const double>(diff, d), std::span<double>(jd, d));
        double aj = state.intensity(j);
        for (int k = 0; k < d; ++k) acc[k].add(aj * c * jd[k]);
      }
      for (int k = 0; k < d; ++k) v[i * d + k] = acc[k].value();
    }
  });
  return v;
}

double hamiltonian(const ParticleConfig& state) {
  const int d = state.dim();
  const std::size_t n = state.size();
  const double cd = kernel::coulomb_constant(state.dim());
  // Row i sums over j > i; the ordered-pair double count cancels the 1/2.
  return parallel_reduce(n, [&](std::size_t i) {
    double diff[kMaxDim];
    KahanSum row;
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2;
      pair_displacement(state, i, j, std::span<double>(diff, d), r2);
      if (r2 <= 0.0) throw SingularityError(i, j, "hamiltonian: coincident particles");
      row.add(state.intensity(i) * state.intensity(j) * cd *
              std::pow(r2, 0.5 * (2.0 - d)));
    }
    return row.value();
  });
}

double min_separation(const ParticleConfig& state) {
  const std::size_t n = state.size();
  if (n < 2) throw std::invalid_argument("min_separation: needs at least two particles");
  const int d = state.dim();
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    double diff[kMaxDim];
    for (std::size_t i = b; i < e; ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t j = i + 1; j < n; ++j) {
        double r2;
        pair_displacement(state, i, j, std::span<double>(diff, d), r2);
        m = std::min(m, r2);
      }
      row_min[i] = m;
    }
  });
  double m = std::numeric_limits<double>::infinity();
  for (double r : row_min) m = std::min(m, r);
  return std::sqrt(m);
}

double Trajectory::separation_floor_coefficient(std::size_t k) const {
  double sup_h = 0.0;
  for (std::size_t s = 0; s <= k; ++s) sup_h = std::max(sup_h, hamiltonians[s]);
  double n = static_cast<double>(states[k].size());
  int d = states[k].dim();
  return min_separations[k] * std::pow(n * n * sup_h, 1.0 / (d - 2));
}

Trajectory integrate(const ParticleConfig& initial, const RotationMatrix& J,
                     double t_end, const StepControls& controls, std::size_t samples) {
  if (t_end < 0.0) throw std::invalid_argument("integrate: t_end must be >= 0");
  if (J.dim() != initial.dim().d)
    throw std::invalid_argument("integrate: rotation/configuration dim mismatch");
  initial.check_distinct();

  const std::size_t n = initial.size();
  const int d = initial.dim();
  const double h0 = (n >= 2) ? hamiltonian(initial) : 0.0;

  Trajectory traj;
  auto record = [&](double t, const ParticleConfig& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.hamiltonians.push_back(n >= 2 ? hamiltonian(s) : 0.0);
    traj.min_separations.push_back(n >= 2 ? min_separation(s)
                                          : std::numeric_limits<double>::infinity());
  };
  record(0.0, initial);
  if (t_end == 0.0) return traj;
  if (samples == 0) samples = 1;

  ParticleConfig work = initial;
  auto rhs = [&](const std::vector<double>& pos, std::vector<double>& out) {
    work = work.with_positions(pos);
    out = velocity(work, J);
  };

  std::vector<double> y = initial.positions();
  std::vector<double> k1(y.size()), k7(y.size()), ynew(y.size());
  rhs(y, k1);
  detail::Dopri5Work wk;

  double t = 0.0;
  double dt_prop = std::min(controls.dt_init, controls.dt_max);
  std::size_t next_sample = 1;
  std::size_t steps = 0;

  auto monitor = [&](double tnow, const ParticleConfig& s) {
    if (n < 2) return;
    double h = hamiltonian(s);
    double drift = std::abs(h - h0) / std::max(std::abs(h0), 1e-300);
    if (drift > controls.energy_tol) {
      std::ostringstream msg;
      msg << "integrate: energy drift " << drift << " exceeds tolerance "
          << controls.energy_tol << " at t = " << tnow;
      throw RuntimeAbort(msg.str());
    }
    double ms = min_separation(s);
    if (ms < controls.collision_floor) {
      std::ostringstream msg;
      msg << "integrate: min separation " << ms << " fell below collision floor "
          << controls.collision_floor << " at t = " << tnow;
      throw RuntimeAbort(msg.str());
    }
  };

  while (t < t_end && next_sample <= samples) {
    if (++steps > controls.max_steps)
      throw RuntimeAbort("integrate: step budget exhausted");

    double target = (static_cast<double>(next_sample) / samples) * t_end;
    // Separation-aware cap: the field stiffens like minsep^{1-d}, so the
    // step shrinks polynomially as particles approach.
    double ms = (n >= 2) ? min_separation(work.with_positions(y)) : 1.0;
    double cap = controls.minsep_dt_coef * std::pow(ms, d - 1.0);
    double dt = std::min({dt_prop, controls.dt_max, cap});
    bool clipped = false;
    if (t + dt >= target) {
      dt = target - t;
      clipped = true;
    }
    if (dt < controls.dt_min)
      throw RuntimeAbort("integrate: step size collapsed below dt_min");

    double err = detail::dopri5_step(rhs, y, k1, dt, controls.rel_tol, controls.abs_tol,
                                     ynew, k7, wk);
    if (err <= 1.0) {
      t += dt;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
      ParticleConfig s = work.with_positions(y);
      monitor(t, s);
      if (clipped) {
        record(t, s);
        ++next_sample;
      }
    }
    double grow = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    if (err <= 1.0 && clipped) {
      // keep the pre-clip proposal; the sliver says nothing about the scale
      dt_prop = std::max(dt_prop, dt * grow);
    } else {
      dt_prop = dt * grow;
    }
  }
  return traj;
}

ParticleConfig advance(const ParticleConfig& state, const RotationMatrix& J, double dt,
                       const StepControls& controls) {
  Trajectory t = integrate(state, J, dt, controls, 1);
  return t.states.back();
}

}  // namespace nbody
}  // namespace mflab
