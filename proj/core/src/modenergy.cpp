#include "mflab/modenergy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mflab/errors.hpp"
#include "mflab/kernel.hpp"
#include "mflab/parallel.hpp"
#include "mflab/vecops.hpp"

namespace mflab {
namespace modenergy {

namespace {

constexpr int kMaxDim = 16;

void require_mean_field(const ParticleConfig& state, const char* who) {
  if (!state.is_mean_field())
    throw std::invalid_argument(std::string(who) +
                                ": requires mean-field intensities a_i = 1/N");
}

double nearest_neighbor_distance(const ParticleConfig& state, std::size_t i) {
  double best = std::numeric_limits<double>::infinity();
  auto xi = state.position(i);
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == i) continue;
    auto xj = state.position(j);
    double r2 = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
      double dk = xi[k] - xj[k];
      r2 += dk * dk;
    }
    best = std::min(best, r2);
  }
  return std::sqrt(best);
}

}  // namespace

TruncationVector TruncationVector::uniform(const ParticleConfig& state, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("TruncationVector: eta must be positive");
  TruncationVector t;
  t.eta.assign(state.size(), eta);
  return t;
}

TruncationVector TruncationVector::r_mode(const ParticleConfig& state, double eps1) {
  if (!(eps1 > 0.0))
    throw std::invalid_argument("TruncationVector: eps1 must be positive");
  TruncationVector t;
  t.eta.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    t.eta[i] = std::min(0.25 * nearest_neighbor_distance(state, i), eps1);
  return t;
}

double TruncationVector::max_eta() const {
  double m = 0.0;
  for (double e : eta) m = std::max(m, e);
  return m;
}

Evaluator::Evaluator(meanfield::ReferenceDensity omega)
    : omega_(std::move(omega)), h_d_(meanfield::mf_energy(omega_)) {}

ModulatedEnergyReport Evaluator::direct(const ParticleConfig& state) const {
  require_mean_field(state, "modulated_energy_direct");
  const int d = state.dim();
  const std::size_t n = state.size();
  const double cd = kernel::coulomb_constant(state.dim());

  // Ordered pair sum as 2x the i<j reduction (deterministic chunks).
  double pair = 2.0 * parallel_reduce(n, [&](std::size_t i) {
    double diff[kMaxDim];
    auto xi = state.position(i);
    KahanSum row;
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = state.position(j);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        diff[k] = xi[k] - xj[k];
        r2 += diff[k] * diff[k];
      }
      if (r2 <= 0.0)
        throw SingularityError(i, j, "modulated_energy_direct: coincident particles");
      row.add(cd * std::pow(r2, 0.5 * (2.0 - d)));
    }
    return row.value();
  });

  double cross = -2.0 * static_cast<double>(n) *
                 parallel_reduce(n, [&](std::size_t i) {
                   return omega_.potential(state.position(i));
                 });

  ModulatedEnergyReport r;
  r.method = "direct";
  r.pair_sum = pair;
  r.mf_self = 2.0 * static_cast<double>(n) * static_cast<double>(n) * h_d_;
  r.cross = cross;
  r.f_n = r.pair_sum + r.mf_self + r.cross;
  r.f_n_avg = r.f_n / (static_cast<double>(n) * static_cast<double>(n));
  return r;
}

ModulatedEnergyReport Evaluator::truncated(const ParticleConfig& state,
                                           const TruncationVector& eta,
                                           const SphereQuadrature& quad) const {
  require_mean_field(state, "modulated_energy_truncated");
  const int d = state.dim();
  const std::size_t n = state.size();
  if (eta.eta.size() != n)
    throw std::invalid_argument("modulated_energy_truncated: eta size mismatch");
  if (quad.dim != d)
    throw std::invalid_argument("modulated_energy_truncated: quadrature dim mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double cap = (n >= 2) ? 0.25 * nearest_neighbor_distance(state, i)
                          : std::numeric_limits<double>::infinity();
    if (!(eta.eta[i] > 0.0) || eta.eta[i] > cap * (1.0 + 1e-12))
      throw std::invalid_argument(
          "modulated_energy_truncated: eta_i must lie in (0, min_j |x_i-x_j|/4]");
  }

  // Off-diagonal smeared pairs: integral of the eta_i-truncation centered at
  // x_i against the smeared Dirac at x_j, over ordered pairs.
  double offdiag = parallel_reduce(n * n, [&](std::size_t idx) {
    std::size_t i = idx / n, j = idx % n;
    if (i == j) return 0.0;
    auto xi = state.position(i);
    auto xj = state.position(j);
    double p[kMaxDim];
    KahanSum s;
    for (std::size_t k = 0; k < quad.size(); ++k) {
      auto node = quad.node(k);
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        p[c] = xj[c] + eta.eta[j] * node[c] - xi[c];
        r2 += p[c] * p[c];
      }
      s.add(quad.weights[k] *
            kernel::truncated_g_radial(std::sqrt(r2), eta.eta[i], state.dim()));
    }
    return s.value();
  });

  // Diagonal: exact smeared self-energy g~(eta_i).
  double diag;
  {
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i)
      s.add(kernel::coulomb_g_radial(eta.eta[i], state.dim()));
    diag = s.value();
  }

  // Cross: the potential g * omega integrated against each smeared Dirac.
  double cross = -2.0 * static_cast<double>(n) *
                 parallel_reduce(n, [&](std::size_t i) {
                   return kernel::smeared_dirac_integrate(
                       [&](std::span<const double> p) { return omega_.potential(p); },
                       state.position(i), eta.eta[i], quad);
                 });

  ModulatedEnergyReport r;
  r.method = "truncated";
  r.eta_max = eta.max_eta();
  r.pair_sum = offdiag;
  r.mf_self = 2.0 * static_cast<double>(n) * static_cast<double>(n) * h_d_;
  r.cross = cross;
  r.quadratic_form = offdiag + diag + r.mf_self + r.cross;
  r.f_n = r.pair_sum + r.mf_self + r.cross;  // diagonal cancels the renormalizer
  r.f_n_avg = r.f_n / (static_cast<double>(n) * static_cast<double>(n));
  return r;
}

CountingReport Evaluator::counting(const ParticleConfig& state, double eps3) const {
  require_mean_field(state, "counting_report");
  if (!(eps3 > 0.0) || !(eps3 < 1.0))
    throw std::invalid_argument("counting_report: eps3 must lie in (0, 1)");
  const int d = state.dim();
  const std::size_t n = state.size();
  const double cd = kernel::coulomb_constant(state.dim());

  std::vector<std::size_t> close_counts(n, 0);
  double lhs = 2.0 * parallel_reduce(n, [&](std::size_t i) {
    double diff[kMaxDim];
    auto xi = state.position(i);
    KahanSum row;
    std::size_t cnt = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = state.position(j);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        diff[k] = xi[k] - xj[k];
        r2 += diff[k] * diff[k];
      }
      if (r2 <= eps3 * eps3) {
        row.add(cd * std::pow(r2, 0.5 * (2.0 - d)));
        ++cnt;
      }
    }
    close_counts[i] = cnt;
    return row.value();
  });

  ModulatedEnergyReport me = direct(state);

  CountingReport r;
  r.eps3 = eps3;
  r.lhs = lhs;
  r.f_n = me.f_n;
  r.n_g_2eps3 = static_cast<double>(n) *
                kernel::coulomb_g_radial(2.0 * eps3, state.dim());
  r.bulk = static_cast<double>(n) * static_cast<double>(n) * omega_.sup_density() *
           eps3 * eps3;
  double denom = r.f_n + r.n_g_2eps3 + r.bulk;
  r.ratio = (denom > 0.0) ? lhs / denom : 0.0;
  for (std::size_t c : close_counts) r.close_pairs += c;
  return r;
}

SpectralProbe::SpectralProbe(Dim dim, double s_in, double cutoff_in, int n_radial_in,
                             double tail_tol_in)
    : SpectralProbe(dim, s_in, cutoff_in, n_radial_in,
                    SphereQuadrature::standard(dim.d), tail_tol_in) {}

SpectralProbe::SpectralProbe(Dim dim, double s_in, double cutoff_in, int n_radial_in,
                             SphereQuadrature sphere_in, double tail_tol_in)
    : s(s_in),
      cutoff(cutoff_in),
      n_radial(n_radial_in),
      sphere(std::move(sphere_in)),
      tail_tol(tail_tol_in) {
  if (!(s < -0.5 * dim.d))
    throw std::invalid_argument("SpectralProbe: s must be < -d/2");
  if (!(cutoff > 0.0) || n_radial < 2)
    throw std::invalid_argument("SpectralProbe: bad cutoff or radial size");
  if (sphere.dim != dim.d)
    throw std::invalid_argument("SpectralProbe: sphere rule dim mismatch");
  double tb = tail_bound(dim);
  if (!(tb <= tail_tol))
    throw std::invalid_argument(
        "SpectralProbe: cutoff too small, worst-case tail exceeds tail_tol");
}

double SpectralProbe::tail_bound(Dim dim) const {
  const int d = dim.d;
  const double ss = s;
  // substitute u = 1/k; the integrand u^{-2s-d-1}(1+u^2)^s is bounded on
  // (0, 1/cutoff] precisely because s < -d/2
  auto integrand = [ss, d](double u) {
    return std::pow(u, -2.0 * ss - d - 1.0) * std::pow(1.0 + u * u, ss);
  };
  double i = adaptive_gl(integrand, 0.0, 1.0 / cutoff, 1e-12);
  return 4.0 * sphere_surface_area(d) * i;
}

SobolevDistance Evaluator::sobolev(const ParticleConfig& state,
                                   const SpectralProbe& probe) const {
  require_mean_field(state, "sobolev_distance");
  const int d = state.dim();
  const std::size_t n = state.size();
  const auto& gl = GaussLegendre::get(probe.n_radial);
  const double half = 0.5 * probe.cutoff;
  const double sd = sphere_surface_area(d);

  double head = parallel_reduce(probe.n_radial, [&](std::size_t q) {
    double k = half + half * gl.nodes[q];
    double wk = half * gl.weights[q];
    double xi[kMaxDim];
    KahanSum shell;
    for (std::size_t node = 0; node < probe.sphere.size(); ++node) {
      auto nv = probe.sphere.node(node);
      for (int c = 0; c < d; ++c) xi[c] = k * nv[c];
      std::span<const double> xis(xi, static_cast<std::size_t>(d));
      // empirical transform (1/N) sum_i e^{-i xi . x_i}
      KahanSum re, im;
      for (std::size_t i = 0; i < n; ++i) {
        double phase = -dot(xis, state.position(i));
        re.add(std::cos(phase));
        im.add(std::sin(phase));
      }
      std::complex<double> emp(re.value() / static_cast<double>(n),
                               im.value() / static_cast<double>(n));
      std::complex<double> diff = emp - omega_.fourier(xis);
      shell.add(probe.sphere.weights[node] * std::norm(diff));
    }
    double weight = std::pow(1.0 + k * k, probe.s) * std::pow(k, d - 1.0);
    return wk * weight * sd * shell.value();
  });

  SobolevDistance out;
  out.value = std::sqrt(std::max(0.0, head));
  out.tail_bound = probe.tail_bound(state.dim());
  return out;
}

namespace {

// Orthonormal frame with the first axis along `axis` (or e1 if degenerate).
void build_frame(std::span<const double> axis, int d, std::vector<double>& frame) {
  frame.assign(static_cast<std::size_t>(d) * d, 0.0);
  double a = norm(axis);
  if (a < 1e-14) {
    for (int i = 0; i < d; ++i) frame[i * d + i] = 1.0;
    return;
  }
  for (int i = 0; i < d; ++i) frame[i] = axis[i] / a;  // column 0
  int next = 1;
  for (int e = 0; e < d && next < d; ++e) {
    // Gram-Schmidt the coordinate vector e against the accepted columns.
    std::vector<double> v(d, 0.0);
    v[e] = 1.0;
    for (int c = 0; c < next; ++c) {
      double proj = 0.0;
      for (int i = 0; i < d; ++i) proj += v[i] * frame[i * d + c];
      for (int i = 0; i < d; ++i) v[i] -= proj * frame[i * d + c];
    }
    double nv = norm(std::span<const double>(v));
    if (nv < 1e-8) continue;
    for (int i = 0; i < d; ++i) frame[i * d + next] = v[i] / nv;
    ++next;
  }
}

}  // namespace

DerivativeCheck Evaluator::derivative_check(const ParticleConfig& state,
                                            const RotationMatrix& J, double dt,
                                            const nbody::StepControls& controls,
                                            double floor) const {
  require_mean_field(state, "derivative_check");
  if (!omega_.is_radial())
    throw std::invalid_argument(
        "derivative_check: closed-form velocity needs the radial backend");
  if (!(dt > 0.0)) throw std::invalid_argument("derivative_check: dt must be positive");

  const int d = state.dim();
  const std::size_t n = state.size();
  const auto& profile = omega_.profile();

  // Finite difference of F^avg along the particle flow.
  double f0 = direct(state).f_n_avg;
  ParticleConfig moved = nbody::advance(state, J, dt, controls);
  double f1 = direct(moved).f_n_avg;
  double fd = (f1 - f0) / dt;

  auto u_at = [&](std::span<const double> x, std::span<double> out) {
    double grad[kMaxDim];
    omega_.grad_potential(x, std::span<double>(grad, d));
    J.apply(std::span<const double>(grad, d), out);
  };

  // Particle-particle: (1/N^2) sum_{i != j} grad g(x_i - x_j).(u_i - u_j).
  std::vector<double> u(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i)
    u_at(state.position(i), std::span<double>(u).subspan(i * d, d));
  const double cd = kernel::coulomb_constant(state.dim());
  double pair_term = 2.0 * parallel_reduce(n, [&](std::size_t i) {
    double diff[kMaxDim];
    auto xi = state.position(i);
    KahanSum row;
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = state.position(j);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        diff[k] = xi[k] - xj[k];
        r2 += diff[k] * diff[k];
      }
      if (r2 <= 0.0)
        throw SingularityError(i, j, "derivative_check: coincident particles");
      double c = -cd * (d - 2) * std::pow(r2, -0.5 * d);
      double dotud = 0.0;
      for (int k = 0; k < d; ++k) dotud += c * diff[k] * (u[i * d + k] - u[j * d + k]);
      row.add(dotud);
    }
    return row.value();
  }) / (static_cast<double>(n) * static_cast<double>(n));

  // Particle-measure cross term, per particle:
  //   u(x_i) . grad phi(x_i)  -  int grad g(x_i - y) . u(y) d omega(y).
  // The second piece in polar coordinates about x_i: the 1/r^{d-1} kernel
  // cancels against the volume element, s_d c_d (d-2) = 1, leaving
  //   int_0^{r_max} E_n[ n . u(x_i + r n) omega(x_i + r n) ] dr
  // evaluated with a product rule aligned to x_i (the azimuth average
  // annihilates the first-harmonic integrand of radial data).
  const double R = profile.radius;
  const double rho_uniform =
      profile.uniform ? 1.0 / (ball_volume(d) * std::pow(R, d)) : 0.0;
  auto density_at = [&](double r) {
    if (r > R) return 0.0;
    return profile.uniform ? rho_uniform : profile.rho(r);
  };
  SphereQuadrature srule = SphereQuadrature::product(d, 12, 16);
  std::vector<double> frame;
  double cross_term = 0.0;
  {
    KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) {
      auto xi = state.position(i);
      double grad[kMaxDim], ui[kMaxDim];
      omega_.grad_potential(xi, std::span<double>(grad, d));
      J.apply(std::span<const double>(grad, d), std::span<double>(ui, d));
      double first = dot(std::span<const double>(ui, d), std::span<const double>(grad, d));

      build_frame(xi, d, frame);
      double ri = norm(xi);
      double r_lo = std::max(0.0, ri - R), r_hi = ri + R;
      auto shell = [&](double r) {
        KahanSum s;
        double p[kMaxDim], nvec[kMaxDim], up[kMaxDim], gp[kMaxDim];
        for (std::size_t q = 0; q < srule.size(); ++q) {
          auto node = srule.node(q);
          for (int a = 0; a < d; ++a) {
            double na = 0.0;
            for (int b = 0; b < d; ++b) na += frame[a * d + b] * node[b];
            nvec[a] = na;
            p[a] = xi[a] + r * na;
          }
          double rho = density_at(norm(std::span<const double>(p, d)));
          if (rho == 0.0) continue;
          omega_.grad_potential(std::span<const double>(p, d), std::span<double>(gp, d));
          J.apply(std::span<const double>(gp, d), std::span<double>(up, d));
          s.add(srule.weights[q] * rho *
                dot(std::span<const double>(nvec, d), std::span<const double>(up, d)));
        }
        return s.value();
      };
      double second = gl_integrate(shell, r_lo, r_hi, 24);
      acc.add(first - second);
    }
    cross_term = -2.0 * acc.value() / static_cast<double>(n);
  }

  // Measure-measure term: 2 int u . grad phi d omega; the integrand
  // J grad phi . grad phi vanishes pointwise, kept as an honest quadrature.
  double self_term;
  {
    auto radial_part = [&](double r) {
      if (r <= 0.0) return 0.0;
      double dphi = kernel::radial_potential_derivative(profile, r, omega_.dim());
      // u . grad phi = (dphi/r)^2 (J x . x) = 0; evaluate through the frame
      // anyway so roundoff is what is actually measured.
      double x[kMaxDim], gp[kMaxDim], up[kMaxDim];
      for (int a = 0; a < d; ++a) x[a] = 0.0;
      x[0] = r;
      for (int a = 0; a < d; ++a) gp[a] = dphi * x[a] / r;
      J.apply(std::span<const double>(gp, d), std::span<double>(up, d));
      return density_at(r) * sphere_surface_area(d) * std::pow(r, d - 1.0) *
             dot(std::span<const double>(up, d), std::span<const double>(gp, d));
    };
    self_term = 2.0 * gl_integrate(radial_part, 0.0, R, 32);
  }

  DerivativeCheck out;
  out.fd = fd;
  out.pair_term = pair_term;
  out.cross_term = cross_term;
  out.self_term = self_term;
  out.rhs = pair_term + cross_term + self_term;
  out.rel_err =
      std::abs(fd - out.rhs) / std::max({std::abs(fd), std::abs(out.rhs), floor});
  return out;
}

ModulatedEnergyReport modulated_energy_direct(const ParticleConfig& state,
                                              const meanfield::ReferenceDensity& omega) {
  return Evaluator(omega).direct(state);
}

ModulatedEnergyReport modulated_energy_truncated(const ParticleConfig& state,
                                                 const meanfield::ReferenceDensity& omega,
                                                 const TruncationVector& eta,
                                                 const SphereQuadrature& quad) {
  return Evaluator(omega).truncated(state, eta, quad);
}

CountingReport counting_report(const ParticleConfig& state,
                               const meanfield::ReferenceDensity& omega, double eps3) {
  return Evaluator(omega).counting(state, eps3);
}

SobolevDistance sobolev_distance(const ParticleConfig& state,
                                 const meanfield::ReferenceDensity& omega,
                                 const SpectralProbe& probe) {
  return Evaluator(omega).sobolev(state, probe);
}

GrowthSummary theorem_monitor(const nbody::Trajectory& traj,
                              const meanfield::ReferenceDensity& omega,
                              const std::vector<double>& f_avg_series) {
  if (traj.size() == 0 || f_avg_series.size() != traj.size())
    throw std::invalid_argument("theorem_monitor: series/trajectory size mismatch");
  const std::size_t n = traj.states[0].size();
  const int d = traj.states[0].dim();

  GrowthSummary g;
  g.omega_sup = omega.sup_density();
  g.ln_n = std::log(static_cast<double>(n));
  double sup_h = 0.0;
  for (double h : traj.hamiltonians) sup_h = std::max(sup_h, h);
  g.lnp_n2h = std::max(0.0, std::log(std::max(
                                1e-300, static_cast<double>(n) * static_cast<double>(n) *
                                            sup_h)));
  g.n_rate_power = std::pow(static_cast<double>(n),
                            2.0 / (static_cast<double>(d) * d - 2.0));
  g.f0_abs = std::abs(f_avg_series.front());
  for (double f : f_avg_series) g.sup_abs_f = std::max(g.sup_abs_f, std::abs(f));

  double logs = g.ln_n + g.lnp_n2h;
  auto envelope_at = [&](double t, double c) {
    double growth = g.f0_abs +
                    c * t * (g.omega_sup + g.omega_sup * g.omega_sup) * logs /
                        g.n_rate_power;
    return growth * std::exp(c * t * g.omega_sup * (g.lnp_n2h + g.ln_n));
  };
  auto dominates = [&](double c) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      double slack = 1e-12 * std::max(1.0, std::abs(f_avg_series[k]));
      if (std::abs(f_avg_series[k]) > envelope_at(traj.times[k], c) + slack) return false;
    }
    return true;
  };

  if (dominates(0.0)) {
    g.c_fit = 0.0;
  } else {
    double lo = 0.0, hi = 1.0;
    while (!dominates(hi) && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (dominates(mid) ? hi : lo) = mid;
    }
    g.c_fit = hi;
  }
  g.envelope.resize(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    g.envelope[k] = envelope_at(traj.times[k], g.c_fit);
  return g;
}

double default_truncation_eps1(std::size_t n, Dim dim) {
  double d = dim.d;
  return std::pow(static_cast<double>(n), -(d + 2.0) / (d * d - 2.0));
}

double default_counting_eps3(std::size_t n) {
  return std::pow(static_cast<double>(n), -1.0 / 3.0);
}

}  // namespace modenergy
}  // namespace mflab
