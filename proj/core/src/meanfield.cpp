#include "mflab/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dopri5_step.hpp"
#include "mflab/errors.hpp"
#include "mflab/parallel.hpp"
#include "mflab/rng.hpp"
#include "mflab/vecops.hpp"

namespace mflab {
namespace meanfield {

namespace {
constexpr int kMaxDim = 16;

// Fourier transform of the uniform probability measure on the unit sphere
// S^{d-1}, as a function of u = |xi|: Gamma(d/2) (2/u)^{d/2-1} J_{d/2-1}(u).
double sphere_ft(double u, int d) {
  if (u < 1e-6) return 1.0 - u * u / (2.0 * d);
  double nu = 0.5 * d - 1.0;
  return std::tgamma(0.5 * d) * std::pow(2.0 / u, nu) * std::cyl_bessel_j(nu, u);
}

// Fourier transform of the unit-mass uniform ball of radius R at |xi| = k.
double ball_ft(double k, double R, int d) {
  double u = k * R;
  if (u < 1e-6) return 1.0 - u * u / (2.0 * (d + 2.0));
  if (d == 3) return 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
  double nu = 0.5 * d;
  return std::tgamma(nu + 1.0) * std::pow(2.0 / u, nu) * std::cyl_bessel_j(nu, u);
}

}  // namespace

BlobCloud::BlobCloud(Dim dim, std::vector<double> centers, std::vector<double> weights,
                     double blob_width, double density_sup)
    : dim_(dim),
      centers_(std::move(centers)),
      weights_(std::move(weights)),
      blob_width_(blob_width),
      density_sup_(density_sup) {
  if (weights_.empty()) throw std::invalid_argument("BlobCloud: empty cloud");
  if (centers_.size() != weights_.size() * static_cast<std::size_t>(dim_.d))
    throw std::invalid_argument("BlobCloud: centers/weights size mismatch");
  if (!(blob_width_ > 0.0))
    throw std::invalid_argument("BlobCloud: blob width must be positive");
  double mass = kahan_total(weights_);
  if (std::abs(mass - 1.0) > 1e-12)
    throw std::invalid_argument("BlobCloud: weights must sum to 1");
  for (double w : weights_)
    if (!(w > 0.0)) throw std::invalid_argument("BlobCloud: weights must be positive");
}

BlobCloud BlobCloud::sample_radial(Dim dim, const kernel::RadialDensitySpec& profile,
                                   std::size_t count, std::uint64_t seed,
                                   double blob_width) {
  if (count == 0) throw std::invalid_argument("sample_radial: count must be >= 1");
  const int d = dim.d;
  if (blob_width <= 0.0)
    blob_width = std::pow(static_cast<double>(count), -1.0 / d) * profile.radius;

  // Stratified radii: one per mass quantile, inverted through the radial CDF.
  std::vector<double> radii(count);
  if (profile.uniform) {
    for (std::size_t k = 0; k < count; ++k)
      radii[k] = profile.radius *
                 std::pow((k + 0.5) / static_cast<double>(count), 1.0 / d);
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      double q = (k + 0.5) / static_cast<double>(count);
      double lo = 0.0, hi = profile.radius;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (profile.mass_within(mid, dim) < q ? lo : hi) = mid;
      }
      radii[k] = 0.5 * (lo + hi);
    }
  }
  Pcg32 rng(seed, 0xb10bc10dULL);
  // Deterministic Fisher-Yates decorrelates the radius ranks from the
  // direction stream.
  for (std::size_t k = count - 1; k > 0; --k) {
    std::size_t j = rng.next_u64() % (k + 1);
    std::swap(radii[k], radii[j]);
  }
  std::vector<double> centers(count * d);
  for (std::size_t m = 0; m < count; ++m) {
    double nrm = 0.0;
    double dir[kMaxDim];
    do {
      nrm = 0.0;
      for (int k = 0; k < d; ++k) {
        dir[k] = rng.next_normal();
        nrm += dir[k] * dir[k];
      }
      nrm = std::sqrt(nrm);
    } while (nrm < 1e-12);
    for (int k = 0; k < d; ++k) centers[m * d + k] = radii[m] * dir[k] / nrm;
  }
  double sup = profile.uniform
                   ? 1.0 / (ball_volume(d) * std::pow(profile.radius, d))
                   : 0.0;
  if (!profile.uniform) {
    for (int k = 0; k <= 256; ++k)
      sup = std::max(sup, profile.rho(profile.radius * k / 256.0));
  }
  return BlobCloud(dim, std::move(centers),
                   std::vector<double>(count, 1.0 / static_cast<double>(count)),
                   blob_width, sup);
}

BlobCloud BlobCloud::with_centers(std::vector<double> centers) const {
  return BlobCloud(dim_, std::move(centers), weights_, blob_width_, density_sup_);
}

double BlobCloud::potential(std::span<const double> x) const {
  const int d = dim_.d;
  return parallel_reduce(size(), [&](std::size_t m) {
    double diff[kMaxDim];
    auto ym = center(m);
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      diff[k] = x[k] - ym[k];
      r2 += diff[k] * diff[k];
    }
    return weights_[m] *
           kernel::truncated_g_radial(std::sqrt(r2), blob_width_, dim_);
  });
}

void BlobCloud::grad_potential(std::span<const double> x, std::span<double> out) const {
  const int d = dim_.d;
  const double cd = kernel::coulomb_constant(dim_);
  KahanSum acc[kMaxDim];
  for (std::size_t m = 0; m < size(); ++m) {
    auto ym = center(m);
    double diff[kMaxDim];
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      diff[k] = x[k] - ym[k];
      r2 += diff[k] * diff[k];
    }
    if (r2 < blob_width_ * blob_width_) continue;  // flat inside the smear
    double c = -cd * (d - 2) * std::pow(r2, -0.5 * d) * weights_[m];
    for (int k = 0; k < d; ++k) acc[k].add(c * diff[k]);
  }
  for (int k = 0; k < d; ++k) out[k] = acc[k].value();
}

double BlobCloud::density_proxy() const {
  const int d = dim_.d;
  const double h = 2.0 * blob_width_;
  const double vol = ball_volume(d) * std::pow(h, d);
  std::vector<double> local(size(), 0.0);
  parallel_for(size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      auto ym = center(m);
      double acc = 0.0;
      for (std::size_t j = 0; j < size(); ++j) {
        auto yj = center(j);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          double dk = ym[k] - yj[k];
          r2 += dk * dk;
        }
        if (r2 <= h * h) acc += weights_[j];
      }
      local[m] = acc / vol;
    }
  });
  double sup = 0.0;
  for (double v : local) sup = std::max(sup, v);
  return sup;
}

ReferenceDensity ReferenceDensity::uniform_ball(Dim dim, double radius) {
  ReferenceDensity r(dim, Backend::kRadialProfile);
  r.profile_ = kernel::RadialDensitySpec::uniform_ball(radius);
  r.sup_density_ = 1.0 / (ball_volume(dim.d) * std::pow(radius, dim.d));
  return r;
}

ReferenceDensity ReferenceDensity::radial(Dim dim, kernel::RadialDensitySpec profile,
                                          double sup_density) {
  if (!(sup_density > 0.0))
    throw std::invalid_argument("ReferenceDensity::radial: sup_density must be positive");
  ReferenceDensity r(dim, Backend::kRadialProfile);
  r.profile_ = std::move(profile);
  r.sup_density_ = sup_density;
  return r;
}

ReferenceDensity ReferenceDensity::blobs(BlobCloud cloud) {
  ReferenceDensity r(cloud.dim(), Backend::kBlobCloud);
  r.cloud_.push_back(std::move(cloud));
  r.sup_density_ = r.cloud_[0].density_sup();
  return r;
}

double ReferenceDensity::sup_density() const {
  if (backend_ == Backend::kRadialProfile) return sup_density_;
  return sup_density_ > 0.0 ? sup_density_ : cloud_[0].density_proxy();
}

double ReferenceDensity::potential(std::span<const double> x) const {
  if (backend_ == Backend::kRadialProfile)
    return kernel::radial_potential(profile_, x, dim_);
  return cloud_[0].potential(x);
}

void ReferenceDensity::grad_potential(std::span<const double> x,
                                      std::span<double> out) const {
  if (backend_ == Backend::kBlobCloud) {
    cloud_[0].grad_potential(x, out);
    return;
  }
  double r = norm(x);
  if (r <= 0.0) {
    fill(out, 0.0);
    return;
  }
  double dphi = kernel::radial_potential_derivative(profile_, r, dim_);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = dphi * x[k] / r;
}

std::complex<double> ReferenceDensity::fourier(std::span<const double> xi) const {
  const int d = dim_.d;
  double k = norm(xi);
  if (backend_ == Backend::kRadialProfile) {
    if (profile_.uniform) return ball_ft(k, profile_.radius, d);
    double s = sphere_surface_area(d);
    auto integrand = [&](double r) {
      return profile_.rho(r) * s * std::pow(r, d - 1.0) * sphere_ft(k * r, d);
    };
    return adaptive_gl(integrand, 0.0, profile_.radius, 1e-10);
  }
  const BlobCloud& c = cloud_[0];
  double smear = sphere_ft(k * c.blob_width(), d);
  std::complex<double> sum = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    double phase = -dot(xi, c.center(m));
    sum += c.weight(m) * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum * smear;
}

const kernel::RadialDensitySpec& ReferenceDensity::profile() const {
  if (backend_ != Backend::kRadialProfile)
    throw std::logic_error("ReferenceDensity: not a radial profile");
  return profile_;
}

const BlobCloud& ReferenceDensity::cloud() const {
  if (backend_ != Backend::kBlobCloud)
    throw std::logic_error("ReferenceDensity: not a blob cloud");
  return cloud_[0];
}

std::vector<double> velocity(const ReferenceDensity& omega, std::span<const double> x,
                             const RotationMatrix& J) {
  std::vector<double> grad(x.size()), u(x.size());
  omega.grad_potential(x, grad);
  J.apply(grad, u);
  return u;
}

double mf_energy(const ReferenceDensity& omega) {
  const int d = omega.dim().d;
  if (omega.is_radial()) {
    const auto& p = omega.profile();
    double s = sphere_surface_area(d);
    double rho_uniform = 1.0 / (ball_volume(d) * std::pow(p.radius, d));
    auto integrand = [&](double r) {
      double rho = p.uniform ? rho_uniform : p.rho(r);
      return 0.5 * kernel::radial_potential_radial(p, r, omega.dim()) * rho * s *
             std::pow(r, d - 1.0);
    };
    return adaptive_gl(integrand, 0.0, p.radius, 1e-12);
  }
  const BlobCloud& c = omega.cloud();
  const std::size_t m = c.size();
  // Ordered pairs counted once via j > i; the diagonal contributes the
  // smeared self-energy g~(delta) per blob.
  double offdiag = parallel_reduce(m, [&](std::size_t i) {
    double diff[kMaxDim];
    auto yi = c.center(i);
    KahanSum row;
    for (std::size_t j = i + 1; j < m; ++j) {
      auto yj = c.center(j);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        diff[k] = yi[k] - yj[k];
        r2 += diff[k] * diff[k];
      }
      row.add(c.weight(i) * c.weight(j) *
              kernel::truncated_g_radial(std::sqrt(r2), c.blob_width(), c.dim()));
    }
    return row.value();
  });
  double diag = 0.0;
  {
    KahanSum s;
    double g_self = kernel::coulomb_g_radial(c.blob_width(), c.dim());
    for (std::size_t i = 0; i < m; ++i) s.add(c.weight(i) * c.weight(i) * g_self);
    diag = s.value();
  }
  return offdiag + 0.5 * diag;
}

double uniform_ball_energy(Dim dim, double radius) {
  return dim.d * kernel::coulomb_constant(dim) * std::pow(radius, 2.0 - dim.d) /
         (dim.d + 2.0);
}

BlobTrajectory evolve(const BlobCloud& cloud, const RotationMatrix& J, double t_end,
                      const EvolveControls& controls, std::size_t samples) {
  if (t_end < 0.0) throw std::invalid_argument("evolve: t_end must be >= 0");
  if (J.dim() != cloud.dim().d)
    throw std::invalid_argument("evolve: rotation/cloud dim mismatch");

  const int d = cloud.dim().d;
  const std::size_t m = cloud.size();
  const double cd = kernel::coulomb_constant(cloud.dim());
  const double delta = cloud.blob_width();

  BlobTrajectory traj;
  auto record = [&](double t, const BlobCloud& c) {
    traj.times.push_back(t);
    traj.clouds.push_back(c);
    traj.energies.push_back(mf_energy(ReferenceDensity::blobs(c)));
    traj.density_proxies.push_back(c.density_proxy());
  };
  record(0.0, cloud);
  if (t_end == 0.0) return traj;
  if (samples == 0) samples = 1;

  // Self-induced advection: blob m feels every other blob through the
  // mollified kernel; the self-term vanishes inside its own smear.
  auto rhs = [&](const std::vector<double>& pos, std::vector<double>& out) {
    out.assign(pos.size(), 0.0);
    parallel_for(m, [&](std::size_t b, std::size_t e) {
      double diff[kMaxDim], jd[kMaxDim];
      for (std::size_t i = b; i < e; ++i) {
        KahanSum acc[kMaxDim];
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          double r2 = 0.0;
          for (int k = 0; k < d; ++k) {
            diff[k] = pos[i * d + k] - pos[j * d + k];
            r2 += diff[k] * diff[k];
          }
          if (r2 < delta * delta) continue;
          double c = -cd * (d - 2) * std::pow(r2, -0.5 * d) * cloud.weight(j);
          J.apply(std::span<const double>(diff, d), std::span<double>(jd, d));
          for (int k = 0; k < d; ++k) acc[k].add(c * jd[k]);
        }
        for (int k = 0; k < d; ++k) out[i * d + k] = acc[k].value();
      }
    });
  };

  std::vector<double> y = cloud.centers();
  std::vector<double> k1(y.size()), k7(y.size()), ynew(y.size());
  rhs(y, k1);
  detail::Dopri5Work wk;

  double t = 0.0;
  double dt_prop = std::min(controls.dt_init, controls.dt_max);
  std::size_t next_sample = 1;
  std::size_t steps = 0;

  while (t < t_end && next_sample <= samples) {
    if (++steps > controls.max_steps) throw RuntimeAbort("evolve: step budget exhausted");
    double target = (static_cast<double>(next_sample) / samples) * t_end;
    double dt = std::min(dt_prop, controls.dt_max);
    bool clipped = false;
    if (t + dt >= target) {
      dt = target - t;
      clipped = true;
    }
    if (dt < controls.dt_min)
      throw RuntimeAbort("evolve: step size collapsed below dt_min");

    double err = detail::dopri5_step(rhs, y, k1, dt, controls.rel_tol, controls.abs_tol,
                                     ynew, k7, wk);
    if (err <= 1.0) {
      t += dt;
      y.swap(ynew);
      k1.swap(k7);
      if (clipped) {
        record(t, cloud.with_centers(y));
        ++next_sample;
      }
    }
    double grow = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    if (err <= 1.0 && clipped) {
      dt_prop = std::max(dt_prop, dt * grow);
    } else {
      dt_prop = dt * grow;
    }
  }
  return traj;
}

double divergence_check(const ReferenceDensity& omega, const RotationMatrix& J,
                        std::span<const double> points, double fd_step) {
  const int d = omega.dim().d;
  const std::size_t n = points.size() / d;
  double worst = 0.0;
  std::vector<double> p(d);
  for (std::size_t i = 0; i < n; ++i) {
    double div = 0.0;
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) p[j] = points[i * d + j];
      p[k] += fd_step;
      double up = velocity(omega, p, J)[k];
      p[k] -= 2.0 * fd_step;
      double um = velocity(omega, p, J)[k];
      div += (up - um) / (2.0 * fd_step);
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

}  // namespace meanfield
}  // namespace mflab
