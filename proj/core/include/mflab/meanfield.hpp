#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mflab/kernel.hpp"
#include "mflab/rotation.hpp"

namespace mflab {
namespace meanfield {

/// Regularized particle representation of a density: M centers with
/// positive weights summing to 1, each carrying a sphere-smeared unit mass
/// at scale `blob_width`. The smeared kernel is the truncated potential, so
/// a blob is exactly the smeared Dirac at its center.
class BlobCloud {
 public:
  BlobCloud(Dim dim, std::vector<double> centers, std::vector<double> weights,
            double blob_width, double density_sup = 0.0);

  /// Cloud drawn from a radial profile: stratified inverse-CDF radii
  /// (deterministically shuffled) with seeded uniform directions.
  /// blob_width <= 0 selects the spacing scale M^{-1/d}.
  static BlobCloud sample_radial(Dim dim, const kernel::RadialDensitySpec& profile,
                                 std::size_t count, std::uint64_t seed,
                                 double blob_width = 0.0);

  Dim dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  double blob_width() const { return blob_width_; }
  double density_sup() const { return density_sup_; }

  std::span<const double> center(std::size_t m) const {
    return std::span<const double>(centers_).subspan(m * dim_.d, dim_.d);
  }
  const std::vector<double>& centers() const { return centers_; }
  double weight(std::size_t m) const { return weights_[m]; }
  const std::vector<double>& weights() const { return weights_; }

  BlobCloud with_centers(std::vector<double> centers) const;

  /// Mollified potential of the cloud, sum_m w_m g_{delta}(x - y_m).
  double potential(std::span<const double> x) const;
  void grad_potential(std::span<const double> x, std::span<double> out) const;

  /// Crude sup-density estimate: largest windowed weight over blob centers
  /// (window radius 2 * blob_width), divided by the window volume.
  double density_proxy() const;

 private:
  Dim dim_;
  std::vector<double> centers_;
  std::vector<double> weights_;
  double blob_width_;
  double density_sup_;  // sup-norm bound of the generating density, if known
};

/// The reference measure: either an analytic radial profile (closed-form
/// potential) or a blob cloud. Snapshots are immutable and cheap to share.
class ReferenceDensity {
 public:
  enum class Backend { kRadialProfile, kBlobCloud };

  static ReferenceDensity uniform_ball(Dim dim, double radius);
  static ReferenceDensity radial(Dim dim, kernel::RadialDensitySpec profile,
                                 double sup_density);
  static ReferenceDensity blobs(BlobCloud cloud);

  Backend backend() const { return backend_; }
  bool is_radial() const { return backend_ == Backend::kRadialProfile; }
  Dim dim() const { return dim_; }

  /// Sup-norm bound of the density (for blob clouds, the generator's bound
  /// or the windowed proxy when the generator is unknown).
  double sup_density() const;

  /// Newton potential (g * omega)(x) and its gradient.
  double potential(std::span<const double> x) const;
  void grad_potential(std::span<const double> x, std::span<double> out) const;

  /// Fourier transform with the e^{-i xi . x} convention; real-valued for
  /// radial backends, complex for clouds. |fourier| <= 1 always.
  std::complex<double> fourier(std::span<const double> xi) const;

  const kernel::RadialDensitySpec& profile() const;
  const BlobCloud& cloud() const;

 private:
  ReferenceDensity(Dim dim, Backend b) : dim_(dim), backend_(b) {}
  Dim dim_;
  Backend backend_;
  kernel::RadialDensitySpec profile_{};
  double sup_density_ = 0.0;
  std::vector<BlobCloud> cloud_;  // empty or one element
};

/// Self-induced velocity u(x) = J grad (g * omega)(x). Exactly tangent to
/// spheres for radial backends; globally bounded for blob clouds.
std::vector<double> velocity(const ReferenceDensity& omega, std::span<const double> x,
                             const RotationMatrix& J);

/// Coulomb energy H_d = (1/2) <omega, g * omega>. Radial profiles go
/// through 1D quadrature; clouds through the mollified double sum
/// (including the smeared diagonal).
double mf_energy(const ReferenceDensity& omega);

/// Closed-form energy of the uniform ball: d c_d R^{2-d} / (d + 2).
double uniform_ball_energy(Dim dim, double radius);

struct EvolveControls {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  std::size_t max_steps = 1'000'000;
};

/// Blob trajectory: weights are never mutated (conservative transport of a
/// divergence-free field), so mass conservation is exact by construction.
struct BlobTrajectory {
  std::vector<double> times;
  std::vector<BlobCloud> clouds;
  std::vector<double> energies;        // H_d of each sample
  std::vector<double> density_proxies; // windowed sup-density estimate

  std::size_t size() const { return times.size(); }
};

/// Advect blob centers along the cloud's own velocity field.
BlobTrajectory evolve(const BlobCloud& cloud, const RotationMatrix& J, double t_end,
                      const EvolveControls& controls = {}, std::size_t samples = 16);

/// Max |div u| over the probe points (flattened), by central differences.
double divergence_check(const ReferenceDensity& omega, const RotationMatrix& J,
                        std::span<const double> points, double fd_step = 1e-5);

}  // namespace meanfield
}  // namespace mflab
