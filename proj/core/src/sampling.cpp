#include "mflab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>

#include "mflab/modenergy.hpp"
#include "mflab/rng.hpp"
#include "mflab/vecops.hpp"

namespace mflab {
namespace sampling {

namespace {

constexpr int kMaxDim = 16;

// Inverse radial CDF. Uniform balls invert in closed form; other profiles
// go through a cumulative-mass table refined enough for sampling purposes.
class RadialInverter {
 public:
  RadialInverter(const kernel::RadialDensitySpec& profile, Dim dim)
      : profile_(profile), dim_(dim) {
    if (!profile.uniform) {
      const int cells = 4096;
      cdf_.resize(cells + 1);
      radii_.resize(cells + 1);
      for (int i = 0; i <= cells; ++i) {
        radii_[i] = profile.radius * i / cells;
        cdf_[i] = profile.mass_within(radii_[i], dim);
      }
      cdf_.front() = 0.0;
      cdf_.back() = 1.0;
      for (int i = 1; i <= cells; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);
    }
  }

  double radius(double u) const {
    if (profile_.uniform)
      return profile_.radius * std::pow(u, 1.0 / dim_.d);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return radii_.front();
    if (it == cdf_.end()) return radii_.back();
    std::size_t hi = static_cast<std::size_t>(it - cdf_.begin());
    double c0 = cdf_[hi - 1], c1 = cdf_[hi];
    double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
    return radii_[hi - 1] + t * (radii_[hi] - radii_[hi - 1]);
  }

 private:
  const kernel::RadialDensitySpec& profile_;
  Dim dim_;
  std::vector<double> cdf_;
  std::vector<double> radii_;
};

}  // namespace

ParticleConfig sample_iid(const SampleSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("sample_iid: n must be >= 1");
  if (!spec.density.is_radial())
    throw std::invalid_argument("sample_iid: only radial densities are samplable");
  const Dim dim = spec.density.dim();
  const int d = dim.d;
  const auto& profile = spec.density.profile();
  RadialInverter inverter(profile, dim);

  Pcg32 rng(spec.seed);
  std::vector<double> positions;
  positions.reserve(spec.n * d);
  // Exact-duplicate guard; a measure-zero event, but the contract says
  // redraw, and bitwise comparison is the only meaningful test here.
  std::set<std::vector<double>> seen;
  double dir[kMaxDim];
  while (positions.size() < spec.n * static_cast<std::size_t>(d)) {
    double r = inverter.radius(rng.next_double());
    double nrm = 0.0;
    do {
      nrm = 0.0;
      for (int k = 0; k < d; ++k) {
        dir[k] = rng.next_normal();
        nrm += dir[k] * dir[k];
      }
      nrm = std::sqrt(nrm);
    } while (nrm < 1e-12);
    std::vector<double> p(d);
    for (int k = 0; k < d; ++k) p[k] = r * dir[k] / nrm;
    if (!seen.insert(p).second) continue;  // coincident draw, redraw
    positions.insert(positions.end(), p.begin(), p.end());
  }
  return ParticleConfig::mean_field(dim, std::move(positions));
}

double median_abs(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median_abs: empty input");
  std::vector<double> mags(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mags[i] = std::abs(values[i]);
  std::sort(mags.begin(), mags.end());
  std::size_t m = mags.size() / 2;
  return (mags.size() % 2 == 1) ? mags[m] : 0.5 * (mags[m - 1] + mags[m]);
}

ScalingStudy scaling_study(const meanfield::ReferenceDensity& density,
                           std::span<const std::size_t> n_values,
                           std::span<const std::uint64_t> seeds) {
  if (n_values.size() < 3)
    throw std::invalid_argument("scaling_study: need at least 3 N values");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw std::invalid_argument("scaling_study: N values must be strictly increasing");
  if (seeds.empty()) throw std::invalid_argument("scaling_study: need at least 1 seed");

  ScalingStudy study;
  study.n_values.assign(n_values.begin(), n_values.end());
  study.seeds.assign(seeds.begin(), seeds.end());
  modenergy::Evaluator eval(density);

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    std::vector<double> per_seed;
    per_seed.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
      SampleSpec spec{density, n_values[ni], seed};
      ParticleConfig state = sample_iid(spec);
      per_seed.push_back(eval.direct(state).f_n_avg);
    }
    study.medians.push_back(median_abs(per_seed));
    study.f_avg.push_back(std::move(per_seed));
  }

  // Least squares on (ln N, ln median).
  const std::size_t m = study.n_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::log(static_cast<double>(study.n_values[i]));
    double y = std::log(std::max(study.medians[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = m * sxx - sx * sx;
  study.slope = (m * sxy - sx * sy) / denom;
  study.intercept = (sy - study.slope * sx) / m;
  return study;
}

}  // namespace sampling
}  // namespace mflab
