#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mflab/meanfield.hpp"
#include "mflab/particles.hpp"

namespace mflab {
namespace sampling {

/// Declarative description of a seeded i.i.d. draw: N particles from a
/// radial density with bounded support, intensities set to 1/N.
struct SampleSpec {
  meanfield::ReferenceDensity density;  // radial backend only
  std::size_t n = 0;
  std::uint64_t seed = 1;
};

/// Draw positions i.i.d. from the density: inverse-CDF radius times a
/// uniform direction, one sequential PCG stream per spec, so the result is
/// a pure function of (density, n, seed). Exactly coincident draws are
/// rejected and redrawn.
ParticleConfig sample_iid(const SampleSpec& spec);

/// Initial-time modulated-energy scaling study over an N ladder.
struct ScalingStudy {
  std::vector<std::size_t> n_values;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> f_avg;  // [n index][seed index], signed
  std::vector<double> medians;             // median |F^avg(0)| per N
  double slope = 0.0;                      // log-log least-squares fit
  double intercept = 0.0;
};

/// Compute F^avg(0) for every (N, seed) pair and fit the decay rate of the
/// median magnitude. Requires at least three N values, strictly increasing.
ScalingStudy scaling_study(const meanfield::ReferenceDensity& density,
                           std::span<const std::size_t> n_values,
                           std::span<const std::uint64_t> seeds);

/// Median of |values| (copy-and-sort; even sizes average the middle pair).
double median_abs(std::span<const double> values);

}  // namespace sampling
}  // namespace mflab
