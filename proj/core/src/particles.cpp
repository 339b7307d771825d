#include "mflab/particles.hpp"

#include <cmath>
#include <stdexcept>

#include "mflab/errors.hpp"
#include "mflab/vecops.hpp"

namespace mflab {

ParticleConfig::ParticleConfig(Dim dim, std::vector<double> positions,
                               std::vector<double> intensities)
    : dim_(dim), positions_(std::move(positions)), intensities_(std::move(intensities)) {
  if (intensities_.empty())
    throw std::invalid_argument("ParticleConfig: at least one particle required");
  if (positions_.size() != intensities_.size() * static_cast<std::size_t>(dim_.d))
    throw std::invalid_argument("ParticleConfig: positions/intensities size mismatch");
  for (double a : intensities_)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("ParticleConfig: intensities must be strictly positive");
  for (double x : positions_)
    if (!std::isfinite(x))
      throw std::invalid_argument("ParticleConfig: non-finite position");
}

ParticleConfig ParticleConfig::mean_field(Dim dim, std::vector<double> positions) {
  std::size_t n = positions.size() / dim.d;
  return ParticleConfig(dim, std::move(positions), std::vector<double>(n, 1.0 / n));
}

bool ParticleConfig::is_mean_field() const {
  double expect = 1.0 / static_cast<double>(size());
  for (double a : intensities_)
    if (a != expect) return false;
  return true;
}

void ParticleConfig::check_distinct() const {
  std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = position(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = position(j);
      double r2 = 0.0;
      for (int k = 0; k < dim_.d; ++k) {
        double dkk = xi[k] - xj[k];
        r2 += dkk * dkk;
      }
      if (r2 <= 0.0)
        throw SingularityError(i, j, "ParticleConfig: coincident particles");
    }
  }
}

ParticleConfig ParticleConfig::with_positions(std::vector<double> positions) const {
  return ParticleConfig(dim_, std::move(positions), intensities_);
}

}  // namespace mflab
