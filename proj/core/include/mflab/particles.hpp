#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mflab/kernel.hpp"

namespace mflab {

/// Immutable snapshot of a particle configuration: N positions in R^d with
/// strictly positive intensities. In mean-field mode every intensity is 1/N.
class ParticleConfig {
 public:
  ParticleConfig(Dim dim, std::vector<double> positions, std::vector<double> intensities);

  /// Mean-field configuration: intensities 1/N.
  static ParticleConfig mean_field(Dim dim, std::vector<double> positions);

  Dim dim() const { return dim_; }
  std::size_t size() const { return intensities_.size(); }

  std::span<const double> position(std::size_t i) const {
    return std::span<const double>(positions_).subspan(i * dim_.d, dim_.d);
  }
  const std::vector<double>& positions() const { return positions_; }
  double intensity(std::size_t i) const { return intensities_[i]; }
  const std::vector<double>& intensities() const { return intensities_; }

  bool is_mean_field() const;

  /// O(N^2) scan for coincident positions; throws SingularityError naming
  /// the first offending pair. Construction does not run this (samplers
  /// guarantee distinctness); integration entry points do.
  void check_distinct() const;

  /// Copy with positions replaced (intensities and dim preserved).
  ParticleConfig with_positions(std::vector<double> positions) const;

 private:
  Dim dim_;
  std::vector<double> positions_;    // flattened, particle i at [i*d, (i+1)*d)
  std::vector<double> intensities_;  // strictly positive
};

}  // namespace mflab
