#pragma once

#include <span>
#include <vector>

namespace mflab {

/// Antisymmetric d x d matrix stored as its strict upper triangle, row-major:
/// entries J_{ij} for i < j. Antisymmetry is structural, so x . (Jx) = 0
/// holds for every x by construction.
class RotationMatrix {
 public:
  /// `upper` holds J_{ij} for (i,j) = (0,1), (0,2), ..., (d-2,d-1);
  /// must have d(d-1)/2 entries.
  RotationMatrix(int dim, std::vector<double> upper);

  /// J with a single rotation block in coordinates (1,2): J e1 = e2,
  /// J e2 = -e1, all other coordinates fixed.
  static RotationMatrix rotation_block(int dim);

  /// The zero matrix (frozen flow).
  static RotationMatrix zero(int dim);

  int dim() const { return dim_; }
  const std::vector<double>& upper() const { return upper_; }

  double entry(int i, int j) const;

  /// out = J x.
  void apply(std::span<const double> x, std::span<double> out) const;

  /// out = J^T x = -J x.
  void apply_transpose(std::span<const double> x, std::span<double> out) const;

 private:
  int dim_;
  std::vector<double> upper_;
};

}  // namespace mflab
