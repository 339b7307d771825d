#include "mflab/rotation.hpp"

#include <stdexcept>

namespace mflab {

RotationMatrix::RotationMatrix(int dim, std::vector<double> upper)
    : dim_(dim), upper_(std::move(upper)) {
  if (dim < 2) throw std::invalid_argument("RotationMatrix: dim must be >= 2");
  std::size_t expect = static_cast<std::size_t>(dim) * (dim - 1) / 2;
  if (upper_.size() != expect)
    throw std::invalid_argument("RotationMatrix: strict upper triangle needs d(d-1)/2 entries");
}

RotationMatrix RotationMatrix::rotation_block(int dim) {
  std::vector<double> u(static_cast<std::size_t>(dim) * (dim - 1) / 2, 0.0);
  u[0] = -1.0;  // J_{12} = -1, hence J_{21} = +1: J e1 = e2, J e2 = -e1
  return RotationMatrix(dim, std::move(u));
}

RotationMatrix RotationMatrix::zero(int dim) {
  return RotationMatrix(dim, std::vector<double>(static_cast<std::size_t>(dim) * (dim - 1) / 2, 0.0));
}

double RotationMatrix::entry(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return upper_[static_cast<std::size_t>(i) * dim_ - i * (i + 1) / 2 + (j - i - 1)];
  return -entry(j, i);
}

void RotationMatrix::apply(std::span<const double> x, std::span<double> out) const {
  for (int i = 0; i < dim_; ++i) out[i] = 0.0;
  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j, ++k) {
      double u = upper_[k];
      if (u == 0.0) continue;
      out[i] += u * x[j];
      out[j] -= u * x[i];
    }
  }
}

void RotationMatrix::apply_transpose(std::span<const double> x, std::span<double> out) const {
  apply(x, out);
  for (int i = 0; i < dim_; ++i) out[i] = -out[i];
}

}  // namespace mflab
