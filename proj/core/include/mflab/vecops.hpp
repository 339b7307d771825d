#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mflab {

// Small span-based helpers for runtime-dimensional points. The dimension is
// small (d >= 3, rarely above 5), so everything stays on the stack of the
// caller; no heap traffic in hot loops.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline void sub(std::span<const double> a, std::span<const double> b,
                std::span<double> out) {
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

inline void scale(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

inline void fill(std::span<double> x, double v) {
  for (double& e : x) e = v;
}

/// Compensated (Kahan) accumulator. Used wherever a sum must be independent
/// of chunking and reproducible to the last bit for a fixed addend order.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Kahan-sum a vector in index order.
inline double kahan_total(const std::vector<double>& xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace mflab
