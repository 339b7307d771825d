#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mflab::detail {

// Dormand-Prince 5(4) tableau (the classic FSAL pair).
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                        kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                        kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
inline constexpr double kE1 = 5179.0 / 57600, kE3 = 7571.0 / 16695, kE4 = 393.0 / 640,
                        kE5 = -92097.0 / 339200, kE6 = 187.0 / 2100, kE7 = 1.0 / 40;

struct Dopri5Work {
  std::vector<double> k2, k3, k4, k5, k6, ytmp;
  void resize(std::size_t n) {
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    k5.resize(n);
    k6.resize(n);
    ytmp.resize(n);
  }
};

/// One embedded step from y with slope k1 = f(y). Fills ynew and
/// k7 = f(ynew) (reusable as the next k1 when the step is accepted) and
/// returns the scaled RMS error of the 5(4) pair.
template <class F>
double dopri5_step(F&& f, const std::vector<double>& y, const std::vector<double>& k1,
                   double dt, double rel_tol, double abs_tol, std::vector<double>& ynew,
                   std::vector<double>& k7, Dopri5Work& w) {
  const std::size_t n = y.size();
  w.resize(n);
  ynew.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + dt * kA21 * k1[i];
  f(w.ytmp, w.k2);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + dt * (kA31 * k1[i] + kA32 * w.k2[i]);
  f(w.ytmp, w.k3);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + dt * (kA41 * k1[i] + kA42 * w.k2[i] + kA43 * w.k3[i]);
  f(w.ytmp, w.k4);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] =
        y[i] + dt * (kA51 * k1[i] + kA52 * w.k2[i] + kA53 * w.k3[i] + kA54 * w.k4[i]);
  f(w.ytmp, w.k5);
  for (std::size_t i = 0; i < n; ++i)
    w.ytmp[i] = y[i] + dt * (kA61 * k1[i] + kA62 * w.k2[i] + kA63 * w.k3[i] +
                             kA64 * w.k4[i] + kA65 * w.k5[i]);
  f(w.ytmp, w.k6);
  for (std::size_t i = 0; i < n; ++i)
    ynew[i] = y[i] + dt * (kB1 * k1[i] + kB3 * w.k3[i] + kB4 * w.k4[i] + kB5 * w.k5[i] +
                           kB6 * w.k6[i]);
  f(ynew, k7);

  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e5 = y[i] + dt * (kE1 * k1[i] + kE3 * w.k3[i] + kE4 * w.k4[i] +
                             kE5 * w.k5[i] + kE6 * w.k6[i] + kE7 * k7[i]);
    double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    double e = (ynew[i] - e5) / sc;
    err += e * e;
  }
  return std::sqrt(err / static_cast<double>(n));
}

}  // namespace mflab::detail
