#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mflab {

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Computed once by Newton iteration on the Legendre recurrence and cached.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendre& get(int n);
};

/// Fixed n-point Gauss-Legendre integral of f over [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 15);

/// Adaptive Gauss-Legendre on [a, b] with absolute tolerance `abs_tol`:
/// an interval is accepted when the 15-point and bisected estimates agree.
double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                   double abs_tol = 1e-10, int max_depth = 40);

/// Same, with interior breakpoints (kinks of piecewise-analytic integrands).
double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                   std::span<const double> breakpoints, double abs_tol = 1e-10);

/// Quadrature rule on the unit sphere S^{d-1}. Weights sum to 1, i.e. the
/// rule approximates the average over the sphere; multiply by the surface
/// area for unnormalized integrals.
struct SphereQuadrature {
  int dim = 3;
  int degree = 0;                // polynomial exactness (0 = statistical only)
  std::vector<double> nodes;     // flattened, node k at [k*dim, (k+1)*dim)
  std::vector<double> weights;   // sum to 1

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const {
    return std::span<const double>(nodes).subspan(k * dim, dim);
  }

  /// d = 3: smallest octahedrally-symmetric rule with exactness >= q_order
  /// (orders 3, 5, 7, 11 -> 6, 14, 26, 50 nodes; default q_order 7).
  /// d >= 4: seeded Kronecker-lattice points mapped to the sphere, equal
  /// weights (`qmc_nodes` of them; default 512).
  static SphereQuadrature standard(int dim, int q_order = 7, int qmc_nodes = 512,
                                   std::uint64_t seed = 1);

  /// Octahedral rule in d = 3 only; q_order in {3, 5, 7, 11}.
  static SphereQuadrature lebedev(int q_order);

  /// Seeded equal-weight quasi-Monte Carlo nodes, any d >= 2.
  static SphereQuadrature qmc(int dim, int nodes, std::uint64_t seed);

  /// Product rule: Gauss-Legendre in each polar angle, trapezoid in azimuth.
  /// Exact for spherical harmonics of degree < min(2*n_polar, n_azimuth).
  static SphereQuadrature product(int dim, int n_polar, int n_azimuth);
};

/// Surface area of the unit sphere S^{d-1} in R^d.
double sphere_surface_area(int dim);

/// Volume of the unit ball in R^d.
double ball_volume(int dim);

}  // namespace mflab
