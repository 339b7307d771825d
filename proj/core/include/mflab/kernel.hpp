#pragma once

#include <functional>
#include <span>

#include "mflab/quadrature.hpp"

namespace mflab {

/// Spatial dimension. The repulsive power-law potential below is the
/// fundamental solution of -Laplace only for d >= 3; d = 2 (logarithmic)
/// is out of scope.
struct Dim {
  int d;
  explicit Dim(int dim);
  operator int() const { return d; }
};

namespace kernel {

/// Normalization c_d = Gamma(d/2 - 1) / (4 pi^{d/2}), chosen so that
/// -Laplace g = delta_0 in the sense of distributions (c_3 = 1/(4 pi)).
double coulomb_constant(Dim d);

/// g(x) = c_d |x|^{2-d}, evaluated away from the origin.
/// Throws SingularityError at x = 0: callers exclude the diagonal by
/// construction, so a zero separation always indicates a bug upstream.
double coulomb_g(std::span<const double> x, Dim d);

/// Radial profile g~(r) = c_d r^{2-d} (r > 0).
double coulomb_g_radial(double r, Dim d);

/// Gradient of g: -c_d (d-2) x / |x|^d. Throws SingularityError at x = 0.
void grad_g(std::span<const double> x, Dim d, std::span<double> out);

/// Truncation of g to distance eta: equals g outside B(0, eta), frozen at
/// g~(eta) inside. Continuous and bounded by g~(eta); defined everywhere.
double truncated_g(std::span<const double> x, double eta, Dim d);
double truncated_g_radial(double r, double eta, Dim d);

/// Difference of truncations g_alpha - g_eta for 0 < eta < alpha.
/// Vanishes for |x| >= alpha and is <= 0 everywhere.
double f_eta_alpha(std::span<const double> x, double eta, double alpha, Dim d);
double f_eta_alpha_radial(double r, double eta, double alpha, Dim d);

/// L^p norm of f_{eta,alpha} over R^d by adaptive radial quadrature.
/// Requires 1 <= p < d/(d-2) (integrability of the |x|^{(2-d)p} piece).
double f_lp_norm(double eta, double alpha, double p, Dim d);

/// Integral of f against the uniform probability measure on the sphere of
/// radius eta about `center`, i.e. against the smeared Dirac delta at scale
/// eta: sum_k w_k f(center + eta n_k). Throws on a non-finite node value.
double smeared_dirac_integrate(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> center, double eta,
                               const SphereQuadrature& quad);

/// Radial density profile with compact support [0, radius]. `rho` is the
/// density value at radius r; total mass must be 1.
struct RadialDensitySpec {
  double radius;
  std::function<double(double)> rho;
  bool uniform = false;  // closed forms available for the uniform ball

  static RadialDensitySpec uniform_ball(double R);

  /// Mass within radius r (closed form for the uniform ball, quadrature
  /// otherwise).
  double mass_within(double r, Dim d) const;
};

/// Newton potential (g * rho)(x) of a unit-mass radial profile. Uniform
/// ball: c_d |x|^{2-d} outside, c_d (d R^2 - (d-2)|x|^2) / (2 R^d) inside
/// (in d = 3: 1/(4 pi |x|) and (3R^2 - |x|^2)/(8 pi R^3)). General radial
/// profiles go through the 1D shell decomposition.
double radial_potential(const RadialDensitySpec& profile, std::span<const double> x, Dim d);
double radial_potential_radial(const RadialDensitySpec& profile, double r, Dim d);

/// Radial derivative of the potential: phi'(r) = -(d-2) c_d r^{1-d} M(r),
/// with M the cumulative mass. Gradient is phi'(|x|) x/|x|.
double radial_potential_derivative(const RadialDensitySpec& profile, double r, Dim d);

}  // namespace kernel
}  // namespace mflab
