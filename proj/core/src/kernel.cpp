#include "mflab/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mflab/errors.hpp"
#include "mflab/vecops.hpp"

namespace mflab {

Dim::Dim(int dim) : d(dim) {
  if (dim < 3) throw std::invalid_argument("Dim: dimension must be >= 3");
}

namespace kernel {

double coulomb_constant(Dim d) {
  return std::tgamma(0.5 * d.d - 1.0) / (4.0 * std::pow(std::numbers::pi, 0.5 * d.d));
}

double coulomb_g_radial(double r, Dim d) {
  if (r <= 0.0) throw SingularityError("coulomb_g: evaluation at the origin");
  return coulomb_constant(d) * std::pow(r, 2.0 - d.d);
}

double coulomb_g(std::span<const double> x, Dim d) {
  return coulomb_g_radial(norm(x), d);
}

void grad_g(std::span<const double> x, Dim d, std::span<double> out) {
  double r2 = norm2(x);
  if (r2 <= 0.0) throw SingularityError("grad_g: evaluation at the origin");
  double c = -coulomb_constant(d) * (d.d - 2) * std::pow(r2, -0.5 * d.d);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = c * x[k];
}

double truncated_g_radial(double r, double eta, Dim d) {
  if (eta <= 0.0 || !std::isfinite(eta))
    throw std::invalid_argument("truncated_g: eta must be positive and finite");
  return coulomb_g_radial(std::max(r, eta), d);
}

double truncated_g(std::span<const double> x, double eta, Dim d) {
  return truncated_g_radial(norm(x), eta, d);
}

double f_eta_alpha_radial(double r, double eta, double alpha, Dim d) {
  if (!(eta > 0.0) || !(alpha > eta) || !std::isfinite(alpha))
    throw std::invalid_argument("f_eta_alpha: requires 0 < eta < alpha < inf");
  if (r >= alpha) return 0.0;
  return coulomb_g_radial(alpha, d) - coulomb_g_radial(std::max(r, eta), d);
}

double f_eta_alpha(std::span<const double> x, double eta, double alpha, Dim d) {
  return f_eta_alpha_radial(norm(x), eta, alpha, d);
}

double f_lp_norm(double eta, double alpha, double p, Dim d) {
  if (!(eta > 0.0) || !(alpha > eta))
    throw std::invalid_argument("f_lp_norm: requires 0 < eta < alpha");
  double p_max = static_cast<double>(d.d) / (d.d - 2);
  if (p < 1.0 || p >= p_max)
    throw std::invalid_argument("f_lp_norm: p must lie in [1, d/(d-2))");
  double s = sphere_surface_area(d.d);
  auto integrand = [&](double r) {
    return std::pow(std::abs(f_eta_alpha_radial(r, eta, alpha, d)), p) *
           std::pow(r, d.d - 1.0);
  };
  // The profile is constant on [0, eta] and analytic on [eta, alpha].
  double inner = std::pow(std::abs(f_eta_alpha_radial(0.0, eta, alpha, d)), p) *
                 std::pow(eta, static_cast<double>(d.d)) / d.d;
  double outer = adaptive_gl(integrand, eta, alpha, 1e-14 * std::max(1.0, inner));
  return std::pow(s * (inner + outer), 1.0 / p);
}

double smeared_dirac_integrate(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> center, double eta,
                               const SphereQuadrature& quad) {
  if (eta <= 0.0 || !std::isfinite(eta))
    throw std::invalid_argument("smeared_dirac_integrate: eta must be positive and finite");
  if (quad.dim != static_cast<int>(center.size()))
    throw std::invalid_argument("smeared_dirac_integrate: quadrature/center dim mismatch");
  std::vector<double> p(center.size());
  KahanSum s;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    auto n = quad.node(k);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = center[j] + eta * n[j];
    double v = f(p);
    if (!std::isfinite(v))
      throw std::domain_error("smeared_dirac_integrate: non-finite integrand at a node");
    s.add(quad.weights[k] * v);
  }
  return s.value();
}

RadialDensitySpec RadialDensitySpec::uniform_ball(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("uniform_ball: radius must be positive");
  RadialDensitySpec spec;
  spec.radius = R;
  spec.uniform = true;
  // All uniform-ball queries take closed-form paths; the callable is only a
  // support indicator. The actual density value 1/(v_d R^d) is dimension
  // dependent and supplied by ReferenceDensity.
  spec.rho = [R](double r) { return r <= R ? 1.0 : 0.0; };
  return spec;
}

double RadialDensitySpec::mass_within(double r, Dim d) const {
  if (r <= 0.0) return 0.0;
  if (r >= radius) return 1.0;
  if (uniform) return std::pow(r / radius, static_cast<double>(d.d));
  double s = sphere_surface_area(d.d);
  auto shell = [&](double t) { return rho(t) * s * std::pow(t, d.d - 1.0); };
  return adaptive_gl(shell, 0.0, r, 1e-12);
}

double radial_potential_radial(const RadialDensitySpec& profile, double r, Dim d) {
  double c = coulomb_constant(d);
  double R = profile.radius;
  if (profile.uniform) {
    if (r >= R) return c * std::pow(r, 2.0 - d.d);
    return c * (d.d * R * R - (d.d - 2) * r * r) / (2.0 * std::pow(R, static_cast<double>(d.d)));
  }
  if (r >= R) return c * std::pow(r, 2.0 - d.d);
  // Shell decomposition: interior mass acts as a point charge, each
  // exterior shell contributes its own surface value.
  double interior = (r > 0.0) ? coulomb_g_radial(r, d) * profile.mass_within(r, d) : 0.0;
  double s = sphere_surface_area(d.d);
  auto tail = [&](double t) {
    return coulomb_g_radial(t, d) * profile.rho(t) * s * std::pow(t, d.d - 1.0);
  };
  return interior + adaptive_gl(tail, r, R, 1e-12);
}

double radial_potential(const RadialDensitySpec& profile, std::span<const double> x, Dim d) {
  return radial_potential_radial(profile, norm(x), d);
}

double radial_potential_derivative(const RadialDensitySpec& profile, double r, Dim d) {
  if (r <= 0.0) return 0.0;
  return -(d.d - 2) * coulomb_constant(d) * std::pow(r, 1.0 - d.d) *
         profile.mass_within(r, d);
}

}  // namespace kernel
}  // namespace mflab
