#include "mflab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "mflab/rng.hpp"
#include "mflab/vecops.hpp"

namespace mflab {

namespace {

GaussLegendre compute_gl(int n) {
  GaussLegendre r;
  r.nodes.resize(n);
  r.weights.resize(n);
  // Newton iteration from the Chebyshev-like initial guess; standard
  // symmetric construction, fine in double up to a few hundred points.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

std::mutex g_gl_mutex;
std::map<int, GaussLegendre> g_gl_cache;

}  // namespace

const GaussLegendre& GaussLegendre::get(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
  std::lock_guard<std::mutex> lock(g_gl_mutex);
  auto it = g_gl_cache.find(n);
  if (it == g_gl_cache.end()) it = g_gl_cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const auto& gl = GaussLegendre::get(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  KahanSum s;
  for (int i = 0; i < n; ++i) s.add(gl.weights[i] * f(mid + half * gl.nodes[i]));
  return half * s.value();
}

namespace {

double adaptive_gl_rec(const std::function<double(double)>& f, double a, double b,
                       double whole, double tol, int depth, int max_depth) {
  double m = 0.5 * (a + b);
  double left = gl_integrate(f, a, m);
  double right = gl_integrate(f, m, b);
  double refined = left + right;
  if (depth >= max_depth || std::abs(refined - whole) <= tol) return refined;
  return adaptive_gl_rec(f, a, m, left, 0.5 * tol, depth + 1, max_depth) +
         adaptive_gl_rec(f, m, b, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                   double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adaptive_gl_rec(f, a, b, gl_integrate(f, a, b), abs_tol, 0, max_depth);
}

double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                   std::span<const double> breakpoints, double abs_tol) {
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  KahanSum s;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    s.add(adaptive_gl(f, cuts[i], cuts[i + 1], abs_tol));
  return s.value();
}

double sphere_surface_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double ball_volume(int dim) { return sphere_surface_area(dim) / dim; }

namespace {

void push_node(SphereQuadrature& q, double x, double y, double z, double w) {
  q.nodes.push_back(x);
  q.nodes.push_back(y);
  q.nodes.push_back(z);
  q.weights.push_back(w);
}

// Octahedral point groups: all sign/coordinate permutations of a generator.
void gen_vertices(SphereQuadrature& q, double w) {  // (±1, 0, 0): 6 points
  for (int a = 0; a < 3; ++a)
    for (int s = -1; s <= 1; s += 2) {
      double p[3] = {0, 0, 0};
      p[a] = s;
      push_node(q, p[0], p[1], p[2], w);
    }
}

void gen_edge_mid(SphereQuadrature& q, double w) {  // (±1, ±1, 0)/√2: 12 points
  double c = std::numbers::sqrt2 / 2.0;
  for (int a = 0; a < 3; ++a)
    for (int s1 = -1; s1 <= 1; s1 += 2)
      for (int s2 = -1; s2 <= 1; s2 += 2) {
        double p[3] = {0, 0, 0};
        p[a] = s1 * c;
        p[(a + 1) % 3] = s2 * c;
        push_node(q, p[0], p[1], p[2], w);
      }
}

void gen_corners(SphereQuadrature& q, double w) {  // (±1, ±1, ±1)/√3: 8 points
  double c = 1.0 / std::sqrt(3.0);
  for (int s1 = -1; s1 <= 1; s1 += 2)
    for (int s2 = -1; s2 <= 1; s2 += 2)
      for (int s3 = -1; s3 <= 1; s3 += 2) push_node(q, s1 * c, s2 * c, s3 * c, w);
}

void gen_b_class(SphereQuadrature& q, double l, double m, double w) {
  // (±l, ±l, ±m) and coordinate permutations: 24 points
  for (int a = 0; a < 3; ++a)
    for (int s1 = -1; s1 <= 1; s1 += 2)
      for (int s2 = -1; s2 <= 1; s2 += 2)
        for (int s3 = -1; s3 <= 1; s3 += 2) {
          double p[3];
          p[a] = s3 * m;
          p[(a + 1) % 3] = s1 * l;
          p[(a + 2) % 3] = s2 * l;
          push_node(q, p[0], p[1], p[2], w);
        }
}

}  // namespace

SphereQuadrature SphereQuadrature::lebedev(int q_order) {
  SphereQuadrature q;
  q.dim = 3;
  if (q_order <= 3) {
    q.degree = 3;
    gen_vertices(q, 1.0 / 6.0);
  } else if (q_order <= 5) {
    q.degree = 5;
    gen_vertices(q, 1.0 / 15.0);
    gen_corners(q, 3.0 / 40.0);
  } else if (q_order <= 7) {
    q.degree = 7;
    gen_vertices(q, 1.0 / 21.0);
    gen_edge_mid(q, 4.0 / 105.0);
    gen_corners(q, 27.0 / 840.0);
  } else if (q_order <= 11) {
    // McLaren's 50-point degree-11 octahedral rule.
    q.degree = 11;
    gen_vertices(q, 9216.0 / 725760.0);
    gen_edge_mid(q, 16384.0 / 725760.0);
    gen_corners(q, 15309.0 / 725760.0);
    gen_b_class(q, std::sqrt(1.0 / 11.0), 3.0 * std::sqrt(1.0 / 11.0),
                14641.0 / 725760.0);
  } else {
    throw std::invalid_argument("SphereQuadrature::lebedev: q_order must be <= 11");
  }
  return q;
}

SphereQuadrature SphereQuadrature::qmc(int dim, int nodes, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("SphereQuadrature::qmc: dim must be >= 2");
  if (nodes < 1) throw std::invalid_argument("SphereQuadrature::qmc: nodes must be >= 1");
  SphereQuadrature q;
  q.dim = dim;
  q.degree = 0;
  q.nodes.reserve(static_cast<std::size_t>(nodes) * dim);
  q.weights.assign(nodes, 1.0 / nodes);

  // Kronecker lattice u_k = frac(offset + k*alpha) with the generalized
  // golden-ratio generator, mapped to the sphere by Box-Muller pairs.
  int m = 2 * ((dim + 1) / 2);
  double phi = 1.0;  // root of x^{m+1} = x + 1
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (m + 1));
  std::vector<double> alpha(m), offset(m);
  for (int j = 0; j < m; ++j) alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  Pcg32 rng(seed, 0x5eedc0de);
  for (int j = 0; j < m; ++j) offset[j] = rng.next_double();

  std::vector<double> u(m), gauss(m), p(dim);
  for (int k = 0; k < nodes; ++k) {
    for (int j = 0; j < m; ++j) {
      u[j] = std::fmod(offset[j] + (k + 1) * alpha[j], 1.0);
      if (u[j] <= 0.0) u[j] += 1.0;
    }
    for (int j = 0; j < m; j += 2) {
      double u1 = std::max(u[j], 1e-300);
      double r = std::sqrt(-2.0 * std::log(u1));
      double th = 2.0 * std::numbers::pi * u[j + 1];
      gauss[j] = r * std::cos(th);
      gauss[j + 1] = r * std::sin(th);
    }
    double nrm = 0.0;
    for (int j = 0; j < dim; ++j) nrm += gauss[j] * gauss[j];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) {  // essentially impossible; nudge deterministically
      gauss[0] = 1.0;
      nrm = 1.0;
    }
    for (int j = 0; j < dim; ++j) q.nodes.push_back(gauss[j] / nrm);
  }
  return q;
}

SphereQuadrature SphereQuadrature::product(int dim, int n_polar, int n_azimuth) {
  if (dim < 2) throw std::invalid_argument("SphereQuadrature::product: dim must be >= 2");
  SphereQuadrature q;
  q.dim = dim;
  // Exactness bookkeeping is only meaningful where the polar weight
  // (1-t^2)^{(d-3)/2} is itself polynomial; report 0 elsewhere.
  q.degree = (dim <= 3 || dim % 2 == 1) ? std::min(2 * n_polar - 1 - std::max(0, dim - 3),
                                                   n_azimuth - 1)
                                        : 0;
  if (dim == 2) {
    // Uniform angles on the circle; exact for harmonics of degree < n_azimuth.
    for (int k = 0; k < n_azimuth; ++k) {
      double th = 2.0 * std::numbers::pi * (k + 0.5) / n_azimuth;
      q.nodes.push_back(std::cos(th));
      q.nodes.push_back(std::sin(th));
      q.weights.push_back(1.0 / n_azimuth);
    }
    return q;
  }
  // S^{d-1} = GL in t = cos(theta) with weight (1-t^2)^{(d-3)/2}, times S^{d-2}.
  SphereQuadrature sub = product(dim - 1, n_polar, n_azimuth);
  const auto& gl = GaussLegendre::get(n_polar);
  double wsum = 0.0;
  std::vector<double> tw(n_polar);
  for (int i = 0; i < n_polar; ++i) {
    tw[i] = gl.weights[i] * std::pow(1.0 - gl.nodes[i] * gl.nodes[i], 0.5 * (dim - 3));
    wsum += tw[i];
  }
  for (int i = 0; i < n_polar; ++i) {
    double t = gl.nodes[i];
    double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t k = 0; k < sub.size(); ++k) {
      auto n = sub.node(k);
      q.nodes.push_back(t);  // polar axis is the first coordinate
      for (int j = 0; j < dim - 1; ++j) q.nodes.push_back(s * n[j]);
      q.weights.push_back((tw[i] / wsum) * sub.weights[k]);
    }
  }
  return q;
}

SphereQuadrature SphereQuadrature::standard(int dim, int q_order, int qmc_nodes,
                                            std::uint64_t seed) {
  if (dim < 3) throw std::invalid_argument("SphereQuadrature::standard: dim must be >= 3");
  if (dim == 3) return lebedev(q_order);
  return qmc(dim, qmc_nodes, seed);
}

}  // namespace mflab
