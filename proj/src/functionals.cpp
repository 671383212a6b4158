#include "curvimg/functionals.hpp"

#include <cmath>

#include "curvimg/errors.hpp"

namespace curvimg {

namespace {

constexpr double kBranchEps = 1e-9;

void check_p_range(double p, int n, bool exclude_one) {
  if (p < -double(n) - 1e-12) throw ConfigError("p below -n is out of range");
  if (exclude_one && std::abs(p - 1.0) < kBranchEps)
    throw ConfigError("p = 1 is excluded");
}

// log of integral exp(t) dsigma, evaluated stably; exponents t may be huge
// when p approaches 1.
double log_integral(const Eigen::VectorXd& t, const Eigen::VectorXd& w) {
  const double tmax = t.maxCoeff();
  double acc = 0;
  for (int i = 0; i < t.size(); ++i) acc += w[i] * std::exp(t[i] - tmax);
  return tmax + std::log(acc);
}

// mean of x against the probability measure dtheta = (1/phi) dsigma, normalized
double theta_mean(const Eigen::VectorXd& x, const Density& phi) {
  const Eigen::VectorXd inv_phi = phi.values.cwiseInverse();
  const double mass = integrate(inv_phi, *phi.grid);
  return integrate(x.cwiseProduct(inv_phi), *phi.grid) / mass;
}

}  // namespace

bool is_zero_branch(double p) { return std::abs(p) < kBranchEps; }

double a_p_from_samples(double vol, const Eigen::VectorXd& h, const Density& phi,
                        double p) {
  const SphereGrid& grid = *phi.grid;
  const int n = grid.dim;
  check_p_range(p, n, false);
  if (h.size() != grid.count()) throw DimensionError("A_p: sample size mismatch");
  if (h.minCoeff() <= 0) throw GeometryError("A_p needs positive support samples");

  const Eigen::VectorXd log_h = h.array().log();
  if (is_zero_branch(p)) return vol * std::exp(-double(n) * theta_mean(log_h, phi));
  const Eigen::VectorXd t = p * log_h.array() - phi.values.array().log();
  return vol * std::exp(-double(n) / p * log_integral(t, grid.weights));
}

double b_p_from_samples(double vol, const Eigen::VectorXd& f, const Density& phi,
                        double p) {
  const SphereGrid& grid = *phi.grid;
  const int n = grid.dim;
  check_p_range(p, n, true);
  if (f.size() != grid.count()) throw DimensionError("B_p: sample size mismatch");
  if (f.minCoeff() <= 0) throw GeometryError("B_p needs positive curvature samples");

  const double v_pow = std::pow(vol, 1 - n);
  if (is_zero_branch(p)) {
    const Eigen::VectorXd log_phif =
        (phi.values.array() * f.array()).log();
    const double inv_mass = integrate(phi.values.cwiseInverse(), grid);
    return v_pow * std::exp(double(n) * theta_mean(log_phif, phi)) *
           std::pow(inv_mass, n);
  }
  const Eigen::VectorXd t =
      (phi.values.array().log() + p * f.array().log()) / (p - 1.0);
  return v_pow *
         std::exp(double(n) * (p - 1.0) / p * log_integral(t, grid.weights));
}

double omega_p_from_samples(const Eigen::VectorXd& f, const Density& phi, double p) {
  const SphereGrid& grid = *phi.grid;
  const int n = grid.dim;
  check_p_range(p, n, true);
  if (f.size() != grid.count()) throw DimensionError("Omega_p: sample size mismatch");
  if (f.minCoeff() <= 0) throw GeometryError("Omega_p needs positive curvature samples");

  if (is_zero_branch(p))
    return std::exp(double(n) * theta_mean(f.array().log(), phi));
  const Eigen::VectorXd t =
      (phi.values.array().log() + p * f.array().log()) / (p - 1.0);
  return std::exp(log_integral(t, grid.weights));
}

namespace {
void require_grid(const Body2D& k, const Density& phi) {
  if (!k.grid()->same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
}
void require_grid(const Polytope3D& k, const Density& phi) {
  if (!k.grid().same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
}
}  // namespace

double A_p(const Body2D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return a_p_from_samples(volume(k), k.support_samples(), phi, p);
}

double B_p(const Body2D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return b_p_from_samples(volume(k), k.curvature_samples(), phi, p);
}

double Omega_p(const Body2D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return omega_p_from_samples(k.curvature_samples(), phi, p);
}

double A_p(const Polytope3D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return a_p_from_samples(volume(k), k.support_numbers(), phi, p);
}

double B_p(const Polytope3D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return b_p_from_samples(volume(k), k.curvature_samples(), phi, p);
}

double Omega_p(const Polytope3D& k, const Density& phi, double p) {
  require_grid(k, phi);
  return omega_p_from_samples(k.curvature_samples(), phi, p);
}

double affine_surface_area(const Body2D& k) {
  return Omega_p(k, make_uniform_density(k.grid()), -2.0);
}

double affine_surface_area(const Polytope3D& k) {
  return Omega_p(k, make_uniform_density(k.grid_ptr()), -3.0);
}

double volume_product(const Body2D& k) {
  const Body2D centered = translate(k, -santalo_point(k));
  return volume(centered) * polar_volume(centered);
}

double volume_product(const Polytope3D& k) {
  const Polytope3D centered = translate(k, -santalo_point(k));
  return volume(centered) * polar_volume(centered);
}

}  // namespace curvimg
