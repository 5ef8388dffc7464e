#include "qins/model.hpp"

#include "qins/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qins {

void PhysParams::validate_linear() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("params.alpha must be positive");
  if (beta == 0.0)
    throw std::invalid_argument(
        "params.beta = 0 rejected: the reformulated system requires beta != 0 "
        "(matched densities lead to a different linearisation)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("params.epsilon must be positive");
}

void PhysParams::validate() const {
  validate_linear();
  if (!(std::abs(beta) < alpha)) throw std::invalid_argument("|params.beta| < params.alpha required");
  if (!(eps0 > 0.0)) throw std::invalid_argument("params.eps0 must be positive");
  // The clamp saturates at 1 + 1.25 eps0; the density must stay positive there.
  if (!(std::abs(beta) * (1.0 + 1.25 * eps0) < alpha))
    throw std::invalid_argument("params.eps0 too large: rho_hat would lose positivity");
  for (int k = 0; k <= 400; ++k) {
    const double c = -2.0 + 0.01 * k;
    if (!(nu(c, *this) > 0.0)) throw std::invalid_argument("closure nu must be positive");
    if (!(eta(c, *this) > 0.0)) throw std::invalid_argument("closure eta must be positive");
  }
}

PhysParams PhysParams::from_densities(double rho1, double rho2) {
  PhysParams p;
  p.alpha = 1.0 / (2.0 * rho2) + 1.0 / (2.0 * rho1);
  p.beta = 1.0 / (2.0 * rho1) - 1.0 / (2.0 * rho2);
  return p;
}

namespace {
// Quintic smoothstep and its antiderivative-based saturation profile.
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double roll(double t) {
  if (t >= 1.0) return 0.5;
  return t - t * t * t * t * (2.5 + t * (-3.0 + t));
}
}  // namespace

double smooth_clamp(double c, double eps0) {
  const double b = 1.0 + eps0;
  const double w = 0.5 * eps0;
  if (std::abs(c) <= b) return c;
  const double t = (std::abs(c) - b) / w;
  return std::copysign(b + w * roll(t), c);
}

double smooth_clamp_derivative(double c, double eps0) {
  const double b = 1.0 + eps0;
  if (std::abs(c) <= b) return 1.0;
  const double t = (std::abs(c) - b) / (0.5 * eps0);
  return t >= 1.0 ? 0.0 : 1.0 - smoothstep(t);
}

double rho_hat(double c, const PhysParams& p) {
  return 1.0 / (p.alpha + p.beta * smooth_clamp(c, p.eps0));
}

double drho_dc(double c, const PhysParams& p) {
  const double r = rho_hat(c, p);
  return -p.beta * r * r * smooth_clamp_derivative(c, p.eps0);
}

double nu(double c, const PhysParams& p) {
  const double s = smooth_clamp(c, p.eps0);
  return p.closures.nu1 * 0.5 * (1.0 + s) + p.closures.nu2 * 0.5 * (1.0 - s);
}

double eta(double c, const PhysParams& p) {
  const double s = smooth_clamp(c, p.eps0);
  return p.closures.eta1 * 0.5 * (1.0 + s) + p.closures.eta2 * 0.5 * (1.0 - s);
}

double Phi(double c) {
  const double q = c * c - 1.0;
  return 0.25 * q * q;
}

double phi(double c) { return c * c * c - c; }

ScalarField rho_hat(const ScalarField& c, const PhysParams& p) {
  return map(c, [&](double x) { return rho_hat(x, p); });
}
ScalarField drho_dc(const ScalarField& c, const PhysParams& p) {
  return map(c, [&](double x) { return drho_dc(x, p); });
}
ScalarField nu(const ScalarField& c, const PhysParams& p) {
  return map(c, [&](double x) { return nu(x, p); });
}
ScalarField eta(const ScalarField& c, const PhysParams& p) {
  return map(c, [&](double x) { return eta(x, p); });
}
ScalarField phi(const ScalarField& c) {
  return map(c, [](double x) { return phi(x); });
}

DerivativeIdentityReport rho_c_derivative_identity_check(const ScalarField& c, const PhysParams& p,
                                                         double h) {
  DerivativeIdentityReport r;
  for (Eigen::Index k = 0; k < c.values().size(); ++k) {
    const double x = c.values()[k];
    if (std::abs(x) > 1.0 + p.eps0)
      throw std::invalid_argument("identity check needs |c| <= 1 + eps0");
    const double rho = rho_hat(x, p);
    const double d1 = (rho_hat(x + h, p) - rho_hat(x - h, p)) / (2.0 * h);
    const double d2 = ((x + h) * rho_hat(x + h, p) - (x - h) * rho_hat(x - h, p)) / (2.0 * h);
    r.drho_residual = std::max(r.drho_residual, std::abs(d1 + p.beta * rho * rho));
    r.drhoc_residual = std::max(r.drhoc_residual, std::abs(d2 - p.alpha * rho * rho));
  }
  return r;
}

TensorField stress(const ScalarField& nu_f, const ScalarField& eta_f, const VectorField& v,
                   ProductRule rule) {
  auto mul = [rule](const ScalarField& a, const ScalarField& b) {
    return rule == ProductRule::Dealiased ? product(a, b) : pointwise_product(a, b);
  };
  const TensorField d = sym_grad(v);
  const ScalarField dv = d.xx + d.yy;
  const ScalarField bulk = mul(eta_f, dv);
  return TensorField(2.0 * mul(nu_f, d.xx) + bulk, 2.0 * mul(nu_f, d.xy),
                     2.0 * mul(nu_f, d.yy) + bulk);
}

TensorField stress(const ScalarField& c, const VectorField& v, const PhysParams& p, bool scaled,
                   ProductRule rule) {
  ScalarField n = nu(c, p);
  ScalarField e = eta(c, p);
  if (scaled) {
    const ScalarField r = rho_hat(c, p);
    n.values() /= r.values();
    e.values() /= r.values();
  }
  return stress(n, e, v, rule);
}

ScalarField chem_potential_mu0(const VectorField& v, const PhysParams& p) {
  return (1.0 / p.beta) * g_operator(div_n(v));
}

PressureResult pressure_recover(const MaterialState& s, const PhysParams& p) {
  p.validate_linear();
  const ScalarField rho = rho_hat(s.c, p);
  const ScalarField mu0 = chem_potential_mu0(s.v, p);
  const ScalarField lap = laplacian(s.c);
  const Eigen::ArrayXd R =
      rho.values() * mu0.values() - phi(s.c).values() + p.epsilon * lap.values();
  const Eigen::ArrayXd q = R / (p.beta * rho.values().square());
  PressureResult out{ScalarField(s.c.grid()), 0.0, 0.0};
  out.pbar = -p.beta * q.mean();
  out.g0.values() = q + out.pbar / p.beta;
  const Eigen::ArrayXd lhs = rho.values() * mu0.values() + rho.values().square() * out.pbar;
  const Eigen::ArrayXd rhs = p.beta * rho.values().square() * out.g0.values() -
                             p.epsilon * lap.values() + phi(s.c).values();
  const double scale = std::max({lhs.abs().maxCoeff(), rhs.abs().maxCoeff(), 1e-300});
  out.residual = (lhs - rhs).abs().maxCoeff() / scale;
  return out;
}

double free_energy(const ScalarField& c, const PhysParams& p) {
  const double bulk = c.values().unaryExpr([](double x) { return Phi(x); }).sum() * c.grid().cell_area();
  const double grad_sq = inner_L2(grad(c), grad(c));
  return bulk + 0.5 * p.epsilon * grad_sq;
}

double kinetic_energy(const MaterialState& s, const PhysParams& p) {
  const ScalarField rho = rho_hat(s.c, p);
  const Eigen::ArrayXd speed2 = s.v[0].values().square() + s.v[1].values().square();
  return 0.5 * (rho.values() * speed2).sum() * s.c.grid().cell_area();
}

double total_energy(const MaterialState& s, const PhysParams& p) {
  return kinetic_energy(s, p) + free_energy(s.c, p);
}

}  // namespace qins
