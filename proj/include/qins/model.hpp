#pragma once

#include "qins/fields.hpp"

namespace qins {

/// Linear closures nu(c) = nu1 (1 + c)/2 + nu2 (1 - c)/2, eta likewise, on the clamped c.
struct Closures {
  double nu1 = 1.0;
  double nu2 = 1.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double gamma = 0.0;  // free slip in every discrete geometry
};

struct PhysParams {
  double alpha = 1.5;
  double beta = -0.5;
  double epsilon = 1.0;
  double eps0 = 0.1;
  Closures closures;

  /// Full admissibility check; throws std::invalid_argument naming the violated condition.
  void validate() const;
  /// Only the beta != 0 and positivity conditions used by the linear operators.
  void validate_linear() const;

  /// alpha, beta from the pure-phase densities rho1 (c = 1) and rho2 (c = -1).
  static PhysParams from_densities(double rho1, double rho2);
};

/// C3 saturation of c onto [-1-eps0, 1+eps0]: identity inside, quintic-smoothstep
/// slope roll-off over a band of width eps0/2 outside.
double smooth_clamp(double c, double eps0);
double smooth_clamp_derivative(double c, double eps0);

double rho_hat(double c, const PhysParams& p);
double drho_dc(double c, const PhysParams& p);
double nu(double c, const PhysParams& p);
double eta(double c, const PhysParams& p);
double Phi(double c);
double phi(double c);

ScalarField rho_hat(const ScalarField& c, const PhysParams& p);
ScalarField drho_dc(const ScalarField& c, const PhysParams& p);
ScalarField nu(const ScalarField& c, const PhysParams& p);
ScalarField eta(const ScalarField& c, const PhysParams& p);
ScalarField phi(const ScalarField& c);

struct DerivativeIdentityReport {
  double drho_residual = 0.0;   // max |d rho/dc + beta rho^2|
  double drhoc_residual = 0.0;  // max |d(rho c)/dc - alpha rho^2|
};

/// Central differences (step h) against the closed forms; requires |c| <= 1 + eps0.
DerivativeIdentityReport rho_c_derivative_identity_check(const ScalarField& c, const PhysParams& p,
                                                         double h = 1e-5);

struct MaterialState {
  VectorField v;
  ScalarField c;
};

enum class ProductRule { Collocation, Dealiased };

/// S = 2 nu(c) Dv + eta(c) div v I; with `scaled`, nu and eta are divided by rho_hat(c).
TensorField stress(const ScalarField& c, const VectorField& v, const PhysParams& p, bool scaled,
                   ProductRule rule = ProductRule::Collocation);
/// Same with explicit coefficient fields.
TensorField stress(const ScalarField& nu_f, const ScalarField& eta_f, const VectorField& v,
                   ProductRule rule = ProductRule::Collocation);

/// mu0 = G(div v) / beta.
ScalarField chem_potential_mu0(const VectorField& v, const PhysParams& p);

struct PressureResult {
  ScalarField g0;
  double pbar = 0.0;
  double residual = 0.0;  // relative residual of the pressure relation
};

PressureResult pressure_recover(const MaterialState& s, const PhysParams& p);

double free_energy(const ScalarField& c, const PhysParams& p);
double kinetic_energy(const MaterialState& s, const PhysParams& p);
double total_energy(const MaterialState& s, const PhysParams& p);

}  // namespace qins
