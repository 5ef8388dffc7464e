#pragma once

#include <Eigen/Core>

#include <functional>

namespace qins {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresOptions {
  double tol = 1e-12;  // relative residual
  int restart = 50;
  int max_iter = 500;
};

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning: solves A x = b using A M^-1 y = b, x = M^-1 y.
/// `precond` applies M^-1; pass an empty function for none.
GmresResult gmres(const LinearMap& a, const LinearMap& precond, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& x0, const GmresOptions& opt = {});

}  // namespace qins
