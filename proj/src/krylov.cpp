#include "qins/krylov.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace qins {

GmresResult gmres(const LinearMap& a, const LinearMap& precond, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& x0, const GmresOptions& opt) {
  auto apply_m = [&](const Eigen::VectorXd& v) { return precond ? precond(v) : v; };
  GmresResult res;
  res.x = x0;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  const int m = opt.restart;
  const Eigen::Index n = b.size();
  Eigen::MatrixXd v(n, m + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), s(m + 1);

  Eigen::VectorXd r = b - a(res.x);
  double rnorm = r.norm();
  res.rel_residual = rnorm / bnorm;
  while (res.iterations < opt.max_iter) {
    if (res.rel_residual <= opt.tol) {
      res.converged = true;
      return res;
    }
    v.col(0) = r / rnorm;
    s.setZero();
    s[0] = rnorm;
    h.setZero();
    int j = 0;
    for (; j < m && res.iterations < opt.max_iter; ++j) {
      ++res.iterations;
      Eigen::VectorXd w = a(apply_m(v.col(j)));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v.col(i));
        w -= h(i, j) * v.col(i);
      }
      // Second Gram-Schmidt pass keeps the basis orthogonal at tight tolerances.
      for (int i = 0; i <= j; ++i) {
        const double d = w.dot(v.col(i));
        h(i, j) += d;
        w -= d * v.col(i);
      }
      const double hnext = w.norm();
      h(j + 1, j) = hnext;
      if (hnext > 0.0) v.col(j + 1) = w / hnext;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = h(j, j) / denom;
      sn[j] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      s[j + 1] = -sn[j] * s[j];
      s[j] = cs[j] * s[j];
      if (std::abs(s[j + 1]) / bnorm <= 0.1 * opt.tol || hnext == 0.0) {
        ++j;
        break;
      }
    }
    const Eigen::VectorXd y =
        h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(s.head(j));
    res.x += apply_m(v.leftCols(j) * y);
    r = b - a(res.x);
    rnorm = r.norm();
    res.rel_residual = rnorm / bnorm;
  }
  res.converged = res.rel_residual <= opt.tol;
  return res;
}

}  // namespace qins
