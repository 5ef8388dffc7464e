#include <doctest.h>

#include "qins/krylov.hpp"

#include <Eigen/Dense>

#include <random>

using namespace qins;

namespace {

Eigen::MatrixXd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng) / std::sqrt(n);
  a.diagonal().array() += 3.0;
  return a;
}

}  // namespace

TEST_CASE("GMRES matches a dense solve") {
  const int n = 80;
  const Eigen::MatrixXd a = random_matrix(n, 1);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  const Eigen::VectorXd exact = a.partialPivLu().solve(b);
  const LinearMap op = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };

  const GmresResult plain = gmres(op, {}, b, Eigen::VectorXd::Zero(n));
  CHECK(plain.converged);
  CHECK(plain.rel_residual <= 1e-12);
  CHECK((plain.x - exact).norm() < 1e-10 * exact.norm());

  const Eigen::VectorXd dinv = a.diagonal().cwiseInverse();
  const LinearMap jacobi = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(dinv.cwiseProduct(x)); };
  const GmresResult pre = gmres(op, jacobi, b, Eigen::VectorXd::Zero(n));
  CHECK(pre.converged);
  CHECK((pre.x - exact).norm() < 1e-10 * exact.norm());
}

TEST_CASE("GMRES restarts") {
  const int n = 120;
  const Eigen::MatrixXd a = random_matrix(n, 2);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  const LinearMap op = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
  const GmresResult r = gmres(op, {}, b, Eigen::VectorXd::Zero(n), {1e-12, 5, 2000});
  CHECK(r.converged);
  CHECK((a * r.x - b).norm() <= 1.01e-12 * b.norm());
}

TEST_CASE("GMRES edge cases") {
  const int n = 10;
  const LinearMap id = [](const Eigen::VectorXd& x) { return x; };
  const Eigen::VectorXd b = Eigen::VectorXd::Random(n);
  const GmresResult r = gmres(id, {}, b, Eigen::VectorXd::Zero(n));
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK((r.x - b).norm() < 1e-15);

  const GmresResult z = gmres(id, {}, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n));
  CHECK(z.converged);
  CHECK(z.x.norm() == 0.0);

  const Eigen::MatrixXd a = random_matrix(60, 3);
  const LinearMap op = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
  const GmresResult capped = gmres(op, {}, Eigen::VectorXd::Ones(60), Eigen::VectorXd::Zero(60),
                                   {1e-14, 3, 3});
  CHECK_FALSE(capped.converged);
  CHECK(capped.rel_residual > 1e-14);
}
