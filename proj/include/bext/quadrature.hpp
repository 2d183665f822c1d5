#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "bext/errors.hpp"

namespace bext {

/// n-point Gauss rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the monic
/// Jacobi polynomials.
inline GaussRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw UsageError("gauss_jacobi: need at least one node");
  if (!(a > -1) || !(b > -1)) throw UsageError("gauss_jacobi: exponents must exceed -1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    J(k, k) = (k == 0) ? (b - a) / (ab + 2) : (b * b - a * a) / (s * (s + 2));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double t = 2.0 * m + ab;
      double num = 4 * m * (m + a) * (m + b) * (m + ab);
      double den = t * t * (t + 1) * (t - 1);
      J(k, k + 1) = J(k + 1, k) = std::sqrt(num / den);
    }
  }
  const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(ab + 2));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  if (eig.info() != Eigen::Success) throw SolverError("gauss_jacobi: eigen-decomposition failed");
  GaussRule rule;
  for (int k = 0; k < n; ++k) {
    rule.nodes.push_back(eig.eigenvalues()(k));
    double v0 = eig.eigenvectors()(0, k);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

inline GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0, 0); }

}  // namespace bext
