#include <Eigen/Eigenvalues>

#include "indiff/errors.hpp"
#include "indiff/solver.hpp"

namespace indiff {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
// polynomials: nodes are its eigenvalues, weights the squared first
// components of the normalized eigenvectors.
Quadrature Quadrature::gauss_hermite(int m) {
  if (m < 1 || m > 64) throw ValidationError("solver: quadrature needs 1 <= m <= 64 nodes");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Quadrature q;
  q.nodes.resize(m);
  q.weights.resize(m);
  for (int k = 0; k < m; ++k) {
    q.nodes[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    q.weights[k] = v * v;
  }
  // exact symmetry
  for (int k = 0; k < m / 2; ++k) {
    const int r = m - 1 - k;
    const double x = 0.5 * (q.nodes[r] - q.nodes[k]);
    const double w = 0.5 * (q.weights[k] + q.weights[r]);
    q.nodes[k] = -x;
    q.nodes[r] = x;
    q.weights[k] = q.weights[r] = w;
  }
  if (m % 2 == 1) q.nodes[m / 2] = 0.0;
  double total = 0.0;
  for (double w : q.weights) total += w;
  for (double& w : q.weights) w /= total;
  return q;
}

}  // namespace indiff
