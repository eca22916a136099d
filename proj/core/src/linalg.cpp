#include "ddsim/linalg.hpp"

namespace ddsim {

Matrix4c kron2(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

double hermiticity_error(const Matrix4c& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix4c& a) {
  const Matrix4c h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix4c hermitian_expm(const Matrix4c& h, cplx scale) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  Vector4c phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::exp(scale * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace ddsim
