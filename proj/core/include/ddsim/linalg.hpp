#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ddsim {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

inline constexpr cplx ci{0.0, 1.0};

/// Kronecker product of two single-spin operators; spin 1 is the left factor.
Matrix4c kron2(const Matrix2c& a, const Matrix2c& b);

/// max_ij |a - a^dagger|
double hermiticity_error(const Matrix4c& a);

/// smallest eigenvalue of the Hermitian part of a
double min_eigenvalue(const Matrix4c& a);

/// exp(scale * h) for Hermitian h, via eigendecomposition (exact to roundoff)
Matrix4c hermitian_expm(const Matrix4c& h, cplx scale);

}  // namespace ddsim
