#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddsim/linalg.hpp"

namespace ddsim::spinops {

// Two spin-1/2 nuclei, basis ordered {|00>,|01>,|10>,|11>}, spin 1 left
// factor, hbar = 1. Angular momentum operators I = sigma/2, so each
// generator has eigenvalues +-1/2 and [Ix,Iy] = i Iz on each spin factor.

enum class SpinTarget { spin1, spin2, both };

const Matrix4c& ix(int spin);  // spin in {1,2}
const Matrix4c& iy(int spin);
const Matrix4c& iz(int spin);
Matrix4c ix_total();
Matrix4c iy_total();
Matrix4c iz_total();

/// scalar coupling I1.I2; eigenvalues {+1/4 (x3), -3/4}
const Matrix4c& scalar_coupling();

/// exp(-i angle (cos(phase) Ix + sin(phase) Iy)) restricted to `target`
Matrix4c rotation_xy(double angle, double phase, SpinTarget target);
/// exp(-i angle Iz) restricted to `target`
Matrix4c rotation_z(double angle, SpinTarget target);

// ---------------------------------------------------------------------------
// canonical states

enum class State {
  S0,        // (|01> - |10>)/sqrt(2)
  T_plus1,   // |00>
  T0,        // (|01> + |10>)/sqrt(2)
  T_minus1,  // |11>
  psi_plus,  // (|01> + |10>)/sqrt(2)
  phi_plus,  // (|00> + |11>)/sqrt(2)
  phi_minus, // (|00> - |11>)/sqrt(2)
  k00, k01, k10, k11,
};

struct NamedState {
  std::string label;
  Vector4c psi;
};

Vector4c state_vector(State s);
const std::vector<NamedState>& canonical_states();
/// lookup by label ("S0", "T0", "psi_plus", "00", ...); throws std::invalid_argument
Vector4c state_by_label(const std::string& label);

// ---------------------------------------------------------------------------
// density matrices

struct PseudopureParams {
  double epsilon = 1.0;  // purity fraction in (0, 1]
};

struct DensityMatrix {
  Matrix4c m = Matrix4c::Zero();
  std::string label;
};

Matrix4c projector(const Vector4c& psi);

/// (1-eps)/4 * 1 + eps |psi><psi|; throws std::invalid_argument for eps outside (0,1]
DensityMatrix pseudopure(const Vector4c& psi, const PseudopureParams& params);

/// rho - (tr rho / 4) * 1
Matrix4c deviation(const Matrix4c& rho);

/// Normalized real Frobenius overlap of the traceless parts,
///   c = <A,B>_F / (|A| |B|),  A = deviation(rho), B = deviation(|psi><psi|).
/// Insensitive to scale of rho (so to the pseudopure epsilon and to overall
/// magnetization decay). Throws std::domain_error when |A| < 1e-14.
double correlation(const Matrix4c& rho, const Vector4c& target);
/// same metric against an arbitrary target matrix (deviation taken of both)
double correlation(const Matrix4c& rho, const Matrix4c& target);

struct PauliExpectation {
  std::string label;  // "IX", "ZZ", ... spin-1 letter first
  double value;
};

/// Expectation values of the 15 traceless products sigma_a^1 sigma_b^2,
/// (a,b) != (I,I), in fixed enumeration order.
std::array<PauliExpectation, 15> pauli_expectations(const Matrix4c& rho);

/// rebuild rho = 1/4 (1 + sum <P> P) from the 15 expectation values
Matrix4c from_pauli_expectations(const std::array<PauliExpectation, 15>& values);

}  // namespace ddsim::spinops
