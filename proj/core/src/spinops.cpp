#include "ddsim/spinops.hpp"

#include <cmath>
#include <stdexcept>

namespace ddsim::spinops {

namespace {

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}
Matrix2c pauli_y() {
  Matrix2c m;
  m << 0, -ci, ci, 0;
  return m;
}
Matrix2c pauli_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix4c embed(const Matrix2c& op, int spin) {
  const Matrix2c id = Matrix2c::Identity();
  return spin == 1 ? kron2(op, id) : kron2(id, op);
}

}  // namespace

const Matrix4c& ix(int spin) {
  static const Matrix4c m1 = embed(0.5 * pauli_x(), 1);
  static const Matrix4c m2 = embed(0.5 * pauli_x(), 2);
  return spin == 1 ? m1 : m2;
}

const Matrix4c& iy(int spin) {
  static const Matrix4c m1 = embed(0.5 * pauli_y(), 1);
  static const Matrix4c m2 = embed(0.5 * pauli_y(), 2);
  return spin == 1 ? m1 : m2;
}

const Matrix4c& iz(int spin) {
  static const Matrix4c m1 = embed(0.5 * pauli_z(), 1);
  static const Matrix4c m2 = embed(0.5 * pauli_z(), 2);
  return spin == 1 ? m1 : m2;
}

Matrix4c ix_total() { return ix(1) + ix(2); }
Matrix4c iy_total() { return iy(1) + iy(2); }
Matrix4c iz_total() { return iz(1) + iz(2); }

const Matrix4c& scalar_coupling() {
  static const Matrix4c m =
      ix(1) * ix(2) + iy(1) * iy(2) + iz(1) * iz(2);
  return m;
}

namespace {

Matrix4c target_op(const Matrix4c& op1, const Matrix4c& op2, SpinTarget t) {
  switch (t) {
    case SpinTarget::spin1: return op1;
    case SpinTarget::spin2: return op2;
    case SpinTarget::both: return op1 + op2;
  }
  throw std::logic_error("bad SpinTarget");
}

}  // namespace

Matrix4c rotation_xy(double angle, double phase, SpinTarget target) {
  const Matrix4c gen = std::cos(phase) * target_op(ix(1), ix(2), target) +
                       std::sin(phase) * target_op(iy(1), iy(2), target);
  return hermitian_expm(gen, -ci * angle);
}

Matrix4c rotation_z(double angle, SpinTarget target) {
  return hermitian_expm(target_op(iz(1), iz(2), target), -ci * angle);
}

// ---------------------------------------------------------------------------

Vector4c state_vector(State s) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector4c v = Vector4c::Zero();
  switch (s) {
    case State::S0:        v(1) = r;  v(2) = -r; break;
    case State::T_plus1:   v(0) = 1; break;
    case State::T0:        v(1) = r;  v(2) = r; break;
    case State::T_minus1:  v(3) = 1; break;
    case State::psi_plus:  v(1) = r;  v(2) = r; break;
    case State::phi_plus:  v(0) = r;  v(3) = r; break;
    case State::phi_minus: v(0) = r;  v(3) = -r; break;
    case State::k00: v(0) = 1; break;
    case State::k01: v(1) = 1; break;
    case State::k10: v(2) = 1; break;
    case State::k11: v(3) = 1; break;
  }
  return v;
}

const std::vector<NamedState>& canonical_states() {
  static const std::vector<NamedState> table = {
      {"S0", state_vector(State::S0)},
      {"T+1", state_vector(State::T_plus1)},
      {"T0", state_vector(State::T0)},
      {"T-1", state_vector(State::T_minus1)},
      {"psi_plus", state_vector(State::psi_plus)},
      {"phi_plus", state_vector(State::phi_plus)},
      {"phi_minus", state_vector(State::phi_minus)},
      {"00", state_vector(State::k00)},
      {"01", state_vector(State::k01)},
      {"10", state_vector(State::k10)},
      {"11", state_vector(State::k11)},
  };
  return table;
}

Vector4c state_by_label(const std::string& label) {
  for (const auto& s : canonical_states()) {
    if (s.label == label) return s.psi;
  }
  throw std::invalid_argument("unknown state label: " + label);
}

// ---------------------------------------------------------------------------

Matrix4c projector(const Vector4c& psi) { return psi * psi.adjoint(); }

DensityMatrix pseudopure(const Vector4c& psi, const PseudopureParams& params) {
  const double eps = params.epsilon;
  if (!(eps > 0.0) || eps > 1.0) {
    throw std::invalid_argument("pseudopure: epsilon must be in (0, 1]");
  }
  DensityMatrix rho;
  rho.m = (1.0 - eps) / 4.0 * Matrix4c::Identity() + eps * projector(psi);
  return rho;
}

Matrix4c deviation(const Matrix4c& rho) {
  return rho - rho.trace() / 4.0 * Matrix4c::Identity();
}

double correlation(const Matrix4c& rho, const Matrix4c& target) {
  const Matrix4c a = deviation(rho);
  const Matrix4c b = deviation(target);
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-14 || nb < 1e-14) {
    throw std::domain_error("correlation: degenerate state (traceless part vanishes)");
  }
  const double inner = (a.adjoint() * b).trace().real();
  return inner / (na * nb);
}

double correlation(const Matrix4c& rho, const Vector4c& target) {
  return correlation(rho, projector(target));
}

// ---------------------------------------------------------------------------

namespace {

const std::array<Matrix2c, 4>& pauli_table() {
  static const std::array<Matrix2c, 4> t = {Matrix2c::Identity(), pauli_x(),
                                            pauli_y(), pauli_z()};
  return t;
}

constexpr char kPauliNames[] = "IXYZ";

}  // namespace

std::array<PauliExpectation, 15> pauli_expectations(const Matrix4c& rho) {
  std::array<PauliExpectation, 15> out;
  std::size_t k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      const Matrix4c p = kron2(pauli_table()[a], pauli_table()[b]);
      out[k].label = {kPauliNames[a], kPauliNames[b]};
      out[k].value = (rho * p).trace().real();
      ++k;
    }
  }
  return out;
}

Matrix4c from_pauli_expectations(const std::array<PauliExpectation, 15>& values) {
  Matrix4c rho = Matrix4c::Identity();
  std::size_t k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      rho += values[k].value * kron2(pauli_table()[a], pauli_table()[b]);
      ++k;
    }
  }
  return 0.25 * rho;
}

}  // namespace ddsim::spinops
