#include "ddsim/protocols.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>

namespace ddsim::protocols {

using namespace spinops;

Matrix4c prepare_initial(PreparationForm form) {
  if (form == PreparationForm::operator_form) {
    return -scalar_coupling();
  }
  return projector(state_vector(State::S0)) - projector(state_vector(State::T0));
}

// ---------------------------------------------------------------------------
// spin-lock kinetics

namespace {

const Matrix4c& bell_basis() {
  static const Matrix4c v = [] {
    Matrix4c m;
    m.col(0) = state_vector(State::S0);
    m.col(1) = state_vector(State::T_plus1);
    m.col(2) = state_vector(State::T0);
    m.col(3) = state_vector(State::T_minus1);
    return m;
  }();
  return v;
}

/// population generator on (S, T+, T0, T-), affine part from thermal recovery
Eigen::Matrix<double, 5, 5> population_generator(const SpinLockKinetics& kin) {
  Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
  const double rt = kin.triplet_mixing_rate;
  const double ex = 1.0 / kin.singlet_lifetime + kin.leak_rate;
  // triplet equilibration: dp_i = -R_T (p_i - mean_T)
  for (int i = 1; i < 4; ++i) {
    k(i, i) -= rt;
    for (int j = 1; j < 4; ++j) k(i, j) += rt / 3.0;
  }
  // singlet order exchanges with the triplet mean (traceless)
  k(0, 0) -= ex;
  for (int j = 1; j < 4; ++j) k(0, j) += ex / 3.0;
  for (int i = 1; i < 4; ++i) {
    k(i, 0) += ex / 3.0;
    for (int j = 1; j < 4; ++j) k(i, j) -= ex / 9.0;
  }
  // thermal recovery toward q (0, 1, 0, -1)
  const double r1 = kin.thermal_recovery_rate;
  Eigen::Matrix<double, 5, 5> a = Eigen::Matrix<double, 5, 5>::Zero();
  a.topLeftCorner<4, 4>() = k - r1 * Eigen::Matrix4d::Identity();
  a(1, 4) = r1 * kin.thermal_polarization;
  a(3, 4) = -r1 * kin.thermal_polarization;
  return a;
}

}  // namespace

CorrelationTrace spinlock_purify(const Matrix4c& rho0, const SpinLockKinetics& kin,
                                 std::span<const double> grid) {
  if (std::abs(rho0.trace()) > 1e-10) {
    throw std::invalid_argument("spinlock_purify: rho0 must be a traceless deviation");
  }
  const Matrix4c& v = bell_basis();
  const Matrix4c rho_b0 = v.adjoint() * rho0 * v;
  const Eigen::Matrix<double, 5, 5> gen = population_generator(kin);
  const Vector4c target = state_vector(State::S0);

  CorrelationTrace trace;
  trace.state = "S0";
  trace.sequence = "spinlock";
  trace.points.reserve(grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    if (!(t >= 0) || t <= prev) {
      throw std::invalid_argument("spinlock_purify: grid must be increasing and >= 0");
    }
    prev = t;
    const Eigen::Matrix<double, 5, 5> m = (gen * t).exp();
    Eigen::Matrix<double, 5, 1> p;
    for (int i = 0; i < 4; ++i) p(i) = rho_b0(i, i).real();
    p(4) = 1.0;
    const Eigen::Matrix<double, 5, 1> pt = m * p;

    Matrix4c rho_b = rho_b0 * std::exp(-kin.coherence_decay * t);
    for (int i = 0; i < 4; ++i) rho_b(i, i) = pt(i);
    const Matrix4c rho = v * rho_b * v.adjoint();
    trace.points.push_back({t, correlation(rho, target), 0.0});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Bell transforms

std::string to_string(BellKind kind) {
  switch (kind) {
    case BellKind::psi_plus: return "psi_plus";
    case BellKind::phi_minus: return "phi_minus";
    case BellKind::phi_plus: return "phi_plus";
  }
  return "?";
}

BellTransform bell_from_singlet(BellKind kind, const MoleculeParams& mol,
                                const PulseParams& pulse) {
  if (mol.delta_nu == 0) {
    throw std::invalid_argument("bell_from_singlet: delta_nu = 0, cannot synthesize a z rotation");
  }
  const double z_dur = 1.0 / (2.0 * std::abs(mol.delta_nu));

  PulseParams sel = pulse;
  sel.selectivity = SpinTarget::spin1;
  if (sel.pi_duration > 0 && !(sel.nominal_amplitude > 0)) {
    sel.nominal_amplitude = sequence::pi_calibrated_amplitude(sel.pi_duration);
  }

  BellTransform tf;
  tf.kind = kind;
  tf.timeline.repeats = 1;

  const Matrix4c u_z = rotation_z(-std::numbers::pi, SpinTarget::spin1);   // e^{+i pi Iz1}
  const Matrix4c u_x = rotation_xy(-std::numbers::pi, 0.0, SpinTarget::spin1);  // e^{+i pi Ix1}

  switch (kind) {
    case BellKind::psi_plus:
      tf.z_rotation_duration = z_dur;
      tf.timeline.segments.push_back({sequence::SegmentKind::delay, z_dur, {}});
      tf.unitary = u_z;
      break;
    case BellKind::phi_minus:
      tf.timeline.segments.push_back({sequence::SegmentKind::pulse, sel.pi_duration, sel});
      tf.unitary = u_x;
      break;
    case BellKind::phi_plus:
      tf.z_rotation_duration = z_dur;
      tf.timeline.segments.push_back({sequence::SegmentKind::delay, z_dur, {}});
      tf.timeline.segments.push_back({sequence::SegmentKind::pulse, sel.pi_duration, sel});
      tf.unitary = u_x * u_z;
      break;
  }
  double total = 0;
  for (const auto& s : tf.timeline.segments) total += s.duration;
  tf.timeline.block_duration = total;
  return tf;
}

Matrix4c apply_transform(const Matrix4c& rho, const BellTransform& tf) {
  return tf.unitary * rho * tf.unitary.adjoint();
}

Matrix4c apply_transform_timeline(const Matrix4c& rho, const BellTransform& tf,
                                  const MoleculeParams& mol, bool ideal) {
  Matrix4c out = rho;
  for (const auto& seg : tf.timeline.segments) {
    if (seg.kind == sequence::SegmentKind::delay) {
      MoleculeParams m = mol;
      if (ideal) m.j_coupling = 0;  // chemical shift alone realizes the z rotation
      out = dynamics::propagate_unitary(out, dynamics::free_hamiltonian(m), seg.duration);
    } else if (ideal || seg.duration == 0) {
      const Matrix4c u = rotation_xy(sequence::flip_angle(seg.pulse), seg.pulse.phase,
                                     seg.pulse.selectivity);
      out = u * out * u.adjoint();
    } else {
      out = dynamics::propagate_unitary(
          out, dynamics::pulse_hamiltonian(seg.pulse, 1.0, mol), seg.duration);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// readout

ReadoutSignal singlet_readout(const Matrix4c& rho, const MoleculeParams& mol,
                              const PulseParams& pulse) {
  if (mol.delta_nu == 0) {
    throw std::invalid_argument("singlet_readout: delta_nu = 0");
  }
  const double dur = 1.0 / (4.0 * std::abs(mol.delta_nu));
  Matrix4c out = dynamics::propagate_unitary(rho, dynamics::free_hamiltonian(mol), dur);
  const Matrix4c u = rotation_xy(std::numbers::pi / 2.0, pulse.phase, SpinTarget::both);
  out = u * out * u.adjoint();
  ReadoutSignal sig;
  sig.x = (out * ix_total()).trace().real();
  sig.y = (out * iy_total()).trace().real();
  return sig;
}

}  // namespace ddsim::protocols
