#pragma once

#include <span>
#include <string>

#include "ddsim/dynamics.hpp"
#include "ddsim/trace.hpp"

namespace ddsim::protocols {

using dynamics::MoleculeParams;
using sequence::PulseParams;
using sequence::Timeline;

// ---------------------------------------------------------------------------
// initial state

/// The prepared singlet/triplet mixture, as either side of its two common
/// writings (equal only up to an identity shift):
///   operator_form:  -I1.I2            eigenvalues {3/4, -1/4, -1/4, -1/4}
///   projector_form: P_S0 - P_T0       eigenvalues {1, -1, 0, 0}
enum class PreparationForm { operator_form, projector_form };

/// traceless deviation matrix of the selected form
Matrix4c prepare_initial(PreparationForm form);

// ---------------------------------------------------------------------------
// spin-lock purification kinetics

/// Linear kinetics of the deviation matrix in the singlet/triplet basis
/// during the spin lock. Populations: triplets mutually equilibrate at
/// triplet_mixing_rate; the singlet-order component exchanges with the
/// triplet mean at 1/singlet_lifetime + leak_rate; everything relaxes toward
/// the thermal Zeeman deviation thermal_polarization*(0,1,0,-1) at
/// thermal_recovery_rate (the symmetry-breaking mechanism that ends the
/// purification plateau). Off-diagonal elements damp at coherence_decay.
struct SpinLockKinetics {
  double singlet_lifetime = 16.0;        // T_S, s
  double triplet_mixing_rate = 5.0;      // R_T, 1/s
  double leak_rate = 0.02;               // R_leak, 1/s
  double coherence_decay = 2.0;          // R_2rho, 1/s
  double thermal_recovery_rate = 1.0 / 6.3;  // R_1, 1/s
  double thermal_polarization = 1.0;     // q, scale of the Zeeman deviation
};

/// Correlation against S0 over the grid; rho0 must be a traceless deviation.
CorrelationTrace spinlock_purify(const Matrix4c& rho0, const SpinLockKinetics& kin,
                                 std::span<const double> grid);

// ---------------------------------------------------------------------------
// Bell transforms

enum class BellKind { psi_plus, phi_minus, phi_plus };

std::string to_string(BellKind kind);

struct BellTransform {
  BellKind kind = BellKind::psi_plus;
  Timeline timeline;            // z rotation as a 1/(2 delta_nu) delay + selective pulses
  Matrix4c unitary;             // the exact propagator
  double z_rotation_duration = 0;
};

/// Builds the transform taking |S0> to the requested Bell state: spin-1 z
/// rotation via chemical-shift evolution of 1/(2 delta_nu), spin-selective x
/// rotation via the configured pulse. Throws std::invalid_argument when
/// delta_nu == 0 (no z rotation available).
BellTransform bell_from_singlet(BellKind kind, const MoleculeParams& mol,
                                const PulseParams& pulse);

/// exact unitary route
Matrix4c apply_transform(const Matrix4c& rho, const BellTransform& tf);

/// Timeline route. With ideal=true (default) the z-rotation delay evolves
/// under the chemical shift alone and selective pulses act as exact
/// single-spin rotations (infinite selectivity); with ideal=false the full
/// free Hamiltonian runs during the delay, leaving the J-induced error
/// (~(J/delta_nu)^2) in place.
Matrix4c apply_transform_timeline(const Matrix4c& rho, const BellTransform& tf,
                                  const MoleculeParams& mol, bool ideal = true);

// ---------------------------------------------------------------------------
// readout

struct ReadoutSignal {
  double x = 0;  // trace[rho' (Ix1 + Ix2)]
  double y = 0;  // trace[rho' (Iy1 + Iy2)]
};

/// Singlet-to-magnetization readout: free evolution for 1/(4 delta_nu), then
/// a hard pi/2 pulse at the configured phase. Linear in the deviation.
/// Throws std::invalid_argument when delta_nu == 0.
ReadoutSignal singlet_readout(const Matrix4c& rho, const MoleculeParams& mol,
                              const PulseParams& pulse);

}  // namespace ddsim::protocols
