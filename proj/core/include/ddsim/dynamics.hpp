#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ddsim/rng.hpp"
#include "ddsim/sequence.hpp"
#include "ddsim/spinops.hpp"

namespace ddsim::dynamics {

using sequence::PulseParams;
using sequence::Timeline;
using spinops::DensityMatrix;

struct MoleculeParams {
  double delta_nu = 0;   // chemical-shift difference, Hz
  double j_coupling = 0; // scalar coupling, Hz (>= 0 by convention)
};

struct RelaxationParams {
  double t1 = std::numeric_limits<double>::infinity();  // s, per spin
  double t2 = std::numeric_limits<double>::infinity();  // s, per spin; t2 <= 2 t1
};

/// Scope of the dephasing mechanisms. Collective z noise commutes with the
/// singlet projector (the symmetry behind long-lived singlet order);
/// per-spin dephasing does not.
enum class DephasingScope { per_spin, collective };

struct Distribution {
  enum class Kind { constant, gaussian, discrete };
  Kind kind = Kind::constant;
  double mean = 0;
  double sigma = 0;
  double truncate = 0;  // in sigmas; 0 = untruncated
  std::vector<double> values;   // discrete support
  std::vector<double> weights;  // same length; empty = uniform

  double draw(Rng& rng) const;

  static Distribution constant(double v);
  static Distribution gaussian(double mean, double sigma, double truncate = 0);
  static Distribution discrete(std::vector<double> values, std::vector<double> weights = {});
};

/// Stationary Ornstein-Uhlenbeck dephasing process (classical Lorentzian bath).
struct OuProcess {
  double variance = 0;  // sigma_w^2, rad^2/s^2
  double tau_c = 0;     // correlation time, s
};

struct NoiseModel {
  std::optional<RelaxationParams> relaxation;
  DephasingScope lindblad_scope = DephasingScope::per_spin;
  Distribution static_offset;  // common resonance offset (Hz), both spins
  Distribution rf_scale = Distribution::constant(1.0);  // kappa, drawn once per member
  std::optional<OuProcess> dephasing_process;
  DephasingScope ou_scope = DephasingScope::collective;
  int ensemble_size = 1;
  std::uint64_t master_seed = 0;
  bool relax_during_pulses = true;
};

struct PropagationResult {
  DensityMatrix final_state;
  std::vector<std::pair<double, Matrix4c>> samples;  // ensemble-averaged
  double max_trace_drift = 0;        // vs trace(rho0), over samples + final
  double min_eigenvalue_seen = 0;    // over samples + final
  double max_hermiticity_error = 0;  // over samples + final
  /// per-member sampled states [member][sample], kept only on request
  std::vector<std::vector<Matrix4c>> member_samples;
};

struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// H/hbar = 2 pi [ (delta_nu/2)(Iz1 - Iz2) + J I1.I2 + offset (Iz1 + Iz2) ], rad/s
Matrix4c free_hamiltonian(const MoleculeParams& mol, double common_offset_hz = 0);

/// magnetic-equivalence limit 2 pi J I1.I2 (chemical shift suppressed)
Matrix4c equivalence_hamiltonian(double j_coupling_hz);

/// RF drive term 2 pi kappa nu_nom (cos(phi) Ix + sin(phi) Iy) on the pulse's target spins
Matrix4c rf_hamiltonian(const PulseParams& pulse, double kappa);

/// free Hamiltonian plus RF drive (chemical shift and J stay active during pulses)
Matrix4c pulse_hamiltonian(const PulseParams& pulse, double kappa, const MoleculeParams& mol);

/// rho -> U rho U^dag with U = exp(-i H dt)
Matrix4c propagate_unitary(const Matrix4c& rho, const Matrix4c& h, double dt);

/// One interval of d rho/dt = -i[H,rho] + relaxation, evaluated as the exact
/// exponential of the (piecewise-constant) Liouvillian: per-spin amplitude
/// damping at 1/T1 plus dephasing at 1/T2 - 1/(2 T1), the latter per-spin or
/// collective.  Throws std::invalid_argument when T2 > 2 T1.
Matrix4c lindblad_step(const Matrix4c& rho, const Matrix4c& h,
                       const RelaxationParams& relax, double dt,
                       DephasingScope scope = DephasingScope::per_spin);

/// Stationary OU samples on a uniform grid: x_{n+1} = x_n e^(-dt/tau) +
/// sigma sqrt(1 - e^(-2 dt/tau)) xi_n, x_0 ~ N(0, sigma^2).
std::vector<double> sample_ou_trajectory(const OuProcess& ou, double dt,
                                         std::size_t steps, std::uint64_t seed);

/// Propagates rho0 through the repeated timeline for every ensemble member
/// (static offset, RF scale and OU trajectory drawn per member from seeds
/// derived from master_seed) and returns ensemble-averaged states at the
/// requested instants. Bitwise reproducible for a given seed, independent of
/// `threads`.  sample_at must be increasing and within the total duration.
PropagationResult run_timeline(const DensityMatrix& rho0, const Timeline& tl,
                               const MoleculeParams& mol, const NoiseModel& model,
                               std::span<const double> sample_at, int threads = 1,
                               bool keep_member_samples = false);

}  // namespace ddsim::dynamics
