#include "ddsim/dynamics.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddsim/parallel.hpp"

namespace ddsim::dynamics {

using Matrix16c = Eigen::Matrix<cplx, 16, 16>;
using Vector16c = Eigen::Matrix<cplx, 16, 1>;
using sequence::Segment;
using sequence::SegmentKind;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// distributions

double Distribution::draw(Rng& rng) const {
  switch (kind) {
    case Kind::constant:
      return mean;
    case Kind::gaussian:
      return rng.truncated_normal(mean, sigma, truncate);
    case Kind::discrete: {
      if (values.empty()) throw std::invalid_argument("discrete distribution without support");
      const double u = rng.uniform();
      if (weights.empty()) {
        const auto i = std::min(values.size() - 1,
                                static_cast<std::size_t>(u * values.size()));
        return values[i];
      }
      double total = 0;
      for (double w : weights) total += w;
      double acc = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        acc += weights[i] / total;
        if (u < acc) return values[i];
      }
      return values.back();
    }
  }
  throw std::logic_error("bad distribution kind");
}

Distribution Distribution::constant(double v) {
  Distribution d;
  d.kind = Kind::constant;
  d.mean = v;
  return d;
}

Distribution Distribution::gaussian(double mean, double sigma, double truncate) {
  Distribution d;
  d.kind = Kind::gaussian;
  d.mean = mean;
  d.sigma = sigma;
  d.truncate = truncate;
  return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> weights) {
  if (!weights.empty() && weights.size() != values.size()) {
    throw std::invalid_argument("discrete distribution: weights/values size mismatch");
  }
  Distribution d;
  d.kind = Kind::discrete;
  d.values = std::move(values);
  d.weights = std::move(weights);
  return d;
}

// ---------------------------------------------------------------------------
// Hamiltonians

Matrix4c free_hamiltonian(const MoleculeParams& mol, double common_offset_hz) {
  using namespace spinops;
  return kTwoPi * (0.5 * mol.delta_nu * (iz(1) - iz(2)) +
                   mol.j_coupling * scalar_coupling() +
                   common_offset_hz * (iz(1) + iz(2)));
}

Matrix4c equivalence_hamiltonian(double j_coupling_hz) {
  return kTwoPi * j_coupling_hz * spinops::scalar_coupling();
}

namespace {

Matrix4c target_ix(spinops::SpinTarget t) {
  using namespace spinops;
  return t == SpinTarget::spin1 ? ix(1) : t == SpinTarget::spin2 ? ix(2) : ix_total();
}

Matrix4c target_iy(spinops::SpinTarget t) {
  using namespace spinops;
  return t == SpinTarget::spin1 ? iy(1) : t == SpinTarget::spin2 ? iy(2) : iy_total();
}

}  // namespace

Matrix4c rf_hamiltonian(const PulseParams& pulse, double kappa) {
  const double amp = kTwoPi * kappa * pulse.nominal_amplitude;
  return amp * (std::cos(pulse.phase) * target_ix(pulse.selectivity) +
                std::sin(pulse.phase) * target_iy(pulse.selectivity));
}

Matrix4c pulse_hamiltonian(const PulseParams& pulse, double kappa, const MoleculeParams& mol) {
  if (!(kappa > 0)) throw std::invalid_argument("pulse_hamiltonian: kappa must be > 0");
  return free_hamiltonian(mol) + rf_hamiltonian(pulse, kappa);
}

Matrix4c propagate_unitary(const Matrix4c& rho, const Matrix4c& h, double dt) {
  if (dt < 0) throw std::invalid_argument("propagate_unitary: dt must be >= 0");
  if (dt == 0) return rho;
  const Matrix4c u = hermitian_expm(h, -ci * dt);
  return u * rho * u.adjoint();
}

// ---------------------------------------------------------------------------
// Lindblad generator

namespace {

Matrix2c pauli_z2() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2c lowering2() {  // |1> -> |0|
  Matrix2c m;
  m << 0, 1, 0, 0;
  return m;
}

Matrix4c embed2(const Matrix2c& op, int spin) {
  const Matrix2c id = Matrix2c::Identity();
  return spin == 1 ? kron2(op, id) : kron2(id, op);
}

Matrix16c commutator_superop(const Matrix4c& h) {
  const Matrix4c id = Matrix4c::Identity();
  return -ci * (Eigen::kroneckerProduct(id, h) -
                Eigen::kroneckerProduct(h.transpose(), id))
                   .eval();
}

Matrix16c dissipator_superop(const Matrix4c& l) {
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c ldl = l.adjoint() * l;
  return (Eigen::kroneckerProduct(l.conjugate(), l) -
          0.5 * Eigen::kroneckerProduct(id, ldl) -
          0.5 * Eigen::kroneckerProduct(ldl.transpose(), id))
      .eval();
}

/// rates such that a single-spin single-quantum coherence decays at exactly
/// 1/T2 (amplitude damping contributes 1/(2 T1), the dephasing channel the rest)
struct Rates {
  double gamma1;    // amplitude damping per spin
  double gamma_phi; // pure dephasing (single-quantum decay contribution)
};

Rates relaxation_rates(const RelaxationParams& relax) {
  if (!(relax.t1 > 0) || !(relax.t2 > 0)) {
    throw std::invalid_argument("relaxation: T1 and T2 must be positive");
  }
  const double g1 = std::isinf(relax.t1) ? 0.0 : 1.0 / relax.t1;
  const double g2 = std::isinf(relax.t2) ? 0.0 : 1.0 / relax.t2;
  double gphi = g2 - 0.5 * g1;
  if (gphi < 0) {
    if (gphi < -1e-15 * std::max(g1, g2)) {
      throw std::invalid_argument("relaxation: T2 > 2 T1 gives a negative dephasing rate");
    }
    gphi = 0;
  }
  return {g1, gphi};
}

Matrix16c liouvillian(const Matrix4c& h, const RelaxationParams& relax,
                      DephasingScope scope) {
  const Rates r = relaxation_rates(relax);
  Matrix16c l = commutator_superop(h);
  if (r.gamma1 > 0) {
    l += r.gamma1 * dissipator_superop(embed2(lowering2(), 1));
    l += r.gamma1 * dissipator_superop(embed2(lowering2(), 2));
  }
  if (r.gamma_phi > 0) {
    const double g = 0.5 * r.gamma_phi;
    if (scope == DephasingScope::per_spin) {
      l += g * dissipator_superop(embed2(pauli_z2(), 1));
      l += g * dissipator_superop(embed2(pauli_z2(), 2));
    } else {
      l += g * dissipator_superop(embed2(pauli_z2(), 1) + embed2(pauli_z2(), 2));
    }
  }
  return l;
}

Vector16c vec4(const Matrix4c& rho) {
  return Eigen::Map<const Vector16c>(rho.data());
}

Matrix4c unvec4(const Vector16c& v) {
  return Eigen::Map<const Matrix4c>(v.data());
}

}  // namespace

Matrix4c lindblad_step(const Matrix4c& rho, const Matrix4c& h,
                       const RelaxationParams& relax, double dt,
                       DephasingScope scope) {
  if (!(dt > 0)) throw std::invalid_argument("lindblad_step: dt must be > 0");
  const Matrix16c m = (liouvillian(h, relax, scope) * dt).exp();
  return unvec4(m * vec4(rho));
}

// ---------------------------------------------------------------------------
// OU process

std::vector<double> sample_ou_trajectory(const OuProcess& ou, double dt,
                                         std::size_t steps, std::uint64_t seed) {
  if (!(dt > 0)) throw std::invalid_argument("sample_ou_trajectory: dt must be > 0");
  if (!(ou.tau_c > 0)) throw std::invalid_argument("sample_ou_trajectory: tau_c must be > 0");
  const double sigma = std::sqrt(ou.variance);
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(steps);
  const double decay = std::isinf(ou.tau_c) ? 1.0 : std::exp(-dt / ou.tau_c);
  const double noise = sigma * std::sqrt(std::max(0.0, 1.0 - decay * decay));
  double x = sigma * rng.normal();
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(x);
    x = x * decay + noise * rng.normal();
  }
  return out;
}

namespace {

/// Exact joint sample of (integral of x over d, endpoint value), conditional
/// on the current value; advances x and returns the integral. Valid whenever
/// the OU term commutes with the rest of the segment generator.
double ou_integral_step(double& x, double d, double sigma, double tau, Rng& rng) {
  if (sigma == 0 || d == 0) return x * d;
  if (std::isinf(tau)) return x * d;
  const double delta = d / tau;
  const double em1 = std::expm1(-delta);            // e^-d - 1
  const double em2 = std::expm1(-2 * delta);        // e^-2d - 1
  const double var_x = -sigma * sigma * em2;
  const double mean_x = x * (1.0 + em1);
  const double mean_i = -x * tau * em1;
  const double var_i = sigma * sigma * tau * tau * (2 * delta + 4 * em1 - em2);
  const double cov = sigma * sigma * tau * em1 * em1;
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  const double x_next = mean_x + std::sqrt(var_x) * z1;
  const double cond_var = std::max(0.0, var_i - cov * cov / var_x);
  const double integral = mean_i + cov / var_x * (x_next - mean_x) + std::sqrt(cond_var) * z2;
  x = x_next;
  return integral;
}

// ---------------------------------------------------------------------------
// timeline engine

struct SegmentOp {
  bool built = false;
  bool superop = false;
  bool instantaneous = false;
  Matrix4c u = Matrix4c::Identity();
  Matrix16c m = Matrix16c::Identity();
};

struct BlockOp {
  bool built = false;
  bool superop = false;
  Matrix4c u = Matrix4c::Identity();
  Matrix16c m = Matrix16c::Identity();
};

struct MemberEngine {
  const Timeline& tl;
  const MoleculeParams& mol;
  const NoiseModel& model;
  double offset_hz = 0;
  double kappa = 1;
  Rng& rng;

  bool lindblad = false;
  double ou_sigma = 0;
  double ou_tau = 0;
  bool ou_on = false;
  bool ou_collective = true;
  double x_col = 0;       // collective OU value, rad/s
  double x1 = 0, x2 = 0;  // per-spin OU values

  std::vector<SegmentOp> seg_cache;
  BlockOp block_cache;

  MemberEngine(const Timeline& tl, const MoleculeParams& mol, const NoiseModel& model,
               Rng& rng)
      : tl(tl), mol(mol), model(model), rng(rng), seg_cache(tl.segments.size()) {
    lindblad = model.relaxation.has_value();
    if (model.dephasing_process && model.dephasing_process->variance > 0) {
      ou_on = true;
      ou_sigma = std::sqrt(model.dephasing_process->variance);
      ou_tau = model.dephasing_process->tau_c;
      ou_collective = model.ou_scope == DephasingScope::collective;
      if (!(ou_tau > 0)) throw std::invalid_argument("OU process: tau_c must be > 0");
    }
  }

  void init_noise() {
    if (!ou_on) return;
    if (ou_collective) {
      x_col = ou_sigma * rng.normal();
    } else {
      x1 = ou_sigma * rng.normal();
      x2 = ou_sigma * rng.normal();
    }
  }

  Matrix4c segment_hamiltonian(const Segment& seg) const {
    Matrix4c h = free_hamiltonian(mol, offset_hz);
    if (seg.kind == SegmentKind::pulse) h += rf_hamiltonian(seg.pulse, kappa);
    return h;
  }

  bool relax_in(const Segment& seg) const {
    return lindblad && (seg.kind == SegmentKind::delay || model.relax_during_pulses);
  }

  SegmentOp build_op(const Segment& seg, double duration) const {
    SegmentOp op;
    op.built = true;
    if (seg.kind == SegmentKind::pulse && seg.duration == 0) {
      op.instantaneous = true;
      op.u = spinops::rotation_xy(kappa * sequence::flip_angle(seg.pulse),
                                  seg.pulse.phase, seg.pulse.selectivity);
      return op;
    }
    const Matrix4c h = segment_hamiltonian(seg);
    if (relax_in(seg)) {
      op.superop = true;
      op.m = (liouvillian(h, *model.relaxation, model.lindblad_scope) * duration).exp();
    } else {
      op.u = hermitian_expm(h, -ci * duration);
    }
    return op;
  }

  const SegmentOp& cached_op(std::size_t idx) {
    SegmentOp& op = seg_cache[idx];
    const Segment& seg = tl.segments[idx];
    if (!op.built) op = build_op(seg, seg.duration);
    return op;
  }

  static void apply_op(const SegmentOp& op, Matrix4c& rho) {
    if (op.superop) {
      rho = unvec4(op.m * vec4(rho));
    } else {
      rho = op.u * rho * op.u.adjoint();
    }
  }

  /// rho -> e^(-i phi Iz_total) rho e^(+i phi Iz_total), elementwise phases
  static void apply_collective_phase(Matrix4c& rho, double phi) {
    static const double z[4] = {1.0, 0.0, 0.0, -1.0};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (z[a] != z[b]) rho(a, b) *= std::exp(-ci * phi * (z[a] - z[b]));
  }

  int substeps(double duration) const {
    const double target = std::min(ou_tau / 20.0, duration / 4.0);
    return std::max(4, static_cast<int>(std::ceil(duration / target)));
  }

  /// advance rho over `duration` within segment `idx` (cacheable iff the full
  /// segment duration is propagated)
  void advance(std::size_t idx, double duration, Matrix4c& rho) {
    const Segment& seg = tl.segments[idx];
    if (duration <= 0 && !(seg.kind == SegmentKind::pulse && seg.duration == 0)) return;

    const bool full = duration == seg.duration;

    if (!ou_on) {
      if (full) {
        apply_op(cached_op(idx), rho);
      } else {
        apply_op(build_op(seg, duration), rho);
      }
      return;
    }

    // OU active: collective scope commutes with delays (and with the
    // relaxation channels), so the integrated phase factors out exactly;
    // pulses and per-spin scope fall back to frozen-value substeps.
    const bool exact_ok = ou_collective &&
                          (seg.kind == SegmentKind::delay || seg.duration == 0);
    if (exact_ok) {
      if (full) {
        apply_op(cached_op(idx), rho);
      } else if (duration > 0) {
        apply_op(build_op(seg, duration), rho);
      } else {
        apply_op(cached_op(idx), rho);  // instantaneous pulse
        return;
      }
      if (seg.kind == SegmentKind::delay) {
        apply_collective_phase(rho, ou_integral_step(x_col, duration, ou_sigma, ou_tau, rng));
      }
      return;
    }

    if (seg.kind == SegmentKind::pulse && seg.duration == 0) {
      apply_op(cached_op(idx), rho);
      return;
    }

    const int n = substeps(duration);
    const double dt = duration / n;
    const double decay = std::exp(-dt / ou_tau);
    const double noise = ou_sigma * std::sqrt(-std::expm1(-2 * dt / ou_tau));
    const Matrix4c h0 = segment_hamiltonian(seg);
    for (int k = 0; k < n; ++k) {
      Matrix4c h = h0;
      if (ou_collective) {
        h += x_col * spinops::iz_total();
      } else {
        h += x1 * spinops::iz(1) + x2 * spinops::iz(2);
      }
      if (relax_in(seg)) {
        rho = unvec4(((liouvillian(h, *model.relaxation, model.lindblad_scope) * dt).exp() *
                      vec4(rho))
                         .eval());
      } else {
        const Matrix4c u = hermitian_expm(h, -ci * dt);
        rho = u * rho * u.adjoint();
      }
      if (ou_collective) {
        x_col = x_col * decay + noise * rng.normal();
      } else {
        x1 = x1 * decay + noise * rng.normal();
        x2 = x2 * decay + noise * rng.normal();
      }
    }
  }

  const BlockOp& block_op() {
    if (!block_cache.built) {
      block_cache.built = true;
      block_cache.superop = false;
      bool any_super = false;
      for (std::size_t i = 0; i < tl.segments.size(); ++i) {
        if (cached_op(i).superop) any_super = true;
      }
      if (any_super) {
        block_cache.superop = true;
        Matrix16c m = Matrix16c::Identity();
        for (std::size_t i = 0; i < tl.segments.size(); ++i) {
          const SegmentOp& op = cached_op(i);
          if (op.superop) {
            m = op.m * m;
          } else {
            // unitary segment lifted: vec(U rho U^dag) = (conj(U) x U) vec(rho)
            m = (Eigen::kroneckerProduct(op.u.conjugate(), op.u) * m).eval();
          }
        }
        block_cache.m = m;
      } else {
        Matrix4c u = Matrix4c::Identity();
        for (std::size_t i = 0; i < tl.segments.size(); ++i) u = cached_op(i).u * u;
        block_cache.u = u;
      }
    }
    return block_cache;
  }

  void apply_block(Matrix4c& rho) {
    const BlockOp& op = block_op();
    if (op.superop) {
      rho = unvec4(op.m * vec4(rho));
    } else {
      rho = op.u * rho * op.u.adjoint();
    }
  }
};

}  // namespace

PropagationResult run_timeline(const DensityMatrix& rho0, const Timeline& tl,
                               const MoleculeParams& mol, const NoiseModel& model,
                               std::span<const double> sample_at, int threads,
                               bool keep_member_samples) {
  sequence::validate(tl);
  if (model.ensemble_size < 1) {
    throw std::invalid_argument("run_timeline: ensemble_size must be >= 1");
  }
  const double total = tl.total_duration();
  const double tol = 1e-9 * std::max(1.0, total);
  for (std::size_t i = 0; i < sample_at.size(); ++i) {
    if (sample_at[i] < -tol || sample_at[i] > total + tol) {
      throw std::invalid_argument("run_timeline: sample time outside the total duration");
    }
    if (i > 0 && !(sample_at[i] > sample_at[i - 1])) {
      throw std::invalid_argument("run_timeline: sample times must be strictly increasing");
    }
  }

  // prefix sums of segment ends within one block
  std::vector<double> seg_end(tl.segments.size());
  double acc = 0;
  for (std::size_t i = 0; i < tl.segments.size(); ++i) {
    acc += tl.segments[i].duration;
    seg_end[i] = acc;
  }

  const std::size_t n = static_cast<std::size_t>(model.ensemble_size);
  const std::size_t ns = sample_at.size();
  std::vector<std::vector<Matrix4c>> member_samples(n, std::vector<Matrix4c>(ns));
  std::vector<Matrix4c> member_final(n);

  parallel_for(n, threads, [&](std::size_t member) {
    Rng rng(derive_seed(model.master_seed, member));
    MemberEngine eng(tl, mol, model, rng);
    eng.offset_hz = model.static_offset.draw(rng);
    eng.kappa = model.rf_scale.draw(rng);
    eng.init_noise();

    Matrix4c rho = rho0.m;
    std::size_t si = 0;
    while (si < ns && sample_at[si] <= tol) {  // t = 0 samples
      member_samples[member][si++] = rho;
    }

    for (int rep = 0; rep < tl.repeats; ++rep) {
      const double block_start = static_cast<double>(rep) * tl.block_duration;
      const double block_end = block_start + tl.block_duration;
      const bool interior =
          si < ns && sample_at[si] < block_end - tol;  // sample strictly inside

      if (!interior && !eng.ou_on) {
        eng.apply_block(rho);
      } else if (!interior) {
        // OU on: walk segments so the noise trajectory advances segment-wise
        for (std::size_t k = 0; k < tl.segments.size(); ++k) {
          eng.advance(k, tl.segments[k].duration, rho);
        }
      } else {
        for (std::size_t k = 0; k < tl.segments.size(); ++k) {
          const Segment& seg = tl.segments[k];
          const double seg_start = block_start + (k == 0 ? 0.0 : seg_end[k - 1]);
          const double end_abs = block_start + seg_end[k];
          double local = 0;  // propagated portion of this segment
          while (si < ns && sample_at[si] < end_abs - tol) {
            const double want = sample_at[si] - seg_start;
            eng.advance(k, want - local, rho);
            local = want;
            member_samples[member][si++] = rho;
          }
          eng.advance(k, seg.duration - local, rho);
          while (si < ns && sample_at[si] <= end_abs + tol) {
            member_samples[member][si++] = rho;
          }
        }
      }
      // samples landing on the block boundary
      while (si < ns && sample_at[si] <= block_end + tol) {
        member_samples[member][si++] = rho;
      }
    }
    while (si < ns) member_samples[member][si++] = rho;
    member_final[member] = rho;
  });

  // fixed-order reduction
  PropagationResult res;
  res.samples.reserve(ns);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < ns; ++s) {
    Matrix4c m = Matrix4c::Zero();
    for (std::size_t i = 0; i < n; ++i) m += member_samples[i][s];
    res.samples.emplace_back(sample_at[s], w * m);
  }
  Matrix4c fin = Matrix4c::Zero();
  for (std::size_t i = 0; i < n; ++i) fin += member_final[i];
  res.final_state.m = w * fin;
  res.final_state.label = rho0.label;

  const double tr0 = rho0.m.trace().real();
  double drift = 0, herm = 0;
  double mineig = min_eigenvalue(res.final_state.m);
  for (const auto& [t, m] : res.samples) {
    drift = std::max(drift, std::abs(m.trace().real() - tr0));
    herm = std::max(herm, hermiticity_error(m));
    mineig = std::min(mineig, min_eigenvalue(m));
  }
  drift = std::max(drift, std::abs(res.final_state.m.trace().real() - tr0));
  herm = std::max(herm, hermiticity_error(res.final_state.m));
  res.max_trace_drift = drift;
  res.max_hermiticity_error = herm;
  res.min_eigenvalue_seen = mineig;

  if (drift > 1e-8 || herm > 1e-8) {
    throw PropagationError("run_timeline: integrator tolerance breached (trace drift " +
                           std::to_string(drift) + ", hermiticity " + std::to_string(herm) + ")");
  }
  if (keep_member_samples) res.member_samples = std::move(member_samples);
  return res;
}

}  // namespace ddsim::dynamics
