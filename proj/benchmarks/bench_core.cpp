#include <benchmark/benchmark.h>

#include "ddsim/bathfn.hpp"
#include "ddsim/dynamics.hpp"
#include "ddsim/experiment.hpp"

using namespace ddsim;
using namespace ddsim::dynamics;

namespace {

spinops::DensityMatrix singlet_state() {
  return {spinops::projector(spinops::state_vector(spinops::State::S0)), "S0"};
}

sequence::SequenceSpec udd7(int repeats) {
  sequence::SequenceSpec s;
  s.scheme = sequence::Scheme::udd;
  s.order = 7;
  s.tau_cpmg = 2e-3;
  s.tau_pi = 27.2e-6;
  s.repeats = repeats;
  return s;
}

void BM_udd_times(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sequence::udd_times(n, 1.0));
  }
}
BENCHMARK(BM_udd_times)->Arg(7)->Arg(50);

void BM_compile_timeline(benchmark::State& state) {
  const auto spec = udd7(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sequence::compile(spec));
  }
}
BENCHMARK(BM_compile_timeline);

void BM_unitary_segment(benchmark::State& state) {
  const Matrix4c h = free_hamiltonian({270.4, 4.1});
  Matrix4c rho = singlet_state().m;
  for (auto _ : state) {
    rho = propagate_unitary(rho, h, 2e-3);
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_unitary_segment);

void BM_lindblad_segment(benchmark::State& state) {
  const Matrix4c h = free_hamiltonian({270.4, 4.1});
  const RelaxationParams relax{6.3, 2.3};
  Matrix4c rho = singlet_state().m;
  for (auto _ : state) {
    rho = lindblad_step(rho, h, relax, 2e-3);
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_lindblad_segment);

void BM_run_timeline_block(benchmark::State& state) {
  const auto tl = sequence::compile(udd7(static_cast<int>(state.range(0))));
  NoiseModel model;
  model.relaxation = RelaxationParams{6.3, 2.3};
  model.static_offset = Distribution::gaussian(0.0, 10.0);
  model.ensemble_size = 4;
  const double sample[] = {tl.total_duration()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_timeline(singlet_state(), tl, {270.4, 4.1}, model, sample));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_run_timeline_block)->Arg(10)->Arg(100);

void BM_filter_eval(benchmark::State& state) {
  const bathfn::FilterEvaluator f(sequence::udd_times(7, 1.0));
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(w));
    w += 1e-4;
  }
}
BENCHMARK(BM_filter_eval);

void BM_chi_lorentzian(benchmark::State& state) {
  const auto s = bathfn::SpectralDensity::lorentzian(400.0, 0.2);
  const auto tv = sequence::cpmg_times(4, 0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bathfn::chi(tv, s));
  }
}
BENCHMARK(BM_chi_lorentzian);

void BM_chi_sharp_cutoff(benchmark::State& state) {
  const auto s = bathfn::SpectralDensity::ohmic(1.0, 20.0);
  const auto tv = sequence::udd_times(7, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bathfn::chi(tv, s));
  }
}
BENCHMARK(BM_chi_sharp_cutoff);

}  // namespace

BENCHMARK_MAIN();
