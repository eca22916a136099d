#include <algorithm>
#include <cmath>
#include <limits>

#include "ddsim/experiment.hpp"

namespace ddsim::experiment {

namespace {

struct InitialState {
  spinops::DensityMatrix rho0;  // physical state or traceless deviation
  Matrix4c target;              // correlation reference
};

InitialState make_initial(const std::string& label) {
  using namespace spinops;
  InitialState s;
  s.rho0.label = label;
  if (label == "prep_projector" || label == "prep_operator") {
    s.rho0.m = protocols::prepare_initial(label == "prep_projector"
                                              ? protocols::PreparationForm::projector_form
                                              : protocols::PreparationForm::operator_form);
    s.target = projector(state_vector(State::S0));
    return s;
  }
  if (label == "product_x") {
    s.rho0.m = ix_total();
    s.target = s.rho0.m;
    return s;
  }
  const Vector4c psi = state_by_label(label);  // throws for unknown labels
  s.rho0.m = projector(psi);                   // pseudopure with epsilon = 1
  s.target = s.rho0.m;
  return s;
}

std::vector<double> grid_for(const ExperimentConfig& cfg, const sequence::SequenceSpec& spec) {
  if (!cfg.grid_times.empty()) return cfg.grid_times;
  return default_grid(spec.period(), cfg.grid_max_duration, cfg.grid_points);
}

}  // namespace

ScanResult run_scan(const ExperimentConfig& cfg, int threads) {
  const InitialState init = make_initial(cfg.initial_state);
  ScanResult out;

  for (const auto& spec : cfg.sequences) {
    const std::vector<double> grid = grid_for(cfg, spec);
    CorrelationTrace trace;
    trace.state = cfg.initial_state;
    trace.sequence = spec.label();

    try {
      sequence::SequenceSpec covering = spec;
      const double t_max = grid.empty() ? 0.0 : grid.back();
      covering.repeats =
          std::max(1, static_cast<int>(std::ceil(t_max / spec.period() - 1e-9)));
      const sequence::Timeline tl = sequence::compile(covering);

      const auto res = dynamics::run_timeline(init.rho0, tl, cfg.molecule, cfg.noise, grid,
                                              threads, /*keep_member_samples=*/true);

      const std::size_t n = res.member_samples.size();
      for (std::size_t k = 0; k < res.samples.size(); ++k) {
        const auto& [t, rho] = res.samples[k];
        const double c = spinops::correlation(rho, init.target);
        double se = 0;
        if (n > 1) {
          double mean = 0;
          std::vector<double> cs(n);
          for (std::size_t i = 0; i < n; ++i) {
            cs[i] = spinops::correlation(res.member_samples[i][k], init.target);
            mean += cs[i];
          }
          mean /= static_cast<double>(n);
          double var = 0;
          for (double ci : cs) var += (ci - mean) * (ci - mean);
          se = std::sqrt(var / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
        }
        trace.points.push_back({t, c, se});
      }
      out.status.push_back({spec.label(), "ok"});
    } catch (const sequence::OverlapError& e) {
      // keep the sweep rectangular: explicit nan rows for this sequence
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (double t : grid) trace.points.push_back({t, nan, nan});
      out.status.push_back({spec.label(), std::string("overlap: ") + e.what()});
    }
    out.traces.push_back(std::move(trace));
  }
  return out;
}

int count_above_threshold(const CorrelationTrace& trace, double threshold) {
  if (!(threshold > 0) || !(threshold < 1)) {
    throw std::invalid_argument("count_above_threshold: threshold must be in (0, 1)");
  }
  int n = 0;
  for (const auto& p : trace.points) {
    if (p.correlation > threshold) ++n;
  }
  return n;
}

std::vector<FilterRow> run_filter_comparison(const ExperimentConfig& cfg) {
  std::vector<FilterRow> rows;
  for (const auto& bath : cfg.baths) {
    for (const auto& spec : cfg.sequences) {
      FilterRow row;
      row.sequence = spec.label();
      row.bath = bath.name;
      sequence::SequenceSpec scaled = spec;  // comparison at the configured duration
      const double scale = cfg.filter_duration / spec.period();
      scaled.tau_cpmg = spec.tau_cpmg * scale;
      scaled.tau_pi = spec.tau_pi * scale;
      try {
        const auto r = bathfn::chi(sequence::times_for(scaled), bath);
        row.chi = r.chi;
        row.w = r.w;
        row.status = "ok";
      } catch (const std::exception& e) {
        row.chi = std::numeric_limits<double>::quiet_NaN();
        row.w = std::numeric_limits<double>::quiet_NaN();
        row.status = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ddsim::experiment
