// ddsim - command-line driver for the two-spin dynamical-decoupling toolkit.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ddsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace ddsim;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string spec_line;
};

experiment::ExperimentConfig load_config(const CommonOpts& opts) {
  experiment::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = experiment::parse_config_file(opts.config_path);
  }
  if (opts.seed_set) cfg.noise.master_seed = opts.seed;
  if (!opts.out_dir.empty()) cfg.outputs.directory = opts.out_dir;
  if (opts.format == "csv") cfg.outputs.format = experiment::OutputSpec::Format::csv;
  if (opts.format == "plotdata") cfg.outputs.format = experiment::OutputSpec::Format::plotdata;
  if (!opts.spec_line.empty()) {
    cfg.sequences.clear();
    cfg.sequences.push_back(sequence::parse_sequence_spec(opts.spec_line));
  }
  return cfg;
}

std::ofstream open_output(const experiment::ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.outputs.directory);
  const fs::path p = fs::path(cfg.outputs.directory) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  std::cout << "wrote " << p.string() << "\n";
  return out;
}

void write_traces(const experiment::ExperimentConfig& cfg, const std::string& base,
                  const std::vector<CorrelationTrace>& traces) {
  if (cfg.outputs.format == experiment::OutputSpec::Format::csv) {
    auto out = open_output(cfg, base + ".csv");
    experiment::emit_csv(traces, out);
  } else {
    auto out = open_output(cfg, base + ".dat");
    experiment::emit_plotdata(traces, out);
  }
}

int cmd_times(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  if (cfg.sequences.empty()) throw std::runtime_error("no sequences given (--spec or config)");
  for (const auto& spec : cfg.sequences) {
    const auto tv = sequence::times_for(spec);
    std::cout << spec.label() << " T=" << experiment::format_double(tv.total_period) << "s:";
    for (double t : tv.instants) std::cout << ' ' << experiment::format_double(t);
    std::cout << "\n";
  }
  return 0;
}

int cmd_compile(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  if (cfg.sequences.empty()) throw std::runtime_error("no sequences given (--spec or config)");
  for (const auto& spec : cfg.sequences) {
    const auto tl = sequence::compile(spec);
    std::cout << spec.label() << " block=" << experiment::format_double(tl.block_duration)
              << "s repeats=" << tl.repeats << "\n";
    double t = 0;
    for (const auto& seg : tl.segments) {
      std::cout << "  " << (seg.kind == sequence::SegmentKind::delay ? "delay" : "pulse ")
                << " t=" << experiment::format_double(t)
                << " dur=" << experiment::format_double(seg.duration) << "\n";
      t += seg.duration;
    }
  }
  return 0;
}

int cmd_simulate(const CommonOpts& opts) {
  auto cfg = load_config(opts);
  if (cfg.sequences.empty()) throw std::runtime_error("no sequences given (--spec or config)");
  cfg.sequences.resize(1);
  const auto result = experiment::run_scan(cfg, opts.threads);
  write_traces(cfg, "simulate", result.traces);
  for (const auto& s : result.status) {
    if (s.status != "ok") std::cerr << s.sequence << ": " << s.status << "\n";
  }
  return 0;
}

int cmd_scan(const CommonOpts& opts, double threshold) {
  const auto cfg = load_config(opts);
  if (cfg.sequences.empty()) throw std::runtime_error("no sequences configured");
  const auto result = experiment::run_scan(cfg, opts.threads);
  write_traces(cfg, "scan", result.traces);
  {
    auto out = open_output(cfg, "scan_status.csv");
    experiment::emit_status_csv(result.status, out);
  }
  if (threshold > 0) {
    std::vector<std::pair<std::string, int>> counts;
    for (const auto& tr : result.traces) {
      counts.emplace_back(tr.sequence, experiment::count_above_threshold(tr, threshold));
    }
    auto out = open_output(cfg, "counts.csv");
    experiment::emit_counts_csv(counts, out);
  }
  for (const auto& s : result.status) {
    if (s.status != "ok") std::cerr << s.sequence << ": " << s.status << "\n";
  }
  return 0;
}

int cmd_filter(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  if (cfg.sequences.empty()) throw std::runtime_error("no sequences configured");
  if (cfg.baths.empty()) throw std::runtime_error("no baths configured ([baths] section)");
  const auto rows = experiment::run_filter_comparison(cfg);
  {
    auto out = open_output(cfg, "filter.csv");
    experiment::emit_filter_csv(rows, out);
  }
  // per-bath ranking by coherence
  for (const auto& bath : cfg.baths) {
    std::vector<const experiment::FilterRow*> in_bath;
    for (const auto& r : rows) {
      if (r.bath == bath.name) in_bath.push_back(&r);
    }
    std::stable_sort(in_bath.begin(), in_bath.end(),
                     [](const auto* a, const auto* b) { return a->w > b->w; });
    std::cout << "bath " << bath.name << " ranking:";
    for (const auto* r : in_bath) {
      std::cout << ' ' << r->sequence << "(W=" << experiment::format_double(r->w) << ")";
    }
    std::cout << "\n";
  }
  for (const auto& r : rows) {
    if (r.status != "ok") std::cerr << r.sequence << "/" << r.bath << ": " << r.status << "\n";
  }
  return 0;
}

int cmd_spinlock(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  std::vector<double> grid;
  grid.reserve(cfg.spinlock_points);
  for (int i = 0; i < cfg.spinlock_points; ++i) {
    grid.push_back(cfg.spinlock_max_duration * i / (cfg.spinlock_points - 1));
  }
  const auto rho0 = protocols::prepare_initial(protocols::PreparationForm::projector_form);
  const auto trace = protocols::spinlock_purify(rho0, cfg.spinlock, grid);
  write_traces(cfg, "spinlock", {trace});
  return 0;
}

int cmd_fit(const CommonOpts& opts, const std::string& input) {
  const auto cfg = load_config(opts);
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  const auto traces = experiment::parse_csv(in);
  std::vector<std::pair<std::string, experiment::FitResult>> fits;
  for (const auto& tr : traces) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : tr.points) {
      if (!std::isnan(p.correlation)) pts.emplace_back(p.time, p.correlation);
    }
    try {
      fits.emplace_back(tr.sequence, experiment::fit_exponential(pts));
    } catch (const std::exception& e) {
      std::cerr << tr.sequence << ": fit failed: " << e.what() << "\n";
    }
  }
  auto out = open_output(cfg, "fits.csv");
  experiment::emit_fit_csv(fits, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-spin dynamical decoupling simulator and analysis toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  double threshold = 0;
  std::string fit_input;

  const auto add_common = [&](CLI::App* sub, bool with_spec = true) {
    sub->add_option("--config", opts.config_path, "experiment config file");
    sub->add_option("--seed", opts.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { opts.seed_set = true; });
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--format", opts.format, "csv|plotdata")
        ->check(CLI::IsMember({"csv", "plotdata"}));
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    if (with_spec) {
      sub->add_option("--spec", opts.spec_line,
                      "sequence spec line, e.g. \"udd order=7 tau_cpmg=2ms tau_pi=27.2us repeats=1\"");
    }
  };

  auto* times = app.add_subcommand("times", "print pulse timing vectors");
  add_common(times);
  auto* compile = app.add_subcommand("compile", "validate and print a timeline");
  add_common(compile);
  auto* simulate = app.add_subcommand("simulate", "run a single sequence over the grid");
  add_common(simulate);
  auto* scan = app.add_subcommand("scan", "run all configured sequences over the grid");
  add_common(scan, false);
  scan->add_option("--threshold", threshold, "also emit counts of points above this correlation");
  auto* filter = app.add_subcommand("filter", "analytic filter-function bath comparison");
  add_common(filter, false);
  auto* spinlock = app.add_subcommand("spinlock", "spin-lock purification trace");
  add_common(spinlock, false);
  auto* fit = app.add_subcommand("fit", "fit exponential decays to a trace CSV");
  add_common(fit, false);
  fit->add_option("--in", fit_input, "input CSV (scan/simulate output)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (times->parsed()) return cmd_times(opts);
    if (compile->parsed()) return cmd_compile(opts);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (scan->parsed()) return cmd_scan(opts, threshold);
    if (filter->parsed()) return cmd_filter(opts);
    if (spinlock->parsed()) return cmd_spinlock(opts);
    if (fit->parsed()) return cmd_fit(opts, fit_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
