#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddsim/bathfn.hpp"
#include "ddsim/dynamics.hpp"
#include "ddsim/protocols.hpp"
#include "ddsim/trace.hpp"

namespace ddsim::experiment {

struct OutputSpec {
  enum class Format { csv, plotdata };
  std::string directory = ".";
  Format format = Format::csv;
};

/// Full experiment description. Defaults are the paper system
/// (5-chlorothiophene-2-carbonitrile proton pair: delta_nu 270.4 Hz,
/// J 4.1 Hz, T1 6.3 s, T2 2.3 s) plus calibration noise widths
/// (10 Hz static offset, 3% RF scale truncated at 3 sigma).
struct ExperimentConfig {
  ExperimentConfig();

  dynamics::MoleculeParams molecule;
  dynamics::NoiseModel noise;
  std::vector<sequence::SequenceSpec> sequences;
  std::string initial_state = "S0";

  std::vector<double> grid_times;   // explicit sample times; wins over the default grid
  double grid_max_duration = 40.0;  // s
  int grid_points = 25;

  protocols::SpinLockKinetics spinlock;
  double spinlock_max_duration = 12.0;  // s
  int spinlock_points = 121;

  std::vector<bathfn::SpectralDensity> baths;
  double filter_duration = 1.0;  // T for the filter comparison, s

  OutputSpec outputs;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, const std::string& file, int line);
  int line;
};

ExperimentConfig parse_config(std::istream& in, const std::string& name = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

/// Block-aligned default duration grid: multiples of `period` from 0 up to
/// max_duration, subsampled evenly to at most `points` values.
std::vector<double> default_grid(double period, double max_duration, int points);

// ---------------------------------------------------------------------------
// scans

struct SequenceStatus {
  std::string sequence;
  std::string status;  // "ok" or the error text
};

struct ScanResult {
  std::vector<CorrelationTrace> traces;
  std::vector<SequenceStatus> status;
};

/// For each configured sequence: prepares the initial state, applies the
/// repeated decoupling timeline, and records the correlation against the
/// prepared state over the duration grid. Sequences whose compilation fails
/// with an overlap keep their grid as all-nan rows so order sweeps stay
/// rectangular. Deterministic for a fixed seed, independent of `threads`.
ScanResult run_scan(const ExperimentConfig& config, int threads = 1);

/// strict count of points with correlation > threshold; threshold in (0,1)
int count_above_threshold(const CorrelationTrace& trace, double threshold);

// ---------------------------------------------------------------------------
// exponential fits

struct FitResult {
  double amplitude = 0;
  double tau = 0;            // s
  double residual_norm = 0;  // sqrt(sum r^2)
  double cov_amplitude = 0;  // variance estimates from (J^T J)^-1
  double cov_tau = 0;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least squares y = A exp(-t/tau): log-linear initialization (falling back
/// to a direct heuristic when values are non-positive), then damped
/// Gauss-Newton until the relative parameter change is below 1e-10.
/// Throws FitError on singular/constant data, std::invalid_argument for
/// fewer than 3 points.
FitResult fit_exponential(std::span<const std::pair<double, double>> points);

// ---------------------------------------------------------------------------
// filter comparison

struct FilterRow {
  std::string sequence;
  std::string bath;
  double chi = 0;
  double w = 1;
  std::string status;  // "ok" or quadrature failure text
};

/// chi/W for every configured (sequence, bath) pair at the configured
/// comparison duration; failures are reported per cell, not thrown.
std::vector<FilterRow> run_filter_comparison(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// emission (CSV per the documented schema; plotdata carries the same numbers)

std::string format_double(double v);  // shortest round-trip decimal

void emit_csv(const std::vector<CorrelationTrace>& traces, std::ostream& out);
void emit_plotdata(const std::vector<CorrelationTrace>& traces, std::ostream& out);
std::vector<CorrelationTrace> parse_csv(std::istream& in);

void emit_status_csv(const std::vector<SequenceStatus>& status, std::ostream& out);
void emit_filter_csv(const std::vector<FilterRow>& rows, std::ostream& out);
void emit_fit_csv(const std::vector<std::pair<std::string, FitResult>>& fits,
                  std::ostream& out);
void emit_counts_csv(const std::vector<std::pair<std::string, int>>& counts,
                     std::ostream& out);

}  // namespace ddsim::experiment
