#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddsim/spinops.hpp"

namespace ddsim::sequence {

enum class Scheme { cpmg, udd, none };  // none = no-decoupling control block

std::string to_string(Scheme s);

/// Pulse centers t_1..t_N inside one block of duration T.
struct TimingVector {
  Scheme scheme = Scheme::cpmg;
  double total_period = 0;        // seconds
  std::vector<double> instants;   // strictly increasing, inside (0, T)
};

/// t_j = T (2j-1) / (2N); throws std::invalid_argument for N < 1 or T <= 0
TimingVector cpmg_times(int n, double total_period);

/// t_j = T sin^2(pi j / (2N+2)); same domain errors. Coincides with CPMG for
/// N in {1,2} and is symmetric about T/2 for all N.
TimingVector udd_times(int n, double total_period);

/// T = N (2 tau_cpmg + tau_pi); throws std::invalid_argument on non-positive
/// n/tau_cpmg or negative tau_pi
double block_duration(int n, double tau_cpmg, double tau_pi);

struct PulseParams {
  double pi_duration = 0;         // tau_pi, seconds; 0 = instantaneous ideal pulse
  double nominal_amplitude = 0;   // nu_nom, Hz; flip angle = 2 pi nu_nom tau_pi
  double phase = 0;               // radians
  spinops::SpinTarget selectivity = spinops::SpinTarget::both;
};

/// nominal rotation angle of the pulse; pi for a zero-width (ideal) pulse
double flip_angle(const PulseParams& p);

/// nu_nom that calibrates a width-tau_pi pulse to a pi rotation
double pi_calibrated_amplitude(double tau_pi);

enum class SegmentKind { delay, pulse };

struct Segment {
  SegmentKind kind = SegmentKind::delay;
  double duration = 0;  // seconds, >= 0 (zero only for ideal pulses)
  PulseParams pulse{};  // meaningful when kind == pulse
};

/// One validated block of segments, repeated back to back with no gap.
struct Timeline {
  std::vector<Segment> segments;
  int repeats = 1;
  double block_duration = 0;

  double total_duration() const { return block_duration * repeats; }
};

struct OverlapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Centers t_j become pulse midpoints [t_j - tau_pi/2, t_j + tau_pi/2];
/// delays fill the gaps. Throws OverlapError when any delay would be <= 0
/// (pulses overlapping or touching the block boundary).
Timeline compile(const TimingVector& timing, const PulseParams& pulse, int repeats);

/// Pulse midpoints of the first block (inverse of compile, for validation).
std::vector<double> pulse_centers(const Timeline& tl);

/// Re-checks the Timeline invariants; throws on violation.
void validate(const Timeline& tl);

// ---------------------------------------------------------------------------
// text format:  <scheme> order=<int> tau_cpmg=<number><unit> tau_pi=<number><unit>
//               repeats=<int> [phase=<deg>]     with unit in {s, ms, us}

struct SequenceSpec {
  Scheme scheme = Scheme::cpmg;
  int order = 1;
  double tau_cpmg = 0;   // seconds
  double tau_pi = 0;     // seconds
  int repeats = 1;
  double phase = 0;      // radians

  std::string label() const;             // "udd-7", "cpmg-1", "none"
  double period() const;                 // block_duration(order, tau_cpmg, tau_pi)
  PulseParams pulse_params() const;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

/// Parses one spec line; ParseError for syntax, std::invalid_argument for
/// out-of-range values.
SequenceSpec parse_sequence_spec(std::string_view text, int line_number = 1);

/// Canonical one-line form; parse(format(spec)) == spec exactly.
std::string format_sequence_spec(const SequenceSpec& spec);

/// Timing instants for the spec's block (empty for Scheme::none).
TimingVector times_for(const SequenceSpec& spec);

/// Compile the spec's block; Scheme::none yields a single full-period delay.
Timeline compile(const SequenceSpec& spec);

}  // namespace ddsim::sequence
