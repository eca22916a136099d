#include "ddsim/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace ddsim::sequence {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::cpmg: return "cpmg";
    case Scheme::udd: return "udd";
    case Scheme::none: return "none";
  }
  return "?";
}

TimingVector cpmg_times(int n, double total_period) {
  if (n < 1) throw std::invalid_argument("cpmg_times: order must be >= 1");
  if (!(total_period > 0)) throw std::invalid_argument("cpmg_times: period must be > 0");
  TimingVector tv{Scheme::cpmg, total_period, {}};
  tv.instants.reserve(n);
  for (int j = 1; j <= n; ++j) {
    tv.instants.push_back(total_period * (2.0 * j - 1.0) / (2.0 * n));
  }
  return tv;
}

TimingVector udd_times(int n, double total_period) {
  if (n < 1) throw std::invalid_argument("udd_times: order must be >= 1");
  if (!(total_period > 0)) throw std::invalid_argument("udd_times: period must be > 0");
  TimingVector tv{Scheme::udd, total_period, {}};
  tv.instants.reserve(n);
  for (int j = 1; j <= n; ++j) {
    const double s = std::sin(std::numbers::pi * j / (2.0 * n + 2.0));
    tv.instants.push_back(total_period * s * s);
  }
  return tv;
}

double block_duration(int n, double tau_cpmg, double tau_pi) {
  if (n < 1) throw std::invalid_argument("block_duration: order must be >= 1");
  if (!(tau_cpmg > 0)) throw std::invalid_argument("block_duration: tau_cpmg must be > 0");
  if (tau_pi < 0) throw std::invalid_argument("block_duration: tau_pi must be >= 0");
  return n * (2.0 * tau_cpmg + tau_pi);
}

double flip_angle(const PulseParams& p) {
  if (p.pi_duration == 0.0) return std::numbers::pi;
  return 2.0 * std::numbers::pi * p.nominal_amplitude * p.pi_duration;
}

double pi_calibrated_amplitude(double tau_pi) {
  return tau_pi > 0 ? 1.0 / (2.0 * tau_pi) : 0.0;
}

Timeline compile(const TimingVector& timing, const PulseParams& pulse, int repeats) {
  if (repeats < 1) throw std::invalid_argument("compile: repeats must be >= 1");
  if (pulse.pi_duration < 0) throw std::invalid_argument("compile: tau_pi must be >= 0");
  if (pulse.pi_duration > 0 && !(pulse.nominal_amplitude > 0)) {
    throw std::invalid_argument("compile: finite-width pulse needs nominal_amplitude > 0");
  }
  const double T = timing.total_period;
  const double half = pulse.pi_duration / 2.0;
  const auto& ts = timing.instants;
  for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
    if (!(ts[j + 1] > ts[j])) {
      throw std::invalid_argument("compile: instants must be strictly increasing");
    }
  }

  Timeline tl;
  tl.repeats = repeats;
  tl.block_duration = T;
  double cursor = 0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double gap = ts[j] - half - cursor;
    if (!(gap > 0)) {
      throw OverlapError("pulse overlap at t = " + std::to_string(ts[j]) +
                         " s (order too high for this pulse width)");
    }
    tl.segments.push_back({SegmentKind::delay, gap, {}});
    tl.segments.push_back({SegmentKind::pulse, pulse.pi_duration, pulse});
    cursor = ts[j] + half;
  }
  const double tail = T - cursor;
  if (!(tail > 0)) {
    throw OverlapError("final pulse touches the block boundary");
  }
  tl.segments.push_back({SegmentKind::delay, tail, {}});
  return tl;
}

std::vector<double> pulse_centers(const Timeline& tl) {
  std::vector<double> centers;
  double t = 0;
  for (const auto& seg : tl.segments) {
    if (seg.kind == SegmentKind::pulse) centers.push_back(t + seg.duration / 2.0);
    t += seg.duration;
  }
  return centers;
}

void validate(const Timeline& tl) {
  if (tl.repeats < 1) throw std::invalid_argument("timeline: repeats must be >= 1");
  double sum = 0;
  for (const auto& seg : tl.segments) {
    if (seg.duration < 0) throw std::invalid_argument("timeline: negative segment duration");
    if (seg.kind == SegmentKind::delay && seg.duration == 0) {
      throw std::invalid_argument("timeline: zero-length delay");
    }
    sum += seg.duration;
  }
  if (std::abs(sum - tl.block_duration) > 1e-12 * std::max(1.0, tl.block_duration)) {
    throw std::invalid_argument("timeline: segment durations do not sum to block duration");
  }
}

// ---------------------------------------------------------------------------
// spec text format

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ")"),
      line(line),
      col(col) {}

namespace {

struct Token {
  std::string_view text;
  int col;  // 1-based
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    out.push_back({s.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

double parse_number(std::string_view s, int line, int col, std::string_view* rest) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) {
    throw ParseError("expected a number", line, col);
  }
  *rest = s.substr(static_cast<std::size_t>(ptr - s.data()));
  return value;
}

double time_unit_factor(std::string_view unit, int line, int col) {
  if (unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  if (unit.empty()) throw ParseError("missing time unit (s, ms or us)", line, col);
  throw ParseError("unknown time unit '" + std::string(unit) + "'", line, col);
}

double parse_duration(std::string_view s, int line, int col) {
  std::string_view rest;
  const double v = parse_number(s, line, col, &rest);
  return v * time_unit_factor(rest, line, col);
}

long parse_integer(std::string_view s, int line, int col) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("expected an integer", line, col);
  }
  return value;
}

}  // namespace

SequenceSpec parse_sequence_spec(std::string_view text, int line_number) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw ParseError("empty sequence spec", line_number, 1);

  SequenceSpec spec;
  const auto scheme = tokens[0].text;
  if (scheme == "cpmg") spec.scheme = Scheme::cpmg;
  else if (scheme == "udd") spec.scheme = Scheme::udd;
  else if (scheme == "none") spec.scheme = Scheme::none;
  else throw ParseError("unknown scheme '" + std::string(scheme) + "'", line_number, tokens[0].col);

  bool saw_order = false, saw_tau_cpmg = false, saw_tau_pi = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto [tok, col] = tokens[i];
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key=value", line_number, col);
    }
    const auto key = tok.substr(0, eq);
    const auto val = tok.substr(eq + 1);
    const int vcol = col + static_cast<int>(eq) + 1;
    if (key == "order") {
      spec.order = static_cast<int>(parse_integer(val, line_number, vcol));
      saw_order = true;
    } else if (key == "tau_cpmg") {
      spec.tau_cpmg = parse_duration(val, line_number, vcol);
      saw_tau_cpmg = true;
    } else if (key == "tau_pi") {
      spec.tau_pi = parse_duration(val, line_number, vcol);
      saw_tau_pi = true;
    } else if (key == "repeats") {
      spec.repeats = static_cast<int>(parse_integer(val, line_number, vcol));
    } else if (key == "phase") {
      std::string_view rest;
      const double deg = parse_number(val, line_number, vcol, &rest);
      if (!rest.empty()) throw ParseError("phase takes plain degrees", line_number, vcol);
      spec.phase = deg * std::numbers::pi / 180.0;
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", line_number, col);
    }
  }

  if (!saw_order || !saw_tau_cpmg || !saw_tau_pi) {
    throw ParseError("sequence spec needs order=, tau_cpmg= and tau_pi=", line_number, 1);
  }
  if (spec.order < 1) throw std::invalid_argument("sequence spec: order must be >= 1");
  if (!(spec.tau_cpmg > 0)) throw std::invalid_argument("sequence spec: tau_cpmg must be > 0");
  if (spec.tau_pi < 0) throw std::invalid_argument("sequence spec: tau_pi must be >= 0");
  if (spec.repeats < 1) throw std::invalid_argument("sequence spec: repeats must be >= 1");
  return spec;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string format_sequence_spec(const SequenceSpec& spec) {
  std::string out = to_string(spec.scheme);
  out += " order=" + std::to_string(spec.order);
  out += " tau_cpmg=" + shortest(spec.tau_cpmg) + "s";
  out += " tau_pi=" + shortest(spec.tau_pi) + "s";
  out += " repeats=" + std::to_string(spec.repeats);
  if (spec.phase != 0) {
    out += " phase=" + shortest(spec.phase * 180.0 / std::numbers::pi);
  }
  return out;
}

std::string SequenceSpec::label() const {
  if (scheme == Scheme::none) return "none";
  return to_string(scheme) + "-" + std::to_string(order);
}

double SequenceSpec::period() const { return block_duration(order, tau_cpmg, tau_pi); }

PulseParams SequenceSpec::pulse_params() const {
  PulseParams p;
  p.pi_duration = tau_pi;
  p.nominal_amplitude = pi_calibrated_amplitude(tau_pi);
  p.phase = phase;
  p.selectivity = spinops::SpinTarget::both;
  return p;
}

TimingVector times_for(const SequenceSpec& spec) {
  const double T = spec.period();
  switch (spec.scheme) {
    case Scheme::cpmg: return cpmg_times(spec.order, T);
    case Scheme::udd: return udd_times(spec.order, T);
    case Scheme::none: return TimingVector{Scheme::none, T, {}};
  }
  throw std::logic_error("bad scheme");
}

Timeline compile(const SequenceSpec& spec) {
  if (spec.scheme == Scheme::none) {
    Timeline tl;
    tl.repeats = spec.repeats;
    tl.block_duration = spec.period();
    tl.segments.push_back({SegmentKind::delay, tl.block_duration, {}});
    return tl;
  }
  return compile(times_for(spec), spec.pulse_params(), spec.repeats);
}

}  // namespace ddsim::sequence
