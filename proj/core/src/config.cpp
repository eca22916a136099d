#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ddsim/experiment.hpp"

namespace ddsim::experiment {

ExperimentConfig::ExperimentConfig() {
  molecule.delta_nu = 270.4;
  molecule.j_coupling = 4.1;
  noise.relaxation = dynamics::RelaxationParams{6.3, 2.3};
  noise.static_offset = dynamics::Distribution::gaussian(0.0, 10.0);
  noise.rf_scale = dynamics::Distribution::gaussian(1.0, 0.03, 3.0);
  noise.ensemble_size = 16;
}

ConfigError::ConfigError(const std::string& msg, const std::string& file, int line)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), line(line) {}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Ctx {
  std::string file;
  int line = 0;
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, file, line); }
};

double number(const Ctx& ctx, const std::string& v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) ctx.fail("expected a number, got '" + v + "'");
  return out;
}

long integer(const Ctx& ctx, const std::string& v) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) ctx.fail("expected an integer, got '" + v + "'");
  return out;
}

bool boolean(const Ctx& ctx, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  ctx.fail("expected true/false, got '" + v + "'");
}

/// "<number> <unit>" or "<number><unit>", units s/ms/us; "inf" allowed
double duration_value(const Ctx& ctx, std::string v) {
  v = trim(v);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double num = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), num);
  if (ec != std::errc{} || p == v.data()) ctx.fail("expected a duration, got '" + v + "'");
  const std::string unit = trim(std::string_view(p, v.data() + v.size() - p));
  if (unit == "s") return num;
  if (unit == "ms") return num * 1e-3;
  if (unit == "us") return num * 1e-6;
  ctx.fail("duration '" + v + "' needs a unit (s, ms, us)");
}

/// "<number> Hz" or "<number> kHz"
double frequency_value(const Ctx& ctx, std::string v) {
  v = trim(v);
  double num = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), num);
  if (ec != std::errc{} || p == v.data()) ctx.fail("expected a frequency, got '" + v + "'");
  const std::string unit = trim(std::string_view(p, v.data() + v.size() - p));
  if (unit == "Hz") return num;
  if (unit == "kHz") return num * 1e3;
  ctx.fail("frequency '" + v + "' needs a unit (Hz, kHz)");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

/// key=value pairs on a bath line
std::vector<std::pair<std::string, std::string>> kv_pairs(const Ctx& ctx,
                                                          std::span<const std::string> toks) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : toks) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) ctx.fail("expected key=value, got '" + t + "'");
    out.emplace_back(t.substr(0, eq), t.substr(eq + 1));
  }
  return out;
}

bathfn::SpectralDensity parse_bath_line(const Ctx& ctx, const std::string& line) {
  const auto toks = split_ws(line);
  const auto kind = toks.at(0);
  const auto kvs = kv_pairs(ctx, std::span(toks).subspan(1));
  auto get = [&](const std::string& key) -> const std::string* {
    for (const auto& [k, v] : kvs)
      if (k == key) return &v;
    return nullptr;
  };
  std::string name;
  if (const auto* v = get("name")) name = *v;

  if (kind == "lorentzian") {
    const auto* var = get("variance");
    const auto* tc = get("tau_c");
    if (!var || !tc) ctx.fail("lorentzian bath needs variance= and tau_c=");
    auto s = bathfn::SpectralDensity::lorentzian(number(ctx, *var), duration_value(ctx, *tc));
    s.name = name.empty() ? "lorentzian" : name;
    return s;
  }
  if (kind == "ohmic") {
    const auto* a = get("alpha");
    const auto* wc = get("cutoff");
    if (!a || !wc) ctx.fail("ohmic bath needs alpha= and cutoff= (rad/s)");
    auto s = bathfn::SpectralDensity::ohmic(number(ctx, *a), number(ctx, *wc));
    s.name = name.empty() ? "ohmic" : name;
    return s;
  }
  if (kind == "table") {
    const auto* file = get("file");
    if (!file) ctx.fail("table bath needs file=");
    std::ifstream in(*file);
    if (!in) ctx.fail("cannot open bath table '" + *file + "'");
    std::vector<double> w, s;
    std::string row;
    while (std::getline(in, row)) {
      const auto hash = row.find('#');
      if (hash != std::string::npos) row.erase(hash);
      std::replace(row.begin(), row.end(), ',', ' ');
      std::istringstream iss(row);
      double a, b;
      if (iss >> a >> b) {
        w.push_back(a);
        s.push_back(b);
      }
    }
    auto sd = bathfn::SpectralDensity::tabulated(std::move(w), std::move(s));
    sd.name = name.empty() ? "table" : name;
    return sd;
  }
  ctx.fail("unknown bath kind '" + kind + "' (lorentzian, ohmic, table)");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& name) {
  ExperimentConfig cfg;
  cfg.sequences.clear();
  cfg.baths.clear();

  Ctx ctx{name, 0};
  std::string section;
  std::string raw;
  bool saw_relaxation_section = false;
  while (std::getline(in, raw)) {
    ++ctx.line;
    const auto hash = raw.find_first_of("#;");
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section == "relaxation") saw_relaxation_section = true;
      continue;
    }

    if (section == "sequences") {
      try {
        cfg.sequences.push_back(sequence::parse_sequence_spec(line, ctx.line));
      } catch (const std::invalid_argument& e) {
        ctx.fail(e.what());
      }
      continue;
    }
    if (section == "baths") {
      cfg.baths.push_back(parse_bath_line(ctx, line));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string val = trim(std::string_view(line).substr(eq + 1));

    if (section == "molecule") {
      if (key == "delta_nu") cfg.molecule.delta_nu = frequency_value(ctx, val);
      else if (key == "j_coupling") cfg.molecule.j_coupling = frequency_value(ctx, val);
      else ctx.fail("unknown molecule key '" + key + "'");
    } else if (section == "relaxation") {
      if (!cfg.noise.relaxation) cfg.noise.relaxation = dynamics::RelaxationParams{};
      if (key == "enabled") {
        if (!boolean(ctx, val)) cfg.noise.relaxation.reset();
      } else if (key == "t1") cfg.noise.relaxation->t1 = duration_value(ctx, val);
      else if (key == "t2") cfg.noise.relaxation->t2 = duration_value(ctx, val);
      else if (key == "dephasing") {
        if (val == "per_spin") cfg.noise.lindblad_scope = dynamics::DephasingScope::per_spin;
        else if (val == "collective") cfg.noise.lindblad_scope = dynamics::DephasingScope::collective;
        else ctx.fail("dephasing must be per_spin or collective");
      } else ctx.fail("unknown relaxation key '" + key + "'");
    } else if (section == "noise") {
      if (key == "static_offset_sigma") {
        cfg.noise.static_offset = dynamics::Distribution::gaussian(0.0, frequency_value(ctx, val));
      } else if (key == "static_offset_values") {
        std::vector<double> vals;
        for (const auto& tok : split_ws(val)) vals.push_back(frequency_value(ctx, tok));
        cfg.noise.static_offset = dynamics::Distribution::discrete(std::move(vals));
      } else if (key == "rf_scale_sigma") {
        const double trunc = cfg.noise.rf_scale.kind == dynamics::Distribution::Kind::gaussian
                                 ? cfg.noise.rf_scale.truncate
                                 : 3.0;
        cfg.noise.rf_scale = dynamics::Distribution::gaussian(1.0, number(ctx, val), trunc);
      } else if (key == "rf_scale_truncate") {
        cfg.noise.rf_scale.truncate = number(ctx, val);
      } else if (key == "ou_variance") {
        if (!cfg.noise.dephasing_process) cfg.noise.dephasing_process = dynamics::OuProcess{};
        cfg.noise.dephasing_process->variance = number(ctx, val);
      } else if (key == "ou_tau_c") {
        if (!cfg.noise.dephasing_process) cfg.noise.dephasing_process = dynamics::OuProcess{};
        cfg.noise.dephasing_process->tau_c = duration_value(ctx, val);
      } else if (key == "ou_scope") {
        if (val == "per_spin") cfg.noise.ou_scope = dynamics::DephasingScope::per_spin;
        else if (val == "collective") cfg.noise.ou_scope = dynamics::DephasingScope::collective;
        else ctx.fail("ou_scope must be per_spin or collective");
      } else if (key == "ensemble_size") {
        cfg.noise.ensemble_size = static_cast<int>(integer(ctx, val));
        if (cfg.noise.ensemble_size < 1) ctx.fail("ensemble_size must be >= 1");
      } else if (key == "master_seed") {
        cfg.noise.master_seed = static_cast<std::uint64_t>(integer(ctx, val));
      } else if (key == "relax_during_pulses") {
        cfg.noise.relax_during_pulses = boolean(ctx, val);
      } else ctx.fail("unknown noise key '" + key + "'");
    } else if (section == "initial") {
      if (key == "state") cfg.initial_state = val;
      else ctx.fail("unknown initial key '" + key + "'");
    } else if (section == "grid") {
      if (key == "max_duration") cfg.grid_max_duration = duration_value(ctx, val);
      else if (key == "points") cfg.grid_points = static_cast<int>(integer(ctx, val));
      else if (key == "times") {
        cfg.grid_times.clear();
        for (const auto& tok : split_ws(val)) cfg.grid_times.push_back(duration_value(ctx, tok));
        if (!std::is_sorted(cfg.grid_times.begin(), cfg.grid_times.end())) {
          ctx.fail("grid times must be increasing");
        }
      } else ctx.fail("unknown grid key '" + key + "'");
    } else if (section == "spinlock") {
      if (key == "singlet_lifetime") cfg.spinlock.singlet_lifetime = duration_value(ctx, val);
      else if (key == "triplet_mixing_rate") cfg.spinlock.triplet_mixing_rate = number(ctx, val);
      else if (key == "leak_rate") cfg.spinlock.leak_rate = number(ctx, val);
      else if (key == "coherence_decay") cfg.spinlock.coherence_decay = number(ctx, val);
      else if (key == "thermal_recovery_rate") cfg.spinlock.thermal_recovery_rate = number(ctx, val);
      else if (key == "thermal_polarization") cfg.spinlock.thermal_polarization = number(ctx, val);
      else if (key == "max_duration") cfg.spinlock_max_duration = duration_value(ctx, val);
      else if (key == "points") cfg.spinlock_points = static_cast<int>(integer(ctx, val));
      else ctx.fail("unknown spinlock key '" + key + "'");
    } else if (section == "filter") {
      if (key == "duration") cfg.filter_duration = duration_value(ctx, val);
      else ctx.fail("unknown filter key '" + key + "'");
    } else if (section == "outputs") {
      if (key == "directory") cfg.outputs.directory = val;
      else if (key == "format") {
        if (val == "csv") cfg.outputs.format = OutputSpec::Format::csv;
        else if (val == "plotdata") cfg.outputs.format = OutputSpec::Format::plotdata;
        else ctx.fail("format must be csv or plotdata");
      } else ctx.fail("unknown outputs key '" + key + "'");
    } else if (section.empty()) {
      ctx.fail("key outside any [section]");
    } else {
      ctx.fail("unknown section [" + section + "]");
    }
  }
  (void)saw_relaxation_section;

  if (cfg.noise.relaxation) {
    const auto& r = *cfg.noise.relaxation;
    if (!(r.t1 > 0) || !(r.t2 > 0)) throw ConfigError("T1/T2 must be positive", name, 0);
    if (r.t2 > 2 * r.t1) throw ConfigError("T2 must be <= 2 T1", name, 0);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::vector<double> default_grid(double period, double max_duration, int points) {
  if (!(period > 0) || !(max_duration > 0) || points < 2) {
    throw std::invalid_argument("default_grid: need period > 0, max_duration > 0, points >= 2");
  }
  const long k_max = static_cast<long>(std::floor(max_duration / period + 1e-9));
  std::vector<double> out;
  if (k_max + 1 <= points) {
    out.reserve(k_max + 1);
    for (long k = 0; k <= k_max; ++k) out.push_back(static_cast<double>(k) * period);
    return out;
  }
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const long k = static_cast<long>(
        std::llround(static_cast<double>(i) * static_cast<double>(k_max) / (points - 1)));
    const double t = static_cast<double>(k) * period;
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

}  // namespace ddsim::experiment
