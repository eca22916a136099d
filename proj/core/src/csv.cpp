#include <charconv>
#include <limits>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ddsim/experiment.hpp"

namespace ddsim::experiment {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void emit_csv(const std::vector<CorrelationTrace>& traces, std::ostream& out) {
  out << "state,sequence,time_s,correlation,std_error\n";
  for (const auto& tr : traces) {
    for (const auto& p : tr.points) {
      out << tr.state << ',' << tr.sequence << ',' << format_double(p.time) << ','
          << format_double(p.correlation) << ',' << format_double(p.std_error) << '\n';
    }
  }
}

void emit_plotdata(const std::vector<CorrelationTrace>& traces, std::ostream& out) {
  bool first = true;
  for (const auto& tr : traces) {
    if (!first) out << '\n';
    first = false;
    out << "# state=" << tr.state << " sequence=" << tr.sequence << '\n';
    out << "# time_s correlation std_error\n";
    for (const auto& p : tr.points) {
      out << format_double(p.time) << ' ' << format_double(p.correlation) << ' '
          << format_double(p.std_error) << '\n';
    }
  }
}

namespace {

double parse_field(const std::string& s, int line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<CorrelationTrace> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (line != "state,sequence,time_s,correlation,std_error") {
    throw std::runtime_error("csv: unexpected header '" + line + "'");
  }
  std::vector<CorrelationTrace> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string state, seq, t, c, e;
    if (!std::getline(iss, state, ',') || !std::getline(iss, seq, ',') ||
        !std::getline(iss, t, ',') || !std::getline(iss, c, ',') || !std::getline(iss, e)) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 5 fields");
    }
    if (out.empty() || out.back().state != state || out.back().sequence != seq) {
      out.push_back({state, seq, {}});
    }
    out.back().points.push_back(
        {parse_field(t, lineno), parse_field(c, lineno), parse_field(e, lineno)});
  }
  return out;
}

void emit_status_csv(const std::vector<SequenceStatus>& status, std::ostream& out) {
  out << "sequence,status\n";
  for (const auto& s : status) {
    std::string clean = s.status;
    for (auto& ch : clean) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << s.sequence << ',' << clean << '\n';
  }
}

void emit_filter_csv(const std::vector<FilterRow>& rows, std::ostream& out) {
  out << "sequence,bath,chi,W\n";
  for (const auto& r : rows) {
    out << r.sequence << ',' << r.bath << ',' << format_double(r.chi) << ','
        << format_double(r.w) << '\n';
  }
}

void emit_fit_csv(const std::vector<std::pair<std::string, FitResult>>& fits,
                  std::ostream& out) {
  out << "sequence,amplitude,tau_s,residual\n";
  for (const auto& [seq, fit] : fits) {
    out << seq << ',' << format_double(fit.amplitude) << ',' << format_double(fit.tau) << ','
        << format_double(fit.residual_norm) << '\n';
  }
}

void emit_counts_csv(const std::vector<std::pair<std::string, int>>& counts,
                     std::ostream& out) {
  out << "sequence,count\n";
  for (const auto& [seq, c] : counts) out << seq << ',' << c << '\n';
}

}  // namespace ddsim::experiment
