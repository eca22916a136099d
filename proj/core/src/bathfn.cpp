#include "ddsim/bathfn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ddsim/quadrature.hpp"

namespace ddsim::bathfn {

// ---------------------------------------------------------------------------
// spectral densities

double SpectralDensity::operator()(double w) const {
  w = std::abs(w);
  switch (kind) {
    case Kind::lorentzian:
      return variance * tau_c / (2.0 * (1.0 + w * w * tau_c * tau_c));
    case Kind::ohmic_sharp_cutoff:
      return w <= omega_c ? alpha * w : 0.0;
    case Kind::table: {
      if (omega.empty() || w < omega.front() || w > omega.back()) return 0.0;
      const auto it = std::upper_bound(omega.begin(), omega.end(), w);
      if (it == omega.begin()) return values.front();
      if (it == omega.end()) return values.back();
      const std::size_t hi = static_cast<std::size_t>(it - omega.begin());
      const std::size_t lo = hi - 1;
      const double f = (w - omega[lo]) / (omega[hi] - omega[lo]);
      return values[lo] + f * (values[hi] - values[lo]);
    }
  }
  return 0.0;
}

SpectralDensity SpectralDensity::lorentzian(double variance, double tau_c) {
  if (variance < 0 || !(tau_c > 0)) {
    throw std::invalid_argument("lorentzian bath: need variance >= 0 and tau_c > 0");
  }
  SpectralDensity s;
  s.kind = Kind::lorentzian;
  s.variance = variance;
  s.tau_c = tau_c;
  return s;
}

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c) {
  if (alpha < 0 || !(omega_c > 0)) {
    throw std::invalid_argument("ohmic bath: need alpha >= 0 and omega_c > 0");
  }
  SpectralDensity s;
  s.kind = Kind::ohmic_sharp_cutoff;
  s.alpha = alpha;
  s.omega_c = omega_c;
  return s;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> omega,
                                           std::vector<double> values) {
  if (omega.size() != values.size() || omega.size() < 2) {
    throw std::invalid_argument("table bath: need >= 2 matching (omega, S) samples");
  }
  for (std::size_t i = 0; i + 1 < omega.size(); ++i) {
    if (!(omega[i + 1] > omega[i])) {
      throw std::invalid_argument("table bath: omega nodes must be increasing");
    }
  }
  for (double v : values) {
    if (v < 0) throw std::invalid_argument("table bath: S(omega) must be >= 0");
  }
  SpectralDensity s;
  s.kind = Kind::table;
  s.omega = std::move(omega);
  s.values = std::move(values);
  return s;
}

SpectralDensity SpectralDensity::from_ou(const dynamics::OuProcess& ou) {
  return lorentzian(ou.variance, ou.tau_c);
}

// ---------------------------------------------------------------------------
// double-double helpers for the moment sums

namespace {

struct DD {
  double hi = 0, lo = 0;
};

DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  const DD t = two_sum(s.hi, s.lo);
  return t;
}

DD dd_mul(DD a, double b) {
  const double p = a.hi * b;
  const double e = std::fma(a.hi, b, -p);
  DD t = two_sum(p, e + a.lo * b);
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// filter function

FilterEvaluator::FilterEvaluator(const TimingVector& times) : period_(times.total_period) {
  if (!(period_ > 0)) throw std::invalid_argument("filter: total period must be > 0");
  scaled_.reserve(times.instants.size());
  for (double t : times.instants) {
    if (!(t > 0) || !(t < period_)) {
      throw std::invalid_argument("filter: instants must lie strictly inside (0, T)");
    }
    scaled_.push_back(t / period_);
  }
  const int n = static_cast<int>(scaled_.size());
  const int max_m = n + 60;
  const double endpoint_sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^(N+1)

  std::vector<DD> powers(scaled_.size(), DD{1.0, 0.0});
  moments_.resize(static_cast<std::size_t>(max_m) + 1);
  for (int m = 0; m <= max_m; ++m) {
    DD acc = two_sum(m == 0 ? 1.0 : 0.0, endpoint_sign);
    for (std::size_t j = 0; j < scaled_.size(); ++j) {
      const double sign = (j % 2 == 0) ? -1.0 : 1.0;  // (-1)^(j+1) for 1-based j
      acc = dd_add(acc, dd_mul(powers[j], 2.0 * sign));
      powers[j] = dd_mul(powers[j], scaled_[j]);
    }
    moments_[static_cast<std::size_t>(m)] = acc.hi + acc.lo;
  }
}

double FilterEvaluator::series(double x, bool divide_x2) const {
  // G(x) = sum_m M_m (ix)^m / m!; returns |G|^2 or |G/x|^2
  double re = 0, im = 0;
  double coeff = divide_x2 ? 1.0 : x;  // x^(m-1)/m! or x^m/m!, starting at m=1
  for (std::size_t m = 1; m < moments_.size(); ++m) {
    coeff /= static_cast<double>(m);
    const double term = moments_[m] * coeff;
    switch (m % 4) {  // i^m
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      case 3: im -= term; break;
    }
    coeff *= x;
  }
  if (!divide_x2) {
    // m = 0 term (structurally zero for every sequence; kept for honesty)
    re += moments_[0];
  }
  return re * re + im * im;
}

double FilterEvaluator::direct(double x) const {
  const int n = static_cast<int>(scaled_.size());
  std::complex<double> s(1.0, 0.0);
  const double endpoint_sign = (n % 2 == 0) ? -1.0 : 1.0;
  s += endpoint_sign * std::complex<double>(std::cos(x), std::sin(x));
  for (std::size_t j = 0; j < scaled_.size(); ++j) {
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    const double a = x * scaled_[j];
    s += 2.0 * sign * std::complex<double>(std::cos(a), std::sin(a));
  }
  return std::norm(s);
}

double FilterEvaluator::operator()(double omega) const {
  const double x = std::abs(omega) * period_;
  return x < 4.0 ? series(x, false) : direct(x);
}

double FilterEvaluator::filter_over_omega_sq(double omega) const {
  const double x = std::abs(omega) * period_;
  if (x < 4.0) return period_ * period_ * series(x, true);
  return direct(x) / (omega * omega);
}

double FilterEvaluator::upper_bound() const {
  const double terms = 2.0 + 2.0 * static_cast<double>(scaled_.size());
  return terms * terms;
}

double filter_function(const TimingVector& times, double omega) {
  return FilterEvaluator(times)(omega);
}

// ---------------------------------------------------------------------------
// dephasing exponent

FilterResult chi(const TimingVector& times, const SpectralDensity& s) {
  const FilterEvaluator filter(times);
  const double T = filter.total_period();
  const auto integrand = [&](double w) { return s(w) * filter.filter_over_omega_sq(w); };

  constexpr double kRelTol = 1e-8;
  const double scale = 2.0 / std::numbers::pi;

  // breakpoints of the integration range
  std::vector<double> cuts{0.0};
  double upper = 0;     // finite support end (0 = infinite)
  double tail_rate = 0; // S(w) ~ tail_rate / w^2 beyond the cuts, for the bound
  switch (s.kind) {
    case SpectralDensity::Kind::ohmic_sharp_cutoff:
      upper = s.omega_c;
      break;
    case SpectralDensity::Kind::table:
      for (double w : s.omega) {
        if (w > 0) cuts.push_back(w);
      }
      upper = s.omega.back();
      break;
    case SpectralDensity::Kind::lorentzian:
      tail_rate = s.variance / (2.0 * s.tau_c);
      break;
  }

  if (upper > 0) {
    cuts.push_back(upper);
  } else {
    cuts.push_back(std::max(16.0 * std::numbers::pi * (times.instants.size() + 1) / T,
                            (s.tau_c > 0 ? 30.0 / s.tau_c : 1.0)));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double value = 0, error = 0;
  const auto add_piece = [&](double lo, double hi) {
    const auto r = quadrature::integrate_adaptive(integrand, lo, hi, kRelTol * 0.1, 0.0, 4000);
    value += r.value;
    error += r.error;
    if (!r.converged) {
      throw QuadratureError("chi: quadrature failed to converge on [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "] after " +
                            std::to_string(r.evaluations) + " evaluations");
    }
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add_piece(cuts[i], cuts[i + 1]);

  if (upper == 0 && tail_rate > 0) {
    // extend the window until the rigorous tail bound Fmax tail_rate/(3 A^3)
    // is negligible against the accumulated value
    double a = cuts.back();
    const auto tail_bound = [&] { return filter.upper_bound() * tail_rate / (3.0 * a * a * a); };
    for (int i = 0; i < 40 && tail_bound() > 0.1 * kRelTol * std::max(value, 1e-30); ++i) {
      add_piece(a, 2.0 * a);
      a *= 2.0;
    }
    error += tail_bound();
  }

  FilterResult out;
  out.chi = scale * value;
  out.error_estimate = scale * error;
  if (out.chi < 0 && out.chi > -1e-12) out.chi = 0;  // roundoff at S ~ 0
  if (out.chi < 0) throw QuadratureError("chi: negative exponent from quadrature");
  if (out.error_estimate > kRelTol * std::max(out.chi, 1e-30) && out.chi > 0 &&
      out.error_estimate > 1e-14) {
    throw QuadratureError("chi: declared tolerance not met (estimate " +
                          std::to_string(out.error_estimate) + " vs chi " +
                          std::to_string(out.chi) + ")");
  }
  out.w = std::exp(-out.chi);
  return out;
}

std::vector<std::pair<double, double>> coherence_curve(
    const std::function<TimingVector(double)>& times_for, const SpectralDensity& s,
    std::span<const double> t_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t <= 0) {
      out.emplace_back(t, 1.0);
      continue;
    }
    out.emplace_back(t, chi(times_for(t), s).w);
  }
  return out;
}

}  // namespace ddsim::bathfn
