#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ddsim/dynamics.hpp"
#include "ddsim/sequence.hpp"

namespace ddsim::bathfn {

using sequence::TimingVector;

/// Bath spectrum S(omega), omega in rad/s, normalized so that the
/// dephasing exponent chi = (2/pi) Int_0^inf S(w) F(wT)/w^2 dw.
/// The Lorentzian convention is pinned by requiring it to reproduce the
/// OU free-induction closed form chi = sigma^2 tau^2 (T/tau - 1 + e^(-T/tau)):
///   S(w) = sigma_w^2 tau_c / (2 (1 + w^2 tau_c^2)).
struct SpectralDensity {
  enum class Kind { lorentzian, ohmic_sharp_cutoff, table };
  Kind kind = Kind::lorentzian;
  std::string name;
  double variance = 0;  // sigma_w^2, rad^2/s^2 (lorentzian)
  double tau_c = 0;     // s (lorentzian)
  double alpha = 0;     // coupling (ohmic)
  double omega_c = 0;   // sharp cutoff, rad/s (ohmic)
  std::vector<double> omega;   // table nodes, increasing
  std::vector<double> values;  // S at the nodes; linear interp, 0 outside

  double operator()(double w) const;

  static SpectralDensity lorentzian(double variance, double tau_c);
  static SpectralDensity ohmic(double alpha, double omega_c);
  static SpectralDensity tabulated(std::vector<double> omega, std::vector<double> values);
  /// Lorentzian matched to a classical OU dephasing process
  static SpectralDensity from_ou(const dynamics::OuProcess& ou);
};

struct FilterResult {
  double chi = 0;
  double w = 1;  // exp(-chi)
  double error_estimate = 0;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// F(wT) = |1 + (-1)^(N+1) e^(iwT) + 2 sum_j (-1)^j e^(i w t_j)|^2 for
/// instantaneous pi pulses. Direct evaluation cancels catastrophically for
/// wT below ~N suppression, so small arguments use a Taylor-moment series
/// with double-double accumulated moments; precompute once per timing vector
/// when evaluating many frequencies.
class FilterEvaluator {
 public:
  explicit FilterEvaluator(const TimingVector& times);

  double operator()(double omega) const;          // F(omega T)
  double filter_over_omega_sq(double omega) const;  // F(omega T)/omega^2, finite at 0
  double total_period() const { return period_; }
  /// crude uniform bound max_w F <= (2N+2)^2
  double upper_bound() const;

 private:
  double series(double x, bool divide_x2) const;
  double direct(double x) const;

  double period_;
  std::vector<double> scaled_;   // t_j / T
  std::vector<double> moments_;  // alternating scaled-time moments
};

double filter_function(const TimingVector& times, double omega);

/// chi = (2/pi) Int_0^inf S(w) F(wT)/w^2 dw, adaptive quadrature with
/// interval splitting at the cutoff and a bounded tail; declared relative
/// tolerance 1e-8. Throws QuadratureError when the integral fails to converge.
FilterResult chi(const TimingVector& times, const SpectralDensity& s);

/// (T, W=exp(-chi)) for each grid point; T = 0 gives W = 1 exactly.
std::vector<std::pair<double, double>> coherence_curve(
    const std::function<TimingVector(double)>& times_for, const SpectralDensity& s,
    std::span<const double> t_grid);

}  // namespace ddsim::bathfn
