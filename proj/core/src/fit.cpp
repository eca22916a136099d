#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "ddsim/experiment.hpp"

namespace ddsim::experiment {

FitResult fit_exponential(std::span<const std::pair<double, double>> points) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");

  bool all_equal = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (points[i].second != points[0].second) {
      all_equal = false;
      break;
    }
  }
  if (all_equal) throw FitError("fit_exponential: constant data, singular fit");

  // log-linear initialization on the positive subset
  double a = 0, tau = 0;
  std::size_t pos = 0;
  for (const auto& [t, y] : points)
    if (y > 0) ++pos;
  if (pos >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, y] : points) {
      if (y <= 0) continue;
      const double ly = std::log(y);
      sx += t;
      sy += ly;
      sxx += t * t;
      sxy += t * ly;
    }
    const double m = static_cast<double>(pos);
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) > 0) {
      const double slope = (m * sxy - sx * sy) / denom;
      const double icept = (sy - slope * sx) / m;
      a = std::exp(icept);
      tau = slope < 0 ? -1.0 / slope : 0.0;
    }
  }
  if (!(tau > 0) || !std::isfinite(a) || !std::isfinite(tau)) {
    // direct heuristic: amplitude from the largest magnitude, tau from the span
    double amax = 0;
    for (const auto& [t, y] : points) amax = std::max(amax, std::abs(y));
    a = amax > 0 ? amax : 1.0;
    tau = std::max(1e-12, 0.5 * (points.back().first - points.front().first));
  }

  // damped Gauss-Newton on (A, tau)
  auto sum_sq = [&](double aa, double tt) {
    double s = 0;
    for (const auto& [t, y] : points) {
      const double r = y - aa * std::exp(-t / tt);
      s += r * r;
    }
    return s;
  };
  double ss = sum_sq(a, tau);
  bool converged = false;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (const auto& [t, y] : points) {
      const double e = std::exp(-t / tau);
      const double r = y - a * e;
      const Eigen::Vector2d j(e, a * e * t / (tau * tau));  // d(model)/d(A, tau)
      jtj += j * j.transpose();
      jtr += j * r;
    }
    if (!(jtj.determinant() > 1e-300)) throw FitError("fit_exponential: singular normal equations");
    Eigen::Vector2d step = jtj.ldlt().solve(jtr);
    double scale = 1.0;
    for (int h = 0; h < 60; ++h) {
      const double a2 = a + scale * step(0);
      const double tau2 = tau + scale * step(1);
      if (tau2 > 0) {
        const double ss2 = sum_sq(a2, tau2);
        if (ss2 <= ss * (1.0 + 1e-14)) {
          const double rel = std::max(std::abs(scale * step(0)) / std::max(1e-300, std::abs(a2)),
                                      std::abs(scale * step(1)) / tau2);
          a = a2;
          tau = tau2;
          ss = ss2;
          if (rel < 1e-10) converged = true;
          break;
        }
      }
      scale *= 0.5;
      if (h == 59) converged = true;  // no productive step left
    }
    if (converged) break;
  }
  if (!(tau > 0)) throw FitError("fit_exponential: no positive time constant found");

  FitResult out;
  out.amplitude = a;
  out.tau = tau;
  out.residual_norm = std::sqrt(ss);

  Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
  for (const auto& [t, y] : points) {
    const double e = std::exp(-t / tau);
    const Eigen::Vector2d j(e, a * e * t / (tau * tau));
    jtj += j * j.transpose();
    (void)y;
  }
  const double dof = static_cast<double>(n) - 2.0;
  const double s2 = dof > 0 ? ss / dof : 0.0;
  const Eigen::Matrix2d cov = s2 * jtj.inverse();
  out.cov_amplitude = cov(0, 0);
  out.cov_tau = cov(1, 1);
  return out;
}

}  // namespace ddsim::experiment
