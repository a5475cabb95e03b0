#include "ghzcs/recover.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ghzcs/errors.hpp"
#include "ghzcs/rng.hpp"

namespace ghzcs {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double normalize_angle(double theta) {
  // atan2 lands in [-pi, pi]; fold the closed lower edge onto +pi.
  if (theta <= -std::numbers::pi) return theta + 2.0 * std::numbers::pi;
  return theta;
}

} // namespace

double CoefficientVector::magnitude(int frequency) const {
  const double ak = a[frequency - 1];
  const double bk = b[frequency - 1];
  return std::hypot(ak, bk);
}

std::vector<double> sample_angles(int m, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("need at least 2 angles");
  std::mt19937_64 rng = substream(seed, 0);
  std::vector<double> phis;
  phis.reserve(m);
  while (static_cast<int>(phis.size()) < m) {
    const double phi = canonical(rng) * 2.0 * std::numbers::pi;
    const bool dup = std::any_of(phis.begin(), phis.end(), [&](double p) {
      return std::abs(p - phi) < 1e-12;
    });
    if (!dup) phis.push_back(phi);
  }
  return phis;
}

MeasurementMatrix build_measurement_matrix(const std::vector<double>& phis,
                                           int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be positive");
  if (phis.empty()) throw std::invalid_argument("no angles given");
  MeasurementMatrix matrix;
  matrix.n_max = n_max;
  matrix.phis = phis;
  matrix.entries.resize(phis.size() * static_cast<std::size_t>(2 * n_max));
  for (std::size_t i = 0; i < phis.size(); ++i) {
    for (int k = 1; k <= n_max; ++k) {
      matrix.entries[i * 2 * n_max + (k - 1)] = std::cos(k * phis[i]);
      matrix.entries[i * 2 * n_max + (n_max + k - 1)] = -std::sin(k * phis[i]);
    }
  }
  return matrix;
}

double lasso_alpha_max(const MeasurementMatrix& matrix,
                       const std::vector<double>& y) {
  const int m = matrix.rows();
  if (static_cast<int>(y.size()) != m) {
    throw std::invalid_argument("y length does not match matrix rows");
  }
  double best = 0.0;
  for (int j = 0; j < matrix.cols(); ++j) {
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += matrix.at(i, j) * y[i];
    best = std::max(best, std::abs(dot));
  }
  return best / m;
}

CoefficientVector lasso_fit(const MeasurementMatrix& matrix,
                            const std::vector<double>& y, double alpha,
                            double tol, int max_sweeps) {
  const int m = matrix.rows();
  const int cols = matrix.cols();
  if (static_cast<int>(y.size()) != m) {
    throw std::invalid_argument("y length does not match matrix rows");
  }
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");

  std::vector<double> x(cols, 0.0);
  std::vector<double> residual = y;
  std::vector<double> col_sq(cols, 0.0); // ||A_j||^2 / M
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += matrix.at(i, j) * matrix.at(i, j);
    col_sq[j] = s / m;
  }

  CoefficientVector coeffs;
  coeffs.converged = false;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (int j = 0; j < cols; ++j) {
      if (col_sq[j] == 0.0) continue;
      double dot = 0.0;
      for (int i = 0; i < m; ++i) dot += matrix.at(i, j) * residual[i];
      const double rho = dot / m + col_sq[j] * x[j];
      const double x_new = soft_threshold(rho, alpha) / col_sq[j];
      const double delta = x_new - x[j];
      if (delta != 0.0) {
        for (int i = 0; i < m; ++i) residual[i] -= delta * matrix.at(i, j);
        x[j] = x_new;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < tol) {
      coeffs.converged = true;
      ++sweep;
      break;
    }
  }
  coeffs.sweeps = sweep;
  coeffs.a.assign(x.begin(), x.begin() + matrix.n_max);
  coeffs.b.assign(x.begin() + matrix.n_max, x.end());
  return coeffs;
}

SupportDetection detect_support(const CoefficientVector& coeffs) {
  if (coeffs.a.empty()) throw std::invalid_argument("empty coefficient vector");
  SupportDetection det;
  double best = -1.0;
  for (int k = 1; k <= static_cast<int>(coeffs.a.size()); ++k) {
    const double mag = coeffs.magnitude(k);
    if (mag > best) { // strict: ties keep the smaller frequency
      best = mag;
      det.frequency = k;
    }
  }
  if (best < 1e-12) {
    det.frequency = 1;
    det.low_signal = true;
  }
  return det;
}

OlsFit ols_refine(const std::vector<double>& phis,
                  const std::vector<double>& y, int n_rec) {
  const int m = static_cast<int>(phis.size());
  if (m < 2) throw std::invalid_argument("OLS needs at least 2 samples");
  if (static_cast<int>(y.size()) != m) {
    throw std::invalid_argument("y length does not match angle count");
  }
  if (n_rec < 1) throw std::invalid_argument("frequency must be positive");

  double s_uu = 0.0, s_uv = 0.0, s_vv = 0.0, s_uy = 0.0, s_vy = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = std::cos(n_rec * phis[i]);
    const double v = -std::sin(n_rec * phis[i]);
    s_uu += u * u;
    s_uv += u * v;
    s_vv += v * v;
    s_uy += u * y[i];
    s_vy += v * y[i];
  }
  const double trace = s_uu + s_vv;
  const double det = s_uu * s_vv - s_uv * s_uv;
  const double disc = std::sqrt(std::max(0.0, trace * trace - 4.0 * det));
  const double lambda_max = 0.5 * (trace + disc);
  const double lambda_min = 0.5 * (trace - disc);
  if (!(lambda_min > 0.0) || lambda_max >= 1e8 * lambda_min) {
    throw DegenerateAnglesError(
        "angle set is degenerate for frequency " + std::to_string(n_rec));
  }

  OlsFit fit;
  fit.a = (s_vv * s_uy - s_uv * s_vy) / det;
  fit.b = (s_uu * s_vy - s_uv * s_uy) / det;
  double rss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = std::cos(n_rec * phis[i]);
    const double v = -std::sin(n_rec * phis[i]);
    const double r = y[i] - fit.a * u - fit.b * v;
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

RecoveryResult recover_coherence(const std::vector<double>& phis,
                                 const std::vector<ParitySample>& samples,
                                 int n_max, const RecoveryConfig& config) {
  if (phis.size() != samples.size()) {
    throw std::invalid_argument("angle and sample counts differ");
  }
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (std::abs(phis[i] - samples[i].phi) > 1e-12) {
      throw std::invalid_argument("samples are not aligned with the angles");
    }
  }
  std::vector<double> y;
  y.reserve(samples.size());
  for (const ParitySample& s : samples) y.push_back(s.parity);

  const MeasurementMatrix matrix = build_measurement_matrix(phis, n_max);
  const double alpha = config.alpha_ratio * lasso_alpha_max(matrix, y);
  const CoefficientVector coeffs =
      lasso_fit(matrix, y, alpha, config.lasso_tol, config.lasso_max_sweeps);
  const SupportDetection det = detect_support(coeffs);
  const OlsFit fit = ols_refine(phis, y, det.frequency);

  RecoveryResult result;
  result.n_rec = det.frequency;
  result.a = fit.a;
  result.b = fit.b;
  result.coherence = std::hypot(fit.a, fit.b);
  result.theta = normalize_angle(std::atan2(fit.b, fit.a));
  result.alpha_used = alpha;
  result.m_samples = static_cast<int>(samples.size());
  result.residual_norm = fit.residual_norm;
  result.low_signal = det.low_signal;
  result.converged = coeffs.converged;
  double mean = 0.0;
  for (double v : y) mean += v;
  result.mean_signal = y.empty() ? 0.0 : mean / static_cast<double>(y.size());
  return result;
}

std::vector<double> fourier_grid_angles(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  std::vector<double> phis;
  phis.reserve(2 * (n + 1));
  for (int j = 0; j < 2 * (n + 1); ++j) {
    phis.push_back(j * std::numbers::pi / (n + 1));
  }
  return phis;
}

std::pair<double, double>
fourier_grid_estimate(const std::vector<double>& grid_parities, int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const std::size_t expected = 2 * (static_cast<std::size_t>(n) + 1);
  if (grid_parities.size() != expected) {
    throw std::invalid_argument("grid needs exactly 2(n+1) parities");
  }
  std::complex<double> i_pos{0.0, 0.0};
  std::complex<double> i_neg{0.0, 0.0};
  for (std::size_t j = 0; j < expected; ++j) {
    const double angle = n * static_cast<double>(j) * std::numbers::pi / (n + 1);
    i_pos += std::polar(1.0, angle) * grid_parities[j];
    i_neg += std::polar(1.0, -angle) * grid_parities[j];
  }
  i_pos /= static_cast<double>(expected);
  i_neg /= static_cast<double>(expected);
  const double coherence = std::abs(i_pos) + std::abs(i_neg);
  const double theta = normalize_angle(-std::arg(i_pos));
  return {coherence, theta};
}

} // namespace ghzcs
