#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ghzcs/simulate.hpp"

namespace ghzcs {

// Row i = [cos(k*phi_i) for k = 1..n_max | -sin(k*phi_i) for k = 1..n_max].
struct MeasurementMatrix {
  int n_max = 0;
  std::vector<double> phis;
  std::vector<double> entries; // row-major, rows() x cols()

  int rows() const { return static_cast<int>(phis.size()); }
  int cols() const { return 2 * n_max; }
  double at(int row, int col) const { return entries[row * cols() + col]; }
};

// Cosine/sine coefficient pairs for frequencies 1..n_max (a[k-1], b[k-1]).
struct CoefficientVector {
  std::vector<double> a;
  std::vector<double> b;
  bool converged = true;
  int sweeps = 0;

  double magnitude(int frequency) const; // sqrt(a_k^2 + b_k^2), k is 1-based
};

struct SupportDetection {
  int frequency = 1;
  bool low_signal = false;
};

struct OlsFit {
  double a = 0.0;
  double b = 0.0;
  double residual_norm = 0.0;
};

struct RecoveryConfig {
  double alpha_ratio = 0.1;   // alpha = alpha_ratio * ||A^T y||_inf / M
  double lasso_tol = 1e-8;
  int lasso_max_sweeps = 10000;
};

struct RecoveryResult {
  int n_rec = 1;
  double a = 0.0;
  double b = 0.0;
  double coherence = 0.0;
  double theta = 0.0;
  double alpha_used = 0.0;
  int m_samples = 0;
  double residual_norm = 0.0;
  bool low_signal = false;
  bool converged = true;
  double mean_signal = 0.0; // diagnostic; the model itself has no intercept
};

// m i.i.d. uniform angles in [0, 2pi); duplicates within 1e-12 are redrawn.
std::vector<double> sample_angles(int m, std::uint64_t seed);

MeasurementMatrix build_measurement_matrix(const std::vector<double>& phis,
                                           int n_max);

// Smallest penalty for which the all-zero vector is a Lasso solution.
double lasso_alpha_max(const MeasurementMatrix& matrix,
                       const std::vector<double>& y);

// Minimizes (1/2M)||y - Ax||_2^2 + alpha ||x||_1 by cyclic coordinate
// descent with soft thresholding. Stops when the largest coordinate update
// drops below tol; a run that exhausts max_sweeps is returned with the
// converged flag cleared.
CoefficientVector lasso_fit(const MeasurementMatrix& matrix,
                            const std::vector<double>& y, double alpha,
                            double tol = 1e-8, int max_sweeps = 10000);

// Frequency with the largest coefficient magnitude; ties go to the smallest
// frequency. All magnitudes below 1e-12 raises the low-signal flag (with
// frequency 1).
SupportDetection detect_support(const CoefficientVector& coeffs);

// Closed-form least squares on the columns [cos(n*phi), -sin(n*phi)].
// Throws DegenerateAnglesError when the 2x2 normal matrix has condition
// number >= 1e8.
OlsFit ols_refine(const std::vector<double>& phis,
                  const std::vector<double>& y, int n_rec);

// Two-step pipeline: Lasso support detection, then unregularized OLS on the
// detected frequency; C = sqrt(a^2 + b^2), theta = atan2(b, a).
RecoveryResult recover_coherence(const std::vector<double>& phis,
                                 const std::vector<ParitySample>& samples,
                                 int n_max, const RecoveryConfig& config = {});

// Full-grid Fourier estimator on phi_j = j*pi/(n+1), j = 0..2n+1:
// I_q = (1/(2(n+1))) sum_j e^{i q phi_j} p_j for q = +-n, returning
// C = |I_n| + |I_-n| and theta = -arg(I_n).
std::pair<double, double>
fourier_grid_estimate(const std::vector<double>& grid_parities, int n);

// The angles the grid estimator expects, in order.
std::vector<double> fourier_grid_angles(int n);

} // namespace ghzcs
