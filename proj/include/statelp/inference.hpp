#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "statelp/estimator.hpp"

namespace statelp {

/// Per-base-time score s_t = sum_i Ptilde_{i,t} uhat_{i,t+h}, where Ptilde is
/// the sieve regressor partialled against the intermediate blocks and
/// controls. One row per base time.
struct ScoreSeries {
  Eigen::MatrixXd scores;  // n_times x J
  std::vector<int> base_times;
  long n = 0;  // stacked sample size behind the fit
};

ScoreSeries score_process(const LpFit& fit);

struct HacEstimate {
  Eigen::MatrixXd omega;    // J x J, symmetric
  int lag = 0;              // L
  Eigen::VectorXd weights;  // Bartlett w_k = (L+1-k)/(L+1), k = 1..L
};

/// Truncation lag floor(4 (n/100)^{2/9}).
int default_hac_lag(long n);

/// Bartlett long-run covariance of the score series. When lag is not given it
/// defaults to default_hac_lag(n).
HacEstimate bartlett_hac(const ScoreSeries& scores, std::optional<int> lag = std::nullopt);

struct CoefCovariance {
  Eigen::MatrixXd v;  // J x J
  long n = 0;
};

/// Sandwich (1/n) schur^{-1} omega schur^{-1}.
CoefCovariance coef_covariance(const HacEstimate& hac, const LpFit& fit);

/// sigma(z) = sqrt(phi(z)' V phi(z)) on a grid. Negative quadratic forms
/// beyond -1e-12 raise NumericalError; smaller negatives clip to zero.
Eigen::VectorXd pointwise_sd(const LpFit& fit, const CoefCovariance& cov,
                             const Eigen::Ref<const Eigen::VectorXd>& grid);

struct PointwiseBand {
  Eigen::VectorXd lo, hi;
};

PointwiseBand pointwise_ci(const LpFit& fit, const CoefCovariance& cov,
                           const Eigen::Ref<const Eigen::VectorXd>& grid, double alpha,
                           double delta);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

/// Interval for g(z_a) - g(z_b) using the contrast variance
/// (phi(z_a)-phi(z_b))' V (phi(z_a)-phi(z_b)).
Interval contrast_ci(const LpFit& fit, const CoefCovariance& cov, double z_a, double z_b,
                     double alpha, double delta);

/// State grid with the point estimate, pointwise intervals and the sup-t
/// uniform band (constant half-width critical_value * delta).
struct IrfCurve {
  Eigen::VectorXd grid;
  Eigen::VectorXd estimate;      // ghat(z) * delta
  Eigen::VectorXd pointwise_se;  // sigma(z), per unit delta
  Eigen::VectorXd ci_lo, ci_hi;
  Eigen::VectorXd band_lo, band_hi;
  double critical_value = 0.0;  // c_{1-alpha}
  double alpha = 0.0;
  double delta = 1.0;
  int b_draws = 0;
  std::uint64_t seed = 0;
};

/// Critical value of the simulated sup statistic: draws xi ~ N(0, I_J), forms
/// max_m |phi(z_m)' V^{1/2} xi| and returns the ceil((1-alpha)B)-th order
/// statistic. V^{1/2} is the symmetric PSD root with negative eigenvalues
/// clipped to zero. Deterministic given the seed (one substream per draw).
double sup_band_critical_value(const Eigen::Ref<const Eigen::MatrixXd>& phi_grid,
                               const Eigen::Ref<const Eigen::MatrixXd>& v, int b_draws,
                               double alpha, std::uint64_t seed);

IrfCurve uniform_band(const LpFit& fit, const CoefCovariance& cov,
                      const Eigen::Ref<const Eigen::VectorXd>& grid, int b_draws, double alpha,
                      double delta, std::uint64_t seed);

}  // namespace statelp
