#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ffseq/fisher.hpp"
#include "ffseq/signal_model.hpp"

namespace ffseq {

struct EstimatorGrid {
  int azimuth_count = 181;
  double azimuth_lo = -std::numbers::pi;
  double azimuth_hi = std::numbers::pi;
  int doppler_count = 129;
  double doppler_lo = 0.0;  // lo == hi: use +-1/(2*dt)
  double doppler_hi = 0.0;
  int refine_iters = 40;  // golden-section iterations per dimension

  void validate(const SwitchingSequence& seq) const;
  std::pair<double, double> doppler_range(const SwitchingSequence& seq) const;
};

struct Estimate {
  double azimuth = 0.0;   // rad
  double doppler = 0.0;   // Hz
  Complex gain{0.0, 0.0};
};

// Concentrated maximum likelihood over (azimuth_tx, doppler): grid argmax of
// |b^H y|^2 / ||b||^2 followed by alternating golden-section refinement. The
// path gain is recovered in closed form. All other path parameters are taken
// from `known`.
Estimate mle_estimate(const Eigen::VectorXcd& y, const SoundingConfig& cfg,
                      const PathParameters& known, const EstimatorGrid& grid);

struct SequenceResult {
  std::string name;
  SwitchingSequence sequence;
  Eigen::VectorXd azimuth_rmse_deg;    // per SNR
  Eigen::VectorXd azimuth_logmse;      // log10 of the MSE in deg^2
  Eigen::VectorXd doppler_rmse_hz;
  Eigen::VectorXd doppler_logmse;      // log10 of the MSE in Hz^2
  Eigen::VectorXd crlb_azimuth_deg2;
  Eigen::VectorXd crlb_doppler_hz2;
  Eigen::MatrixXd azimuth_estimates_deg;  // trials x SNR points
  Eigen::MatrixXd doppler_estimates_hz;
};

struct MonteCarloReport {
  std::vector<double> snr_db;
  int trials = 0;
  std::uint64_t seed = 0;
  PathParameters truth;
  std::vector<SequenceResult> sequences;
};

struct MonteCarloConfig {
  std::vector<double> snr_db;
  int trials = 1;
  std::uint64_t seed = 0;
  EstimatorGrid grid;

  void validate() const;
};

// Per-sample SNR convention: snr = r^2 * mean(|basis|^2) / sigma^2, so sigma
// is derived per (sequence, SNR). Every trial shares one unit-variance noise
// draw across all sequences, making the comparison paired.
double noise_std_for_snr(const PathParameters& truth, const SoundingConfig& cfg, double snr_db);

MonteCarloReport run_monte_carlo(const SoundingConfig& base,
                                 const std::vector<std::pair<std::string, SwitchingSequence>>& sequences,
                                 const PathParameters& truth, const MonteCarloConfig& cfg);

// CRLB of the estimated parameter set (azimuth_tx, doppler, amplitude, phase)
// at the true path; returns (azimuth rad^2, doppler Hz^2).
std::pair<double, double> crlb_reference(const SoundingConfig& cfg, const PathParameters& truth,
                                         double snr_db);

struct CdfTable {
  Eigen::VectorXd azimuth_deg;  // sorted estimates
  Eigen::VectorXd cumulative;   // nondecreasing, ends at 1
};

CdfTable estimate_cdf(const MonteCarloReport& report, size_t sequence_index, double snr_db);

double wrap_degrees(double deg);  // to (-180, 180]

}  // namespace ffseq
