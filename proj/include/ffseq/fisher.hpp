#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "ffseq/signal_model.hpp"

namespace ffseq {

enum class PathParam : int {
  elevation_tx = 0,
  azimuth_tx = 1,
  elevation_rx = 2,
  azimuth_rx = 3,
  doppler = 4,
  amplitude = 5,
  phase = 6,
};

inline constexpr int kPathParamCount = 7;

const std::array<std::string, kPathParamCount>& path_param_labels();

struct FisherMatrix {
  Eigen::Matrix<double, kPathParamCount, kPathParamCount> values;
  const std::array<std::string, kPathParamCount>& labels() const { return path_param_labels(); }
};

// Columns follow the PathParam order. Analytic derivatives of the single-pair
// model s = gain * ((b_t kron b_tx kron b_rx) had a_nu) kron b_f.
Eigen::MatrixXcd jacobian(const PathParameters& path, const SoundingConfig& cfg);

// Slepian-Bangs: F = (2/sigma^2) Re{D^H D}
FisherMatrix fim(const PathParameters& path, const SoundingConfig& cfg, double noise_std);

// Closed-form Doppler/angle cross entry; equals the matching fim() element.
double fim_cross_doppler_angle(const PathParameters& path, const SoundingConfig& cfg,
                               PathParam which, double noise_std);

// Closed-form Doppler diagonal; for unit-modulus responses this reduces to
// 8 (r*pi*||eta||/sigma)^2 and is invariant under permutations of the sequence.
double fim_doppler_diagonal(const PathParameters& path, const SoundingConfig& cfg,
                            double noise_std);

// Diagonal of F^{-1}; eigendecomposition with condition cap 1e12.
Eigen::VectorXd crlb(const FisherMatrix& f);
Eigen::VectorXd crlb(const Eigen::MatrixXd& fisher_values);
// Subset variant: invert only the sub-matrix of the listed parameters.
Eigen::VectorXd crlb(const FisherMatrix& f, const std::vector<PathParam>& active);

struct FisherCostConfig {
  // which cross terms enter the cost (f_1..f_4)
  bool doppler_azimuth_tx = true;
  bool doppler_elevation_tx = true;
  bool doppler_azimuth_rx = true;
  bool doppler_elevation_rx = true;
  int azimuth_count = 181;    // uniform over [0, 2*pi)
  int elevation_count = 91;   // uniform over [0, pi]
  bool refine = false;        // golden-section polish of the grid maxima
  int refine_iters = 30;
  Polarization pol = Polarization::vertical;

  void validate() const;
};

// Evaluates the sequence-design cost J(eta): the sum of the active angle-grid
// maxima of the Doppler/angle FIM cross magnitudes at r = sigma = 1. Response
// and derivative tables over the angle grids are precomputed once so repeated
// evaluations during annealing touch only O(grid * M) work.
class FisherCostEvaluator {
 public:
  FisherCostEvaluator(const ArrayModel& tx, const ArrayModel& rx, FisherCostConfig cfg);

  // eta of length M_T * M_R
  double joint_cost(const Eigen::VectorXd& eta) const;
  // per-side costs over side sequences (length M_T resp. M_R)
  double tx_cost(const Eigen::VectorXd& eta_t) const;
  double rx_cost(const Eigen::VectorXd& eta_r) const;

  int tx_elements() const { return tx_elements_; }
  int rx_elements() const { return rx_elements_; }

 private:
  struct SideTables {
    Eigen::MatrixXcd response;       // M x grid
    Eigen::MatrixXcd d_azimuth;      // M x grid
    Eigen::MatrixXcd d_elevation;    // M x grid
    std::vector<double> azimuths;    // per grid column
    std::vector<double> elevations;  // per grid column
  };

  double side_cost(const SideTables& t, const ArrayModel& model, const Eigen::VectorXd& eta_side,
                   bool use_azimuth, bool use_elevation) const;

  FisherCostConfig cfg_;
  ArrayModel tx_;
  ArrayModel rx_;
  int tx_elements_ = 0;
  int rx_elements_ = 0;
  SideTables tx_tables_;
  SideTables rx_tables_;
};

double fisher_cost(const Eigen::VectorXd& eta, const ArrayModel& tx, const ArrayModel& rx,
                   const FisherCostConfig& cfg);

// O(M) shortcut for an isotropic ULA TX with a single-antenna RX: |eta . m|.
double fisher_cost_isotropic_ula(const Eigen::VectorXd& eta, const Eigen::VectorXd& m);

enum class WidebandMode { sum, composite };

// Collapse per-frequency patterns into one composite pattern: per element and
// angle, inverse-transform the frequency response and keep the complex
// amplitude of the strongest delay bin (ties to the smallest delay).
ArrayModel composite_pattern(const std::vector<ArrayModel>& per_frequency);

double wideband_fisher_cost(const Eigen::VectorXd& eta,
                            const std::vector<ArrayModel>& tx_per_frequency,
                            const std::vector<ArrayModel>& rx_per_frequency,
                            const FisherCostConfig& cfg, WidebandMode mode);

}  // namespace ffseq
