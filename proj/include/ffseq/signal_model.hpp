#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ffseq/array_model.hpp"
#include "ffseq/rng.hpp"

namespace ffseq {

// Timing vector of a permutation-based switching schedule:
// eta_k = dt * (perm_k - 1 - (M-1)/2). Centered, so sum(eta) = 0 and the norm
// is the same for every permutation of the same (M, dt).
Eigen::VectorXd eta_from_permutation(const std::vector<int>& perm, double dt);

void validate_permutation(const std::vector<int>& perm);

struct SwitchingSequence {
  std::vector<int> perm;  // values 1..M, each exactly once
  double dt = 1.0;
  Eigen::VectorXd eta;    // derived

  static SwitchingSequence from_permutation(std::vector<int> perm, double dt);
  static SwitchingSequence trivial(int pair_count, double dt);

  int size() const { return static_cast<int>(perm.size()); }
};

// Literal Kronecker product of two timing vectors (length M_T * M_R).
Eigen::VectorXd kron_sequence(const Eigen::VectorXd& eta_t, const Eigen::VectorXd& eta_r);

// Activation times of nested TX/RX switching: pair (i, j) fires at
// eta_t[i] + eta_r[j]. This is the timing whose Doppler phase factors as the
// Kronecker product of the per-side phase vectors.
Eigen::VectorXd kron_sum_timing(const Eigen::VectorXd& eta_t, const Eigen::VectorXd& eta_r);

// [a]_k = exp(j*2*pi*doppler_hz*eta_full[k])
Eigen::VectorXcd doppler_phase_vector(double doppler_hz, const Eigen::VectorXd& eta_full);

// (b_t kron b_r) hadamard a_nu
Eigen::VectorXcd basis_vector_single_pol(const Eigen::VectorXcd& b_t,
                                         const Eigen::VectorXcd& b_r, double doppler_hz,
                                         const Eigen::VectorXd& eta);

struct PathParameters {
  double elevation_tx = 0.0;  // rad
  double azimuth_tx = 0.0;    // rad
  double elevation_rx = 0.0;  // rad
  double azimuth_rx = 0.0;    // rad
  double doppler_hz = 0.0;
  double amplitude = 1.0;     // r >= 0
  double phase = 0.0;         // psi, rad

  Complex gain() const;  // r * e^{j*psi}
};

struct StructuralParams {
  double azimuth_tx = 0.0;
  double elevation_tx = 0.0;
  double azimuth_rx = 0.0;
  double elevation_rx = 0.0;
  double doppler_hz = 0.0;

  static StructuralParams of(const PathParameters& p);
};

// Everything fixed about one sounding setup: arrays, switching sequence,
// snapshot and frequency structure. The switching schedule repeats identically
// in every snapshot; snapshot_period spaces the snapshot start times so the
// Doppler phase accumulates across snapshots, while snapshot_basis holds any
// additional static per-snapshot weighting.
struct SoundingConfig {
  ArrayModel tx;
  ArrayModel rx;
  SwitchingSequence sequence;
  Polarization pol = Polarization::vertical;  // active pair for single-pol ops
  int snapshots = 1;
  double snapshot_period = 0.0;
  Eigen::VectorXcd snapshot_basis;   // b_t (static part); empty = all ones
  Eigen::VectorXcd frequency_basis;  // b_f; empty = [1]

  SoundingConfig(ArrayModel tx_model, ArrayModel rx_model, SwitchingSequence seq);

  int pair_count() const { return sequence.size(); }
  int frequency_count() const;
  int signal_length() const;  // snapshots * pair_count * frequency_count
  Eigen::VectorXcd snapshot_vector() const;
  Eigen::VectorXcd frequency_vector() const;
  // sequence timing tiled over snapshots, shifted by the centered snapshot
  // start times
  Eigen::VectorXd full_timing() const;
  void validate() const;
};

// (((b_t kron b_tx kron b_rx) had a_nu) kron b_f) for one polarization pair
Eigen::VectorXcd structural_vector(const SoundingConfig& cfg, const StructuralParams& mu,
                                   Polarization tx_pol, Polarization rx_pol);

// Four columns in HH, HV, VH, VV order (TX pol first).
Eigen::MatrixXcd basis_matrix_polarimetric(const SoundingConfig& cfg,
                                           const StructuralParams& mu);

// y = gain * basis + noise, noise circular complex Gaussian with per-entry
// variance noise_std^2. Deterministic under the seed.
Eigen::VectorXcd synth_received_signal(const PathParameters& path, const SoundingConfig& cfg,
                                       double noise_std, std::uint64_t seed);
// Variant for paired comparisons: caller supplies the unit-variance noise.
Eigen::VectorXcd synth_received_signal(const PathParameters& path, const SoundingConfig& cfg,
                                       double noise_std, const Eigen::VectorXcd& unit_noise);

// Sequence file: line 1 "M dt", line 2 the permutation. Round-trips exactly.
SwitchingSequence load_sequence(const std::string& path);
void save_sequence(const SwitchingSequence& seq, const std::string& path);

}  // namespace ffseq
