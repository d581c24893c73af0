#include "ffseq/signal_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ffseq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}
}  // namespace

void validate_permutation(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  if (n == 0) throw invalid_permutation_error("empty permutation");
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (int v : perm) {
    if (v < 1 || v > n || seen[static_cast<size_t>(v - 1)])
      throw invalid_permutation_error("not a permutation of 1.." + std::to_string(n));
    seen[static_cast<size_t>(v - 1)] = true;
  }
}

Eigen::VectorXd eta_from_permutation(const std::vector<int>& perm, double dt) {
  validate_permutation(perm);
  if (!(dt > 0.0)) throw domain_error("dt must be positive");
  const int n = static_cast<int>(perm.size());
  Eigen::VectorXd eta(n);
  const double center = 1.0 + (n - 1) / 2.0;
  for (int k = 0; k < n; ++k) eta[k] = dt * (perm[static_cast<size_t>(k)] - center);
  return eta;
}

SwitchingSequence SwitchingSequence::from_permutation(std::vector<int> perm, double dt) {
  SwitchingSequence s;
  s.eta = eta_from_permutation(perm, dt);
  s.perm = std::move(perm);
  s.dt = dt;
  return s;
}

SwitchingSequence SwitchingSequence::trivial(int pair_count, double dt) {
  std::vector<int> perm(static_cast<size_t>(pair_count));
  for (int i = 0; i < pair_count; ++i) perm[static_cast<size_t>(i)] = i + 1;
  return from_permutation(std::move(perm), dt);
}

Eigen::VectorXd kron_sequence(const Eigen::VectorXd& eta_t, const Eigen::VectorXd& eta_r) {
  Eigen::VectorXd out(eta_t.size() * eta_r.size());
  for (Eigen::Index i = 0; i < eta_t.size(); ++i)
    out.segment(i * eta_r.size(), eta_r.size()) = eta_t[i] * eta_r;
  return out;
}

Eigen::VectorXd kron_sum_timing(const Eigen::VectorXd& eta_t, const Eigen::VectorXd& eta_r) {
  Eigen::VectorXd out(eta_t.size() * eta_r.size());
  for (Eigen::Index i = 0; i < eta_t.size(); ++i)
    out.segment(i * eta_r.size(), eta_r.size()) = eta_r.array() + eta_t[i];
  return out;
}

Eigen::VectorXcd doppler_phase_vector(double doppler_hz, const Eigen::VectorXd& eta_full) {
  return (Complex(0, 1) * kTwoPi * doppler_hz * eta_full.array()).exp().matrix();
}

Eigen::VectorXcd basis_vector_single_pol(const Eigen::VectorXcd& b_t,
                                         const Eigen::VectorXcd& b_r, double doppler_hz,
                                         const Eigen::VectorXd& eta) {
  if (b_t.size() * b_r.size() != eta.size())
    throw dimension_error("eta length must equal M_T * M_R");
  return kron(b_t, b_r).cwiseProduct(doppler_phase_vector(doppler_hz, eta));
}

Complex PathParameters::gain() const { return std::polar(amplitude, phase); }

StructuralParams StructuralParams::of(const PathParameters& p) {
  return {p.azimuth_tx, p.elevation_tx, p.azimuth_rx, p.elevation_rx, p.doppler_hz};
}

SoundingConfig::SoundingConfig(ArrayModel tx_model, ArrayModel rx_model, SwitchingSequence seq)
    : tx(std::move(tx_model)), rx(std::move(rx_model)), sequence(std::move(seq)) {
  if (sequence.size() != tx.elements() * rx.elements())
    throw dimension_error("sequence length must equal M_T * M_R");
}

int SoundingConfig::frequency_count() const {
  return frequency_basis.size() == 0 ? 1 : static_cast<int>(frequency_basis.size());
}

int SoundingConfig::signal_length() const {
  return snapshots * pair_count() * frequency_count();
}

Eigen::VectorXcd SoundingConfig::snapshot_vector() const {
  if (snapshot_basis.size() == 0) return Eigen::VectorXcd::Ones(snapshots);
  return snapshot_basis;
}

Eigen::VectorXcd SoundingConfig::frequency_vector() const {
  if (frequency_basis.size() == 0) return Eigen::VectorXcd::Ones(1);
  return frequency_basis;
}

Eigen::VectorXd SoundingConfig::full_timing() const {
  const int m = pair_count();
  Eigen::VectorXd full(snapshots * m);
  for (int t = 0; t < snapshots; ++t) {
    const double offset = snapshot_period * (t - (snapshots - 1) / 2.0);
    full.segment(t * m, m) = sequence.eta.array() + offset;
  }
  return full;
}

void SoundingConfig::validate() const {
  if (snapshots < 1) throw dimension_error("snapshot count must be >= 1");
  if (snapshot_basis.size() != 0 && snapshot_basis.size() != snapshots)
    throw dimension_error("snapshot basis length must equal the snapshot count");
  if (frequency_count() < 1) throw dimension_error("frequency count must be >= 1");
  if (sequence.size() != tx.elements() * rx.elements())
    throw dimension_error("sequence length must equal M_T * M_R");
}

Eigen::VectorXcd structural_vector(const SoundingConfig& cfg, const StructuralParams& mu,
                                   Polarization tx_pol, Polarization rx_pol) {
  cfg.validate();
  const Eigen::VectorXcd b_tx = cfg.tx.response(tx_pol, mu.azimuth_tx, mu.elevation_tx);
  const Eigen::VectorXcd b_rx = cfg.rx.response(rx_pol, mu.azimuth_rx, mu.elevation_rx);
  const Eigen::VectorXcd a = doppler_phase_vector(mu.doppler_hz, cfg.full_timing());
  const Eigen::VectorXcd spatial = kron(cfg.snapshot_vector(), kron(b_tx, b_rx));
  return kron(spatial.cwiseProduct(a), cfg.frequency_vector());
}

Eigen::MatrixXcd basis_matrix_polarimetric(const SoundingConfig& cfg,
                                           const StructuralParams& mu) {
  Eigen::MatrixXcd basis(cfg.signal_length(), 4);
  basis.col(0) = structural_vector(cfg, mu, Polarization::horizontal, Polarization::horizontal);
  basis.col(1) = structural_vector(cfg, mu, Polarization::horizontal, Polarization::vertical);
  basis.col(2) = structural_vector(cfg, mu, Polarization::vertical, Polarization::horizontal);
  basis.col(3) = structural_vector(cfg, mu, Polarization::vertical, Polarization::vertical);
  return basis;
}

Eigen::VectorXcd synth_received_signal(const PathParameters& path, const SoundingConfig& cfg,
                                       double noise_std, std::uint64_t seed) {
  if (noise_std < 0.0) throw domain_error("noise std must be nonnegative");
  RngStream rng(seed);
  Eigen::VectorXcd unit(cfg.signal_length());
  for (Eigen::Index k = 0; k < unit.size(); ++k) unit[k] = rng.circular_normal(1.0);
  return synth_received_signal(path, cfg, noise_std, unit);
}

Eigen::VectorXcd synth_received_signal(const PathParameters& path, const SoundingConfig& cfg,
                                       double noise_std, const Eigen::VectorXcd& unit_noise) {
  if (noise_std < 0.0) throw domain_error("noise std must be nonnegative");
  if (unit_noise.size() != cfg.signal_length())
    throw dimension_error("noise length must match the signal length");
  const Eigen::VectorXcd basis =
      structural_vector(cfg, StructuralParams::of(path), cfg.pol, cfg.pol);
  return path.gain() * basis + noise_std * unit_noise;
}

SwitchingSequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open sequence file: " + path);
  int m = 0;
  double dt = 0.0;
  if (!(in >> m >> dt)) throw format_error("bad sequence header in " + path);
  if (m < 1) throw format_error("bad sequence length in " + path);
  std::vector<int> perm(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    if (!(in >> perm[static_cast<size_t>(i)]))
      throw format_error("sequence file truncated: " + path);
  return SwitchingSequence::from_permutation(std::move(perm), dt);
}

void save_sequence(const SwitchingSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write sequence file: " + path);
  out.precision(17);
  out << seq.size() << ' ' << seq.dt << '\n';
  for (int i = 0; i < seq.size(); ++i) out << seq.perm[static_cast<size_t>(i)] << (i + 1 < seq.size() ? ' ' : '\n');
}

}  // namespace ffseq
