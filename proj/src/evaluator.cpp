#include "ffseq/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace ffseq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};

// maximize a 1-D function by golden section, returning the argmax
double golden_section_argmax(double lo, double hi, int iters,
                             const std::function<double(double)>& f) {
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

void EstimatorGrid::validate(const SwitchingSequence& seq) const {
  if (azimuth_count < 2 || doppler_count < 2)
    throw dimension_error("estimator grids need at least 2 points per dimension");
  if (!(azimuth_hi > azimuth_lo)) throw domain_error("empty azimuth search range");
  const auto [lo, hi] = doppler_range(seq);
  const double bound = 1.0 / (2.0 * seq.dt);
  if (!(hi > lo)) throw domain_error("empty doppler search range");
  if (lo < -bound - 1e-12 || hi > bound + 1e-12)
    throw domain_error("doppler search range exceeds the non-ambiguous bound");
  if (refine_iters < 0) throw domain_error("refinement iterations must be nonnegative");
}

std::pair<double, double> EstimatorGrid::doppler_range(const SwitchingSequence& seq) const {
  if (doppler_lo == doppler_hi) {
    const double bound = 1.0 / (2.0 * seq.dt);
    return {-bound, bound};
  }
  return {doppler_lo, doppler_hi};
}

Estimate mle_estimate(const Eigen::VectorXcd& y, const SoundingConfig& cfg,
                      const PathParameters& known, const EstimatorGrid& grid) {
  cfg.validate();
  grid.validate(cfg.sequence);
  if (y.size() != cfg.signal_length())
    throw dimension_error("signal length does not match the sounding configuration");
  if (!(y.norm() > 0.0)) throw undefined_estimate_error("all-zero signal");

  const Eigen::VectorXd eta_full = cfg.full_timing();
  const int mf = cfg.frequency_count();
  Eigen::VectorXd eta_ext(eta_full.size() * mf);
  for (Eigen::Index k = 0; k < eta_full.size(); ++k)
    eta_ext.segment(k * mf, mf).setConstant(eta_full[k]);

  StructuralParams mu = StructuralParams::of(known);
  auto spatial_at = [&](double azimuth) {
    StructuralParams p = mu;
    p.azimuth_tx = azimuth;
    p.doppler_hz = 0.0;
    return structural_vector(cfg, p, cfg.pol, cfg.pol);
  };

  // likelihood of (azimuth, doppler) given the spatial vector u:
  // |u^H (conj(a) had y)|^2 / ||u||^2
  auto likelihood = [&](const Eigen::VectorXcd& u, double u_sq, double doppler) {
    const Eigen::VectorXcd rotated =
        ((-kImag * kTwoPi * doppler * eta_ext.array()).exp() * y.array()).matrix();
    const Complex z = u.dot(rotated);
    return std::norm(z) / u_sq;
  };

  const auto [nu_lo, nu_hi] = grid.doppler_range(cfg.sequence);
  Eigen::VectorXd azimuths(grid.azimuth_count);
  for (int i = 0; i < grid.azimuth_count; ++i)
    azimuths[i] = grid.azimuth_lo +
                  i * (grid.azimuth_hi - grid.azimuth_lo) / (grid.azimuth_count - 1);
  Eigen::VectorXd dopplers(grid.doppler_count);
  for (int k = 0; k < grid.doppler_count; ++k)
    dopplers[k] = nu_lo + k * (nu_hi - nu_lo) / (grid.doppler_count - 1);

  // grid stage as one dense product: Z = U^H * (conj(A) had y)
  Eigen::MatrixXcd u_table(y.size(), grid.azimuth_count);
  Eigen::VectorXd u_sq(grid.azimuth_count);
  for (int i = 0; i < grid.azimuth_count; ++i) {
    u_table.col(i) = spatial_at(azimuths[i]);
    u_sq[i] = u_table.col(i).squaredNorm();
    if (!(u_sq[i] > 0.0)) u_sq[i] = std::numeric_limits<double>::infinity();
  }
  Eigen::MatrixXcd rotated(y.size(), grid.doppler_count);
  for (int k = 0; k < grid.doppler_count; ++k)
    rotated.col(k) = ((-kImag * kTwoPi * dopplers[k] * eta_ext.array()).exp() * y.array()).matrix();
  const Eigen::MatrixXcd z = u_table.adjoint() * rotated;

  int best_i = 0, best_k = 0;
  double best = -1.0;
  for (int i = 0; i < grid.azimuth_count; ++i) {
    for (int k = 0; k < grid.doppler_count; ++k) {
      const double value = std::norm(z(i, k)) / u_sq[i];
      if (value > best) {
        best = value;
        best_i = i;
        best_k = k;
      }
    }
  }

  double az = azimuths[best_i];
  double nu = dopplers[best_k];
  const double az_step = (grid.azimuth_hi - grid.azimuth_lo) / (grid.azimuth_count - 1);
  const double nu_step = (nu_hi - nu_lo) / (grid.doppler_count - 1);

  if (grid.refine_iters > 0) {
    for (int pass = 0; pass < 3; ++pass) {
      az = golden_section_argmax(
          std::max(grid.azimuth_lo, az - az_step), std::min(grid.azimuth_hi, az + az_step),
          grid.refine_iters, [&](double a) {
            const Eigen::VectorXcd u = spatial_at(a);
            const double sq = u.squaredNorm();
            return sq > 0.0 ? likelihood(u, sq, nu) : 0.0;
          });
      const Eigen::VectorXcd u = spatial_at(az);
      const double sq = u.squaredNorm();
      nu = golden_section_argmax(std::max(nu_lo, nu - nu_step), std::min(nu_hi, nu + nu_step),
                                 grid.refine_iters,
                                 [&](double d) { return likelihood(u, sq, d); });
    }
  }

  Estimate est;
  est.azimuth = az;
  est.doppler = nu;
  StructuralParams p = mu;
  p.azimuth_tx = az;
  p.doppler_hz = nu;
  const Eigen::VectorXcd b = structural_vector(cfg, p, cfg.pol, cfg.pol);
  const double b_sq = b.squaredNorm();
  est.gain = b_sq > 0.0 ? b.dot(y) / b_sq : Complex(0.0, 0.0);
  return est;
}

void MonteCarloConfig::validate() const {
  if (trials < 1) throw domain_error("trial count must be >= 1");
  if (snr_db.empty()) throw domain_error("empty SNR sweep");
}

double noise_std_for_snr(const PathParameters& truth, const SoundingConfig& cfg, double snr_db) {
  const Eigen::VectorXcd basis =
      structural_vector(cfg, StructuralParams::of(truth), cfg.pol, cfg.pol);
  const double mean_power = basis.squaredNorm() / static_cast<double>(basis.size());
  const double snr = std::pow(10.0, snr_db / 10.0);
  return truth.amplitude * std::sqrt(mean_power / snr);
}

std::pair<double, double> crlb_reference(const SoundingConfig& cfg, const PathParameters& truth,
                                         double snr_db) {
  const double sigma = noise_std_for_snr(truth, cfg, snr_db);
  const FisherMatrix f = fim(truth, cfg, sigma);
  const std::vector<PathParam> active{PathParam::azimuth_tx, PathParam::doppler,
                                      PathParam::amplitude, PathParam::phase};
  const Eigen::VectorXd bounds = crlb(f, active);
  return {bounds[0], bounds[1]};
}

MonteCarloReport run_monte_carlo(
    const SoundingConfig& base,
    const std::vector<std::pair<std::string, SwitchingSequence>>& sequences,
    const PathParameters& truth, const MonteCarloConfig& cfg) {
  cfg.validate();
  if (sequences.empty()) throw domain_error("no sequences to evaluate");

  MonteCarloReport report;
  report.snr_db = cfg.snr_db;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  report.truth = truth;

  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const double truth_az_deg = truth.azimuth_tx * kDegPerRad;

  struct SeqContext {
    SoundingConfig cfg;
    std::vector<double> sigma;  // per SNR
  };
  std::vector<SeqContext> contexts;
  for (const auto& [name, seq] : sequences) {
    SoundingConfig scfg = base;
    scfg.sequence = seq;
    scfg.validate();
    SeqContext ctx{scfg, {}};
    for (double snr : cfg.snr_db) ctx.sigma.push_back(noise_std_for_snr(truth, scfg, snr));
    contexts.push_back(std::move(ctx));

    SequenceResult result;
    result.name = name;
    result.sequence = seq;
    result.azimuth_rmse_deg.resize(n_snr);
    result.azimuth_logmse.resize(n_snr);
    result.doppler_rmse_hz.resize(n_snr);
    result.doppler_logmse.resize(n_snr);
    result.crlb_azimuth_deg2.resize(n_snr);
    result.crlb_doppler_hz2.resize(n_snr);
    result.azimuth_estimates_deg.resize(cfg.trials, n_snr);
    result.doppler_estimates_hz.resize(cfg.trials, n_snr);
    for (int s = 0; s < n_snr; ++s) {
      const auto [az_var, nu_var] = crlb_reference(scfg, truth, cfg.snr_db[s]);
      result.crlb_azimuth_deg2[s] = az_var * kDegPerRad * kDegPerRad;
      result.crlb_doppler_hz2[s] = nu_var;
    }
    report.sequences.push_back(std::move(result));
  }

  const int signal_length = base.signal_length();
  Eigen::VectorXcd unit_noise(signal_length);
  for (int s = 0; s < n_snr; ++s) {
    for (int t = 0; t < cfg.trials; ++t) {
      RngStream rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(t)));
      for (int k = 0; k < signal_length; ++k) unit_noise[k] = rng.circular_normal(1.0);
      for (size_t q = 0; q < contexts.size(); ++q) {
        const Eigen::VectorXcd y =
            synth_received_signal(truth, contexts[q].cfg, contexts[q].sigma[static_cast<size_t>(s)],
                                  unit_noise);
        const Estimate est = mle_estimate(y, contexts[q].cfg, truth, cfg.grid);
        report.sequences[q].azimuth_estimates_deg(t, s) = est.azimuth * kDegPerRad;
        report.sequences[q].doppler_estimates_hz(t, s) = est.doppler;
      }
    }
  }

  for (auto& result : report.sequences) {
    for (int s = 0; s < n_snr; ++s) {
      double az_sq = 0.0, nu_sq = 0.0;
      for (int t = 0; t < cfg.trials; ++t) {
        const double az_err = wrap_degrees(result.azimuth_estimates_deg(t, s) - truth_az_deg);
        const double nu_err = result.doppler_estimates_hz(t, s) - truth.doppler_hz;
        az_sq += az_err * az_err;
        nu_sq += nu_err * nu_err;
      }
      const double az_mse = az_sq / cfg.trials;
      const double nu_mse = nu_sq / cfg.trials;
      result.azimuth_rmse_deg[s] = std::sqrt(az_mse);
      result.azimuth_logmse[s] = std::log10(az_mse);
      result.doppler_rmse_hz[s] = std::sqrt(nu_mse);
      result.doppler_logmse[s] = std::log10(nu_mse);
    }
  }
  return report;
}

CdfTable estimate_cdf(const MonteCarloReport& report, size_t sequence_index, double snr_db) {
  if (sequence_index >= report.sequences.size()) throw domain_error("sequence index out of range");
  int snr_col = -1;
  for (size_t s = 0; s < report.snr_db.size(); ++s)
    if (std::abs(report.snr_db[s] - snr_db) < 1e-9) snr_col = static_cast<int>(s);
  if (snr_col < 0) throw domain_error("requested SNR is not part of the report");

  const Eigen::MatrixXd& est = report.sequences[sequence_index].azimuth_estimates_deg;
  std::vector<double> values(static_cast<size_t>(est.rows()));
  for (Eigen::Index t = 0; t < est.rows(); ++t)
    values[static_cast<size_t>(t)] = est(t, snr_col);
  std::sort(values.begin(), values.end());

  CdfTable table;
  table.azimuth_deg.resize(static_cast<Eigen::Index>(values.size()));
  table.cumulative.resize(static_cast<Eigen::Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) {
    table.azimuth_deg[static_cast<Eigen::Index>(i)] = values[i];
    table.cumulative[static_cast<Eigen::Index>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(values.size());
  }
  return table;
}

}  // namespace ffseq
