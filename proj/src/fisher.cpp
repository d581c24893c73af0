#include "ffseq/fisher.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace ffseq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

// w = (b_t kron x kron y) kron b_f for the active polarization slot
Eigen::VectorXcd assemble(const SoundingConfig& cfg, const Eigen::VectorXcd& tx_part,
                          const Eigen::VectorXcd& rx_part) {
  return kron(kron(cfg.snapshot_vector(), kron(tx_part, rx_part)), cfg.frequency_vector());
}

// sequence timing tiled over snapshots and frequency points, matching the
// layout of the assembled signal vector
Eigen::VectorXd extended_timing(const SoundingConfig& cfg) {
  const Eigen::VectorXd full = cfg.full_timing();
  const int mf = cfg.frequency_count();
  Eigen::VectorXd ext(full.size() * mf);
  for (Eigen::Index k = 0; k < full.size(); ++k) ext.segment(k * mf, mf).setConstant(full[k]);
  return ext;
}

double golden_section_max(double lo, double hi, int iters, const std::function<double(double)>& f) {
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
  const double x = 0.5 * (a + b);
  return std::max(f(x), std::max(fc, fd));
}

}  // namespace

const std::array<std::string, kPathParamCount>& path_param_labels() {
  static const std::array<std::string, kPathParamCount> labels = {
      "elevation_tx", "azimuth_tx", "elevation_rx", "azimuth_rx",
      "doppler",      "amplitude",  "phase"};
  return labels;
}

Eigen::MatrixXcd jacobian(const PathParameters& path, const SoundingConfig& cfg) {
  cfg.validate();
  if (!(path.amplitude > 0.0))
    throw degenerate_amplitude_error("amplitude must be positive for the Jacobian");

  const Polarization pol = cfg.pol;
  const Eigen::VectorXcd b_tx = cfg.tx.response(pol, path.azimuth_tx, path.elevation_tx);
  const Eigen::VectorXcd b_rx = cfg.rx.response(pol, path.azimuth_rx, path.elevation_rx);
  const auto [d_tx_az, d_tx_el] =
      cfg.tx.response_derivatives(pol, path.azimuth_tx, path.elevation_tx);
  const auto [d_rx_az, d_rx_el] =
      cfg.rx.response_derivatives(pol, path.azimuth_rx, path.elevation_rx);

  const Eigen::VectorXd eta_ext = extended_timing(cfg);
  const Eigen::VectorXcd phase =
      (kImag * kTwoPi * path.doppler_hz * extended_timing(cfg).array()).exp().matrix();
  const Complex gain = path.gain();

  auto column = [&](const Eigen::VectorXcd& tx_part, const Eigen::VectorXcd& rx_part) {
    return (gain * assemble(cfg, tx_part, rx_part).cwiseProduct(phase)).eval();
  };

  const Eigen::VectorXcd s = column(b_tx, b_rx);
  Eigen::MatrixXcd d(cfg.signal_length(), kPathParamCount);
  d.col(static_cast<int>(PathParam::elevation_tx)) = column(d_tx_el, b_rx);
  d.col(static_cast<int>(PathParam::azimuth_tx)) = column(d_tx_az, b_rx);
  d.col(static_cast<int>(PathParam::elevation_rx)) = column(b_tx, d_rx_el);
  d.col(static_cast<int>(PathParam::azimuth_rx)) = column(b_tx, d_rx_az);
  d.col(static_cast<int>(PathParam::doppler)) =
      s.cwiseProduct((kImag * kTwoPi * eta_ext.array()).matrix().eval());
  d.col(static_cast<int>(PathParam::amplitude)) = s / path.amplitude;
  d.col(static_cast<int>(PathParam::phase)) = kImag * s;
  return d;
}

FisherMatrix fim(const PathParameters& path, const SoundingConfig& cfg, double noise_std) {
  if (!(noise_std > 0.0)) throw domain_error("noise std must be positive");
  const Eigen::MatrixXcd d = jacobian(path, cfg);
  const Eigen::MatrixXd raw = (2.0 / (noise_std * noise_std)) * (d.adjoint() * d).real();
  FisherMatrix f;
  f.values = 0.5 * (raw + raw.transpose());
  return f;
}

double fim_cross_doppler_angle(const PathParameters& path, const SoundingConfig& cfg,
                               PathParam which, double noise_std) {
  if (!(noise_std > 0.0)) throw domain_error("noise std must be positive");
  cfg.validate();
  const Polarization pol = cfg.pol;
  const Eigen::VectorXcd b_tx = cfg.tx.response(pol, path.azimuth_tx, path.elevation_tx);
  const Eigen::VectorXcd b_rx = cfg.rx.response(pol, path.azimuth_rx, path.elevation_rx);
  const auto [d_tx_az, d_tx_el] =
      cfg.tx.response_derivatives(pol, path.azimuth_tx, path.elevation_tx);
  const auto [d_rx_az, d_rx_el] =
      cfg.rx.response_derivatives(pol, path.azimuth_rx, path.elevation_rx);

  Eigen::VectorXcd w_angle;
  switch (which) {
    case PathParam::azimuth_tx:
      w_angle = assemble(cfg, d_tx_az, b_rx);
      break;
    case PathParam::elevation_tx:
      w_angle = assemble(cfg, d_tx_el, b_rx);
      break;
    case PathParam::azimuth_rx:
      w_angle = assemble(cfg, b_tx, d_rx_az);
      break;
    case PathParam::elevation_rx:
      w_angle = assemble(cfg, b_tx, d_rx_el);
      break;
    default:
      throw domain_error("cross entry is defined for the four angle parameters");
  }
  const Eigen::VectorXcd w = assemble(cfg, b_tx, b_rx);
  const Eigen::VectorXd eta_ext = extended_timing(cfg);
  const double r = path.amplitude;
  const Complex acc = (w.conjugate().array() * eta_ext.array() * w_angle.array()).sum();
  return 4.0 * std::numbers::pi * r * r / (noise_std * noise_std) * acc.imag();
}

double fim_doppler_diagonal(const PathParameters& path, const SoundingConfig& cfg,
                            double noise_std) {
  if (!(noise_std > 0.0)) throw domain_error("noise std must be positive");
  cfg.validate();
  const Eigen::VectorXcd w =
      assemble(cfg, cfg.tx.response(cfg.pol, path.azimuth_tx, path.elevation_tx),
               cfg.rx.response(cfg.pol, path.azimuth_rx, path.elevation_rx));
  const Eigen::VectorXd eta_ext = extended_timing(cfg);
  const double weighted = (w.array().abs2() * eta_ext.array().square()).sum();
  const double r = path.amplitude;
  return 8.0 * std::numbers::pi * std::numbers::pi * r * r / (noise_std * noise_std) * weighted;
}

namespace {
Eigen::VectorXd inverse_diagonal(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw singular_fim_error("eigendecomposition failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12)
    throw singular_fim_error("Fisher matrix is singular or ill-conditioned");
  Eigen::VectorXd diag(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double u = es.eigenvectors()(i, j);
      acc += u * u / lambda[j];
    }
    diag[i] = acc;
  }
  return diag;
}
}  // namespace

Eigen::VectorXd crlb(const Eigen::MatrixXd& fisher_values) {
  return inverse_diagonal(fisher_values);
}

Eigen::VectorXd crlb(const FisherMatrix& f) { return inverse_diagonal(f.values); }

Eigen::VectorXd crlb(const FisherMatrix& f, const std::vector<PathParam>& active) {
  const int n = static_cast<int>(active.size());
  if (n == 0) throw domain_error("empty parameter subset");
  Eigen::MatrixXd sub(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sub(i, j) = f.values(static_cast<int>(active[static_cast<size_t>(i)]),
                           static_cast<int>(active[static_cast<size_t>(j)]));
  return inverse_diagonal(sub);
}

void FisherCostConfig::validate() const {
  const bool tx_active = doppler_azimuth_tx || doppler_elevation_tx;
  const bool rx_active = doppler_azimuth_rx || doppler_elevation_rx;
  if (!tx_active && !rx_active) throw domain_error("no active cost terms");
  if (azimuth_count < 2) throw dimension_error("azimuth grid needs at least 2 points");
  if (elevation_count < 1) throw dimension_error("elevation grid needs at least 1 point");
}

FisherCostEvaluator::FisherCostEvaluator(const ArrayModel& tx, const ArrayModel& rx,
                                         FisherCostConfig cfg)
    : cfg_(cfg), tx_(tx), rx_(rx), tx_elements_(tx.elements()), rx_elements_(rx.elements()) {
  cfg_.validate();
  auto build = [&](const ArrayModel& model) {
    SideTables t;
    const int n_az = cfg_.azimuth_count;
    // elevation axis is irrelevant for ULAs and azimuth-only patterns
    bool flat_elevation = model.kind() == ArrayModel::Kind::isotropic_ula;
    if (!flat_elevation) {
      flat_elevation = true;
      for (Polarization p : {Polarization::horizontal, Polarization::vertical})
        if (model.has_polarization(p) && model.eadf(p).a_theta() > 1) flat_elevation = false;
    }
    const int n_el = flat_elevation ? 1 : cfg_.elevation_count;
    t.response.resize(model.elements(), n_az * n_el);
    t.d_azimuth.resize(model.elements(), n_az * n_el);
    t.d_elevation.resize(model.elements(), n_az * n_el);
    t.azimuths.resize(static_cast<size_t>(n_az * n_el));
    t.elevations.resize(static_cast<size_t>(n_az * n_el));
    int col = 0;
    for (int i = 0; i < n_az; ++i) {
      const double az = kTwoPi * i / n_az;
      for (int j = 0; j < n_el; ++j, ++col) {
        const double el = n_el == 1 ? 0.0 : std::numbers::pi * j / (n_el - 1);
        t.response.col(col) = model.response(cfg_.pol, az, el);
        const auto [daz, del] = model.response_derivatives(cfg_.pol, az, el);
        t.d_azimuth.col(col) = daz;
        t.d_elevation.col(col) = del;
        t.azimuths[static_cast<size_t>(col)] = az;
        t.elevations[static_cast<size_t>(col)] = el;
      }
    }
    return t;
  };
  tx_tables_ = build(tx_);
  rx_tables_ = build(rx_);
}

double FisherCostEvaluator::side_cost(const SideTables& t, const ArrayModel& model,
                                      const Eigen::VectorXd& eta_side, bool use_azimuth,
                                      bool use_elevation) const {
  if (!use_azimuth && !use_elevation) return 0.0;
  if (eta_side.size() != t.response.rows())
    throw dimension_error("per-side eta length must equal the element count");

  const Eigen::VectorXcd weighted_eta = eta_side.cast<Complex>();
  auto term_at = [&](const Eigen::VectorXcd& b, const Eigen::VectorXcd& d) {
    const Complex acc = (b.conjugate().array() * weighted_eta.array() * d.array()).sum();
    return 4.0 * std::numbers::pi * std::abs(acc.imag());
  };

  double max_az = 0.0, max_el = 0.0;
  int best_az_col = 0, best_el_col = 0;
  for (int col = 0; col < t.response.cols(); ++col) {
    if (use_azimuth) {
      const double v = term_at(t.response.col(col), t.d_azimuth.col(col));
      if (v > max_az) {
        max_az = v;
        best_az_col = col;
      }
    }
    if (use_elevation) {
      const double v = term_at(t.response.col(col), t.d_elevation.col(col));
      if (v > max_el) {
        max_el = v;
        best_el_col = col;
      }
    }
  }

  if (cfg_.refine) {
    const double az_step = kTwoPi / cfg_.azimuth_count;
    auto refine_around = [&](int col, bool az_term, double current) {
      const double el = t.elevations[static_cast<size_t>(col)];
      const double az0 = t.azimuths[static_cast<size_t>(col)];
      const double refined = golden_section_max(
          az0 - az_step, az0 + az_step, cfg_.refine_iters, [&](double az) {
            const Eigen::VectorXcd b = model.response(cfg_.pol, az, el);
            const auto [daz, del] = model.response_derivatives(cfg_.pol, az, el);
            return term_at(b, az_term ? daz : del);
          });
      return std::max(current, refined);
    };
    if (use_azimuth) max_az = refine_around(best_az_col, true, max_az);
    if (use_elevation) max_el = refine_around(best_el_col, false, max_el);
  }

  return (use_azimuth ? max_az : 0.0) + (use_elevation ? max_el : 0.0);
}

double FisherCostEvaluator::joint_cost(const Eigen::VectorXd& eta) const {
  if (eta.size() != static_cast<Eigen::Index>(tx_elements_) * rx_elements_)
    throw dimension_error("eta length must equal M_T * M_R");
  double total = 0.0;
  if (cfg_.doppler_azimuth_tx || cfg_.doppler_elevation_tx) {
    Eigen::VectorXd row_sums(tx_elements_);
    for (int i = 0; i < tx_elements_; ++i)
      row_sums[i] = eta.segment(static_cast<Eigen::Index>(i) * rx_elements_, rx_elements_).sum();
    total += side_cost(tx_tables_, tx_, row_sums, cfg_.doppler_azimuth_tx,
                       cfg_.doppler_elevation_tx);
  }
  if (cfg_.doppler_azimuth_rx || cfg_.doppler_elevation_rx) {
    Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(rx_elements_);
    for (int i = 0; i < tx_elements_; ++i)
      col_sums += eta.segment(static_cast<Eigen::Index>(i) * rx_elements_, rx_elements_);
    total += side_cost(rx_tables_, rx_, col_sums, cfg_.doppler_azimuth_rx,
                       cfg_.doppler_elevation_rx);
  }
  return total;
}

double FisherCostEvaluator::tx_cost(const Eigen::VectorXd& eta_t) const {
  return side_cost(tx_tables_, tx_, eta_t, cfg_.doppler_azimuth_tx, cfg_.doppler_elevation_tx);
}

double FisherCostEvaluator::rx_cost(const Eigen::VectorXd& eta_r) const {
  return side_cost(rx_tables_, rx_, eta_r, cfg_.doppler_azimuth_rx, cfg_.doppler_elevation_rx);
}

double fisher_cost(const Eigen::VectorXd& eta, const ArrayModel& tx, const ArrayModel& rx,
                   const FisherCostConfig& cfg) {
  return FisherCostEvaluator(tx, rx, cfg).joint_cost(eta);
}

double fisher_cost_isotropic_ula(const Eigen::VectorXd& eta, const Eigen::VectorXd& m) {
  if (eta.size() != m.size()) throw dimension_error("eta and index vector lengths differ");
  return std::abs(eta.dot(m));
}

ArrayModel composite_pattern(const std::vector<ArrayModel>& per_frequency) {
  if (per_frequency.empty()) throw dimension_error("empty pattern set");
  if (per_frequency.size() == 1) return per_frequency.front();

  const ArrayModel& first = per_frequency.front();
  if (first.kind() == ArrayModel::Kind::isotropic_ula) {
    for (const ArrayModel& model : per_frequency) {
      if (model.kind() != ArrayModel::Kind::isotropic_ula ||
          model.elements() != first.elements() ||
          model.spacing_over_lambda() != first.spacing_over_lambda() ||
          model.native_polarization() != first.native_polarization())
        throw domain_error("composite of ULA models requires identical ULAs");
    }
    return first;  // frequency-flat by construction
  }

  const int m_f = static_cast<int>(per_frequency.size());
  std::optional<Eadf> composite_h, composite_v;
  for (Polarization pol : {Polarization::horizontal, Polarization::vertical}) {
    if (!first.has_polarization(pol)) continue;
    const int n_phi = first.eadf(pol).a_phi();
    const int n_theta = first.eadf(pol).a_theta();
    if (n_phi % 2 == 0 || n_theta % 2 == 0)
      throw domain_error("composite patterns need odd coefficient counts");
    for (const ArrayModel& model : per_frequency) {
      if (model.kind() != ArrayModel::Kind::measured || !model.has_polarization(pol) ||
          model.eadf(pol).a_phi() != n_phi || model.eadf(pol).a_theta() != n_theta ||
          model.elements() != first.elements())
        throw dimension_error("per-frequency patterns must share layout and polarizations");
    }
    Eigen::VectorXd az_grid(n_phi), el_grid(n_theta);
    for (int u = 0; u < n_phi; ++u) az_grid[u] = kTwoPi * u / n_phi;
    for (int v = 0; v < n_theta; ++v) el_grid[v] = kTwoPi * v / n_theta;

    Eigen::MatrixXcd samples(first.elements(), n_phi * n_theta);
    Eigen::VectorXcd freq_response(m_f), delay(m_f);
    for (int e = 0; e < first.elements(); ++e) {
      int col = 0;
      for (int u = 0; u < n_phi; ++u) {
        for (int v = 0; v < n_theta; ++v, ++col) {
          for (int f = 0; f < m_f; ++f)
            freq_response[f] = per_frequency[static_cast<size_t>(f)]
                                   .response(pol, az_grid[u], el_grid[v])[e];
          // normalized inverse DFT into the delay domain
          for (int dbin = 0; dbin < m_f; ++dbin) {
            Complex acc = 0.0;
            for (int f = 0; f < m_f; ++f)
              acc += freq_response[f] *
                     std::exp(kImag * (kTwoPi * f * dbin / static_cast<double>(m_f)));
            delay[dbin] = acc / static_cast<double>(m_f);
          }
          int peak = 0;
          for (int dbin = 1; dbin < m_f; ++dbin)
            if (std::abs(delay[dbin]) > std::abs(delay[peak])) peak = dbin;
          samples(e, col) = delay[peak];
        }
      }
    }
    Eadf fitted = eadf_from_sampled_pattern(samples, az_grid, el_grid, pol);
    if (pol == Polarization::horizontal)
      composite_h = std::move(fitted);
    else
      composite_v = std::move(fitted);
  }
  return ArrayModel::measured(std::move(composite_h), std::move(composite_v));
}

double wideband_fisher_cost(const Eigen::VectorXd& eta,
                            const std::vector<ArrayModel>& tx_per_frequency,
                            const std::vector<ArrayModel>& rx_per_frequency,
                            const FisherCostConfig& cfg, WidebandMode mode) {
  if (tx_per_frequency.empty() || rx_per_frequency.empty())
    throw dimension_error("empty pattern set");
  const size_t m_f = std::max(tx_per_frequency.size(), rx_per_frequency.size());
  auto tx_at = [&](size_t f) -> const ArrayModel& {
    return tx_per_frequency.size() == 1 ? tx_per_frequency.front() : tx_per_frequency[f];
  };
  auto rx_at = [&](size_t f) -> const ArrayModel& {
    return rx_per_frequency.size() == 1 ? rx_per_frequency.front() : rx_per_frequency[f];
  };
  if (tx_per_frequency.size() != 1 && rx_per_frequency.size() != 1 &&
      tx_per_frequency.size() != rx_per_frequency.size())
    throw dimension_error("TX and RX pattern sets must have matching lengths");

  if (mode == WidebandMode::sum) {
    double total = 0.0;
    for (size_t f = 0; f < m_f; ++f)
      total += FisherCostEvaluator(tx_at(f), rx_at(f), cfg).joint_cost(eta);
    return total;
  }

  std::vector<ArrayModel> tx_list, rx_list;
  for (size_t f = 0; f < m_f; ++f) {
    tx_list.push_back(tx_at(f));
    rx_list.push_back(rx_at(f));
  }
  return FisherCostEvaluator(composite_pattern(tx_list), composite_pattern(rx_list), cfg)
      .joint_cost(eta);
}

}  // namespace ffseq
