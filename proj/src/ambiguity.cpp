#include "ffseq/ambiguity.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace ffseq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};
constexpr double kRankTolerance = 1e-10;

Polarization effective_pol(const ArrayModel& model, Polarization preferred) {
  if (model.kind() == ArrayModel::Kind::isotropic_ula) return model.native_polarization();
  const bool has_h = model.has_polarization(Polarization::horizontal);
  const bool has_v = model.has_polarization(Polarization::vertical);
  if (has_h && has_v) return preferred;
  return has_h ? Polarization::horizontal : Polarization::vertical;
}

int effective_pol_count(const ArrayModel& model) {
  if (model.kind() == ArrayModel::Kind::isotropic_ula) return 1;
  return (model.has_polarization(Polarization::horizontal) ? 1 : 0) +
         (model.has_polarization(Polarization::vertical) ? 1 : 0);
}

bool passes_xpr_coarse(const ArrayModel& model, double threshold_db = 30.0) {
  const int n_az = 36;
  Eigen::VectorXd az(n_az);
  for (int i = 0; i < n_az; ++i) az[i] = kTwoPi * i / n_az;
  bool needs_elevation = false;
  for (Polarization p : {Polarization::horizontal, Polarization::vertical})
    if (model.kind() == ArrayModel::Kind::measured && model.has_polarization(p) &&
        model.eadf(p).a_theta() > 1)
      needs_elevation = true;
  Eigen::VectorXd el;
  if (needs_elevation) {
    el.resize(9);
    for (int i = 0; i < 9; ++i) el[i] = std::numbers::pi * i / 8.0;
  } else {
    el = Eigen::VectorXd::Zero(1);
  }
  return high_xpr_check(model, az, el, threshold_db);
}

// extended timing matching the layout of structural vectors
Eigen::VectorXd layout_timing(const SoundingConfig& cfg) {
  const Eigen::VectorXd full = cfg.full_timing();
  const int mf = cfg.frequency_count();
  Eigen::VectorXd ext(full.size() * mf);
  for (Eigen::Index k = 0; k < full.size(); ++k) ext.segment(k * mf, mf).setConstant(full[k]);
  return ext;
}

struct AxisSpec {
  int count;
  double lo;
  double hi;
};

}  // namespace

void AmbiguityGrid::validate() const {
  if (azimuth_tx_count < 1 || elevation_tx_count < 1 || azimuth_rx_count < 1 ||
      elevation_rx_count < 1 || doppler_count < 1)
    throw dimension_error("ambiguity grid counts must be >= 1");
  if (exponent < 1.0) throw domain_error("ambiguity exponent must be >= 1");
  if (doppler_bound < 0.0) throw domain_error("doppler bound must be nonnegative");
}

double AmbiguityGrid::resolved_doppler_bound(const SwitchingSequence& seq) const {
  const double bound = doppler_bound > 0.0 ? doppler_bound : 1.0 / (2.0 * seq.dt);
  if (!(bound > 0.0)) throw domain_error("doppler bound must be positive");
  return bound;
}

Complex ambiguity_single_pol(const StructuralParams& mu, const StructuralParams& mu_test,
                             const SoundingConfig& cfg) {
  const Polarization tx_pol = effective_pol(cfg.tx, cfg.pol);
  const Polarization rx_pol = effective_pol(cfg.rx, cfg.pol);
  const Eigen::VectorXcd a = structural_vector(cfg, mu, tx_pol, rx_pol);
  const Eigen::VectorXcd b = structural_vector(cfg, mu_test, tx_pol, rx_pol);
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    throw degenerate_direction_error("basis vector vanishes at the requested direction");
  return a.dot(b) / (na * nb);  // Eigen dot conjugates the first argument
}

SubspaceSimilarity subspace_similarity(const Eigen::MatrixXcd& basis_a,
                                       const Eigen::MatrixXcd& basis_b) {
  if (basis_a.rows() != basis_b.rows() || basis_a.cols() != 4 || basis_b.cols() != 4)
    throw dimension_error("basis matrices must share row count and have 4 columns");
  if (basis_a.rows() < 4) throw dimension_error("basis matrices need at least 4 rows");
  const Eigen::Index m = basis_a.rows();

  auto orthonormal_full = [&](const Eigen::MatrixXcd& basis) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
    const Eigen::VectorXcd diag = qr.matrixQR().diagonal();
    double max_diag = 0.0;
    for (int i = 0; i < 4; ++i) max_diag = std::max(max_diag, std::abs(diag[i]));
    for (int i = 0; i < 4; ++i)
      if (std::abs(diag[i]) <= kRankTolerance * max_diag)
        throw rank_deficient_error("basis matrix is rank deficient");
    return (qr.householderQ() * Eigen::MatrixXcd::Identity(m, m)).eval();
  };

  const Eigen::MatrixXcd q_a = orthonormal_full(basis_a);
  const Eigen::MatrixXcd q_b = orthonormal_full(basis_b);
  const Eigen::MatrixXcd cross = q_a.adjoint() * q_b;
  const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(cross.topLeftCorner<4, 4>());

  SubspaceSimilarity out;
  out.singular_values = svd.singularValues();
  double sum = 0.0, sum_sq = 0.0, sum_angles = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double s = std::min(1.0, std::max(0.0, out.singular_values[i]));
    sum += s;
    sum_sq += s * s;
    const double angle = std::acos(s);
    sum_angles += angle * angle;
  }
  out.s1 = sum / 4.0;
  out.s2 = std::sqrt(sum_sq) / 4.0;
  out.d2 = std::sqrt(sum_angles) / 4.0;
  return out;
}

SubspaceSimilarity ambiguity_polarimetric_detail(const StructuralParams& mu,
                                                 const StructuralParams& mu_test,
                                                 const SoundingConfig& cfg) {
  return subspace_similarity(basis_matrix_polarimetric(cfg, mu),
                             basis_matrix_polarimetric(cfg, mu_test));
}

double ambiguity_polarimetric_general(const StructuralParams& mu,
                                      const StructuralParams& mu_test,
                                      const SoundingConfig& cfg) {
  return ambiguity_polarimetric_detail(mu, mu_test, cfg).s1;
}

double ambiguity_polarimetric_xpr(const StructuralParams& mu, const StructuralParams& mu_test,
                                  const SoundingConfig& cfg, bool skip_precondition) {
  if (!skip_precondition) {
    if (!passes_xpr_coarse(cfg.tx) || !passes_xpr_coarse(cfg.rx))
      throw xpr_precondition_error("arrays do not meet the high-XPR requirement");
  }
  const Eigen::MatrixXcd a = basis_matrix_polarimetric(cfg, mu);
  const Eigen::MatrixXcd b = basis_matrix_polarimetric(cfg, mu_test);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double na = a.col(i).norm();
    const double nb = b.col(i).norm();
    if (!(na > 0.0) || !(nb > 0.0))
      throw degenerate_direction_error("polarization pair " + std::to_string(i) +
                                       " has a vanishing basis column");
    total += std::abs(a.col(i).dot(b.col(i))) / (na * nb);
  }
  return total / 4.0;
}

AmbiguityMode detect_ambiguity_mode(const SoundingConfig& cfg) {
  if (effective_pol_count(cfg.tx) == 1 || effective_pol_count(cfg.rx) == 1)
    return AmbiguityMode::single_pol;
  if (passes_xpr_coarse(cfg.tx) && passes_xpr_coarse(cfg.rx)) return AmbiguityMode::high_xpr;
  return AmbiguityMode::general;
}

double ambiguity_objective(const SoundingConfig& cfg, const AmbiguityGrid& grid,
                           AmbiguityMode mode) {
  grid.validate();
  cfg.validate();
  if (mode == AmbiguityMode::automatic) mode = detect_ambiguity_mode(cfg);
  const double nu_up = grid.resolved_doppler_bound(cfg.sequence);

  const AxisSpec az_tx{grid.azimuth_tx_count, 0.0, kTwoPi};
  const AxisSpec el_tx{grid.elevation_tx_count, 0.0, std::numbers::pi};
  const AxisSpec az_rx{grid.azimuth_rx_count, 0.0, kTwoPi};
  const AxisSpec el_rx{grid.elevation_rx_count, 0.0, std::numbers::pi};
  const std::array<AxisSpec, 4> angle_axes{az_tx, el_tx, az_rx, el_rx};

  auto midpoint = [](const AxisSpec& axis, int i) {
    return axis.lo + (i + 0.5) * (axis.hi - axis.lo) / axis.count;
  };

  // angle combination index -> structural params with nu = 0
  const int combos =
      az_tx.count * el_tx.count * az_rx.count * el_rx.count;
  std::vector<StructuralParams> angle_points(static_cast<size_t>(combos));
  {
    int idx = 0;
    for (int a = 0; a < az_tx.count; ++a)
      for (int b = 0; b < el_tx.count; ++b)
        for (int c = 0; c < az_rx.count; ++c)
          for (int d = 0; d < el_rx.count; ++d, ++idx)
            angle_points[static_cast<size_t>(idx)] = {midpoint(az_tx, a), midpoint(el_tx, b),
                                                      midpoint(az_rx, c), midpoint(el_rx, d),
                                                      0.0};
  }

  double measure = 2.0 * nu_up / grid.doppler_count;
  for (const AxisSpec& axis : angle_axes) {
    const double step = (axis.hi - axis.lo) / axis.count;
    measure *= step * step;  // true and test loops both use this axis
  }

  std::vector<double> doppler_deltas(static_cast<size_t>(grid.doppler_count));
  for (int k = 0; k < grid.doppler_count; ++k)
    doppler_deltas[static_cast<size_t>(k)] =
        -nu_up + (k + 0.5) * (2.0 * nu_up) / grid.doppler_count;

  double total = 0.0;
  if (mode == AmbiguityMode::single_pol) {
    // spatial vectors are Doppler-free; the Doppler difference enters as a
    // phase rotation over the timing vector
    const Polarization tx_pol = effective_pol(cfg.tx, cfg.pol);
    const Polarization rx_pol = effective_pol(cfg.rx, cfg.pol);
    const Eigen::VectorXd eta_ext = layout_timing(cfg);
    Eigen::MatrixXcd spatial(eta_ext.size(), combos);
    Eigen::VectorXd norms(combos);
    for (int i = 0; i < combos; ++i) {
      StructuralParams mu = angle_points[static_cast<size_t>(i)];
      spatial.col(i) = structural_vector(cfg, mu, tx_pol, rx_pol);
      norms[i] = spatial.col(i).norm();
      if (!(norms[i] > 0.0))
        throw degenerate_direction_error("basis vector vanishes on the integration grid");
    }
    Eigen::MatrixXcd phases(eta_ext.size(), grid.doppler_count);
    for (int k = 0; k < grid.doppler_count; ++k)
      phases.col(k) =
          (kImag * kTwoPi * doppler_deltas[static_cast<size_t>(k)] * eta_ext.array()).exp();
    for (int i = 0; i < combos; ++i) {
      for (int j = 0; j < combos; ++j) {
        const Eigen::VectorXcd w = spatial.col(i).conjugate().cwiseProduct(spatial.col(j));
        const Eigen::VectorXcd z = phases.transpose() * w;
        const double scale = 1.0 / (norms[i] * norms[j]);
        for (int k = 0; k < grid.doppler_count; ++k)
          total += std::pow(std::abs(z[k]) * scale, grid.exponent);
      }
    }
  } else {
    for (int i = 0; i < combos; ++i) {
      for (int j = 0; j < combos; ++j) {
        for (int k = 0; k < grid.doppler_count; ++k) {
          StructuralParams mu = angle_points[static_cast<size_t>(i)];
          StructuralParams mu_test = angle_points[static_cast<size_t>(j)];
          mu_test.doppler_hz = doppler_deltas[static_cast<size_t>(k)];
          const double x = mode == AmbiguityMode::high_xpr
                               ? ambiguity_polarimetric_xpr(mu, mu_test, cfg, true)
                               : ambiguity_polarimetric_general(mu, mu_test, cfg);
          total += std::pow(x, grid.exponent);
        }
      }
    }
  }
  return total * measure;
}

AmbiguitySurface ambiguity_surface(const SoundingConfig& cfg, const StructuralParams& mu_true,
                                   const SweepAxis& axis1,
                                   const std::optional<SweepAxis>& axis2, AmbiguityMode mode) {
  cfg.validate();
  if (mode == AmbiguityMode::automatic) mode = detect_ambiguity_mode(cfg);
  auto axis_values = [](const SweepAxis& axis) {
    if (axis.count < 2) throw dimension_error("sweep axes need at least 2 points");
    Eigen::VectorXd v(axis.count);
    for (int i = 0; i < axis.count; ++i)
      v[i] = axis.lo + i * (axis.hi - axis.lo) / (axis.count - 1);
    return v;
  };

  auto apply = [&](StructuralParams& mu, SweepAxis::Dim dim, double value) {
    switch (dim) {
      case SweepAxis::Dim::azimuth_tx: mu.azimuth_tx = value; break;
      case SweepAxis::Dim::elevation_tx: mu.elevation_tx = value; break;
      case SweepAxis::Dim::azimuth_rx: mu.azimuth_rx = value; break;
      case SweepAxis::Dim::elevation_rx: mu.elevation_rx = value; break;
      case SweepAxis::Dim::doppler_delta: mu.doppler_hz = mu_true.doppler_hz + value; break;
    }
  };

  AmbiguitySurface out;
  out.dim1 = axis1.dim;
  out.axis1 = axis_values(axis1);
  if (axis2) {
    out.dim2 = axis2->dim;
    out.axis2 = axis_values(*axis2);
  } else {
    out.axis2 = Eigen::VectorXd::Zero(1);
  }

  out.values.resize(out.axis1.size(), out.axis2.size());
  for (Eigen::Index i = 0; i < out.axis1.size(); ++i) {
    for (Eigen::Index j = 0; j < out.axis2.size(); ++j) {
      StructuralParams mu_test = mu_true;
      apply(mu_test, axis1.dim, out.axis1[i]);
      if (axis2) apply(mu_test, axis2->dim, out.axis2[j]);
      double value = 0.0;
      switch (mode) {
        case AmbiguityMode::single_pol:
          value = std::abs(ambiguity_single_pol(mu_true, mu_test, cfg));
          break;
        case AmbiguityMode::high_xpr:
          value = ambiguity_polarimetric_xpr(mu_true, mu_test, cfg, true);
          break;
        default:
          value = ambiguity_polarimetric_general(mu_true, mu_test, cfg);
          break;
      }
      out.values(i, j) = value;
    }
  }
  return out;
}

}  // namespace ffseq
