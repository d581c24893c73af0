#include "ffseq/array_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ffseq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};
}  // namespace

std::string to_string(Polarization pol) {
  return pol == Polarization::horizontal ? "H" : "V";
}

Polarization polarization_from_string(const std::string& s) {
  if (s == "H" || s == "h") return Polarization::horizontal;
  if (s == "V" || s == "v") return Polarization::vertical;
  throw format_error("unknown polarization '" + s + "' (expected H or V)");
}

Eigen::VectorXd centered_frequencies(int n) {
  Eigen::VectorXd alpha(n);
  for (int k = 0; k < n; ++k) alpha[k] = k - (n - 1) / 2.0;
  return alpha;
}

Eadf Eadf::create(Eigen::MatrixXcd coeffs, int a_phi, int a_theta, Polarization pol) {
  if (a_phi < 1 || a_theta < 1) throw dimension_error("EADF needs at least one angular frequency per axis");
  if (coeffs.cols() != static_cast<Eigen::Index>(a_phi) * a_theta)
    throw dimension_error("EADF coefficient count does not match A_phi*A_theta");
  Eadf e;
  e.coeffs = std::move(coeffs);
  e.alpha_phi = centered_frequencies(a_phi);
  e.alpha_theta = centered_frequencies(a_theta);
  e.pol = pol;
  return e;
}

Eigen::VectorXcd steering_phase_vector(double angle, const Eigen::VectorXd& alpha) {
  return (kImag * angle * alpha.array()).exp().matrix();
}

ArrayModel ArrayModel::isotropic_ula(int elements, double spacing_over_lambda, Polarization pol) {
  if (elements < 1) throw dimension_error("ULA needs at least one element");
  if (!(spacing_over_lambda > 0.0)) throw domain_error("ULA spacing must be positive");
  ArrayModel m;
  m.kind_ = Kind::isotropic_ula;
  m.elements_ = elements;
  m.spacing_over_lambda_ = spacing_over_lambda;
  m.native_pol_ = pol;
  m.centered_index_ = centered_frequencies(elements);
  return m;
}

ArrayModel ArrayModel::measured(std::optional<Eadf> horizontal, std::optional<Eadf> vertical) {
  if (!horizontal && !vertical) throw dimension_error("measured array needs at least one polarization");
  if (horizontal && vertical && horizontal->elements() != vertical->elements())
    throw dimension_error("H and V patterns must share the element count");
  ArrayModel m;
  m.kind_ = Kind::measured;
  m.eadf_h_ = std::move(horizontal);
  m.eadf_v_ = std::move(vertical);
  m.elements_ = m.eadf_h_ ? m.eadf_h_->elements() : m.eadf_v_->elements();
  m.centered_index_ = centered_frequencies(m.elements_);
  return m;
}

double ArrayModel::spacing_over_lambda() const {
  if (kind_ != Kind::isotropic_ula) throw domain_error("spacing is defined for ULA models only");
  return spacing_over_lambda_;
}

bool ArrayModel::has_polarization(Polarization pol) const {
  if (kind_ == Kind::isotropic_ula) return true;  // cross pol is exactly zero
  return pol == Polarization::horizontal ? eadf_h_.has_value() : eadf_v_.has_value();
}

const Eadf& ArrayModel::eadf(Polarization pol) const {
  const auto& slot = pol == Polarization::horizontal ? eadf_h_ : eadf_v_;
  if (kind_ != Kind::measured || !slot)
    throw missing_polarization_error("no " + to_string(pol) + " pattern in this array model");
  return *slot;
}

Eigen::VectorXcd ArrayModel::response(Polarization pol, double azimuth, double elevation) const {
  if (kind_ == Kind::isotropic_ula) {
    if (pol != native_pol_) return Eigen::VectorXcd::Zero(elements_);
    const double mu = kTwoPi * spacing_over_lambda_ * std::cos(azimuth);
    return (-kImag * mu * centered_index_.array()).exp().matrix();
  }
  const Eadf& e = eadf(pol);
  const Eigen::VectorXcd beta_phi = steering_phase_vector(azimuth, e.alpha_phi);
  const Eigen::VectorXcd beta_theta = steering_phase_vector(elevation, e.alpha_theta);
  Eigen::VectorXcd kron(e.a_phi() * e.a_theta());
  for (int k = 0; k < e.a_phi(); ++k)
    kron.segment(k * e.a_theta(), e.a_theta()) = beta_phi[k] * beta_theta;
  return e.coeffs * kron;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> ArrayModel::response_derivatives(
    Polarization pol, double azimuth, double elevation) const {
  if (kind_ == Kind::isotropic_ula) {
    if (pol != native_pol_)
      return {Eigen::VectorXcd::Zero(elements_), Eigen::VectorXcd::Zero(elements_)};
    const double mu = kTwoPi * spacing_over_lambda_ * std::cos(azimuth);
    const double dmu = -kTwoPi * spacing_over_lambda_ * std::sin(azimuth);
    const Eigen::VectorXcd b = (-kImag * mu * centered_index_.array()).exp().matrix();
    const Eigen::VectorXcd d_az =
        (b.array() * (-kImag * dmu * centered_index_.array())).matrix();
    return {d_az, Eigen::VectorXcd::Zero(elements_)};
  }
  const Eadf& e = eadf(pol);
  const Eigen::VectorXcd beta_phi = steering_phase_vector(azimuth, e.alpha_phi);
  const Eigen::VectorXcd beta_theta = steering_phase_vector(elevation, e.alpha_theta);
  const Eigen::VectorXcd dbeta_phi =
      (kImag * e.alpha_phi.array() * beta_phi.array()).matrix();
  const Eigen::VectorXcd dbeta_theta =
      (kImag * e.alpha_theta.array() * beta_theta.array()).matrix();
  Eigen::VectorXcd kron_az(e.a_phi() * e.a_theta());
  Eigen::VectorXcd kron_el(e.a_phi() * e.a_theta());
  for (int k = 0; k < e.a_phi(); ++k) {
    kron_az.segment(k * e.a_theta(), e.a_theta()) = dbeta_phi[k] * beta_theta;
    kron_el.segment(k * e.a_theta(), e.a_theta()) = beta_phi[k] * dbeta_theta;
  }
  return {e.coeffs * kron_az, e.coeffs * kron_el};
}

Eadf eadf_from_sampled_pattern(const Eigen::MatrixXcd& samples,
                               const Eigen::VectorXd& azimuth_grid,
                               const Eigen::VectorXd& elevation_grid,
                               Polarization pol) {
  const int n_phi = static_cast<int>(azimuth_grid.size());
  const int n_theta = static_cast<int>(elevation_grid.size());
  if (n_phi < 1 || n_theta < 1) throw format_error("empty sample grid");
  if (n_phi % 2 == 0 || n_theta % 2 == 0)
    throw format_error("sample grids must have odd sizes");
  if (samples.cols() != static_cast<Eigen::Index>(n_phi) * n_theta)
    throw dimension_error("sample count does not match grid size");

  auto check_uniform = [](const Eigen::VectorXd& grid, const char* name) {
    const int n = static_cast<int>(grid.size());
    if (n == 1) return;  // degenerate axis, any anchor angle
    const double step = kTwoPi / n;
    for (int i = 0; i < n; ++i) {
      if (std::abs(grid[i] - i * step) > 1e-9 * kTwoPi)
        throw format_error(std::string(name) + " grid is not uniform over [0, 2*pi)");
    }
  };
  check_uniform(azimuth_grid, "azimuth");
  check_uniform(elevation_grid, "elevation");

  const Eigen::VectorXd alpha_phi = centered_frequencies(n_phi);
  const Eigen::VectorXd alpha_theta = centered_frequencies(n_theta);

  // 2-D inverse transform: G[m, k*n_theta+l] =
  //   1/(n_phi*n_theta) * sum_{u,v} S[m, u*n_theta+v] e^{-j(phi_u a_k + theta_v a_l)}
  Eigen::MatrixXcd f_phi(n_phi, n_phi);    // e^{-j phi_u alpha_k}
  Eigen::MatrixXcd f_theta(n_theta, n_theta);
  for (int u = 0; u < n_phi; ++u)
    for (int k = 0; k < n_phi; ++k)
      f_phi(u, k) = std::exp(-kImag * azimuth_grid[u] * alpha_phi[k]);
  for (int v = 0; v < n_theta; ++v)
    for (int l = 0; l < n_theta; ++l)
      f_theta(v, l) = std::exp(-kImag * elevation_grid[v] * alpha_theta[l]);

  const int m_count = static_cast<int>(samples.rows());
  Eigen::MatrixXcd coeffs(m_count, n_phi * n_theta);
  const double scale = 1.0 / (static_cast<double>(n_phi) * n_theta);
  Eigen::MatrixXcd s(n_theta, n_phi);
  for (int m = 0; m < m_count; ++m) {
    for (int u = 0; u < n_phi; ++u)
      for (int v = 0; v < n_theta; ++v) s(v, u) = samples(m, u * n_theta + v);
    // g(l, k) = sum_{v,u} f_theta(v,l) * s(v,u) * f_phi(u,k)
    const Eigen::MatrixXcd g = f_theta.transpose() * s * f_phi;
    for (int k = 0; k < n_phi; ++k)
      for (int l = 0; l < n_theta; ++l)
        coeffs(m, k * n_theta + l) = scale * g(l, k);
  }
  return Eadf::create(std::move(coeffs), n_phi, n_theta, pol);
}

bool high_xpr_check(const Eigen::MatrixXcd& response_h, const Eigen::MatrixXcd& response_v,
                    double threshold_db) {
  if (response_h.rows() != response_v.rows() || response_h.cols() != response_v.cols())
    throw dimension_error("H and V response grids do not match");
  const double ratio = std::pow(10.0, -threshold_db / 20.0);
  for (Eigen::Index i = 0; i < response_h.rows(); ++i) {
    for (Eigen::Index j = 0; j < response_h.cols(); ++j) {
      const double h = std::abs(response_h(i, j));
      const double v = std::abs(response_v(i, j));
      if (std::min(h, v) > std::max(h, v) * ratio) return false;
    }
  }
  return true;
}

bool high_xpr_check(const ArrayModel& model, const Eigen::VectorXd& azimuth_grid,
                    const Eigen::VectorXd& elevation_grid, double threshold_db) {
  const Eigen::Index n = azimuth_grid.size() * elevation_grid.size();
  Eigen::MatrixXcd h(model.elements(), n);
  Eigen::MatrixXcd v(model.elements(), n);
  Eigen::Index col = 0;
  for (Eigen::Index a = 0; a < azimuth_grid.size(); ++a) {
    for (Eigen::Index e = 0; e < elevation_grid.size(); ++e, ++col) {
      h.col(col) = model.response(Polarization::horizontal, azimuth_grid[a], elevation_grid[e]);
      v.col(col) = model.response(Polarization::vertical, azimuth_grid[a], elevation_grid[e]);
    }
  }
  return high_xpr_check(h, v, threshold_db);
}

Eadf load_eadf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open EADF file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw format_error("EADF file is empty: " + path);
  std::istringstream hs(header);
  int m = 0, a_phi = 0, a_theta = 0;
  std::string pol_str;
  if (!(hs >> m >> a_phi >> a_theta >> pol_str))
    throw format_error("bad EADF header in " + path);
  if (m < 1 || a_phi < 1 || a_theta < 1) throw format_error("bad EADF dimensions in " + path);
  const Polarization pol = polarization_from_string(pol_str);
  Eigen::MatrixXcd coeffs(m, a_phi * a_theta);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < a_phi * a_theta; ++c) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im))
        throw format_error("EADF file truncated: " + path);
      coeffs(i, c) = Complex(re, im);
    }
  }
  return Eadf::create(std::move(coeffs), a_phi, a_theta, pol);
}

void save_eadf(const Eadf& eadf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write EADF file: " + path);
  out.precision(17);
  out << eadf.elements() << ' ' << eadf.a_phi() << ' ' << eadf.a_theta() << ' '
      << to_string(eadf.pol) << '\n';
  for (int i = 0; i < eadf.elements(); ++i)
    for (int c = 0; c < eadf.a_phi() * eadf.a_theta(); ++c)
      out << eadf.coeffs(i, c).real() << ' ' << eadf.coeffs(i, c).imag() << '\n';
}

Eigen::MatrixXcd load_pattern_samples(const std::string& path, int& n_phi, int& n_theta) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open pattern file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw format_error("pattern file is empty: " + path);
  std::istringstream hs(header);
  int m = 0;
  if (!(hs >> m >> n_phi >> n_theta)) throw format_error("bad pattern header in " + path);
  if (m < 1 || n_phi < 1 || n_theta < 1) throw format_error("bad pattern dimensions in " + path);
  Eigen::MatrixXcd samples(m, n_phi * n_theta);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < n_phi * n_theta; ++c) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im)) throw format_error("pattern file truncated: " + path);
      samples(i, c) = Complex(re, im);
    }
  }
  return samples;
}

}  // namespace ffseq
