#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>

#include "ffseq/errors.hpp"

namespace ffseq {

using Complex = std::complex<double>;

enum class Polarization { horizontal, vertical };

std::string to_string(Polarization pol);
Polarization polarization_from_string(const std::string& s);

// 2-D Fourier-coefficient representation of the polarimetric response of all
// elements of an array: row m holds the coefficients of element m over the
// angular frequencies alpha_phi x alpha_theta (azimuth-major columns).
struct Eadf {
  Eigen::MatrixXcd coeffs;      // M x (a_phi * a_theta)
  Eigen::VectorXd alpha_phi;    // centered, unit step, strictly increasing
  Eigen::VectorXd alpha_theta;  // centered, unit step, strictly increasing
  Polarization pol = Polarization::vertical;

  static Eadf create(Eigen::MatrixXcd coeffs, int a_phi, int a_theta, Polarization pol);

  int elements() const { return static_cast<int>(coeffs.rows()); }
  int a_phi() const { return static_cast<int>(alpha_phi.size()); }
  int a_theta() const { return static_cast<int>(alpha_theta.size()); }
};

// [beta]_k = exp(j * angle * alpha_k)
Eigen::VectorXcd steering_phase_vector(double angle, const Eigen::VectorXd& alpha);

// Centered angular frequency vector [-(n-1)/2, ..., (n-1)/2]
Eigen::VectorXd centered_frequencies(int n);

// An antenna array: either a measured pattern per polarization (EADF) or an
// ideal isotropic uniform linear array. The ULA is perfectly polarized: its
// cross-polarized response is identically zero. A measured model without a
// pattern for the requested polarization cannot answer and throws instead.
class ArrayModel {
 public:
  enum class Kind { measured, isotropic_ula };

  static ArrayModel isotropic_ula(int elements, double spacing_over_lambda,
                                  Polarization pol = Polarization::vertical);
  static ArrayModel measured(std::optional<Eadf> horizontal, std::optional<Eadf> vertical);

  Kind kind() const { return kind_; }
  int elements() const { return elements_; }
  double spacing_over_lambda() const;
  Polarization native_polarization() const { return native_pol_; }

  // centered element index vector m = [0..M-1] - (M-1)/2
  const Eigen::VectorXd& centered_index() const { return centered_index_; }

  bool has_polarization(Polarization pol) const;
  const Eadf& eadf(Polarization pol) const;

  Eigen::VectorXcd response(Polarization pol, double azimuth, double elevation = 0.0) const;

  // (d/d_azimuth, d/d_elevation)
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> response_derivatives(
      Polarization pol, double azimuth, double elevation = 0.0) const;

 private:
  ArrayModel() = default;

  Kind kind_ = Kind::isotropic_ula;
  int elements_ = 0;
  double spacing_over_lambda_ = 0.5;
  Polarization native_pol_ = Polarization::vertical;  // ULA only
  std::optional<Eadf> eadf_h_;
  std::optional<Eadf> eadf_v_;
  Eigen::VectorXd centered_index_;
};

// Fit a 2-D Fourier series through samples taken on uniform full-circle grids
// azimuth_grid[u] = 2*pi*u/n_phi, elevation_grid[v] = 2*pi*v/n_theta (odd
// counts; a single-point elevation grid may sit at any angle). The samples
// matrix is M x (n_phi * n_theta), azimuth-major. The fitted coefficients
// reproduce the samples at the grid angles; between grid points the series is
// evaluated as-is, so extrapolation quality outside the sampled support is the
// caller's responsibility.
Eadf eadf_from_sampled_pattern(const Eigen::MatrixXcd& samples,
                               const Eigen::VectorXd& azimuth_grid,
                               const Eigen::VectorXd& elevation_grid,
                               Polarization pol);

// True iff every element at every grid angle is dominated by one polarization:
// min(|h|,|v|) <= max(|h|,|v|) * 10^(-threshold_db/20). Element/angle pairs
// where both responses vanish count as satisfying.
bool high_xpr_check(const Eigen::MatrixXcd& response_h, const Eigen::MatrixXcd& response_v,
                    double threshold_db = 30.0);
bool high_xpr_check(const ArrayModel& model, const Eigen::VectorXd& azimuth_grid,
                    const Eigen::VectorXd& elevation_grid, double threshold_db = 30.0);

// Text file I/O. Header line "M A_phi A_theta polarization", then
// M*A_phi*A_theta lines "re im" in row-major (element, alpha_phi, alpha_theta)
// order.
Eadf load_eadf(const std::string& path);
void save_eadf(const Eadf& eadf, const std::string& path);

// Sampled-pattern file: header "M N_phi N_theta", then complex samples in
// row-major (element, azimuth, elevation) order.
Eigen::MatrixXcd load_pattern_samples(const std::string& path, int& n_phi, int& n_theta);

}  // namespace ffseq
