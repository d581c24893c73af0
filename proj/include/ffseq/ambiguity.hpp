#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ffseq/signal_model.hpp"

namespace ffseq {

struct AmbiguityGrid {
  int azimuth_tx_count = 1;
  int elevation_tx_count = 1;
  int azimuth_rx_count = 1;
  int elevation_rx_count = 1;
  int doppler_count = 1;
  double doppler_bound = 0.0;  // nu_up; 0 = derive 1/(2*dt) from the sequence
  double exponent = 6.0;       // tuning power applied to |X|

  void validate() const;
  double resolved_doppler_bound(const SwitchingSequence& seq) const;
};

enum class AmbiguityMode { automatic, single_pol, high_xpr, general };

// Normalized inner product of the two single-pair basis vectors; |X| <= 1 with
// equality at mu' = mu.
Complex ambiguity_single_pol(const StructuralParams& mu, const StructuralParams& mu_test,
                             const SoundingConfig& cfg);

struct SubspaceSimilarity {
  double s1;  // mean of singular values (the ambiguity value)
  double s2;  // 2-norm variant
  double d2;  // Grassmann-distance variant
  Eigen::Vector4d singular_values;
};

// Similarity of the rank-4 column spaces of two basis matrices via the
// principal angles of the orthonormalized cross product.
SubspaceSimilarity subspace_similarity(const Eigen::MatrixXcd& basis_a,
                                       const Eigen::MatrixXcd& basis_b);

double ambiguity_polarimetric_general(const StructuralParams& mu,
                                      const StructuralParams& mu_test,
                                      const SoundingConfig& cfg);
SubspaceSimilarity ambiguity_polarimetric_detail(const StructuralParams& mu,
                                                 const StructuralParams& mu_test,
                                                 const SoundingConfig& cfg);

// Quarter-sum of the per-polarization-pair ambiguity magnitudes; valid when
// both arrays are close to perfectly polarized. The XPR precondition is
// checked on a coarse angle grid unless skipped.
double ambiguity_polarimetric_xpr(const StructuralParams& mu, const StructuralParams& mu_test,
                                  const SoundingConfig& cfg, bool skip_precondition = false);

AmbiguityMode detect_ambiguity_mode(const SoundingConfig& cfg);

// Midpoint Riemann sum of |X|^P over true x test parameter pairs. Angle axes
// with count 1 stay pinned at their midpoint; Doppler enters through the
// true/test difference only, which is exact for this signal model.
double ambiguity_objective(const SoundingConfig& cfg, const AmbiguityGrid& grid,
                           AmbiguityMode mode = AmbiguityMode::automatic);

struct SweepAxis {
  enum class Dim { azimuth_tx, elevation_tx, azimuth_rx, elevation_rx, doppler_delta };
  Dim dim = Dim::azimuth_tx;
  int count = 2;
  double lo = 0.0;
  double hi = 0.0;
};

struct AmbiguitySurface {
  Eigen::MatrixXd values;  // |X|, rows follow axis1, columns axis2
  Eigen::VectorXd axis1;
  Eigen::VectorXd axis2;  // single entry 0 when no second axis
  SweepAxis::Dim dim1;
  std::optional<SweepAxis::Dim> dim2;
};

AmbiguitySurface ambiguity_surface(const SoundingConfig& cfg, const StructuralParams& mu_true,
                                   const SweepAxis& axis1,
                                   const std::optional<SweepAxis>& axis2,
                                   AmbiguityMode mode = AmbiguityMode::automatic);

}  // namespace ffseq
