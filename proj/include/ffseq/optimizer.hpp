#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "ffseq/ambiguity.hpp"
#include "ffseq/fisher.hpp"
#include "ffseq/fourier.hpp"
#include "ffseq/signal_model.hpp"

namespace ffseq {

struct AnnealConfig {
  double t0 = 0.0;        // <= 0: auto-scale from 50 random swap probes
  double alpha = 0.995;   // cooling factor in (0,1)
  int k_max = 5000;       // iteration cap
  std::uint64_t seed = 0;
  bool return_final = false;  // report the literal final state instead of best-seen

  void validate() const;
};

struct DesignReport {
  SwitchingSequence initial;
  SwitchingSequence final_seq;
  SwitchingSequence best_seq;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double best_cost = 0.0;
  std::vector<double> trace;  // current cost after each iteration
  long accepted = 0;
  double wall_seconds = 0.0;  // informational; not serialized

  const SwitchingSequence& result(bool literal_final) const {
    return literal_final ? final_seq : best_seq;
  }
};

using SequenceCost = std::function<double(const SwitchingSequence&)>;

// Swap of two distinct uniformly chosen positions.
SwitchingSequence neighbor(const SwitchingSequence& seq, RngStream& rng);

// Metropolis annealing: accept eta' when exp((J(eta) - J(eta'))/T) beats a
// uniform draw, cool T <- alpha*T each iteration, track the best state seen.
DesignReport anneal(const SwitchingSequence& initial, const SequenceCost& cost,
                    const AnnealConfig& cfg);

// Serialized without the wall-clock field so outputs stay reproducible.
void write_design_report(const DesignReport& report, const AnnealConfig& cfg,
                         std::ostream& out);

struct FfDesignConfig {
  ArrayModel tx;
  ArrayModel rx;
  double dt = 1.0;
  FourierStepConfig fourier;  // pair_count/dt filled from the models
  AnnealConfig anneal;
  FisherCostConfig fisher;
  bool isotropic_shortcut = false;  // |eta . m| cost (ULA TX, single RX)
  // optional wideband pattern sets; empty = narrowband
  std::vector<ArrayModel> tx_per_frequency;
  std::vector<ArrayModel> rx_per_frequency;
  WidebandMode wideband_mode = WidebandMode::sum;

  FfDesignConfig(ArrayModel tx_model, ArrayModel rx_model)
      : tx(std::move(tx_model)), rx(std::move(rx_model)) {}
};

// Fourier step seeds the annealer over the Fisher cost.
DesignReport design_ff(const FfDesignConfig& cfg);

struct AmbiguityDesignConfig {
  SoundingConfig base;        // sequence slot is replaced during the search
  AmbiguityGrid grid;
  AnnealConfig anneal;
  AmbiguityMode mode = AmbiguityMode::automatic;

  explicit AmbiguityDesignConfig(SoundingConfig cfg) : base(std::move(cfg)) {}
};

// Annealing over the integrated ambiguity objective from a random start.
DesignReport design_ambiguity_baseline(const AmbiguityDesignConfig& cfg);

struct KroneckerDesignResult {
  DesignReport tx;
  DesignReport rx;
  Eigen::VectorXd joint_timing;     // kron_sequence of the side timings
  SwitchingSequence joint_sequence; // nested schedule, dt_T = M_R * dt_R
};

// Independent per-side FF designs; J_T covers the TX cross terms and J_R the
// RX ones. The side seeds are derived from the anneal seed.
KroneckerDesignResult design_kronecker_split(const FfDesignConfig& cfg);

}  // namespace ffseq
