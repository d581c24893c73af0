#pragma once

#include <cstdint>
#include <vector>

#include "ffseq/rng.hpp"
#include "ffseq/signal_model.hpp"

namespace ffseq {

struct FourierStepConfig {
  double confidence_level = 0.99;  // CL in (0,1)
  double margin = 0.05;            // d in (0,1)
  double prior = 0.5;              // p in (0,1)
  int pair_count = 0;              // M_TR
  double dt = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Median of the magnitude spectrum of eta/dt over all M bins (DC included;
// it is identically zero for centered sequences, so rankings are unaffected).
// Even-length median is the mean of the two central order statistics.
double fourier_cost(const SwitchingSequence& seq);

// Standard normal quantile, Acklam's rational approximation polished with one
// Halley step on the erfc-based CDF; accurate to full double precision.
double normal_quantile(double p);

// ceil(t^2 * p * (1-p) / d^2) with t = quantile(1 - (1-CL)/2), capped at the
// population size M! when that is smaller.
long long cochran_sample_size(const FourierStepConfig& cfg);

// Uniformly random permutations (Fisher-Yates), drawn with replacement.
std::vector<SwitchingSequence> sample_sequences(int pair_count, double dt, long long count,
                                                RngStream& rng);

// Cochran-sized random sample, argmin of the Fourier cost; when the sample
// size covers the whole population the search is exhaustive instead. Ties go
// to the lexicographically smallest permutation.
SwitchingSequence fourier_step(const FourierStepConfig& cfg);

// Exact argmin over all M! permutations; guarded at M <= 9.
SwitchingSequence brute_force_fourier_step(int pair_count, double dt);

}  // namespace ffseq
