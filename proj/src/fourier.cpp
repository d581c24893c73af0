#include "ffseq/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace ffseq {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// M! as long long, or `cap` if it would exceed it.
long long factorial_capped(int n, long long cap) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) {
    if (f > cap / i) return cap;
    f *= i;
  }
  return std::min(f, cap);
}

template <typename Fn>
void for_each_permutation(int n, Fn&& fn) {
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i + 1;
  do {
    fn(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

SwitchingSequence exhaustive_argmin(int pair_count, double dt) {
  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for_each_permutation(pair_count, [&](const std::vector<int>& perm) {
    const double c = fourier_cost(SwitchingSequence::from_permutation(perm, dt));
    if (c < best_cost) {  // lexicographic enumeration, first hit wins ties
      best_cost = c;
      best = perm;
    }
  });
  return SwitchingSequence::from_permutation(std::move(best), dt);
}

}  // namespace

void FourierStepConfig::validate() const {
  if (!(confidence_level > 0.0 && confidence_level < 1.0))
    throw domain_error("confidence level must be in (0,1)");
  if (!(margin > 0.0 && margin < 1.0)) throw domain_error("margin must be in (0,1)");
  if (!(prior > 0.0 && prior < 1.0)) throw domain_error("prior must be in (0,1)");
  if (pair_count < 1) throw dimension_error("pair count must be >= 1");
  if (!(dt > 0.0)) throw domain_error("dt must be positive");
}

double fourier_cost(const SwitchingSequence& seq) {
  const int n = seq.size();
  std::vector<Complex> in(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) in[static_cast<size_t>(k)] = Complex(seq.eta[k] / seq.dt, 0.0);
  std::vector<Complex> out(static_cast<size_t>(n));
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  std::vector<double> mags(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) mags[static_cast<size_t>(k)] = std::abs(out[static_cast<size_t>(k)]);
  return median_of(std::move(mags));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("quantile argument must be in (0,1)");

  // Acklam's approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

long long cochran_sample_size(const FourierStepConfig& cfg) {
  cfg.validate();
  const double t = normal_quantile(1.0 - (1.0 - cfg.confidence_level) / 2.0);
  const double raw = t * t * cfg.prior * (1.0 - cfg.prior) / (cfg.margin * cfg.margin);
  const long long n0 = static_cast<long long>(std::ceil(raw));
  const long long population = factorial_capped(cfg.pair_count, std::numeric_limits<long long>::max());
  return std::min(std::max(n0, 1LL), population);
}

std::vector<SwitchingSequence> sample_sequences(int pair_count, double dt, long long count,
                                                RngStream& rng) {
  if (count < 1) throw domain_error("sample count must be >= 1");
  std::vector<SwitchingSequence> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<int> perm(static_cast<size_t>(pair_count));
  for (long long s = 0; s < count; ++s) {
    for (int i = 0; i < pair_count; ++i) perm[static_cast<size_t>(i)] = i + 1;
    for (int i = pair_count - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(0, i));
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    }
    out.push_back(SwitchingSequence::from_permutation(perm, dt));
  }
  return out;
}

SwitchingSequence fourier_step(const FourierStepConfig& cfg) {
  const long long n0 = cochran_sample_size(cfg);
  const long long population = factorial_capped(cfg.pair_count, std::numeric_limits<long long>::max());
  if (n0 >= population) return exhaustive_argmin(cfg.pair_count, cfg.dt);

  RngStream rng(cfg.seed);
  const std::vector<SwitchingSequence> sample = sample_sequences(cfg.pair_count, cfg.dt, n0, rng);
  const SwitchingSequence* best = &sample.front();
  double best_cost = fourier_cost(*best);
  for (size_t i = 1; i < sample.size(); ++i) {
    const double c = fourier_cost(sample[i]);
    if (c < best_cost || (c == best_cost && sample[i].perm < best->perm)) {
      best_cost = c;
      best = &sample[i];
    }
  }
  return *best;
}

SwitchingSequence brute_force_fourier_step(int pair_count, double dt) {
  if (pair_count < 1) throw dimension_error("pair count must be >= 1");
  if (pair_count > 9)
    throw capacity_error("brute-force search is limited to 9 pairs (" +
                         std::to_string(pair_count) + "! permutations requested)");
  return exhaustive_argmin(pair_count, dt);
}

}  // namespace ffseq
