#include "ffseq/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

namespace ffseq {

namespace {

std::string perm_to_string(const std::vector<int>& perm) {
  std::string s;
  for (size_t i = 0; i < perm.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(perm[i]);
  }
  return s;
}

}  // namespace

void AnnealConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("cooling factor must be in (0,1)");
  if (k_max < 1) throw domain_error("iteration cap must be >= 1");
}

SwitchingSequence neighbor(const SwitchingSequence& seq, RngStream& rng) {
  const int n = seq.size();
  if (n < 2) throw domain_error("need at least 2 positions to swap");
  const int i = static_cast<int>(rng.uniform_int(0, n - 1));
  int j = static_cast<int>(rng.uniform_int(0, n - 2));
  if (j >= i) ++j;
  std::vector<int> perm = seq.perm;
  std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  return SwitchingSequence::from_permutation(std::move(perm), seq.dt);
}

DesignReport anneal(const SwitchingSequence& initial, const SequenceCost& cost,
                    const AnnealConfig& cfg) {
  cfg.validate();
  validate_permutation(initial.perm);
  const auto start = std::chrono::steady_clock::now();

  RngStream rng(cfg.seed);
  double temperature = cfg.t0;
  if (!(temperature > 0.0)) {
    // scale from the landscape: mean |dJ| over random swap probes
    const double j0 = cost(initial);
    double acc = 0.0;
    const int probes = 50;
    for (int p = 0; p < probes; ++p) acc += std::abs(cost(neighbor(initial, rng)) - j0);
    temperature = acc / probes;
    if (!(temperature > 0.0)) temperature = 1.0;
  }

  DesignReport report;
  report.initial = initial;
  report.initial_cost = cost(initial);
  SwitchingSequence current = initial;
  double current_cost = report.initial_cost;
  report.best_seq = current;
  report.best_cost = current_cost;
  report.trace.reserve(static_cast<size_t>(cfg.k_max));

  for (int k = 0; k < cfg.k_max; ++k) {
    SwitchingSequence proposal = neighbor(current, rng);
    validate_permutation(proposal.perm);
    const double proposal_cost = cost(proposal);
    if (std::exp((current_cost - proposal_cost) / temperature) > rng.uniform()) {
      current = std::move(proposal);
      current_cost = proposal_cost;
      ++report.accepted;
      if (current_cost < report.best_cost) {
        report.best_cost = current_cost;
        report.best_seq = current;
      }
    }
    temperature *= cfg.alpha;
    report.trace.push_back(current_cost);
  }

  report.final_seq = std::move(current);
  report.final_cost = current_cost;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_design_report(const DesignReport& report, const AnnealConfig& cfg,
                         std::ostream& out) {
  out.precision(17);
  out << "# anneal t0=" << (cfg.t0 > 0.0 ? cfg.t0 : 0.0) << " alpha=" << cfg.alpha
      << " k_max=" << cfg.k_max << " seed=" << cfg.seed << '\n';
  out << "initial_cost," << report.initial_cost << '\n';
  out << "final_cost," << report.final_cost << '\n';
  out << "best_cost," << report.best_cost << '\n';
  out << "accepted," << report.accepted << '\n';
  out << "initial_sequence," << perm_to_string(report.initial.perm) << '\n';
  out << "final_sequence," << perm_to_string(report.final_seq.perm) << '\n';
  out << "best_sequence," << perm_to_string(report.best_seq.perm) << '\n';
  out << "iteration,cost\n";
  for (size_t k = 0; k < report.trace.size(); ++k) out << k + 1 << ',' << report.trace[k] << '\n';
}

DesignReport design_ff(const FfDesignConfig& cfg) {
  const int pair_count = cfg.tx.elements() * cfg.rx.elements();
  FourierStepConfig fourier = cfg.fourier;
  fourier.pair_count = pair_count;
  fourier.dt = cfg.dt;
  const SwitchingSequence seed_seq = fourier_step(fourier);

  SequenceCost cost;
  if (!cfg.tx_per_frequency.empty() || !cfg.rx_per_frequency.empty()) {
    std::vector<ArrayModel> tx_set =
        cfg.tx_per_frequency.empty() ? std::vector<ArrayModel>{cfg.tx} : cfg.tx_per_frequency;
    std::vector<ArrayModel> rx_set =
        cfg.rx_per_frequency.empty() ? std::vector<ArrayModel>{cfg.rx} : cfg.rx_per_frequency;
    if (cfg.wideband_mode == WidebandMode::composite) {
      // collapse once, then reuse the narrowband evaluator
      auto evaluator = std::make_shared<FisherCostEvaluator>(
          composite_pattern(tx_set), composite_pattern(rx_set), cfg.fisher);
      cost = [evaluator](const SwitchingSequence& s) { return evaluator->joint_cost(s.eta); };
    } else {
      std::vector<std::shared_ptr<FisherCostEvaluator>> evaluators;
      const size_t m_f = std::max(tx_set.size(), rx_set.size());
      for (size_t f = 0; f < m_f; ++f) {
        const ArrayModel& tx = tx_set.size() == 1 ? tx_set.front() : tx_set[f];
        const ArrayModel& rx = rx_set.size() == 1 ? rx_set.front() : rx_set[f];
        evaluators.push_back(std::make_shared<FisherCostEvaluator>(tx, rx, cfg.fisher));
      }
      cost = [evaluators](const SwitchingSequence& s) {
        double total = 0.0;
        for (const auto& e : evaluators) total += e->joint_cost(s.eta);
        return total;
      };
    }
  } else if (cfg.isotropic_shortcut) {
    if (cfg.rx.elements() != 1)
      throw domain_error("isotropic shortcut needs a single-antenna RX");
    const Eigen::VectorXd m = cfg.tx.centered_index();
    cost = [m](const SwitchingSequence& s) { return fisher_cost_isotropic_ula(s.eta, m); };
  } else {
    auto evaluator = std::make_shared<FisherCostEvaluator>(cfg.tx, cfg.rx, cfg.fisher);
    cost = [evaluator](const SwitchingSequence& s) { return evaluator->joint_cost(s.eta); };
  }

  return anneal(seed_seq, cost, cfg.anneal);
}

DesignReport design_ambiguity_baseline(const AmbiguityDesignConfig& cfg) {
  cfg.grid.validate();
  const int pair_count = cfg.base.pair_count();
  RngStream rng(derive_seed(cfg.anneal.seed, 0x616d6269));
  const SwitchingSequence start =
      sample_sequences(pair_count, cfg.base.sequence.dt, 1, rng).front();

  SoundingConfig base = cfg.base;
  const AmbiguityMode mode =
      cfg.mode == AmbiguityMode::automatic ? detect_ambiguity_mode(base) : cfg.mode;
  SequenceCost cost = [base, grid = cfg.grid, mode](const SwitchingSequence& s) mutable {
    base.sequence = s;
    return ambiguity_objective(base, grid, mode);
  };
  return anneal(start, cost, cfg.anneal);
}

KroneckerDesignResult design_kronecker_split(const FfDesignConfig& cfg) {
  const int m_r = cfg.rx.elements();
  const double dt_rx = cfg.dt;
  const double dt_tx = m_r * dt_rx;  // TX holds while RX sweeps

  KroneckerDesignResult out{
      DesignReport{}, DesignReport{}, Eigen::VectorXd{},
      SwitchingSequence::trivial(cfg.tx.elements() * m_r, dt_rx)};

  {
    FourierStepConfig fourier = cfg.fourier;
    fourier.pair_count = cfg.tx.elements();
    fourier.dt = dt_tx;
    fourier.seed = derive_seed(cfg.fourier.seed, 1);
    AnnealConfig anneal_cfg = cfg.anneal;
    anneal_cfg.seed = derive_seed(cfg.anneal.seed, 1);
    const SwitchingSequence seed_seq = fourier_step(fourier);
    FisherCostConfig side = cfg.fisher;
    side.doppler_azimuth_rx = false;
    side.doppler_elevation_rx = false;
    auto evaluator = std::make_shared<FisherCostEvaluator>(cfg.tx, cfg.rx, side);
    out.tx = anneal(
        seed_seq,
        [evaluator](const SwitchingSequence& s) { return evaluator->tx_cost(s.eta); },
        anneal_cfg);
  }
  {
    FourierStepConfig fourier = cfg.fourier;
    fourier.pair_count = m_r;
    fourier.dt = dt_rx;
    fourier.seed = derive_seed(cfg.fourier.seed, 2);
    AnnealConfig anneal_cfg = cfg.anneal;
    anneal_cfg.seed = derive_seed(cfg.anneal.seed, 2);
    const SwitchingSequence seed_seq = fourier_step(fourier);
    FisherCostConfig side = cfg.fisher;
    side.doppler_azimuth_tx = false;
    side.doppler_elevation_tx = false;
    auto evaluator = std::make_shared<FisherCostEvaluator>(cfg.tx, cfg.rx, side);
    out.rx = anneal(
        seed_seq,
        [evaluator](const SwitchingSequence& s) { return evaluator->rx_cost(s.eta); },
        anneal_cfg);
  }

  const SwitchingSequence& tx_seq = out.tx.best_seq;
  const SwitchingSequence& rx_seq = out.rx.best_seq;
  out.joint_timing = kron_sequence(tx_seq.eta, rx_seq.eta);

  // joint permutation of the nested schedule: TX slot i opens a block of RX slots
  std::vector<int> joint(static_cast<size_t>(tx_seq.size() * rx_seq.size()));
  for (int i = 0; i < tx_seq.size(); ++i)
    for (int j = 0; j < rx_seq.size(); ++j)
      joint[static_cast<size_t>(i * rx_seq.size() + j)] =
          (tx_seq.perm[static_cast<size_t>(i)] - 1) * rx_seq.size() +
          rx_seq.perm[static_cast<size_t>(j)];
  out.joint_sequence = SwitchingSequence::from_permutation(std::move(joint), dt_rx);
  return out;
}

}  // namespace ffseq
