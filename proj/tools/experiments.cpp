#include "experiments.hpp"

#include <cmath>

namespace lomv::experiments {

std::uint64_t cell_seed(std::uint64_t seed, std::size_t index) {
  return trial_seed(seed ^ 0x5eedc0ffee000000ULL, index);
}

std::vector<TableCell> run_table(std::uint64_t seed, std::size_t trials,
                                 bool parallel,
                                 std::optional<double> only_delta2) {
  std::vector<TableCell> cells;
  for (std::size_t idx = 0; idx < harness::kPublishedTable.size(); ++idx) {
    const harness::PublishedCell& pub = harness::kPublishedTable[idx];
    if (only_delta2 && pub.delta2 != *only_delta2) {
      continue;
    }
    TableCell cell;
    cell.published = pub;
    cell.config.dist = BetaDistribution::normal(1.0, pub.s);
    cell.config.delta = DeltaModel::constant(pub.delta2);
    cell.config.sigma2 = 1.0;
    cell.config.p = pub.p;
    cell.config.trials = trials;
    cell.config.seed = cell_seed(seed, idx);
    cell.config.parallel = parallel;
    cell.batch = run_batch(cell.config);

    const AsymptoticReport rep = classify_and_solve(cell.config.dist);
    cell.f_beta_star = rep.f_beta_star;
    cell.beta_star = rep.beta_star;

    const double se =
        cell.batch.summary.sd / std::sqrt(static_cast<double>(trials));
    cell.z_score = se > 0.0 ? (cell.batch.summary.mean - pub.mean) / se
                            : (cell.batch.summary.mean == pub.mean ? 0.0
                                                                   : INFINITY);
    cell.within_4se = std::abs(cell.z_score) <= 4.0;
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<NonconvergenceRun> run_nonconvergence(
    std::uint64_t seed, std::size_t trials, bool parallel,
    const std::vector<std::size_t>& ps) {
  std::vector<NonconvergenceRun> runs;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    SimConfig cfg;
    cfg.dist = harness::four_atom_distribution();
    cfg.delta = DeltaModel::constant(0.1);
    cfg.sigma2 = 1.0;
    cfg.p = ps[i];
    cfg.trials = trials;
    cfg.seed = cell_seed(seed, 100 + i);
    cfg.parallel = parallel;
    NonconvergenceRun run;
    run.p = ps[i];
    run.batch = nonconvergence_experiment(cfg);
    run.modes = count_modes(run.batch);
    runs.push_back(std::move(run));
  }
  return runs;
}

WeightComparison run_weight_comparison(std::uint64_t seed, std::size_t p) {
  SimConfig cfg;
  cfg.dist = BetaDistribution::normal(1.0, 0.4);
  cfg.delta = DeltaModel::constant(0.25);
  cfg.sigma2 = 1.0;
  cfg.p = p;
  cfg.trials = 1;
  cfg.seed = cell_seed(seed, 200);
  FactorModel model = sample_trial(cfg, 0);
  LomvSolution lomv = solve_lomv(model);
  std::vector<double> gmv = solve_gmv_longshort(model);

  WeightComparison out{std::move(model), std::move(lomv), std::move(gmv)};
  out.lomv_active = out.lomv.k;
  for (std::size_t i : out.lomv.active_original_indices) {
    if (out.model.betas()[i] < 0.0) {
      ++out.lomv_active_negative_beta;
    }
  }
  for (double w : out.gmv) {
    if (w > 0.0) {
      ++out.gmv_positive;
    }
  }
  return out;
}

}  // namespace lomv::experiments
