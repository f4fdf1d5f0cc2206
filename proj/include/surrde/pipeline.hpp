#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surrde/bbob.hpp"
#include "surrde/dqn.hpp"
#include "surrde/surrogate.hpp"

namespace surrde::pipeline {

// --- surrogate learning stage ------------------------------------------------

struct SlsRunConfig {
    std::size_t n_samples = 50000;
    SlsConfig training;
    Arch arch = Arch::kan;
    std::vector<int> kan_hidden = {10};  // network dims = [dim, hidden..., 1]
    int kan_grid = 5;
    int kan_degree = 5;
    std::vector<int> mlp_hidden = {64, 64};
    int rbf_centers = 64;
};

struct SlsOutcome {
    std::vector<std::optional<TrainedSurrogate>> surrogates;  // aligned with the problem list
    std::vector<std::string> errors;                          // empty string when trained fine
    std::int64_t total_true_fes = 0;
};

std::unique_ptr<Network> make_network(const SlsRunConfig& cfg, int dim, const SampleSet* data,
                                      std::uint64_t seed);

// Trains one surrogate per problem. Problems run independently (parallel
// across workers); a diverging problem is reported and the rest continue.
SlsOutcome run_sls(std::span<const bbob::ProblemSpec> problems, const SlsRunConfig& cfg,
                   std::uint64_t seed);

// --- policy learning stage ---------------------------------------------------

enum class EvaluatorMode { surrogate, true_function };

struct PlsConfig {
    std::int64_t max_learning_steps = 1500000;  // maxLS
    std::int64_t max_fes = 20000;               // per episode
    std::size_t population_size = 100;          // NP
    double cr = 0.7;
    EvaluatorMode evaluator_mode = EvaluatorMode::surrogate;
    bool reward_literal = false;
    dqn::AgentConfig agent;
    std::uint64_t seed = 0;
    std::int64_t log_every = 100;  // learning steps between training log rows
    // Called after each episode whose end crossed a checkpoint_every boundary
    // (and once at the end); 0 disables.
    std::int64_t checkpoint_every = 0;
    std::function<void(const dqn::Agent&)> checkpoint_hook;
};

struct PlsLogRow {
    std::int64_t step = 0;
    double loss = 0.0;
    double eps = 0.0;
    double mean_q = 0.0;
};

struct PlsResult {
    dqn::Agent agent;
    std::vector<PlsLogRow> log;
    std::int64_t true_fes = 0;  // true-function evaluations consumed (0 in surrogate mode)
    std::int64_t episodes = 0;
    std::int64_t learning_steps = 0;
};

// Alg. "policy learning": cycles the problems round-robin, one DE episode per
// visit, epsilon-greedy actions, one Bellman update per generation, periodic
// target sync. New episodes start only while the step budget remains; a
// started episode always completes. In surrogate mode the true-function
// counters are asserted to stay untouched. `resume_from` continues an
// interrupted run from its checkpointed step count (the replay buffer is not
// persisted and refills from fresh experience).
PlsResult run_pls(std::span<const bbob::ProblemSpec> problems,
                  std::span<const TrainedSurrogate> surrogates,  // empty in true-function mode
                  const PlsConfig& cfg,
                  std::optional<dqn::Agent> resume_from = std::nullopt);

// --- evaluation protocol -----------------------------------------------------

struct RunRecord {
    std::string problem;
    std::string method;
    std::uint64_t seed = 0;
    std::vector<double> best_trace;  // best-so-far after each generation
    std::vector<double> mean_trace;  // population mean fitness per generation
    std::vector<int> actions;        // per generation (empty for random search)
    double final_best = 0.0;
    std::int64_t consumed_fes = 0;
    double wall_time_sec = 0.0;
};

enum class BaselineMethod { random_search, static_de };

struct EvalConfig {
    std::int64_t max_fes = 20000;
    std::size_t population_size = 100;
    double cr = 0.7;
    int n_runs = 51;
    std::uint64_t seed = 0;
    bool include_baselines = true;
};

// One full run on the true function: the policy acting greedily.
RunRecord run_policy_once(dqn::Agent& agent, const bbob::ProblemSpec& spec,
                          const EvalConfig& cfg, std::uint64_t run_seed);

RunRecord run_baseline(BaselineMethod method, const bbob::ProblemSpec& spec,
                       const EvalConfig& cfg, std::uint64_t run_seed);

struct EvalCell {
    double mean = 0.0;
    double stddev = 0.0;
    int rank = 0;
};

struct EvalTable {
    std::vector<std::string> problems;
    std::vector<std::string> methods;
    std::vector<std::vector<EvalCell>> cells;  // [problem][method]
    std::vector<double> avg_rank;              // per method
    std::vector<RunRecord> runs;
};

// n_runs seeded runs per problem on the TRUE functions for the policy and,
// when enabled, the in-repo comparators; means, stds and per-problem ranks.
EvalTable evaluate_policy(dqn::Agent& agent, std::span<const bbob::ProblemSpec> problems,
                          const EvalConfig& cfg);

void write_runs_jsonl(std::span<const RunRecord> runs, std::ostream& out);
void write_table_csv(const EvalTable& table, std::ostream& out);
void write_curves_csv(const RunRecord& run, std::size_t population_size, std::ostream& out);

// --- ablations ----------------------------------------------------------------

struct ArchAblationRow {
    std::string problem;
    Arch arch = Arch::kan;
    std::uint64_t seed = 0;
    double mse = 0.0;
    double order_acc = 0.0;
};

// Trains each architecture on each problem for each seed; reports holdout
// MSE and order accuracy.
std::vector<ArchAblationRow> run_arch_ablation(std::span<const bbob::ProblemSpec> problems,
                                               const SlsRunConfig& cfg,
                                               std::span<const std::uint64_t> seeds);

// x1,x2,f_true,f_pred grid over the domain of a 2D problem.
void export_landscape_grid(bbob::Problem& problem, const TrainedSurrogate& model,
                           std::size_t points_per_axis, std::ostream& out);

}  // namespace surrde::pipeline
