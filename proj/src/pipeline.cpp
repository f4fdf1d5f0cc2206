#include "surrde/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "surrde/de.hpp"
#include "surrde/features.hpp"
#include "surrde/kernels.hpp"
#include "surrde/parallel.hpp"

namespace surrde::pipeline {

using de::Evaluator;

std::unique_ptr<Network> make_network(const SlsRunConfig& cfg, int dim, const SampleSet* data,
                                      std::uint64_t seed) {
    Rng rng(split_seed(seed, 0x4e7));
    switch (cfg.arch) {
        case Arch::kan: {
            std::vector<int> dims;
            dims.push_back(dim);
            dims.insert(dims.end(), cfg.kan_hidden.begin(), cfg.kan_hidden.end());
            dims.push_back(1);
            return std::make_unique<KanNetwork>(dims, cfg.kan_grid, cfg.kan_degree, rng);
        }
        case Arch::mlp: {
            std::vector<int> dims;
            dims.push_back(dim);
            dims.insert(dims.end(), cfg.mlp_hidden.begin(), cfg.mlp_hidden.end());
            dims.push_back(1);
            return std::make_unique<MlpNetwork>(dims, rng);
        }
        case Arch::rbf: {
            auto net = std::make_unique<RbfNetwork>(dim, cfg.rbf_centers, rng);
            if (data) {
                // centers live in the normalized input space
                Matrix normalized(data->size(), data->dim());
                for (std::size_t i = 0; i < data->size(); ++i)
                    for (std::size_t j = 0; j < data->dim(); ++j)
                        normalized(i, j) = data->x_norm.apply(data->xs(i, j));
                net->init_from_data(normalized.data, normalized.rows, rng);
            }
            return net;
        }
    }
    throw std::logic_error("unreachable");
}

SlsOutcome run_sls(std::span<const bbob::ProblemSpec> problems, const SlsRunConfig& cfg,
                   std::uint64_t seed) {
    SlsOutcome outcome;
    const std::size_t n = problems.size();
    outcome.surrogates.resize(n);
    outcome.errors.assign(n, "");

    std::vector<std::int64_t> fes(n, 0);
    const std::ptrdiff_t ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (n > 1)
    for (std::ptrdiff_t pi = 0; pi < ni; ++pi) {
        const std::size_t p = static_cast<std::size_t>(pi);
        const std::uint64_t problem_seed = split_seed(seed, 0x100 + p);
        try {
            bbob::Problem problem(problems[p]);
            SampleSet data = build_dataset(problem, cfg.n_samples, problem_seed);
            auto net = make_network(cfg, problem.dim(), &data, problem_seed);
            auto model = train_surrogate(data, std::move(net), cfg.training, problem_seed);
            model.problem_name = bbob::function_name(problems[p].function);
            fes[p] = problem.counter().consumed;
            outcome.surrogates[p] = std::move(model);
        } catch (const std::exception& e) {
            outcome.errors[p] = e.what();
        }
    }
    for (std::int64_t f : fes) outcome.total_true_fes += f;
    return outcome;
}

// ---------------------------------------------------------------------------
// Episode driver shared by PLS training, policy evaluation and the baselines.

namespace {

struct EpisodeSettings {
    std::size_t np = 100;
    std::size_t dim = 10;
    std::int64_t max_fes = 20000;
    double cr = 0.7;
    double lower = -5.0;
    double upper = 5.0;
    bool reward_literal = false;
};

// pick_action decides the mutation config for the coming generation; on_step
// observes each applied transition (no-op for plain evaluation runs).
RunRecord drive_episode(
    const Evaluator& evaluate, const EpisodeSettings& st, Rng& rng,
    const std::function<int(const OptState&)>& pick_action,
    const std::function<void(const OptState&, int, double, const OptState&, bool)>& on_step) {
    RunRecord rec;
    const auto t0 = std::chrono::steady_clock::now();

    auto mean_fitness = [](const de::Population& p) {
        double mean = 0.0;
        for (double y : p.ys) mean += y;
        return mean / static_cast<double>(p.size());
    };

    de::Population pop =
        de::initialize_population(st.np, st.dim, st.lower, st.upper, evaluate, rng);
    std::int64_t fes = static_cast<std::int64_t>(st.np);
    const std::int64_t total_gens = st.max_fes / static_cast<std::int64_t>(st.np);

    RunProgress progress;
    progress.max_fes = st.max_fes;
    progress.total_gens = total_gens;
    progress.fes = fes;
    progress.best_init = pop.best_y;
    progress.best_prev_gen = pop.best_y;
    progress.best_now = pop.best_y;

    rec.best_trace.push_back(pop.best_y);
    rec.mean_trace.push_back(mean_fitness(pop));
    OptState state = extract_state(pop, progress, st.lower, st.upper);

    while (fes + static_cast<std::int64_t>(st.np) <= st.max_fes) {
        const int action = pick_action(state);
        const auto cfg = de::decode_action(action);
        const double prev_best = pop.best_y;

        Matrix donors = de::mutate(pop, cfg, rng);
        de::crossover_select(pop, donors, evaluate, rng, st.lower, st.upper, st.cr);
        fes += static_cast<std::int64_t>(st.np);

        const double r = dqn::reward(prev_best, pop.best_y, st.reward_literal);
        progress.stagnation_gens = pop.best_y < prev_best ? 0 : progress.stagnation_gens + 1;
        progress.fes = fes;
        progress.best_prev_gen = prev_best;
        progress.best_now = pop.best_y;

        const OptState next_state = extract_state(pop, progress, st.lower, st.upper);
        const bool terminal = fes + static_cast<std::int64_t>(st.np) > st.max_fes;

        rec.best_trace.push_back(pop.best_y);
        rec.mean_trace.push_back(mean_fitness(pop));
        rec.actions.push_back(action);
        on_step(state, action, r, next_state, terminal);
        state = next_state;
    }

    rec.final_best = pop.best_y;
    rec.consumed_fes = fes;
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

Evaluator make_true_evaluator(bbob::Problem& problem) {
    return [&problem](const Matrix& xs) { return kernels::batch_evaluate(problem, xs); };
}

Evaluator make_surrogate_evaluator(const TrainedSurrogate& model) {
    return [&model](const Matrix& xs) { return model.predict_batch(xs); };
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy learning stage

PlsResult run_pls(std::span<const bbob::ProblemSpec> problems,
                  std::span<const TrainedSurrogate> surrogates, const PlsConfig& cfg,
                  std::optional<dqn::Agent> resume_from) {
    if (problems.empty()) throw std::invalid_argument("run_pls: no problems");
    if (cfg.evaluator_mode == EvaluatorMode::surrogate && surrogates.size() != problems.size())
        throw std::invalid_argument("run_pls: surrogate list does not match problem list");
    if (cfg.max_fes < static_cast<std::int64_t>(cfg.population_size))
        throw std::invalid_argument("run_pls: max_fes below one population");
    if (cfg.log_every < 1) throw std::invalid_argument("run_pls: log_every must be >= 1");

    dqn::AgentConfig agent_cfg = cfg.agent;
    agent_cfg.max_learning_steps = cfg.max_learning_steps;

    PlsResult result{resume_from ? std::move(*resume_from)
                                 : dqn::Agent(agent_cfg, split_seed(cfg.seed, 0xa9e)),
                     {}, 0, 0, 0};
    dqn::Agent& agent = result.agent;
    dqn::ReplayBuffer buffer(agent.config().replay_capacity);

    Rng rng_env(split_seed(cfg.seed, 0xe0f));
    Rng rng_agent(split_seed(cfg.seed, 0xa77));

    // True problems exist in both modes; in surrogate mode they are never
    // evaluated and their counters prove it.
    std::vector<bbob::Problem> true_problems;
    true_problems.reserve(problems.size());
    for (const auto& spec : problems) true_problems.emplace_back(spec);

    EpisodeSettings st;
    st.np = cfg.population_size;
    st.max_fes = cfg.max_fes;
    st.cr = cfg.cr;
    st.reward_literal = cfg.reward_literal;

    double last_loss = 0.0;
    std::int64_t last_checkpoint = agent.learning_steps();
    bool done = false;
    while (!done && agent.learning_steps() < cfg.max_learning_steps) {
        for (std::size_t k = 0; k < problems.size(); ++k) {
            if (agent.learning_steps() >= cfg.max_learning_steps) {
                done = true;
                break;
            }
            st.dim = static_cast<std::size_t>(problems[k].dim);
            st.lower = problems[k].lower;
            st.upper = problems[k].upper;
            Evaluator evaluate = cfg.evaluator_mode == EvaluatorMode::surrogate
                                     ? make_surrogate_evaluator(surrogates[k])
                                     : make_true_evaluator(true_problems[k]);

            auto pick = [&](const OptState& s) { return agent.select_action(s, rng_agent, true); };
            auto on_step = [&](const OptState& s, int action, double reward, const OptState& s_next,
                               bool terminal) {
                dqn::Transition t;
                std::copy(s.s.begin(), s.s.end(), t.state.begin());
                t.action = action;
                t.reward = reward;
                std::copy(s_next.s.begin(), s_next.s.end(), t.next_state.begin());
                t.terminal = terminal;
                buffer.insert(t);

                if (buffer.size() >= agent.config().warmup)
                    last_loss = agent.update(buffer, rng_agent);
                agent.count_learning_step();
                if (agent.due_for_sync()) agent.sync_target();

                if (agent.learning_steps() % cfg.log_every == 0) {
                    double mean_q = 0.0;
                    const auto q = agent.q_values(s_next);
                    for (double v : q) mean_q += v;
                    mean_q /= static_cast<double>(q.size());
                    result.log.push_back(
                        {agent.learning_steps(), last_loss, agent.epsilon(), mean_q});
                }
            };

            drive_episode(evaluate, st, rng_env, pick, on_step);
            ++result.episodes;

            if (cfg.checkpoint_every > 0 && cfg.checkpoint_hook &&
                agent.learning_steps() - last_checkpoint >= cfg.checkpoint_every) {
                cfg.checkpoint_hook(agent);
                last_checkpoint = agent.learning_steps();
            }
        }
    }
    if (cfg.checkpoint_hook) cfg.checkpoint_hook(agent);

    for (const auto& problem : true_problems) result.true_fes += problem.counter().consumed;
    if (cfg.evaluator_mode == EvaluatorMode::surrogate && result.true_fes != 0)
        throw std::logic_error("run_pls: surrogate mode consumed true-function evaluations");
    result.learning_steps = agent.learning_steps();
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation protocol

RunRecord run_policy_once(dqn::Agent& agent, const bbob::ProblemSpec& spec, const EvalConfig& cfg,
                          std::uint64_t run_seed) {
    bbob::Problem problem(spec);
    problem.set_budget(cfg.max_fes);
    Rng rng(run_seed);
    Rng rng_action(split_seed(run_seed, 0x6cd));

    EpisodeSettings st;
    st.np = cfg.population_size;
    st.dim = static_cast<std::size_t>(spec.dim);
    st.max_fes = cfg.max_fes;
    st.cr = cfg.cr;
    st.lower = spec.lower;
    st.upper = spec.upper;

    auto evaluate = make_true_evaluator(problem);
    auto pick = [&](const OptState& s) { return agent.select_action(s, rng_action, false); };
    RunRecord rec = drive_episode(evaluate, st, rng, pick, [](auto&&...) {});
    rec.problem = bbob::function_name(spec.function);
    rec.method = "surr_rlde";
    rec.seed = run_seed;
    return rec;
}

RunRecord run_baseline(BaselineMethod method, const bbob::ProblemSpec& spec, const EvalConfig& cfg,
                       std::uint64_t run_seed) {
    bbob::Problem problem(spec);
    problem.set_budget(cfg.max_fes);
    Rng rng(run_seed);

    RunRecord rec;
    rec.problem = bbob::function_name(spec.function);
    rec.seed = run_seed;
    const auto t0 = std::chrono::steady_clock::now();

    if (method == BaselineMethod::random_search) {
        rec.method = "random_search";
        const std::size_t np = cfg.population_size;
        const std::size_t dim = static_cast<std::size_t>(spec.dim);
        double best = 0.0;
        bool first = true;
        std::int64_t fes = 0;
        Matrix batch(np, dim);
        while (fes + static_cast<std::int64_t>(np) <= cfg.max_fes) {
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < dim; ++j) batch(i, j) = rng.uniform(spec.lower, spec.upper);
            const auto ys = kernels::batch_evaluate(problem, batch);
            double mean = 0.0;
            for (double y : ys) {
                if (first || y < best) {
                    best = y;
                    first = false;
                }
                mean += y;
            }
            fes += static_cast<std::int64_t>(np);
            rec.best_trace.push_back(best);
            rec.mean_trace.push_back(mean / static_cast<double>(np));
        }
        rec.final_best = best;
        rec.consumed_fes = fes;
    } else {
        rec.method = "static_de";
        EpisodeSettings st;
        st.np = cfg.population_size;
        st.dim = static_cast<std::size_t>(spec.dim);
        st.max_fes = cfg.max_fes;
        st.cr = cfg.cr;
        st.lower = spec.lower;
        st.upper = spec.upper;
        auto evaluate = make_true_evaluator(problem);
        const int fixed_action = de::encode_action({de::MutationOp::rand1, 0.5});
        auto pick = [&](const OptState&) { return fixed_action; };
        RunRecord inner = drive_episode(evaluate, st, rng, pick, [](auto&&...) {});
        rec.best_trace = std::move(inner.best_trace);
        rec.mean_trace = std::move(inner.mean_trace);
        rec.actions = std::move(inner.actions);
        rec.final_best = inner.final_best;
        rec.consumed_fes = inner.consumed_fes;
    }
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

// Competition ranking (shared ranks on ties, 1 = best mean).
std::vector<int> rank_means(const std::vector<double>& means) {
    const std::size_t n = means.size();
    std::vector<int> ranks(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (means[j] < means[i]) ++ranks[i];
    return ranks;
}

}  // namespace

EvalTable evaluate_policy(dqn::Agent& agent, std::span<const bbob::ProblemSpec> problems,
                          const EvalConfig& cfg) {
    EvalTable table;
    table.methods.push_back("surr_rlde");
    if (cfg.include_baselines) {
        table.methods.push_back("random_search");
        table.methods.push_back("static_de");
    }
    const std::size_t n_methods = table.methods.size();
    const std::size_t n_problems = problems.size();
    const std::size_t n_runs = static_cast<std::size_t>(cfg.n_runs);

    std::vector<RunRecord> runs(n_problems * n_methods * n_runs);
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic) if (total > 1)
    for (std::ptrdiff_t u = 0; u < total; ++u) {
        const std::size_t p = static_cast<std::size_t>(u) / (n_methods * n_runs);
        const std::size_t m = static_cast<std::size_t>(u) / n_runs % n_methods;
        const std::size_t r = static_cast<std::size_t>(u) % n_runs;
        const std::uint64_t run_seed = split_seed(cfg.seed, 0x2000 + u);
        if (table.methods[m] == "surr_rlde")
            runs[static_cast<std::size_t>(u)] = run_policy_once(agent, problems[p], cfg, run_seed);
        else if (table.methods[m] == "random_search")
            runs[static_cast<std::size_t>(u)] =
                run_baseline(BaselineMethod::random_search, problems[p], cfg, run_seed);
        else
            runs[static_cast<std::size_t>(u)] =
                run_baseline(BaselineMethod::static_de, problems[p], cfg, run_seed);
        (void)r;
    }

    table.cells.assign(n_problems, std::vector<EvalCell>(n_methods));
    for (std::size_t p = 0; p < n_problems; ++p) {
        table.problems.push_back(bbob::function_name(problems[p].function));
        std::vector<double> means(n_methods, 0.0);
        for (std::size_t m = 0; m < n_methods; ++m) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n_runs; ++r)
                mean += runs[(p * n_methods + m) * n_runs + r].final_best;
            mean /= static_cast<double>(n_runs);
            double var = 0.0;
            for (std::size_t r = 0; r < n_runs; ++r) {
                const double d = runs[(p * n_methods + m) * n_runs + r].final_best - mean;
                var += d * d;
            }
            var /= static_cast<double>(n_runs);
            table.cells[p][m].mean = mean;
            table.cells[p][m].stddev = std::sqrt(var);
            means[m] = mean;
        }
        const auto ranks = rank_means(means);
        for (std::size_t m = 0; m < n_methods; ++m) table.cells[p][m].rank = ranks[m];
    }

    table.avg_rank.assign(n_methods, 0.0);
    for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t p = 0; p < n_problems; ++p)
            table.avg_rank[m] += static_cast<double>(table.cells[p][m].rank);
        table.avg_rank[m] /= static_cast<double>(n_problems);
    }
    table.runs = std::move(runs);
    return table;
}

void write_runs_jsonl(std::span<const RunRecord> runs, std::ostream& out) {
    for (const auto& run : runs) {
        nlohmann::json j;
        j["problem"] = run.problem;
        j["method"] = run.method;
        j["seed"] = run.seed;
        j["final_best"] = run.final_best;
        j["consumed_fes"] = run.consumed_fes;
        j["best_trace"] = run.best_trace;
        j["mean_trace"] = run.mean_trace;
        if (!run.actions.empty()) j["actions"] = run.actions;
        out << j.dump() << "\n";
    }
}

void write_table_csv(const EvalTable& table, std::ostream& out) {
    out << "problem,method,mean,std,rank\n";
    out.precision(17);
    for (std::size_t p = 0; p < table.problems.size(); ++p)
        for (std::size_t m = 0; m < table.methods.size(); ++m)
            out << table.problems[p] << "," << table.methods[m] << "," << table.cells[p][m].mean
                << "," << table.cells[p][m].stddev << "," << table.cells[p][m].rank << "\n";
    out << "# avg_rank";
    for (std::size_t m = 0; m < table.methods.size(); ++m)
        out << " " << table.methods[m] << "=" << table.avg_rank[m];
    out << "\n";
}

void write_curves_csv(const RunRecord& run, std::size_t population_size, std::ostream& out) {
    out << "fes,best_y\n";
    out.precision(17);
    for (std::size_t g = 0; g < run.best_trace.size(); ++g)
        out << (g + 1) * population_size << "," << run.best_trace[g] << "\n";
}

// ---------------------------------------------------------------------------
// Ablations

std::vector<ArchAblationRow> run_arch_ablation(std::span<const bbob::ProblemSpec> problems,
                                               const SlsRunConfig& cfg,
                                               std::span<const std::uint64_t> seeds) {
    struct Job {
        std::size_t problem;
        Arch arch;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < problems.size(); ++p)
        for (Arch arch : {Arch::kan, Arch::mlp, Arch::rbf})
            for (std::uint64_t seed : seeds) jobs.push_back({p, arch, seed});

    std::vector<ArchAblationRow> rows(jobs.size());
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic) if (total > 1)
    for (std::ptrdiff_t u = 0; u < total; ++u) {
        const Job& job = jobs[static_cast<std::size_t>(u)];
        SlsRunConfig local = cfg;
        local.arch = job.arch;
        bbob::Problem problem(problems[job.problem]);
        SampleSet data = build_dataset(problem, local.n_samples, job.seed);
        auto net = make_network(local, problem.dim(), &data, job.seed);
        auto model = train_surrogate(data, std::move(net), local.training, job.seed);

        ArchAblationRow row;
        row.problem = bbob::function_name(problems[job.problem].function);
        row.arch = job.arch;
        row.seed = job.seed;
        row.order_acc = model.final_order_acc;

        // holdout MSE in normalized target space
        Matrix xs(data.holdout_idx.size(), data.dim());
        std::vector<double> truth(data.holdout_idx.size());
        for (std::size_t r = 0; r < data.holdout_idx.size(); ++r) {
            for (std::size_t j = 0; j < data.dim(); ++j) xs(r, j) = data.xs(data.holdout_idx[r], j);
            truth[r] = data.y_norm.apply(data.ys[data.holdout_idx[r]]);
        }
        auto preds = model.predict_batch(xs);
        for (double& v : preds) v = data.y_norm.apply(v);
        row.mse = mse_loss(truth, preds).loss;
        rows[static_cast<std::size_t>(u)] = std::move(row);
    }
    return rows;
}

void export_landscape_grid(bbob::Problem& problem, const TrainedSurrogate& model,
                           std::size_t points_per_axis, std::ostream& out) {
    if (problem.dim() != 2) throw std::invalid_argument("export_landscape_grid: 2D problems only");
    out << "x1,x2,f_true,f_pred\n";
    out.precision(17);
    const double lo = problem.lower(), hi = problem.upper();
    const double step = (hi - lo) / static_cast<double>(points_per_axis - 1);
    std::vector<double> x(2);
    for (std::size_t a = 0; a < points_per_axis; ++a) {
        for (std::size_t b = 0; b < points_per_axis; ++b) {
            x[0] = lo + static_cast<double>(a) * step;
            x[1] = lo + static_cast<double>(b) * step;
            const double f_true = problem.evaluate_uncounted(x);
            const double f_pred = model.predict(x);
            out << x[0] << "," << x[1] << "," << f_true << "," << f_pred << "\n";
        }
    }
}

}  // namespace surrde::pipeline
