// surrde: surrogate-assisted RL-configured differential evolution toolkit.
//
// Subcommands: sample, train-surrogate, train-policy, evaluate, ablate.
// Every run echoes its fully resolved configuration into the output
// directory before doing any work.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "surrde/config.hpp"
#include "surrde/parallel.hpp"
#include "surrde/pipeline.hpp"

namespace fs = std::filesystem;
using namespace surrde;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    bool overwrite = false;
    bool resume = false;
};

// Registers the shared flags on a subcommand; returns setters that apply
// flag overrides after preset/file resolution.
void add_common(CLI::App* cmd, CommonArgs& common, RunConfig& cfg,
                std::vector<std::function<void()>>& overrides) {
    cmd->add_option("--config", common.config_path, "config file (key=value sections)");
    cmd->add_option("--preset", common.preset, "preset: paper or desk");
    cmd->add_flag("--overwrite", common.overwrite, "allow overwriting existing outputs");
    cmd->add_flag("--resume", common.resume, "continue train-policy from its last checkpoint");

    // Flags are applied after preset/file resolution, so they win; each
    // option records a deferred assignment into the config field.
    auto bind = [&overrides, cmd](const char* flag, auto& field, const char* help) {
        auto* opt = cmd->add_option(flag)->description(help);
        overrides.push_back([opt, &field]() {
            if (opt->count()) opt->results(field);
        });
    };

    bind("--seed", cfg.seed, "global seed; stage seeds derive from it");
    bind("--workers", cfg.workers, "worker threads for parallel sections");
    bind("--out", cfg.out_dir, "output directory");
    bind("--problem", cfg.problem, "single problem name");
    bind("--problem-set", cfg.problem_set, "train | test | desk3 | comma-separated names");
    bind("--dim", cfg.dim, "problem dimension");
    bind("--ood", cfg.ood, "none | shift_rotate | 30d");
    bind("--n", cfg.n_samples, "LHS sample count");
    bind("--arch", cfg.arch, "kan | mlp | rbf");
    bind("--grid", cfg.grid, "KAN grid intervals");
    bind("--spline-degree", cfg.spline_degree, "KAN spline degree");
    bind("--rbf-centers", cfg.rbf_centers, "RBF center count");
    bind("--batch-size", cfg.batch_size, "SLS minibatch size");
    bind("--t-mse", cfg.t_mse, "MSE pre-training epochs");
    bind("--t-roa", cfg.t_roa, "ROA training epochs");
    bind("--t-mix", cfg.t_mix, "lambda decay horizon");
    bind("--lr-sls", cfg.lr_sls, "surrogate learning rate");
    bind("--loss", cfg.loss, "roa | mse");
    bind("--optimizer", cfg.optimizer, "adam | sgd");
    bind("--max-ls", cfg.max_ls, "maximum learning steps");
    bind("--max-fes", cfg.max_fes, "function evaluation budget per run");
    bind("--np", cfg.np, "DE population size");
    bind("--cr", cfg.cr, "DE crossover rate");
    bind("--gamma", cfg.gamma, "discount factor");
    bind("--lr-pls", cfg.lr_pls, "policy learning rate");
    bind("--g-up", cfg.g_up, "target sync period");
    bind("--evaluator", cfg.evaluator, "surrogate | true");
    bind("--target-mode", cfg.target_mode, "double | paper");
    bind("--runs", cfg.runs, "independent evaluation runs");
}

RunConfig resolve_config(const CommonArgs& common, RunConfig& cfg,
                         const std::vector<std::function<void()>>& overrides) {
    if (!common.preset.empty()) cfg.apply_preset(common.preset);
    if (!common.config_path.empty()) cfg.apply_file(common.config_path);
    for (const auto& apply : overrides) apply();
    return cfg;
}

void prepare_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::ofstream echo(fs::path(cfg.out_dir) / "config.resolved.txt");
    cfg.echo(echo);
    set_num_threads(cfg.workers);
}

void require_fresh(const fs::path& path, bool overwrite) {
    if (!overwrite && fs::exists(path))
        throw std::runtime_error(path.string() + " exists; pass --overwrite to replace it");
}

std::string surrogate_path(const RunConfig& cfg, const std::string& problem_name) {
    return (fs::path(cfg.out_dir) / ("surrogate_" + problem_name + ".ckpt")).string();
}

int cmd_sample(const RunConfig& cfg, bool overwrite) {
    prepare_out_dir(cfg);
    auto spec = cfg.resolve_problem();
    bbob::Problem problem(spec);
    const fs::path path = fs::path(cfg.out_dir) /
                          ("dataset_" + bbob::function_name(spec.function) + ".csv");
    require_fresh(path, overwrite);
    const auto set = build_dataset(problem, cfg.n_samples, split_seed(cfg.seed, 0x5a));
    save_sample_set(set, path.string());
    std::cout << "wrote " << path.string() << " (" << set.size() << " samples, "
              << problem.counter().consumed << " evaluations)\n";
    return 0;
}

int cmd_train_surrogate(const RunConfig& cfg, bool overwrite) {
    prepare_out_dir(cfg);
    std::vector<bbob::ProblemSpec> specs;
    if (!cfg.problem.empty() && cfg.problem_set == "single")
        specs.push_back(cfg.resolve_problem());
    else
        specs = cfg.resolve_problem_set();

    const auto outcome = pipeline::run_sls(specs, cfg.sls_run_config(), cfg.seed);
    int failures = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto name = bbob::function_name(specs[i].function);
        if (!outcome.errors[i].empty()) {
            ++failures;
            std::cerr << name << ": FAILED: " << outcome.errors[i] << "\n";
            continue;
        }
        const auto& model = *outcome.surrogates[i];
        const auto ckpt = surrogate_path(cfg, name);
        require_fresh(ckpt, overwrite);
        save_surrogate(model, ckpt);
        std::ofstream curve(fs::path(cfg.out_dir) / ("curve_" + name + ".csv"));
        write_history_csv(model, curve);
        std::cout << name << ": order_acc=" << model.final_order_acc
                  << " mse=" << model.final_mse << " -> " << ckpt << "\n";
    }
    std::cout << "total true evaluations: " << outcome.total_true_fes << "\n";
    return failures == 0 ? 0 : 1;
}

std::vector<TrainedSurrogate> load_surrogates_for(const RunConfig& cfg,
                                                  std::span<const bbob::ProblemSpec> specs) {
    std::vector<TrainedSurrogate> surrogates;
    for (const auto& spec : specs) {
        const auto name = bbob::function_name(spec.function);
        const auto path = surrogate_path(cfg, name);
        if (!fs::exists(path))
            throw std::runtime_error("missing surrogate checkpoint: " + path +
                                     " (run train-surrogate first)");
        surrogates.push_back(load_surrogate(path));
    }
    return surrogates;
}

int cmd_train_policy(const RunConfig& cfg, bool overwrite, bool resume) {
    prepare_out_dir(cfg);
    const auto specs = cfg.resolve_problem_set();
    auto pls_cfg = cfg.pls_config();

    std::vector<TrainedSurrogate> surrogates;
    if (pls_cfg.evaluator_mode == pipeline::EvaluatorMode::surrogate)
        surrogates = load_surrogates_for(cfg, specs);

    const fs::path agent_path = fs::path(cfg.out_dir) / "agent.ckpt";
    std::optional<dqn::Agent> resume_from;
    if (resume && fs::exists(agent_path)) {
        std::ifstream in(agent_path);
        resume_from.emplace(dqn::Agent::load(in));
        std::cout << "resuming from " << agent_path.string() << " at step "
                  << resume_from->learning_steps() << "\n";
    } else {
        require_fresh(agent_path, overwrite);
    }

    pls_cfg.checkpoint_every = 5000;
    pls_cfg.checkpoint_hook = [&agent_path](const dqn::Agent& agent) {
        std::ofstream out(agent_path);
        agent.save(out);
    };

    auto result = pipeline::run_pls(specs, surrogates, pls_cfg, std::move(resume_from));

    std::ofstream log(fs::path(cfg.out_dir) / "pls_log.csv", resume ? std::ios::app : std::ios::out);
    if (!resume) log << "learning_step,loss,eps,mean_q\n";
    log.precision(17);
    for (const auto& row : result.log)
        log << row.step << "," << row.loss << "," << row.eps << "," << row.mean_q << "\n";

    std::cout << "trained " << result.learning_steps << " steps over " << result.episodes
              << " episodes; true evaluations consumed: " << result.true_fes << "\n";
    std::cout << "agent -> " << agent_path.string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, bool overwrite) {
    prepare_out_dir(cfg);
    const auto specs = cfg.resolve_problem_set();

    const fs::path agent_path = fs::path(cfg.out_dir) / "agent.ckpt";
    std::ifstream agent_in(agent_path);
    if (!agent_in) throw std::runtime_error("missing agent checkpoint: " + agent_path.string());
    auto agent = dqn::Agent::load(agent_in);

    const auto table = pipeline::evaluate_policy(agent, specs, cfg.eval_config());

    const fs::path table_path = fs::path(cfg.out_dir) / "evaluation.csv";
    require_fresh(table_path, overwrite);
    std::ofstream table_out(table_path);
    pipeline::write_table_csv(table, table_out);

    std::ofstream runs_out(fs::path(cfg.out_dir) / "runs.jsonl");
    pipeline::write_runs_jsonl(table.runs, runs_out);

    fs::create_directories(fs::path(cfg.out_dir) / "curves");
    for (const auto& run : table.runs) {
        std::ofstream curve(fs::path(cfg.out_dir) / "curves" /
                            (run.problem + "_" + run.method + "_" + std::to_string(run.seed) +
                             ".csv"));
        pipeline::write_curves_csv(run, cfg.np, curve);
    }

    pipeline::write_table_csv(table, std::cout);
    return 0;
}

int cmd_ablate(const RunConfig& cfg, bool /*overwrite*/) {
    prepare_out_dir(cfg);
    const auto specs = cfg.resolve_problem_set();
    auto sls_cfg = cfg.sls_run_config();

    // (a) architecture comparison with per-problem rank summary
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 5; ++s) seeds.push_back(split_seed(cfg.seed, 0x3000 + s));
    const auto rows = pipeline::run_arch_ablation(specs, sls_cfg, seeds);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "arch_ablation.csv");
        out << "problem,arch,seed,mse,order_acc\n";
        out.precision(17);
        for (const auto& row : rows)
            out << row.problem << "," << arch_name(row.arch) << "," << row.seed << "," << row.mse
                << "," << row.order_acc << "\n";
    }
    {
        // mean rank of each architecture across problems, by both metrics
        double rank_mse[3] = {0, 0, 0}, rank_acc[3] = {0, 0, 0};
        std::size_t groups = 0;
        for (const auto& spec : specs) {
            const auto problem_name = bbob::function_name(spec.function);
            double mse[3] = {0, 0, 0}, acc[3] = {0, 0, 0};
            for (const auto& row : rows) {
                if (row.problem != problem_name) continue;
                mse[static_cast<int>(row.arch)] += row.mse;
                acc[static_cast<int>(row.arch)] += row.order_acc;
            }
            ++groups;
            for (int a = 0; a < 3; ++a) {
                int rm = 1, ra = 1;
                for (int b = 0; b < 3; ++b) {
                    if (mse[b] < mse[a]) ++rm;        // lower MSE is better
                    if (acc[b] > acc[a]) ++ra;        // higher accuracy is better
                }
                rank_mse[a] += rm;
                rank_acc[a] += ra;
            }
        }
        std::cout << "arch ablation (" << rows.size() << " rows), mean ranks:\n";
        for (int a = 0; a < 3; ++a)
            std::cout << "  " << arch_name(static_cast<Arch>(a))
                      << ": mse_rank=" << rank_mse[a] / static_cast<double>(groups)
                      << " order_acc_rank=" << rank_acc[a] / static_cast<double>(groups) << "\n";
    }

    // (b) loss ablation: ROA vs MSE-only surrogates, a policy trained on each,
    // both evaluated on the true functions
    {
        auto eval_cfg = cfg.eval_config();
        eval_cfg.include_baselines = false;
        std::ofstream out(fs::path(cfg.out_dir) / "loss_ablation.csv");
        out << "variant,problem,mean,std\n";
        out.precision(17);
        for (const bool mse_only : {false, true}) {
            auto local = sls_cfg;
            local.arch = Arch::kan;
            if (mse_only) {
                local.training.t_mse += local.training.t_roa;
                local.training.t_roa = 0;
            }
            const auto sls = pipeline::run_sls(specs, local, cfg.seed);
            std::vector<TrainedSurrogate> surrogates;
            for (std::size_t i = 0; i < specs.size(); ++i) {
                if (!sls.surrogates[i].has_value())
                    throw std::runtime_error("loss ablation surrogate failed: " + sls.errors[i]);
                surrogates.push_back(sls.surrogates[i]->clone());
            }
            auto result = pipeline::run_pls(specs, surrogates, cfg.pls_config());
            const auto table = pipeline::evaluate_policy(result.agent, specs, eval_cfg);
            const char* variant = mse_only ? "mse" : "roa";
            for (std::size_t p = 0; p < table.problems.size(); ++p)
                out << variant << "," << table.problems[p] << "," << table.cells[p][0].mean << ","
                    << table.cells[p][0].stddev << "\n";
            std::cout << "loss ablation " << variant << ": policy trained and evaluated\n";
        }
    }

    // (c) landscape grids for the two 2D showcase problems, MSE-only vs ROA,
    // at the fixed 10^4 sample size
    for (const char* name : {"Rosenbrock_original", "Schwefel"}) {
        bbob::ProblemSpec spec;
        spec.function = bbob::function_from_name(name);
        spec.dim = 2;
        spec.seed = cfg.seed;

        for (const bool mse_only : {false, true}) {
            auto local = sls_cfg;
            local.arch = Arch::kan;
            local.n_samples = 10000;
            if (mse_only) {
                local.training.t_mse += local.training.t_roa;
                local.training.t_roa = 0;
            }
            bbob::Problem problem(spec);
            auto data = build_dataset(problem, local.n_samples, split_seed(cfg.seed, 0x4000));
            auto net = pipeline::make_network(local, 2, &data, split_seed(cfg.seed, 0x4001));
            auto model = train_surrogate(data, std::move(net), local.training,
                                         split_seed(cfg.seed, 0x4002));
            std::ofstream grid(fs::path(cfg.out_dir) /
                               ("landscape_" + std::string(name) + (mse_only ? "_mse" : "_roa") +
                                ".csv"));
            pipeline::export_landscape_grid(problem, model, 101, grid);
            std::cout << "landscape " << name << (mse_only ? " mse" : " roa")
                      << ": order_acc=" << model.final_order_acc << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surrogate-assisted RL-configured differential evolution"};
    app.require_subcommand(1);

    RunConfig cfg;
    CommonArgs common;
    std::vector<std::function<void()>> overrides;

    auto* sample = app.add_subcommand("sample", "build an LHS dataset for one problem");
    auto* train_surrogate = app.add_subcommand("train-surrogate", "train surrogates (SLS)");
    auto* train_policy = app.add_subcommand("train-policy", "train the DQN meta-policy (PLS)");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate the trained policy and baselines");
    auto* ablate = app.add_subcommand("ablate", "architecture and loss ablations");
    for (auto* cmd : {sample, train_surrogate, train_policy, evaluate, ablate})
        add_common(cmd, common, cfg, overrides);

    CLI11_PARSE(app, argc, argv);

    try {
        resolve_config(common, cfg, overrides);
        if (sample->parsed()) return cmd_sample(cfg, common.overwrite);
        if (train_surrogate->parsed()) return cmd_train_surrogate(cfg, common.overwrite);
        if (train_policy->parsed()) return cmd_train_policy(cfg, common.overwrite, common.resume);
        if (evaluate->parsed()) return cmd_evaluate(cfg, common.overwrite);
        if (ablate->parsed()) return cmd_ablate(cfg, common.overwrite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
