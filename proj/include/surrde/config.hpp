#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "surrde/bbob.hpp"
#include "surrde/pipeline.hpp"

namespace surrde {

// Fully resolved run configuration. Defaults are the paper-scale settings;
// the desk preset shrinks everything to laptop scale. Resolution order:
// preset -> config file -> command-line flags.
struct RunConfig {
    // global
    std::string preset = "paper";
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = "runs";

    // problems
    std::string problem = "Sphere";       // single-problem commands
    std::string problem_set = "train";    // train | test | desk3 | comma-separated names
    int dim = 10;
    std::string ood = "none";             // none | shift_rotate | 30d

    // sampling
    std::size_t n_samples = 50000;

    // networks
    std::string arch = "kan";
    std::vector<int> kan_hidden = {10};
    int grid = 5;
    int spline_degree = 5;
    std::vector<int> mlp_hidden = {64, 64};
    int rbf_centers = 64;

    // surrogate training
    std::size_t batch_size = 100;
    int t_mse = 300;
    int t_roa = 1000;
    int t_mix = 1000;
    double lr_sls = 0.01;
    std::string loss = "roa";  // roa | mse
    std::string optimizer = "adam";

    // policy training
    std::int64_t max_ls = 1500000;
    std::int64_t max_fes = 20000;
    std::size_t np = 100;
    double cr = 0.7;
    double gamma = 0.99;
    double lr_pls = 1e-4;
    std::int64_t g_up = 1000;
    std::size_t replay_capacity = 100000;
    std::size_t dqn_batch = 64;
    std::size_t warmup = 1000;
    double eps_start = 1.0;
    double eps_final = 0.05;
    double eps_anneal = 0.2;
    std::string evaluator = "surrogate";  // surrogate | true
    std::string target_mode = "double";   // double | paper
    bool reward_literal = false;

    // evaluation
    int runs = 51;

    void apply_preset(const std::string& name);
    // key=value lines grouped in [sections]; unknown keys are rejected.
    void apply_file(const std::string& path);
    void set(const std::string& key, const std::string& value);

    void echo(std::ostream& out) const;

    std::vector<bbob::ProblemSpec> resolve_problem_set() const;
    bbob::ProblemSpec resolve_problem() const;

    pipeline::SlsRunConfig sls_run_config() const;
    pipeline::PlsConfig pls_config() const;
    pipeline::EvalConfig eval_config() const;
};

}  // namespace surrde
