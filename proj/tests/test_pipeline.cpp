#include <doctest.h>

#include <cmath>
#include <sstream>

#include "surrde/config.hpp"
#include "surrde/pipeline.hpp"

using namespace surrde;
using namespace surrde::pipeline;

namespace {

std::vector<bbob::ProblemSpec> tiny_problems() {
    std::vector<bbob::ProblemSpec> specs;
    for (auto id : {bbob::FunctionId::sphere, bbob::FunctionId::rastrigin}) {
        bbob::ProblemSpec s;
        s.function = id;
        s.dim = 2;
        specs.push_back(s);
    }
    return specs;
}

SlsRunConfig tiny_sls() {
    SlsRunConfig cfg;
    cfg.n_samples = 200;
    cfg.kan_hidden = {3};
    cfg.training.batch_size = 25;
    cfg.training.t_mse = 5;
    cfg.training.t_roa = 5;
    cfg.training.t_mix = 5;
    return cfg;
}

PlsConfig tiny_pls(std::int64_t max_ls) {
    PlsConfig cfg;
    cfg.max_learning_steps = max_ls;
    cfg.max_fes = 100;
    cfg.population_size = 10;
    cfg.agent.hidden = {8};
    cfg.agent.warmup = 8;
    cfg.agent.batch_size = 8;
    cfg.agent.replay_capacity = 1000;
    cfg.agent.target_sync_period = 20;
    cfg.seed = 5;
    return cfg;
}

std::vector<TrainedSurrogate> unwrap(SlsOutcome&& outcome) {
    std::vector<TrainedSurrogate> out;
    for (auto& opt : outcome.surrogates) {
        REQUIRE(opt.has_value());
        out.push_back(std::move(*opt));
    }
    return out;
}

}  // namespace

TEST_CASE("run_sls trains every problem and accounts evaluations exactly") {
    const auto specs = tiny_problems();
    const auto outcome = run_sls(specs, tiny_sls(), 7);
    REQUIRE(outcome.surrogates.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(outcome.errors[i].empty());
        REQUIRE(outcome.surrogates[i].has_value());
        CHECK(outcome.surrogates[i]->final_order_acc >= 0.0);
        CHECK(outcome.surrogates[i]->final_order_acc <= 1.0);
    }
    CHECK(outcome.total_true_fes == 2 * 200);
}

TEST_CASE("a diverging problem is reported while the rest continue") {
    const auto specs = tiny_problems();
    auto cfg = tiny_sls();
    cfg.training.lr = 1e18;  // blows up immediately
    cfg.training.optimizer = OptimizerKind::sgd;
    const auto outcome = run_sls(specs, cfg, 7);
    int failed = 0, trained = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        if (outcome.errors[i].empty() && outcome.surrogates[i].has_value())
            ++trained;
        else
            ++failed;
    }
    CHECK(failed == 2);  // both problems use the same broken config
    CHECK(trained == 0);
}

TEST_CASE("run_pls with zero budget returns an untouched agent") {
    const auto specs = tiny_problems();
    const auto surrogates = unwrap(run_sls(specs, tiny_sls(), 7));
    const auto result = run_pls(specs, surrogates, tiny_pls(0));
    CHECK(result.learning_steps == 0);
    CHECK(result.episodes == 0);
    CHECK(result.true_fes == 0);
}

TEST_CASE("surrogate-mode policy learning consumes zero true evaluations") {
    const auto specs = tiny_problems();
    const auto surrogates = unwrap(run_sls(specs, tiny_sls(), 7));
    const auto result = run_pls(specs, surrogates, tiny_pls(40));
    CHECK(result.true_fes == 0);
    CHECK(result.learning_steps >= 40);
    CHECK(result.episodes >= 1);
}

TEST_CASE("true-function mode consumes the announced budget per episode") {
    const auto specs = tiny_problems();
    auto cfg = tiny_pls(18);  // one 9-generation episode per problem
    cfg.evaluator_mode = EvaluatorMode::true_function;
    const auto result = run_pls(specs, {}, cfg);
    // each episode evaluates exactly max_fes points
    CHECK(result.true_fes == result.episodes * cfg.max_fes);
    CHECK(result.true_fes > 0);
}

TEST_CASE("policy evaluation runs have the exact generation count and budget") {
    const auto specs = tiny_problems();
    const auto surrogates = unwrap(run_sls(specs, tiny_sls(), 7));
    auto pls = tiny_pls(20);
    auto trained = run_pls(specs, surrogates, pls);

    EvalConfig cfg;
    cfg.max_fes = 100;
    cfg.population_size = 10;
    cfg.n_runs = 1;
    cfg.seed = 9;
    const auto rec = run_policy_once(trained.agent, specs[0], cfg, 123);
    CHECK(rec.consumed_fes == 100);
    CHECK(rec.best_trace.size() == 10);  // max_fes / np populations
    CHECK(rec.final_best == rec.best_trace.back());
    for (std::size_t g = 1; g < rec.best_trace.size(); ++g)
        CHECK(rec.best_trace[g] <= rec.best_trace[g - 1]);
}

TEST_CASE("baselines respect the budget and random search stays above zero on sphere") {
    bbob::ProblemSpec sphere;
    sphere.function = bbob::FunctionId::sphere;
    sphere.dim = 10;

    EvalConfig cfg;
    cfg.max_fes = 1000;
    cfg.population_size = 10;

    const auto rs = run_baseline(BaselineMethod::random_search, sphere, cfg, 1);
    CHECK(rs.consumed_fes == 1000);
    CHECK(rs.final_best > 0.0);

    const auto de_run = run_baseline(BaselineMethod::static_de, sphere, cfg, 1);
    CHECK(de_run.consumed_fes == 1000);
    for (int a : de_run.actions) CHECK(a == de::encode_action({de::MutationOp::rand1, 0.5}));
}

TEST_CASE("static de beats random search on sphere in at least 9 of 10 runs") {
    bbob::ProblemSpec sphere;
    sphere.function = bbob::FunctionId::sphere;
    sphere.dim = 5;

    EvalConfig cfg;
    cfg.max_fes = 1000;
    cfg.population_size = 10;

    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto rs = run_baseline(BaselineMethod::random_search, sphere, cfg, seed);
        const auto de_run = run_baseline(BaselineMethod::static_de, sphere, cfg, seed + 100);
        if (de_run.final_best < rs.final_best) ++wins;
    }
    CHECK(wins >= 9);
}

TEST_CASE("baseline runs are deterministic given the seed") {
    bbob::ProblemSpec rastrigin;
    rastrigin.function = bbob::FunctionId::rastrigin;
    rastrigin.dim = 3;
    EvalConfig cfg;
    cfg.max_fes = 200;
    cfg.population_size = 10;

    const auto a = run_baseline(BaselineMethod::static_de, rastrigin, cfg, 77);
    const auto b = run_baseline(BaselineMethod::static_de, rastrigin, cfg, 77);
    CHECK(a.best_trace == b.best_trace);
    CHECK(a.final_best == b.final_best);
}

TEST_CASE("evaluate_policy builds a ranked table reproducibly") {
    const auto specs = tiny_problems();
    const auto surrogates = unwrap(run_sls(specs, tiny_sls(), 7));
    auto trained = run_pls(specs, surrogates, tiny_pls(30));

    EvalConfig cfg;
    cfg.max_fes = 100;
    cfg.population_size = 10;
    cfg.n_runs = 3;
    cfg.seed = 31;

    const auto table = evaluate_policy(trained.agent, specs, cfg);
    REQUIRE(table.methods.size() == 3);
    REQUIRE(table.problems.size() == 2);
    CHECK(table.runs.size() == 2 * 3 * 3);
    for (const auto& row : table.cells) {
        std::vector<int> ranks;
        for (const auto& cell : row) ranks.push_back(cell.rank);
        CHECK(*std::min_element(ranks.begin(), ranks.end()) == 1);
    }

    const auto again = evaluate_policy(trained.agent, specs, cfg);
    for (std::size_t p = 0; p < table.problems.size(); ++p)
        for (std::size_t m = 0; m < table.methods.size(); ++m) {
            CHECK(table.cells[p][m].mean == again.cells[p][m].mean);
            CHECK(table.cells[p][m].stddev == again.cells[p][m].stddev);
            CHECK(table.cells[p][m].rank == again.cells[p][m].rank);
        }

    SUBCASE("single-run std is zero") {
        EvalConfig one = cfg;
        one.n_runs = 1;
        one.include_baselines = false;
        const auto t = evaluate_policy(trained.agent, specs, one);
        for (const auto& row : t.cells) CHECK(row[0].stddev == 0.0);
    }
}

TEST_CASE("run log writers produce the documented shapes") {
    bbob::ProblemSpec sphere;
    sphere.function = bbob::FunctionId::sphere;
    sphere.dim = 2;
    EvalConfig cfg;
    cfg.max_fes = 100;
    cfg.population_size = 10;
    const auto rec = run_baseline(BaselineMethod::static_de, sphere, cfg, 3);

    std::ostringstream jsonl;
    write_runs_jsonl(std::vector<RunRecord>{rec}, jsonl);
    const std::string jsonl_text = jsonl.str();
    CHECK(std::count(jsonl_text.begin(), jsonl_text.end(), '\n') == 1);

    std::ostringstream curves;
    write_curves_csv(rec, cfg.population_size, curves);
    const std::string curves_text = curves.str();
    CHECK(std::count(curves_text.begin(), curves_text.end(), '\n') ==
          1 + static_cast<long>(rec.best_trace.size()));
}

TEST_CASE("architecture ablation emits one row per problem, arch and seed") {
    const auto specs = tiny_problems();
    auto cfg = tiny_sls();
    cfg.rbf_centers = 16;
    const std::vector<std::uint64_t> seeds{1, 2};
    const auto rows = run_arch_ablation(specs, cfg, seeds);
    CHECK(rows.size() == 2 * 3 * 2);
    for (const auto& row : rows) {
        CHECK(row.order_acc >= 0.0);
        CHECK(row.order_acc <= 1.0);
        CHECK(row.mse >= 0.0);
    }
}

TEST_CASE("landscape export writes the full grid for 2D problems only") {
    bbob::ProblemSpec sphere;
    sphere.function = bbob::FunctionId::sphere;
    sphere.dim = 2;
    bbob::Problem problem(sphere);

    const auto outcome = run_sls(std::vector<bbob::ProblemSpec>{sphere}, tiny_sls(), 7);
    REQUIRE(outcome.surrogates[0].has_value());

    std::ostringstream out;
    export_landscape_grid(problem, *outcome.surrogates[0], 11, out);
    const std::string grid_text = out.str();
    CHECK(std::count(grid_text.begin(), grid_text.end(), '\n') == 1 + 11 * 11);

    bbob::ProblemSpec sphere3 = sphere;
    sphere3.dim = 3;
    bbob::Problem p3(sphere3);
    CHECK_THROWS(export_landscape_grid(p3, *outcome.surrogates[0], 5, out));
}
