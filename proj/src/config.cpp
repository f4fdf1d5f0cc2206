#include "surrde/config.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace surrde {

namespace {

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    std::istringstream is(value);
    std::string cell;
    while (std::getline(is, cell, ',')) out.push_back(std::stoi(cell));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void RunConfig::apply_preset(const std::string& name) {
    if (name == "paper") {
        *this = RunConfig{};
        return;
    }
    if (name == "desk") {
        *this = RunConfig{};
        preset = "desk";
        problem_set = "desk3";
        dim = 2;
        n_samples = 2000;
        kan_hidden = {5};
        t_mse = 200;
        t_roa = 200;
        t_mix = 200;
        max_ls = 50000;
        max_fes = 2000;
        np = 20;
        lr_pls = 1e-3;
        runs = 10;
        return;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "global.seed") seed = std::stoull(value);
    else if (key == "global.preset_name") preset = value;  // informational; set by --preset
    else if (key == "global.workers") workers = std::stoi(value);
    else if (key == "global.out_dir") out_dir = value;
    else if (key == "problems.problem") problem = value;
    else if (key == "problems.problem_set") problem_set = value;
    else if (key == "problems.dim") dim = std::stoi(value);
    else if (key == "problems.ood") ood = value;
    else if (key == "sample.n_samples") n_samples = std::stoul(value);
    else if (key == "network.arch") arch = value;
    else if (key == "network.kan_hidden") kan_hidden = parse_int_list(value);
    else if (key == "network.grid") grid = std::stoi(value);
    else if (key == "network.spline_degree") spline_degree = std::stoi(value);
    else if (key == "network.mlp_hidden") mlp_hidden = parse_int_list(value);
    else if (key == "network.rbf_centers") rbf_centers = std::stoi(value);
    else if (key == "sls.batch_size") batch_size = std::stoul(value);
    else if (key == "sls.t_mse") t_mse = std::stoi(value);
    else if (key == "sls.t_roa") t_roa = std::stoi(value);
    else if (key == "sls.t_mix") t_mix = std::stoi(value);
    else if (key == "sls.lr") lr_sls = std::stod(value);
    else if (key == "sls.loss") loss = value;
    else if (key == "sls.optimizer") optimizer = value;
    else if (key == "pls.max_ls") max_ls = std::stoll(value);
    else if (key == "pls.max_fes") max_fes = std::stoll(value);
    else if (key == "pls.np") np = std::stoul(value);
    else if (key == "pls.cr") cr = std::stod(value);
    else if (key == "pls.gamma") gamma = std::stod(value);
    else if (key == "pls.lr") lr_pls = std::stod(value);
    else if (key == "pls.g_up") g_up = std::stoll(value);
    else if (key == "pls.replay_capacity") replay_capacity = std::stoul(value);
    else if (key == "pls.dqn_batch") dqn_batch = std::stoul(value);
    else if (key == "pls.warmup") warmup = std::stoul(value);
    else if (key == "pls.eps_start") eps_start = std::stod(value);
    else if (key == "pls.eps_final") eps_final = std::stod(value);
    else if (key == "pls.eps_anneal") eps_anneal = std::stod(value);
    else if (key == "pls.evaluator") evaluator = value;
    else if (key == "pls.target_mode") target_mode = value;
    else if (key == "pls.reward_literal") reward_literal = value == "1" || value == "true";
    else if (key == "eval.runs") runs = std::stoi(value);
    else throw std::invalid_argument("unknown config key: " + key);
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": key outside section");
        set(section + "." + key, value);
    }
}

void RunConfig::echo(std::ostream& out) const {
    out.precision(17);
    out << "# resolved configuration\n";
    out << "[global]\n";
    out << "preset_name=" << preset << "\n";
    out << "seed=" << seed << "\n";
    out << "workers=" << workers << "\n";
    out << "out_dir=" << out_dir << "\n";
    out << "[problems]\n";
    out << "problem=" << problem << "\n";
    out << "problem_set=" << problem_set << "\n";
    out << "dim=" << dim << "\n";
    out << "ood=" << ood << "\n";
    out << "[sample]\n";
    out << "n_samples=" << n_samples << "\n";
    out << "[network]\n";
    out << "arch=" << arch << "\n";
    out << "kan_hidden=" << join_ints(kan_hidden) << "\n";
    out << "grid=" << grid << "\n";
    out << "spline_degree=" << spline_degree << "\n";
    out << "mlp_hidden=" << join_ints(mlp_hidden) << "\n";
    out << "rbf_centers=" << rbf_centers << "\n";
    out << "[sls]\n";
    out << "batch_size=" << batch_size << "\n";
    out << "t_mse=" << t_mse << "\n";
    out << "t_roa=" << t_roa << "\n";
    out << "t_mix=" << t_mix << "\n";
    out << "lr=" << lr_sls << "\n";
    out << "loss=" << loss << "\n";
    out << "optimizer=" << optimizer << "\n";
    out << "[pls]\n";
    out << "max_ls=" << max_ls << "\n";
    out << "max_fes=" << max_fes << "\n";
    out << "np=" << np << "\n";
    out << "cr=" << cr << "\n";
    out << "gamma=" << gamma << "\n";
    out << "lr=" << lr_pls << "\n";
    out << "g_up=" << g_up << "\n";
    out << "replay_capacity=" << replay_capacity << "\n";
    out << "dqn_batch=" << dqn_batch << "\n";
    out << "warmup=" << warmup << "\n";
    out << "eps_start=" << eps_start << "\n";
    out << "eps_final=" << eps_final << "\n";
    out << "eps_anneal=" << eps_anneal << "\n";
    out << "evaluator=" << evaluator << "\n";
    out << "target_mode=" << target_mode << "\n";
    out << "reward_literal=" << (reward_literal ? 1 : 0) << "\n";
    out << "[eval]\n";
    out << "runs=" << runs << "\n";
}

std::vector<bbob::ProblemSpec> RunConfig::resolve_problem_set() const {
    auto [train, test] = bbob::make_split();
    std::vector<bbob::ProblemSpec> specs;
    if (problem_set == "train") {
        specs = std::move(train);
    } else if (problem_set == "test") {
        specs = std::move(test);
    } else if (problem_set == "desk3") {
        for (const char* name : {"Sphere", "Rastrigin", "Ellipsoidal"})
            specs.push_back(bbob::ProblemSpec{.function = bbob::function_from_name(name)});
    } else {
        std::istringstream is(problem_set);
        std::string name;
        while (std::getline(is, name, ','))
            specs.push_back(bbob::ProblemSpec{.function = bbob::function_from_name(trim(name))});
        if (specs.empty()) throw std::invalid_argument("empty problem_set");
    }
    for (auto& spec : specs) {
        spec.dim = dim;
        spec.seed = seed;
    }
    if (ood != "none") {
        const auto mode = ood == "30d" ? bbob::OodMode::plain_30d : bbob::OodMode::shift_rotate_10d;
        if (ood != "30d" && ood != "shift_rotate")
            throw std::invalid_argument("unknown ood mode: " + ood);
        for (auto& spec : specs) spec = bbob::apply_ood(spec, mode, split_seed(seed, 0x00d));
    }
    return specs;
}

bbob::ProblemSpec RunConfig::resolve_problem() const {
    bbob::ProblemSpec spec;
    spec.function = bbob::function_from_name(problem);
    spec.dim = dim;
    spec.seed = seed;
    return spec;
}

pipeline::SlsRunConfig RunConfig::sls_run_config() const {
    if (loss != "roa" && loss != "mse") throw std::invalid_argument("loss must be roa or mse");
    if (optimizer != "adam" && optimizer != "sgd")
        throw std::invalid_argument("optimizer must be adam or sgd");
    pipeline::SlsRunConfig cfg;
    cfg.n_samples = n_samples;
    cfg.training.batch_size = batch_size;
    cfg.training.t_mse = t_mse;
    cfg.training.t_roa = loss == "mse" ? 0 : t_roa;
    if (loss == "mse") cfg.training.t_mse = t_mse + t_roa;  // same epoch budget, MSE only
    cfg.training.t_mix = t_mix;
    cfg.training.lr = lr_sls;
    cfg.training.optimizer = optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
    cfg.arch = arch_from_name(arch);
    cfg.kan_hidden = kan_hidden;
    cfg.kan_grid = grid;
    cfg.kan_degree = spline_degree;
    cfg.mlp_hidden = mlp_hidden;
    cfg.rbf_centers = rbf_centers;
    return cfg;
}

pipeline::PlsConfig RunConfig::pls_config() const {
    if (evaluator != "surrogate" && evaluator != "true")
        throw std::invalid_argument("evaluator must be surrogate or true");
    if (target_mode != "double" && target_mode != "paper")
        throw std::invalid_argument("target_mode must be double or paper");
    pipeline::PlsConfig cfg;
    cfg.max_learning_steps = max_ls;
    cfg.max_fes = max_fes;
    cfg.population_size = np;
    cfg.cr = cr;
    cfg.evaluator_mode = evaluator == "true" ? pipeline::EvaluatorMode::true_function
                                             : pipeline::EvaluatorMode::surrogate;
    cfg.reward_literal = reward_literal;
    cfg.agent.gamma = gamma;
    cfg.agent.lr = lr_pls;
    cfg.agent.batch_size = dqn_batch;
    cfg.agent.replay_capacity = replay_capacity;
    cfg.agent.warmup = warmup;
    cfg.agent.target_sync_period = g_up;
    cfg.agent.target_mode =
        target_mode == "paper" ? dqn::TargetMode::paper : dqn::TargetMode::double_dqn;
    cfg.agent.eps_start = eps_start;
    cfg.agent.eps_final = eps_final;
    cfg.agent.eps_anneal_fraction = eps_anneal;
    cfg.agent.max_learning_steps = max_ls;
    cfg.seed = seed;
    return cfg;
}

pipeline::EvalConfig RunConfig::eval_config() const {
    pipeline::EvalConfig cfg;
    cfg.max_fes = max_fes;
    cfg.population_size = np;
    cfg.cr = cr;
    cfg.n_runs = runs;
    cfg.seed = seed;
    return cfg;
}

}  // namespace surrde
