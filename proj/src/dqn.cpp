#include "surrde/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "surrde/kernels.hpp"

namespace surrde::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
    storage_.resize(capacity);
}

void ReplayBuffer::insert(const Transition& t) {
    storage_[head_] = t;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: empty buffer");
    return storage_[static_cast<std::size_t>(rng.randint(size_))];
}

double reward(double best_prev, double best_new, bool literal) {
    if (literal) return best_new <= best_prev ? 0.0 : 1.0;
    return best_new < best_prev ? 1.0 : 0.0;
}

int argmax_action(std::span<const double> q) {
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a)
        if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
    return best;
}

namespace {

std::vector<int> full_dims(const AgentConfig& cfg) {
    std::vector<int> dims;
    dims.push_back(kStateDim);
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(kNumActions);
    return dims;
}

}  // namespace

Agent::Agent(const AgentConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    Rng rng(split_seed(seed, 0xd62));
    prediction_ = std::make_unique<MlpNetwork>(full_dims(cfg_), rng);
    target_ = std::make_unique<MlpNetwork>(*prediction_);
    adam_ = AdamState(prediction_->num_params());
}

double Agent::epsilon() const {
    const double anneal_steps =
        cfg_.eps_anneal_fraction * static_cast<double>(cfg_.max_learning_steps);
    if (anneal_steps <= 0.0) return cfg_.eps_final;
    const double t = std::min(1.0, static_cast<double>(learning_steps_) / anneal_steps);
    return cfg_.eps_start + t * (cfg_.eps_final - cfg_.eps_start);
}

std::vector<double> Agent::q_values(const OptState& state) const {
    std::vector<double> q(kNumActions);
    Tape tape;
    prediction_->forward(state.view(), tape, q);
    return q;
}

std::vector<double> Agent::q_values_target(const OptState& state) const {
    std::vector<double> q(kNumActions);
    Tape tape;
    target_->forward(state.view(), tape, q);
    return q;
}

int Agent::select_action(const OptState& state, Rng& rng, bool training) {
    if (training && rng.uniform() < epsilon())
        return static_cast<int>(rng.randint(kNumActions));
    return argmax_action(q_values(state));
}

double Agent::update(const ReplayBuffer& buffer, Rng& rng) {
    if (buffer.size() < cfg_.warmup)
        throw std::logic_error("Agent::update: buffer below warmup threshold");

    const std::size_t batch = cfg_.batch_size;
    Matrix states(batch, kStateDim);
    Matrix dy(batch, kNumActions);
    std::vector<double> q(kNumActions), q_next(kNumActions), q_next_pred(kNumActions);
    Tape tape;

    // Per-sample forwards feed the upstream gradient matrix; the parameter
    // gradient itself is accumulated by the blocked kernel below.
    std::vector<double> grad(prediction_->num_params(), 0.0);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const Transition& t = buffer.sample(rng);
        for (int j = 0; j < kStateDim; ++j)
            states(b, static_cast<std::size_t>(j)) = t.state[static_cast<std::size_t>(j)];

        double target = t.reward;
        if (!t.terminal) {
            target_->forward(t.next_state, tape, q_next);
            if (cfg_.target_mode == TargetMode::paper) {
                target += cfg_.gamma * q_next[static_cast<std::size_t>(argmax_action(q_next))];
            } else {
                prediction_->forward(t.next_state, tape, q_next_pred);
                target += cfg_.gamma * q_next[static_cast<std::size_t>(argmax_action(q_next_pred))];
            }
        }

        prediction_->forward(t.state, tape, q);
        const double err = q[static_cast<std::size_t>(t.action)] - target;
        loss += 0.5 * err * err;
        for (int a = 0; a < kNumActions; ++a) dy(b, static_cast<std::size_t>(a)) = 0.0;
        dy(b, static_cast<std::size_t>(t.action)) = err / static_cast<double>(batch);
    }
    loss /= static_cast<double>(batch);
    if (!std::isfinite(loss)) throw std::runtime_error("Agent::update: non-finite loss");

    kernels::accumulate_gradients(*prediction_, states, dy, grad);
    adam_step(prediction_->params(), grad, adam_, cfg_.lr);
    return loss;
}

void Agent::sync_target() { target_ = std::make_unique<MlpNetwork>(*prediction_); }

void Agent::save(std::ostream& out) const {
    out << "surrde-agent v1\n";
    out.precision(17);
    out << "gamma " << cfg_.gamma << "\n";
    out << "lr " << cfg_.lr << "\n";
    out << "batch_size " << cfg_.batch_size << "\n";
    out << "replay_capacity " << cfg_.replay_capacity << "\n";
    out << "warmup " << cfg_.warmup << "\n";
    out << "target_sync_period " << cfg_.target_sync_period << "\n";
    out << "target_mode " << (cfg_.target_mode == TargetMode::paper ? "paper" : "double") << "\n";
    out << "eps " << cfg_.eps_start << " " << cfg_.eps_final << " " << cfg_.eps_anneal_fraction
        << "\n";
    out << "max_learning_steps " << cfg_.max_learning_steps << "\n";
    out << "learning_steps " << learning_steps_ << "\n";
    save_network(*prediction_, out);
    save_network(*target_, out);
}

Agent Agent::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "surrde-agent v1")
        throw std::runtime_error("bad agent checkpoint header");

    AgentConfig cfg;
    std::int64_t steps = 0;
    auto expect = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0)
            throw std::runtime_error("bad agent checkpoint field: " + key);
        return std::istringstream(line.substr(key.size() + 1));
    };
    expect("gamma") >> cfg.gamma;
    expect("lr") >> cfg.lr;
    expect("batch_size") >> cfg.batch_size;
    expect("replay_capacity") >> cfg.replay_capacity;
    expect("warmup") >> cfg.warmup;
    expect("target_sync_period") >> cfg.target_sync_period;
    {
        std::string mode;
        expect("target_mode") >> mode;
        cfg.target_mode = mode == "paper" ? TargetMode::paper : TargetMode::double_dqn;
    }
    {
        auto is = expect("eps");
        is >> cfg.eps_start >> cfg.eps_final >> cfg.eps_anneal_fraction;
    }
    expect("max_learning_steps") >> cfg.max_learning_steps;
    expect("learning_steps") >> steps;

    auto pred = load_network(in);
    auto targ = load_network(in);
    auto* pred_mlp = dynamic_cast<MlpNetwork*>(pred.get());
    auto* targ_mlp = dynamic_cast<MlpNetwork*>(targ.get());
    if (!pred_mlp || !targ_mlp) throw std::runtime_error("agent checkpoint: bad network type");

    const auto& dims = pred_mlp->dims();
    cfg.hidden.assign(dims.begin() + 1, dims.end() - 1);

    Agent agent(cfg, 0);
    std::copy(pred_mlp->params().begin(), pred_mlp->params().end(),
              agent.prediction_->params().begin());
    std::copy(targ_mlp->params().begin(), targ_mlp->params().end(),
              agent.target_->params().begin());
    agent.adam_ = AdamState(agent.prediction_->num_params());
    agent.learning_steps_ = steps;
    return agent;
}

}  // namespace surrde::dqn
