#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "surrde/dqn.hpp"

using namespace surrde;
using namespace surrde::dqn;

namespace {

Transition make_transition(double fill, int action, double r, bool terminal = false) {
    Transition t;
    t.state.fill(fill);
    t.next_state.fill(fill + 0.1);
    t.action = action;
    t.reward = r;
    t.terminal = terminal;
    return t;
}

OptState state_filled(double v) {
    OptState s;
    s.s.fill(v);
    return s;
}

// Scalar re-implementation of the ReLU MLP forward pass, reading the weight
// blocks straight out of the flat parameter vector.
std::vector<double> mlp_oracle(const MlpNetwork& net, std::span<const double> x) {
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const auto view = net.layer_view(l);
        std::vector<double> next(static_cast<std::size_t>(view.out), 0.0);
        for (int j = 0; j < view.out; ++j) {
            double z = net.params()[view.bias + static_cast<std::size_t>(j)];
            for (int i = 0; i < view.in; ++i)
                z += net.params()[view.weights + static_cast<std::size_t>(j) * view.in +
                                  static_cast<std::size_t>(i)] *
                     cur[static_cast<std::size_t>(i)];
            const bool last = l + 1 == net.num_layers();
            next[static_cast<std::size_t>(j)] = last ? z : std::max(0.0, z);
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

TEST_CASE("replay buffer evicts oldest entries exactly") {
    ReplayBuffer buffer(3);
    for (int i = 0; i < 5; ++i) buffer.insert(make_transition(0.0, i, 0.0));
    CHECK(buffer.size() == 3);
    // slots now hold actions 3, 4, 2 -> oldest surviving are 2, 3, 4
    std::vector<int> actions;
    for (std::size_t i = 0; i < buffer.size(); ++i) actions.push_back(buffer.at(i).action);
    std::sort(actions.begin(), actions.end());
    CHECK(actions == std::vector<int>{2, 3, 4});
}

TEST_CASE("buffer sampling is uniform (chi-square at alpha=0.01)") {
    ReplayBuffer buffer(10);
    for (int i = 0; i < 10; ++i) buffer.insert(make_transition(0.0, i, 0.0));
    Rng rng(12345);
    std::vector<int> hits(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(buffer.sample(rng).action)];
    const double expected = draws / 10.0;
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
    CHECK(chi2 < 21.666);  // chi-square 0.99 quantile, 9 dof
}

TEST_CASE("reward is 1 exactly on strict improvement") {
    CHECK(reward(5.0, 4.0) == 1.0);
    CHECK(reward(5.0, 5.0) == 0.0);
    // literal mode reproduces the transposed case split as printed
    CHECK(reward(5.0, 4.0, true) == 0.0);
    CHECK(reward(5.0, 5.0, true) == 0.0);
    CHECK(reward(5.0, 6.0, true) == 1.0);
}

TEST_CASE("epsilon=1 samples actions uniformly (chi-square at alpha=0.01)") {
    AgentConfig cfg;
    cfg.hidden = {8};
    cfg.eps_start = 1.0;
    cfg.eps_final = 1.0;
    Agent agent(cfg, 1);
    Rng rng(999);
    std::vector<int> hits(kNumActions, 0);
    const int draws = 100000;
    const auto s = state_filled(0.2);
    for (int i = 0; i < draws; ++i)
        ++hits[static_cast<std::size_t>(agent.select_action(s, rng, true))];
    const double expected = draws / double(kNumActions);
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
    CHECK(chi2 < 29.141);  // chi-square 0.99 quantile, 14 dof
}

TEST_CASE("greedy selection picks the hand-planted best action") {
    AgentConfig cfg;
    cfg.hidden = {4};
    cfg.eps_start = 0.0;
    cfg.eps_final = 0.0;
    Agent agent(cfg, 2);

    auto& net = agent.prediction_net();
    for (double& p : net.params()) p = 0.0;
    const auto out_view = net.layer_view(net.num_layers() - 1);
    net.params()[out_view.bias + 7] = 3.5;  // Q(a=7) maximal

    Rng rng(1);
    CHECK(agent.select_action(state_filled(0.1), rng, false) == 7);
    CHECK(agent.select_action(state_filled(0.1), rng, true) == 7);

    SUBCASE("adding a constant to every output keeps the argmax") {
        for (int a = 0; a < kNumActions; ++a)
            net.params()[out_view.bias + static_cast<std::size_t>(a)] += 11.0;
        CHECK(agent.select_action(state_filled(0.1), rng, false) == 7);
    }
    SUBCASE("argmax ties break to the lowest index") {
        net.params()[out_view.bias + 2] = 3.5;
        CHECK(agent.select_action(state_filled(0.1), rng, false) == 2);
    }
}

TEST_CASE("gamma=0 reduces the target to the reward") {
    AgentConfig cfg;
    cfg.hidden = {4};
    cfg.gamma = 0.0;
    cfg.batch_size = 4;
    cfg.warmup = 1;
    Agent agent(cfg, 3);

    ReplayBuffer buffer(4);
    buffer.insert(make_transition(0.3, 5, 1.0));
    Rng rng(10);

    const auto q = agent.q_values(state_filled(0.3));
    const double expected_loss = 0.5 * (q[5] - 1.0) * (q[5] - 1.0);
    const double loss = agent.update(buffer, rng);
    CHECK(loss == doctest::Approx(expected_loss).epsilon(1e-12));
}

TEST_CASE("paper-mode target matches a scalar oracle on fixed weights") {
    AgentConfig cfg;
    cfg.hidden = {4};
    cfg.gamma = 0.99;
    cfg.batch_size = 2;
    cfg.warmup = 1;
    cfg.target_mode = TargetMode::paper;
    Agent agent(cfg, 4);
    agent.sync_target();  // identical prediction/target nets

    const auto t = make_transition(0.25, 3, 1.0);
    ReplayBuffer buffer(2);
    buffer.insert(t);

    const auto q_next = mlp_oracle(agent.prediction_net(), t.next_state);
    double max_q = q_next[0];
    for (double v : q_next) max_q = std::max(max_q, v);
    const double target = 1.0 + 0.99 * max_q;

    const auto q_s = mlp_oracle(agent.prediction_net(), t.state);
    const double expected_loss = 0.5 * (q_s[3] - target) * (q_s[3] - target);

    Rng rng(11);
    const double loss = agent.update(buffer, rng);
    CHECK(loss == doctest::Approx(expected_loss).epsilon(1e-12));
}

TEST_CASE("terminal transitions bootstrap nothing") {
    AgentConfig cfg;
    cfg.hidden = {4};
    cfg.gamma = 0.99;
    cfg.batch_size = 2;
    cfg.warmup = 1;
    Agent agent(cfg, 5);

    const auto t = make_transition(0.25, 3, 1.0, true);
    ReplayBuffer buffer(2);
    buffer.insert(t);
    const auto q_s = mlp_oracle(agent.prediction_net(), t.state);
    const double expected_loss = 0.5 * (q_s[3] - 1.0) * (q_s[3] - 1.0);
    Rng rng(12);
    CHECK(agent.update(buffer, rng) == doctest::Approx(expected_loss).epsilon(1e-12));
}

TEST_CASE("all-zero network with zero rewards is a fixed point") {
    AgentConfig cfg;
    cfg.hidden = {4};
    cfg.batch_size = 4;
    cfg.warmup = 1;
    Agent agent(cfg, 6);
    for (double& p : agent.prediction_net().params()) p = 0.0;
    agent.sync_target();

    ReplayBuffer buffer(4);
    buffer.insert(make_transition(0.1, 2, 0.0));
    Rng rng(13);
    const std::vector<double> before(agent.prediction_net().params().begin(),
                                     agent.prediction_net().params().end());
    const double loss = agent.update(buffer, rng);
    CHECK(loss == 0.0);
    const std::vector<double> after(agent.prediction_net().params().begin(),
                                    agent.prediction_net().params().end());
    CHECK(before == after);
}

TEST_CASE("sync_target copies parameters bit for bit and holds between syncs") {
    AgentConfig cfg;
    cfg.hidden = {8};
    cfg.batch_size = 4;
    cfg.warmup = 1;
    Agent agent(cfg, 7);

    ReplayBuffer buffer(8);
    for (int i = 0; i < 8; ++i) buffer.insert(make_transition(0.1 * i, i % kNumActions, 1.0));
    Rng rng(14);

    agent.sync_target();
    const std::vector<double> target_before(agent.target_net().params().begin(),
                                            agent.target_net().params().end());
    for (int i = 0; i < 5; ++i) agent.update(buffer, rng);  // prediction net moves
    const std::vector<double> target_after(agent.target_net().params().begin(),
                                           agent.target_net().params().end());
    CHECK(target_before == target_after);

    agent.sync_target();
    const auto p = agent.prediction_net().params();
    const auto t = agent.target_net().params();
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == t[i]);

    const auto s = state_filled(0.4);
    CHECK(agent.q_values(s) == agent.q_values_target(s));
}

TEST_CASE("sync cadence follows the learning-step counter") {
    AgentConfig cfg;
    cfg.target_sync_period = 3;
    Agent agent(cfg, 8);
    std::vector<bool> due;
    for (int i = 0; i < 7; ++i) {
        agent.count_learning_step();
        due.push_back(agent.due_for_sync());
    }
    CHECK(due == std::vector<bool>{false, false, true, false, false, true, false});
}

TEST_CASE("single-transition loop converges to 1/(1-gamma)") {
    AgentConfig cfg;
    cfg.hidden = {8};
    cfg.gamma = 0.99;
    cfg.lr = 0.02;
    cfg.batch_size = 4;
    cfg.warmup = 1;
    cfg.target_mode = TargetMode::paper;
    Agent agent(cfg, 9);

    Transition t;
    t.state.fill(0.5);
    t.next_state.fill(0.5);  // s' = s
    t.action = 4;
    t.reward = 1.0;
    ReplayBuffer buffer(2);
    buffer.insert(t);

    // fresh target every step: plain bootstrapped Q-learning on one state
    Rng rng(15);
    for (int step = 1; step <= 20000; ++step) {
        agent.update(buffer, rng);
        agent.sync_target();
    }
    const auto q = agent.q_values(state_filled(0.5));
    CHECK(std::abs(q[4] - 100.0) <= 5.0);
}

TEST_CASE("agent checkpoints round trip") {
    AgentConfig cfg;
    cfg.hidden = {8, 4};
    cfg.gamma = 0.9;
    Agent agent(cfg, 10);
    agent.count_learning_step();
    agent.count_learning_step();

    std::stringstream buffer;
    agent.save(buffer);
    auto loaded = Agent::load(buffer);
    CHECK(loaded.learning_steps() == 2);
    CHECK(loaded.config().gamma == 0.9);
    CHECK(loaded.config().hidden == cfg.hidden);
    const auto s = state_filled(0.3);
    CHECK(loaded.q_values(s) == agent.q_values(s));
    CHECK(loaded.q_values_target(s) == agent.q_values_target(s));
}
