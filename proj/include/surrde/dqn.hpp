#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "surrde/features.hpp"
#include "surrde/network.hpp"
#include "surrde/rng.hpp"

namespace surrde::dqn {

inline constexpr int kStateDim = 9;
inline constexpr int kNumActions = 15;

struct Transition {
    std::array<double, kStateDim> state{};
    int action = 0;
    double reward = 0.0;
    std::array<double, kStateDim> next_state{};
    bool terminal = false;
};

// Ring buffer with FIFO eviction and uniform sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void insert(const Transition& t);
    const Transition& sample(Rng& rng) const;
    const Transition& at(std::size_t i) const { return storage_[i]; }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;  // next slot to overwrite
    std::vector<Transition> storage_;
};

// 1 on strict best-so-far improvement, else 0. `literal` reproduces the
// transposed case split as printed in the source equation.
double reward(double best_prev, double best_new, bool literal = false);

enum class TargetMode { double_dqn, paper };

struct AgentConfig {
    std::vector<int> hidden = {32, 64, 32};
    double gamma = 0.99;
    double lr = 1e-4;
    std::size_t batch_size = 64;
    std::size_t replay_capacity = 100000;
    std::size_t warmup = 1000;  // minimum buffer size before updates run
    std::int64_t target_sync_period = 1000;  // G_up
    TargetMode target_mode = TargetMode::double_dqn;
    // Epsilon: linear 1.0 -> eps_final over the first eps_anneal_fraction of
    // max_learning_steps, constant afterwards.
    double eps_start = 1.0;
    double eps_final = 0.05;
    double eps_anneal_fraction = 0.2;
    std::int64_t max_learning_steps = 1500000;
};

class Agent {
public:
    Agent(const AgentConfig& cfg, std::uint64_t seed);

    int select_action(const OptState& state, Rng& rng, bool training);

    // One Bellman update on a uniform batch; returns the batch loss.
    // Throws if the buffer is below the warmup threshold.
    double update(const ReplayBuffer& buffer, Rng& rng);

    void sync_target();

    double epsilon() const;
    std::int64_t learning_steps() const { return learning_steps_; }
    void count_learning_step() { ++learning_steps_; }
    bool due_for_sync() const {
        return learning_steps_ > 0 && learning_steps_ % cfg_.target_sync_period == 0;
    }

    std::vector<double> q_values(const OptState& state) const;
    std::vector<double> q_values_target(const OptState& state) const;

    const AgentConfig& config() const { return cfg_; }
    MlpNetwork& prediction_net() { return *prediction_; }
    const MlpNetwork& prediction_net() const { return *prediction_; }
    const MlpNetwork& target_net() const { return *target_; }

    void save(std::ostream& out) const;
    static Agent load(std::istream& in);

private:
    AgentConfig cfg_;
    std::unique_ptr<MlpNetwork> prediction_;
    std::unique_ptr<MlpNetwork> target_;
    AdamState adam_;
    std::int64_t learning_steps_ = 0;
};

int argmax_action(std::span<const double> q);

}  // namespace surrde::dqn
