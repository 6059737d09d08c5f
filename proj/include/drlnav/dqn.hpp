#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drlnav/adam.hpp"
#include "drlnav/gridworld.hpp"
#include "drlnav/metrics.hpp"
#include "drlnav/mlp.hpp"
#include "drlnav/replay.hpp"

namespace drlnav {

enum class DqnVariant { Dqn, Double, Dueling };

const char* dqn_variant_name(DqnVariant v);

struct DqnConfig {
    DqnVariant variant = DqnVariant::Dqn;
    double learning_rate = 1e-3;
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.995;
    double epsilon_min = 0.01;
    size_t buffer_capacity = 100000;
    int batch_size = 64;
    int target_update_every = 1000;
    long episodes = 10000;
    int hidden_width = 128;       // two hidden layers of this width
    bool dueling_double = true;   // dueling variant also uses the double target
    // Stop once the trailing-100 success count reaches this value (0 = off).
    int early_stop_trailing_success = 0;

    void validate() const;
};

/// Hooks shared by the training loops: per-episode progress reporting and
/// periodic checkpointing into a directory.
struct TrainHooks {
    std::function<void(const EpisodeRow&)> on_episode;
    std::string checkpoint_dir;
    std::string checkpoint_prefix;
    long checkpoint_every = 0;  // episodes; 0 = only at the end
};

/// Q-learning agent with a periodically hard-copied target network and the
/// vanilla / double / dueling(+double) target variants.
class DqnAgent {
public:
    DqnAgent(int state_count, int action_count, const DqnConfig& config, Rng& rng);

    /// Epsilon-greedy over the policy net; greedy ties break to the lowest
    /// action index.
    int select_action(int state, Rng& rng);
    int greedy_action(int state) const;
    std::vector<double> q_values(int state) const;

    /// Bootstrap targets y for a batch; terminated transitions get y = r.
    std::vector<double> compute_targets(std::span<const DiscreteTransition> batch) const;

    /// One Adam update of the policy net on the batch; refreshes the target
    /// net by hard copy every target_update_every calls. Returns the loss.
    double train_step(std::span<const DiscreteTransition> batch);

    const Mlp& policy_net() const { return policy_; }
    const Mlp& target_net() const { return target_; }
    ReplayBuffer<DiscreteTransition>& buffer() { return buffer_; }
    double epsilon() const { return epsilon_; }
    void decay_epsilon();
    long global_step() const { return global_step_; }
    const DqnConfig& config() const { return config_; }

private:
    DqnConfig config_;
    int state_count_;
    int action_count_;
    Mlp policy_;
    Mlp target_;
    AdamState adam_;
    ReplayBuffer<DiscreteTransition> buffer_;
    double epsilon_;
    long global_step_ = 0;
};

struct DqnTrainResult {
    RunLog log;
    DqnAgent agent;
};

/// Full training loop: one episode per iteration, epsilon decayed at episode
/// end, one gradient step per environment step once the buffer can fill a
/// batch.
DqnTrainResult dqn_train(GridWorld& env, const DqnConfig& config, Rng& rng,
                         const TrainHooks& hooks = {});

/// Greedy rollout from the start state, capped at the episode step limit.
/// Returns the visited state sequence including the start.
std::vector<int> extract_path(const DqnAgent& agent, GridWorld& env);
std::vector<int> extract_path(const Mlp& q_net, GridWorld& env);

}  // namespace drlnav
