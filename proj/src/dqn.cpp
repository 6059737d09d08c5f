#include "drlnav/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

const char* dqn_variant_name(DqnVariant v) {
    switch (v) {
        case DqnVariant::Dqn: return "dqn";
        case DqnVariant::Double: return "double";
        case DqnVariant::Dueling: return "dueling";
    }
    return "dqn";
}

void DqnConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("dqn: learning_rate must be positive");
    if (!(gamma > 0 && gamma <= 1)) throw std::invalid_argument("dqn: gamma outside (0,1]");
    if (!(epsilon_min >= 0 && epsilon_min <= epsilon_start && epsilon_start <= 1))
        throw std::invalid_argument("dqn: need 0 <= epsilon_min <= epsilon_start <= 1");
    if (!(epsilon_decay > 0 && epsilon_decay <= 1))
        throw std::invalid_argument("dqn: epsilon_decay outside (0,1]");
    if (buffer_capacity == 0 || batch_size < 1 || target_update_every < 1 || episodes < 1 ||
        hidden_width < 1)
        throw std::invalid_argument("dqn: counts must be positive");
    if (static_cast<size_t>(batch_size) > buffer_capacity)
        throw std::invalid_argument("dqn: batch_size exceeds buffer capacity");
    if (early_stop_trailing_success < 0 || early_stop_trailing_success > 100)
        throw std::invalid_argument("dqn: early_stop_trailing_success outside [0,100]");
}

namespace {

Mlp build_q_net(int state_count, int action_count, const DqnConfig& c, Rng& rng) {
    const int h = c.hidden_width;
    if (c.variant == DqnVariant::Dueling) {
        return Mlp::dueling({{state_count, h, Activation::Relu}, {h, h, Activation::Relu}},
                            action_count, rng);
    }
    return Mlp::plain({{state_count, h, Activation::Relu},
                       {h, h, Activation::Relu},
                       {h, action_count, Activation::Linear}},
                      rng);
}

int argmax(std::span<const double> v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

DqnAgent::DqnAgent(int state_count, int action_count, const DqnConfig& config, Rng& rng)
    : config_(config),
      state_count_(state_count),
      action_count_(action_count),
      policy_(build_q_net(state_count, action_count, config, rng)),
      target_(policy_),
      adam_(AdamState::for_net(policy_)),
      buffer_(config.buffer_capacity),
      epsilon_(config.epsilon_start) {
    config_.validate();
}

int DqnAgent::select_action(int state, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon_) {
        std::uniform_int_distribution<int> pick(0, action_count_ - 1);
        return pick(rng);
    }
    return greedy_action(state);
}

int DqnAgent::greedy_action(int state) const {
    const auto q = policy_.forward_onehot(state, state_count_);
    return argmax(q);
}

std::vector<double> DqnAgent::q_values(int state) const {
    return policy_.forward_onehot(state, state_count_);
}

void DqnAgent::decay_epsilon() {
    epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
}

std::vector<double> DqnAgent::compute_targets(std::span<const DiscreteTransition> batch) const {
    if (batch.empty()) throw std::invalid_argument("dqn: empty batch");
    OneHotBatch next{state_count_, {}};
    next.indices.reserve(batch.size());
    for (const auto& t : batch) next.indices.push_back(t.next_state);
    const Matrix& target_q = target_.forward(next).output;

    const bool use_double = config_.variant == DqnVariant::Double ||
                            (config_.variant == DqnVariant::Dueling && config_.dueling_double);
    Matrix policy_q;
    if (use_double) policy_q = policy_.forward(next).output;

    std::vector<double> y(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].terminated) {
            y[i] = batch[i].reward;
            continue;
        }
        const int b = static_cast<int>(i);
        double bootstrap;
        if (use_double) {
            // Policy net selects the action, target net evaluates it.
            const int a = argmax(policy_q.row(b));
            bootstrap = target_q(b, a);
        } else {
            bootstrap = *std::max_element(target_q.row(b).begin(), target_q.row(b).end());
        }
        y[i] = batch[i].reward + config_.gamma * bootstrap;
    }
    return y;
}

double DqnAgent::train_step(std::span<const DiscreteTransition> batch) {
    if (static_cast<int>(batch.size()) != config_.batch_size)
        throw std::invalid_argument("dqn: batch size mismatch");
    const std::vector<double> y = compute_targets(batch);

    OneHotBatch states{state_count_, {}};
    states.indices.reserve(batch.size());
    for (const auto& t : batch) states.indices.push_back(t.state);
    const BatchTrace trace = policy_.forward(states);

    std::vector<double> pred(batch.size());
    for (size_t i = 0; i < batch.size(); ++i)
        pred[i] = trace.output(static_cast<int>(i), batch[i].action);
    const auto [loss, dpred] = mse_loss(pred, y);
    if (!std::isfinite(loss)) throw NumericError("dqn: non-finite loss");

    // Loss is gated on the taken actions; every other Q output gets zero
    // gradient.
    Matrix dq(trace.output.rows, trace.output.cols);
    for (size_t i = 0; i < batch.size(); ++i)
        dq(static_cast<int>(i), batch[i].action) = dpred[i];

    const MlpGrads grads = policy_.backward(trace, dq);
    adam_step(policy_, grads, adam_, config_.learning_rate);

    ++global_step_;
    if (global_step_ % config_.target_update_every == 0) hard_update(target_, policy_);
    return loss;
}

DqnTrainResult dqn_train(GridWorld& env, const DqnConfig& config, Rng& rng,
                         const TrainHooks& hooks) {
    config.validate();
    DqnAgent agent(env.state_count(), env.action_count(), config, rng);
    RunLog log;

    std::vector<char> window;  // trailing-100 success flags
    size_t window_pos = 0;
    int window_successes = 0;

    auto checkpoint = [&](long episode) {
        if (hooks.checkpoint_dir.empty()) return;
        const std::string base =
            hooks.checkpoint_dir + "/" + hooks.checkpoint_prefix + "_q.net";
        agent.policy_net().save_file(base);
        (void)episode;
    };

    for (long episode = 1; episode <= config.episodes; ++episode) {
        int state = env.reset();
        double episode_reward = 0;
        long steps = 0;
        double loss_sum = 0;
        long loss_count = 0;
        std::string outcome = "timeout";
        while (true) {
            const int action = agent.select_action(state, rng);
            const GridStepResult res = env.step(static_cast<GridAction>(action), rng);
            agent.buffer().push({state, action, res.reward, res.next_state, res.terminated});
            episode_reward += res.reward;
            ++steps;
            if (agent.buffer().size() >= static_cast<size_t>(config.batch_size)) {
                const auto batch = agent.buffer().sample(config.batch_size, rng);
                loss_sum += agent.train_step(batch);
                ++loss_count;
            }
            state = res.next_state;
            if (res.terminated) {
                outcome = res.reward > 0 ? "goal" : "obstacle";
                break;
            }
            if (res.truncated) break;
        }

        EpisodeRow row;
        row.episode = episode;
        row.reward = episode_reward;
        row.steps = steps;
        row.outcome = outcome;
        row.epsilon_or_noise = agent.epsilon();
        row.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
        log.rows.push_back(row);
        if (hooks.on_episode) hooks.on_episode(row);
        if (hooks.checkpoint_every > 0 && episode % hooks.checkpoint_every == 0)
            checkpoint(episode);

        agent.decay_epsilon();

        const bool success = episode_reward == 1.0;
        if (window.size() < kTrailingWindow) {
            window.push_back(success);
            window_successes += success;
        } else {
            window_successes -= window[window_pos];
            window[window_pos] = success;
            window_successes += success;
            window_pos = (window_pos + 1) % kTrailingWindow;
        }
        if (config.early_stop_trailing_success > 0 && window.size() == kTrailingWindow &&
            window_successes >= config.early_stop_trailing_success)
            break;
    }
    checkpoint(config.episodes);
    return {std::move(log), std::move(agent)};
}

std::vector<int> extract_path(const Mlp& q_net, GridWorld& env, Rng& rng) {
    std::vector<int> path;
    int state = env.reset();
    path.push_back(state);
    while (!env.episode_over()) {
        const auto q = q_net.forward_onehot(state, env.state_count());
        const int action = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
        const GridStepResult res = env.step(static_cast<GridAction>(action), rng);
        state = res.next_state;
        path.push_back(state);
    }
    return path;
}

std::vector<int> extract_path(const Mlp& q_net, GridWorld& env) {
    Rng rng(0);  // consumed only by slippery dynamics
    return extract_path(q_net, env, rng);
}

std::vector<int> extract_path(const DqnAgent& agent, GridWorld& env) {
    return extract_path(agent.policy_net(), env);
}

}  // namespace drlnav
