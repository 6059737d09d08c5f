#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace drlnav {

/// One CSV row; episode numbers are 1-based.
struct EpisodeRow {
    long episode = 0;
    double reward = 0;
    long steps = 0;
    std::string outcome;
    double epsilon_or_noise = 0;
    double mean_loss = 0;

    bool operator==(const EpisodeRow&) const = default;
};

/// A complete training run: immutable metadata plus per-episode rows.
/// Wall-clock time is deliberately not part of the log; identical seeded
/// runs must serialize to identical bytes.
struct RunLog {
    std::string algo;
    std::string env;
    unsigned long long seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<EpisodeRow> rows;

    bool operator==(const RunLog&) const = default;
};

enum class RunKind { Discrete, Continuous };

/// Windowed mean; element i averages elements max(0, i-window+1)..i.
std::vector<double> trailing_mean(std::span<const double> series, size_t window);

/// Exponential smoothing: s0 = x0, s_i = factor*s_{i-1} + (1-factor)*x_i.
std::vector<double> ema_smooth(std::span<const double> series, double factor);

/// Fraction of episodes at or after convergence_start (0-based index) whose
/// step count is below the threshold.
double stability_measure(std::span<const long> steps, long threshold, size_t convergence_start);

/// First episode number (1-based) at which the run counts as converged:
/// discrete - the last 100 episodes all reached the goal; continuous - the
/// trailing-100 mean reward exceeds -5 and the trailing-100 mean steps is
/// below 30. Requires a full 100-episode window.
std::optional<long> detect_convergence(const RunLog& log, RunKind kind);

inline constexpr size_t kTrailingWindow = 100;
inline constexpr double kContinuousRewardThreshold = -5.0;
inline constexpr double kContinuousStepThreshold = 30.0;

std::string run_log_to_csv(const RunLog& log);
RunLog run_log_from_csv(const std::string& text);
void save_run_log(const RunLog& log, const std::string& path);
RunLog load_run_log(const std::string& path);

}  // namespace drlnav
