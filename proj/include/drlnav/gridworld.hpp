#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drlnav/mlp.hpp"

namespace drlnav {

enum class Cell { Start, Free, Obstacle, Goal };

enum class GridAction { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr int kGridActionCount = 4;

struct GridStepResult {
    int next_state = 0;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
};

/// Discrete grid field. Moves are clamped at the edges; entering the goal
/// pays +1 and terminates, entering an obstacle pays 0 and terminates. With
/// `slippery` set, the executed direction is the chosen one with probability
/// 1/3 and each perpendicular one with probability 1/3.
class GridWorld {
public:
    /// Parses rows of S/F/H/G characters (one row per line). Requires a
    /// rectangular map with exactly one S and one G.
    static GridWorld from_text(const std::string& text, bool slippery = false);
    static GridWorld from_file(const std::string& path, bool slippery = false);

    /// The 8x8 map used by the discrete experiments.
    static GridWorld make_8x8(bool slippery = false);
    /// Denser 10x10 map with obstacle clusters forcing detours.
    static GridWorld make_10x10(bool slippery = false);

    int reset();
    GridStepResult step(GridAction action, Rng& rng);

    std::vector<double> encode_state(int state) const;

    int width() const { return width_; }
    int height() const { return height_; }
    int state_count() const { return width_ * height_; }
    int action_count() const { return kGridActionCount; }
    int start_state() const { return start_; }
    int goal_state() const { return goal_; }
    int agent_state() const { return agent_; }
    bool slippery() const { return slippery_; }
    bool episode_over() const { return terminated_ || truncated_; }
    Cell cell(int state) const { return cells_[state]; }

    int max_steps() const { return max_steps_; }
    void set_max_steps(int n) { max_steps_ = n; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Cell> cells_;
    int start_ = 0;
    int goal_ = 0;
    bool slippery_ = false;
    int agent_ = 0;
    int steps_ = 0;
    int max_steps_ = 200;
    bool terminated_ = false;
    bool truncated_ = false;
};

/// Moves of the shortest obstacle-free start-to-goal path, if one exists.
std::optional<int> bfs_shortest_path(const GridWorld& env);

}  // namespace drlnav
