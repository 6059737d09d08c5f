#include "drlnav/gridworld.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

namespace {

constexpr const char* kMap8x8 =
    "SFFFFFFF\n"
    "FFFFFFFF\n"
    "FFFHFFFF\n"
    "FFFFFHFF\n"
    "FFFHFFFF\n"
    "FHHFFFHF\n"
    "FHFFHFHF\n"
    "FFFHFFFG\n";

constexpr const char* kMap10x10 =
    "SFFFHFFFFF\n"
    "FFFFHFFFFF\n"
    "HHFFFFFHHF\n"
    "FFFHFFFHFF\n"
    "FFFHFFFHFF\n"
    "FHFHFHFFFF\n"
    "FHFFFHFFHH\n"
    "FHFFFHFFFF\n"
    "FFFFFHFHFF\n"
    "FFFFFHFHFG\n";

struct Delta {
    int dr, dc;
};

Delta delta_for(GridAction a) {
    switch (a) {
        case GridAction::Up: return {-1, 0};
        case GridAction::Down: return {1, 0};
        case GridAction::Left: return {0, -1};
        case GridAction::Right: return {0, 1};
    }
    return {0, 0};
}

// Slippery mode executes the intended direction or one of the two
// perpendicular ones, never the opposite.
std::array<GridAction, 2> perpendicular(GridAction a) {
    if (a == GridAction::Up || a == GridAction::Down)
        return {GridAction::Left, GridAction::Right};
    return {GridAction::Up, GridAction::Down};
}

}  // namespace

GridWorld GridWorld::from_text(const std::string& text, bool slippery) {
    GridWorld env;
    env.slippery_ = slippery;
    std::istringstream is(text);
    std::string line;
    int starts = 0, goals = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (env.width_ == 0)
            env.width_ = static_cast<int>(line.size());
        else if (static_cast<int>(line.size()) != env.width_)
            throw ParseError("map: rows have inconsistent widths");
        for (char c : line) {
            switch (c) {
                case 'S':
                    env.start_ = static_cast<int>(env.cells_.size());
                    env.cells_.push_back(Cell::Start);
                    ++starts;
                    break;
                case 'F': env.cells_.push_back(Cell::Free); break;
                case 'H': env.cells_.push_back(Cell::Obstacle); break;
                case 'G':
                    env.goal_ = static_cast<int>(env.cells_.size());
                    env.cells_.push_back(Cell::Goal);
                    ++goals;
                    break;
                default: throw ParseError(std::string("map: invalid cell character '") + c + "'");
            }
        }
        ++env.height_;
    }
    if (env.width_ == 0 || env.height_ == 0) throw ParseError("map: empty");
    if (starts != 1) throw ParseError("map: need exactly one start cell");
    if (goals != 1) throw ParseError("map: need exactly one goal cell");
    env.max_steps_ = slippery ? 1000 : 200;
    env.reset();
    return env;
}

GridWorld GridWorld::from_file(const std::string& path, bool slippery) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read map file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_text(ss.str(), slippery);
}

GridWorld GridWorld::make_8x8(bool slippery) { return from_text(kMap8x8, slippery); }
GridWorld GridWorld::make_10x10(bool slippery) { return from_text(kMap10x10, slippery); }

int GridWorld::reset() {
    agent_ = start_;
    steps_ = 0;
    terminated_ = false;
    truncated_ = false;
    return agent_;
}

GridStepResult GridWorld::step(GridAction action, Rng& rng) {
    if (terminated_ || truncated_)
        throw std::logic_error("gridworld: step after episode end");
    GridAction executed = action;
    if (slippery_) {
        std::uniform_int_distribution<int> pick(0, 2);
        const int k = pick(rng);
        if (k > 0) executed = perpendicular(action)[k - 1];
    }
    const auto [dr, dc] = delta_for(executed);
    int row = agent_ / width_ + dr;
    int col = agent_ % width_ + dc;
    if (row < 0) row = 0;
    if (row >= height_) row = height_ - 1;
    if (col < 0) col = 0;
    if (col >= width_) col = width_ - 1;
    agent_ = row * width_ + col;
    ++steps_;

    GridStepResult r;
    r.next_state = agent_;
    const Cell landed = cells_[agent_];
    if (landed == Cell::Goal) {
        r.reward = 1.0;
        r.terminated = true;
    } else if (landed == Cell::Obstacle) {
        r.terminated = true;
    }
    if (!r.terminated && steps_ >= max_steps_) r.truncated = true;
    terminated_ = r.terminated;
    truncated_ = r.truncated;
    return r;
}

std::vector<double> GridWorld::encode_state(int state) const {
    if (state < 0 || state >= state_count())
        throw std::invalid_argument("gridworld: state index out of range");
    std::vector<double> v(state_count(), 0.0);
    v[state] = 1.0;
    return v;
}

std::optional<int> bfs_shortest_path(const GridWorld& env) {
    const int n = env.state_count();
    std::vector<int> dist(n, -1);
    std::deque<int> q;
    dist[env.start_state()] = 0;
    q.push_back(env.start_state());
    while (!q.empty()) {
        const int s = q.front();
        q.pop_front();
        if (s == env.goal_state()) return dist[s];
        const int row = s / env.width(), col = s % env.width();
        const int moves[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (const auto& m : moves) {
            const int nr = row + m[0], nc = col + m[1];
            if (nr < 0 || nr >= env.height() || nc < 0 || nc >= env.width()) continue;
            const int ns = nr * env.width() + nc;
            if (dist[ns] >= 0 || env.cell(ns) == Cell::Obstacle) continue;
            dist[ns] = dist[s] + 1;
            q.push_back(ns);
        }
    }
    return std::nullopt;
}

}  // namespace drlnav
