#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace drlnav {

struct Vec2 {
    double x = 0;
    double y = 0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct RectObstacle {
    double x = 0, y = 0, w = 0, h = 0;  // lower-left corner plus extents
};

struct CircleObstacle {
    double cx = 0, cy = 0, r = 0;
};

/// Static geometry of one continuous scenario.
struct FarmScenario {
    double xmin = 0, ymin = 0, xmax = 20, ymax = 20;
    Vec2 start;
    Vec2 goal;
    double goal_radius = 1.0;
    std::vector<RectObstacle> rects;
    std::vector<CircleObstacle> circles;

    /// The three fixed layouts of increasing obstacle count.
    static FarmScenario builtin(int scenario);
    static FarmScenario from_file(const std::string& path);
    static FarmScenario from_text(const std::string& text);
    void save_file(const std::string& path) const;
    void validate() const;
};

enum class FarmOutcome { Ongoing, Goal, Collision, Timeout };

struct RewardBreakdown {
    double potential = 0;
    double step_penalty = 0;
    double boundary = 0;
    double revisit = 0;
    double collision = 0;
    double total = 0;
};

struct ContStepResult {
    std::array<double, 2> observation{};
    double reward = 0;
    bool terminated = false;
    bool collided = false;
    FarmOutcome outcome = FarmOutcome::Ongoing;
    RewardBreakdown breakdown;
};

/// Continuous 2D obstacle field. Actions are displacements in [-1,1]^2
/// scaled by step_scale; collision checks are swept along the movement
/// segment so thin obstacles cannot be tunnelled through.
class ContinuousFarm {
public:
    // Reward constants. The -2 collision penalty comes from the reward
    // specification; the remaining magnitudes keep a direct path's return
    // above the -5 convergence threshold.
    static constexpr double kStepScale = 0.5;
    static constexpr double kBoundaryMargin = 0.5;
    static constexpr double kBoundaryPenalty = -0.5;
    static constexpr double kObstacleMargin = 0.3;
    static constexpr double kCollisionPenalty = -2.0;
    static constexpr double kRevisitPenalty = -1.0;
    static constexpr double kStepPenalty = -0.05;
    static constexpr double kVisitCellSize = 1.0;
    static constexpr int kMaxSteps = 200;

    explicit ContinuousFarm(FarmScenario scenario);

    std::array<double, 2> reset();
    ContStepResult step(std::array<double, 2> action);

    /// Per-term shaped reward for a move from `prev` to `next`. Reads (but
    /// does not update) the visit grid.
    RewardBreakdown shaped_reward(Vec2 prev, Vec2 next, bool collided) const;

    /// True iff the segment intersects any obstacle inflated by the margin.
    bool collision_check(Vec2 from, Vec2 to) const;

    const FarmScenario& scenario() const { return scenario_; }
    Vec2 agent() const { return agent_; }
    int steps_taken() const { return steps_; }
    bool episode_over() const { return over_; }

private:
    int visit_cell(Vec2 p) const;

    FarmScenario scenario_;
    Vec2 agent_;
    std::vector<int> visits_;
    int visit_cols_ = 0;
    int visit_rows_ = 0;
    int steps_ = 0;
    bool over_ = true;
};

}  // namespace drlnav
