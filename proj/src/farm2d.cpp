#include "drlnav/farm2d.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

namespace {

constexpr const char* kScenario1 = R"(bounds 0 0 20 20
start 3 3
goal 16 16
goal_radius 1.0
rect 6.5 5.5 2.5 4
circle 12 13.8 1.6
)";

constexpr const char* kScenario2 = R"(bounds 0 0 20 20
start 3 3
goal 16 16
goal_radius 1.0
rect 6.5 5.5 2.5 4
circle 12 13.8 1.6
rect 12 6 4 2
circle 6 12 1.5
)";

constexpr const char* kScenario3 = R"(bounds 0 0 20 20
start 3 3
goal 16 16
goal_radius 1.0
rect 6.5 5.5 2.5 4
circle 12 13.8 1.6
rect 12 6 4 2
circle 6 12 1.5
rect 9.2 9.5 1.5 3.5
circle 15.5 10.5 1.2
)";

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0;
    if (len2 > 0) t = clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const Vec2 c{a.x + t * dx, a.y + t * dy};
    return distance(p, c);
}

// Liang-Barsky overlap test between a segment and an axis-aligned box.
bool segment_hits_box(Vec2 a, Vec2 b, double xmin, double ymin, double xmax, double ymax) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - xmin, xmax - a.x, a.y - ymin, ymax - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0) {
                if (t > t1) return false;
                if (t > t0) t0 = t;
            } else {
                if (t < t0) return false;
                if (t < t1) t1 = t;
            }
        }
    }
    return true;
}

}  // namespace

FarmScenario FarmScenario::builtin(int scenario) {
    switch (scenario) {
        case 1: return from_text(kScenario1);
        case 2: return from_text(kScenario2);
        case 3: return from_text(kScenario3);
        default: throw std::invalid_argument("farm2d: unknown scenario (want 1, 2 or 3)");
    }
}

FarmScenario FarmScenario::from_text(const std::string& text) {
    FarmScenario s;
    bool have_bounds = false, have_start = false, have_goal = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto need = [&](int n, double* out) {
            for (int i = 0; i < n; ++i)
                if (!(ls >> out[i])) throw ParseError("scenario: malformed '" + key + "' record");
        };
        if (key == "bounds") {
            double v[4];
            need(4, v);
            s.xmin = v[0];
            s.ymin = v[1];
            s.xmax = v[2];
            s.ymax = v[3];
            have_bounds = true;
        } else if (key == "start") {
            need(2, &s.start.x);
            have_start = true;
        } else if (key == "goal") {
            need(2, &s.goal.x);
            have_goal = true;
        } else if (key == "goal_radius") {
            need(1, &s.goal_radius);
        } else if (key == "rect") {
            RectObstacle r;
            double v[4];
            need(4, v);
            r.x = v[0];
            r.y = v[1];
            r.w = v[2];
            r.h = v[3];
            s.rects.push_back(r);
        } else if (key == "circle") {
            CircleObstacle c;
            double v[3];
            need(3, v);
            c.cx = v[0];
            c.cy = v[1];
            c.r = v[2];
            s.circles.push_back(c);
        } else {
            throw ParseError("scenario: unknown record '" + key + "'");
        }
    }
    if (!have_bounds || !have_start || !have_goal)
        throw ParseError("scenario: bounds, start and goal are required");
    s.validate();
    return s;
}

FarmScenario FarmScenario::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read scenario file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_text(ss.str());
}

void FarmScenario::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write scenario file " + path);
    os << "bounds " << xmin << " " << ymin << " " << xmax << " " << ymax << "\n";
    os << "start " << start.x << " " << start.y << "\n";
    os << "goal " << goal.x << " " << goal.y << "\n";
    os << "goal_radius " << goal_radius << "\n";
    for (const auto& r : rects) os << "rect " << r.x << " " << r.y << " " << r.w << " " << r.h << "\n";
    for (const auto& c : circles) os << "circle " << c.cx << " " << c.cy << " " << c.r << "\n";
}

void FarmScenario::validate() const {
    if (!(xmax > xmin) || !(ymax > ymin)) throw ParseError("scenario: degenerate bounds");
    if (goal_radius <= 0) throw ParseError("scenario: goal_radius must be positive");
    auto inside_bounds = [&](Vec2 p) {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    };
    if (!inside_bounds(start) || !inside_bounds(goal))
        throw ParseError("scenario: start and goal must lie inside the bounds");
    if (distance(start, goal) <= 0) throw ParseError("scenario: start and goal coincide");
    const double margin = ContinuousFarm::kObstacleMargin;
    for (const auto& r : rects) {
        if (r.w <= 0 || r.h <= 0) throw ParseError("scenario: rect with non-positive extent");
        for (Vec2 p : {start, goal})
            if (p.x >= r.x - margin && p.x <= r.x + r.w + margin && p.y >= r.y - margin &&
                p.y <= r.y + r.h + margin)
                throw ParseError("scenario: start or goal inside an obstacle");
    }
    for (const auto& c : circles) {
        if (c.r <= 0) throw ParseError("scenario: circle with non-positive radius");
        for (Vec2 p : {start, goal})
            if (distance(p, {c.cx, c.cy}) <= c.r + margin)
                throw ParseError("scenario: start or goal inside an obstacle");
    }
}

ContinuousFarm::ContinuousFarm(FarmScenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    visit_cols_ = static_cast<int>(std::ceil((scenario_.xmax - scenario_.xmin) / kVisitCellSize));
    visit_rows_ = static_cast<int>(std::ceil((scenario_.ymax - scenario_.ymin) / kVisitCellSize));
    reset();
}

int ContinuousFarm::visit_cell(Vec2 p) const {
    int cx = static_cast<int>((p.x - scenario_.xmin) / kVisitCellSize);
    int cy = static_cast<int>((p.y - scenario_.ymin) / kVisitCellSize);
    cx = std::clamp(cx, 0, visit_cols_ - 1);
    cy = std::clamp(cy, 0, visit_rows_ - 1);
    return cy * visit_cols_ + cx;
}

std::array<double, 2> ContinuousFarm::reset() {
    agent_ = scenario_.start;
    visits_.assign(static_cast<size_t>(visit_cols_) * visit_rows_, 0);
    visits_[visit_cell(agent_)] = 1;
    steps_ = 0;
    over_ = false;
    return {agent_.x, agent_.y};
}

bool ContinuousFarm::collision_check(Vec2 from, Vec2 to) const {
    for (const auto& c : scenario_.circles) {
        if (point_segment_distance({c.cx, c.cy}, from, to) <= c.r + kObstacleMargin) return true;
    }
    for (const auto& r : scenario_.rects) {
        if (segment_hits_box(from, to, r.x - kObstacleMargin, r.y - kObstacleMargin,
                             r.x + r.w + kObstacleMargin, r.y + r.h + kObstacleMargin))
            return true;
    }
    return false;
}

RewardBreakdown ContinuousFarm::shaped_reward(Vec2 prev, Vec2 next, bool collided) const {
    RewardBreakdown b;
    b.potential = -distance(next, scenario_.goal) / distance(scenario_.start, scenario_.goal);
    b.step_penalty = kStepPenalty;
    const double edge = std::min(std::min(next.x - scenario_.xmin, scenario_.xmax - next.x),
                                 std::min(next.y - scenario_.ymin, scenario_.ymax - next.y));
    if (edge < kBoundaryMargin) b.boundary = kBoundaryPenalty;
    if (visit_cell(next) != visit_cell(prev) && visits_[visit_cell(next)] > 0)
        b.revisit = kRevisitPenalty;
    if (collided) b.collision = kCollisionPenalty;
    b.total = b.potential + b.step_penalty + b.boundary + b.revisit + b.collision;
    return b;
}

ContStepResult ContinuousFarm::step(std::array<double, 2> action) {
    if (over_) throw std::logic_error("farm2d: step after episode end");
    if (!std::isfinite(action[0]) || !std::isfinite(action[1]))
        throw std::invalid_argument("farm2d: non-finite action");
    action[0] = clamp(action[0], -1.0, 1.0);
    action[1] = clamp(action[1], -1.0, 1.0);

    const Vec2 prev = agent_;
    Vec2 proposed{clamp(prev.x + action[0] * kStepScale, scenario_.xmin, scenario_.xmax),
                  clamp(prev.y + action[1] * kStepScale, scenario_.ymin, scenario_.ymax)};
    const bool collided = collision_check(prev, proposed);
    const Vec2 next = collided ? prev : proposed;  // move is aborted on impact

    ContStepResult r;
    r.breakdown = shaped_reward(prev, next, collided);
    r.reward = r.breakdown.total;
    r.collided = collided;

    if (visit_cell(next) != visit_cell(prev)) visits_[visit_cell(next)] += 1;
    agent_ = next;
    ++steps_;

    if (collided)
        r.outcome = FarmOutcome::Collision;
    else if (distance(next, scenario_.goal) <= scenario_.goal_radius)
        r.outcome = FarmOutcome::Goal;
    else if (steps_ >= kMaxSteps)
        r.outcome = FarmOutcome::Timeout;
    r.terminated = r.outcome != FarmOutcome::Ongoing;
    over_ = r.terminated;
    r.observation = {agent_.x, agent_.y};
    return r;
}

}  // namespace drlnav
