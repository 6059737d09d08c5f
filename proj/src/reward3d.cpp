#include "drlnav/reward3d.hpp"

#include <cmath>
#include <stdexcept>

namespace drlnav {

Reward3dBreakdown reward3d(const NavState& s) {
    if (!(s.goal_dist_initial > 0))
        throw std::invalid_argument("reward3d: goal_dist_initial must be positive");
    if (s.goal_dist < 0 || s.min_obstacle_dist < 0)
        throw std::invalid_argument("reward3d: distances must be nonnegative");

    Reward3dBreakdown r;
    r.yaw = -std::fabs(s.goal_angle);
    r.vangular = -(s.action_angular * s.action_angular);
    r.distance = 2.0 * s.goal_dist_initial / (s.goal_dist_initial + s.goal_dist) - 1.0;
    r.obstacle = s.min_obstacle_dist < 0.22 ? -20.0 : 0.0;
    const double dv = (0.22 - s.action_linear) * 10.0;
    r.vlinear = -(dv * dv);
    r.step = -1.0;
    if (s.outcome == NavOutcome::Success)
        r.outcome_bonus = 2500.0;
    else if (s.outcome == NavOutcome::Failure)
        r.outcome_bonus = -2000.0;
    r.total = r.yaw + r.vangular + r.distance + r.obstacle + r.vlinear + r.step + r.outcome_bonus;
    return r;
}

}  // namespace drlnav
