#pragma once

namespace drlnav {

enum class NavOutcome { Ongoing, Success, Failure };

/// Inputs of the 3D-stage reward calculator. Distances are nonnegative and
/// goal_dist_initial must be positive.
struct NavState {
    double goal_angle = 0;         // signed yaw error to the goal, radians
    double goal_dist = 0;
    double goal_dist_initial = 0;
    double min_obstacle_dist = 0;
    double action_linear = 0;      // commanded linear velocity
    double action_angular = 0;     // commanded angular velocity
    NavOutcome outcome = NavOutcome::Ongoing;
};

struct Reward3dBreakdown {
    double yaw = 0;           // -|goal_angle|
    double vangular = 0;      // -action_angular^2
    double distance = 0;      // 2*di/(di+d) - 1
    double obstacle = 0;      // -20 when min_obstacle_dist < 0.22
    double vlinear = 0;       // -((0.22 - action_linear)*10)^2
    double step = -1.0;       // constant per-step penalty
    double outcome_bonus = 0; // +2500 success / -2000 failure
    double total = 0;
};

Reward3dBreakdown reward3d(const NavState& s);

}  // namespace drlnav
