#pragma once

#include <vector>

#include "drlnav/mlp.hpp"

namespace drlnav {

/// Adam moment estimates, one pair of buffers per parameter block of the net
/// they were built for. Moments start at zero; step_count increments by one
/// per update.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_net(const Mlp& net);
};

/// One bias-corrected Adam update of `net` along `grads`. Rejects non-finite
/// gradients (NumericError) without touching parameters or state.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr);

}  // namespace drlnav
