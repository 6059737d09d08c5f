#include "drlnav/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

AdamState AdamState::for_net(const Mlp& net) {
    AdamState s;
    for (auto block : const_cast<Mlp&>(net).param_blocks()) {
        s.m.emplace_back(block.size(), 0.0);
        s.v.emplace_back(block.size(), 0.0);
    }
    return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr) {
    auto params = net.param_blocks();
    if (grads.units.size() * 2 != params.size() || state.m.size() != params.size())
        throw std::invalid_argument("adam_step: shape mismatch");

    std::vector<std::span<const double>> gblocks;
    for (const auto& u : grads.units) {
        gblocks.emplace_back(u.dw.data);
        gblocks.emplace_back(u.db);
    }
    for (size_t b = 0; b < params.size(); ++b) {
        if (gblocks[b].size() != params[b].size())
            throw std::invalid_argument("adam_step: shape mismatch");
        for (double g : gblocks[b])
            if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
    }

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = gblocks[b];
        auto& m = state.m[b];
        auto& v = state.v[b];
        for (size_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace drlnav
