#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gasil {

struct AdamState {
    double learning_rate;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-5;
    std::int64_t step = 0;
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment

    AdamState(std::size_t n, double lr)
        : learning_rate(lr), m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update, in place. Throws NumericError on any
// non-finite gradient component; the update is not applied in that case.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace gasil
