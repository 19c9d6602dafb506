#pragma once

#include <cstdint>
#include <stdexcept>

#include "kblrn/poe_model.hpp"

namespace kblrn {

class NonFiniteError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdamState {
    Parameters m;  // first moments
    Parameters v;  // second moments
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState zeros_like(const Parameters& params);
    bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam restricted to the blocks touched in `grads`. Inside a
// touched block, entries whose gradient is exactly zero keep their value
// while their moments decay. Throws NonFiniteError on a non-finite gradient
// or if an update produces a non-finite parameter.
void adam_step(Parameters& params, const Gradients& grads, AdamState& state, double learning_rate);

}  // namespace kblrn
