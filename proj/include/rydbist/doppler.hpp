#pragma once

#include "rydbist/config.hpp"

#include <vector>

namespace rydbist {

struct VelocityClass {
    double velocity; // m/s along the cell axis
    double weight;
};

/// Gaussian (1D Maxwell) weights exp(-v^2/v_p^2) on N symmetric, equally
/// spaced nodes in [-cutoff v_p, cutoff v_p], normalized to sum 1. A single
/// node at v = 0 when Doppler averaging is disabled or N = 1.
std::vector<VelocityClass> doppler_weights(const DopplerParams& params);

} // namespace rydbist
