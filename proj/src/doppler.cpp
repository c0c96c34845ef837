#include "rydbist/doppler.hpp"

#include <cmath>

namespace rydbist {

std::vector<VelocityClass> doppler_weights(const DopplerParams& params)
{
    if (!params.enabled || params.classes <= 1)
        return {{0.0, 1.0}};

    const int half = params.classes / 2;
    const double span = params.cutoff * params.most_probable_speed;
    const double step = span / half;

    // Fill one side and mirror, so w(+v) == w(-v) bitwise.
    std::vector<double> side(half + 1);
    double total = 0.0;
    for (int k = 0; k <= half; ++k) {
        const double u = k * step / params.most_probable_speed;
        side[k] = std::exp(-u * u);
        total += (k == 0 ? 1.0 : 2.0) * side[k];
    }

    std::vector<VelocityClass> nodes;
    nodes.reserve(params.classes);
    for (int k = -half; k <= half; ++k) {
        const int m = k < 0 ? -k : k;
        nodes.push_back({k * step, side[m] / total});
    }
    return nodes;
}

} // namespace rydbist
