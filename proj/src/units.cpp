#include "rydbist/units.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>

namespace rydbist {

double angular_to_mhz_exact(double angular)
{
    const double guess = angular_to_mhz(angular);
    if (!std::isfinite(guess))
        return guess;
    // Several neighbouring MHz values can map onto the same angular double;
    // the one with the shortest decimal form wins.
    double best = guess;
    std::size_t best_len = std::numeric_limits<std::size_t>::max();
    auto consider = [&](double candidate) {
        if (mhz_to_angular(candidate) != angular)
            return;
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), candidate);
        const auto len = static_cast<std::size_t>(res.ptr - buf);
        if (len < best_len) {
            best = candidate;
            best_len = len;
        }
    };
    consider(guess);
    double up = guess, down = guess;
    for (int step = 0; step < 8; ++step) {
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
        consider(up);
        consider(down);
    }
    return best;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

} // namespace rydbist
