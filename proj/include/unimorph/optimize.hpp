#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace unimorph {

struct BoxSearchOptions {
    int budget = 500;          // total objective evaluations
    int restarts = 3;          // extra starts from the perturbed best point
    std::uint64_t seed = 1;
    double initial_step = 0.15; // simplex edge in unit-box coordinates
    double restart_spread = 0.3;
};

struct BoxSearchResult {
    std::vector<double> point; // unit-box coordinates of the best evaluation
    double value = 0.0;
    int evaluations = 0;
};

// Nelder-Mead on the unit box [0, 1]^n; trial points are clamped onto the
// box. Non-finite objective values are treated as worse than any finite one.
BoxSearchResult minimize_in_box(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<double>& start, const BoxSearchOptions& options);

} // namespace unimorph
