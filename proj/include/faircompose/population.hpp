#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose {

// One task's qualifications and the induced abs-diff metric.
struct PopulationTask {
    std::string name;
    std::vector<double> qualifications;  // in [0,1]
    TaskMetric metric;
    std::size_t clamped = 0;  // draws pushed back into [0,1]
};

// Gaussian qualifications clamped to [0,1]; clamping (rather than rejection)
// keeps the full population at the cost of small point masses at 0 and 1.
PopulationTask generate_population(std::size_t n, double mean, double sd, std::uint64_t seed,
                                   std::string name = {});

}  // namespace faircompose
