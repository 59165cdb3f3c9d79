#include "faircompose/population.hpp"

#include <algorithm>
#include <stdexcept>

#include "faircompose/rng.hpp"

namespace faircompose {

PopulationTask generate_population(std::size_t n, double mean, double sd, std::uint64_t seed,
                                   std::string name) {
    if (n < 1) throw std::invalid_argument("generate_population: need n >= 1");
    if (!(sd > 0.0)) throw std::invalid_argument("generate_population: need sd > 0");

    PopulationTask task;
    task.name = std::move(name);
    task.qualifications.resize(n);
    Rng rng(seed);
    for (double& q : task.qualifications) {
        const double draw = rng.gaussian(mean, sd);
        q = std::clamp(draw, 0.0, 1.0);
        if (q != draw) task.clamped += 1;
    }
    task.metric = TaskMetric::abs_diff(task.qualifications);
    return task;
}

}  // namespace faircompose
