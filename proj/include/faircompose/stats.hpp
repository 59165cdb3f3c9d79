#pragma once

#include <cstddef>
#include <span>

namespace faircompose {

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-squared distribution with `dof` degrees of
// freedom: Pr[X > statistic].
double chi_squared_sf(double statistic, double dof);

// Pearson chi-squared statistic for observed counts against expected counts.
double chi_squared_statistic(std::span<const std::size_t> observed,
                             std::span<const double> expected);

}  // namespace faircompose
