#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rankdiv {

struct SimplexOptions {
    std::size_t max_iterations = 4000;
    double f_tolerance = 1e-14;  // spread of simplex function values
    double x_tolerance = 1e-11;  // max vertex distance from the best point
    std::size_t restarts = 2;    // re-seeded descents from the best point
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Derivative-free Nelder-Mead descent with the standard reflection /
/// expansion / contraction / shrink moves. `steps` sets the initial simplex
/// edge per coordinate. Throws FitError when the iteration cap is reached
/// without meeting either tolerance; the exception carries the best iterate.
SimplexResult minimize_simplex(const ObjectiveFn& objective,
                               std::span<const double> start,
                               std::span<const double> steps,
                               const SimplexOptions& options = {});

}  // namespace rankdiv
