#include "rankdiv/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "rankdiv/errors.hpp"

namespace rankdiv {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

double max_distance(const std::vector<Vertex>& simplex) {
    double worst = 0.0;
    for (std::size_t v = 1; v < simplex.size(); ++v) {
        for (std::size_t i = 0; i < simplex[0].x.size(); ++i) {
            worst = std::max(worst, std::fabs(simplex[v].x[i] - simplex[0].x[i]));
        }
    }
    return worst;
}

SimplexResult descend(const ObjectiveFn& objective, std::span<const double> start,
                      std::span<const double> steps, const SimplexOptions& opt) {
    const std::size_t dim = start.size();
    std::vector<Vertex> simplex(dim + 1);
    simplex[0].x.assign(start.begin(), start.end());
    for (std::size_t v = 1; v <= dim; ++v) {
        simplex[v].x = simplex[0].x;
        simplex[v].x[v - 1] += steps[v - 1];
    }
    for (auto& vertex : simplex) vertex.f = objective(vertex.x);

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    SimplexResult result;
    std::vector<double> centroid(dim), candidate(dim);
    for (result.iterations = 0; result.iterations < opt.max_iterations; ++result.iterations) {
        if (std::fabs(simplex.back().f - simplex.front().f) <= opt.f_tolerance ||
            max_distance(simplex) <= opt.x_tolerance) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        Vertex& worst = simplex.back();
        for (std::size_t i = 0; i < dim; ++i) {
            candidate[i] = centroid[i] + (centroid[i] - worst.x[i]);
        }
        const double f_reflect = objective(candidate);

        if (f_reflect < simplex.front().f) {
            std::vector<double> expanded(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                expanded[i] = centroid[i] + 2.0 * (candidate[i] - centroid[i]);
            }
            const double f_expand = objective(expanded);
            if (f_expand < f_reflect) {
                worst.x = std::move(expanded);
                worst.f = f_expand;
            } else {
                worst.x = candidate;
                worst.f = f_reflect;
            }
        } else if (f_reflect < simplex[dim - 1].f) {
            worst.x = candidate;
            worst.f = f_reflect;
        } else {
            const bool outside = f_reflect < worst.f;
            std::vector<double> contracted(dim);
            const auto& toward = outside ? candidate : worst.x;
            for (std::size_t i = 0; i < dim; ++i) {
                contracted[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
            }
            const double f_contract = objective(contracted);
            if (f_contract < (outside ? f_reflect : worst.f)) {
                worst.x = std::move(contracted);
                worst.f = f_contract;
            } else {
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        simplex[v].x[i] =
                            simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    }
                    simplex[v].f = objective(simplex[v].x);
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
    }

    result.x = simplex.front().x;
    result.value = simplex.front().f;
    return result;
}

}  // namespace

SimplexResult minimize_simplex(const ObjectiveFn& objective,
                               std::span<const double> start,
                               std::span<const double> steps,
                               const SimplexOptions& options) {
    if (start.empty() || start.size() != steps.size()) {
        throw DomainError("minimize_simplex: start/steps size mismatch");
    }

    SimplexResult best = descend(objective, start, steps, options);
    std::vector<double> shrunk(steps.begin(), steps.end());
    for (std::size_t r = 0; r < options.restarts; ++r) {
        for (double& s : shrunk) s *= 0.25;
        SimplexResult next = descend(objective, best.x, shrunk, options);
        next.iterations += best.iterations;
        if (next.value <= best.value) {
            next.converged = next.converged || best.converged;
            best = std::move(next);
        } else {
            best.iterations = next.iterations;
        }
    }

    if (!best.converged) {
        throw FitError("simplex descent hit the iteration cap", best.x, best.value,
                       best.iterations);
    }
    return best;
}

}  // namespace rankdiv
