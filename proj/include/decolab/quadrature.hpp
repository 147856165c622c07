#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace decolab {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0; // Kronrod error estimate, summed over panels
    bool converged = false;
    std::size_t intervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod on [breakpoints.front(),
// breakpoints.back()]. Interior breakpoints seed the initial panels; the panel
// with the largest error estimate is bisected until the total estimate drops
// below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> breakpoints,
                                    double abs_tol, double rel_tol = 0.0, std::size_t max_intervals = 50000);

} // namespace decolab
