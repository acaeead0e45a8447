#pragma once

#include <span>

namespace aslb {

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::size_t points = 0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace aslb
