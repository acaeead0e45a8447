#include "aslb/stats.hpp"

#include <cmath>

#include "aslb/error.hpp"

namespace aslb {

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() == ys.size(), ErrorKind::invalid_argument, "fit_line: size mismatch");
    require(xs.size() >= 2, ErrorKind::invalid_argument, "fit_line: need at least two points");
    const double n = static_cast<double>(xs.size());
    long double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const long double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0, ErrorKind::invalid_argument, "fit_line: degenerate abscissae");
    LineFit fit;
    fit.points = xs.size();
    fit.slope = static_cast<double>(sxy / sxx);
    fit.intercept = static_cast<double>(my - sxy / sxx * mx);
    fit.r_squared = syy > 0 ? static_cast<double>(sxy * sxy / (sxx * syy)) : 1.0;
    return fit;
}

}  // namespace aslb
