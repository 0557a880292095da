#ifndef LIVSIC_BASE_COMMON_HPP
#define LIVSIC_BASE_COMMON_HPP

#include <vector>

namespace livsic {

/// A periodic orbit of the base map: points[i] = f^i(p), period minimal.
template <class Point>
struct PeriodicOrbit {
    std::vector<Point> points;
    int period = 0;

    const Point& start() const { return points.front(); }
};

/// Result of a constructive closing operation: the periodic orbit plus the
/// measured shadowing data.
template <class Point>
struct ClosingResult {
    PeriodicOrbit<Point> orbit;
    double delta = 0.0;     // d(x, f^n x), the near-return amplitude
    double c_shadow = 0.0;  // measured constant in d(f^i p, f^i x) <= c * delta * e^{-tau min(i,n-i)}
};

} // namespace livsic

#endif
