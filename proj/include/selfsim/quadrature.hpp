#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace selfsim {

/// Composite 4-node Gauss-Legendre quadrature (error O(h^8) per panel).
/// Panels are uniform on [a, b]; the integrand is evaluated only at
/// interior Gauss nodes, so endpoint singular weights (s^{N-1} at s = 0)
/// never get sampled at the endpoint itself.
namespace quad {

inline constexpr std::array<double, 4> kNodes = {
    -0.86113631159405258, -0.33998104358485626,
     0.33998104358485626,  0.86113631159405258};
inline constexpr std::array<double, 4> kWeights = {
    0.34785484513745386, 0.65214515486254614,
    0.65214515486254614, 0.34785484513745386};

template <typename F>
double integrate(F&& f, double a, double b, int panels) {
    if (!(b > a)) return 0.0;
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double acc = 0.0;
        for (int i = 0; i < 4; ++i)
            acc += kWeights[i] * f(mid + 0.5 * h * kNodes[i]);
        total += acc * 0.5 * h;
    }
    return total;
}

/// Panel count for a target resolution of `per_unit` panels per unit length
/// (at least `min_panels`).
inline int panels_for(double a, double b, int per_unit = 6, int min_panels = 8) {
    const double len = b - a;
    const int n = static_cast<int>(std::ceil(len * per_unit));
    return n < min_panels ? min_panels : n;
}

} // namespace quad
} // namespace selfsim
