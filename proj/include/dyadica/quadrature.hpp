#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace dyadica {

/// Adaptive Gauss-Legendre (7 point) with interval bisection. Integrands with
/// an endpoint singularity at 0 are handled by the caller via geometric panels
/// (see integrate_singular_left).
template <class F>
double gauss7(F&& f, double a, double b) {
    static const double xg[4] = {0.0, 0.4058451513773972, 0.7415311855993945, 0.9491079123427585};
    static const double wg[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = wg[0] * f(c);
    for (int i = 1; i < 4; ++i) s += wg[i] * (f(c + h * xg[i]) + f(c - h * xg[i]));
    return s * h;
}

template <class F>
double adaptive_gl(F&& f, double a, double b, double tol, int depth = 0) {
    if (depth > 60) throw std::runtime_error("adaptive_gl: no convergence");
    double whole = gauss7(f, a, b);
    double m = 0.5 * (a + b);
    double halves = gauss7(f, a, m) + gauss7(f, m, b);
    if (std::abs(whole - halves) <= tol * (1.0 + std::abs(halves)) || (b - a) < 1e-15)
        return halves;
    return adaptive_gl(f, a, m, 0.5 * tol, depth + 1) + adaptive_gl(f, m, b, 0.5 * tol, depth + 1);
}

/// Integral over (0, b] of an integrand singular (or steep) at 0: geometric
/// panels [b/2^{k+1}, b/2^k] summed until the panel contribution is negligible.
template <class F>
double integrate_singular_left(F&& f, double b, double tol) {
    double total = 0.0;
    double hi = b;
    for (int k = 0; k < 2000; ++k) {
        double lo = 0.5 * hi;
        double piece = adaptive_gl(f, lo, hi, tol);
        total += piece;
        if (std::abs(piece) < tol * (1.0 + std::abs(total)) && k > 8) return total;
        hi = lo;
        if (hi < 1e-300) break;
    }
    return total;
}

}  // namespace dyadica
