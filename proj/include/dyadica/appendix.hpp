#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dyadica/quadrature.hpp"

namespace dyadica {

/// Weight-pair counterexample on (0, 1/2): finite local A_p but divergent
/// quadratic offset A_p. Exponent algebra: a_l = l^eta with
/// 2 eta + 1 = (alpha - eps) 2/p, equivalently eta p - alpha = -eps - p/2.
struct AppendixConfig {
    double p = 1.5;
    double alpha = 1.0;
    double eps = 0.1;
    double eta = 0;
    std::int64_t n_max = 1000000;
    bool dual = false;  // p > 2 runs the construction at p' with alpha = 1

    static AppendixConfig make(double p, double alpha, double eps, std::int64_t n_max) {
        AppendixConfig c;
        c.p = p;
        c.alpha = alpha;
        c.eps = eps;
        c.n_max = n_max;
        if (p > 2.0) {
            c.dual = true;
            c.p = p / (p - 1.0);
            c.alpha = 1.0;
        }
        if (!(c.p > 1.0 && c.p < 2.0)) throw std::invalid_argument("appendix: need p in (1,2) or p > 2");
        if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw std::invalid_argument("appendix: alpha in (0,1]");
        if (!(c.eps > 0.0 && c.eps < (2.0 - c.p) / 2.0))
            throw std::invalid_argument("appendix: eps in (0, (2-p)/2)");
        if (!(n_max >= 1 && n_max <= 10000000)) throw std::invalid_argument("appendix: n_max in [1, 1e7]");
        c.eta = ((c.alpha - c.eps) * 2.0 / c.p - 1.0) / 2.0;
        // both printed forms of the exponent relation, to 1e-14
        if (std::abs(2.0 * c.eta + 1.0 - (c.alpha - c.eps) * 2.0 / c.p) > 1e-14 ||
            std::abs(c.eta * c.p - c.alpha - (-c.eps - c.p / 2.0)) > 1e-14)
            throw std::logic_error("appendix: exponent algebra violated");
        return c;
    }
};

/// f(x) = 1/(x (ln 1/x)^{1+alpha}) on (0, 1/2); also sigma's density and
/// v^{1-p'}.
inline double appendix_f(double x, double alpha) {
    if (x <= 0.0 || x >= 0.5) return 0.0;
    return 1.0 / (x * std::pow(std::log(1.0 / x), 1.0 + alpha));
}

/// Antiderivative of f: (ln 1/x)^{-alpha}/alpha, tending to 0 at x = 0.
inline double appendix_f_primitive(double x, double alpha) {
    if (x <= 0.0) return 0.0;
    if (x > 0.5) x = 0.5;
    return std::pow(std::log(1.0 / x), -alpha) / alpha;
}

inline double appendix_f_mass(double a, double b, double alpha) {
    return appendix_f_primitive(b, alpha) - appendix_f_primitive(a, alpha);
}

/// omega's density [x (ln 1/x)^alpha]^{p-1} on (0, 1/2).
inline double appendix_w(double x, double p, double alpha) {
    if (x <= 0.0 || x >= 0.5) return 0.0;
    return std::pow(x * std::pow(std::log(1.0 / x), alpha), p - 1.0);
}

/// v's density [x (ln 1/x)^{1+alpha}]^{p-1} on (0, 1/2).
inline double appendix_v(double x, double p, double alpha) {
    if (x <= 0.0 || x >= 0.5) return 0.0;
    return std::pow(x * std::pow(std::log(1.0 / x), 1.0 + alpha), p - 1.0);
}

/// Local A_p functional (|I|^{-1} int_I w)(|I|^{-1} int_I v^{1-p'})^{p-1} on
/// I = [a, b] inside (0, 1/2). The v-part is exact, the w-part quadrature.
inline double local_ap(double p, double alpha, double a, double b) {
    if (!(a >= 0.0 && b <= 0.5 && b > a)) throw std::invalid_argument("local_ap: need [a,b] in [0,1/2]");
    double len = b - a;
    double wpart;
    auto w = [&](double x) { return appendix_w(x, p, alpha); };
    if (a == 0.0)
        wpart = integrate_singular_left(w, b, 1e-12);
    else
        wpart = adaptive_gl(w, a, b, 1e-12);
    double vpart = appendix_f_mass(a, b, alpha);
    return (wpart / len) * std::pow(vpart / len, p - 1.0);
}

struct QuadraticSums {
    double rhs = 0;       // sum_k (sum_{l<=k} a_l^2)^{p/2} k^{-(1+alpha)}
    double lhs = 0;       // sum_k (sum_{l<=k} |a_l 2^l l^{-alpha}|^2)^{p/2} 2^{-kp} k^{alpha(p-1)}
    double lhs_post = 0;  // literal post-substitution sum_k k^{eta p - alpha}
};

namespace detail {
struct Kahan {
    double s = 0, c = 0;
    void add(double x) {
        double y = x - c, t = s + y;
        c = (t - s) - y;
        s = t;
    }
};
}  // namespace detail

/// Partial sums of the two printed quadratic functionals with a_l = l^eta.
/// The geometric inner sum is carried through the normalized recurrence
/// T_k = 1 + (1/4) T_{k-1} ((k-1)/k)^{2(eta-alpha)} so that nothing overflows:
/// the k-th left-hand term is exactly k^{eta p - alpha} T_k^{p/2}.
inline QuadraticSums quadratic_sums(const AppendixConfig& cfg, std::int64_t N) {
    if (N < 1 || N > cfg.n_max) throw std::invalid_argument("quadratic_sums: N in [1, n_max]");
    detail::Kahan rhs, lhs, post, prefix;
    double T = 1.0;
    double e2 = 2.0 * (cfg.eta - cfg.alpha);
    for (std::int64_t k = 1; k <= N; ++k) {
        double kk = double(k);
        prefix.add(std::pow(kk, 2.0 * cfg.eta));
        rhs.add(std::pow(prefix.s, cfg.p / 2.0) * std::pow(kk, -(1.0 + cfg.alpha)));
        if (k > 1) T = 1.0 + 0.25 * T * std::pow((kk - 1.0) / kk, e2);
        lhs.add(std::pow(kk, cfg.eta * cfg.p - cfg.alpha) * std::pow(T, cfg.p / 2.0));
        post.add(std::pow(kk, cfg.eta * cfg.p - cfg.alpha));
    }
    return {rhs.s, lhs.s, post.s};
}

/// Maximal function of f at x by scanning intervals [0, t] around and above x
/// together with shrinking centered windows; f is monotone so these candidates
/// attain the supremum to high accuracy.
inline double appendix_maximal(double x, double alpha) {
    if (x <= 0.0) return 0.0;
    double best = 0.0;
    for (int j = 0; j <= 60; ++j) {
        double t = x * std::exp2(double(j) * 0.5);
        best = std::max(best, appendix_f_mass(0.0, std::min(t, 0.5), alpha) / t);
        if (t > 1.0) break;
    }
    for (int j = 1; j <= 30; ++j) {
        double h = x * std::exp2(-double(j));
        double lo = x - h, hi = std::min(x + h, 0.5);
        if (hi <= lo) continue;
        best = std::max(best, appendix_f_mass(lo, hi, alpha) / (hi - lo));
    }
    return best;
}

/// Ratios Mf(x) * x (ln 1/x)^alpha over a grid; the printed comparability.
inline std::vector<double> maximal_profile(double alpha, const std::vector<double>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (!(x > 0.0 && x < 0.5)) throw std::invalid_argument("maximal_profile: x in (0,1/2)");
        out.push_back(appendix_maximal(x, alpha) * x * std::pow(std::log(1.0 / x), alpha));
    }
    return out;
}

/// I(eps_cut) = int_{eps_cut}^{1/2} (Mf)^p w dx; grows like ln ln(1/eps) for
/// alpha = 1 and like (ln 1/eps)^{1-alpha}/(1-alpha) for alpha < 1.
inline double maximal_tail_integral(double p, double alpha, double eps_cut) {
    if (!(eps_cut > 0.0 && eps_cut < 0.5)) throw std::invalid_argument("maximal_tail_integral: cut in (0,1/2)");
    // (Mf)^p w written as (Mf x (ln 1/x)^alpha)^p / (x (ln 1/x)^alpha): the
    // first factor is O(1), so nothing overflows near x = 0
    auto integrand = [&](double x) {
        double scale = x * std::pow(std::log(1.0 / x), alpha);
        return std::pow(appendix_maximal(x, alpha) * scale, p) / scale;
    };
    // dyadic panels toward 0 with fixed composite rule: Mf has kinks where the
    // maximizing interval switches, so adaptive refinement cannot converge
    detail::Kahan total;
    double hi = 0.5;
    while (hi > eps_cut) {
        double lo = std::max(0.5 * hi, eps_cut);
        int sub = 8;
        for (int s = 0; s < sub; ++s) {
            double a = lo + (hi - lo) * s / sub, b = lo + (hi - lo) * (s + 1) / sub;
            total.add(gauss7(integrand, a, b));
        }
        hi = lo;
    }
    return total.s;
}

/// int f^p v = int f = (ln 2)^{-alpha}/alpha, the finite companion integral.
inline double companion_mass(double alpha) {
    return std::pow(std::log(2.0), -alpha) / alpha;
}

}  // namespace dyadica
