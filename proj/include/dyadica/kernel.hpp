#pragma once

#include <Eigen/Dense>
#include <random>

#include "dyadica/estimate.hpp"
#include "dyadica/grid.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

/// Fractional singular kernel family with smooth truncation at scales (delta, R).
struct KernelSpec {
    enum class Family { Hilbert, SignedFractional, RieszType };

    int n = 1;
    double lambda = 0.0;
    Family family = Family::Hilbert;
    int component = 0;  // RieszType coordinate j
    double delta = 0.1;
    double R = 1.0;

    void validate() const {
        if (!(delta > 0 && delta < R)) throw std::invalid_argument("KernelSpec: need 0 < delta < R");
        if (lambda < 0 || lambda >= n) throw std::invalid_argument("KernelSpec: lambda in [0, n)");
        if (family == Family::Hilbert && n != 1)
            throw std::invalid_argument("KernelSpec: Hilbert is 1-D");
        if (family == Family::SignedFractional && (n != 1 || lambda <= 0 || lambda >= 1))
            throw std::invalid_argument("KernelSpec: SignedFractional needs n=1, 0<lambda<1");
        if (component < 0 || component >= n) throw std::invalid_argument("KernelSpec: bad component");
    }
};

/// Quintic smoothstep: 0 for s<=0, 6s^5-15s^4+10s^3 on (0,1), 1 for s>=1. C^2.
inline double smoothstep5(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

/// eta_{delta,R}(t): identically 1 on [2 delta, R], 0 off [delta, 2R].
inline double truncation_eta(double t, double delta, double R) {
    return smoothstep5(t / delta - 1.0) * (1.0 - smoothstep5(t / R - 1.0));
}

inline double euclid_dist(const std::array<double, 3>& x, const std::array<double, 3>& y, int n) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
    return std::sqrt(s);
}

/// Untruncated kernel value K^lambda(x, y).
inline double kernel_value(const KernelSpec& k, const std::array<double, 3>& x,
                           const std::array<double, 3>& y) {
    double d = euclid_dist(x, y, k.n);
    if (d == 0.0) return 0.0;
    switch (k.family) {
        case KernelSpec::Family::Hilbert:
            return 1.0 / (x[0] - y[0]);
        case KernelSpec::Family::SignedFractional: {
            double s = x[0] - y[0];
            return (s > 0 ? 1.0 : -1.0) * std::pow(std::abs(s), k.lambda - 1.0);
        }
        case KernelSpec::Family::RieszType:
            return (x[k.component] - y[k.component]) / std::pow(d, double(k.n) - k.lambda + 1.0);
    }
    return 0.0;
}

inline double truncated_kernel(const KernelSpec& k, const std::array<double, 3>& x,
                               const std::array<double, 3>& y) {
    double d = euclid_dist(x, y, k.n);
    if (d <= k.delta || d >= 2.0 * k.R) return 0.0;
    return truncation_eta(d, k.delta, k.R) * kernel_value(k, x, y);
}

/// T_{sigma,delta,R} f at arbitrary points: exact finite sums over atoms.
inline Eigen::VectorXd apply_kernel(const KernelSpec& k, const AtomicMeasure& sigma,
                                    const Eigen::VectorXd& f,
                                    const std::vector<std::array<double, 3>>& targets) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(targets.size()));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        double s = 0;
        for (std::size_t i = 0; i < sigma.size(); ++i)
            s += truncated_kernel(k, targets[t], sigma.atoms()[i].x) * f[Eigen::Index(i)] *
                 sigma.atoms()[i].m;
        out[Eigen::Index(t)] = s;
    }
    return out;
}

/// T_{sigma} f sampled at the atoms of omega (the only values any L^p(omega)
/// norm sees).
inline Eigen::VectorXd apply_kernel(const KernelSpec& k, const AtomicMeasure& sigma,
                                    const Eigen::VectorXd& f, const AtomicMeasure& omega) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(omega.size());
    for (const auto& a : omega.atoms()) pts.push_back(a.x);
    return apply_kernel(k, sigma, f, pts);
}

/// Dense kernel matrix K[x_omega, y_sigma] with truncation.
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& k, const AtomicMeasure& sigma,
                                     const AtomicMeasure& omega) {
    Eigen::MatrixXd M(Eigen::Index(omega.size()), Eigen::Index(sigma.size()));
    for (std::size_t r = 0; r < omega.size(); ++r)
        for (std::size_t c = 0; c < sigma.size(); ++c)
            M(Eigen::Index(r), Eigen::Index(c)) =
                truncated_kernel(k, omega.atoms()[r].x, sigma.atoms()[c].x);
    return M;
}

inline Eigen::VectorXd mass_vector(const AtomicMeasure& mu) {
    Eigen::VectorXd m(Eigen::Index(mu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i) m[Eigen::Index(i)] = mu.atoms()[i].m;
    return m;
}

inline double lp_norm(const AtomicMeasure& mu, const Eigen::VectorXd& v, double p) {
    double s = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        s += mu.atoms()[i].m * std::pow(std::abs(v[Eigen::Index(i)]), p);
    return std::pow(s, 1.0 / p);
}

/// Smallest C with ||T_sigma f||_{L^p(omega)} <= C ||f||_{L^p(sigma)}.
/// p = 2: exact largest singular value of sqrt(omega) K sqrt(sigma).
/// p != 2: alternating dual-ascent lower bound, multi-start.
inline ConstantEstimate operator_norm(const KernelSpec& k, const AtomicMeasure& sigma,
                                      const AtomicMeasure& omega, double p,
                                      std::uint64_t seed = 1) {
    ConstantEstimate est;
    est.name = "operator_norm";
    est.family = "atoms of sigma/omega, truncation fixed";
    est.seed = seed;
    if (sigma.size() == 0 || omega.size() == 0) {
        est.kind = ConstantEstimate::Kind::ExactSup;
        return est;
    }
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    if (p == 2.0) {
        Eigen::VectorXd sw(Eigen::Index(sigma.size())), ow(Eigen::Index(omega.size()));
        for (std::size_t i = 0; i < sigma.size(); ++i)
            sw[Eigen::Index(i)] = std::sqrt(sigma.atoms()[i].m);
        for (std::size_t i = 0; i < omega.size(); ++i)
            ow[Eigen::Index(i)] = std::sqrt(omega.atoms()[i].m);
        Eigen::MatrixXd A = ow.asDiagonal() * K * sw.asDiagonal();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
        est.kind = ConstantEstimate::Kind::ExactSup;
        est.value = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
        if (svd.singularValues().size()) {
            // witness f in function coordinates: v / sqrt(sigma mass)
            est.witness_f = svd.matrixV().col(0).cwiseQuotient(sw);
        }
        return est;
    }
    est.kind = ConstantEstimate::Kind::LowerBound;
    double q = p / (p - 1.0);
    auto quotient = [&](const Eigen::VectorXd& f) {
        double nf = lp_norm(sigma, f, p);
        if (nf == 0.0) return 0.0;
        Eigen::VectorXd u = K * (f.cwiseProduct(mass_vector(sigma)));
        return lp_norm(omega, u, p) / nf;
    };
    auto ascend = [&](Eigen::VectorXd f) {
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd u = K * (f.cwiseProduct(mass_vector(sigma)));
            if (u.cwiseAbs().maxCoeff() == 0.0) break;
            // L^{p'} duality map of Tf, then pull back through the adjoint
            Eigen::VectorXd g(u.size());
            for (Eigen::Index i = 0; i < u.size(); ++i)
                g[i] = (u[i] > 0 ? 1.0 : -1.0) * std::pow(std::abs(u[i]), p - 1.0);
            Eigen::VectorXd v = K.transpose() * (g.cwiseProduct(mass_vector(omega)));
            Eigen::VectorXd fn(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i)
                fn[i] = (v[i] > 0 ? 1.0 : -1.0) * std::pow(std::abs(v[i]), q - 1.0);
            double nn = fn.cwiseAbs().maxCoeff();
            if (nn == 0.0) break;
            f = fn / nn;
        }
        return f;
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> starts;
    // singleton starts at the heaviest atoms
    {
        std::vector<std::size_t> idx(sigma.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
            return sigma.atoms()[a].m > sigma.atoms()[b].m;
        });
        for (std::size_t r = 0; r < std::min<std::size_t>(6, idx.size()); ++r) {
            Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(sigma.size()));
            f[Eigen::Index(idx[r])] = 1.0;
            starts.push_back(f);
        }
    }
    // tower indicators around the heaviest atom
    {
        const auto& g = sigma.grid();
        std::uint32_t hv = 0;
        for (std::uint32_t i = 1; i < sigma.size(); ++i)
            if (sigma.atoms()[i].m > sigma.atoms()[hv].m) hv = i;
        for (int lvl = 0; lvl <= g.L; ++lvl) {
            CubeId I = sigma.atom_cell(hv, lvl);
            Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(sigma.size()));
            for (auto i : sigma.atoms_in(I)) f[i] = 1.0;
            starts.push_back(f);
            if (starts.size() >= 14) break;
        }
    }
    while (starts.size() < 26) {
        Eigen::VectorXd f(Eigen::Index(sigma.size()));
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        starts.push_back(f);
    }
    for (auto& f0 : starts) {
        Eigen::VectorXd f = ascend(f0);
        double v0 = quotient(f0), v = quotient(f);
        if (v0 > v) {
            v = v0;
            f = f0;
        }
        if (v > est.value) {
            est.value = v;
            est.witness_f = f;
        }
    }
    return est;
}

/// kappa-Poisson integral of order lambda and smoothing order t:
/// P_t^lambda(J, mu) = int l(J)^t / (l(J) + |y - c_J|)^{t + n - lambda} dmu(y).
inline double poisson(const CubeId& J, const AtomicMeasure& mu, double lambda, int t) {
    const int n = mu.grid().n;
    std::array<double, 3> c{0, 0, 0};
    for (int j = 0; j < n; ++j) c[j] = J.center(j);
    double lJ = J.side();
    double s = 0;
    for (const auto& a : mu.atoms()) {
        double d = euclid_dist(a.x, c, n);
        s += a.m * std::pow(lJ, double(t)) / std::pow(lJ + d, double(t) + n - lambda);
    }
    return s;
}

/// Same, restricted to an explicit atom index subset (realizes mu 1_E).
inline double poisson_subset(const CubeId& J, const AtomicMeasure& mu, double lambda, int t,
                             const std::vector<std::uint32_t>& idx) {
    const int n = mu.grid().n;
    std::array<double, 3> c{0, 0, 0};
    for (int j = 0; j < n; ++j) c[j] = J.center(j);
    double lJ = J.side();
    double s = 0;
    for (auto i : idx) {
        double d = euclid_dist(mu.atoms()[i].x, c, n);
        s += mu.atoms()[i].m * std::pow(lJ, double(t)) / std::pow(lJ + d, double(t) + n - lambda);
    }
    return s;
}

struct KappaLargeReport {
    double lower = 0, upper = 0;      // explicit geometric-series band
    double min_ratio = 0, max_ratio = 0;
    double theta = 0, ext_factor = 0;
    bool pass = false;
    bool doubling = true;
    CubeId witness_min, witness_max;
};

/// Checks that the kappa-Poisson average reduces to the ordinary average:
/// P_kappa^lambda(Q, mu) / (|Q|^{lambda/n - 1} |Q|_mu) stays inside an explicit
/// band built from the measured extended doubling factor. Needs
/// kappa > theta + lambda - n for the series to be summable in principle; the
/// finite-domain sum is evaluated either way.
inline KappaLargeReport check_kappa_large(const AtomicMeasure& mu, double lambda, int kappa) {
    const auto& g = mu.grid();
    KappaLargeReport rep;
    auto dbl = doubling_exponent(mu);
    rep.theta = dbl.theta;
    rep.doubling = !dbl.infinite;
    rep.ext_factor = extended_doubling_factor(mu);
    double e = double(g.n) + kappa - lambda;
    rep.lower = std::pow(1.0 + 0.5 * std::sqrt(double(g.n)), -e);
    rep.upper = rep.ext_factor;  // mass inside 2Q
    // annuli 2^{j+1}Q \ 2^jQ; for the smallest cubes (side 2^-L) the dilate
    // covers the domain once j > L, so the finite sum below is exhaustive
    for (int j = 1; j <= g.L + 1; ++j)
        rep.upper += std::pow(2.0, -double(j - 1) * e) * std::pow(rep.ext_factor, double(j + 1));
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0;
    for (const auto& Q : mu.support_cubes(std::max(0, g.L - 2))) {
        double mQ = mu.cube_mass(Q);
        double denom = std::pow(Q.side(), lambda - double(g.n)) * mQ;
        double r = poisson(Q, mu, lambda, kappa) / denom;
        if (r < rep.min_ratio) {
            rep.min_ratio = r;
            rep.witness_min = Q;
        }
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.witness_max = Q;
        }
    }
    rep.pass = rep.min_ratio >= rep.lower * (1.0 - 1e-12) &&
               rep.max_ratio <= rep.upper * (1.0 + 1e-12);
    return rep;
}

struct PoissonDecayResult {
    double lhs = 0, rhs_scale = 0, ratio = 0;
    bool vacuous = false;
};

/// Measured constant in the Poisson decay estimate
/// P_kappa^lambda(J, sigma 1_{K \ I}) <= C (l(J)/l(I))^{kappa - eps(n+kappa-lambda)}
///   * P_kappa^lambda(I, sigma 1_{K \ I}).
inline PoissonDecayResult check_poisson_decay(const CubeId& J, const CubeId& I, const CubeId& K,
                                              const AtomicMeasure& sigma, double lambda, int kappa,
                                              double eps) {
    const int n = sigma.grid().n;
    if (!contains(I, J, n) || !contains(K, I, n))
        throw std::invalid_argument("check_poisson_decay: need J in I in K");
    std::vector<std::uint32_t> idx;
    for (auto i : sigma.atoms_in(K))
        if (sigma.atom_cell(i, I.level).coords != I.coords) idx.push_back(i);
    PoissonDecayResult res;
    if (idx.empty()) {
        res.vacuous = true;
        return res;
    }
    res.lhs = poisson_subset(J, sigma, lambda, kappa, idx);
    double pw = std::pow(J.side() / I.side(), double(kappa) - eps * (n + kappa - lambda));
    res.rhs_scale = pw * poisson_subset(I, sigma, lambda, kappa, idx);
    if (res.rhs_scale == 0.0) {
        res.vacuous = res.lhs == 0.0;
        return res;
    }
    res.ratio = res.lhs / res.rhs_scale;
    return res;
}

struct PivotalResult {
    double lhs = 0, rhs = 0, ratio = 0;
    bool vacuous = false;
    bool moment_violation = false;
};

/// Pivotal bound check: |<R T(nu), Psi_J>_omega| <= C P_kappa^lambda(J, nu)
/// int_J |Psi_J| domega, for nu supported off 2J, Psi_J with vanishing
/// omega-moments of order < kappa on J, and sup_J |R| <= 1.
inline PivotalResult pivotal_ratio(const KernelSpec& k, const CubeId& J, const AtomicMeasure& nu,
                                   const AtomicMeasure& omega, const Eigen::VectorXd& psi,
                                   const Eigen::VectorXd& rmult, int kappa) {
    const int n = omega.grid().n;
    if (nu.box_mass(dilate(J, n, 2.0)) > 0.0)
        throw std::invalid_argument("pivotal_ratio: nu must vanish on 2J");
    PivotalResult res;
    double lhs = 0, mass_psi = 0;
    for (auto i : omega.atoms_in(J)) {
        double T = 0;
        for (const auto& a : nu.atoms()) T += truncated_kernel(k, omega.atoms()[i].x, a.x) * a.m;
        lhs += omega.atoms()[i].m * rmult[i] * T * psi[i];
        mass_psi += omega.atoms()[i].m * std::abs(psi[i]);
    }
    res.lhs = std::abs(lhs);
    res.rhs = poisson(J, nu, k.lambda, kappa) * mass_psi;
    if (res.rhs == 0.0) {
        if (res.lhs > 1e-12) res.moment_violation = true;
        res.vacuous = !res.moment_violation;
        return res;
    }
    res.ratio = res.lhs / res.rhs;
    return res;
}

}  // namespace dyadica
