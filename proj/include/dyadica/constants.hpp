#pragma once

#include <Eigen/Dense>
#include <random>

#include "dyadica/alpert.hpp"
#include "dyadica/estimate.hpp"
#include "dyadica/grid.hpp"
#include "dyadica/kernel.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

inline std::vector<std::uint32_t> box_atoms(const AtomicMeasure& mu, const Box& b) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < mu.size(); ++i)
        if (b.contains(mu.atoms()[i].x, mu.grid().n)) out.push_back(i);
    return out;
}

/// T_sigma 1_I sampled at the atoms of omega.
inline Eigen::VectorXd indicator_image(const Eigen::MatrixXd& K, const AtomicMeasure& sigma,
                                       const std::vector<std::uint32_t>& src_idx) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(K.rows());
    for (auto c : src_idx) u += K.col(c) * sigma.atoms()[c].m;
    return u;
}

inline std::vector<CubeId> sorted_cubes(const GridSpec& g, int max_level = -1) {
    auto cubes = all_cubes(g, max_level);
    std::sort(cubes.begin(), cubes.end());
    return cubes;
}

// ---- generic quadratic ratio in the squared coefficients s = a^2 ------------
//
// N(s) = ( sum_x uw_x (U s)_x^{p/2} )^{1/p},  D(s) likewise with (V, vw);
// all functionals below are monotone in |a_i|, so ascent works on s >= 0.

inline double half_power_norm(const Eigen::MatrixXd& M, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& s, double p) {
    Eigen::VectorXd t = M * s;
    double acc = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        if (t[i] > 0) acc += w[i] * std::pow(t[i], 0.5 * p);
    return std::pow(acc, 1.0 / p);
}

inline double quad_ratio_value(const Eigen::MatrixXd& U, const Eigen::VectorXd& uw,
                               const Eigen::MatrixXd& V, const Eigen::VectorXd& vw, double p,
                               const Eigen::VectorXd& s) {
    double den = half_power_norm(V, vw, s, p);
    if (den <= 0) return 0;
    return half_power_norm(U, uw, s, p) / den;
}

struct QuadAscentResult {
    double value = 0;
    Eigen::VectorXd s;
};

/// Multiplicative-update ascent of N(s)/D(s) over s >= 0: 500 iterations per
/// start, restarts seeded and logged by the caller.
inline QuadAscentResult quad_ascent(const Eigen::MatrixXd& U, const Eigen::VectorXd& uw,
                                    const Eigen::MatrixXd& V, const Eigen::VectorXd& vw, double p,
                                    int restarts, std::uint64_t seed, int iters = 500) {
    QuadAscentResult best;
    const auto m = U.cols();
    if (m == 0) return best;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    auto grad = [&](const Eigen::MatrixXd& M, const Eigen::VectorXd& w, const Eigen::VectorXd& s) {
        Eigen::VectorXd t = M * s;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
        for (Eigen::Index x = 0; x < t.size(); ++x)
            if (t[x] > 0) g += w[x] * std::pow(t[x], 0.5 * p - 1.0) * M.row(x).transpose();
        return g;
    };
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd s(m);
        if (r == 0)
            s.setOnes();
        else
            for (Eigen::Index i = 0; i < m; ++i) s[i] = unif(rng);
        double cur = quad_ratio_value(U, uw, V, vw, p, s);
        for (int it = 0; it < iters; ++it) {
            Eigen::VectorXd gn = grad(U, uw, s), gd = grad(V, vw, s);
            double Np = std::pow(half_power_norm(U, uw, s, p), p);
            double Dp = std::pow(half_power_norm(V, vw, s, p), p);
            if (Np <= 0 || Dp <= 0) break;
            bool moved = false;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (s[i] <= 0) continue;
                double num = gn[i] / Np, den = gd[i] / Dp;
                if (den <= 0) continue;
                double f = std::pow(num / den, 0.7);
                f = std::clamp(f, 0.25, 4.0);
                if (std::abs(f - 1.0) > 1e-14) moved = true;
                s[i] *= f;
            }
            double mx = s.maxCoeff();
            if (mx <= 0) break;
            s /= mx;
            if (!moved) break;
            double v = quad_ratio_value(U, uw, V, vw, p, s);
            if (v < cur * (1.0 - 1e-13) && it > 50) break;
            cur = std::max(cur, v);
        }
        double v = quad_ratio_value(U, uw, V, vw, p, s);
        v = std::max(v, cur);
        if (v > best.value) {
            best.value = v;
            best.s = s;
        }
    }
    return best;
}

// ---- scalar testing ---------------------------------------------------------

/// sup over dyadic I (depth <= L, |I|_sigma > 0) of
/// ||1_I T_sigma 1_I||_{L^p(omega)} / |I|_sigma^{1/p}; dual swaps everything.
inline ConstantEstimate scalar_testing(const KernelSpec& k, const AtomicMeasure& sigma,
                                       const AtomicMeasure& omega, double p, bool dual = false) {
    const AtomicMeasure& src = dual ? omega : sigma;
    const AtomicMeasure& tgt = dual ? sigma : omega;
    double ex = dual ? p / (p - 1.0) : p;
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    if (dual) K.transposeInPlace();  // K*(x,y) = K(y,x)
    ConstantEstimate est;
    est.name = dual ? "scalar_testing_dual" : "scalar_testing";
    est.kind = ConstantEstimate::Kind::ExactSup;
    est.family = "dyadic cubes depth <= L";
    for (const auto& I : sorted_cubes(src.grid())) {
        double mI = src.cube_mass(I);
        if (mI <= 0) continue;
        Eigen::VectorXd u = indicator_image(K, src, src.atoms_in(I));
        double acc = 0;
        for (auto x : tgt.atoms_in(I)) acc += tgt.atoms()[x].m * std::pow(std::abs(u[x]), ex);
        double val = std::pow(acc, 1.0 / ex) / std::pow(mI, 1.0 / ex);
        if (val > est.value) {
            est.value = val;
            est.witness_cubes = {I};
        }
    }
    return est;
}

// ---- quadratic offset Muckenhoupt -------------------------------------------

/// Scale factor |I|_sigma / |I|^{1 - lambda/n}, optionally with the offset
/// minimum over same-size cubes within distance C0 l(I).
inline double offset_mass_ratio(const AtomicMeasure& sigma, const CubeId& I, double lambda,
                                bool offset_min, double C0) {
    const auto& g = sigma.grid();
    double mass = sigma.cube_mass(I);
    if (offset_min) {
        // min over dyadic I* with l(I*) = l(I), dist(I*, I) <= C0 l(I)
        for (const auto& J : all_cubes(g, I.level)) {
            if (J.level != I.level) continue;
            if (dist_linf(J, I, g.n) <= C0 * I.side()) mass = std::min(mass, sigma.cube_mass(J));
        }
    }
    double vol = std::pow(I.side(), double(g.n));
    return mass / std::pow(vol, 1.0 - lambda / g.n);
}

inline ConstantEstimate quad_offset_muckenhoupt(const AtomicMeasure& sigma,
                                                const AtomicMeasure& omega, double p,
                                                double lambda, double C0 = 3.0,
                                                int restarts = 20, std::uint64_t seed = 1,
                                                bool offset_min = false) {
    const auto& g = sigma.grid();
    ConstantEstimate est;
    est.name = "quad_offset_muckenhoupt";
    est.family = "dyadic cubes depth <= L; p!=2 over singleton/fan/tower coefficient families";
    est.seed = seed;
    auto cubes = sorted_cubes(g);
    if (p == 2.0) {
        // separable: the ell^2 sum splits atom by atom, sup is a single-cube sup
        est.kind = ConstantEstimate::Kind::ExactSup;
        for (const auto& I : cubes) {
            double ms = sigma.cube_mass(I);
            if (ms <= 0) continue;
            double rho = offset_mass_ratio(sigma, I, lambda, offset_min, C0);
            double v = rho * std::sqrt(omega.cube_mass(I) / ms);
            if (v > est.value) {
                est.value = v;
                est.witness_cubes = {I};
            }
        }
        return est;
    }
    est.kind = ConstantEstimate::Kind::LowerBound;
    // singleton sweep is exact per cube
    for (const auto& I : cubes) {
        double ms = sigma.cube_mass(I), mw = omega.cube_mass(I);
        if (ms <= 0 || mw <= 0) continue;
        double rho = offset_mass_ratio(sigma, I, lambda, offset_min, C0);
        double v = rho * std::pow(mw, 1.0 / p) / std::pow(ms, 1.0 / p);
        if (v > est.value) {
            est.value = v;
            est.witness_cubes = {I};
        }
    }
    // coefficient ascent on structured families
    auto run_family = [&](const std::vector<CubeId>& fam, std::uint64_t s2) {
        std::vector<CubeId> live;
        for (const auto& I : fam)
            if (sigma.cube_mass(I) > 0) live.push_back(I);
        if (live.empty()) return;
        Eigen::MatrixXd U(Eigen::Index(omega.size()), Eigen::Index(live.size()));
        Eigen::MatrixXd V(Eigen::Index(sigma.size()), Eigen::Index(live.size()));
        U.setZero();
        V.setZero();
        for (std::size_t i = 0; i < live.size(); ++i) {
            double rho = offset_mass_ratio(sigma, live[i], lambda, offset_min, C0);
            for (auto x : omega.atoms_in(live[i])) U(x, Eigen::Index(i)) = rho * rho;
            for (auto y : sigma.atoms_in(live[i])) V(y, Eigen::Index(i)) = 1.0;
        }
        auto res = quad_ascent(U, mass_vector(omega), V, mass_vector(sigma), p, restarts, s2);
        if (res.value > est.value) {
            est.value = res.value;
            est.witness_cubes = live;
            est.witness_coeffs = res.s;
        }
    };
    // sibling fans and nested towers
    for (const auto& I : sorted_cubes(g, g.L - 1)) run_family(children(g, I), seed ^ I.linear(g.n));
    for (std::uint32_t a = 0; a < sigma.size(); a += std::max<std::size_t>(1, sigma.size() / 8)) {
        std::vector<CubeId> tower;
        for (int lvl = 0; lvl <= g.L; ++lvl) tower.push_back(sigma.atom_cell(a, lvl));
        run_family(tower, seed + a);
    }
    return est;
}

// ---- tailed quadratic Muckenhoupt -------------------------------------------

/// Tail integral int_{R^n \ I} f(y) / |y - c_I|^{n - lambda} dsigma(y), exact
/// over atoms.
inline double tail_integral(const AtomicMeasure& sigma, const CubeId& I, double lambda,
                            const Eigen::VectorXd& f) {
    const auto& g = sigma.grid();
    std::array<double, 3> c{0, 0, 0};
    for (int j = 0; j < g.n; ++j) c[j] = I.center(j);
    double s = 0;
    for (std::uint32_t i = 0; i < sigma.size(); ++i) {
        if (sigma.atom_cell(i, I.level).coords == I.coords) continue;
        double d = euclid_dist(sigma.atoms()[i].x, c, g.n);
        s += f[i] * sigma.atoms()[i].m / std::pow(d, double(g.n) - lambda);
    }
    return s;
}

/// Lower bound for the tailed quadratic Muckenhoupt constant via offset
/// indicator and random nonnegative witnesses. The right side drops the cube
/// indicator (the printed 1_{I_i} would annihilate tail-supported witnesses).
inline ConstantEstimate quad_tailed_muckenhoupt(const AtomicMeasure& sigma,
                                                const AtomicMeasure& omega, double p,
                                                double lambda, int budget = 20,
                                                std::uint64_t seed = 1) {
    const auto& g = sigma.grid();
    ConstantEstimate est;
    est.name = "quad_tailed_muckenhoupt";
    est.kind = ConstantEstimate::Kind::LowerBound;
    est.family = "single cubes; offset indicators and random nonneg witnesses";
    est.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto consider = [&](const CubeId& I, const Eigen::VectorXd& f) {
        double c = tail_integral(sigma, I, lambda, f);
        double mw = omega.cube_mass(I);
        if (mw <= 0) return;
        double num = std::abs(c) * std::pow(mw, 1.0 / p);
        double den = 0;
        for (std::uint32_t i = 0; i < sigma.size(); ++i)
            den += sigma.atoms()[i].m * std::pow(std::abs(f[i]), p);
        den = std::pow(den, 1.0 / p);
        if (den <= 0) return;
        if (num / den > est.value) {
            est.value = num / den;
            est.witness_cubes = {I};
            est.witness_f = f;
        }
    };
    for (const auto& I : sorted_cubes(g)) {
        if (omega.cube_mass(I) <= 0) continue;
        // same-size adjacent offset indicators
        for (const auto& J : adjacent(g, I, 0)) {
            if (J == I) continue;
            Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(sigma.size()));
            bool any = false;
            for (auto i : sigma.atoms_in(J)) {
                f[i] = 1.0;
                any = true;
            }
            if (any) consider(I, f);
        }
        // random nonnegative witnesses supported off I
        for (int t = 0; t < budget / 4 + 1; ++t) {
            Eigen::VectorXd f(Eigen::Index(sigma.size()));
            for (std::uint32_t i = 0; i < sigma.size(); ++i)
                f[i] = sigma.atom_cell(i, I.level).coords == I.coords ? 0.0 : unif(rng);
            consider(I, f);
        }
    }
    return est;
}

// ---- quadratic cube testing -------------------------------------------------

enum class TestingVariant { Local, Global, Triple };

/// Indicator region of the variant for cube I at the omega atoms.
inline std::vector<std::uint32_t> variant_region(const AtomicMeasure& omega, const CubeId& I,
                                                 TestingVariant v) {
    switch (v) {
        case TestingVariant::Local:
            return omega.atoms_in(I);
        case TestingVariant::Global: {
            std::vector<std::uint32_t> all(omega.size());
            for (std::uint32_t i = 0; i < omega.size(); ++i) all[i] = i;
            return all;
        }
        case TestingVariant::Triple:
            return box_atoms(omega, dilate(I, omega.grid().n, 3.0));
    }
    return {};
}

inline ConstantEstimate quad_testing(const KernelSpec& k, const AtomicMeasure& sigma,
                                     const AtomicMeasure& omega, double p, TestingVariant variant,
                                     int restarts = 20, std::uint64_t seed = 1) {
    const auto& g = sigma.grid();
    ConstantEstimate est;
    est.name = variant == TestingVariant::Local    ? "quad_testing_local"
               : variant == TestingVariant::Global ? "quad_testing_global"
                                                   : "quad_testing_triple";
    est.family = "dyadic cubes depth <= L; levels/towers/random coefficient families";
    est.seed = seed;
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    // per-cube image norms; at p = 2 the quadratic sup is the singleton sup
    // (weighted mediant of per-cube ratios never beats the best ratio)
    struct CubeData {
        CubeId I;
        Eigen::VectorXd u;  // 1_E T 1_I at omega atoms
    };
    std::vector<CubeData> data;
    for (const auto& I : sorted_cubes(g)) {
        if (sigma.cube_mass(I) <= 0) continue;
        Eigen::VectorXd full = indicator_image(K, sigma, sigma.atoms_in(I));
        Eigen::VectorXd u = Eigen::VectorXd::Zero(full.size());
        for (auto x : variant_region(omega, I, variant)) u[x] = full[x];
        data.push_back({I, std::move(u)});
    }
    auto single_value = [&](const CubeData& d, double ex) {
        double acc = 0;
        for (std::size_t x = 0; x < omega.size(); ++x)
            acc += omega.atoms()[x].m * std::pow(std::abs(d.u[Eigen::Index(x)]), ex);
        return std::pow(acc, 1.0 / ex) / std::pow(sigma.cube_mass(d.I), 1.0 / ex);
    };
    if (p == 2.0) {
        est.kind = ConstantEstimate::Kind::ExactSup;
        for (const auto& d : data) {
            double v = single_value(d, 2.0);
            if (v > est.value) {
                est.value = v;
                est.witness_cubes = {d.I};
            }
        }
        return est;
    }
    est.kind = ConstantEstimate::Kind::LowerBound;
    for (const auto& d : data) {
        double v = single_value(d, p);
        if (v > est.value) {
            est.value = v;
            est.witness_cubes = {d.I};
        }
    }
    auto run_family = [&](const std::vector<std::size_t>& members, std::uint64_t s2) {
        if (members.empty()) return;
        Eigen::MatrixXd U(Eigen::Index(omega.size()), Eigen::Index(members.size()));
        Eigen::MatrixXd V(Eigen::Index(sigma.size()), Eigen::Index(members.size()));
        U.setZero();
        V.setZero();
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& d = data[members[i]];
            U.col(Eigen::Index(i)) = d.u.cwiseProduct(d.u);
            for (auto y : sigma.atoms_in(d.I)) V(y, Eigen::Index(i)) = 1.0;
        }
        auto res = quad_ascent(U, mass_vector(omega), V, mass_vector(sigma), p, restarts, s2,
                               200);
        if (res.value > est.value) {
            est.value = res.value;
            est.witness_cubes.clear();
            for (auto m : members) est.witness_cubes.push_back(data[m].I);
            est.witness_coeffs = res.s;
        }
    };
    // whole levels
    for (int lvl = 0; lvl <= g.L; ++lvl) {
        std::vector<std::size_t> fam;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data[i].I.level == lvl) fam.push_back(i);
        run_family(fam, seed + std::uint64_t(lvl));
    }
    // towers over a few atoms
    for (std::uint32_t a = 0; a < sigma.size(); a += std::max<std::size_t>(1, sigma.size() / 4)) {
        std::vector<std::size_t> fam;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (contains(data[i].I, sigma.atom_cell(a, g.L), g.n) ||
                data[i].I == sigma.atom_cell(a, data[i].I.level))
                fam.push_back(i);
        run_family(fam, seed * 31 + a);
    }
    // random subsets
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int t = 0; t < 4; ++t) {
        std::vector<std::size_t> fam;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (rng() % 4 == 0) fam.push_back(i);
        run_family(fam, rng());
    }
    return est;
}

// ---- weak boundedness -------------------------------------------------------

enum class WbpVariant { HV, Extended };  // HV excludes I* = I

inline ConstantEstimate wbp(const KernelSpec& k, const AtomicMeasure& sigma,
                            const AtomicMeasure& omega, double p, WbpVariant variant,
                            int restarts = 20, std::uint64_t seed = 1) {
    const auto& g = sigma.grid();
    double q = p / (p - 1.0);
    ConstantEstimate est;
    est.name = variant == WbpVariant::HV ? "wbp_hv" : "wbp_extended";
    est.kind = ConstantEstimate::Kind::LowerBound;
    est.family = "adjacent same-size cube pairs, coefficient ascent";
    est.seed = seed;
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    struct Pair {
        CubeId I, Istar;
        double t;  // <T_sigma 1_I, 1_{I*}>_omega
    };
    std::vector<Pair> pairs;
    for (const auto& I : sorted_cubes(g)) {
        if (sigma.cube_mass(I) <= 0) continue;
        Eigen::VectorXd u = indicator_image(K, sigma, sigma.atoms_in(I));
        for (const auto& J : adjacent(g, I, 0)) {
            if (variant == WbpVariant::HV && J == I) continue;
            if (omega.cube_mass(J) <= 0) continue;
            double t = 0;
            for (auto x : omega.atoms_in(J)) t += omega.atoms()[x].m * u[x];
            pairs.push_back({I, J, t});
            // singleton witness
            double v = std::abs(t) / (std::pow(sigma.cube_mass(I), 1.0 / p) *
                                      std::pow(omega.cube_mass(J), 1.0 / q));
            if (v > est.value) {
                est.value = v;
                est.witness_cubes = {I, J};
            }
        }
    }
    if (pairs.empty()) return est;
    // alternating multiplicative ascent over per-level pair families
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (int lvl = 1; lvl <= g.L; ++lvl) {
        std::vector<std::size_t> fam;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].I.level == lvl) fam.push_back(i);
        if (fam.size() < 2) continue;
        // distinct I cubes of the family
        std::vector<CubeId> Is;
        for (auto i : fam) Is.push_back(pairs[i].I);
        std::sort(Is.begin(), Is.end());
        Is.erase(std::unique(Is.begin(), Is.end()), Is.end());
        auto icube = [&](const CubeId& I) {
            return std::size_t(std::lower_bound(Is.begin(), Is.end(), I) - Is.begin());
        };
        for (int r = 0; r < std::max(1, restarts / 4); ++r) {
            Eigen::VectorXd a(Eigen::Index(Is.size())), b(Eigen::Index(fam.size()));
            for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = r == 0 ? 1.0 : unif(rng);
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = r == 0 ? 1.0 : unif(rng);
            double prev = 0;
            for (int it = 0; it < 120; ++it) {
                // bilinear numerator sum |a_I b_pair t|
                double num = 0;
                for (std::size_t i = 0; i < fam.size(); ++i)
                    num += a[Eigen::Index(icube(pairs[fam[i]].I))] * b[Eigen::Index(i)] *
                           std::abs(pairs[fam[i]].t);
                // denominators: quadratic indicator norms
                double da = 0;
                for (std::size_t i = 0; i < Is.size(); ++i)
                    da += std::pow(a[Eigen::Index(i)], p) * sigma.cube_mass(Is[i]);
                // same-size adjacent cubes are disjoint in the half-open grid
                // only when distinct; overlapping pairs share I* across i, the
                // ell^2 stack still sums their squares independently
                Eigen::VectorXd wsq = Eigen::VectorXd::Zero(Eigen::Index(omega.size()));
                for (std::size_t i = 0; i < fam.size(); ++i)
                    for (auto x : omega.atoms_in(pairs[fam[i]].Istar))
                        wsq[x] += b[Eigen::Index(i)] * b[Eigen::Index(i)];
                double db = 0;
                for (std::size_t x = 0; x < omega.size(); ++x)
                    db += omega.atoms()[x].m * std::pow(wsq[Eigen::Index(x)], 0.5 * q);
                da = std::pow(da, 1.0 / p);
                db = std::pow(db, 1.0 / q);
                if (da <= 0 || db <= 0) break;
                double val = num / (da * db);
                if (val > est.value) {
                    est.value = val;
                    est.witness_cubes.clear();
                    for (auto j : fam) {
                        est.witness_cubes.push_back(pairs[j].I);
                        est.witness_cubes.push_back(pairs[j].Istar);
                    }
                    est.witness_coeffs = a;
                    est.witness_f = b;
                }
                if (val <= prev * (1 + 1e-12) && it > 10) break;
                prev = val;
                // multiplicative update toward equalized sensitivities
                for (std::size_t i = 0; i < fam.size(); ++i) {
                    double gi = a[Eigen::Index(icube(pairs[fam[i]].I))] * std::abs(pairs[fam[i]].t);
                    if (gi > 0) b[Eigen::Index(i)] *= std::clamp(std::pow(gi / (num / fam.size()), 0.3), 0.5, 2.0);
                }
                b /= b.maxCoeff();
                for (std::size_t i = 0; i < Is.size(); ++i) {
                    double gi = 0;
                    for (std::size_t j = 0; j < fam.size(); ++j)
                        if (pairs[fam[j]].I == Is[i]) gi += b[Eigen::Index(j)] * std::abs(pairs[fam[j]].t);
                    if (gi > 0) a[Eigen::Index(i)] *= std::clamp(std::pow(gi / (num / Is.size()), 0.3), 0.5, 2.0);
                }
                a /= a.maxCoeff();
            }
        }
    }
    return est;
}

/// Recomputes a wbp estimate's value from its stored witness (single pair, or
/// a pair family with coefficients a per distinct I and b per pair).
inline double wbp_replay(const KernelSpec& k, const AtomicMeasure& sigma,
                         const AtomicMeasure& omega, double p, const ConstantEstimate& est) {
    double q = p / (p - 1.0);
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    auto pair_t = [&](const CubeId& I, const CubeId& J) {
        Eigen::VectorXd u = indicator_image(K, sigma, sigma.atoms_in(I));
        double t = 0;
        for (auto x : omega.atoms_in(J)) t += omega.atoms()[x].m * u[x];
        return t;
    };
    std::size_t npairs = est.witness_cubes.size() / 2;
    if (npairs == 0) return 0.0;
    if (est.witness_coeffs.size() == 0) {
        const auto& I = est.witness_cubes[0];
        const auto& J = est.witness_cubes[1];
        return std::abs(pair_t(I, J)) / (std::pow(sigma.cube_mass(I), 1.0 / p) *
                                         std::pow(omega.cube_mass(J), 1.0 / q));
    }
    std::vector<CubeId> Is;
    for (std::size_t i = 0; i < npairs; ++i) Is.push_back(est.witness_cubes[2 * i]);
    std::sort(Is.begin(), Is.end());
    Is.erase(std::unique(Is.begin(), Is.end()), Is.end());
    auto icube = [&](const CubeId& I) {
        return Eigen::Index(std::lower_bound(Is.begin(), Is.end(), I) - Is.begin());
    };
    double num = 0, da = 0, db = 0;
    Eigen::VectorXd wsq = Eigen::VectorXd::Zero(Eigen::Index(omega.size()));
    for (std::size_t i = 0; i < npairs; ++i) {
        const auto& I = est.witness_cubes[2 * i];
        const auto& J = est.witness_cubes[2 * i + 1];
        double b = est.witness_f[Eigen::Index(i)];
        num += est.witness_coeffs[icube(I)] * b * std::abs(pair_t(I, J));
        for (auto x : omega.atoms_in(J)) wsq[x] += b * b;
    }
    for (std::size_t i = 0; i < Is.size(); ++i)
        da += std::pow(est.witness_coeffs[Eigen::Index(i)], p) * sigma.cube_mass(Is[i]);
    for (std::size_t x = 0; x < omega.size(); ++x)
        db += omega.atoms()[x].m * std::pow(wsq[Eigen::Index(x)], 0.5 * q);
    da = std::pow(da, 1.0 / p);
    db = std::pow(db, 1.0 / q);
    return (da > 0 && db > 0) ? num / (da * db) : 0.0;
}

// ---- Alpert weak boundedness ------------------------------------------------

/// Assembled block operator of the AWBP square function in orthonormal
/// coefficient coordinates: rows run over (I, J in Adj_rho(I), omega detail
/// index of J), columns over (I, sigma detail index of I).
inline Eigen::MatrixXd awbp_block_matrix(const KernelSpec& k, const AlpertSystem& S,
                                         const AlpertSystem& W, int rho,
                                         std::vector<std::pair<CubeId, int>>* col_index = nullptr) {
    const auto& sigma = S.measure();
    const auto& omega = W.measure();
    const auto& g = sigma.grid();
    Eigen::MatrixXd K = kernel_matrix(k, sigma, omega);
    std::vector<CubeId> Icubes;
    for (const auto& I : sorted_cubes(g, g.L - 1))
        if (sigma.cube_mass(I) > 0 && S.diff_basis(I).rows() > 0) Icubes.push_back(I);
    // columns
    std::vector<Eigen::Index> col0;
    Eigen::Index ncols = 0;
    for (const auto& I : Icubes) {
        col0.push_back(ncols);
        ncols += S.diff_basis(I).rows();
        if (col_index)
            for (Eigen::Index a = 0; a < S.diff_basis(I).rows(); ++a)
                col_index->push_back({I, int(a)});
    }
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::Index nrows = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> place;  // (row0, col0) per block
    for (std::size_t ii = 0; ii < Icubes.size(); ++ii) {
        const CubeId& I = Icubes[ii];
        const auto& HB = S.diff_basis(I);
        const auto& sidx = sigma.atoms_in(I);
        // T_sigma h_I^{sigma,a} at omega atoms, one column per a
        Eigen::MatrixXd TI(Eigen::Index(omega.size()), HB.rows());
        TI.setZero();
        for (std::size_t c = 0; c < sidx.size(); ++c)
            TI += K.col(sidx[c]) * (sigma.atoms()[sidx[c]].m * HB.col(Eigen::Index(c)).transpose());
        for (const auto& J : adjacent(g, I, rho)) {
            if (J.level >= g.L || omega.cube_mass(J) <= 0) continue;
            const auto& WB = W.diff_basis(J);
            if (WB.rows() == 0) continue;
            const auto& widx = omega.atoms_in(J);
            Eigen::MatrixXd B(WB.rows(), HB.rows());
            for (Eigen::Index b = 0; b < WB.rows(); ++b)
                for (Eigen::Index a = 0; a < HB.rows(); ++a) {
                    double s = 0;
                    for (std::size_t x = 0; x < widx.size(); ++x)
                        s += omega.atoms()[widx[x]].m * WB(b, Eigen::Index(x)) *
                             TI(widx[x], a);
                    B(b, a) = s;
                }
            place.push_back({nrows, col0[ii]});
            nrows += B.rows();
            blocks.push_back(std::move(B));
        }
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrows, ncols);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        A.block(place[b].first, place[b].second, blocks[b].rows(), blocks[b].cols()) = blocks[b];
    return A;
}

/// Square-function quotient of the AWBP inequality for a given f (values at
/// sigma atoms).
inline double awbp_quotient(const KernelSpec& k, const AlpertSystem& S, const AlpertSystem& W,
                            int rho, double p, const Eigen::VectorXd& f) {
    const auto& sigma = S.measure();
    const auto& omega = W.measure();
    const auto& g = sigma.grid();
    double nf = S.norm_lp(f, p);
    if (nf <= 0) return 0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(Eigen::Index(omega.size()));
    for (const auto& I : sorted_cubes(g, g.L - 1)) {
        if (sigma.cube_mass(I) <= 0) continue;
        Eigen::VectorXd df = S.difference(I, f);
        if (df.cwiseAbs().maxCoeff() == 0) continue;
        Eigen::VectorXd u = apply_kernel(k, sigma, df, omega);
        for (const auto& J : adjacent(g, I, rho)) {
            if (J.level >= g.L || omega.cube_mass(J) <= 0) continue;
            Eigen::VectorXd w = W.difference(J, u);
            acc += w.cwiseProduct(w);
        }
    }
    double num = 0;
    for (std::size_t x = 0; x < omega.size(); ++x)
        num += omega.atoms()[x].m * std::pow(acc[Eigen::Index(x)], 0.5 * p);
    return std::pow(num, 1.0 / p) / nf;
}

inline ConstantEstimate awbp(const KernelSpec& k, const AtomicMeasure& sigma,
                             const AtomicMeasure& omega, double p, int kappa, int rho,
                             int restarts = 20, std::uint64_t seed = 1) {
    ConstantEstimate est;
    est.name = "awbp";
    est.family = "all dyadic cubes depth <= L, Adj_rho pairs";
    est.seed = seed;
    if (sigma.size() == 0 || omega.size() == 0) {
        est.kind = ConstantEstimate::Kind::ExactSup;
        return est;
    }
    AlpertSystem S(sigma, kappa), W(omega, kappa);
    if (p == 2.0) {
        est.kind = ConstantEstimate::Kind::ExactSup;
        std::vector<std::pair<CubeId, int>> cols;
        Eigen::MatrixXd A = awbp_block_matrix(k, S, W, rho, &cols);
        if (A.rows() && A.cols()) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
            est.value = svd.singularValues()[0];
            // witness f from detail coefficients of the top singular vector
            WaveletCoefficients wc;
            wc.top = root_cube();
            Eigen::VectorXd v = svd.matrixV().col(0);
            for (std::size_t i = 0; i < cols.size(); ++i) {
                auto& vec = wc.detail[cols[i].first];
                if (vec.size() == 0)
                    vec = Eigen::VectorXd::Zero(S.diff_basis(cols[i].first).rows());
                vec[cols[i].second] = v[Eigen::Index(i)];
            }
            est.witness_f = S.reconstruct(wc);
        }
        return est;
    }
    est.kind = ConstantEstimate::Kind::LowerBound;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd f(Eigen::Index(sigma.size()));
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        double v = awbp_quotient(k, S, W, rho, p, f);
        if (v > est.value) {
            est.value = v;
            est.witness_f = f;
        }
    }
    return est;
}

// ---- ordering report --------------------------------------------------------

struct OrderingReport {
    std::vector<ConstantEstimate> table;
    std::vector<std::string> violations;
    bool pass = true;

    const ConstantEstimate& get(const std::string& name) const {
        for (const auto& e : table)
            if (e.name == name) return e;
        throw std::out_of_range("OrderingReport: " + name);
    }
};

///// Full constant table with the provable-at-desk-scale orderings asserted:
/// scalar <= triple on shared witnesses, and every norm-dominated functional
/// (testing, WBP, AWBP) below the exact p=2 operator norm. The Muckenhoupt
/// constants use a different kernel and are reported without a hard ordering.
inline OrderingReport ordering_report(const KernelSpec& k, const AtomicMeasure& sigma,
                                      const AtomicMeasure& omega, double p, double lambda,
                                      std::uint64_t seed = 1) {
    OrderingReport rep;
    auto push = [&](ConstantEstimate e) { rep.table.push_back(std::move(e)); };
    push(scalar_testing(k, sigma, omega, p, false));
    push(scalar_testing(k, sigma, omega, p, true));
    push(quad_testing(k, sigma, omega, p, TestingVariant::Local, 8, seed));
    push(quad_testing(k, sigma, omega, p, TestingVariant::Global, 8, seed));
    push(quad_testing(k, sigma, omega, p, TestingVariant::Triple, 8, seed));
    push(quad_offset_muckenhoupt(sigma, omega, p, lambda, 3.0, 8, seed));
    push(quad_tailed_muckenhoupt(sigma, omega, p, lambda, 8, seed));
    {
        ConstantEstimate hv = wbp(k, sigma, omega, p, WbpVariant::HV, 8, seed);
        ConstantEstimate ext = wbp(k, sigma, omega, p, WbpVariant::Extended, 8, seed);
        // every HV witness lies in the extended family, so the extended lower
        // bound may inherit it when the independent ascent lands lower
        if (hv.value > ext.value) {
            ext.value = hv.value;
            ext.witness_cubes = hv.witness_cubes;
            ext.witness_f = hv.witness_f;
            ext.witness_coeffs = hv.witness_coeffs;
        }
        push(std::move(hv));
        push(std::move(ext));
    }
    push(awbp(k, sigma, omega, p, 1, 1, 8, seed));
    push(operator_norm(k, sigma, omega, p, seed));
    auto check = [&](const std::string& what, double lhs, double rhs, double tol) {
        if (lhs > rhs + tol) {
            rep.pass = false;
            rep.violations.push_back(what);
        }
    };
    double scale = 1e-9 * (1.0 + rep.get("operator_norm").value);
    check("scalar <= local", rep.get("scalar_testing").value,
          rep.get("quad_testing_local").value, scale);
    check("local <= triple", rep.get("quad_testing_local").value,
          rep.get("quad_testing_triple").value, scale);
    check("triple <= global", rep.get("quad_testing_triple").value,
          rep.get("quad_testing_global").value, scale);
    check("wbp_hv <= wbp_extended", rep.get("wbp_hv").value, rep.get("wbp_extended").value,
          scale);
    if (p == 2.0) {
        double N = rep.get("operator_norm").value;
        for (const char* name : {"scalar_testing", "quad_testing_local", "quad_testing_global",
                                 "quad_testing_triple", "wbp_hv", "wbp_extended", "awbp"})
            check(std::string(name) + " <= norm", rep.get(name).value, N, scale);
    }
    return rep;
}

}  // namespace dyadica
