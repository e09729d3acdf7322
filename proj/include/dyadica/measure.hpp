#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyadica/grid.hpp"
#include "dyadica/quadrature.hpp"

namespace dyadica {

struct Atom {
    std::array<double, 3> x{0, 0, 0};
    double m = 0;
};

/// Finite atomic measure on [0,1)^n with an eagerly built per-cube mass table
/// over the dyadic family of its grid. Immutable after construction.
class AtomicMeasure {
  public:
    AtomicMeasure() = default;
    AtomicMeasure(GridSpec grid, std::vector<Atom> atoms) : grid_(grid), atoms_(std::move(atoms)) {
        for (const auto& a : atoms_) {
            if (a.m <= 0) throw std::invalid_argument("AtomicMeasure: nonpositive mass");
            for (int j = 0; j < grid_.n; ++j)
                if (a.x[j] < 0 || a.x[j] >= 1) throw std::invalid_argument("AtomicMeasure: atom outside domain");
        }
        build_tables();
    }

    const GridSpec& grid() const { return grid_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double total_mass() const { return total_; }

    /// |I|_mu, exact sum over contained atoms.
    double cube_mass(const CubeId& I) const {
        if (I.level > grid_.L) throw std::invalid_argument("cube_mass: level exceeds depth");
        const auto& tbl = mass_[std::size_t(I.level)];
        auto it = tbl.find(I.linear(grid_.n));
        return it == tbl.end() ? 0.0 : it->second;
    }

    double box_mass(const Box& b) const {
        double s = 0;
        for (const auto& a : atoms_)
            if (b.contains(a.x, grid_.n)) s += a.m;
        return s;
    }

    /// Atom indices inside a cube (built on demand, cached).
    const std::vector<std::uint32_t>& atoms_in(const CubeId& I) const {
        auto key = (std::uint64_t(I.level) << 56) | I.linear(grid_.n);
        auto it = members_.find(key);
        if (it != members_.end()) return it->second;
        std::vector<std::uint32_t> idx;
        for (std::uint32_t i = 0; i < atoms_.size(); ++i)
            if (atom_cell(i, I.level).coords == I.coords) idx.push_back(i);
        return members_.emplace(key, std::move(idx)).first->second;
    }

    /// Finest-level cell containing atom i, truncated to `level`.
    CubeId atom_cell(std::uint32_t i, int level) const {
        CubeId c;
        c.level = level;
        for (int j = 0; j < grid_.n; ++j) {
            auto k = std::uint64_t(std::floor(std::ldexp(atoms_[i].x[j], level)));
            if (k >= (std::uint64_t(1) << level)) k = (std::uint64_t(1) << level) - 1;
            c.coords[j] = std::uint32_t(k);
        }
        return c;
    }

    /// Cubes of positive mass at each level (the support of the mass table).
    std::vector<CubeId> support_cubes(int max_level = -1) const {
        int top = max_level < 0 ? grid_.L : std::min(max_level, grid_.L);
        std::vector<CubeId> out;
        for (int lvl = 0; lvl <= top; ++lvl) {
            for (const auto& [lin, m] : mass_[std::size_t(lvl)]) {
                CubeId I;
                I.level = lvl;
                std::uint64_t rest = lin;
                for (int j = 0; j < grid_.n; ++j) {
                    I.coords[j] = std::uint32_t(rest & ((std::uint64_t(1) << lvl) - 1));
                    rest >>= lvl;
                }
                out.push_back(I);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Moments \int_I ((x-c_I)/l(I))^beta dmu for all |beta| <= d (graded order).
    std::vector<double> moments(const CubeId& I, int d) const {
        auto betas = multi_indices(grid_.n, d);
        std::vector<double> out(betas.size(), 0.0);
        for (auto i : atoms_in(I)) {
            std::array<double, 3> z{0, 0, 0};
            for (int j = 0; j < grid_.n; ++j) z[j] = (atoms_[i].x[j] - I.center(j)) / I.side();
            for (std::size_t b = 0; b < betas.size(); ++b) {
                double v = atoms_[i].m;
                for (int j = 0; j < grid_.n; ++j)
                    for (int e = 0; e < betas[b][j]; ++e) v *= z[j];
                out[b] += v;
            }
        }
        return out;
    }

    /// Multi-indices with total degree <= d, graded lexicographic.
    static std::vector<std::array<int, 3>> multi_indices(int n, int d) {
        std::vector<std::array<int, 3>> out;
        for (int deg = 0; deg <= d; ++deg) {
            std::array<int, 3> b{0, 0, 0};
            // enumerate b with |b| = deg over first n coordinates
            std::function<void(int, int)> rec = [&](int j, int rem) {
                if (j == n - 1) {
                    b[j] = rem;
                    out.push_back(b);
                    return;
                }
                for (int v = 0; v <= rem; ++v) {
                    b[j] = v;
                    rec(j + 1, rem - v);
                }
            };
            rec(0, deg);
        }
        return out;
    }

  private:
    void build_tables() {
        mass_.assign(std::size_t(grid_.L) + 1, {});
        total_ = 0;
        for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
            total_ += atoms_[i].m;
            for (int lvl = 0; lvl <= grid_.L; ++lvl)
                mass_[std::size_t(lvl)][atom_cell(i, lvl).linear(grid_.n)] += atoms_[i].m;
        }
    }

    GridSpec grid_;
    std::vector<Atom> atoms_;
    std::vector<std::unordered_map<std::uint64_t, double>> mass_;
    mutable std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> members_;
    double total_ = 0;
};

/// Closed-form 1-D densities used by the appendix weight pair.
struct DensityMeasure {
    enum class Family { AppendixSigma, AppendixOmega, Power };
    Family family = Family::AppendixSigma;
    double p = 1.5;      // AppendixSigma/Omega
    double alpha = 1.0;  // AppendixSigma/Omega
    double a = 0.0;      // Power exponent

    /// Mass of (u, v]; support is (0,1/2) for the appendix families, (0,1) for Power.
    double interval_mass(double u, double v, double tol = 1e-12) const {
        if (v <= u) return 0.0;
        switch (family) {
            case Family::AppendixSigma: {
                u = std::max(u, 0.0);
                v = std::min(v, 0.5);
                if (v <= u) return 0.0;
                return sigma_primitive(v) - sigma_primitive(u);
            }
            case Family::AppendixOmega: {
                u = std::max(u, 0.0);
                v = std::min(v, 0.5);
                if (v <= u) return 0.0;
                auto f = [this](double x) {
                    return std::pow(x * std::pow(std::log(1.0 / x), alpha), p - 1.0);
                };
                if (u <= 0.0) return integrate_singular_left(f, v, tol);
                return adaptive_gl(f, u, v, tol);
            }
            case Family::Power: {
                u = std::max(u, 0.0);
                v = std::min(v, 1.0);
                if (v <= u) return 0.0;
                return (std::pow(v, a + 1.0) - std::pow(u, a + 1.0)) / (a + 1.0);
            }
        }
        return 0.0;
    }

    /// Primitive of 1/(x (ln 1/x)^{1+alpha}): (ln 1/x)^{-alpha} / alpha.
    double sigma_primitive(double x) const {
        if (x <= 0.0) return 0.0;
        return std::pow(std::log(1.0 / x), -alpha) / alpha;
    }
};

struct DoublingWitness {
    CubeId cube;
    double ratio = 0;
    int j = 0;
};

struct DoublingReport {
    double constant = 1.0;  // sup |2Q|/|Q|
    bool infinite = false;
    double theta = 0.0;     // doubling exponent
    double c = 1.0;
    DoublingWitness witness_constant;
    DoublingWitness witness_theta;
};

/// sup over dyadic Q (with 2Q inside the domain) of |2Q|_mu / |Q|_mu.
inline DoublingReport doubling_constant(const AtomicMeasure& mu) {
    const auto& g = mu.grid();
    DoublingReport rep;
    rep.constant = 0.0;
    for (const auto& Q : all_cubes(g)) {
        Box twoQ = dilate(Q, g.n, 2.0);
        // only cubes whose concentric double stays inside [0,1)^n
        bool inside = true;
        for (int j = 0; j < g.n; ++j) {
            double c = Q.center(j), h = Q.side();
            if (c - h < 0.0 || c + h > 1.0) inside = false;
        }
        if (!inside) continue;
        double mQ = mu.cube_mass(Q);
        double m2Q = mu.box_mass(twoQ);
        if (mQ == 0.0) {
            if (m2Q > 0.0) {
                rep.infinite = true;
                rep.witness_constant = {Q, std::numeric_limits<double>::infinity(), 0};
                return rep;
            }
            continue;
        }
        double r = m2Q / mQ;
        if (r > rep.constant) {
            rep.constant = r;
            rep.witness_constant = {Q, r, 0};
        }
    }
    if (rep.constant < 1.0) rep.constant = 1.0;
    return rep;
}

/// Doubling exponent via center-descendant chains: theta is the largest
/// (1/j) log2(|Q| / |tower(c_Q, Q, j)|) over cubes of positive mass; c = 1.
inline DoublingReport doubling_exponent(const AtomicMeasure& mu) {
    const auto& g = mu.grid();
    DoublingReport rep = doubling_constant(mu);
    rep.theta = 0.0;
    rep.c = 1.0;
    for (const auto& Q : mu.support_cubes(g.L - 1)) {
        double mQ = mu.cube_mass(Q);
        std::array<double, 3> c{0, 0, 0};
        for (int j = 0; j < g.n; ++j) c[j] = Q.center(j);
        for (int j = 1; Q.level + j <= g.L; ++j) {
            double md = mu.cube_mass(tower(g, c, Q, j));
            if (md == 0.0) {
                rep.infinite = true;
                rep.witness_theta = {Q, std::numeric_limits<double>::infinity(), j};
                return rep;
            }
            double t = std::log2(mQ / md) / double(j);
            if (t > rep.theta) {
                rep.theta = t;
                rep.witness_theta = {Q, t, j};
            }
        }
    }
    return rep;
}

/// Measured extended doubling factor: sup over dyadic Q of positive mass and
/// j >= 0 of |2^{j+1}Q n domain|_mu / |2^j Q n domain|_mu. Used for the
/// geometric-series band of the kappa-Poisson reduction.
inline double extended_doubling_factor(const AtomicMeasure& mu) {
    const auto& g = mu.grid();
    double best = 1.0;
    for (const auto& Q : mu.support_cubes()) {
        double prev = mu.cube_mass(Q);
        for (int j = 1;; ++j) {
            double cur = mu.box_mass(dilate(Q, g.n, std::ldexp(1.0, j)));
            if (prev > 0.0) best = std::max(best, cur / prev);
            prev = cur;
            if (std::ldexp(Q.side(), j) >= 2.0) break;  // dilate covers the domain
        }
    }
    return best;
}

// ---- generators ----------------------------------------------------------

inline AtomicMeasure generate_uniform(const GridSpec& g, int depth) {
    if (depth > g.L) throw std::invalid_argument("generate_uniform: depth exceeds grid");
    std::vector<Atom> atoms;
    std::uint64_t cells = std::uint64_t(1) << (g.n * depth);
    double m = 1.0 / double(cells);
    for (std::uint64_t idx = 0; idx < cells; ++idx) {
        Atom a;
        a.m = m;
        std::uint64_t rest = idx;
        for (int j = 0; j < g.n; ++j) {
            auto c = std::uint32_t(rest & ((std::uint64_t(1) << depth) - 1));
            rest >>= depth;
            a.x[j] = std::ldexp(double(c) + 0.5, -depth);
        }
        atoms.push_back(a);
    }
    return AtomicMeasure(g, std::move(atoms));
}

/// Multiplicative cascade: each parent's mass splits to children with per-axis
/// ratios drawn uniformly from [beta, 1-beta]. beta = 1/2 forces uniform.
inline AtomicMeasure generate_cascade(const GridSpec& g, double beta, int depth,
                                      std::uint64_t seed) {
    if (beta <= 0.0 || beta > 0.5) throw std::invalid_argument("generate_cascade: beta in (0, 1/2]");
    if (depth > g.L) throw std::invalid_argument("generate_cascade: depth exceeds grid");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(beta, 1.0 - beta);
    std::vector<Atom> atoms;
    std::function<void(const CubeId&, double)> rec = [&](const CubeId& I, double mass) {
        if (I.level == depth) {
            Atom a;
            a.m = mass;
            for (int j = 0; j < g.n; ++j) a.x[j] = I.center(j);
            atoms.push_back(a);
            return;
        }
        std::array<double, 3> r{0.5, 0.5, 0.5};
        for (int j = 0; j < g.n; ++j) r[j] = (beta == 0.5) ? 0.5 : unif(rng);
        for (const auto& c : children(g, I)) {
            double f = 1.0;
            for (int j = 0; j < g.n; ++j) f *= (c.coords[j] & 1u) ? (1.0 - r[j]) : r[j];
            rec(c, mass * f);
        }
    };
    rec(root_cube(), 1.0);
    return AtomicMeasure(g, std::move(atoms));
}

/// 1-D density x^a discretized to cell-exact atoms at depth.
inline AtomicMeasure generate_power(const GridSpec& g, double a, int depth) {
    if (g.n != 1) throw std::invalid_argument("generate_power: 1-D only");
    DensityMeasure d{DensityMeasure::Family::Power, 0, 0, a};
    std::vector<Atom> atoms;
    for (std::uint32_t c = 0; c < (1u << depth); ++c) {
        double lo = std::ldexp(double(c), -depth), hi = std::ldexp(double(c) + 1.0, -depth);
        double m = d.interval_mass(lo, hi);
        if (m > 0) atoms.push_back({{std::ldexp(double(c) + 0.5, -depth), 0, 0}, m});
    }
    return AtomicMeasure(g, std::move(atoms));
}

/// Appendix weight discretized to cell-exact atoms on (0, 1/2).
inline AtomicMeasure generate_appendix(const GridSpec& g, DensityMeasure::Family fam, double p,
                                       double alpha, int depth) {
    if (g.n != 1) throw std::invalid_argument("generate_appendix: 1-D only");
    DensityMeasure d{fam, p, alpha, 0};
    std::vector<Atom> atoms;
    for (std::uint32_t c = 0; c < (1u << depth); ++c) {
        double lo = std::ldexp(double(c), -depth), hi = std::ldexp(double(c) + 1.0, -depth);
        if (lo >= 0.5) break;
        double m = d.interval_mass(lo, std::min(hi, 0.5));
        if (m > 0) atoms.push_back({{0.5 * (lo + std::min(hi, 0.5)), 0, 0}, m});
    }
    return AtomicMeasure(g, std::move(atoms));
}

inline AtomicMeasure generate_point_masses(const GridSpec& g, std::vector<Atom> atoms) {
    return AtomicMeasure(g, std::move(atoms));
}

}  // namespace dyadica
