#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadica {

/// Dyadic grid on the half-open unit cube [0,1)^n.
///
/// Cubes are addressed by (level, integer coords); all containment and
/// adjacency queries are exact integer arithmetic. Geometry that leaves the
/// dyadic family (concentric dilates, distances) is expressed through Box.
struct GridSpec {
    int n = 1;  // dimension, 1..3
    int L = 8;  // finest level

    GridSpec() = default;
    GridSpec(int dim, int depth) : n(dim), L(depth) {
        if (n < 1 || n > 3) throw std::invalid_argument("GridSpec: dimension must be in [1,3]");
        if (L < 1 || L > 24) throw std::invalid_argument("GridSpec: depth must be in [1,24]");
        if (n * L > 62) throw std::invalid_argument("GridSpec: n*L too large for cube indexing");
    }

    bool operator==(const GridSpec&) const = default;
};

struct CubeId {
    int level = 0;
    std::array<std::uint32_t, 3> coords{0, 0, 0};

    bool operator==(const CubeId&) const = default;
    auto operator<=>(const CubeId&) const = default;

    double side() const { return std::ldexp(1.0, -level); }
    double lo(int j) const { return std::ldexp(double(coords[j]), -level); }
    double hi(int j) const { return std::ldexp(double(coords[j]) + 1.0, -level); }
    double center(int j) const { return std::ldexp(double(coords[j]) + 0.5, -level); }

    /// Linear index among cubes of this level (n*level <= 62 bits).
    std::uint64_t linear(int n) const {
        std::uint64_t idx = 0;
        for (int j = n - 1; j >= 0; --j) idx = (idx << level) | coords[j];
        return idx;
    }
};

/// Axis-aligned half-open box, used for dilates 2Q, 3I and mass queries.
struct Box {
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{0, 0, 0};

    bool contains(const std::array<double, 3>& x, int n) const {
        for (int j = 0; j < n; ++j)
            if (x[j] < lo[j] || x[j] >= hi[j]) return false;
        return true;
    }
    bool empty(int n) const {
        for (int j = 0; j < n; ++j)
            if (hi[j] <= lo[j]) return true;
        return false;
    }
};

inline Box cube_box(const CubeId& I, int n) {
    Box b;
    for (int j = 0; j < n; ++j) {
        b.lo[j] = I.lo(j);
        b.hi[j] = I.hi(j);
    }
    return b;
}

/// Concentric dilate factor*I intersected with [0,1)^n.
inline Box dilate(const CubeId& I, int n, double factor) {
    Box b;
    double h = 0.5 * factor * I.side();
    for (int j = 0; j < n; ++j) {
        double c = I.center(j);
        b.lo[j] = std::max(0.0, c - h);
        b.hi[j] = std::min(1.0, c + h);
    }
    return b;
}

inline CubeId root_cube() { return CubeId{0, {0, 0, 0}}; }

inline CubeId parent(const CubeId& I) {
    if (I.level == 0) throw std::invalid_argument("parent: root has no parent");
    CubeId p;
    p.level = I.level - 1;
    for (int j = 0; j < 3; ++j) p.coords[j] = I.coords[j] >> 1;
    return p;
}

inline std::vector<CubeId> children(const GridSpec& g, const CubeId& I) {
    if (I.level >= g.L) throw std::invalid_argument("children: depth exceeded");
    std::vector<CubeId> out;
    out.reserve(std::size_t(1) << g.n);
    for (std::uint32_t m = 0; m < (1u << g.n); ++m) {
        CubeId c;
        c.level = I.level + 1;
        for (int j = 0; j < g.n; ++j) c.coords[j] = (I.coords[j] << 1) | ((m >> j) & 1u);
        out.push_back(c);
    }
    return out;
}

inline bool contains(const CubeId& outer, const CubeId& inner, int n) {
    if (inner.level < outer.level) return false;
    int shift = inner.level - outer.level;
    for (int j = 0; j < n; ++j)
        if ((inner.coords[j] >> shift) != outer.coords[j]) return false;
    return true;
}

/// Ancestor of I, s levels up.
inline CubeId ancestor(const CubeId& I, int s) {
    if (s < 0 || s > I.level) throw std::invalid_argument("ancestor: bad shift");
    CubeId a;
    a.level = I.level - s;
    for (int j = 0; j < 3; ++j) a.coords[j] = I.coords[j] >> s;
    return a;
}

/// l^infinity distance between the closures of two cubes; 0 when they touch.
inline double dist_linf(const CubeId& A, const CubeId& B, int n) {
    double d = 0;
    for (int j = 0; j < n; ++j) {
        double gap = std::max(A.lo(j) - B.hi(j), B.lo(j) - A.hi(j));
        d = std::max(d, gap);
    }
    return std::max(d, 0.0);
}

/// l^infinity distance from cube J to the boundary of I; 0 unless J inside I.
inline double dist_to_boundary(const CubeId& J, const CubeId& I, int n) {
    double d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        d = std::min(d, J.lo(j) - I.lo(j));
        d = std::min(d, I.hi(j) - J.hi(j));
    }
    return std::max(d, 0.0);
}

/// All J with 2^{-rho} <= l(J)/l(I) <= 2^{rho} whose closure meets closure(I),
/// clipped to the domain and to levels [0, L].
inline std::vector<CubeId> adjacent(const GridSpec& g, const CubeId& I, int rho) {
    std::vector<CubeId> out;
    int lo_lvl = std::max(0, I.level - rho);
    int hi_lvl = std::min(g.L, I.level + rho);
    for (int lvl = lo_lvl; lvl <= hi_lvl; ++lvl) {
        // conservative coordinate window; dist_linf below gives the exact test
        std::array<std::int64_t, 3> cmin{}, cmax{};
        for (int j = 0; j < g.n; ++j) {
            auto lo = std::int64_t(std::floor(std::ldexp(I.lo(j), lvl)));
            auto hi = std::int64_t(std::ceil(std::ldexp(I.hi(j), lvl)));
            cmin[j] = std::max<std::int64_t>(0, lo - 1);
            cmax[j] = std::min<std::int64_t>((std::int64_t(1) << lvl) - 1, hi);
        }
        std::array<std::int64_t, 3> c = cmin;
        while (true) {
            CubeId J;
            J.level = lvl;
            for (int j = 0; j < g.n; ++j) J.coords[j] = std::uint32_t(c[j]);
            if (dist_linf(I, J, g.n) == 0.0) out.push_back(J);
            int j = 0;
            for (; j < g.n; ++j) {
                if (++c[j] <= cmax[j]) break;
                c[j] = cmin[j];
            }
            if (j == g.n) break;
        }
    }
    return out;
}

/// J deeply embedded in I with parameters (rho, eps): containment, rho levels
/// smaller, and boundary margin dist(J, dI) > 2 sqrt(n) l(J)^eps l(I)^{1-eps}.
inline bool deeply_embedded(const GridSpec& g, const CubeId& J, const CubeId& I, int rho,
                            double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("deeply_embedded: eps in (0,1)");
    if (!contains(I, J, g.n)) return false;
    if (J.level - I.level < rho) return false;
    double margin = 2.0 * std::sqrt(double(g.n)) * std::pow(J.side(), eps) *
                    std::pow(I.side(), 1.0 - eps);
    return dist_to_boundary(J, I, g.n) > margin;
}

/// Unique descendant of J at s levels down containing x.
inline CubeId tower(const GridSpec& g, const std::array<double, 3>& x, const CubeId& J, int s) {
    if (J.level + s > g.L) throw std::invalid_argument("tower: depth exceeded");
    CubeId T;
    T.level = J.level + s;
    for (int j = 0; j < g.n; ++j) {
        if (x[j] < J.lo(j) || x[j] >= J.hi(j)) throw std::invalid_argument("tower: point not in cube");
        auto c = std::uint64_t(std::floor(std::ldexp(x[j], T.level)));
        // guard against landing one cell above due to rounding at the upper face
        std::uint64_t lo = std::uint64_t(J.coords[j]) << s;
        std::uint64_t hi = lo + (std::uint64_t(1) << s) - 1;
        if (c < lo) c = lo;
        if (c > hi) c = hi;
        T.coords[j] = std::uint32_t(c);
    }
    return T;
}

/// All dyadic cubes of the grid up to depth L (level-major order).
inline std::vector<CubeId> all_cubes(const GridSpec& g, int max_level = -1) {
    int top = max_level < 0 ? g.L : std::min(max_level, g.L);
    std::vector<CubeId> out;
    for (int lvl = 0; lvl <= top; ++lvl) {
        std::uint64_t count = std::uint64_t(1) << (g.n * lvl);
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            CubeId I;
            I.level = lvl;
            std::uint64_t rest = idx;
            for (int j = 0; j < g.n; ++j) {
                I.coords[j] = std::uint32_t(rest & ((std::uint64_t(1) << lvl) - 1));
                rest >>= lvl;
            }
            out.push_back(I);
        }
    }
    return out;
}

/// Cube literal "level:coord[,coord...]", e.g. "2:1" or "1:0,1".
inline CubeId parse_cube(const std::string& s, int n) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("cube literal: missing ':'");
    CubeId I;
    I.level = std::stoi(s.substr(0, colon));
    if (I.level < 0 || I.level > 24) throw std::invalid_argument("cube literal: bad level");
    std::string rest = s.substr(colon + 1);
    int j = 0;
    std::size_t pos = 0;
    while (pos <= rest.size() && j < 3) {
        auto comma = rest.find(',', pos);
        std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        long c = std::stol(tok);
        if (c < 0 || c >= (1L << I.level)) throw std::invalid_argument("cube literal: coord out of range");
        I.coords[j++] = std::uint32_t(c);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (j != n) throw std::invalid_argument("cube literal: wrong arity");
    return I;
}

inline std::string format_cube(const CubeId& I, int n) {
    std::string s = std::to_string(I.level) + ":";
    for (int j = 0; j < n; ++j) {
        if (j) s += ",";
        s += std::to_string(I.coords[j]);
    }
    return s;
}

}  // namespace dyadica
