#pragma once

#include <Eigen/Dense>

#include "dyadica/alpert.hpp"
#include "dyadica/corona.hpp"
#include "dyadica/grid.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

struct SquareKind {
    enum Tag { Haar, Alpert, Corona, ShiftedCorona, RhoDelta } tag = Haar;
    int kappa = 1;    // Alpert order (Haar forces 1)
    int tau = 2;      // shifted-corona shift
    double rho = 0.75, delta = 0.5;  // RhoDelta parameters
    // The printed P_I^{rho,delta} sums a J-independent Delta_I f; default keeps
    // that literal scalar weight, the flag switches the summand to Delta_J f.
    bool delta_j_variant = false;
    double gamma = 2.0;  // stopping threshold when a decomposition must be built
};

inline std::vector<CubeId> cubes_at_level(const GridSpec& g, int lvl) {
    std::vector<CubeId> out;
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
    return out;
}

/// Scalar weight sum_J 2^{-delta dist(J,I)/l(I)} over J with
/// 2^{-rho} l(I) <= l(J) <= 2^{rho} l(I).
inline double rho_delta_weight(const GridSpec& g, const CubeId& I, double rho, double delta) {
    int lo = std::max(0, int(std::ceil(I.level - rho)));
    int hi = std::min(g.L, int(std::floor(I.level + rho)));
    double w = 0;
    for (int lvl = lo; lvl <= hi; ++lvl)
        for (const auto& J : cubes_at_level(g, lvl))
            w += std::exp2(-delta * dist_linf(J, I, g.n) / I.side());
    return w;
}

/// Pointwise square function at atoms for the requested kind.
inline Eigen::VectorXd square_function(const SquareKind& kind, const AlpertSystem& sys,
                                       const Eigen::VectorXd& f,
                                       const CoronaDecomposition* decomp = nullptr) {
    const auto& mu = sys.measure();
    const auto& g = mu.grid();
    const auto N = Eigen::Index(mu.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
    auto add_sq = [&](const Eigen::VectorXd& v) { acc += v.cwiseProduct(v); };

    switch (kind.tag) {
        case SquareKind::Haar:
        case SquareKind::Alpert: {
            for (const auto& I : mu.support_cubes(g.L - 1)) add_sq(sys.difference(I, f));
            break;
        }
        case SquareKind::Corona: {
            if (!decomp) throw std::invalid_argument("square_function: corona kind needs decomposition");
            for (const auto& F : decomp->tree()) {
                Eigen::VectorXd P = Eigen::VectorXd::Zero(N);
                for (const auto& I : decomp->corona(F))
                    if (I.level < g.L && mu.cube_mass(I) > 0) P += sys.difference(I, f);
                add_sq(P);
            }
            break;
        }
        case SquareKind::ShiftedCorona: {
            if (!decomp) throw std::invalid_argument("square_function: corona kind needs decomposition");
            for (const auto& F : decomp->tree()) {
                Eigen::VectorXd P = Eigen::VectorXd::Zero(N);
                for (const auto& I : decomp->shifted_corona(F, kind.tau))
                    if (I.level < g.L && mu.cube_mass(I) > 0) P += sys.difference(I, f);
                add_sq(P);
            }
            break;
        }
        case SquareKind::RhoDelta: {
            for (const auto& I : mu.support_cubes(g.L - 1)) {
                if (!kind.delta_j_variant) {
                    double w = rho_delta_weight(g, I, kind.rho, kind.delta);
                    add_sq(w * sys.difference(I, f));
                } else {
                    int lo = std::max(0, int(std::ceil(I.level - kind.rho)));
                    int hi = std::min(g.L - 1, int(std::floor(I.level + kind.rho)));
                    Eigen::VectorXd P = Eigen::VectorXd::Zero(N);
                    for (int lvl = lo; lvl <= hi; ++lvl)
                        for (const auto& J : cubes_at_level(g, lvl)) {
                            if (mu.cube_mass(J) <= 0) continue;
                            P += std::exp2(-kind.delta * dist_linf(J, I, g.n) / I.side()) *
                                 sys.difference(J, f);
                        }
                    add_sq(P);
                }
            }
            break;
        }
    }
    return acc.cwiseSqrt();
}

struct MartingaleReport {
    bool ok = true;
    double max_err = 0;
    CubeId witness;
};

/// The corona generations form a martingale: for every stopping cube E with
/// stopping children, integrating the next conditional expectation over E
/// returns int_E f dmu.
inline MartingaleReport martingale_check(const CoronaDecomposition& d) {
    const auto& mu = d.measure();
    MartingaleReport rep;
    for (const auto& E : d.tree()) {
        // int_E E_{k-1} f = |E|_mu avg_E f; int_E E_k f = sum over children
        // averages plus the residual region, both against the raw integral
        double intE = 0;
        for (auto i : mu.atoms_in(E)) intE += mu.atoms()[i].m * d.f()[i];
        double coarse = mu.cube_mass(E) == 0 ? 0
                                             : mu.cube_mass(E) * (intE / mu.cube_mass(E));
        double fine = 0, residual_mass = mu.cube_mass(E), residual_int = intE;
        for (const auto& F : d.stopping_children(E)) {
            double mF = mu.cube_mass(F), iF = 0;
            for (auto i : mu.atoms_in(F)) iF += mu.atoms()[i].m * d.f()[i];
            fine += mF == 0 ? 0 : mF * (iF / mF);
            residual_mass -= mF;
            residual_int -= iF;
        }
        fine += residual_mass <= 0 ? 0 : residual_mass * (residual_int / residual_mass);
        double err = std::abs(fine - coarse) / (1.0 + std::abs(coarse));
        if (err > rep.max_err) {
            rep.max_err = err;
            rep.witness = E;
        }
    }
    rep.ok = rep.max_err <= 1e-10;
    return rep;
}

/// Dyadic maximal function M_mu f(x) = max over dyadic I containing x of E_I|f|.
inline Eigen::VectorXd maximal(const AtomicMeasure& mu, const Eigen::VectorXd& f) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
    for (const auto& I : mu.support_cubes()) {
        double a = avg_abs(mu, f, I);
        for (auto i : mu.atoms_in(I)) out[i] = std::max(out[i], a);
    }
    return out;
}

/// Vector variant (sum_j (M f_j)^2)^{1/2}.
inline Eigen::VectorXd maximal_vector(const AtomicMeasure& mu,
                                      const std::vector<Eigen::VectorXd>& fs) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
    for (const auto& f : fs) {
        Eigen::VectorXd m = maximal(mu, f);
        acc += m.cwiseProduct(m);
    }
    return acc.cwiseSqrt();
}

struct RatioReport {
    double max_ratio = 0, mean_ratio = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd witness_f;
};

/// Max over random f of ||Sf||_p / ||f||_p; decompositions are rebuilt per f
/// for the corona kinds.
inline RatioReport ratio_report(const SquareKind& kind, const AtomicMeasure& mu, double p,
                                int trials, std::uint64_t seed) {
    AlpertSystem sys(mu, kind.tag == SquareKind::Haar ? 1 : kind.kappa);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RatioReport rep;
    rep.trials = trials;
    rep.seed = seed;
    double sum = 0;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd f(Eigen::Index(mu.size()));
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        double nf = sys.norm_lp(f, p);
        if (nf == 0) continue;
        double r;
        if (kind.tag == SquareKind::Corona || kind.tag == SquareKind::ShiftedCorona) {
            CoronaDecomposition d(mu, f, kind.gamma, root_cube(), kind.tau);
            r = sys.norm_lp(square_function(kind, sys, f, &d), p) / nf;
        } else {
            r = sys.norm_lp(square_function(kind, sys, f), p) / nf;
        }
        sum += r;
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.witness_f = f;
        }
    }
    rep.mean_ratio = trials ? sum / trials : 0;
    return rep;
}

}  // namespace dyadica
