#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dyadica/grid.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

/// mu-average of |f| over I; 0 when |I|_mu = 0.
inline double avg_abs(const AtomicMeasure& mu, const Eigen::VectorXd& f, const CubeId& I) {
    double m = mu.cube_mass(I);
    if (m <= 0.0) return 0.0;
    double s = 0;
    for (auto i : mu.atoms_in(I)) s += mu.atoms()[i].m * std::abs(f[i]);
    return s / m;
}

/// Calderon-Zygmund stopping-time decomposition below a root cube: stopping
/// tree, alpha values, coronas, shifted coronas.
class CoronaDecomposition {
  public:
    CoronaDecomposition(const AtomicMeasure& mu, Eigen::VectorXd f, double Gamma, const CubeId& F0,
                        int tau = 2)
        : mu_(&mu), f_(std::move(f)), Gamma_(Gamma), tau_(tau), root_(F0) {
        if (!(Gamma > 1.0)) throw std::invalid_argument("CoronaDecomposition: Gamma > 1");
        if (mu.cube_mass(F0) <= 0.0) throw std::invalid_argument("CoronaDecomposition: |F0|_mu = 0");
        build_tree();
        build_coronas();
    }

    const AtomicMeasure& measure() const { return *mu_; }
    const Eigen::VectorXd& f() const { return f_; }
    double gamma() const { return Gamma_; }
    int tau() const { return tau_; }
    const CubeId& root() const { return root_; }
    const std::vector<CubeId>& tree() const { return tree_; }
    const std::vector<CubeId>& stopping_children(const CubeId& F) const {
        static const std::vector<CubeId> none;
        auto it = kids_.find(F);
        return it == kids_.end() ? none : it->second;
    }
    bool is_stopping(const CubeId& F) const { return alpha_.count(F) > 0; }
    double average(const CubeId& F) const { return avg_abs(*mu_, f_, F); }

    /// alpha_F = sup of E_{F'}|f| over stopping ancestors F' of F (inclusive).
    double alpha(const CubeId& F) const {
        auto it = alpha_.find(F);
        if (it == alpha_.end()) throw std::invalid_argument("alpha: not a stopping cube");
        return it->second;
    }

    /// Minimal stopping cube containing I (I below the root).
    CubeId corona_top(const CubeId& I) const {
        CubeId J = I;
        while (!is_stopping(J)) {
            if (J.level == root_.level) throw std::invalid_argument("corona_top: cube not below root");
            J = parent(J);
        }
        return J;
    }

    /// C_F: all I below F (levels <= L) whose minimal stopping ancestor is F.
    const std::vector<CubeId>& corona(const CubeId& F) const {
        auto it = coronas_.find(F);
        if (it == coronas_.end()) throw std::invalid_argument("corona: not a stopping cube");
        return it->second;
    }

    /// C_F^{tau-shift}: C_F with the top tau levels removed, plus the top tau
    /// levels of each stopping child that lie below level(F) + tau.
    std::vector<CubeId> shifted_corona(const CubeId& F, int tau) const {
        if (tau < 1) throw std::invalid_argument("shifted_corona: tau >= 1");
        std::vector<CubeId> out;
        for (const auto& I : corona(F))
            if (I.level >= F.level + tau) out.push_back(I);
        for (const auto& Fp : stopping_children(F)) {
            // N^tau(F') \ N^tau(F): top tau levels of F' that are already deep in F
            for (const auto& I : near_set(Fp, tau))
                if (I.level >= F.level + tau) out.push_back(I);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<CubeId> shifted_corona(const CubeId& F) const { return shifted_corona(F, tau_); }

    /// N^tau(F) = { J below F : l(J) > 2^-tau l(F) }.
    std::vector<CubeId> near_set(const CubeId& F, int tau) const {
        std::vector<CubeId> out;
        int top = std::min(F.level + tau - 1, mu_->grid().L);
        std::vector<CubeId> frontier{F};
        for (int lvl = F.level; lvl <= top; ++lvl) {
            out.insert(out.end(), frontier.begin(), frontier.end());
            if (lvl == mu_->grid().L) break;
            std::vector<CubeId> next;
            for (const auto& I : frontier)
                for (const auto& c : children(mu_->grid(), I)) next.push_back(c);
            frontier = std::move(next);
        }
        return out;
    }

  private:
    void build_tree() {
        tree_.push_back(root_);
        alpha_[root_] = average(root_);
        std::vector<CubeId> gen{root_};
        while (!gen.empty()) {
            std::vector<CubeId> next;
            for (const auto& F : gen) {
                double thr = Gamma_ * average(F);
                std::vector<CubeId> sel;
                select_maximal(F, thr, sel);
                for (const auto& S : sel) {
                    tree_.push_back(S);
                    parent_link_[S] = F;
                    kids_[F].push_back(S);
                    alpha_[S] = std::max(alpha_[F], average(S));
                }
                next.insert(next.end(), sel.begin(), sel.end());
            }
            gen = std::move(next);
        }
        std::sort(tree_.begin(), tree_.end());
    }

    /// Maximal strict subcubes of F with E_I|f| >= thr (and positive average).
    void select_maximal(const CubeId& F, double thr, std::vector<CubeId>& out) const {
        if (F.level >= mu_->grid().L) return;
        for (const auto& c : children(mu_->grid(), F)) {
            double a = average(c);
            if (a > 0.0 && a >= thr)
                out.push_back(c);
            else
                select_maximal(c, thr, out);
        }
    }

    void build_coronas() {
        for (const auto& F : tree_) coronas_[F] = {};
        assign(root_, root_);
    }
    void assign(const CubeId& I, const CubeId& top) {
        CubeId t = (is_stopping(I) ? I : top);
        coronas_[t].push_back(I);
        if (I.level < mu_->grid().L)
            for (const auto& c : children(mu_->grid(), I)) assign(c, t);
    }

    const AtomicMeasure* mu_;
    Eigen::VectorXd f_;
    double Gamma_;
    int tau_;
    CubeId root_;
    std::vector<CubeId> tree_;
    std::map<CubeId, CubeId> parent_link_;
    std::map<CubeId, std::vector<CubeId>> kids_;
    std::map<CubeId, double> alpha_;
    std::map<CubeId, std::vector<CubeId>> coronas_;
};

struct CoronaCheckFailure {
    std::string check;
    CubeId witness;
    double lhs = 0, rhs = 0;
};

struct CoronaReport {
    bool child_mass_ok = true;       // (i) exact, constant 1/Gamma
    bool full_carleson_ok = true;    // (ii) Gamma/(Gamma-1)
    double quasiorth_constant = 0;   // (iii) sum alpha^2 |F| / ||f||^2
    double overlap_constant = 0;     // (iv) ||sum alpha 1_F||^2 / ||f||^2
    bool average_control_ok = true;  // (v) E_I|f| < Gamma alpha(F) on C_F
    bool geom_decay_ok = true;       // (vi) beta_{lN}(F) <= 2^-l |F|_mu
    int schedule_N = 0;
    bool pass = true;
    std::vector<CoronaCheckFailure> failures;
};

inline CoronaReport check_quantitative(const CoronaDecomposition& d) {
    const auto& mu = d.measure();
    CoronaReport rep;
    double G = d.gamma();
    rep.schedule_N = int(std::floor(2.0 * G / (G - 1.0)));
    // tree generation depth per stopping cube
    std::map<CubeId, int> gen;
    for (const auto& F : d.tree())
        gen[F] = (F == d.root()) ? 0 : 0;  // filled below by walking down
    std::function<void(const CubeId&, int)> walk = [&](const CubeId& F, int g) {
        gen[F] = g;
        for (const auto& c : d.stopping_children(F)) walk(c, g + 1);
    };
    walk(d.root(), 0);

    for (const auto& F : d.tree()) {
        double mF = mu.cube_mass(F);
        // (i) child mass sum
        double cs = 0;
        for (const auto& c : d.stopping_children(F)) cs += mu.cube_mass(c);
        if (cs > mF / G + 1e-12 * mF) {
            rep.child_mass_ok = false;
            rep.failures.push_back({"child_mass", F, cs, mF / G});
        }
        // (ii) full Carleson over all stopping descendants (inclusive)
        double tot = 0;
        std::function<void(const CubeId&)> acc = [&](const CubeId& S) {
            tot += mu.cube_mass(S);
            for (const auto& c : d.stopping_children(S)) acc(c);
        };
        acc(F);
        if (tot > (G / (G - 1.0)) * mF * (1.0 + 1e-12)) {
            rep.full_carleson_ok = false;
            rep.failures.push_back({"full_carleson", F, tot, (G / (G - 1.0)) * mF});
        }
        // (v) average control inside the corona
        double aF = d.alpha(F);
        for (const auto& I : d.corona(F)) {
            double a = avg_abs(mu, d.f(), I);
            if (a > 0.0 && !(a < G * aF)) {
                rep.average_control_ok = false;
                rep.failures.push_back({"average_control", I, a, G * aF});
            }
        }
        // (vi) geometric decay schedule
        std::map<int, double> beta;  // generation-below-F -> mass
        std::function<void(const CubeId&, int)> accg = [&](const CubeId& S, int k) {
            beta[k] += mu.cube_mass(S);
            for (const auto& c : d.stopping_children(S)) accg(c, k + 1);
        };
        accg(F, 0);
        for (int l = 1; l * rep.schedule_N <= beta.rbegin()->first; ++l) {
            double b = 0;
            for (const auto& [k, m] : beta)
                if (k == l * rep.schedule_N) b = m;
            if (b > std::ldexp(mF, -l) * (1.0 + 1e-12)) {
                rep.geom_decay_ok = false;
                rep.failures.push_back({"geom_decay", F, b, std::ldexp(mF, -l)});
            }
        }
    }
    // (iii), (iv): measured constants against ||f||^2
    double fsq = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        fsq += mu.atoms()[i].m * d.f()[Eigen::Index(i)] * d.f()[Eigen::Index(i)];
    if (fsq > 0) {
        double qs = 0;
        for (const auto& F : d.tree()) qs += d.alpha(F) * d.alpha(F) * mu.cube_mass(F);
        rep.quasiorth_constant = qs / fsq;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
        for (const auto& F : d.tree())
            for (auto i : mu.atoms_in(F)) acc[i] += d.alpha(F);
        double ov = 0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            ov += mu.atoms()[i].m * acc[Eigen::Index(i)] * acc[Eigen::Index(i)];
        rep.overlap_constant = ov / fsq;
    }
    rep.pass = rep.child_mass_ok && rep.full_carleson_ok && rep.average_control_ok &&
               rep.geom_decay_ok;
    return rep;
}

}  // namespace dyadica
