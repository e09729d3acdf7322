#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "dyadica/grid.hpp"
#include "dyadica/measure.hpp"

namespace dyadica {

/// Polynomial in the centered scaled monomials ((x - c_I)/l(I))^beta, |beta| < kappa.
struct CubePoly {
    CubeId cube;
    Eigen::VectorXd coeffs;  // graded-lex monomial order from AtomicMeasure::multi_indices

    double eval(const std::array<double, 3>& x, int n) const {
        if (coeffs.size() == 0) return 0.0;
        auto betas = AtomicMeasure::multi_indices(n, max_degree(n));
        std::array<double, 3> z{0, 0, 0};
        for (int j = 0; j < n; ++j) z[j] = (x[j] - cube.center(j)) / cube.side();
        double s = 0;
        for (Eigen::Index b = 0; b < coeffs.size(); ++b) {
            double v = coeffs[b];
            for (int j = 0; j < n; ++j)
                for (int e = 0; e < betas[std::size_t(b)][j]; ++e) v *= z[j];
            s += v;
        }
        return s;
    }

  private:
    int max_degree(int n) const {
        // invert dim -> degree for the graded monomial list
        for (int d = 0;; ++d)
            if (Eigen::Index(AtomicMeasure::multi_indices(n, d).size()) >= coeffs.size()) return d;
    }
};

struct WaveletCoefficients {
    CubeId top;
    Eigen::VectorXd top_coeffs;                 // in the orthonormal basis of L^2_{top;kappa}(mu)
    std::map<CubeId, Eigen::VectorXd> detail;   // I -> f_hat(I)

    double norm_sq() const {
        double s = top_coeffs.squaredNorm();
        for (const auto& [I, v] : detail) s += v.squaredNorm();
        return s;
    }
};

/// Weighted Alpert wavelet system for an atomic measure: per-cube orthonormal
/// polynomial bases of L^2_{I;kappa}(mu), projections E, differences Delta,
/// expansions and coefficient maps. Functions are vectors of values at atoms.
class AlpertSystem {
  public:
    AlpertSystem(const AtomicMeasure& mu, int kappa) : mu_(&mu), kappa_(kappa) {
        if (kappa < 1) throw std::invalid_argument("AlpertSystem: kappa >= 1");
        betas_ = AtomicMeasure::multi_indices(mu.grid().n, kappa - 1);
        for (const auto& I : mu.support_cubes()) build_projection(I);
    }

    int kappa() const { return kappa_; }
    const AtomicMeasure& measure() const { return *mu_; }
    std::size_t dim() const { return betas_.size(); }

    int rank(const CubeId& I) const {
        auto it = proj_.find(I);
        return it == proj_.end() ? 0 : int(it->second.basis.cols());
    }

    /// E_{I;kappa} f as values at all atoms (zero outside I).
    Eigen::VectorXd project_values(const CubeId& I, const Eigen::VectorXd& f) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(mu_->size()));
        auto it = proj_.find(I);
        if (it == proj_.end()) return out;
        const auto& P = it->second;
        Eigen::VectorXd t = coeffs_in_basis(P, f);
        Eigen::VectorXd vals = P.hvals.transpose() * t;
        for (std::size_t k = 0; k < P.idx.size(); ++k) out[P.idx[k]] = vals[Eigen::Index(k)];
        return out;
    }

    /// E_{I;kappa} f as a genuine polynomial (centered at c_I, scaled by l(I)).
    CubePoly project_poly(const CubeId& I, const Eigen::VectorXd& f) const {
        CubePoly p;
        p.cube = I;
        auto it = proj_.find(I);
        if (it == proj_.end()) {
            p.coeffs = Eigen::VectorXd::Zero(Eigen::Index(betas_.size()));
            return p;
        }
        const auto& P = it->second;
        p.coeffs = P.basis * coeffs_in_basis(P, f);
        return p;
    }

    /// Delta_{I;kappa} f = (sum over children E_{I'}) - E_I, values at atoms.
    Eigen::VectorXd difference(const CubeId& I, const Eigen::VectorXd& f) const {
        if (I.level >= mu_->grid().L) throw std::invalid_argument("difference: no children at depth");
        Eigen::VectorXd out = -project_values(I, f);
        for (const auto& c : children(mu_->grid(), I)) out += project_values(c, f);
        return out;
    }

    /// Orthonormal basis of the range of Delta_{I;kappa}: rows are values at the
    /// atoms of I (ordered as atoms_in(I)), orthonormal in L^2(mu).
    const Eigen::MatrixXd& diff_basis(const CubeId& I) const {
        auto it = diff_.find(I);
        if (it != diff_.end()) return it->second;
        return diff_.emplace(I, build_diff_basis(I)).first->second;
    }

    /// Coefficient vector f_hat(I) = { <f, h_{I;a}>_mu }.
    Eigen::VectorXd detail_coeffs(const CubeId& I, const Eigen::VectorXd& f) const {
        const auto& W = diff_basis(I);
        if (W.rows() == 0) return Eigen::VectorXd();
        const auto& idx = mu_->atoms_in(I);
        Eigen::VectorXd wf(Eigen::Index(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k)
            wf[Eigen::Index(k)] = mu_->atoms()[idx[k]].m * f[idx[k]];
        return W * wf;
    }

    WaveletCoefficients expand(const Eigen::VectorXd& f, const CubeId& F0) const {
        WaveletCoefficients wc;
        wc.top = F0;
        auto it = proj_.find(F0);
        wc.top_coeffs = (it == proj_.end()) ? Eigen::VectorXd() : coeffs_in_basis(it->second, f);
        for (const auto& I : mu_->support_cubes(mu_->grid().L - 1)) {
            if (!contains(F0, I, mu_->grid().n)) continue;
            Eigen::VectorXd c = detail_coeffs(I, f);
            if (c.size() > 0) wc.detail.emplace(I, std::move(c));
        }
        return wc;
    }

    Eigen::VectorXd reconstruct(const WaveletCoefficients& wc) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(mu_->size()));
        auto it = proj_.find(wc.top);
        if (it != proj_.end() && wc.top_coeffs.size() > 0) {
            const auto& P = it->second;
            Eigen::VectorXd vals = P.hvals.transpose() * wc.top_coeffs;
            for (std::size_t k = 0; k < P.idx.size(); ++k) out[P.idx[k]] += vals[Eigen::Index(k)];
        }
        for (const auto& [I, c] : wc.detail) {
            const auto& W = diff_basis(I);
            if (W.rows() == 0) continue;
            Eigen::VectorXd vals = W.transpose() * c;
            const auto& idx = mu_->atoms_in(I);
            for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += vals[Eigen::Index(k)];
        }
        return out;
    }

    /// ||E_{I;kappa} f||_inf over atoms in I divided by E_I^mu |f|.
    double infinity_bound_ratio(const CubeId& I, const Eigen::VectorXd& f) const {
        double mI = mu_->cube_mass(I);
        if (mI <= 0.0) throw std::invalid_argument("infinity_bound_ratio: zero mass cube");
        Eigen::VectorXd ef = project_values(I, f);
        const auto& idx = mu_->atoms_in(I);
        double sup = 0, avg = 0;
        for (auto i : idx) {
            sup = std::max(sup, std::abs(ef[i]));
            avg += mu_->atoms()[i].m * std::abs(f[i]);
        }
        avg /= mI;
        if (avg == 0.0) throw std::invalid_argument("infinity_bound_ratio: zero average");
        return sup / avg;
    }

    /// L^2(mu) inner product and norms of atom-value vectors.
    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        double s = 0;
        for (std::size_t i = 0; i < mu_->size(); ++i)
            s += mu_->atoms()[i].m * a[Eigen::Index(i)] * b[Eigen::Index(i)];
        return s;
    }
    double norm_lp(const Eigen::VectorXd& a, double p) const {
        double s = 0;
        for (std::size_t i = 0; i < mu_->size(); ++i)
            s += mu_->atoms()[i].m * std::pow(std::abs(a[Eigen::Index(i)]), p);
        return std::pow(s, 1.0 / p);
    }

  private:
    struct Projection {
        std::vector<std::uint32_t> idx;  // atoms in I
        Eigen::MatrixXd basis;           // D x r, monomial coeffs of the orthonormal basis
        Eigen::MatrixXd hvals;           // r x |idx|, basis values at atoms
    };

    Eigen::VectorXd coeffs_in_basis(const Projection& P, const Eigen::VectorXd& f) const {
        Eigen::VectorXd wf(Eigen::Index(P.idx.size()));
        for (std::size_t k = 0; k < P.idx.size(); ++k)
            wf[Eigen::Index(k)] = mu_->atoms()[P.idx[k]].m * f[P.idx[k]];
        return P.hvals * wf;
    }

    void build_projection(const CubeId& I) {
        Projection P;
        P.idx = mu_->atoms_in(I);
        const auto D = Eigen::Index(betas_.size());
        const auto N = Eigen::Index(P.idx.size());
        Eigen::MatrixXd phi(D, N);  // monomial values at atoms
        for (Eigen::Index k = 0; k < N; ++k) {
            std::array<double, 3> z{0, 0, 0};
            for (int j = 0; j < mu_->grid().n; ++j)
                z[j] = (mu_->atoms()[P.idx[std::size_t(k)]].x[j] - I.center(j)) / I.side();
            for (Eigen::Index b = 0; b < D; ++b) {
                double v = 1;
                for (int j = 0; j < mu_->grid().n; ++j)
                    for (int e = 0; e < betas_[std::size_t(b)][j]; ++e) v *= z[j];
                phi(b, k) = v;
            }
        }
        Eigen::VectorXd w(N);
        for (Eigen::Index k = 0; k < N; ++k) w[k] = mu_->atoms()[P.idx[std::size_t(k)]].m;
        Eigen::MatrixXd G = phi * w.asDiagonal() * phi.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
        double tau = 1e-12 * lam_max;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < D; ++i)
            if (es.eigenvalues()[i] > tau) keep.push_back(i);
        P.basis.resize(D, Eigen::Index(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i)
            P.basis.col(Eigen::Index(i)) =
                es.eigenvectors().col(keep[i]) / std::sqrt(es.eigenvalues()[keep[i]]);
        P.hvals = P.basis.transpose() * phi;
        proj_.emplace(I, std::move(P));
    }

    /// Basis of range(Delta_I): stack the children's orthonormal bases, project
    /// out the parent basis, orthonormalize with rank truncation.
    Eigen::MatrixXd build_diff_basis(const CubeId& I) const {
        auto pit = proj_.find(I);
        if (pit == proj_.end() || I.level >= mu_->grid().L)
            return Eigen::MatrixXd(0, 0);
        const auto& P = pit->second;
        const auto N = Eigen::Index(P.idx.size());
        // map atom id -> position within I
        std::map<std::uint32_t, Eigen::Index> pos;
        for (std::size_t k = 0; k < P.idx.size(); ++k) pos[P.idx[k]] = Eigen::Index(k);
        // candidate rows: children's basis functions extended by zero
        std::vector<Eigen::VectorXd> cand;
        for (const auto& c : children(mu_->grid(), I)) {
            auto cit = proj_.find(c);
            if (cit == proj_.end()) continue;
            const auto& C = cit->second;
            for (Eigen::Index r = 0; r < C.hvals.rows(); ++r) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
                for (std::size_t k = 0; k < C.idx.size(); ++k) v[pos.at(C.idx[k])] = C.hvals(r, Eigen::Index(k));
                cand.push_back(std::move(v));
            }
        }
        if (cand.empty()) return Eigen::MatrixXd(0, Eigen::Index(P.idx.size()));
        Eigen::VectorXd sqw(N);
        for (Eigen::Index k = 0; k < N; ++k) sqw[k] = std::sqrt(mu_->atoms()[P.idx[std::size_t(k)]].m);
        Eigen::MatrixXd U(Eigen::Index(cand.size()), N);
        for (std::size_t i = 0; i < cand.size(); ++i)
            U.row(Eigen::Index(i)) = cand[i].cwiseProduct(sqw).transpose();
        Eigen::MatrixXd H = P.hvals;  // r x N
        Eigen::MatrixXd Hw = H * sqw.asDiagonal();
        // project out the parent space (Hw rows are Euclidean-orthonormal)
        Eigen::MatrixXd W = U - (U * Hw.transpose()) * Hw;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
        // candidate rows are unit vectors, so the cutoff is absolute: a fully
        // projected-out direction leaves only noise, which must yield rank 0
        Eigen::Index r = 0;
        while (r < svd.singularValues().size() && svd.singularValues()[r] > 1e-7) ++r;
        Eigen::MatrixXd O = svd.matrixV().leftCols(r).transpose();  // r x N, orthonormal rows
        // unweight back to values at atoms
        for (Eigen::Index k = 0; k < N; ++k) O.col(k) /= sqw[k];
        return O;
    }

    const AtomicMeasure* mu_;
    int kappa_;
    std::vector<std::array<int, 3>> betas_;
    std::map<CubeId, Projection> proj_;
    mutable std::map<CubeId, Eigen::MatrixXd> diff_;
};

}  // namespace dyadica
