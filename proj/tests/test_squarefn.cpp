#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyadica/squarefn.hpp"

using namespace dyadica;

namespace {
Eigen::VectorXd random_values(const AtomicMeasure& mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f{Eigen::Index(mu.size())};
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    return f;
}
}  // namespace

TEST_CASE("Haar square function of a constant vanishes") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 1);
    AlpertSystem sys(mu, 1);
    SquareKind kind;
    Eigen::VectorXd f = Eigen::VectorXd::Constant(Eigen::Index(mu.size()), 4.2);
    Eigen::VectorXd s = square_function(kind, sys, f);
    CHECK(s.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("p=2 Parseval for the Haar square function") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.25, 6, 2);
    AlpertSystem sys(mu, 1);
    SquareKind kind;
    Eigen::VectorXd f = random_values(mu, 3);
    Eigen::VectorXd s = square_function(kind, sys, f);
    Eigen::VectorXd e = sys.project_values(root_cube(), f);
    double lhs = sys.inner(s, s) + sys.inner(e, e);
    CHECK(lhs == doctest::Approx(sys.inner(f, f)).epsilon(1e-9));
}

TEST_CASE("single-corona square function is the residual above the top") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 4);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(Eigen::Index(mu.size()));
    CoronaDecomposition d(mu, ones, 2.0, root_cube());  // tree = {root}
    REQUIRE(d.tree().size() == 1);
    SquareKind kind;
    kind.tag = SquareKind::Corona;
    Eigen::VectorXd f = random_values(mu, 5);
    Eigen::VectorXd s = square_function(kind, sys, f, &d);
    Eigen::VectorXd resid = f - sys.project_values(root_cube(), f);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        CHECK(s[i] == doctest::Approx(std::abs(resid[i])).epsilon(1e-9));
}

TEST_CASE("p=2 Haar ratios never exceed one") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.3, 6, 6);
    SquareKind kind;
    auto rep = ratio_report(kind, mu, 2.0, 50, 7);
    CHECK(rep.max_ratio <= 1.0 + 1e-12);
    CHECK(rep.mean_ratio <= rep.max_ratio + 1e-12);
    CHECK(rep.trials == 50);
}

TEST_CASE("ratio reports are seed-deterministic") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 8);
    SquareKind kind;
    kind.tag = SquareKind::Alpert;
    kind.kappa = 2;
    auto a = ratio_report(kind, mu, 3.0, 20, 9);
    auto b = ratio_report(kind, mu, 3.0, 20, 9);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.mean_ratio == b.mean_ratio);
}

TEST_CASE("corona generations form a martingale") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.2, 6, 10);
    Eigen::VectorXd f = random_values(mu, 11);
    CoronaDecomposition d(mu, f, 1.5, root_cube());
    auto rep = martingale_check(d);
    CHECK(rep.ok);
    CHECK(rep.max_err <= 1e-10);
}

TEST_CASE("dyadic maximal function") {
    AtomicMeasure mu = generate_uniform({1, 4}, 4);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(Eigen::Index(mu.size()), 2.5);
    Eigen::VectorXd mc = maximal(mu, c);
    for (Eigen::Index i = 0; i < mc.size(); ++i) CHECK(mc[i] == doctest::Approx(2.5));

    // indicator of [0, 1/4): at its atoms the best average is 1, at the far
    // half the best containing average is the root average 1/4
    CubeId Q{2, {0, 0, 0}};
    Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
    for (auto i : mu.atoms_in(Q)) f[i] = 1.0;
    Eigen::VectorXd mf = maximal(mu, f);
    for (auto i : mu.atoms_in(Q)) CHECK(mf[i] == doctest::Approx(1.0));
    CubeId right{1, {1, 0, 0}};
    for (auto i : mu.atoms_in(right)) CHECK(mf[i] == doctest::Approx(0.25));
    // pointwise |f| <= Mf
    for (Eigen::Index i = 0; i < mf.size(); ++i) CHECK(mf[i] >= std::abs(f[i]) - 1e-12);
}

TEST_CASE("vector maximal aggregates in l2") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 12);
    std::vector<Eigen::VectorXd> fs{random_values(mu, 13), random_values(mu, 14)};
    Eigen::VectorXd v = maximal_vector(mu, fs);
    Eigen::VectorXd m0 = maximal(mu, fs[0]), m1 = maximal(mu, fs[1]);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        CHECK(v[i] == doctest::Approx(std::hypot(m0[i], m1[i])).epsilon(1e-12));
}

TEST_CASE("scale-window square function variants both evaluate") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 15);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd f = random_values(mu, 16);
    SquareKind lit;
    lit.tag = SquareKind::RhoDelta;
    Eigen::VectorXd a = square_function(lit, sys, f);
    SquareKind var = lit;
    var.delta_j_variant = true;
    Eigen::VectorXd b = square_function(var, sys, f);
    CHECK(a.allFinite());
    CHECK(b.allFinite());
    // the two readings genuinely differ
    CHECK((a - b).cwiseAbs().maxCoeff() > 1e-12);
}

TEST_CASE("shifted-corona square function stays within the plain corona near-set bound") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.25, 6, 17);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd f = random_values(mu, 18);
    CoronaDecomposition d(mu, f, 1.5, root_cube());
    SquareKind sh;
    sh.tag = SquareKind::ShiftedCorona;
    SquareKind co;
    co.tag = SquareKind::Corona;
    double ns = sys.norm_lp(square_function(sh, sys, f, &d), 2.0);
    double nc = sys.norm_lp(square_function(co, sys, f, &d), 2.0);
    double nf = sys.norm_lp(f, 2.0);
    CHECK(ns <= 4.0 * (nc + nf) + 1e-12);
}
