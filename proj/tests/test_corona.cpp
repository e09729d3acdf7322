#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "dyadica/corona.hpp"

using namespace dyadica;

namespace {
CubeId cube(int level, std::uint32_t c0) {
    CubeId I;
    I.level = level;
    I.coords = {c0, 0, 0};
    return I;
}

Eigen::VectorXd random_values(const AtomicMeasure& mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f{Eigen::Index(mu.size())};
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    return f;
}
}  // namespace

TEST_CASE("constant data stops at the root") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 1);
    Eigen::VectorXd f = Eigen::VectorXd::Ones(Eigen::Index(mu.size()));
    CoronaDecomposition d(mu, f, 2.0, root_cube());
    REQUIRE(d.tree().size() == 1);
    CHECK(d.tree()[0] == root_cube());
    CHECK(d.alpha(root_cube()) == doctest::Approx(1.0));
    auto rep = check_quantitative(d);
    CHECK(rep.pass);
}

TEST_CASE("concentrated data produces the full stopping chain") {
    const int m = 3;
    AtomicMeasure mu = generate_uniform({1, m}, m);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
    for (auto i : mu.atoms_in(cube(m, 0))) f[i] = std::ldexp(1.0, m);
    CoronaDecomposition d(mu, f, 2.0, root_cube());
    std::set<CubeId> tree(d.tree().begin(), d.tree().end());
    std::set<CubeId> want;
    for (int k = 0; k <= m; ++k) want.insert(cube(k, 0));
    CHECK(tree == want);
    for (int k = 0; k <= m; ++k) {
        CHECK(d.average(cube(k, 0)) == doctest::Approx(std::ldexp(1.0, k)));
        CHECK(d.alpha(cube(k, 0)) == doctest::Approx(std::ldexp(1.0, k)));
    }
    // each stopping child carries exactly half of the parent mass
    auto rep = check_quantitative(d);
    CHECK(rep.pass);
    for (int k = 0; k < m; ++k) {
        auto kids = d.stopping_children(cube(k, 0));
        REQUIRE(kids.size() == 1);
        CHECK(mu.cube_mass(kids[0]) == doctest::Approx(0.5 * mu.cube_mass(cube(k, 0))));
    }
}

TEST_CASE("corona tops and membership") {
    const int m = 3;
    AtomicMeasure mu = generate_uniform({1, m}, m);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(mu.size()));
    for (auto i : mu.atoms_in(cube(m, 0))) f[i] = 8.0;
    CoronaDecomposition d(mu, f, 2.0, root_cube());
    CHECK(d.corona_top(cube(2, 3)) == root_cube());
    CHECK(d.corona_top(cube(2, 1)) == cube(1, 0));
    CHECK(d.is_stopping(cube(2, 0)));
    CHECK_FALSE(d.is_stopping(cube(2, 2)));
    // coronas partition all cubes below the root
    std::map<CubeId, int> hits;
    for (const auto& F : d.tree())
        for (const auto& I : d.corona(F)) hits[I]++;
    for (const auto& I : all_cubes(mu.grid())) {
        REQUIRE(hits.count(I) == 1);
        CHECK(hits[I] == 1);
    }
}

TEST_CASE("coronas are connected") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.2, 6, 77);
    Eigen::VectorXd f = random_values(mu, 78);
    CoronaDecomposition d(mu, f, 2.0, root_cube());
    for (const auto& F : d.tree()) {
        std::set<CubeId> c(d.corona(F).begin(), d.corona(F).end());
        for (const auto& I : c) {
            CubeId J = I;
            while (J != F) {
                J = parent(J);
                CHECK(c.count(J) == 1);
            }
        }
    }
}

TEST_CASE("single-stopping-cube shifted corona is a level cut") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 2);
    Eigen::VectorXd f = Eigen::VectorXd::Ones(Eigen::Index(mu.size()));
    CoronaDecomposition d(mu, f, 2.0, root_cube());
    for (int tau : {1, 2, 3}) {
        auto sh = d.shifted_corona(root_cube(), tau);
        std::set<CubeId> got(sh.begin(), sh.end());
        std::set<CubeId> want;
        for (const auto& J : all_cubes(mu.grid()))
            if (J.level >= tau) want.insert(J);
        CHECK(got == want);
    }
    CHECK(d.shifted_corona(root_cube(), 7).empty());
    CHECK_THROWS_AS(d.shifted_corona(root_cube(), 0), std::invalid_argument);
}

TEST_CASE("shifted coronas against the direct set construction") {
    AtomicMeasure mu = generate_cascade({1, 6}, 0.2, 6, 5);
    Eigen::VectorXd f = random_values(mu, 6);
    CoronaDecomposition d(mu, f, 1.5, root_cube());
    int tau = 2;
    for (const auto& F : d.tree()) {
        std::set<CubeId> got;
        for (const auto& J : d.shifted_corona(F, tau)) got.insert(J);
        // oracle: [C_F minus near set] union, over stopping children, their near
        // sets already deeper than level(F) + tau
        std::set<CubeId> want;
        for (const auto& I : d.corona(F))
            if (I.level >= F.level + tau) want.insert(I);
        for (const auto& Fp : d.stopping_children(F))
            for (const auto& J : all_cubes(mu.grid()))
                if (contains(Fp, J, 1) && J.level < Fp.level + tau && J.level >= F.level + tau)
                    want.insert(J);
        CHECK(got == want);
    }
}

TEST_CASE("shifted corona overlap is bounded by the shift") {
    for (std::uint64_t seed : {10u, 11u, 12u}) {
        AtomicMeasure mu = generate_cascade({1, 6}, 0.2, 6, seed);
        Eigen::VectorXd f = random_values(mu, seed + 100);
        CoronaDecomposition d(mu, f, 1.5, root_cube());
        int tau = d.tau();
        std::map<CubeId, int> count;
        for (const auto& F : d.tree())
            for (const auto& J : d.shifted_corona(F, tau)) count[J]++;
        for (const auto& [J, c] : count) CHECK(c <= tau);
    }
}

TEST_CASE("quantitative checks pass across random instances") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> ub(0.15, 0.5);
    for (int t = 0; t < 10; ++t) {
        AtomicMeasure mu = generate_cascade({1, 6}, ub(rng), 6, rng());
        Eigen::VectorXd f = random_values(mu, rng());
        for (double G : {1.5, 2.0, 3.0}) {
            CoronaDecomposition d(mu, f, G, root_cube());
            auto rep = check_quantitative(d);
            CHECK(rep.pass);
            CHECK(rep.schedule_N == int(std::floor(2.0 * G / (G - 1.0))));
            if (!rep.pass)
                for (const auto& fl : rep.failures) MESSAGE(fl.check, " at ", format_cube(fl.witness, 1));
        }
    }
}

TEST_CASE("constructor validation") {
    AtomicMeasure mu = generate_uniform({1, 3}, 3);
    Eigen::VectorXd f = Eigen::VectorXd::Ones(Eigen::Index(mu.size()));
    CHECK_THROWS_AS(CoronaDecomposition(mu, f, 1.0, root_cube()), std::invalid_argument);
    CHECK_THROWS_AS(CoronaDecomposition(mu, f, 2.0, cube(5, 0)), std::invalid_argument);
}
