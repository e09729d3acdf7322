#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyadica/alpert.hpp"

using namespace dyadica;

namespace {
CubeId cube(int level, std::uint32_t c0) {
    CubeId I;
    I.level = level;
    I.coords = {c0, 0, 0};
    return I;
}

Eigen::VectorXd coordinate_values(const AtomicMeasure& mu) {
    Eigen::VectorXd f{Eigen::Index(mu.size())};
    for (std::size_t i = 0; i < mu.size(); ++i) f[Eigen::Index(i)] = mu.atoms()[i].x[0];
    return f;
}

Eigen::VectorXd random_values(const AtomicMeasure& mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f{Eigen::Index(mu.size())};
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    return f;
}
}  // namespace

TEST_CASE("order-1 projection is the cube average") {
    AtomicMeasure mu = generate_uniform({1, 3}, 3);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd f = coordinate_values(mu);
    Eigen::VectorXd ef = sys.project_values(cube(1, 0), f);
    double avg = 0;
    for (auto i : mu.atoms_in(cube(1, 0))) avg += mu.atoms()[i].m * f[i];
    avg /= mu.cube_mass(cube(1, 0));
    for (auto i : mu.atoms_in(cube(1, 0))) CHECK(ef[i] == doctest::Approx(avg).epsilon(1e-12));
    for (auto i : mu.atoms_in(cube(1, 1))) CHECK(ef[i] == 0.0);
}

TEST_CASE("projection reproduces polynomials below the order") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 3);
    AlpertSystem sys(mu, 2);
    Eigen::VectorXd f = coordinate_values(mu);
    Eigen::VectorXd ef = sys.project_values(root_cube(), f);
    for (std::size_t i = 0; i < mu.size(); ++i)
        CHECK(ef[Eigen::Index(i)] == doctest::Approx(f[Eigen::Index(i)]).epsilon(1e-10));
    // and annihilates it in every difference
    for (const auto& I : mu.support_cubes(3)) {
        Eigen::VectorXd d = sys.difference(I, f);
        CHECK(d.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("order-1 difference of the coordinate on the root") {
    AtomicMeasure mu = generate_uniform({1, 4}, 4);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd f = coordinate_values(mu);
    Eigen::VectorXd d = sys.difference(root_cube(), f);
    for (auto i : mu.atoms_in(cube(1, 0))) CHECK(d[i] == doctest::Approx(-0.25).epsilon(1e-12));
    for (auto i : mu.atoms_in(cube(1, 1))) CHECK(d[i] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::sqrt(sys.inner(d, d)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(sys.difference(cube(4, 0), f), std::invalid_argument);
}

TEST_CASE("single atom under order 2 degrades to rank one") {
    GridSpec g{1, 3};
    AtomicMeasure mu(g, {{{0.1, 0, 0}, 1.0}, {{0.6, 0, 0}, 1.0}});
    AlpertSystem sys(mu, 2);
    CHECK(sys.rank(cube(1, 0)) == 1);
    Eigen::VectorXd f = random_values(mu, 1);
    Eigen::VectorXd ef = sys.project_values(cube(1, 0), f);
    CHECK(ef[0] == doctest::Approx(f[0]).epsilon(1e-12));
}

TEST_CASE("expand and reconstruct round-trip with Parseval") {
    for (int kappa : {1, 2}) {
        AtomicMeasure mu = generate_cascade({1, 6}, 0.25, 6, 17);
        AlpertSystem sys(mu, kappa);
        Eigen::VectorXd f = random_values(mu, 99 + std::uint64_t(kappa));
        auto wc = sys.expand(f, root_cube());
        Eigen::VectorXd back = sys.reconstruct(wc);
        double scale = f.cwiseAbs().maxCoeff();
        CHECK((back - f).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        double n2 = sys.inner(f, f);
        CHECK(wc.norm_sq() == doctest::Approx(n2).epsilon(1e-9));
    }
}

TEST_CASE("constant functions have zero detail coefficients") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 4);
    AlpertSystem sys(mu, 1);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(Eigen::Index(mu.size()), 3.5);
    auto wc = sys.expand(f, root_cube());
    for (const auto& [I, c] : wc.detail) CHECK(c.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("differences on distinct cubes are orthogonal") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 8);
    AlpertSystem sys(mu, 2);
    Eigen::VectorXd f = random_values(mu, 5);
    Eigen::VectorXd g = random_values(mu, 6);
    auto cubes = mu.support_cubes(4);
    for (std::size_t a = 0; a < cubes.size(); a += 3)
        for (std::size_t b = a + 1; b < cubes.size(); b += 3) {
            double ip = sys.inner(sys.difference(cubes[a], f), sys.difference(cubes[b], g));
            CHECK(std::abs(ip) <= 1e-9);
        }
}

TEST_CASE("differences kill moments below the order") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.25, 5, 13);
    for (int kappa : {1, 2}) {
        AlpertSystem sys(mu, kappa);
        Eigen::VectorXd f = random_values(mu, 21);
        for (const auto& I : mu.support_cubes(4)) {
            Eigen::VectorXd d = sys.difference(I, f);
            for (int deg = 0; deg < kappa; ++deg) {
                double m = 0;
                for (auto i : mu.atoms_in(I)) {
                    double z = (mu.atoms()[i].x[0] - I.center(0)) / I.side();
                    m += mu.atoms()[i].m * d[i] * std::pow(z, deg);
                }
                CHECK(std::abs(m) <= 1e-9 * (1.0 + std::sqrt(sys.inner(f, f))));
            }
        }
    }
}

TEST_CASE("projection is idempotent") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 2);
    AlpertSystem sys(mu, 2);
    Eigen::VectorXd f = random_values(mu, 12);
    Eigen::VectorXd once = sys.project_values(cube(1, 1), f);
    Eigen::VectorXd twice = sys.project_values(cube(1, 1), once);
    CHECK((twice - once).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("infinity bound ratio") {
    AtomicMeasure mu = generate_cascade({1, 5}, 0.3, 5, 31);
    AlpertSystem s1(mu, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(Eigen::Index(mu.size()), 2.0);
    CHECK(s1.infinity_bound_ratio(root_cube(), c) == doctest::Approx(1.0));
    Eigen::VectorXd f = random_values(mu, 44);
    for (const auto& I : mu.support_cubes(4)) CHECK(s1.infinity_bound_ratio(I, f) <= 1.0 + 1e-12);
    // higher order stays in a modest band on doubling test measures
    AlpertSystem s2(mu, 2);
    for (const auto& I : mu.support_cubes(4)) CHECK(s2.infinity_bound_ratio(I, f) <= 16.0);
}

TEST_CASE("diff basis is orthonormal and spans the difference") {
    AtomicMeasure mu = generate_cascade({1, 4}, 0.3, 4, 27);
    AlpertSystem sys(mu, 2);
    for (const auto& I : mu.support_cubes(3)) {
        const auto& W = sys.diff_basis(I);
        const auto& idx = mu.atoms_in(I);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index s = 0; s <= r; ++s) {
                double ip = 0;
                for (std::size_t q = 0; q < idx.size(); ++q)
                    ip += mu.atoms()[idx[q]].m * W(r, Eigen::Index(q)) * W(s, Eigen::Index(q));
                CHECK(ip == doctest::Approx(r == s ? 1.0 : 0.0).epsilon(1e-9));
            }
    }
}
