#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dyadica/forms.hpp"

using namespace dyadica;

namespace {
KernelSpec hilbert() {
    KernelSpec k;
    k.family = KernelSpec::Family::Hilbert;
    k.n = 1;
    k.lambda = 0.0;
    k.delta = 1e-3;
    k.R = 2.0;
    k.validate();
    return k;
}

Eigen::VectorXd random_values(const AtomicMeasure& mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f{Eigen::Index(mu.size())};
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    return f;
}

double pairing(const KernelSpec& k, const AtomicMeasure& sigma, const AtomicMeasure& omega,
               const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    Eigen::VectorXd Tf = apply_kernel(k, sigma, f, omega);
    double s = 0;
    for (std::size_t i = 0; i < omega.size(); ++i)
        s += omega.atoms()[i].m * Tf[Eigen::Index(i)] * g[Eigen::Index(i)];
    return s;
}
}  // namespace

TEST_CASE("size splitting sums to the full pairing") {
    AtomicMeasure sigma = generate_uniform({1, 4}, 4);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 2);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = random_values(sigma, 3), g = random_values(omega, 4);
    KernelSpec k = hilbert();
    auto led = split_by_size(k, S, W, f, g, 2, 0.8);
    CHECK(led.partition_ok);
    double total = pairing(k, sigma, omega, f, g);
    CHECK(led.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(led.sum_parts() == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("size splitting with constant g has only root terms") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 5);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 6);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = random_values(sigma, 7);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(Eigen::Index(omega.size()));
    auto led = split_by_size(hilbert(), S, W, f, g, 2, 0.8);
    for (const auto& [name, v] : led.parts)
        if (name != "root_terms") CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("oversized comparability window empties the nested classes") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 8);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 9);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = random_values(sigma, 10), g = random_values(omega, 11);
    auto led = split_by_size(hilbert(), S, W, f, g, 6, 0.8);
    CHECK(led.parts.at("B_below") == 0.0);
    CHECK(led.parts.at("B_above") == 0.0);
    CHECK(led.sum_parts() == doctest::Approx(led.total).epsilon(1e-9));
}

TEST_CASE("ledger entries are bilinear") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 12);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 13);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f1 = random_values(sigma, 14), f2 = random_values(sigma, 15);
    Eigen::VectorXd g = random_values(omega, 16);
    KernelSpec k = hilbert();
    auto la = split_by_size(k, S, W, f1, g, 2, 0.8);
    auto lb = split_by_size(k, S, W, f2, g, 2, 0.8);
    auto lc = split_by_size(k, S, W, 2.0 * f1 + 3.0 * f2, g, 2, 0.8);
    for (const auto& [name, v] : lc.parts)
        CHECK(v == doctest::Approx(2.0 * la.parts.at(name) + 3.0 * lb.parts.at(name))
                       .epsilon(1e-9));
}

TEST_CASE("canonical splitting: structure and identity") {
    AtomicMeasure sigma = generate_cascade({1, 5}, 0.3, 5, 17);
    AtomicMeasure omega = generate_cascade({1, 5}, 0.35, 5, 18);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = random_values(sigma, 19), g = random_values(omega, 20);
    KernelSpec k = hilbert();
    CoronaDecomposition d(sigma, f, 1.5, root_cube(), 2);
    auto led = canonical_split(k, S, W, f, g, d, 2, 0.6);
    CHECK(led.partition_ok);
    CHECK(led.parts.at("T_farabove") == 0.0);
    CHECK(led.parts.at("T_disjoint") == 0.0);
    CHECK(led.sum_parts() == doctest::Approx(led.total).epsilon(1e-8));
    // rho below tau cannot split exactly
    CHECK_THROWS_AS(canonical_split(k, S, W, f, g, d, 1, 0.6), std::invalid_argument);
}

TEST_CASE("single corona has no far-below part") {
    AtomicMeasure sigma = generate_cascade({1, 5}, 0.3, 5, 21);
    AtomicMeasure omega = generate_cascade({1, 5}, 0.35, 5, 22);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(Eigen::Index(sigma.size()));
    Eigen::VectorXd g = random_values(omega, 23);
    CoronaDecomposition d(sigma, ones, 2.0, root_cube(), 2);
    REQUIRE(d.tree().size() == 1);
    Eigen::VectorXd f = random_values(sigma, 24);
    auto led = canonical_split(hilbert(), S, W, f, g, d, 2, 0.6);
    CHECK(led.parts.at("T_farbelow") == 0.0);
    CHECK(led.parts.at("T_diagonal") == doctest::Approx(led.total).epsilon(1e-9));
}

TEST_CASE("far-below two-term identity") {
    AtomicMeasure sigma = generate_cascade({1, 5}, 0.25, 5, 25);
    AtomicMeasure omega = generate_cascade({1, 5}, 0.3, 5, 26);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = random_values(sigma, 27), g = random_values(omega, 28);
    CoronaDecomposition d(sigma, f, 1.5, root_cube(), 2);
    auto led = farbelow_split(hilbert(), S, W, f, g, d, 2, 0.6);
    CHECK(led.parts.at("T_farbelow") ==
          doctest::Approx(led.parts.at("T_fb1") - led.parts.at("T_fb2")).epsilon(1e-9));
}

TEST_CASE("per-corona reach decomposition reassembles the diagonal") {
    for (int kappa : {1, 2}) {
        AtomicMeasure sigma = generate_cascade({1, 5}, 0.3, 5, 29 + std::uint64_t(kappa));
        AtomicMeasure omega = generate_cascade({1, 5}, 0.35, 5, 31);
        AlpertSystem S(sigma, kappa), W(omega, kappa);
        Eigen::VectorXd f = random_values(sigma, 32), g = random_values(omega, 33);
        KernelSpec k = hilbert();
        CoronaDecomposition d(sigma, f, 1.5, root_cube(), 2);
        auto canon = canonical_split(k, S, W, f, g, d, 2, 0.6);
        double diag = 0, comm = 0;
        for (const auto& F : d.tree()) {
            auto led = ntv_reach_split(k, S, W, f, g, d, F, 2, 0.6);
            double four = led.parts.at("B_paraproduct") + led.parts.at("B_stop") +
                          led.parts.at("B_commutator") + led.parts.at("B_neighbour");
            CHECK(four == doctest::Approx(led.total).epsilon(1e-8));
            diag += led.total;
            comm += std::abs(led.parts.at("B_commutator"));
        }
        double scale = 1.0 + std::abs(canon.parts.at("T_diagonal"));
        CHECK(std::abs(diag - canon.parts.at("T_diagonal")) <= 1e-8 * scale);
        // constants commute with the operator: no commutator at Haar order
        if (kappa == 1) CHECK(comm <= 1e-12);
    }
}

TEST_CASE("vanished difference empties the reach parts") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 34);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 35);
    AlpertSystem S(sigma, 1), W(omega, 1);
    Eigen::VectorXd f = Eigen::VectorXd::Ones(Eigen::Index(sigma.size()));
    Eigen::VectorXd g = random_values(omega, 36);
    CoronaDecomposition d(sigma, f, 2.0, root_cube(), 2);
    auto led = ntv_reach_split(hilbert(), S, W, f, g, d, root_cube(), 2, 0.6);
    for (const auto& [name, v] : led.parts) CHECK(std::abs(v) <= 1e-12);
}
