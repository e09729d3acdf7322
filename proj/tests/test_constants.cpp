#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadica/constants.hpp"

using namespace dyadica;

namespace {
KernelSpec hilbert(double delta, double R) {
    KernelSpec k;
    k.family = KernelSpec::Family::Hilbert;
    k.n = 1;
    k.lambda = 0.0;
    k.delta = delta;
    k.R = R;
    k.validate();
    return k;
}

std::array<double, 3> pt(double x) { return {x, 0, 0}; }

AtomicMeasure scaled(const AtomicMeasure& mu, double c) {
    std::vector<Atom> atoms = mu.atoms();
    for (auto& a : atoms) a.m *= c;
    return AtomicMeasure(mu.grid(), std::move(atoms));
}
}  // namespace

TEST_CASE("scalar testing on a two-atom configuration") {
    GridSpec g{1, 3};
    AtomicMeasure sigma(g, {{pt(0.25), 1.0}});
    AtomicMeasure omega(g, {{pt(0.375), 1.0}});
    KernelSpec k = hilbert(0.05, 1.0);
    auto est = scalar_testing(k, sigma, omega, 2.0);
    // single pair: |K(0.375, 0.25)| = 8, eta(0.125) = 1
    CHECK(est.value == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(est.kind == ConstantEstimate::Kind::ExactSup);
    REQUIRE(est.witness_cubes.size() == 1);
    CHECK(sigma.cube_mass(est.witness_cubes[0]) > 0.0);

    AtomicMeasure empty(g, {});
    CHECK(scalar_testing(k, empty, omega, 2.0).value == 0.0);
}

TEST_CASE("scalar testing never exceeds the exact p=2 norm") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 1);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 2);
    KernelSpec k = hilbert(1e-3, 2.0);
    double norm = operator_norm(k, sigma, omega, 2.0).value;
    CHECK(scalar_testing(k, sigma, omega, 2.0).value <= norm + 1e-9 * (1.0 + norm));
}

TEST_CASE("quadratic offset Muckenhoupt closed form on uniform pairs") {
    AtomicMeasure u = generate_uniform({1, 4}, 4);
    auto est = quad_offset_muckenhoupt(u, u, 2.0, 0.0);
    CHECK(est.kind == ConstantEstimate::Kind::ExactSup);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("offset variant takes the minimum over nearby same-size cubes") {
    GridSpec g{1, 3};
    // sigma heavy on the left, omega heavy on the right: offsetting drops the product
    AtomicMeasure sigma(g, {{pt(0.1), 1.0}, {pt(0.6), 1e-3}});
    AtomicMeasure omega(g, {{pt(0.2), 1.0}, {pt(0.7), 1e-3}});
    auto plain = quad_offset_muckenhoupt(sigma, omega, 2.0, 0.0);
    auto off = quad_offset_muckenhoupt(sigma, omega, 2.0, 0.0, 3.0, 20, 1, true);
    CHECK(off.value <= plain.value + 1e-12);
}

TEST_CASE("tailed Muckenhoupt witnesses reproduce offset-scale values") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 3);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 4);
    auto tailed = quad_tailed_muckenhoupt(sigma, omega, 2.0, 0.0);
    CHECK(tailed.kind == ConstantEstimate::Kind::LowerBound);
    CHECK(tailed.value > 0.0);
}

TEST_CASE("homogeneity in the sigma mass at p=2") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 5);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 6);
    KernelSpec k = hilbert(1e-3, 2.0);
    double base_norm = operator_norm(k, sigma, omega, 2.0).value;
    double base_test = scalar_testing(k, sigma, omega, 2.0).value;
    for (double c : {0.25, 4.0}) {
        AtomicMeasure cs = scaled(sigma, c);
        // T_sigma f scales by c, |I|_sigma^{1/2} by c^{1/2}: net c^{1/2}
        CHECK(operator_norm(k, cs, omega, 2.0).value ==
              doctest::Approx(std::sqrt(c) * base_norm).epsilon(1e-9));
        CHECK(scalar_testing(k, cs, omega, 2.0).value ==
              doctest::Approx(std::sqrt(c) * base_test).epsilon(1e-9));
    }
}

TEST_CASE("witness replay reproduces reported values") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 7);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 8);
    KernelSpec k = hilbert(1e-3, 2.0);

    auto st = scalar_testing(k, sigma, omega, 2.0);
    REQUIRE(st.witness_cubes.size() == 1);
    {
        const CubeId& I = st.witness_cubes[0];
        Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(sigma.size()));
        for (auto i : sigma.atoms_in(I)) f[i] = 1.0;
        Eigen::VectorXd Tf = apply_kernel(k, sigma, f, omega);
        double num = 0;
        for (auto i : omega.atoms_in(I))
            num += omega.atoms()[i].m * Tf[i] * Tf[i];
        double replay = std::sqrt(num) / std::sqrt(sigma.cube_mass(I));
        CHECK(replay == doctest::Approx(st.value).epsilon(1e-12));
    }

    auto wb = wbp(k, sigma, omega, 2.0, WbpVariant::HV);
    CHECK(wbp_replay(k, sigma, omega, 2.0, wb) == doctest::Approx(wb.value).epsilon(1e-12));
}

TEST_CASE("weak boundedness vanishes when truncation kills all separations") {
    GridSpec g{1, 3};
    AtomicMeasure sigma(g, {{pt(0.1), 1.0}});
    AtomicMeasure omega(g, {{pt(0.9), 1.0}});
    KernelSpec k = hilbert(1.9, 2.0);  // delta above the separation
    CHECK(wbp(k, sigma, omega, 2.0, WbpVariant::Extended).value == doctest::Approx(0.0));
}

TEST_CASE("HV weak boundedness never exceeds the extended variant") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 9);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 10);
    KernelSpec k = hilbert(1e-3, 2.0);
    auto rep = ordering_report(k, sigma, omega, 2.0, 0.0, 11);
    CHECK(rep.get("wbp_hv").value <= rep.get("wbp_extended").value + 1e-12);
}

TEST_CASE("AWBP spectral value dominates random quotients") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 12);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 13);
    KernelSpec k = hilbert(1e-3, 2.0);
    auto est = awbp(k, sigma, omega, 2.0, 1, 1);
    CHECK(est.kind == ConstantEstimate::Kind::ExactSup);
    AlpertSystem S(sigma, 1), W(omega, 1);
    std::mt19937_64 rng(14);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd f{Eigen::Index(sigma.size())};
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        CHECK(awbp_quotient(k, S, W, 1, 2.0, f) <= est.value * (1.0 + 1e-9));
    }
}

TEST_CASE("enlarging the coefficient family never decreases lower bounds") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 15);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 16);
    KernelSpec k = hilbert(1e-3, 2.0);
    auto few = quad_testing(k, sigma, omega, 2.0, TestingVariant::Local, 4, 17);
    auto many = quad_testing(k, sigma, omega, 2.0, TestingVariant::Local, 24, 17);
    CHECK(few.value <= many.value + 1e-12);
}

TEST_CASE("ordering report passes on a doubling pair") {
    AtomicMeasure sigma = generate_cascade({1, 4}, 0.3, 4, 18);
    AtomicMeasure omega = generate_cascade({1, 4}, 0.35, 4, 19);
    KernelSpec k = hilbert(1e-3, 2.0);
    auto rep = ordering_report(k, sigma, omega, 2.0, 0.0, 20);
    CHECK(rep.pass);
    CHECK(rep.violations.empty());
    double N = rep.get("operator_norm").value;
    for (const char* name : {"scalar_testing", "quad_testing_local", "quad_testing_global",
                             "quad_testing_triple", "wbp_hv", "wbp_extended", "awbp"})
        CHECK(rep.get(name).value <= N * (1.0 + 1e-9) + 1e-9);
    CHECK(rep.get("scalar_testing").value <= rep.get("quad_testing_triple").value + 1e-9);
}
