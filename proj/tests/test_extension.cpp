#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fyflow/errors.hpp"
#include "fyflow/extension.hpp"
#include "fyflow/fft.hpp"
#include "fyflow/spectral.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace fyflow;
using namespace fyflow::testutil;

TEST_CASE("d_star frozen values and positivity") {
    // Gamma-function evaluations frozen from a 40-digit computation
    CHECK(d_star(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d_star(0.25) == doctest::Approx(2.0920992401062033).epsilon(1e-12));
    CHECK(d_star(0.75) == doctest::Approx(0.47798879748612500).epsilon(1e-12));
    for (double g = 0.05; g < 1.0; g += 0.05) CHECK(d_star(g) > 0.0);
    CHECK_THROWS_AS(d_star(0.0), std::invalid_argument);
    CHECK_THROWS_AS(d_star(1.0), std::invalid_argument);
}

TEST_CASE("mesh validation") {
    Grid base(1, 16);
    CHECK_THROWS_AS(ExtensionMesh::from_nodes(base, 0.5, {0.1, 0.5, 1.0}),
                    std::invalid_argument); // must start at 0
    CHECK_THROWS_AS(ExtensionMesh::from_nodes(base, 0.5, {0.0, 0.5, 0.5}),
                    std::invalid_argument); // strictly increasing
    CHECK_THROWS_AS(ExtensionMesh::graded(base, 1.2, 16), std::invalid_argument);
    const ExtensionMesh m = ExtensionMesh::graded(base, 0.3, 8, 2.0, 4.0);
    CHECK(m.weight_exponent() == doctest::Approx(0.4));
    CHECK(m.y_nodes().front() == 0.0);
    CHECK(m.y_nodes().back() == doctest::Approx(4.0));
    CHECK(m.y_nodes()[4] == doctest::Approx(4.0 * std::pow(0.5, 2.0)));
}

TEST_CASE("extension of trivial traces") {
    Grid base(1, 16);
    const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.4, 24, 2.0, 3.0);
    SUBCASE("zero trace gives the zero field") {
        const ExtensionField U = solve_extension(Field(base, 0.0), mesh);
        for (double v : U.values) CHECK(std::abs(v) <= 1e-14);
    }
    SUBCASE("constants extend to constants") {
        const ExtensionField U = solve_extension(Field(base, 2.5), mesh);
        for (double v : U.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-10));
        CHECK(max_abs_diff(U.trace(), Field(base, 2.5)) <= 1e-12);
    }
}

TEST_CASE("gamma = 1/2 extension matches the harmonic closed form") {
    Grid base(1, 64);
    const double Y = 6.0;
    const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.5, 192, 2.0, Y);
    const Field f = cosine(base, 1);
    const ExtensionField U = solve_extension(f, mesh);
    // truncated closed form cosh(Y - y)/cosh(Y); remaining gap is the
    // 3-point symbol error of the 64-point base
    double worst = 0.0;
    for (std::size_t j = 0; j < mesh.level_count(); ++j) {
        const double y = mesh.y_nodes()[j];
        const double phi = std::cosh(Y - y) / std::cosh(Y);
        for (std::size_t i = 0; i < base.point_count(); ++i)
            worst = std::max(worst, std::abs(U.at(i, j) - phi * f[i]));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("dtn flux on trivial and single-mode traces") {
    Grid base(1, 128);
    SUBCASE("constant trace has zero flux, and q_c scales the trace") {
        const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.3, 64, 2.0, 4.0);
        const ExtensionField U = solve_extension(Field(base, 1.5), mesh);
        CHECK(max_abs_diff(dtn_flux(U, 0.3), Field(base, 0.0)) <= 1e-10);
        CHECK(max_abs_diff(dtn_flux(U, 0.3, {0.4, true}), Field(base, 0.6)) <= 1e-10);
    }
    SUBCASE("cos(x), gamma = 1/2: multiplier 1 within 1%") {
        const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.5, 256, 2.0, 4.0);
        const ExtensionField U = solve_extension(cosine(base, 1), mesh);
        CHECK(rel_l2_diff(dtn_flux(U, 0.5), cosine(base, 1)) <= 0.01);
    }
    SUBCASE("cos(2x), gamma = 0.3: multiplier 2^0.6 within 2%") {
        const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.3, 256, 2.0, 4.0);
        const ExtensionField U = solve_extension(cosine(base, 2), mesh);
        const Field flux = dtn_flux(U, 0.3);
        CHECK(rel_l2_diff(flux, cosine(base, 2, 1.5157165665103981)) <= 0.02);

        // independent oracle: high-resolution mode ODE at the discrete symbol
        const double lambda = symbol_discrete_laplacian(base)[2];
        const double oracle =
            oracles::weighted_mode_multiplier(0.3, lambda, d_star(0.3));
        const double measured = inner(flux, cosine(base, 2)) /
                                inner(cosine(base, 2), cosine(base, 2));
        CHECK(std::abs(measured - oracle) / oracle <= 0.005);
    }
    SUBCASE("sin mode sees the same multiplier as cos") {
        const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.7, 128, 2.0, 4.0);
        const Field f = cosine(base, 3, 1.0, std::numbers::pi / 2.0);
        const ExtensionField U = solve_extension(f, mesh);
        const double target = std::pow(9.0, 0.7);
        CHECK(rel_l2_diff(dtn_flux(U, 0.7), target * f) <= 0.02);
    }
}

TEST_CASE("operator agreement improves monotonically under joint refinement") {
    // base, y-levels and the truncation height are refined together
    const struct {
        int nx, levels;
        double y_max;
    } seq[3] = {{64, 96, 4.0}, {128, 192, 6.0}, {256, 384, 8.0}};
    for (double gamma : {0.3, 0.5, 0.7}) {
        for (int k : {1, 2, 5, 8}) {
            double prev = 1e300;
            for (const auto& lvl : seq) {
                Grid base(1, lvl.nx);
                const ExtensionMesh mesh =
                    ExtensionMesh::graded(base, gamma, lvl.levels, 2.0, lvl.y_max);
                const Field f = cosine(base, k);
                const Field flux = dtn_flux(solve_extension(f, mesh), gamma);
                const double target = std::pow(static_cast<double>(k) * k, gamma);
                const double err = rel_l2_diff(flux, target * f);
                CHECK(err < 0.02);
                CHECK(err < prev);
                prev = err;
            }
        }
    }
}

TEST_CASE("solution minimizes the weighted energy over trace-f candidates") {
    Grid base(1, 16);
    const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.6, 24, 2.0, 3.0);
    Rng rng(31);
    const Field f = random_uniform(base, rng, 0.5, 1.5);
    const ExtensionField U = solve_extension(f, mesh);
    const double e0 = weighted_energy(U);
    const std::size_t P = base.point_count();
    for (int trial = 0; trial < 20; ++trial) {
        ExtensionField V = U;
        for (std::size_t q = P; q < V.values.size(); ++q)
            V.values[q] += rng.uniform(-0.05, 0.05);
        CHECK(weighted_energy(V) > e0);
    }
}

TEST_CASE("discrete maximum principle and comparison") {
    Grid base(1, 32);
    const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.35, 48, 2.0, 4.0);
    Rng rng(17);
    const Field f2 = random_uniform(base, rng, 0.2, 1.0);
    Field bump = random_uniform(base, rng, 0.0, 0.7);
    const Field f1 = f2 + bump;

    const ExtensionField U1 = solve_extension(f1, mesh);
    const ExtensionField U2 = solve_extension(f2, mesh);
    double min_gap = 1e300, lo = inf(f2), hi = sup(f2);
    for (std::size_t q = 0; q < U1.values.size(); ++q) {
        min_gap = std::min(min_gap, U1.values[q] - U2.values[q]);
        CHECK(U2.values[q] >= lo - 1e-11);
        CHECK(U2.values[q] <= hi + 1e-11);
    }
    CHECK(min_gap >= -1e-11);
}

TEST_CASE("solve and flux are linear in the trace") {
    Grid base(1, 32);
    const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.55, 48, 2.0, 4.0);
    Rng rng(23);
    const Field f1 = random_uniform(base, rng, -1.0, 1.0);
    const Field f2 = random_uniform(base, rng, -1.0, 1.0);
    const double alpha = 0.7, beta = -1.3;

    Field combo(base);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = alpha * f1[i] + beta * f2[i];
    const ExtensionField Uc = solve_extension(combo, mesh);
    const ExtensionField U1 = solve_extension(f1, mesh);
    const ExtensionField U2 = solve_extension(f2, mesh);

    double err = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < Uc.values.size(); ++q) {
        err = std::max(err, std::abs(Uc.values[q] - alpha * U1.values[q] -
                                     beta * U2.values[q]));
        scale = std::max(scale, std::abs(Uc.values[q]));
    }
    CHECK(err <= 1e-10 * std::max(scale, 1.0));

    const Field flux_combo = dtn_flux(Uc, 0.55);
    const Field flux_sum = alpha * dtn_flux(U1, 0.55) + beta * dtn_flux(U2, 0.55);
    CHECK(max_abs_diff(flux_combo, flux_sum) <= 1e-9);
}

TEST_CASE("flux extraction error cases") {
    Grid base(1, 16);
    SUBCASE("richardson needs three levels") {
        const ExtensionMesh mesh = ExtensionMesh::from_nodes(base, 0.5, {0.0, 1.0});
        const ExtensionField U = solve_extension(Field(base, 1.0), mesh);
        CHECK_THROWS_AS(dtn_flux(U, 0.5, {0.0, true}), std::invalid_argument);
        CHECK_NOTHROW(dtn_flux(U, 0.5, {0.0, false}));
    }
    SUBCASE("first-node weight underflow is reported") {
        const ExtensionMesh mesh =
            ExtensionMesh::from_nodes(base, 0.8, {0.0, 1e-250, 1e-200, 0.5, 1.0});
        ExtensionField U{mesh, std::vector<double>(mesh.level_count() *
                                                   base.point_count(), 1.0)};
        CHECK_THROWS_AS(dtn_flux(U, 0.8), std::invalid_argument);
    }
    SUBCASE("gamma must match the mesh weight") {
        const ExtensionMesh mesh = ExtensionMesh::graded(base, 0.5, 8);
        const ExtensionField U = solve_extension(Field(base, 1.0), mesh);
        CHECK_THROWS_AS(dtn_flux(U, 0.6), std::invalid_argument);
    }
}

TEST_CASE("harnack box experiment") {
    SUBCASE("constant data gives ratio 1") {
        HarnackBoxConfig cfg;
        cfg.trials = 1;
        cfg.data_min = cfg.data_max = 0.7;
        const HarnackBoxReport rep = check_harnack_fks(cfg);
        CHECK(rep.max_ratio_outer == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.max_ratio_inner == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("random positive data stays within the configured constant") {
        for (double gamma : {0.3, 0.5, 0.7}) {
            HarnackBoxConfig cfg;
            cfg.gamma = gamma;
            cfg.trials = 50;
            cfg.seed = 2024;
            const HarnackBoxReport rep = check_harnack_fks(cfg);
            CHECK(rep.max_ratio_outer <= 2.0);
            CHECK(rep.max_ratio_inner <= 2.0);
            const double comp = rep.max_ratio_outer / rep.max_ratio_inner;
            CHECK(comp <= 1.2);
            CHECK(comp >= 1.0 / 1.2);
        }
    }
    SUBCASE("a vanishing corner keeps the interior ratio finite") {
        HarnackBoxConfig cfg;
        cfg.trials = 3;
        cfg.vanishing_corner = true;
        const HarnackBoxReport rep = check_harnack_fks(cfg);
        CHECK(std::isfinite(rep.max_ratio_outer));
        CHECK(rep.max_ratio_outer >= 1.0);
    }
}
