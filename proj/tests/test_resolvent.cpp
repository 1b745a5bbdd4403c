#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fyflow/resolvent.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace fyflow;
using namespace fyflow::testutil;

namespace {

FlowParams params_n3(double gamma, double q_c, double h) {
    FlowParams p;
    p.gamma = gamma;
    p.n = 3;
    p.q_c = q_c;
    p.h = h;
    return p;
}

} // namespace

TEST_CASE("objective values on simple fields") {
    Grid g(1, 64);
    FlowParams p = params_n3(0.5, 0.0, 1.0); // N = 2
    SUBCASE("J(0) = 0") {
        CHECK(objective_J(Field(g, 0.0), ResolventProblem(Field(g, 0.0), p)) == 0.0);
    }
    SUBCASE("constants with zero data keep only the power term") {
        const double c = 1.7, N = p.N_gamma();
        const double expect = 2.0 * std::numbers::pi * std::pow(c, N + 1.0) / (N + 1.0);
        CHECK(objective_J(Field(g, c), ResolventProblem(Field(g, 0.0), p)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches directional difference quotients") {
    Grid g(1, 32);
    FlowParams p = params_n3(0.6, 0.4, 0.7);
    Rng rng(42);
    const Field gdata = random_uniform(g, rng, 0.0, 2.0);
    const ResolventProblem prob(gdata, p);
    const Field w = random_uniform(g, rng, 0.1, 1.5);
    const Field grad = objective_gradient(w, prob);

    for (int trial = 0; trial < 5; ++trial) {
        const Field d = random_uniform(g, rng, -1.0, 1.0);
        const double eps = 1e-6;
        Field wp = w, wm = w;
        axpy(wp, eps, d);
        axpy(wm, -eps, d);
        const double fd = (objective_J(wp, prob) - objective_J(wm, prob)) / (2.0 * eps);
        const double an = inner(grad, d);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("resolvent closed-form solutions") {
    Grid g(1, 64);
    SUBCASE("zero data short-circuits") {
        const ResolventSolution s =
            solve_resolvent(ResolventProblem(Field(g, 0.0), params_n3(0.5, 1.0, 1.0)));
        CHECK(s.iterations == 0);
        CHECK(sup(s.w) == 0.0);
    }
    SUBCASE("g = 2, h = 1, q_c = 1, N = 2 gives w = 1") {
        const ResolventSolution s =
            solve_resolvent(ResolventProblem(Field(g, 2.0), params_n3(0.5, 1.0, 1.0)));
        CHECK(max_abs_diff(s.w, Field(g, 1.0)) <= 1e-9);
    }
    SUBCASE("q_c = 0 constants take the pure root w = c^(1/N)") {
        FlowParams p = params_n3(0.3, 0.0, 0.5); // N = 1.5/... = (3+0.6)/(3-0.6)
        const double c = 1.9;
        const ResolventSolution s = solve_resolvent(ResolventProblem(Field(g, c), p));
        CHECK(max_abs_diff(s.w, Field(g, std::pow(c, 1.0 / p.N_gamma()))) <= 1e-10);
    }
    SUBCASE("negative data is rejected") {
        Field bad(g, 1.0);
        bad[3] = -0.1;
        CHECK_THROWS_AS(solve_resolvent(ResolventProblem(bad, params_n3(0.5, 0.0, 1.0))),
                        std::invalid_argument);
    }
}

TEST_CASE("residual contract and iteration stream") {
    Grid g(1, 64);
    FlowParams p = params_n3(0.7, 0.5, 0.3);
    Rng rng(7);
    const Field gdata = random_uniform(g, rng, 0.0, 2.0);

    int calls = 0, last_iter = -1;
    double last_res = 1e300;
    ResolventOptions opts;
    opts.observer = [&](const ResolventIteration& it) {
        ++calls;
        CHECK(it.iteration == last_iter + 1);
        last_iter = it.iteration;
        last_res = it.residual;
    };
    const ResolventSolution s = solve_resolvent(ResolventProblem(gdata, p), opts);
    CHECK(calls >= 2);
    CHECK(s.residual_norm <= p.tol_resolvent);
    CHECK(inf(s.w) >= 0.0);
}

TEST_CASE("uniqueness: different initial iterates agree") {
    Grid g(1, 64);
    FlowParams p = params_n3(0.5, 0.2, 0.4);
    Rng rng(19);
    const Field gdata = random_uniform(g, rng, 0.0, 2.0);
    const ResolventProblem prob(gdata, p);

    const Field w_default = solve_resolvent(prob).w;
    Field start = random_uniform(g, rng, 0.5, 3.0);
    ResolventOptions opts;
    opts.initial_iterate = &start;
    const Field w_other = solve_resolvent(prob, opts).w;
    CHECK(max_abs_diff(w_default, w_other) <= 10.0 * p.tol_resolvent * sup(w_default) + 1e-12);
}

TEST_CASE("comparison principle") {
    Grid g(1, 64);
    FlowParams p = params_n3(0.5, 1.0, 0.3);
    Rng rng(3);
    const Field g2 = random_uniform(g, rng, 0.1, 1.0);
    const Field g1 = g2 + random_uniform(g, rng, 0.0, 0.8);
    const Field w1 = solve_resolvent(ResolventProblem(g1, p)).w;
    const Field w2 = solve_resolvent(ResolventProblem(g2, p)).w;
    CHECK(inf(w1 - w2) >= -1e-10);
}

TEST_CASE("w^N approaches g as h shrinks") {
    Grid g(1, 64);
    Rng rng(11);
    const Field gdata = random_uniform(g, rng, 0.2, 1.5);
    double prev = 1e300;
    for (double h : {1.0, 0.1, 0.01}) {
        FlowParams p = params_n3(0.5, 0.7, h);
        const Field w = solve_resolvent(ResolventProblem(gdata, p)).w;
        const double err = lp_norm(pow_plus(w, p.N_gamma()) - gdata, 1.0);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("mass identity at q_c = 0") {
    Grid g(2, 16);
    FlowParams p = params_n3(0.4, 0.0, 0.8);
    Rng rng(13);
    const Field gdata = random_uniform(g, rng, 0.0, 2.0);
    const Field w = solve_resolvent(ResolventProblem(gdata, p)).w;
    const double in = integral(gdata);
    const double out = integral(pow_plus(w, p.N_gamma()));
    CHECK(std::abs(out - in) <= 1e-9 * in);
}

TEST_CASE("t-contraction") {
    Grid g(1, 64);
    FlowParams p = params_n3(0.5, 1.0, 0.6);
    SUBCASE("identical data gives zero on both sides") {
        const Field gdata(g, 1.3);
        const TContractionPair pair = check_t_contraction(gdata, gdata, p, p.h);
        CHECK(std::abs(pair.lhs) <= 1e-12);
        CHECK(std::abs(pair.rhs) <= 1e-12);
    }
    SUBCASE("an added constant is contracted") {
        Rng rng(29);
        const Field g2 = random_uniform(g, rng, 0.2, 1.2);
        const double c = 0.45;
        const Field g1 = g2 + Field(g, c);
        const TContractionPair pair = check_t_contraction(g1, g2, p, p.h);
        CHECK(pair.rhs == doctest::Approx(c * 2.0 * std::numbers::pi).epsilon(1e-12));
        CHECK(pair.lhs <= pair.rhs + 1e-10);
    }
    SUBCASE("random nonnegative pairs") {
        Rng rng(37);
        for (int trial = 0; trial < 20; ++trial) {
            const Field g1 = random_uniform(g, rng, 0.0, 2.0);
            const Field g2 = random_uniform(g, rng, 0.0, 2.0);
            const TContractionPair pair = check_t_contraction(g1, g2, p, p.h);
            CHECK(pair.lhs <= pair.rhs + 1e-8);
        }
    }
}
