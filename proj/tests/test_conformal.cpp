#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fyflow/conformal.hpp"
#include "fyflow/rng.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace fyflow;
using namespace fyflow::testutil;

namespace {

PointCloudField random_cloud(int n, int count, Rng& rng, double lo = -2.0, double hi = 2.0) {
    PointCloudField pc;
    pc.dim = n;
    for (int p = 0; p < count; ++p) {
        double r2 = 0.0;
        std::vector<double> x(n);
        do {
            r2 = 0.0;
            for (int d = 0; d < n; ++d) {
                x[d] = rng.uniform(lo, hi);
                r2 += x[d] * x[d];
            }
        } while (r2 < 1e-4);
        for (double c : x) pc.coords.push_back(c);
        pc.values.push_back(rng.uniform(-1.0, 1.0));
    }
    return pc;
}

} // namespace

TEST_CASE("stroock-varopoulos inequality") {
    Grid g(1, 64);
    SUBCASE("q = 2 is a Parseval identity") {
        Rng rng(71);
        for (int t = 0; t < 10; ++t) {
            const Field v = random_smooth_positive(g, rng);
            const CheckPair p = stroock_varopoulos_check(v, 0.6, 2.0);
            CHECK(std::abs(p.lhs - p.rhs) <= 1e-12 * std::max(1.0, std::abs(p.lhs)));
        }
    }
    SUBCASE("constants give zero on both sides") {
        const CheckPair p = stroock_varopoulos_check(Field(g, 2.2), 0.5, 3.0);
        CHECK(std::abs(p.lhs) <= 1e-13);
        CHECK(std::abs(p.rhs) <= 1e-13);
    }
    SUBCASE("holds on random positive fields") {
        Rng rng(73);
        for (int t = 0; t < 25; ++t)
            for (double q : {1.5, 3.0})
                for (double gamma : {0.3, 0.7}) {
                    const Field v = random_smooth_positive(g, rng);
                    const CheckPair p = stroock_varopoulos_check(v, gamma, q);
                    CHECK(p.lhs >= p.rhs - 1e-10);
                }
    }
    SUBCASE("rejects nonpositive fields and q <= 1") {
        Field v(g, 1.0);
        v[0] = 0.0;
        CHECK_THROWS_AS(stroock_varopoulos_check(v, 0.5, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(stroock_varopoulos_check(Field(g, 1.0), 0.5, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(stroock_varopoulos_check(Field(g, 1.0), 1.5, 2.0),
                        std::invalid_argument);
    }
}

TEST_CASE("stereographic projection") {
    SUBCASE("origin maps to the south pole") {
        const std::vector<double> x = {0.0, 0.0, 0.0};
        const std::vector<double> p = stereographic_inverse(x);
        REQUIRE(p.size() == 4);
        CHECK(p[0] == 0.0);
        CHECK(p[1] == 0.0);
        CHECK(p[2] == 0.0);
        CHECK(p[3] == -1.0);
    }
    SUBCASE("large |x| approaches the north pole (0,...,0,1)") {
        const std::vector<double> x = {1e8, 0.0, 0.0};
        const std::vector<double> p = stereographic_inverse(x);
        CHECK(std::abs(p[3] - 1.0) <= 1e-14);
    }
    SUBCASE("images land on the unit sphere") {
        Rng rng(79);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> x(3);
            const double scale = std::pow(10.0, rng.uniform(-3.0, 6.0));
            for (double& c : x) c = scale * rng.uniform(-1.0, 1.0);
            const std::vector<double> p = stereographic_inverse(x);
            double nrm = 0.0;
            for (double c : p) nrm += c * c;
            worst = std::max(worst, std::abs(std::sqrt(nrm) - 1.0));
        }
        CHECK(worst <= 1e-14);
    }
    SUBCASE("forward inverts the embedding away from the pole") {
        Rng rng(83);
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x(2);
            for (double& c : x) c = rng.uniform(-10.0, 10.0);
            const std::vector<double> back = stereographic_forward(stereographic_inverse(x));
            for (std::size_t d = 0; d < x.size(); ++d)
                CHECK(std::abs(back[d] - x[d]) <= 1e-12 * std::max(1.0, std::abs(x[d])));
        }
        CHECK_THROWS_AS(stereographic_forward(std::vector<double>{0.0, 0.0, 1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("kelvin transform") {
    const int n = 3;
    const double gamma = 0.5;
    SUBCASE("involution to round-off") {
        Rng rng(89);
        const PointCloudField pc = random_cloud(n, 1000, rng);
        const PointCloudField twice = kelvin_transform(kelvin_transform(pc, n, gamma), n, gamma);
        for (std::size_t p = 0; p < pc.size(); ++p) {
            CHECK(std::abs(twice.values[p] - pc.values[p]) <= 1e-12);
            for (int d = 0; d < n; ++d)
                CHECK(std::abs(twice.coords[p * n + d] - pc.coords[p * n + d]) <= 1e-12);
        }
    }
    SUBCASE("the bubble is a pointwise fixed point") {
        Rng rng(97);
        PointCloudField pc = random_cloud(n, 1000, rng);
        for (std::size_t p = 0; p < pc.size(); ++p)
            pc.values[p] = bubble_profile(pc.point(p), n, gamma);
        const PointCloudField out = kelvin_transform(pc, n, gamma);
        for (std::size_t p = 0; p < pc.size(); ++p)
            CHECK(std::abs(out.values[p] - bubble_profile(out.point(p), n, gamma)) <= 1e-12);
    }
    SUBCASE("values on the unit sphere are unchanged") {
        PointCloudField pc;
        pc.dim = n;
        Rng rng(101);
        for (int p = 0; p < 50; ++p) {
            std::vector<double> x(n);
            double r2 = 0.0;
            for (double& c : x) {
                c = rng.normal();
                r2 += c * c;
            }
            for (double& c : x) c /= std::sqrt(r2);
            for (double c : x) pc.coords.push_back(c);
            pc.values.push_back(rng.uniform(0.5, 2.0));
        }
        const PointCloudField out = kelvin_transform(pc, n, gamma);
        for (std::size_t p = 0; p < pc.size(); ++p)
            CHECK(out.values[p] == doctest::Approx(pc.values[p]).epsilon(1e-14));
    }
    SUBCASE("origin is rejected") {
        PointCloudField pc;
        pc.dim = 2;
        pc.coords = {0.0, 0.0};
        pc.values = {1.0};
        CHECK_THROWS_AS(kelvin_transform(pc, 2, 0.5), std::invalid_argument);
    }
}

TEST_CASE("harnack and gradient quotients") {
    Grid g(1, 256);
    SUBCASE("constant field") {
        CHECK(harnack_quotient(Field(g, 3.3)) == doctest::Approx(1.0));
        CHECK(grad_quotient(Field(g, 3.3)) <= 1e-12);
    }
    SUBCASE("2 + cos(x)") {
        const Field w = cosine(g, 1, 1.0, 0.0, 2.0);
        CHECK(harnack_quotient(w) == doctest::Approx(3.0).epsilon(1e-12));
        // max |sin|/(2+cos) = 1/sqrt(3), attained off-lattice
        CHECK(grad_quotient(w) == doctest::Approx(0.57735026918962576).epsilon(2e-4));
    }
    SUBCASE("positivity required") {
        Field w(g, 1.0);
        w[5] = 0.0;
        CHECK_THROWS_AS(harnack_quotient(w), std::invalid_argument);
        CHECK_THROWS_AS(grad_quotient(w), std::invalid_argument);
    }
}
