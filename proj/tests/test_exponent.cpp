#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vexmax/error.hpp"
#include "vexmax/exponent.hpp"

using namespace vexmax;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("conjugate examples") {
    auto c = conjugate(Exponent::constant(3, 2.0));
    CHECK(c[0] == 2.0);
    c = conjugate(Exponent::constant(3, 1.0));
    CHECK(c[1] == kInf);
    CHECK(c.inf_set() == PointSet{0, 1, 2});
    c = conjugate(Exponent::constant(2, 4.0));
    CHECK(c[0] == doctest::Approx(4.0 / 3).epsilon(1e-15));
    CHECK(conjugate(c)[0] == 4.0);
    CHECK_THROWS_AS(conjugate(Exponent({0.5, 2.0})), DomainError);
}

TEST_CASE("conjugate is exactly involutive and 1/p + 1/p' = 1") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        auto p = vt::random_exponent(rng, 1 + t % 20, 1.0, 6.0);
        const auto pc = conjugate(p);
        const auto pcc = conjugate(pc);
        for (std::size_t x = 0; x < p.size(); ++x) {
            CHECK(pcc[x] == p[x]);
            const double r = pc[x] == kInf ? 0.0 : 1.0 / pc[x];
            CHECK(1.0 / p[x] + r == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    const Exponent one({1.0, 2.0});
    CHECK(conjugate(conjugate(one))[0] == 1.0);
}

TEST_CASE("range_on") {
    const Exponent p({1.0, 2.0});
    CHECK(range_on(p, std::vector<PointId>{0}) == std::make_pair(1.0, 1.0));
    CHECK(range_on(p, std::vector<PointId>{0, 1}) == std::make_pair(1.0, 2.0));
    CHECK(range_on(conjugate(p), std::vector<PointId>{0, 1}) == std::make_pair(2.0, kInf));
    CHECK_THROWS_AS(range_on(p, std::vector<PointId>{}), PreconditionError);
}

TEST_CASE("exponent classes") {
    CHECK(Exponent({1.5, 2.0}).in_class(ExponentClass::P));
    CHECK(!Exponent({1.0, 2.0}).in_class(ExponentClass::P));
    CHECK(Exponent({1.0, 2.0}).in_class(ExponentClass::P1));
    CHECK(Exponent({0.5, 2.0}).in_class(ExponentClass::P0));
    CHECK(!Exponent({0.5, 2.0}).in_class(ExponentClass::P1));
    CHECK_THROWS_AS(Exponent::primal({0.5, 2.0}, ExponentClass::P1), DomainError);
    CHECK_THROWS_AS(Exponent::primal({kInf, 2.0}), DomainError);
    CHECK_THROWS(Exponent({0.0, 2.0}));
    const Exponent p({2.0, 3.0, 4.0});
    CHECK(p.p_minus() == 2.0);
    CHECK(p.p_plus() == 4.0);
    CHECK(p.p_inf() == 2.0);
    CHECK(Exponent({2.0, 3.0}, 5.0).p_inf() == 5.0);
}

TEST_CASE("lh constants") {
    const auto s2 = build_space({0, 1, 1, 0}, {1, 1});
    auto r = lh_constants(Exponent({2.0, 3.0}), s2, 0);
    CHECK(r.c0 == 0.0);
    r = lh_constants(Exponent::constant(16, 2.5), vt::line(16), 3);
    CHECK(r.c0 == 0.0);
    CHECK(r.c_inf == 0.0);
    CHECK_THROWS_AS(lh_constants(conjugate(Exponent::constant(2, 1.0)), s2, 0), DomainError);

    // Brute-force c0 on a small space.
    const auto s = vt::line(8);
    const auto p = vt::lh_exponent(s, 2.0, 1.0);
    double c0 = 0.0;
    for (std::size_t x = 0; x < 8; ++x) {
        for (std::size_t y = 0; y < 8; ++y) {
            const double d = s.dist(x, y);
            if (d > 0 && d < 0.5) c0 = std::max(c0, std::fabs(p[x] - p[y]) * std::log(std::exp(1.0) + 1 / d));
        }
    }
    CHECK(lh_constants(p, s, 0).c0 == c0);

    // Stable across refinements; finite for every base point.
    std::vector<double> c0s;
    for (std::size_t n : {32, 64, 128}) {
        const auto sn = vt::line(n);
        const auto pn = vt::lh_exponent(sn, 2.0, 1.0);
        c0s.push_back(lh_constants(pn, sn, 0).c0);
        for (PointId b : {PointId{0}, n / 2, n - 1}) {
            const auto rep = lh_constants(pn, sn, b);
            CHECK(std::isfinite(rep.c_inf));
            CHECK(rep.c_inf >= 0.0);
        }
    }
    CHECK(c0s[0] > 0.0);
    CHECK(*std::max_element(c0s.begin(), c0s.end()) <= 2 * *std::min_element(c0s.begin(), c0s.end()));
}

TEST_CASE("eta relation") {
    CHECK(check_eta_relation(Exponent::constant(3, 2.0), Exponent::constant(3, 2.0)) == 0.0);
    CHECK(check_eta_relation(Exponent::constant(3, 2.0), Exponent::constant(3, 4.0)) == 0.25);
    CHECK(check_eta_relation(Exponent({2.0, 3.0}), Exponent({2.0, 3.0})) == 0.0);
    CHECK_THROWS_AS(check_eta_relation(Exponent({2.0, 3.0}), Exponent({2.0, 2.0})), DomainError);
    CHECK_THROWS_AS(check_eta_relation(Exponent::constant(2, 4.0), Exponent::constant(2, 2.0)), DomainError);
    CHECK_THROWS_AS(check_eta_relation(Exponent::constant(2, 1.0), Exponent::constant(2, 1e300)), DomainError);
    const auto p = Exponent({1.5, 2.0, 2.5});
    const auto q = exponent_from_eta(p, 0.3);
    CHECK(check_eta_relation(p, q) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS(exponent_from_eta(Exponent({1.5, 4.0}), 0.3), DomainError);
}

TEST_CASE("eta shift bounds the LH constant by sup (q/p)^2") {
    // |q(x)-q(y)| = |p(x)-p(y)| q(x)q(y)/(p(x)p(y)), so c0(q) <= sup(q/p)^2 c0(p),
    // with equality of constants at eta = 0.
    for (std::size_t n : {16, 32, 64}) {
        const auto s = vt::line(n);
        const auto p = vt::lh_exponent(s, 1.8, 0.6);
        CHECK(lh_constants(exponent_from_eta(p, 0.0), s, 0).c0 == lh_constants(p, s, 0).c0);
        for (double eta : {0.1, 0.25}) {
            const auto q = exponent_from_eta(p, eta);
            double factor = 0.0;
            for (std::size_t x = 0; x < n; ++x) factor = std::max(factor, q[x] / p[x]);
            const double cq = lh_constants(q, s, 0).c0;
            const double cp = lh_constants(p, s, 0).c0;
            CHECK(cq <= factor * factor * cp * (1 + 1e-12));
            CHECK(cq >= cp);
        }
    }
}
