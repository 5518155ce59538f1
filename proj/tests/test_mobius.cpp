#include <doctest.h>

#include <cmath>

#include "factorball/mobius.hpp"
#include "test_helpers.hpp"

using namespace factorball;
using namespace factorball::testing;

namespace {
const double kLog3 = std::log(3.0);
}

TEST_CASE("hyp_dist basic values") {
    Point x({0.2, -0.3});
    CHECK(hyp_dist(x, x) == 0.0);

    // With one endpoint at the origin the distance reduces to
    // log((1+|x|)/(1-|x|)).
    Point origin = Point::origin(2);
    Point half({0.5, 0.0});
    CHECK(hyp_dist(origin, half) == doctest::Approx(kLog3).epsilon(1e-12));

    // Symmetry
    CHECK(hyp_dist(x, half) == doctest::Approx(hyp_dist(half, x)).epsilon(1e-15));
}

TEST_CASE("hyp_dist is Moebius invariant") {
    std::mt19937_64 rng(7);
    for (int n : {2, 3, 5}) {
        for (int i = 0; i < 100; ++i) {
            MobiusMap m = random_mobius(rng, n);
            for (int j = 0; j < 40; ++j) {
                Vec x = random_in_ball(rng, n, 0.9);
                Vec y = random_in_ball(rng, n, 0.9);
                CHECK(std::abs(hyp_dist(m.apply_vec(x), m.apply_vec(y)) -
                               hyp_dist(x, y)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("hyp_dist metric axioms on random triples") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10000; ++i) {
        Vec x = random_in_ball(rng, 3, 0.95);
        Vec y = random_in_ball(rng, 3, 0.95);
        Vec z = random_in_ball(rng, 3, 0.95);
        double dxy = hyp_dist(x, y);
        double dyx = hyp_dist(y, x);
        CHECK(std::abs(dxy - dyx) <= 1e-9);
        CHECK(dxy >= 0.0);
        CHECK(hyp_dist(x, z) <= dxy + hyp_dist(y, z) + 1e-9);
    }
    Vec x = random_in_ball(rng, 3, 0.9);
    CHECK(hyp_dist(x, x) == 0.0);
}

TEST_CASE("point boundary guard") {
    CHECK_THROWS_AS(Point({0.999999999999999, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Point({1.5, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(Point({0.9999, 0.0}));
}

TEST_CASE("translation_to_origin maps z0 to 0 and preserves the ball") {
    SUBCASE("identity at the origin") {
        MobiusMap m = MobiusMap::translation_to_origin(Point::origin(3));
        CHECK(m.trivially_identity());
    }

    SUBCASE("normative properties at (0.3, 0.4)") {
        Point z0({0.3, 0.4});
        MobiusMap m = MobiusMap::translation_to_origin(z0);
        CHECK(m.apply(z0).norm() <= 1e-12);

        // Ball preservation, isometry, and absence of fixed points.
        std::mt19937_64 rng(3);
        double min_disp = 1e30;
        for (int i = 0; i < 500; ++i) {
            Vec x = random_in_ball(rng, 2, 0.98);
            Vec mx = m.apply_vec(x);
            CHECK(mx.norm() < 1.0);
            Vec y = random_in_ball(rng, 2, 0.98);
            CHECK(std::abs(hyp_dist(m.apply_vec(x), m.apply_vec(y)) -
                           hyp_dist(x, y)) <= 1e-9);
            min_disp = std::min(min_disp, hyp_dist(x, mx));
        }
        // A hyperbolic translation displaces every point by at least its
        // translation length h(0, z0).
        CHECK(min_disp >= hyp_dist(Point::origin(2), z0) - 1e-9);
    }

    SUBCASE("inverse maps 0 back to z0") {
        std::mt19937_64 rng(5);
        for (int n : {2, 3, 4}) {
            Vec z0 = random_in_ball(rng, n, 0.8);
            MobiusMap m = MobiusMap::translation_to_origin(Point(z0));
            CHECK((m.inverse().apply_vec(Vec::Zero(n)) - z0).norm() <= 1e-12);
        }
    }
}

TEST_CASE("compose, inverse, associativity") {
    std::mt19937_64 rng(13);
    const int n = 3;
    MobiusMap a = random_mobius(rng, n);
    MobiusMap b = random_mobius(rng, n);
    MobiusMap c = random_mobius(rng, n);
    MobiusMap id = MobiusMap::identity(n);

    for (int i = 0; i < 100; ++i) {
        Vec x = random_in_ball(rng, n, 0.9);
        // compose acts in application order
        CHECK((compose(a, b).apply_vec(x) - a.apply_vec(b.apply_vec(x))).norm() <=
              1e-9);
        // identity composition
        CHECK((compose(a, id).apply_vec(x) - a.apply_vec(x)).norm() <= 1e-12);
        // inverse undoes
        CHECK((a.inverse().apply_vec(a.apply_vec(x)) - x).norm() <= 1e-9);
        // associativity
        Vec lhs = compose(compose(a, b), c).apply_vec(x);
        Vec rhs = compose(a, compose(b, c)).apply_vec(x);
        CHECK((lhs - rhs).norm() <= 1e-9);
    }
}

TEST_CASE("in_hyp_ball strict boundary") {
    Point y0({0.1, 0.2});
    CHECK(in_hyp_ball(y0, 0.1, y0));
    Point origin = Point::origin(2);
    Point half({0.5, 0.0});
    // h(0, (0.5,0)) = log 3 = 1.0986123...
    CHECK_FALSE(in_hyp_ball(origin, 1.0986, half));
    CHECK(in_hyp_ball(origin, 1.1, half));
}

TEST_CASE("euclidean vs hyperbolic comparison bounds") {
    std::mt19937_64 rng(17);

    SUBCASE("|z1 - z2| <= h(z1, z2) everywhere in the ball") {
        for (int n : {2, 3}) {
            for (int i = 0; i < 20000; ++i) {
                Vec a = random_in_ball(rng, n, 0.999);
                Vec b = random_in_ball(rng, n, 0.999);
                CHECK((a - b).norm() <= hyp_dist(a, b) + 1e-12);
            }
        }
    }

    SUBCASE("lower bound with the computed constant inside B(0, 0.4)") {
        double c1 = comparison_constant(2, 0.4);
        // The coincident-pair limit at radius 0.4 is (1 - 0.16)/2 = 0.42;
        // the computed constant must sit just below it.
        CHECK(c1 > 0.40);
        CHECK(c1 < 0.42);
        for (int i = 0; i < 20000; ++i) {
            Vec a = random_in_ball(rng, 2, 0.4);
            Vec b = random_in_ball(rng, 2, 0.4);
            CHECK(c1 * hyp_dist(a, b) <= (a - b).norm() + 1e-12);
        }
    }

    SUBCASE("log((1+r/2)/(1-r/2)) >= r on a grid") {
        for (int i = 1; i < 100; ++i) {
            double r = i / 100.0;
            CHECK(std::log((1.0 + r / 2.0) / (1.0 - r / 2.0)) >= r);
        }
    }
}

TEST_CASE("hyp_ball_as_euclidean matches the metric") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 20; ++i) {
        Vec c = random_in_ball(rng, 2, 0.6);
        double r = 0.3 + 0.2 * (i % 5);
        EuclideanBall ball = hyp_ball_as_euclidean(Point(c), r);
        for (int k = 0; k < 16; ++k) {
            double theta = 2.0 * M_PI * k / 16;
            Vec x = ball.center;
            x(0) += ball.radius * std::cos(theta);
            x(1) += ball.radius * std::sin(theta);
            CHECK(hyp_dist(c, x) == doctest::Approx(r).epsilon(1e-9));
        }
    }
}

TEST_CASE("primitive validation") {
    Vec c(2);
    c << 2.0, 0.0;
    // Orthogonality to the unit circle requires r^2 = |c|^2 - 1 = 3.
    CHECK_NOTHROW(MobiusMap::from_primitives(2, {SphereInversion{c, 3.0}}));
    CHECK_THROWS_AS(MobiusMap::from_primitives(2, {SphereInversion{c, 1.0}}),
                    std::invalid_argument);
    Mat q(2, 2);
    q << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(MobiusMap::from_primitives(2, {Orthogonal{q}}),
                    std::invalid_argument);
}
