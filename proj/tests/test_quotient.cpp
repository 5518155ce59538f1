#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "factorball/quotient.hpp"
#include "test_helpers.hpp"

using namespace factorball;
using namespace factorball::testing;

namespace {

QuotientPoint axis_qpoint(const GroupHandle& g, double s) {
    return QuotientPoint(Point(axis_point(s, g->dimension())), g);
}

// Independent oracle for the cyclic group: orbit points of an axis point are
// the axis points at coordinates s + k * ell.
double cyclic_axis_oracle(double s1, double s2, double ell) {
    double best = 1e300;
    for (int k = -10; k <= 10; ++k) best = std::min(best, std::abs(s2 - s1 - k * ell));
    return best;
}

}  // namespace

TEST_CASE("quotient_dist on the cyclic quotient") {
    auto g = make_cyclic_translation(2, 1.0);

    SUBCASE("identical representatives") {
        auto p = axis_qpoint(g, 0.3);
        CHECK(quotient_dist(p, p) == 0.0);
    }

    SUBCASE("axis points against the brute-force oracle") {
        CHECK(quotient_dist(axis_qpoint(g, 0.0), axis_qpoint(g, 0.7), 12) ==
              doctest::Approx(cyclic_axis_oracle(0.0, 0.7, 1.0)).epsilon(1e-9));
        for (double s1 : {-1.3, -0.4, 0.0, 0.6, 2.1})
            for (double s2 : {-2.0, -0.9, 0.25, 1.55, 3.0})
                CHECK(quotient_dist(axis_qpoint(g, s1), axis_qpoint(g, s2), 12) ==
                      doctest::Approx(cyclic_axis_oracle(s1, s2, 1.0))
                          .epsilon(1e-9));
    }

    SUBCASE("projected pseudo distance on the axis") {
        CHECK(projected_pseudo_dist(Point::origin(2),
                                    Point(axis_point(0.9)), g, 12) ==
              doctest::Approx(0.1).epsilon(1e-9));
    }

    SUBCASE("never above the representative distance") {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 200; ++i) {
            Vec a = random_in_ball(rng, 2, 0.8);
            Vec b = random_in_ball(rng, 2, 0.8);
            QuotientPoint pa(Point(a), g), pb(Point(b), g);
            CHECK(quotient_dist(pa, pb, 8) <= hyp_dist(a, b) + 1e-12);
        }
    }
}

TEST_CASE("trivial group quotient distance equals hyperbolic distance") {
    auto g = make_trivial_group(2);
    std::mt19937_64 rng(37);
    for (int i = 0; i < 100; ++i) {
        Vec a = random_in_ball(rng, 2, 0.9);
        Vec b = random_in_ball(rng, 2, 0.9);
        CHECK(quotient_dist(QuotientPoint(Point(a), g), QuotientPoint(Point(b), g)) ==
              hyp_dist(a, b));
    }
}

TEST_CASE("groups must match") {
    auto g1 = make_cyclic_translation(2, 1.0);
    auto g2 = make_cyclic_translation(2, 1.0);
    QuotientPoint a(Point({0.1, 0.0}), g1), b(Point({0.2, 0.0}), g2);
    CHECK_THROWS_AS(quotient_dist(a, b), std::invalid_argument);
}

TEST_CASE("metric axioms of quotient_dist") {
    std::mt19937_64 rng(41);
    for (auto g : {make_cyclic_translation(2, 1.0), schottky_two_pairs()}) {
        for (int i = 0; i < 300; ++i) {
            QuotientPoint p1(Point(random_in_ball(rng, 2, 0.7)), g);
            QuotientPoint p2(Point(random_in_ball(rng, 2, 0.7)), g);
            QuotientPoint p3(Point(random_in_ball(rng, 2, 0.7)), g);
            double d12 = quotient_dist(p1, p2, 8);
            double d21 = quotient_dist(p2, p1, 8);
            double d13 = quotient_dist(p1, p3, 8);
            double d23 = quotient_dist(p2, p3, 8);
            CHECK(d12 >= 0.0);
            CHECK(std::abs(d12 - d21) <= 1e-9);
            CHECK(d13 <= d12 + d23 + 1e-9);
        }
        // identity of indiscernibles at tolerance: same orbit, different reps
        Vec z = random_in_ball(rng, 2, 0.5);
        Vec z_moved = g->is_trivial() ? z : g->letter(1).apply_vec(z);
        CHECK(quotient_dist(QuotientPoint(Point(z), g),
                            QuotientPoint(Point(z_moved), g), 8) <= 1e-9);
    }
}

TEST_CASE("one-sided orbit infimum agrees with the two-sided form") {
    // Brute force over pairs (w1, w2) with |wi| <= 3 against the one-sided
    // search with budget 6.
    for (auto g : {make_cyclic_translation(2, 1.0), schottky_two_pairs()}) {
        auto els = enumerate_elements(*g, 3);
        std::mt19937_64 rng(43);
        for (int i = 0; i < 10; ++i) {
            Vec a = random_in_ball(rng, 2, 0.5);
            Vec b = random_in_ball(rng, 2, 0.5);
            double two_sided = 1e300;
            for (const auto& w1 : els)
                for (const auto& w2 : els)
                    two_sided = std::min(
                        two_sided,
                        hyp_dist(w1.map.apply_vec(a), w2.map.apply_vec(b)));
            double one_sided =
                quotient_dist(QuotientPoint(Point(a), g), QuotientPoint(Point(b), g), 6);
            CHECK(one_sided <= two_sided + 1e-9);
            // two-sided can only see farther pairs than one-sided within budget
            CHECK(two_sided <= one_sided + 1e-9);
        }
    }
}

TEST_CASE("local isometry radius") {
    SUBCASE("cyclic translation on axis samples gives half the length") {
        auto g = make_cyclic_translation(2, 1.0);
        std::vector<Point> samples;
        for (double s = -0.5; s <= 0.5; s += 0.1)
            samples.emplace_back(Point(axis_point(s)));
        CHECK(local_isometry_radius(*g, samples, 8) ==
              doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("trivial group gives the infinite sentinel") {
        auto g = make_trivial_group(2);
        std::vector<Point> samples{Point::origin(2)};
        CHECK(std::isinf(local_isometry_radius(*g, samples, 4)));
    }

    SUBCASE("schottky radius is half the brute-forced minimal displacement") {
        auto g = schottky_two_pairs();
        std::vector<Point> samples{Point::origin(2), Point({0.1, 0.05}),
                                   Point({-0.07, 0.12})};
        auto els = enumerate_elements(*g, 6);
        double brute = 1e300;
        for (const auto& el : els) {
            if (el.word.empty()) continue;
            for (const auto& z : samples)
                brute = std::min(brute, hyp_dist(z.v(), el.map.apply_vec(z.v())));
        }
        double radius = local_isometry_radius(*g, samples, 6);
        CHECK(radius == doctest::Approx(0.5 * brute).epsilon(1e-9));
        CHECK(radius > 0.0);
    }

    SUBCASE("d = h within the radius (cyclic example)") {
        auto g = make_cyclic_translation(2, 1.0);
        std::mt19937_64 rng(47);
        for (int i = 0; i < 200; ++i) {
            Vec a = random_in_ball(rng, 2, 0.4);
            Vec b = random_in_ball(rng, 2, 0.4);
            if (hyp_dist(a, b) >= 0.45) continue;
            CHECK(projected_pseudo_dist(Point(a), Point(b), g, 8) ==
                  doctest::Approx(hyp_dist(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dirichlet domain") {
    auto g = make_cyclic_translation(2, 1.0);
    Point p0 = Point::origin(2);

    SUBCASE("center and bisector examples") {
        CHECK(in_dirichlet_domain(*g, p0, p0, 8));
        CHECK(in_dirichlet_domain(*g, p0, Point(axis_point(0.49)), 8));
        CHECK_FALSE(in_dirichlet_domain(*g, p0, Point(axis_point(0.51)), 8));
        auto cls = classify_dirichlet(*g, p0, Point(axis_point(0.5)), 8);
        CHECK(cls.position == DirichletPosition::boundary);
    }

    SUBCASE("trivial group accepts everything") {
        auto id = make_trivial_group(2);
        std::mt19937_64 rng(53);
        for (int i = 0; i < 50; ++i)
            CHECK(in_dirichlet_domain(*id, p0, Point(random_in_ball(rng, 2, 0.9)), 4));
    }

    SUBCASE("tiling: exactly one translate covers a generic point") {
        std::mt19937_64 rng(59);
        auto els = enumerate_elements(*g, 8);
        int tested = 0;
        for (int i = 0; i < 60 && tested < 40; ++i) {
            Vec z = random_in_ball(rng, 2, 0.75);
            // skip points within the tie margin of some bisector
            bool on_boundary = false;
            int count = 0;
            for (const auto& el : els) {
                Vec pulled = el.map.inverse().apply_vec(z);
                auto cls = classify_dirichlet(*g, p0, Point(pulled), 8);
                if (cls.position == DirichletPosition::boundary) on_boundary = true;
                if (cls.position == DirichletPosition::interior) ++count;
            }
            if (on_boundary) continue;
            ++tested;
            CHECK(count == 1);
        }
        CHECK(tested >= 30);
    }
}

TEST_CASE("hyperbolic measure") {
    SUBCASE("empty region") {
        SamplerSpec sampler{Vec::Zero(2), 0.5};
        auto res = hyp_measure([](const Vec&) { return false; }, 2, sampler,
                               10000, 7);
        CHECK(res.estimate == 0.0);
    }

    SUBCASE("area of the unit hyperbolic ball in n = 2") {
        // Closed form: 4 pi sinh^2(1/2); cross-checked by the direct radial
        // integral of the density, 4 pi r'^2/(1 - r'^2) at r' = tanh(1/2).
        const double expected = 4.0 * M_PI * std::sinh(0.5) * std::sinh(0.5);
        const double rprime = std::tanh(0.5);
        const double direct = 4.0 * M_PI * rprime * rprime / (1.0 - rprime * rprime);
        CHECK(expected == doctest::Approx(direct).epsilon(1e-12));

        SamplerSpec sampler{Vec::Zero(2), rprime + 1e-9};
        Region ball = Region::ball(Vec::Zero(2), 1.0, Metric::hyperbolic);
        auto res = hyp_measure(ball, 2, sampler, 400000, 2024);
        CHECK(std::abs(res.estimate - expected) / expected < 0.005);
        CHECK(std::abs(res.estimate - expected) <= 4.0 * res.std_error);
    }

    SUBCASE("invariance under a Moebius map within 3 standard errors") {
        std::mt19937_64 rng(61);
        MobiusMap m = random_mobius(rng, 2, 0.35);
        Vec c(2);
        c << 0.1, -0.2;
        double r = 0.8;  // hyperbolic radius
        Region region = Region::ball(c, r, Metric::hyperbolic);
        EuclideanBall bound = hyp_ball_as_euclidean(Point(c), r);
        auto v1 = hyp_measure(region, 2, SamplerSpec{bound.center, bound.radius * 1.01},
                              300000, 5);

        Vec mc = m.apply_vec(c);
        EuclideanBall bound2 = hyp_ball_as_euclidean(Point(mc), r);
        MobiusMap minv = m.inverse();
        auto v2 = hyp_measure(
            [&](const Vec& x) {
                if (!inside_ball(x)) return false;
                return region.contains(minv.apply_vec(x));
            },
            2, SamplerSpec{bound2.center, bound2.radius * 1.01}, 300000, 6);
        double err = std::hypot(v1.std_error, v2.std_error);
        CHECK(std::abs(v1.estimate - v2.estimate) <= 3.0 * err);
    }

    SUBCASE("sampler reaching the boundary guard is rejected") {
        SamplerSpec sampler{Vec::Zero(2), 1.0};
        CHECK_THROWS_AS(
            hyp_measure([](const Vec&) { return true; }, 2, sampler, 100, 1),
            std::invalid_argument);
    }

    SUBCASE("estimates are independent of the thread count") {
        Region ball = Region::ball(Vec::Zero(2), 0.7, Metric::hyperbolic);
        SamplerSpec sampler{Vec::Zero(2), 0.4};
        auto one = hyp_measure(ball, 2, sampler, 60000, 321, 1);
        auto three = hyp_measure(ball, 2, sampler, 60000, 321, 3);
        CHECK(one.estimate == three.estimate);
        CHECK(one.std_error == three.std_error);
    }
}

TEST_CASE("quotient measure") {
    auto g = make_cyclic_translation(2, 1.0);
    Point p0 = Point::origin(2);

    SUBCASE("empty set predicate") {
        SamplerSpec sampler{Vec::Zero(2), 0.5};
        auto res = quotient_measure(
            g, p0, [](const QuotientPoint&) { return false; }, sampler, 5000, 3);
        CHECK(res.estimate == 0.0);
    }

    SUBCASE("small quotient ball matches the lifted hyperbolic ball") {
        const double r = 0.3;  // below the local isometry radius 0.5
        QuotientPoint center(p0, g);
        EuclideanBall bound = hyp_ball_as_euclidean(p0, r);
        SamplerSpec sampler{bound.center, bound.radius * 1.01};
        auto quotient = quotient_measure(
            g, p0,
            [&](const QuotientPoint& p) {
                return quotient_dist(center, p, 8) < r;
            },
            sampler, 200000, 11);
        Region hyp_ball = Region::ball(Vec::Zero(2), r, Metric::hyperbolic);
        auto plain = hyp_measure(hyp_ball, 2, sampler, 200000, 12);
        double err = std::hypot(quotient.std_error, plain.std_error);
        CHECK(std::abs(quotient.estimate - plain.estimate) <= 3.0 * err);
    }

    SUBCASE("independence of the Dirichlet center") {
        const double r = 0.3;
        QuotientPoint center(p0, g);
        EuclideanBall bound = hyp_ball_as_euclidean(p0, r);
        auto pred = [&](const QuotientPoint& p) {
            return quotient_dist(center, p, 8) < r;
        };
        // Moving the center within its orbit cannot change the measure.
        Vec moved = g->letter(1).apply_vec(p0.v());
        // The support of the integrand shifts to the translated Dirichlet
        // cell; enlarge the sampler to cover both cells.
        SamplerSpec wide{Vec::Zero(2), 0.9};
        auto v1 = quotient_measure(g, p0, pred, wide, 400000, 21);
        auto v2 = quotient_measure(g, Point(moved), pred, wide, 400000, 22);
        double err = std::hypot(v1.std_error, v2.std_error);
        CHECK(std::abs(v1.estimate - v2.estimate) <= 3.0 * err);
    }
}

TEST_CASE("normal neighborhoods and charts") {
    SUBCASE("cyclic group at the origin") {
        auto g = make_cyclic_translation(2, 1.0);
        QuotientPoint p0(Point::origin(2), g);
        auto nn = normal_neighborhood(p0, 8);
        CHECK(nn.radius == doctest::Approx(0.45).epsilon(1e-6));

        // chart round trip on points of the neighborhood
        std::mt19937_64 rng(67);
        for (int i = 0; i < 100; ++i) {
            double re = euclidean_radius_of_hyp_ball(nn.radius * 0.99);
            Vec x = random_in_ball(rng, 2, re);
            QuotientPoint p = nn.chart.from_chart(x);
            Vec back = nn.chart.to_chart(p);
            CHECK((back - x).norm() <= 1e-9);
        }
    }

    SUBCASE("trivial group capped by the boundary guard") {
        auto g = make_trivial_group(2);
        QuotientPoint p0(Point({0.2, 0.1}), g);
        auto nn = normal_neighborhood(p0, 4);
        CHECK(std::isfinite(nn.radius));
        CHECK(nn.radius > 1.0);  // far away in hyperbolic terms
    }

    SUBCASE("chart transport off-center") {
        auto g = make_cyclic_translation(2, 1.0);
        QuotientPoint p1(Point({0.22, -0.1}), g);
        auto nn = normal_neighborhood(p1, 8);
        CHECK(nn.radius > 0.1);
        Vec x = nn.chart.to_chart(p1);
        CHECK(x.norm() <= 1e-12);  // the center maps to the chart origin
    }
}

TEST_CASE("quotient regions compose and serialize") {
    auto g = make_cyclic_translation(2, 1.0);
    QuotientPoint origin(Point::origin(2), g);

    auto ring = QuotientRegion::annulus(origin, 0.1, 0.3, 8);
    auto ball = QuotientRegion::ball(origin, 0.2, 8);
    auto ring_minus_ball = QuotientRegion::intersection(
        {ring, QuotientRegion::complement(ball)});

    auto at = [&](double s) { return QuotientPoint(Point(axis_point(s)), g); };
    CHECK(ring.contains(at(0.2)));
    CHECK_FALSE(ring.contains(at(0.05)));
    // periodicity: the quotient ball sees every orbit copy
    CHECK(ball.contains(at(1.0 + 0.05)));
    CHECK(ring_minus_ball.contains(at(0.25)));
    CHECK_FALSE(ring_minus_ball.contains(at(0.15)));

    nlohmann::json j = ring_minus_ball.to_json();
    auto parsed = QuotientRegion::from_json(j, g, 8);
    for (double s : {0.05, 0.15, 0.25, 0.35, 1.12})
        CHECK(parsed.contains(at(s)) == ring_minus_ball.contains(at(s)));

    CHECK_THROWS_AS(QuotientRegion::from_json(
                        nlohmann::json::parse(R"({"type":"blob"})"), g, 8),
                    std::invalid_argument);
}

TEST_CASE("chart transitions are group elements") {
    auto g = make_cyclic_translation(2, 1.0);
    // Two overlapping normal neighborhoods along the axis.
    QuotientPoint pa(Point(axis_point(0.0)), g);
    QuotientPoint pb(Point(axis_point(0.35)), g);
    auto na = normal_neighborhood(pa, 8);
    auto nb = normal_neighborhood(pb, 8);

    auto els = enumerate_elements(*g, 4);
    std::mt19937_64 rng(71);
    // Sample chart-b coordinates of points in the overlap and express the
    // transition phi_a o phi_b^{-1} as a map of the ball; it must agree with
    // T_a o w o T_b^{-1} for some group word w.
    std::vector<Vec> xs, ys;
    for (int i = 0; i < 40; ++i) {
        Vec x = random_in_ball(rng, 2, euclidean_radius_of_hyp_ball(0.12));
        QuotientPoint p = nb.chart.from_chart(x);
        if (quotient_dist(p, pa, 8) >= na.radius) continue;
        xs.push_back(x);
        ys.push_back(na.chart.to_chart(p));
    }
    REQUIRE(xs.size() >= 10);
    bool some_word_matches = false;
    for (const auto& el : els) {
        MobiusMap candidate = compose(
            na.chart.to_origin(), compose(el.map, nb.chart.from_origin()));
        double dev = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            dev = std::max(dev, (candidate.apply_vec(xs[i]) - ys[i]).norm());
        if (dev < 1e-6) {
            some_word_matches = true;
            break;
        }
    }
    CHECK(some_word_matches);
}
