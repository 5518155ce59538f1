#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "factorball/group.hpp"
#include "test_helpers.hpp"

using namespace factorball;
using namespace factorball::testing;

TEST_CASE("cyclic translation geometry") {
    const double ell = 1.0;
    auto g = make_cyclic_translation(2, ell);
    const MobiusMap& gen = g->generators()[0];

    // Generator sends 0 to the axis point at hyperbolic distance ell.
    Vec img = gen.apply_vec(Vec::Zero(2));
    CHECK((img - axis_point(ell)).norm() <= 1e-12);

    // Translation lengths add along the axis.
    Vec zero = Vec::Zero(2);
    Vec x = zero;
    for (int k = 1; k <= 10; ++k) {
        x = gen.apply_vec(x);
        CHECK(hyp_dist(zero, x) == doctest::Approx(k * ell).epsilon(1e-9));
    }
    Vec y = zero;
    const MobiusMap inv = gen.inverse();
    for (int k = 1; k <= 10; ++k) {
        y = inv.apply_vec(y);
        CHECK(hyp_dist(zero, y) == doctest::Approx(k * ell).epsilon(1e-9));
    }

    // No fixed point on a grid of the ball.
    for (double u = -0.9; u <= 0.9; u += 0.15)
        for (double v = -0.9; v <= 0.9; v += 0.15) {
            Vec p(2);
            p << u, v;
            if (p.norm() >= 0.95) continue;
            CHECK(hyp_dist(p, gen.apply_vec(p)) > 1e-6);
        }
}

TEST_CASE("enumerate_elements counts freely reduced words") {
    SUBCASE("word length zero") {
        auto g = make_cyclic_translation(2, 1.0);
        auto els = enumerate_elements(*g, 0);
        REQUIRE(els.size() == 1);
        CHECK(els[0].word.empty());
    }

    SUBCASE("cyclic group, length 3") {
        auto g = make_cyclic_translation(2, 1.0);
        auto els = enumerate_elements(*g, 3);
        CHECK(els.size() == 7);  // I, g^{+-1}, g^{+-2}, g^{+-3}
    }

    SUBCASE("rank-2 Schottky, length 2") {
        auto g = schottky_two_pairs();
        auto els = enumerate_elements(*g, 2);
        CHECK(els.size() == 17);  // 1 + 4 + 12 freely reduced words
    }

    SUBCASE("finite-order rotation is deduplicated") {
        double theta = 2.0 * M_PI / 5.0;
        Mat q(2, 2);
        q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        auto rot = std::make_shared<GroupPresentation>(
            2, std::vector<MobiusMap>{MobiusMap::from_primitives(2, {Orthogonal{q}})},
            "rot5");
        auto els = enumerate_elements(*rot, 6);
        CHECK(els.size() == 5);
    }

    SUBCASE("budget cap raises") {
        auto g = schottky_two_pairs();
        CHECK_THROWS_AS(enumerate_elements(*g, 6, 100), BudgetExceeded);
    }
}

TEST_CASE("dedup soundness on probe actions") {
    auto g = schottky_two_pairs();
    auto els = enumerate_elements(*g, 3);
    // Any two kept elements differ on at least one probe by more than 1e-6.
    for (std::size_t i = 0; i < els.size(); ++i)
        for (std::size_t j = i + 1; j < els.size(); ++j) {
            double dev = 0.0;
            for (const auto& z : g->probes())
                dev = std::max(dev, (els[i].map.apply_vec(z) -
                                     els[j].map.apply_vec(z))
                                        .norm());
            CHECK(dev > 1e-6);
        }
}

TEST_CASE("orbit_in_ball") {
    SUBCASE("radius zero returns the seed only") {
        auto g = make_cyclic_translation(2, 1.0);
        Point seed({0.17, 0.05});
        auto res = orbit_in_ball(*g, seed, seed, 0.0, 6);
        REQUIRE(res.points.size() == 1);
        CHECK(res.points[0].word.empty());
        CHECK_FALSE(res.budget_incomplete);
    }

    SUBCASE("cyclic length-1 translation, radius 2.2 around the origin") {
        auto g = make_cyclic_translation(2, 1.0);
        Point origin = Point::origin(2);
        auto res = orbit_in_ball(*g, origin, origin, 2.2, 10);
        REQUIRE(res.points.size() == 5);
        std::vector<double> expected{0.0, 1.0, 1.0, 2.0, 2.0};
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(res.points[i].displacement ==
                  doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK_FALSE(res.budget_incomplete);
    }

    SUBCASE("orbit points recompute from their words") {
        auto g = schottky_two_pairs();
        Point seed({0.3, -0.2});
        Point center = Point::origin(2);
        auto res = orbit_in_ball(*g, seed, center, 6.0, 4);
        CHECK(res.points.size() > 1);
        for (const auto& op : res.points)
            CHECK((g->apply_word(op.word, seed.v()) - op.point).norm() <= 1e-9);
    }

    SUBCASE("schottky orbit points are separated by the systole") {
        auto g = schottky_two_pairs();
        Point seed({0.1, 0.1});
        Point center = Point::origin(2);
        auto res = orbit_in_ball(*g, seed, center, 8.0, 3);
        // Brute-force systole bound over short words at the seed.
        double systole = 1e30;
        auto els = enumerate_elements(*g, 3);
        for (const auto& el : els) {
            if (el.word.empty()) continue;
            systole = std::min(systole, hyp_dist(seed.v(), el.map.apply_vec(seed.v())));
        }
        CHECK(systole > 0.0);
        for (std::size_t i = 0; i < res.points.size(); ++i)
            for (std::size_t j = i + 1; j < res.points.size(); ++j)
                CHECK(hyp_dist(res.points[i].point, res.points[j].point) >=
                      systole - 1e-9);
    }
}

TEST_CASE("check_discreteness") {
    SUBCASE("cyclic translation passes with displacement = length") {
        auto g = make_cyclic_translation(2, 1.0);
        auto rep = check_discreteness(*g, 4, 32);
        CHECK(rep.pass);
        CHECK(rep.min_displacement == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_FALSE(rep.fixed_point_found);
    }

    SUBCASE("rotation generator fails with a fixed point at 0") {
        double theta = 0.7;
        Mat q(2, 2);
        q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        std::vector<MobiusMap> gens;
        gens.push_back(make_cyclic_translation(2, 1.0)->generators()[0]);
        gens.push_back(MobiusMap::from_primitives(2, {Orthogonal{q}}));
        auto g = std::make_shared<GroupPresentation>(2, gens, "bad");
        auto rep = check_discreteness(*g, 2, 32);
        CHECK_FALSE(rep.pass);
        CHECK(rep.fixed_point_found);
    }

    SUBCASE("schottky two-pair example passes with positive systole") {
        auto g = schottky_two_pairs();
        auto rep = check_discreteness(*g, 3, 16);
        CHECK(rep.pass);
        CHECK(rep.min_displacement > 0.5);
    }
}

TEST_CASE("schottky validation rejects overlapping disks") {
    Vec a(2), b(2);
    a << -1.05, 0.0;
    b << 1.05, 0.0;  // radii ~0.32, disks disjoint
    CHECK_NOTHROW(make_schottky_2d({CirclePair{a, b}}));
    Vec c(2), d(2);
    c << -1.02, 0.0;
    d << 1.25, 0.0;
    // second pair overlapping the first along the axis
    Vec e(2), f(2);
    e << -1.03, 0.05;
    f << 1.2, 0.1;
    CHECK_THROWS_AS(make_schottky_2d({CirclePair{c, d}, CirclePair{e, f}}),
                    std::invalid_argument);
    Vec inside(2);
    inside << 0.5, 0.0;
    CHECK_THROWS_AS(make_schottky_2d({CirclePair{inside, b}}),
                    std::invalid_argument);
}

TEST_CASE("group JSON round trip and shorthands") {
    auto g = schottky_two_pairs();
    nlohmann::json j = group_to_json(*g);
    auto g2 = group_from_json(j);
    REQUIRE(g2->rank() == g->rank());
    std::mt19937_64 rng(23);
    for (int i = 0; i < 20; ++i) {
        Vec x = random_in_ball(rng, 2, 0.8);
        for (int k = 1; k <= g->rank(); ++k)
            CHECK((g->letter(k).apply_vec(x) - g2->letter(k).apply_vec(x)).norm() <=
                  1e-12);
    }

    auto cyc = group_from_json(nlohmann::json::parse(
        R"({"cyclic": {"dimension": 2, "length": 0.75}})"));
    CHECK(cyc->rank() == 1);
    CHECK((cyc->generators()[0].apply_vec(Vec::Zero(2)) - axis_point(0.75)).norm() <=
          1e-12);

    CHECK_THROWS_AS(
        group_from_json(nlohmann::json::parse(R"({"cyclic": {"len": 1}})")),
        std::invalid_argument);
}

TEST_CASE("generator validation") {
    // Identity generator is rejected.
    CHECK_THROWS_AS(std::make_shared<GroupPresentation>(
                        2, std::vector<MobiusMap>{MobiusMap::identity(2)}, "id"),
                    std::invalid_argument);
}
