#include "factorball/quotient.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "factorball/json_util.hpp"

namespace factorball {

namespace {

void require_same_group(const QuotientPoint& p1, const QuotientPoint& p2) {
    if (p1.group.get() != p2.group.get())
        throw std::invalid_argument(
            "quotient points do not reference the same group");
}

}  // namespace

QuotientDist quotient_dist_detail(const QuotientPoint& p1,
                                  const QuotientPoint& p2, int max_word_len) {
    require_same_group(p1, p2);
    MinOrbitDist m =
        min_orbit_dist(*p1.group, p1.rep.v(), p2.rep.v(), max_word_len);
    QuotientDist d;
    d.value = m.value;
    d.budget_incomplete = m.budget_incomplete;
    d.word = std::move(m.word);
    d.lift = std::move(m.point);
    return d;
}

double quotient_dist(const QuotientPoint& p1, const QuotientPoint& p2,
                     int max_word_len) {
    return quotient_dist_detail(p1, p2, max_word_len).value;
}

double projected_pseudo_dist(const Point& z1, const Point& z2,
                             const GroupHandle& g, int max_word_len) {
    return quotient_dist(project(z1, g), project(z2, g), max_word_len);
}

bool quotient_equal(const QuotientPoint& p1, const QuotientPoint& p2,
                    int max_word_len, double tol) {
    return quotient_dist(p1, p2, max_word_len) < tol;
}

double min_nontrivial_displacement(const GroupPresentation& g, const Vec& z,
                                   int max_word_len) {
    if (g.is_trivial()) return std::numeric_limits<double>::infinity();
    return min_orbit_dist(g, z, z, max_word_len, /*exclude_trivial=*/true).value;
}

double local_isometry_radius(const GroupPresentation& g,
                             const std::vector<Point>& compact_sample,
                             int max_word_len) {
    if (compact_sample.empty())
        throw std::invalid_argument("local_isometry_radius: empty sample");
    double min_disp = std::numeric_limits<double>::infinity();
    for (const auto& z : compact_sample)
        min_disp = std::min(
            min_disp, min_nontrivial_displacement(g, z.v(), max_word_len));
    return 0.5 * min_disp;
}

// ---------------------------------------------------------------------------
// Dirichlet polyhedron
// ---------------------------------------------------------------------------

DirichletClass classify_dirichlet(const GroupPresentation& g, const Point& p0,
                                  const Point& p, int max_word_len,
                                  double tie_margin) {
    DirichletClass out;
    if (g.is_trivial()) return out;  // vacuously interior
    double own = hyp_dist(p.v(), p0.v());
    // Nearest nontrivial orbit point of p0 to p.
    MinOrbitDist m =
        min_orbit_dist(g, p0.v(), p.v(), max_word_len, /*exclude_trivial=*/true);
    out.budget_incomplete = m.budget_incomplete;
    if (m.value > own + tie_margin)
        out.position = DirichletPosition::interior;
    else if (m.value < own - tie_margin)
        out.position = DirichletPosition::exterior;
    else
        out.position = DirichletPosition::boundary;
    return out;
}

bool in_dirichlet_domain(const GroupPresentation& g, const Point& p0,
                         const Point& p, int max_word_len) {
    if (g.is_trivial()) return true;
    double own = hyp_dist(p.v(), p0.v());
    MinOrbitDist m =
        min_orbit_dist(g, p0.v(), p.v(), max_word_len, /*exclude_trivial=*/true);
    return own < m.value;  // strict, per the open condition
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

McResult hyp_measure(const std::function<bool(const Vec&)>& region, int n,
                     const SamplerSpec& sampler, std::uint64_t samples,
                     std::uint64_t seed, int threads) {
    if (sampler.center.size() != n)
        throw std::invalid_argument("hyp_measure: sampler dimension mismatch");
    if (sampler.center.norm() + sampler.radius > 1.0 - 1e-6)
        throw std::invalid_argument(
            "hyp_measure: sampler ball reaches the boundary guard");
    const double exponent = static_cast<double>(n);
    const double scale = std::pow(2.0, exponent);
    return mc_integrate(
        sampler,
        [&](const Vec& x) {
            if (!region(x)) return 0.0;
            return scale / std::pow(1.0 - x.squaredNorm(), exponent);
        },
        samples, seed, threads);
}

McResult hyp_measure(const Region& region, int n, const SamplerSpec& sampler,
                     std::uint64_t samples, std::uint64_t seed, int threads) {
    return hyp_measure([&](const Vec& x) { return region.contains(x); }, n,
                       sampler, samples, seed, threads);
}

McResult quotient_measure(const GroupHandle& g, const Point& dirichlet_center,
                          const std::function<bool(const QuotientPoint&)>& set_pred,
                          const SamplerSpec& sampler, std::uint64_t samples,
                          std::uint64_t seed, int max_word_len, int threads) {
    const int n = g->dimension();
    return hyp_measure(
        [&](const Vec& x) {
            if (!inside_ball(x)) return false;
            Point p(x);
            if (!in_dirichlet_domain(*g, dirichlet_center, p, max_word_len))
                return false;
            return set_pred(project(p, g));
        },
        n, sampler, samples, seed, threads);
}

// ---------------------------------------------------------------------------
// Quotient set predicates
// ---------------------------------------------------------------------------

struct QuotientRegion::Node {
    enum class Kind { ball, annulus, complement, intersection, all };
    Kind kind = Kind::all;
    std::optional<QuotientPoint> center;
    double r1 = 0.0, r2 = 0.0;
    int word_budget = kDefaultWordBudget;
    std::vector<QuotientRegion> children;
};

QuotientRegion QuotientRegion::ball(QuotientPoint center, double radius,
                                    int word_budget) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ball;
    n->center = std::move(center);
    n->r2 = radius;
    n->word_budget = word_budget;
    QuotientRegion r;
    r.root_ = n;
    return r;
}

QuotientRegion QuotientRegion::annulus(QuotientPoint center, double r1,
                                       double r2, int word_budget) {
    if (!(0.0 <= r1 && r1 < r2))
        throw std::invalid_argument("QuotientRegion::annulus: need 0 <= r1 < r2");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::annulus;
    n->center = std::move(center);
    n->r1 = r1;
    n->r2 = r2;
    n->word_budget = word_budget;
    QuotientRegion r;
    r.root_ = n;
    return r;
}

QuotientRegion QuotientRegion::complement(QuotientRegion inner) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::complement;
    n->children.push_back(std::move(inner));
    QuotientRegion r;
    r.root_ = n;
    return r;
}

QuotientRegion QuotientRegion::intersection(std::vector<QuotientRegion> parts) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::intersection;
    n->children = std::move(parts);
    QuotientRegion r;
    r.root_ = n;
    return r;
}

QuotientRegion QuotientRegion::everything() {
    QuotientRegion r;
    r.root_ = std::make_shared<Node>();
    return r;
}

bool QuotientRegion::contains(const QuotientPoint& p) const {
    const Node& n = *root_;
    switch (n.kind) {
        case Node::Kind::all:
            return true;
        case Node::Kind::ball:
            return quotient_dist(*n.center, p, n.word_budget) < n.r2;
        case Node::Kind::annulus: {
            double d = quotient_dist(*n.center, p, n.word_budget);
            return n.r1 < d && d < n.r2;
        }
        case Node::Kind::complement:
            return !n.children[0].contains(p);
        case Node::Kind::intersection:
            for (const auto& c : n.children)
                if (!c.contains(p)) return false;
            return true;
    }
    return false;
}

QuotientRegion QuotientRegion::from_json(const nlohmann::json& spec,
                                         const GroupHandle& group,
                                         int word_budget) {
    require_keys_subset(spec, "quotient region",
                        {"type", "center", "radius", "r1", "r2", "of"});
    const std::string type =
        require_field(spec, "quotient region", "type").get<std::string>();
    if (type == "ball") {
        Point c(vec_from_json(require_field(spec, "quotient region", "center"),
                              "center"));
        return ball(QuotientPoint(c, group),
                    require_field(spec, "quotient region", "radius").get<double>(),
                    word_budget);
    }
    if (type == "annulus") {
        Point c(vec_from_json(require_field(spec, "quotient region", "center"),
                              "center"));
        return annulus(QuotientPoint(c, group),
                       require_field(spec, "quotient region", "r1").get<double>(),
                       require_field(spec, "quotient region", "r2").get<double>(),
                       word_budget);
    }
    if (type == "complement")
        return complement(from_json(require_field(spec, "quotient region", "of"),
                                    group, word_budget));
    if (type == "intersection") {
        std::vector<QuotientRegion> parts;
        for (const auto& c : require_field(spec, "quotient region", "of"))
            parts.push_back(from_json(c, group, word_budget));
        return intersection(std::move(parts));
    }
    if (type == "all") return everything();
    throw std::invalid_argument("quotient region: unknown type '" + type + "'");
}

nlohmann::json QuotientRegion::to_json() const {
    const Node& n = *root_;
    nlohmann::json out;
    switch (n.kind) {
        case Node::Kind::all:
            out["type"] = "all";
            break;
        case Node::Kind::ball:
            out["type"] = "ball";
            out["center"] = vec_to_json(n.center->rep.v());
            out["radius"] = n.r2;
            break;
        case Node::Kind::annulus:
            out["type"] = "annulus";
            out["center"] = vec_to_json(n.center->rep.v());
            out["r1"] = n.r1;
            out["r2"] = n.r2;
            break;
        case Node::Kind::complement:
            out["type"] = "complement";
            out["of"] = n.children[0].to_json();
            break;
        case Node::Kind::intersection: {
            out["type"] = "intersection";
            nlohmann::json parts = nlohmann::json::array();
            for (const auto& c : n.children) parts.push_back(c.to_json());
            out["of"] = parts;
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

Chart::Chart(QuotientPoint center, double radius, int word_budget)
    : center_(std::move(center)),
      radius_(radius),
      word_budget_(word_budget),
      to_origin_(MobiusMap::translation_to_origin(center_.rep)),
      from_origin_(to_origin_.inverse()) {
    if (radius_ <= 0.0)
        throw std::invalid_argument("Chart: radius must be positive");
}

Vec Chart::lift(const QuotientPoint& p) const {
    require_same_group(p, center_);
    MinOrbitDist m =
        min_orbit_dist(*p.group, p.rep.v(), center_.rep.v(), word_budget_);
    if (m.value >= radius_)
        throw std::domain_error("Chart::lift: point outside the chart");
    return m.point;
}

Vec Chart::to_chart(const QuotientPoint& p) const {
    return to_origin_.apply_vec(lift(p));
}

QuotientPoint Chart::from_chart(const Vec& x) const {
    if (hyp_dist(Vec::Zero(x.size()), x) >= radius_)
        throw std::domain_error("Chart::from_chart: coordinate outside the chart");
    return QuotientPoint(Point(from_origin_.apply_vec(x)), center_.group);
}

NormalNeighborhood normal_neighborhood(const QuotientPoint& p0,
                                       int max_word_len) {
    const GroupPresentation& g = *p0.group;
    const int n = g.dimension();
    const Vec& z0 = p0.rep.v();

    // Small compact around the representative.
    std::vector<Point> sample;
    sample.emplace_back(p0.rep);
    const double step = 0.01 * (1.0 - p0.rep.norm());
    for (int i = 0; i < n; ++i)
        for (double s : {-step, step}) {
            Vec z = z0;
            z(i) += s;
            if (inside_ball(z)) sample.emplace_back(Point(z));
        }

    double delta = local_isometry_radius(g, sample, max_word_len);
    // Keep the chart strictly inside the boundary guard of the ball.
    double to_guard =
        hyp_radius_of_euclidean_ball(1.0 - 1e-6) - hyp_dist(Vec::Zero(n), z0);
    double radius = std::min(0.9 * delta, to_guard);
    return NormalNeighborhood{p0, radius, Chart(p0, radius, max_word_len)};
}

}  // namespace factorball
