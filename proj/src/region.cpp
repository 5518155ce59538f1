#include "factorball/region.hpp"

#include "factorball/json_util.hpp"
#include "factorball/mobius.hpp"

namespace factorball {

struct Region::Node {
    enum class Kind { ball, annulus, halfspace, complement, intersection, all };
    Kind kind = Kind::all;
    Metric metric = Metric::euclidean;
    Vec center;
    double r1 = 0.0, r2 = 0.0;
    Vec normal;
    double offset = 0.0;
    std::vector<Region> children;
};

namespace {
double dist_in(Metric m, const Vec& c, const Vec& x) {
    return m == Metric::euclidean ? (x - c).norm() : hyp_dist(c, x);
}
}  // namespace

Region Region::ball(Vec center, double radius, Metric m) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ball;
    n->metric = m;
    n->center = std::move(center);
    n->r2 = radius;
    Region r;
    r.root_ = n;
    return r;
}

Region Region::annulus(Vec center, double r1, double r2, Metric m) {
    if (!(0.0 <= r1 && r1 < r2))
        throw std::invalid_argument("Region::annulus: need 0 <= r1 < r2");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::annulus;
    n->metric = m;
    n->center = std::move(center);
    n->r1 = r1;
    n->r2 = r2;
    Region r;
    r.root_ = n;
    return r;
}

Region Region::halfspace(Vec normal, double offset) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::halfspace;
    n->normal = std::move(normal);
    n->offset = offset;
    Region r;
    r.root_ = n;
    return r;
}

Region Region::complement(Region inner) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::complement;
    n->children.push_back(std::move(inner));
    Region r;
    r.root_ = n;
    return r;
}

Region Region::intersection(std::vector<Region> parts) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::intersection;
    n->children = std::move(parts);
    Region r;
    r.root_ = n;
    return r;
}

Region Region::everything() {
    Region r;
    r.root_ = std::make_shared<Node>();
    return r;
}

bool Region::contains(const Vec& x) const {
    const Node& n = *root_;
    switch (n.kind) {
        case Node::Kind::all:
            return true;
        case Node::Kind::ball:
            return dist_in(n.metric, n.center, x) < n.r2;
        case Node::Kind::annulus: {
            double d = dist_in(n.metric, n.center, x);
            return n.r1 < d && d < n.r2;
        }
        case Node::Kind::halfspace:
            return x.dot(n.normal) >= n.offset;
        case Node::Kind::complement:
            return !n.children[0].contains(x);
        case Node::Kind::intersection:
            for (const auto& c : n.children)
                if (!c.contains(x)) return false;
            return true;
    }
    return false;
}

Region Region::from_json(const json& spec) {
    require_keys_subset(spec, "region",
                        {"type", "center", "radius", "r1", "r2", "metric",
                         "normal", "offset", "of"});
    const std::string type = require_field(spec, "region", "type").get<std::string>();
    Metric m = Metric::euclidean;
    if (spec.contains("metric")) {
        const std::string ms = spec["metric"].get<std::string>();
        if (ms == "hyperbolic") m = Metric::hyperbolic;
        else if (ms != "euclidean")
            throw std::invalid_argument("region: unknown metric '" + ms + "'");
    }
    if (type == "ball")
        return ball(vec_from_json(require_field(spec, "region", "center"), "center"),
                    require_field(spec, "region", "radius").get<double>(), m);
    if (type == "annulus")
        return annulus(vec_from_json(require_field(spec, "region", "center"), "center"),
                       require_field(spec, "region", "r1").get<double>(),
                       require_field(spec, "region", "r2").get<double>(), m);
    if (type == "halfspace")
        return halfspace(vec_from_json(require_field(spec, "region", "normal"), "normal"),
                         require_field(spec, "region", "offset").get<double>());
    if (type == "complement")
        return complement(from_json(require_field(spec, "region", "of")));
    if (type == "intersection") {
        std::vector<Region> parts;
        for (const auto& c : require_field(spec, "region", "of"))
            parts.push_back(from_json(c));
        return intersection(std::move(parts));
    }
    if (type == "all") return everything();
    throw std::invalid_argument("region: unknown type '" + type + "'");
}

json Region::to_json() const {
    const Node& n = *root_;
    json out;
    switch (n.kind) {
        case Node::Kind::all:
            out["type"] = "all";
            break;
        case Node::Kind::ball:
            out["type"] = "ball";
            out["center"] = vec_to_json(n.center);
            out["radius"] = n.r2;
            out["metric"] = n.metric == Metric::euclidean ? "euclidean" : "hyperbolic";
            break;
        case Node::Kind::annulus:
            out["type"] = "annulus";
            out["center"] = vec_to_json(n.center);
            out["r1"] = n.r1;
            out["r2"] = n.r2;
            out["metric"] = n.metric == Metric::euclidean ? "euclidean" : "hyperbolic";
            break;
        case Node::Kind::halfspace:
            out["type"] = "halfspace";
            out["normal"] = vec_to_json(n.normal);
            out["offset"] = n.offset;
            break;
        case Node::Kind::complement:
            out["type"] = "complement";
            out["of"] = n.children[0].to_json();
            break;
        case Node::Kind::intersection: {
            out["type"] = "intersection";
            json parts = json::array();
            for (const auto& c : n.children) parts.push_back(c.to_json());
            out["of"] = parts;
            break;
        }
    }
    return out;
}

}  // namespace factorball
