#include "factorball/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "factorball/json_util.hpp"

namespace factorball {

namespace {

// Fixed probe set, reproducible across runs and platforms.
std::vector<Vec> make_probes(int n, int count, double radius) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec> probes;
    probes.push_back(Vec::Zero(n));
    while (static_cast<int>(probes.size()) < count) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = u(rng);
        if (v.norm() <= 1.0) probes.push_back(radius * v);
    }
    return probes;
}

// Letter ordering +1, -1, +2, -2, ... used for deterministic traversal.
std::vector<int> letter_order(int rank) {
    std::vector<int> letters;
    letters.reserve(2 * static_cast<std::size_t>(rank));
    for (int k = 1; k <= rank; ++k) {
        letters.push_back(k);
        letters.push_back(-k);
    }
    return letters;
}

}  // namespace

std::string word_to_string(const Word& w) {
    if (w.empty()) return "I";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        int k = w[i];
        s += (k > 0 ? "g" : "G") + std::to_string(std::abs(k));
    }
    return s;
}

GroupPresentation::GroupPresentation(int dimension,
                                     std::vector<MobiusMap> generators,
                                     std::string label)
    : dim_(dimension), label_(std::move(label)), gens_(std::move(generators)) {
    if (dim_ < 2)
        throw std::invalid_argument("GroupPresentation: dimension must be >= 2");
    probes_ = make_probes(dim_, 8, 0.55);

    std::vector<Vec> sample = make_probes(dim_, 100, 0.9);
    for (const auto& g : gens_) {
        if (g.dim() != dim_)
            throw std::invalid_argument("GroupPresentation: generator dimension mismatch");
        double max_disp = 0.0;
        for (const auto& z : sample) {
            Vec image = g.apply_vec(z);
            if (!inside_ball(image))
                throw std::invalid_argument(
                    "GroupPresentation: generator does not preserve the ball");
            max_disp = std::max(max_disp, (image - z).norm());
        }
        if (max_disp <= kDefaultTol)
            throw std::invalid_argument(
                "GroupPresentation: generator acts as the identity");
        inv_gens_.push_back(g.inverse());
    }
}

const MobiusMap& GroupPresentation::letter(int signed_index) const {
    int k = std::abs(signed_index);
    if (k < 1 || k > rank())
        throw std::out_of_range("GroupPresentation::letter: bad index");
    return signed_index > 0 ? gens_[k - 1] : inv_gens_[k - 1];
}

Vec GroupPresentation::apply_word(const Word& w, Vec x) const {
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        x = letter(*it).apply_vec(x);
    return x;
}

MobiusMap GroupPresentation::word_map(const Word& w) const {
    MobiusMap m = MobiusMap::identity(dim_);
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        m = compose(letter(*it), m);
    return m;
}

// ---------------------------------------------------------------------------
// Canonical families
// ---------------------------------------------------------------------------

GroupHandle make_cyclic_translation(int n, double ell) {
    if (ell <= 0.0)
        throw std::invalid_argument("make_cyclic_translation: length must be > 0");
    Vec a = Vec::Zero(n);
    a(0) = std::tanh(ell / 2.0);
    // T_a translates by -ell along the axis; its inverse maps 0 to a.
    MobiusMap gen = MobiusMap::translation_to_origin(Point(a)).inverse();
    return std::make_shared<GroupPresentation>(
        n, std::vector<MobiusMap>{gen}, "cyclic(" + std::to_string(ell) + ")");
}

GroupHandle make_trivial_group(int n) {
    return std::make_shared<GroupPresentation>(n, std::vector<MobiusMap>{},
                                               "trivial");
}

GroupHandle make_schottky_2d(const std::vector<CirclePair>& pairs) {
    const int n = 2;
    // Collect all circles; radius from orthogonality to the unit circle.
    struct Circle { Vec c; double r; };
    std::vector<Circle> circles;
    for (const auto& p : pairs) {
        for (const Vec* c : {&p.c1, &p.c2}) {
            if (c->size() != n)
                throw std::invalid_argument("make_schottky_2d: centers must be 2-d");
            double cn = c->norm();
            if (cn <= 1.0 + 1e-6)
                throw std::invalid_argument(
                    "make_schottky_2d: circle center must lie outside the closed unit disk");
            circles.push_back({*c, std::sqrt(cn * cn - 1.0)});
        }
    }
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j)
            if ((circles[i].c - circles[j].c).norm() <=
                circles[i].r + circles[j].r + 1e-9)
                throw std::invalid_argument(
                    "make_schottky_2d: defining disks overlap");

    std::vector<MobiusMap> gens;
    for (const auto& p : pairs) {
        double r1sq = p.c1.squaredNorm() - 1.0;
        double r2sq = p.c2.squaredNorm() - 1.0;
        // Hyperbolic reflection in circle 1, then in circle 2: a hyperbolic
        // translation along their common perpendicular.
        gens.push_back(MobiusMap::from_primitives(
            n, {SphereInversion{p.c1, r1sq}, SphereInversion{p.c2, r2sq}}));
    }
    return std::make_shared<GroupPresentation>(
        n, std::move(gens), "schottky2d(" + std::to_string(pairs.size()) + ")");
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::vector<GroupElement> enumerate_elements(const GroupPresentation& g,
                                             int max_word_len,
                                             std::size_t cap) {
    if (max_word_len < 0)
        throw std::invalid_argument("enumerate_elements: negative word length");

    const auto& probes = g.probes();
    auto action_of = [&](const Word& w) {
        std::vector<Vec> images;
        images.reserve(probes.size());
        for (const auto& z : probes) images.push_back(g.apply_word(w, z));
        return images;
    };
    auto same_action = [&](const std::vector<Vec>& a, const std::vector<Vec>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if ((a[i] - b[i]).norm() > kDefaultTol) return false;
        return true;
    };

    std::vector<GroupElement> out;
    std::vector<std::vector<Vec>> actions;
    auto keep_if_new = [&](const Word& w) {
        auto act = action_of(w);
        for (const auto& known : actions)
            if (same_action(act, known)) return false;
        if (out.size() >= cap)
            throw BudgetExceeded("enumerate_elements: element cap " +
                                 std::to_string(cap) + " exceeded");
        out.push_back({w, g.word_map(w)});
        actions.push_back(std::move(act));
        return true;
    };

    keep_if_new({});
    const auto letters = letter_order(g.rank());
    // Frontier holds words whose element is new; children are reduced words.
    std::vector<Word> frontier = {{}};
    for (int len = 1; len <= max_word_len && !frontier.empty(); ++len) {
        std::vector<Word> next;
        for (const auto& w : frontier) {
            for (int letter : letters) {
                if (!w.empty() && w.back() == -letter) continue;  // free reduction
                Word child = w;
                child.push_back(letter);
                if (keep_if_new(child)) next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbit search (branch and bound over the reduced-word tree)
// ---------------------------------------------------------------------------

namespace {

// Words grow on the left (child = letter . word), so a child's orbit point is
// letter(parent point): one primitive-chain application per node. Soundness
// of the pruning bound: for any word v of length k,
//   h(v . w (seed), center) >= h(w(seed), center) - h(v(center), center)
//                           >= h(w(seed), center) - k * delta(center),
// where delta(center) = max over alphabet letters of h(center, g(center)),
// since h(center, g1 g2 (center)) <= h(center, g1 center) + h(g1 center,
// g1 g2 center) = h(center, g1 center) + h(center, g2 center) by isometry.
double letter_displacement_bound(const GroupPresentation& g, const Vec& at) {
    double d = 0.0;
    for (int k = 1; k <= g.rank(); ++k) {
        d = std::max(d, hyp_dist(at, g.letter(k).apply_vec(at)));
        d = std::max(d, hyp_dist(at, g.letter(-k).apply_vec(at)));
    }
    return d;
}

struct SearchNode {
    Word word;  // leftmost letter first; word[0] was applied last
    Vec point;
    double center_dist;
};

}  // namespace

OrbitResult orbit_in_ball(const GroupPresentation& g, const Point& seed,
                          const Point& center, double radius, int max_word_len,
                          std::size_t cap) {
    if (radius < 0.0)
        throw std::invalid_argument("orbit_in_ball: negative radius");
    if (max_word_len < 0)
        throw std::invalid_argument("orbit_in_ball: negative word length");

    OrbitResult res;
    const double delta =
        g.is_trivial() ? 0.0 : letter_displacement_bound(g, center.v());
    const auto letters = letter_order(g.rank());

    auto record = [&](const Word& w, const Vec& pt, double cdist) {
        // Distinct words can hit the same point only through relations; keep
        // the list free of coordinate duplicates.
        for (const auto& op : res.points)
            if ((op.point - pt).norm() <= kDefaultTol) return;
        if (res.points.size() >= cap)
            throw BudgetExceeded("orbit_in_ball: element cap exceeded");
        res.points.push_back({w, pt, hyp_dist(pt, seed.v()), cdist});
    };

    std::deque<SearchNode> queue;
    double d0 = hyp_dist(seed.v(), center.v());
    if (d0 <= radius) record({}, seed.v(), d0);
    queue.push_back({{}, seed.v(), d0});

    while (!queue.empty()) {
        SearchNode node = std::move(queue.front());
        queue.pop_front();
        ++res.nodes_expanded;
        int depth = static_cast<int>(node.word.size());
        if (depth >= max_word_len) {
            if (node.center_dist <= radius + delta) res.budget_incomplete = true;
            continue;
        }
        int remaining = max_word_len - depth;
        if (node.center_dist - static_cast<double>(remaining) * delta > radius)
            continue;  // no descendant can reach the ball within budget
        for (int letter : letters) {
            if (!node.word.empty() && node.word.front() == -letter) continue;
            Word child_word;
            child_word.reserve(node.word.size() + 1);
            child_word.push_back(letter);
            child_word.insert(child_word.end(), node.word.begin(), node.word.end());
            Vec pt = g.letter(letter).apply_vec(node.point);
            double cdist = hyp_dist(pt, center.v());
            if (cdist <= radius) record(child_word, pt, cdist);
            queue.push_back({std::move(child_word), std::move(pt), cdist});
        }
    }

    std::stable_sort(res.points.begin(), res.points.end(),
                     [](const OrbitPoint& a, const OrbitPoint& b) {
                         return a.center_dist < b.center_dist;
                     });
    return res;
}

MinOrbitDist min_orbit_dist(const GroupPresentation& g, const Vec& z1,
                            const Vec& z2, int max_word_len,
                            bool exclude_trivial) {
    MinOrbitDist best;
    if (exclude_trivial) {
        best.value = std::numeric_limits<double>::infinity();
    } else {
        best.value = hyp_dist(z1, z2);
        best.word = {};
        best.point = z1;
    }
    if (g.is_trivial() || max_word_len == 0) return best;

    const double delta = letter_displacement_bound(g, z2);
    const auto letters = letter_order(g.rank());

    std::vector<SearchNode> stack;
    stack.push_back({{}, z1, hyp_dist(z1, z2)});

    while (!stack.empty()) {
        SearchNode f = std::move(stack.back());
        stack.pop_back();
        ++best.nodes_expanded;
        int depth = static_cast<int>(f.word.size());
        if (depth >= max_word_len) {
            if (f.center_dist <= best.value + delta) best.budget_incomplete = true;
            continue;
        }
        int remaining = max_word_len - depth;
        if (f.center_dist - static_cast<double>(remaining) * delta > best.value)
            continue;

        // Expand children nearest-last so the incumbent improves fast (DFS
        // pops the closest child first).
        std::vector<SearchNode> children;
        children.reserve(letters.size());
        for (int letter : letters) {
            if (!f.word.empty() && f.word.front() == -letter) continue;
            Word w;
            w.reserve(f.word.size() + 1);
            w.push_back(letter);
            w.insert(w.end(), f.word.begin(), f.word.end());
            Vec pt = g.letter(letter).apply_vec(f.point);
            double d = hyp_dist(pt, z2);
            if (d < best.value) {
                best.value = d;
                best.word = w;
                best.point = pt;
            }
            children.push_back({std::move(w), std::move(pt), d});
        }
        std::sort(children.begin(), children.end(),
                  [](const SearchNode& a, const SearchNode& b) {
                      return a.center_dist > b.center_dist;
                  });
        for (auto& c : children) stack.push_back(std::move(c));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Discreteness falsifier
// ---------------------------------------------------------------------------

DiscretenessReport check_discreteness(const GroupPresentation& g,
                                      int max_word_len, int probe_count) {
    if (max_word_len <= 0 || probe_count <= 0)
        throw std::invalid_argument("check_discreteness: budgets must be positive");

    DiscretenessReport rep;
    auto elements = enumerate_elements(g, max_word_len);
    rep.element_count = elements.size();
    if (elements.size() <= 1) {
        // Trivial group: vacuously discrete and fixed-point free.
        rep.min_displacement = std::numeric_limits<double>::infinity();
        rep.pass = true;
        return rep;
    }

    auto probes = make_probes(g.dimension(), probe_count, 0.8);
    double min_disp = std::numeric_limits<double>::infinity();
    for (const auto& el : elements) {
        if (el.word.empty()) continue;
        for (const auto& z : probes) {
            double d = hyp_dist(z, el.map.apply_vec(z));
            if (d < min_disp) {
                min_disp = d;
                rep.worst_word = el.word;
                rep.worst_probe = z;
            }
        }
    }
    rep.min_displacement = min_disp;
    rep.pass = min_disp > rep.pass_threshold;
    rep.fixed_point_found = min_disp < 1e-6;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

Primitive primitive_from_json(const json& spec) {
    require_keys_subset(spec, "generator primitive",
                        {"type", "matrix", "center", "radius", "normal"});
    const std::string type = require_field(spec, "primitive", "type").get<std::string>();
    if (type == "orthogonal") {
        const json& rows = require_field(spec, "orthogonal primitive", "matrix");
        if (!rows.is_array() || rows.empty())
            throw std::invalid_argument("orthogonal primitive: matrix must be an array");
        Mat q(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Vec row = vec_from_json(rows[i], "orthogonal matrix row");
            if (row.size() != static_cast<Eigen::Index>(rows.size()))
                throw std::invalid_argument("orthogonal primitive: matrix must be square");
            q.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
        return Orthogonal{q};
    }
    if (type == "inversion") {
        Vec c = vec_from_json(require_field(spec, "inversion primitive", "center"),
                              "inversion center");
        double r = require_field(spec, "inversion primitive", "radius").get<double>();
        return SphereInversion{c, r * r};
    }
    if (type == "reflection") {
        Vec u = vec_from_json(require_field(spec, "reflection primitive", "normal"),
                              "reflection normal");
        double n = u.norm();
        if (n == 0.0)
            throw std::invalid_argument("reflection primitive: zero normal");
        return PlaneReflection{u / n};
    }
    throw std::invalid_argument("unknown primitive type '" + type + "'");
}

json primitive_to_json(const Primitive& p) {
    json out;
    if (const auto* o = std::get_if<Orthogonal>(&p)) {
        out["type"] = "orthogonal";
        json rows = json::array();
        for (Eigen::Index i = 0; i < o->q.rows(); ++i)
            rows.push_back(vec_to_json(o->q.row(i).transpose()));
        out["matrix"] = rows;
    } else if (const auto* s = std::get_if<SphereInversion>(&p)) {
        out["type"] = "inversion";
        out["center"] = vec_to_json(s->center);
        out["radius"] = std::sqrt(s->radius_sq);
    } else {
        out["type"] = "reflection";
        out["normal"] = vec_to_json(std::get<PlaneReflection>(p).unit_normal);
    }
    return out;
}

}  // namespace

GroupHandle group_from_json(const json& spec) {
    require_keys_subset(spec, "group spec",
                        {"dimension", "label", "generators", "cyclic", "schottky2d"});
    if (spec.contains("cyclic")) {
        const json& c = spec["cyclic"];
        require_keys_subset(c, "cyclic spec", {"dimension", "length"});
        int n = c.value("dimension", 2);
        double ell = require_field(c, "cyclic spec", "length").get<double>();
        return make_cyclic_translation(n, ell);
    }
    if (spec.contains("schottky2d")) {
        const json& s = spec["schottky2d"];
        require_keys_subset(s, "schottky2d spec", {"pairs"});
        std::vector<CirclePair> pairs;
        for (const auto& p : require_field(s, "schottky2d spec", "pairs")) {
            require_keys_subset(p, "schottky pair", {"c1", "c2"});
            pairs.push_back({vec_from_json(require_field(p, "pair", "c1"), "c1"),
                             vec_from_json(require_field(p, "pair", "c2"), "c2")});
        }
        if (pairs.empty()) return make_trivial_group(2);
        return make_schottky_2d(pairs);
    }
    int n = require_field(spec, "group spec", "dimension").get<int>();
    std::string label = spec.value("label", "group");
    std::vector<MobiusMap> gens;
    if (spec.contains("generators")) {
        for (const auto& gen : spec["generators"]) {
            require_keys_subset(gen, "generator", {"chain"});
            std::vector<Primitive> chain;
            for (const auto& prim : require_field(gen, "generator", "chain"))
                chain.push_back(primitive_from_json(prim));
            gens.push_back(MobiusMap::from_primitives(n, std::move(chain)));
        }
    }
    return std::make_shared<GroupPresentation>(n, std::move(gens), label);
}

json group_to_json(const GroupPresentation& g) {
    json out;
    out["dimension"] = g.dimension();
    out["label"] = g.label();
    json gens = json::array();
    for (const auto& gen : g.generators()) {
        json chain = json::array();
        for (const auto& p : gen.chain()) chain.push_back(primitive_to_json(p));
        gens.push_back(json{{"chain", chain}});
    }
    out["generators"] = gens;
    return out;
}

}  // namespace factorball
