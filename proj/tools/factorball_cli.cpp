// Command-line driver: loads one experiment config, dispatches it, writes a
// deterministic JSON report (plus optional CSV tables) into the output
// directory. Exit codes: 0 success/pass, 1 inequality fail, 2 caveat or
// convergence trouble when running --strict, 3 config error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "factorball/json_util.hpp"
#include "factorball/maps.hpp"
#include "factorball/modulus.hpp"
#include "factorball/paths.hpp"
#include "factorball/quotient.hpp"
#include "factorball/verify.hpp"

namespace fs = std::filesystem;
using namespace factorball;
using nlohmann::json;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool strict = false;
    bool seed_override = false;
    std::uint64_t seed = 0;
};

struct Budgets {
    int max_word_len = kDefaultWordBudget;
    std::uint64_t mc_samples = 200000;
    int grid_resolution = 96;
    int max_iterations = 10000;
};

Budgets budgets_from(const json& cfg) {
    Budgets b;
    if (!cfg.contains("budgets")) return b;
    const json& j = cfg["budgets"];
    require_keys_subset(j, "budgets",
                        {"max_word_len", "mc_samples", "grid_resolution",
                         "max_iterations"});
    b.max_word_len = j.value("max_word_len", b.max_word_len);
    b.mc_samples = j.value("mc_samples", b.mc_samples);
    b.grid_resolution = j.value("grid_resolution", b.grid_resolution);
    b.max_iterations = j.value("max_iterations", b.max_iterations);
    if (b.max_word_len <= 0 || b.mc_samples == 0 || b.grid_resolution <= 0 ||
        b.max_iterations <= 0)
        throw std::invalid_argument("budgets: all budgets must be positive");
    return b;
}

std::uint64_t seed_from(const json& cfg, const CliOptions& opts) {
    if (opts.seed_override) return opts.seed;
    if (!cfg.contains("seeds"))
        throw std::invalid_argument(
            "seeds: stochastic commands require {\"seeds\":{\"mc\":<u64>}}");
    require_keys_subset(cfg["seeds"], "seeds", {"mc"});
    return require_field(cfg["seeds"], "seeds", "mc").get<std::uint64_t>();
}

Point point_from(const json& arr, const std::string& where) {
    return Point(vec_from_json(arr, where));
}

GridSpec grid_from(const json& cfg, double half_extent, int resolution,
                   VolumeElement element) {
    GridSpec grid;
    if (cfg.contains("grid")) {
        const json& j = cfg["grid"];
        require_keys_subset(j, "grid", {"lo", "hi", "resolution", "element"});
        grid.lo = vec_from_json(require_field(j, "grid", "lo"), "grid.lo");
        grid.hi = vec_from_json(require_field(j, "grid", "hi"), "grid.hi");
        grid.resolution =
            require_field(j, "grid", "resolution").get<std::vector<int>>();
        std::string el = j.value("element", std::string("euclidean"));
        if (el == "hyperbolic") grid.element = VolumeElement::hyperbolic;
        else if (el == "euclidean") grid.element = VolumeElement::euclidean;
        else throw std::invalid_argument("grid: unknown element '" + el + "'");
        return grid;
    }
    grid.lo = Vec(2);
    grid.hi = Vec(2);
    grid.lo << -half_extent, -half_extent;
    grid.hi << half_extent, half_extent;
    grid.resolution = {resolution, resolution};
    grid.element = element;
    return grid;
}

json word_json(const Word& w) {
    json arr = json::array();
    for (int k : w) arr.push_back(k);
    return arr;
}

// ---------------------------------------------------------------------------
// Command handlers: each returns {exit_code, report, csv tables}.
// ---------------------------------------------------------------------------

struct CommandResult {
    int exit_code = 0;
    json report;
    std::vector<std::pair<std::string, std::string>> csv;  // name, contents
    bool caveats_present = false;
};

CommandResult run_distance(const json& cfg) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "points", "budgets"});
    auto group = group_from_json(require_field(cfg, "config", "group"));
    const json& pts = require_field(cfg, "config", "points");
    if (!pts.is_array() || pts.size() != 2)
        throw std::invalid_argument("distance: 'points' must hold two points");
    Budgets b = budgets_from(cfg);
    QuotientPoint p1(point_from(pts[0], "points[0]"), group);
    QuotientPoint p2(point_from(pts[1], "points[1]"), group);
    auto d = quotient_dist_detail(p1, p2, b.max_word_len);
    CommandResult res;
    res.report["command"] = "distance";
    res.report["distance"] = d.value;
    res.report["witness_word"] = word_json(d.word);
    res.report["budget_incomplete"] = d.budget_incomplete;
    res.caveats_present = d.budget_incomplete;
    return res;
}

CommandResult run_orbit(const json& cfg) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "seed_point", "center",
                         "radius", "budgets"});
    auto group = group_from_json(require_field(cfg, "config", "group"));
    Point seed = point_from(require_field(cfg, "config", "seed_point"), "seed_point");
    Point center = point_from(require_field(cfg, "config", "center"), "center");
    double radius = require_field(cfg, "config", "radius").get<double>();
    Budgets b = budgets_from(cfg);
    auto orbit = orbit_in_ball(*group, seed, center, radius, b.max_word_len);

    CommandResult res;
    res.report["command"] = "orbit";
    res.report["count"] = orbit.points.size();
    res.report["budget_incomplete"] = orbit.budget_incomplete;
    json points = json::array();
    std::string csv = "word,displacement,center_dist";
    for (int i = 0; i < group->dimension(); ++i) csv += ",x" + std::to_string(i);
    csv += "\n";
    for (const auto& op : orbit.points) {
        points.push_back(json{{"word", word_json(op.word)},
                              {"coords", vec_to_json(op.point)},
                              {"displacement", op.displacement},
                              {"center_dist", op.center_dist}});
        csv += word_to_string(op.word) + "," + std::to_string(op.displacement) +
               "," + std::to_string(op.center_dist);
        for (Eigen::Index i = 0; i < op.point.size(); ++i)
            csv += "," + std::to_string(op.point(i));
        csv += "\n";
    }
    res.report["points"] = points;
    res.csv.emplace_back("orbit.csv", csv);
    res.caveats_present = orbit.budget_incomplete;
    return res;
}

CommandResult run_dirichlet(const json& cfg) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "center", "point",
                         "budgets"});
    auto group = group_from_json(require_field(cfg, "config", "group"));
    Point center = point_from(require_field(cfg, "config", "center"), "center");
    Point p = point_from(require_field(cfg, "config", "point"), "point");
    Budgets b = budgets_from(cfg);
    auto cls = classify_dirichlet(*group, center, p, b.max_word_len);
    CommandResult res;
    res.report["command"] = "dirichlet";
    res.report["position"] = cls.position == DirichletPosition::interior
                                 ? "interior"
                                 : cls.position == DirichletPosition::boundary
                                       ? "boundary"
                                       : "exterior";
    res.report["budget_incomplete"] = cls.budget_incomplete;
    res.caveats_present = cls.budget_incomplete;
    return res;
}

CommandResult run_measure(const json& cfg, const CliOptions& opts) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "region", "sampler",
                         "dirichlet_center", "quotient_ball",
                         "quotient_region", "budgets", "seeds"});
    const json& sj = require_field(cfg, "config", "sampler");
    require_keys_subset(sj, "sampler", {"center", "radius"});
    SamplerSpec sampler{vec_from_json(require_field(sj, "sampler", "center"),
                                      "sampler.center"),
                        require_field(sj, "sampler", "radius").get<double>()};
    Budgets b = budgets_from(cfg);
    std::uint64_t seed = seed_from(cfg, opts);
    const int n = static_cast<int>(sampler.center.size());

    McResult mc;
    if (cfg.contains("group")) {
        auto group = group_from_json(cfg["group"]);
        Point center =
            point_from(require_field(cfg, "config", "dirichlet_center"),
                       "dirichlet_center");
        int budget = b.max_word_len;
        QuotientRegion set = QuotientRegion::everything();
        if (cfg.contains("quotient_region")) {
            set = QuotientRegion::from_json(cfg["quotient_region"], group, budget);
        } else {
            const json& qb = require_field(cfg, "config", "quotient_ball");
            require_keys_subset(qb, "quotient_ball", {"center", "radius"});
            set = QuotientRegion::ball(
                QuotientPoint(
                    point_from(require_field(qb, "quotient_ball", "center"),
                               "quotient_ball.center"),
                    group),
                require_field(qb, "quotient_ball", "radius").get<double>(),
                budget);
        }
        mc = quotient_measure(
            group, center,
            [&](const QuotientPoint& p) { return set.contains(p); }, sampler,
            b.mc_samples, seed, budget, opts.threads);
    } else {
        Region region = Region::from_json(require_field(cfg, "config", "region"));
        mc = hyp_measure(region, n, sampler, b.mc_samples, seed, opts.threads);
    }
    CommandResult res;
    res.report["command"] = "measure";
    res.report["estimate"] = mc.estimate;
    res.report["std_error"] = mc.std_error;
    res.report["samples"] = mc.samples;
    return res;
}

PathFamily family_from(const json& cfg, int dim) {
    const json& fj = require_field(cfg, "config", "family");
    require_keys_subset(fj, "family",
                        {"type", "center", "r1", "r2", "count", "paths",
                         "samples_per_path"});
    const std::string type = require_field(fj, "family", "type").get<std::string>();
    if (type == "annulus_joining" || type == "radial_pencil") {
        Vec center = fj.contains("center")
                         ? vec_from_json(fj["center"], "family.center")
                         : Vec(Vec::Zero(dim));
        return PathFamily::annulus_joining(
            dim, center, require_field(fj, "family", "r1").get<double>(),
            require_field(fj, "family", "r2").get<double>(),
            fj.value("count", 512), fj.value("samples_per_path", 33));
    }
    if (type == "circle_family") {
        // Concentric circles separating the annulus boundary components.
        Vec center = fj.contains("center")
                         ? vec_from_json(fj["center"], "family.center")
                         : Vec(Vec::Zero(dim));
        double r1 = require_field(fj, "family", "r1").get<double>();
        double r2 = require_field(fj, "family", "r2").get<double>();
        if (!(0.0 < r1 && r1 < r2))
            throw std::invalid_argument("circle_family: need 0 < r1 < r2");
        int count = fj.value("count", 64);
        int samples = fj.value("samples_per_path", 129);
        std::vector<SampledPath> paths;
        for (int k = 0; k < count; ++k) {
            double r = r1 + (r2 - r1) * (k + 0.5) / count;
            paths.push_back(SampledPath::from_function(
                [&](double t) {
                    Vec x(2);
                    x << center(0) + r * std::cos(t), center(1) + r * std::sin(t);
                    return x;
                },
                0.0, 2.0 * M_PI, samples));
        }
        return PathFamily::explicit_paths(std::move(paths));
    }
    if (type == "explicit") {
        std::vector<SampledPath> paths;
        for (const auto& pj : require_field(fj, "family", "paths")) {
            std::vector<double> params;
            std::vector<Vec> points;
            for (const auto& sample : pj) {
                Vec row = vec_from_json(sample, "family path sample");
                params.push_back(row(0));
                points.push_back(row.tail(row.size() - 1));
            }
            paths.push_back(SampledPath::from_points(params, points));
        }
        return PathFamily::explicit_paths(std::move(paths));
    }
    throw std::invalid_argument("family: unknown type '" + type + "'");
}

CommandResult run_modulus(const json& cfg) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "family", "grid", "budgets"});
    PathFamily fam = family_from(cfg, 2);
    Budgets b = budgets_from(cfg);
    double extent = 0.0;
    for (const auto& p : fam.paths)
        for (const auto& x : p.points())
            extent = std::max(extent, x.lpNorm<Eigen::Infinity>());
    GridSpec grid = grid_from(cfg, extent * 1.05, b.grid_resolution,
                              VolumeElement::euclidean);
    ModulusOptions mo;
    mo.max_iterations = b.max_iterations;
    auto res_mod = discrete_modulus(fam, grid, mo);
    CommandResult res;
    res.report["command"] = "modulus";
    res.report["estimate"] = res_mod.estimate;
    res.report["dual_bound"] = res_mod.dual_bound;
    res.report["iterations"] = res_mod.iterations;
    res.report["residual"] = res_mod.residual;
    res.report["converged"] = res_mod.converged;
    res.report["active_cells"] = res_mod.active_cells;
    res.report["paths"] = res_mod.paths;
    res.report["grid"] = {{"lo", vec_to_json(grid.lo)},
                          {"hi", vec_to_json(grid.hi)},
                          {"resolution", grid.resolution},
                          {"element",
                           grid.element == VolumeElement::hyperbolic
                               ? "hyperbolic"
                               : "euclidean"}};
    res.caveats_present = !res_mod.converged;
    return res;
}

std::shared_ptr<QuotientMap> map_from(const json& cfg, const GroupHandle& group,
                                      const QuotientPoint& p0, int budget) {
    const json& mj = require_field(cfg, "config", "map");
    require_keys_subset(mj, "map", {"type", "alpha", "m", "r0", "translate"});
    const std::string type = require_field(mj, "map", "type").get<std::string>();
    if (type == "identity")
        return std::make_shared<IdentityQuotientMap>(group);
    if (type == "mobius") {
        Vec shift = vec_from_json(require_field(mj, "map", "translate"),
                                  "map.translate");
        MobiusMap g0 = MobiusMap::translation_to_origin(Point(shift)).inverse();
        return std::make_shared<MobiusQuotientMap>(g0, group);
    }
    if (type == "radial_example") {
        double alpha = require_field(mj, "map", "alpha").get<double>();
        int m = require_field(mj, "map", "m").get<int>();
        const int n = group->dimension();
        return std::make_shared<BallQuotientMap>(
            group, radial_example_map(alpha, m, n),
            radial_example_scaled_inverse(alpha, m, n, 1.0));
    }
    if (type == "fm_family") {
        return build_fm_family(group, p0,
                               require_field(mj, "map", "r0").get<double>(),
                               require_field(mj, "map", "alpha").get<double>(),
                               require_field(mj, "map", "m").get<int>(), budget);
    }
    throw std::invalid_argument("map: unknown type '" + type + "'");
}

CommandResult run_dilatation(const json& cfg) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "map", "points",
                         "budgets"});
    auto group = cfg.contains("group") ? group_from_json(cfg["group"])
                                       : make_trivial_group(2);
    Budgets b = budgets_from(cfg);
    QuotientPoint p0(Point::origin(group->dimension()), group);
    auto map = map_from(cfg, group, p0, b.max_word_len);

    CommandResult res;
    res.report["command"] = "dilatation";
    std::string csv = "KI,KO,max_stretch";
    for (int i = 0; i < group->dimension(); ++i) csv += ",x" + std::to_string(i);
    csv += "\n";
    double max_ki = 0.0, max_ko = 0.0;
    bool any_infinite = false;
    json rows = json::array();
    for (const auto& pj : require_field(cfg, "config", "points")) {
        QuotientPoint p(point_from(pj, "points[i]"), group);
        auto ki = chart_inner_dilatation(*map, p);
        auto ko = chart_outer_dilatation(*map, p);
        auto rep = map->chart_rep(p);
        double stretch = max_stretch(rep.map, rep.x);
        any_infinite |= (!ki.finite || !ko.finite);
        if (ki.finite) max_ki = std::max(max_ki, ki.value);
        if (ko.finite) max_ko = std::max(max_ko, ko.value);
        json row;
        row["coords"] = pj;
        row["KI"] = ki.finite ? json(ki.value) : json("infinite");
        row["KO"] = ko.finite ? json(ko.value) : json("infinite");
        row["max_stretch"] = stretch;
        rows.push_back(row);
        csv += (ki.finite ? std::to_string(ki.value) : "inf") + "," +
               (ko.finite ? std::to_string(ko.value) : "inf") + "," +
               std::to_string(stretch);
        for (const auto& c : pj) csv += "," + std::to_string(c.get<double>());
        csv += "\n";
    }
    res.report["points"] = rows;
    res.report["max_KI"] = max_ki;
    res.report["max_KO"] = max_ko;
    res.report["infinite_encountered"] = any_infinite;
    res.csv.emplace_back("dilatation.csv", csv);
    return res;
}

CommandResult run_verify(const json& cfg, const CliOptions& opts, bool inverse) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "p0", "map", "ring",
                         "count", "density", "budgets", "seeds", "tol"});
    auto group = group_from_json(require_field(cfg, "config", "group"));
    Vec p0v = cfg.contains("p0") ? vec_from_json(cfg["p0"], "p0")
                                 : Vec(Vec::Zero(group->dimension()));
    QuotientPoint p0(Point(p0v), group);
    Budgets b = budgets_from(cfg);
    std::uint64_t seed = seed_from(cfg, opts);
    double tol = cfg.value("tol", 0.05);

    const json& ring = require_field(cfg, "config", "ring");
    require_keys_subset(ring, "ring", {"r1", "r2"});
    double r1 = require_field(ring, "ring", "r1").get<double>();
    double r2 = require_field(ring, "ring", "r2").get<double>();
    if (!(0.0 < r1 && r1 < r2))
        throw std::invalid_argument("ring: need 0 < r1 < r2");
    int count = cfg.value("count", 384);

    auto nn = normal_neighborhood(p0, b.max_word_len);
    if (r2 >= nn.radius)
        throw std::invalid_argument(
            "ring: r2 must stay below the normal-neighborhood radius " +
            std::to_string(nn.radius));
    auto map = map_from(cfg, group, p0, b.max_word_len);

    double re1 = euclidean_radius_of_hyp_ball(r1);
    double re2 = euclidean_radius_of_hyp_ball(r2);
    auto fam = PathFamily::annulus_joining(2, Vec::Zero(2), re1, re2, count);
    std::function<double(double)> eta = ring_extremal_weight(r1, r2);
    if (cfg.contains("density")) {
        const json& dj = cfg["density"];
        require_keys_subset(dj, "density", {"type"});
        const std::string dtype =
            require_field(dj, "density", "type").get<std::string>();
        if (dtype == "ring_log") {
            double logr = std::log(r2 / r1);
            eta = [logr](double t) { return 1.0 / (t * logr); };
        } else if (dtype == "ring_const") {
            double width = r2 - r1;
            eta = [width](double) { return 1.0 / width; };
        } else if (dtype != "ring_extremal") {
            throw std::invalid_argument("density: unknown type '" + dtype + "'");
        }
    }
    auto rho = ring_test_density(p0, r1, r2, eta, b.max_word_len);
    SamplerSpec sampler{Vec::Zero(2), re2 * 1.02};

    ExperimentBudget budget;
    budget.mc_samples = b.mc_samples;
    budget.seed = seed;
    budget.threads = opts.threads;
    budget.word_budget = b.max_word_len;
    budget.modulus_options.max_iterations = b.max_iterations;
    double chart_extent = euclidean_radius_of_hyp_ball(nn.radius);
    budget.grid = grid_from(cfg, chart_extent, b.grid_resolution,
                            VolumeElement::hyperbolic);

    InequalityReport rep;
    if (!inverse) {
        Region domain = Region::annulus(Vec::Zero(2), r1, r2, Metric::hyperbolic);
        rep = check_poletsky(*map, nn.chart, nn.chart, fam, rho, 1, domain,
                             sampler, tol, budget);
    } else {
        // Image ring radii under the built-in maps (identity for the
        // conformal ones, contracted for the radial family).
        auto probe = [&](double re) {
            QuotientPoint p = nn.chart.from_chart(Vec(re * Vec::Unit(2, 0)));
            Vec img = nn.chart.to_chart(map->apply(p));
            return hyp_radius_of_euclidean_ball(img.norm());
        };
        double h1 = probe(re1), h2 = probe(re2);
        if (!(h1 < h2))
            throw std::invalid_argument("verify-inverse: degenerate image ring");
        double log_img = std::log(h2 / h1);
        auto rho_star = ring_test_density(
            p0, h1, h2, [log_img](double t) { return 1.0 / (t * log_img); },
            b.max_word_len);
        Region image_domain =
            Region::annulus(Vec::Zero(2), h1, h2, Metric::hyperbolic);
        rep = check_inverse_inequality(*map, nn.chart, nn.chart, fam, rho_star,
                                       image_domain, sampler, tol, budget);
    }
    CommandResult res;
    res.report = report_to_json(rep);
    res.report["command"] = inverse ? "verify-inverse" : "verify-poletsky";
    res.exit_code = rep.pass ? 0 : 1;
    res.caveats_present = rep.caveats.size() > 1;  // beyond the standing note
    return res;
}

CommandResult run_fmo(const json& cfg, const CliOptions& opts) {
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "p0", "q", "eps0",
                         "levels", "budgets", "seeds"});
    auto group = cfg.contains("group") ? group_from_json(cfg["group"])
                                       : make_trivial_group(2);
    Vec p0v = cfg.contains("p0") ? vec_from_json(cfg["p0"], "p0")
                                 : Vec(Vec::Zero(group->dimension()));
    QuotientPoint p0(Point(p0v), group);
    Budgets b = budgets_from(cfg);
    std::uint64_t seed = seed_from(cfg, opts);
    double eps0 = cfg.value("eps0", 0.4);
    int levels = cfg.value("levels", 8);
    if (levels < 1) throw std::invalid_argument("fmo: levels must be positive");

    const json& qj = require_field(cfg, "config", "q");
    require_keys_subset(qj, "q", {"type", "value"});
    const std::string qtype = require_field(qj, "q", "type").get<std::string>();
    std::function<double(const Vec&)> q;
    if (qtype == "log_e_over_r")
        q = [](const Vec& x) { return std::log(M_E / x.norm()); };
    else if (qtype == "inv_r")
        q = [](const Vec& x) { return 1.0 / x.norm(); };
    else if (qtype == "const") {
        double value = qj.value("value", 1.0);
        q = [value](const Vec&) { return value; };
    } else {
        throw std::invalid_argument("fmo: unknown q type '" + qtype + "'");
    }

    std::vector<double> eps;
    for (int k = 0; k < levels; ++k) eps.push_back(eps0 * std::pow(2.0, -k));
    auto res_fmo = fmo_functional(q, p0, eps, b.mc_samples / levels, seed,
                                  b.max_word_len);

    CommandResult res;
    res.report["command"] = "fmo";
    json rows = json::array();
    std::string csv = "eps,value,std_error,mean\n";
    for (const auto& lv : res_fmo.levels) {
        rows.push_back(json{{"eps", lv.eps},
                            {"value", lv.value},
                            {"std_error", lv.std_error},
                            {"mean", lv.mean}});
        csv += std::to_string(lv.eps) + "," + std::to_string(lv.value) + "," +
               std::to_string(lv.std_error) + "," + std::to_string(lv.mean) + "\n";
    }
    res.report["levels"] = rows;
    res.report["tail_max"] = res_fmo.tail_max;
    res.report["tail_trend"] = res_fmo.tail_trend;
    res.report["increasing_tail"] = res_fmo.increasing_tail;
    res.csv.emplace_back("fmo.csv", csv);
    return res;
}

CommandResult run_equicontinuity(const json& cfg, const CliOptions& opts) {
    (void)opts;
    require_keys_subset(cfg, "config",
                        {"schema", "command", "group", "p0", "family_map",
                         "radius0", "levels", "budgets"});
    auto group = group_from_json(require_field(cfg, "config", "group"));
    Vec p0v = cfg.contains("p0") ? vec_from_json(cfg["p0"], "p0")
                                 : Vec(Vec::Zero(group->dimension()));
    QuotientPoint p0(Point(p0v), group);
    Budgets b = budgets_from(cfg);
    double radius0 = cfg.value("radius0", 0.3);
    int levels = cfg.value("levels", 5);

    const json& fj = require_field(cfg, "config", "family_map");
    require_keys_subset(fj, "family_map", {"type", "alpha", "m_max", "r0"});
    const std::string type = require_field(fj, "family_map", "type").get<std::string>();
    std::vector<std::shared_ptr<QuotientMap>> family;
    if (type == "radial_example") {
        double alpha = require_field(fj, "family_map", "alpha").get<double>();
        int m_max = require_field(fj, "family_map", "m_max").get<int>();
        double r0 = require_field(fj, "family_map", "r0").get<double>();
        for (int m = 1; m <= m_max; ++m)
            family.push_back(build_fm_family(group, p0, r0, alpha, m,
                                             b.max_word_len));
    } else {
        throw std::invalid_argument("family_map: unknown type '" + type + "'");
    }

    std::vector<double> radii;
    for (int k = 0; k < levels; ++k) radii.push_back(radius0 * std::pow(2.0, -k));
    auto table = equicontinuity_probe(family, p0, radii, 16, 4, b.max_word_len);

    CommandResult res;
    res.report["command"] = "equicontinuity";
    json rows = json::array();
    std::string csv = "radius,sup_omega\n";
    for (const auto& row : table) {
        rows.push_back(json{{"radius", row.radius}, {"sup_omega", row.sup_omega}});
        csv += std::to_string(row.radius) + "," + std::to_string(row.sup_omega) + "\n";
    }
    res.report["rows"] = rows;
    res.csv.emplace_back("equicontinuity.csv", csv);
    return res;
}

CommandResult dispatch(const json& cfg, const CliOptions& opts) {
    if (!cfg.is_object()) throw std::invalid_argument("config: expected an object");
    const std::string schema =
        require_field(cfg, "config", "schema").get<std::string>();
    if (schema != "1")
        throw std::invalid_argument("config: unsupported schema '" + schema + "'");
    const std::string command =
        require_field(cfg, "config", "command").get<std::string>();
    if (command == "distance") return run_distance(cfg);
    if (command == "orbit") return run_orbit(cfg);
    if (command == "dirichlet") return run_dirichlet(cfg);
    if (command == "measure") return run_measure(cfg, opts);
    if (command == "modulus") return run_modulus(cfg);
    if (command == "dilatation") return run_dilatation(cfg);
    if (command == "verify-poletsky") return run_verify(cfg, opts, false);
    if (command == "verify-inverse") return run_verify(cfg, opts, true);
    if (command == "fmo") return run_fmo(cfg, opts);
    if (command == "equicontinuity") return run_equicontinuity(cfg, opts);
    throw std::invalid_argument("config: unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic factor-space experiments"};
    CliOptions opts;
    app.add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required();
    app.add_option("--out", opts.out_dir, "output directory")->required();
    app.add_option("--threads", opts.threads, "worker pool cap");
    app.add_flag("--strict", opts.strict, "treat caveats as failures (exit 2)");
    auto* seed_opt =
        app.add_option("--seed", opts.seed, "override the config seed");
    CLI11_PARSE(app, argc, argv);
    opts.seed_override = seed_opt->count() > 0;
    if (opts.threads < 1) opts.threads = 1;

    json cfg;
    try {
        std::ifstream in(opts.config_path);
        if (!in) throw std::invalid_argument("cannot open config file");
        cfg = json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    CommandResult result;
    try {
        result = dispatch(cfg, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        fs::create_directories(opts.out_dir);
        result.report["config"] = cfg;
        {
            std::ofstream out(fs::path(opts.out_dir) / "report.json");
            out << result.report.dump(2) << "\n";
        }
        {
            json meta;
            meta["written_unix_ms"] =
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count();
            std::ofstream out(fs::path(opts.out_dir) / "metadata.json");
            out << meta.dump(2) << "\n";
        }
        for (const auto& [name, contents] : result.csv) {
            std::ofstream out(fs::path(opts.out_dir) / name);
            out << contents;
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 2;
    }

    if (result.exit_code != 0) return result.exit_code;
    if (opts.strict && result.caveats_present) return 2;
    return 0;
}
