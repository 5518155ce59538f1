#include "factorball/verify.hpp"

#include <cmath>
#include <random>

#include "factorball/json_util.hpp"

namespace factorball {

namespace {

// Uncertainty implied by a caveat class; pass tolerances are floored by the
// sum of these so caveated reports cannot pass at a spuriously tight tol.
double caveat_floor(const std::string& caveat) {
    if (caveat.rfind("density", 0) == 0) return 0.05;
    if (caveat.rfind("modulus", 0) == 0) return 0.05;
    if (caveat.rfind("budget", 0) == 0) return 0.05;
    if (caveat.rfind("sampled-family", 0) == 0) return 0.0;  // informational
    return 0.02;
}

void finalize(InequalityReport& rep) {
    rep.slack = rep.rhs - rep.lhs;
    double floor = 0.0;
    for (const auto& c : rep.caveats) floor += caveat_floor(c);
    rep.tol_effective = std::max(rep.tol, floor);
    rep.pass = rep.lhs <= rep.rhs * (1.0 + rep.tol_effective);
}

double hyperbolic_weight(const Vec& x, double exponent) {
    return std::pow(2.0 / (1.0 - x.squaredNorm()), exponent);
}

json budget_fingerprint(const ExperimentBudget& b) {
    json j;
    j["mc_samples"] = b.mc_samples;
    j["seed"] = b.seed;
    j["threads"] = b.threads;
    j["word_budget"] = b.word_budget;
    j["refine_gap"] = b.refine_gap;
    j["grid"] = {{"lo", vec_to_json(b.grid.lo)},
                 {"hi", vec_to_json(b.grid.hi)},
                 {"resolution", b.grid.resolution},
                 {"element", b.grid.element == VolumeElement::hyperbolic
                                 ? "hyperbolic"
                                 : "euclidean"}};
    j["modulus_options"] = {{"max_iterations", b.modulus_options.max_iterations},
                            {"rel_tol", b.modulus_options.rel_tol},
                            {"patience", b.modulus_options.patience},
                            {"step0", b.modulus_options.step0}};
    j["admissibility_paths"] = b.admissibility_paths;
    return j;
}

json experiment_fingerprint(const char* kind, const ExperimentBudget& budget,
                            const PathFamily& fam, const SamplerSpec& sampler,
                            const Region& domain, double tol) {
    json j;
    j["experiment"] = kind;
    j["budget"] = budget_fingerprint(budget);
    j["paths"] = fam.paths.size();
    j["dim"] = fam.dim;
    j["sampler"] = {{"center", vec_to_json(sampler.center)},
                    {"radius", sampler.radius}};
    j["domain"] = domain.to_json();
    j["tol"] = tol;
    return j;
}

}  // namespace

json report_to_json(const InequalityReport& rep) {
    json j;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["slack"] = rep.slack;
    j["tol"] = rep.tol;
    j["tol_effective"] = rep.tol_effective;
    j["pass"] = rep.pass;
    j["caveats"] = rep.caveats;
    j["fingerprint"] = rep.fingerprint;
    j["details"] = rep.details;
    return j;
}

InequalityReport check_poletsky(const QuotientMap& f, const Chart& source_chart,
                                const Chart& target_chart, const PathFamily& fam,
                                const DensityField& rho, int m_tilde,
                                const Region& domain, const SamplerSpec& sampler,
                                double tol, const ExperimentBudget& budget) {
    if (m_tilde < 1)
        throw std::invalid_argument("check_poletsky: m_tilde must be >= 1");
    InequalityReport rep;
    rep.tol = tol;
    rep.fingerprint =
        experiment_fingerprint("poletsky", budget, fam, sampler, domain, tol);
    rep.fingerprint["m_tilde"] = m_tilde;
    rep.caveats.push_back(
        "sampled-family lhs underestimates the full family's modulus");

    auto adm = is_admissible(rho, fam, budget.admissibility_paths,
                             budget.refine_gap, budget.word_budget);
    if (!adm.pass)
        rep.caveats.push_back("density not admissible on the sampled family (min " +
                              std::to_string(adm.min_integral) + ")");
    if (adm.budget_incomplete)
        rep.caveats.push_back("budget-incomplete quotient gaps in admissibility check");

    // lhs: discrete modulus of the image family in target chart coordinates.
    PathFamily image = fam.mapped([&](const Vec& x) {
        return target_chart.to_chart(f.apply(source_chart.from_chart(x)));
    });
    auto mod = discrete_modulus(image, budget.grid, budget.modulus_options);
    rep.lhs = mod.estimate;
    if (!mod.converged)
        rep.caveats.push_back("modulus optimizer stopped before convergence");

    // rhs: (1/m_tilde) * int K_I(p, f) rho^n dh~ in source chart coordinates.
    const int n = source_chart.center().group->dimension();
    const double exponent = static_cast<double>(n);
    bool unbounded_ki = false;
    McResult integral = mc_integrate(
        sampler,
        [&](const Vec& x) {
            if (!domain.contains(x)) return 0.0;
            double density = rho.chart(x);
            if (density == 0.0) return 0.0;
            auto ki = chart_inner_dilatation(f, source_chart.from_chart(x));
            if (!ki.finite) {
                unbounded_ki = true;
                return 0.0;
            }
            return ki.value * std::pow(density, exponent) *
                   hyperbolic_weight(x, exponent);
        },
        budget.mc_samples, budget.seed, budget.threads);
    rep.rhs = integral.estimate / static_cast<double>(m_tilde);
    if (unbounded_ki)
        rep.caveats.push_back("budget: infinite inner dilatation encountered");

    rep.details["lhs_modulus"] = {{"estimate", mod.estimate},
                                  {"dual_bound", mod.dual_bound},
                                  {"iterations", mod.iterations},
                                  {"residual", mod.residual},
                                  {"active_cells", mod.active_cells},
                                  {"paths", mod.paths}};
    rep.details["rhs_integral"] = {{"estimate", integral.estimate},
                                   {"std_error", integral.std_error},
                                   {"samples", integral.samples}};
    rep.details["admissibility"] = {{"min_integral", adm.min_integral},
                                    {"paths_checked", adm.paths_checked}};
    rep.details["m_tilde"] = m_tilde;
    finalize(rep);
    return rep;
}

InequalityReport check_inverse_inequality(
    const QuotientMap& f, const Chart& source_chart, const Chart& target_chart,
    const PathFamily& fam, const DensityField& rho_star,
    const Region& image_domain, const SamplerSpec& sampler, double tol,
    const ExperimentBudget& budget) {
    InequalityReport rep;
    rep.tol = tol;
    rep.fingerprint = experiment_fingerprint("inverse", budget, fam, sampler,
                                             image_domain, tol);
    rep.caveats.push_back(
        "sampled-family lhs underestimates the full family's modulus");

    // Admissibility of rho_* for the image family.
    PathFamily image = fam.mapped([&](const Vec& x) {
        return target_chart.to_chart(f.apply(source_chart.from_chart(x)));
    });
    auto adm = is_admissible(rho_star, image, budget.admissibility_paths,
                             budget.refine_gap, budget.word_budget);
    if (!adm.pass)
        rep.caveats.push_back("density not admissible on the image family (min " +
                              std::to_string(adm.min_integral) + ")");

    // lhs: modulus of the source family.
    auto mod = discrete_modulus(fam, budget.grid, budget.modulus_options);
    rep.lhs = mod.estimate;
    if (!mod.converged)
        rep.caveats.push_back("modulus optimizer stopped before convergence");

    // rhs: int over the image domain of K_O(f^{-1}(p_*), f) rho_*^n dh~_*.
    const int n = target_chart.center().group->dimension();
    const double exponent = static_cast<double>(n);
    bool unbounded_ko = false;
    McResult integral = mc_integrate(
        sampler,
        [&](const Vec& y) {
            if (!image_domain.contains(y)) return 0.0;
            double density = rho_star.chart(y);
            if (density == 0.0) return 0.0;
            QuotientPoint preimage =
                f.apply_inverse(target_chart.from_chart(y));
            auto ko = chart_outer_dilatation(f, preimage);
            if (!ko.finite) {
                unbounded_ko = true;
                return 0.0;
            }
            return ko.value * std::pow(density, exponent) *
                   hyperbolic_weight(y, exponent);
        },
        budget.mc_samples, budget.seed, budget.threads);
    rep.rhs = integral.estimate;
    if (unbounded_ko)
        rep.caveats.push_back("budget: infinite outer dilatation encountered");

    rep.details["lhs_modulus"] = {{"estimate", mod.estimate},
                                  {"dual_bound", mod.dual_bound},
                                  {"iterations", mod.iterations},
                                  {"residual", mod.residual}};
    rep.details["rhs_integral"] = {{"estimate", integral.estimate},
                                   {"std_error", integral.std_error},
                                   {"samples", integral.samples}};
    rep.details["admissibility"] = {{"min_integral", adm.min_integral},
                                    {"paths_checked", adm.paths_checked}};
    finalize(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// FMO
// ---------------------------------------------------------------------------

FmoResult fmo_functional(const std::function<double(const Vec&)>& q,
                         const QuotientPoint& p0,
                         const std::vector<double>& eps_list,
                         std::uint64_t samples_per_level, std::uint64_t seed,
                         int word_budget) {
    if (eps_list.empty())
        throw std::invalid_argument("fmo_functional: empty eps list");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i + 1] < eps_list[i]))
            throw std::invalid_argument("fmo_functional: eps must decrease");
    auto nn = normal_neighborhood(p0, word_budget);
    if (eps_list.front() >= nn.radius)
        throw std::invalid_argument(
            "fmo_functional: largest eps exceeds the normal-neighborhood radius " +
            std::to_string(nn.radius));

    const int n = p0.group->dimension();
    const double exponent = static_cast<double>(n);
    FmoResult out;

    const int batches = 16;
    std::uint64_t per_batch = std::max<std::uint64_t>(1, samples_per_level / batches);

    for (std::size_t lv = 0; lv < eps_list.size(); ++lv) {
        const double eps = eps_list[lv];
        const double re = euclidean_radius_of_hyp_ball(eps);

        // Two passes over identical sample streams: mean, then deviation.
        auto sample_stream = [&](std::uint64_t batch, auto&& consume) {
            std::mt19937_64 rng(seed * 1000003ull + lv * 131ull + batch);
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            Vec x(n);
            for (std::uint64_t i = 0; i < per_batch; ++i) {
                double norm2 = 0.0;
                do {
                    for (int j = 0; j < n; ++j) x(j) = gauss(rng);
                    norm2 = x.squaredNorm();
                } while (norm2 == 0.0);
                double r = re * std::pow(unif(rng), 1.0 / n);
                Vec pt = (r / std::sqrt(norm2)) * x;
                consume(pt, hyperbolic_weight(pt, exponent));
            }
        };

        double wsum = 0.0, wq = 0.0;
        for (int b = 0; b < batches; ++b)
            sample_stream(b, [&](const Vec& x, double w) {
                wsum += w;
                wq += w * q(x);
            });
        double mean = wq / wsum;

        std::vector<double> batch_vals(batches);
        std::vector<double> batch_w(batches);
        for (int b = 0; b < batches; ++b) {
            double dev = 0.0, w_acc = 0.0;
            sample_stream(b, [&](const Vec& x, double w) {
                dev += w * std::abs(q(x) - mean);
                w_acc += w;
            });
            batch_vals[b] = dev / w_acc;
            batch_w[b] = w_acc;
        }
        double value = 0.0;
        for (int b = 0; b < batches; ++b)
            value += batch_vals[b] * batch_w[b];
        value /= wsum;
        double var = 0.0;
        for (int b = 0; b < batches; ++b)
            var += (batch_vals[b] - value) * (batch_vals[b] - value);
        var /= batches;
        out.levels.push_back(
            {eps, mean, value, std::sqrt(var / batches)});
    }

    std::size_t tail_start = out.levels.size() >= 4 ? out.levels.size() - 4 : 0;
    out.tail_max = 0.0;
    for (std::size_t i = tail_start; i < out.levels.size(); ++i)
        out.tail_max = std::max(out.tail_max, out.levels[i].value);
    const auto& first = out.levels[tail_start];
    const auto& last = out.levels.back();
    out.tail_trend = last.value - first.value;
    double noise = 3.0 * std::sqrt(first.std_error * first.std_error +
                                   last.std_error * last.std_error);
    // Absolute floor keeps roundoff-level wiggles of a flat sequence from
    // registering as growth.
    out.increasing_tail = out.tail_trend > noise + 1e-12 + 1e-9 * out.tail_max;
    return out;
}

// ---------------------------------------------------------------------------
// Equicontinuity
// ---------------------------------------------------------------------------

std::vector<EquicontinuityRow> equicontinuity_probe(
    const std::vector<std::shared_ptr<QuotientMap>>& family,
    const QuotientPoint& p0, const std::vector<double>& radii, int directions,
    int rings, int word_budget) {
    if (family.empty())
        throw std::invalid_argument("equicontinuity_probe: empty family");
    auto nn = normal_neighborhood(p0, word_budget);
    const int n = p0.group->dimension();
    if (n != 2)
        throw std::invalid_argument("equicontinuity_probe: polar sampling is 2-d");

    std::vector<EquicontinuityRow> table;
    for (double r : radii) {
        if (r >= nn.radius)
            throw std::invalid_argument(
                "equicontinuity_probe: radius exceeds the normal neighborhood");
        EquicontinuityRow row;
        row.radius = r;
        // Deterministic polar sample of B~(p0, r) via the chart at p0.
        std::vector<QuotientPoint> pts;
        for (int ring = 1; ring <= rings; ++ring) {
            double frac = (ring == rings) ? 1.0 - 1e-6
                                          : static_cast<double>(ring) / rings;
            double re = euclidean_radius_of_hyp_ball(r * frac);
            for (int k = 0; k < directions; ++k) {
                double theta = 2.0 * M_PI * k / directions;
                Vec x(2);
                x << re * std::cos(theta), re * std::sin(theta);
                pts.push_back(nn.chart.from_chart(x));
            }
        }
        for (const auto& f : family) {
            QuotientPoint f0 = f->apply(p0);
            double omega = 0.0;
            for (const auto& p : pts) {
                QuotientPoint fp = f->apply(p);
                omega = std::max(omega, quotient_dist(fp, f0, word_budget));
            }
            row.omega_per_map.push_back(omega);
            row.sup_omega = std::max(row.sup_omega, omega);
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace factorball
