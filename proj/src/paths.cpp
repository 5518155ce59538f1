#include "factorball/paths.hpp"

#include <algorithm>
#include <cmath>

namespace factorball {

namespace {
constexpr std::size_t kMaxSamples = 4u << 20;  // refinement safety cap
}

SampledPath SampledPath::from_points(std::vector<double> params,
                                     std::vector<Vec> points) {
    if (params.size() != points.size())
        throw std::invalid_argument("SampledPath: params/points size mismatch");
    if (params.size() < 2)
        throw std::invalid_argument("SampledPath: need at least two samples");
    for (std::size_t i = 0; i + 1 < params.size(); ++i)
        if (!(params[i] < params[i + 1]))
            throw std::invalid_argument("SampledPath: params must be strictly increasing");
    for (const auto& x : points)
        if (!inside_ball(x))
            throw std::invalid_argument("SampledPath: sample outside the ball");
    SampledPath p;
    p.params_ = std::move(params);
    p.points_ = std::move(points);
    return p;
}

SampledPath SampledPath::from_function(const std::function<Vec(double)>& f,
                                       double a, double b, int initial_samples) {
    if (!(a < b)) throw std::invalid_argument("SampledPath: need a < b");
    if (initial_samples < 2)
        throw std::invalid_argument("SampledPath: need at least two samples");
    std::vector<double> params;
    std::vector<Vec> points;
    for (int i = 0; i < initial_samples; ++i) {
        double t = a + (b - a) * i / (initial_samples - 1);
        params.push_back(t);
        points.push_back(f(t));
    }
    return from_points(std::move(params), std::move(points));
}

SampledPath SampledPath::segment(const Vec& x, const Vec& y, int initial_samples) {
    return from_function([&](double t) { return Vec(x + t * (y - x)); }, 0.0,
                         1.0, initial_samples);
}

SampledPath SampledPath::projected(GroupHandle g) const {
    if (!g) throw std::invalid_argument("SampledPath::projected: null group");
    SampledPath p = *this;
    p.group_ = std::move(g);
    return p;
}

QuotientPoint SampledPath::quotient_point(std::size_t i) const {
    if (!group_)
        throw std::logic_error("SampledPath: not a quotient path");
    return QuotientPoint(Point(points_[i]), group_);
}

double SampledPath::gap(std::size_t i, int word_budget) const {
    if (group_)
        return min_orbit_dist(*group_, points_[i], points_[i + 1], word_budget)
            .value;
    return hyp_dist(points_[i], points_[i + 1]);
}

SampledPath SampledPath::refined(double max_gap, int word_budget) const {
    if (max_gap <= 0.0)
        throw std::invalid_argument("SampledPath::refined: gap must be positive");
    std::vector<double> params;
    std::vector<Vec> points;
    params.push_back(params_[0]);
    points.push_back(points_[0]);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        // Depth-first bisection of the segment [i, i+1].
        struct Seg { double t0, t1; Vec x0, x1; };
        std::vector<Seg> stack = {{params_[i], params_[i + 1], points_[i],
                                   points_[i + 1]}};
        while (!stack.empty()) {
            Seg s = std::move(stack.back());
            stack.pop_back();
            double gap_len =
                group_ ? min_orbit_dist(*group_, s.x0, s.x1, word_budget).value
                       : hyp_dist(s.x0, s.x1);
            if (gap_len <= max_gap || s.t1 - s.t0 <= 1e-15) {
                params.push_back(s.t1);
                points.push_back(s.x1);
                continue;
            }
            if (params.size() + stack.size() > kMaxSamples)
                throw BudgetExceeded("SampledPath::refined: sample cap exceeded");
            double tm = 0.5 * (s.t0 + s.t1);
            Vec xm = 0.5 * (s.x0 + s.x1);
            stack.push_back({tm, s.t1, xm, s.x1});
            stack.push_back({s.t0, tm, s.x0, xm});
        }
    }
    SampledPath p;
    p.params_ = std::move(params);
    p.points_ = std::move(points);
    p.group_ = group_;
    return p;
}

SampledPath SampledPath::mapped(const std::function<Vec(const Vec&)>& f) const {
    SampledPath p;
    p.params_ = params_;
    p.points_.reserve(points_.size());
    for (const auto& x : points_) p.points_.push_back(f(x));
    p.group_ = group_;
    return p;
}

// ---------------------------------------------------------------------------
// Length
// ---------------------------------------------------------------------------

namespace {

PathLength partition_sum(const SampledPath& p, int word_budget) {
    PathLength out;
    if (p.space() == SpaceTag::quotient) {
        const auto& g = *p.group();
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            auto m = min_orbit_dist(g, p.point(i), p.point(i + 1), word_budget);
            out.value += m.value;
            out.budget_incomplete |= m.budget_incomplete;
        }
    } else {
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            out.value += hyp_dist(p.point(i), p.point(i + 1));
    }
    return out;
}

}  // namespace

PathLength hyp_length(const SampledPath& p, double refine_gap) {
    if (p.space() != SpaceTag::ball)
        throw std::invalid_argument("hyp_length: expected a ball-space path");
    return partition_sum(p.refined(refine_gap), kDefaultWordBudget);
}

PathLength quotient_length(const SampledPath& p, int max_word_len,
                           double refine_gap) {
    if (p.space() != SpaceTag::quotient)
        throw std::invalid_argument("quotient_length: expected a quotient path");
    return partition_sum(p.refined(refine_gap, max_word_len), max_word_len);
}

LengthFunction::LengthFunction(std::vector<double> params,
                               std::vector<double> lengths)
    : params_(std::move(params)), lengths_(std::move(lengths)) {
    if (params_.size() != lengths_.size() || params_.empty())
        throw std::invalid_argument("LengthFunction: bad table");
    if (std::abs(lengths_.front()) > 0.0)
        throw std::invalid_argument("LengthFunction: must start at 0");
    for (std::size_t i = 0; i + 1 < lengths_.size(); ++i)
        if (lengths_[i + 1] < lengths_[i])
            throw std::invalid_argument("LengthFunction: not nondecreasing");
}

double LengthFunction::operator()(double t) const {
    if (t <= params_.front()) return lengths_.front();
    if (t >= params_.back()) return lengths_.back();
    auto it = std::upper_bound(params_.begin(), params_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - params_.begin());
    std::size_t lo = hi - 1;
    double w = (t - params_[lo]) / (params_[hi] - params_[lo]);
    return lengths_[lo] + w * (lengths_[hi] - lengths_[lo]);
}

double LengthFunction::inverse(double s) const {
    if (s <= lengths_.front()) return params_.front();
    if (s >= lengths_.back()) return params_.back();
    auto it = std::upper_bound(lengths_.begin(), lengths_.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - lengths_.begin());
    std::size_t lo = hi - 1;
    double span = lengths_[hi] - lengths_[lo];
    if (span == 0.0) return params_[lo];
    double w = (s - lengths_[lo]) / span;
    return params_[lo] + w * (params_[hi] - params_[lo]);
}

LengthFunction cumulative_length(const SampledPath& p, int word_budget) {
    std::vector<double> lengths{0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        acc += p.gap(i, word_budget);
        lengths.push_back(acc);
    }
    return LengthFunction(p.params(), std::move(lengths));
}

LengthFunction length_correspondence(const LengthFunction& source,
                                     const LengthFunction& image) {
    if (source.params().size() != image.params().size())
        throw std::invalid_argument(
            "length_correspondence: tables must share a parameter grid");
    std::vector<double> s = source.lengths();
    std::vector<double> l = image.lengths();
    // Collapse ties in the source length so the table stays a function.
    std::vector<double> su, lu;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!su.empty() && s[i] <= su.back() + 1e-15) {
            lu.back() = std::max(lu.back(), l[i]);
            continue;
        }
        su.push_back(s[i]);
        lu.push_back(l[i]);
    }
    if (su.size() == 1) {  // degenerate source
        su.push_back(su[0] + 1.0);
        lu.push_back(lu[0]);
    }
    return LengthFunction(std::move(su), std::move(lu));
}

SampledPath normal_representation(const SampledPath& p, double refine_gap,
                                  int word_budget) {
    SampledPath fine = p.refined(refine_gap, word_budget);
    std::vector<double> params;
    std::vector<Vec> points;
    params.push_back(0.0);
    points.push_back(fine.point(0));
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < fine.size(); ++i) {
        double d = fine.gap(i, word_budget);
        if (d <= 0.0) continue;  // collapse coincident samples
        acc += d;
        params.push_back(acc);
        points.push_back(fine.point(i + 1));
    }
    if (points.size() < 2) {
        // Zero-length path: constant single-point representation on [0, 1].
        SampledPath out =
            SampledPath::from_points({0.0, 1.0}, {points[0], points[0]});
        if (p.group()) out = out.projected(p.group());
        return out;
    }
    SampledPath out = SampledPath::from_points(std::move(params), std::move(points));
    if (p.group()) out = out.projected(p.group());
    return out;
}

// ---------------------------------------------------------------------------
// Line integrals
// ---------------------------------------------------------------------------

PathLength line_integral(const SampledPath& p,
                         const std::function<double(const Vec&)>& rho,
                         double refine_gap, int word_budget) {
    SampledPath fine = p.refined(refine_gap, word_budget);
    PathLength out;
    double prev = rho(fine.point(0));
    if (prev < 0.0) throw std::invalid_argument("line_integral: negative density");
    for (std::size_t i = 0; i + 1 < fine.size(); ++i) {
        double next = rho(fine.point(i + 1));
        if (next < 0.0)
            throw std::invalid_argument("line_integral: negative density");
        double ds;
        if (fine.space() == SpaceTag::quotient) {
            auto m = min_orbit_dist(*fine.group(), fine.point(i),
                                    fine.point(i + 1), word_budget);
            ds = m.value;
            out.budget_incomplete |= m.budget_incomplete;
        } else {
            ds = hyp_dist(fine.point(i), fine.point(i + 1));
        }
        out.value += 0.5 * (prev + next) * ds;
        prev = next;
    }
    return out;
}

PathLength line_integral(const SampledPath& p,
                         const std::function<double(const QuotientPoint&)>& rho,
                         double refine_gap, int word_budget) {
    if (p.space() != SpaceTag::quotient)
        throw std::invalid_argument(
            "line_integral: quotient density needs a quotient path");
    GroupHandle g = p.group();
    return line_integral(
        p,
        [&rho, &g](const Vec& x) { return rho(QuotientPoint(Point(x), g)); },
        refine_gap, word_budget);
}

}  // namespace factorball
