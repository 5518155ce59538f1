#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "factorball/mobius.hpp"

namespace factorball {

/// Raised when an enumeration would exceed its configured element cap.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A word in the generators: signed 1-based indices, +k for generator k-1,
/// -k for its inverse. The empty word is the identity.
using Word = std::vector<int>;

std::string word_to_string(const Word& w);

// ---------------------------------------------------------------------------
// GroupPresentation
// ---------------------------------------------------------------------------

/// A finitely generated group of Moebius automorphisms of B^n. Generator
/// inverses are materialized at construction; construction validates ball
/// preservation and non-identity of each generator on a probe sample.
class GroupPresentation {
public:
    GroupPresentation(int dimension, std::vector<MobiusMap> generators,
                      std::string label);

    int dimension() const { return dim_; }
    const std::string& label() const { return label_; }
    const std::vector<MobiusMap>& generators() const { return gens_; }
    int rank() const { return static_cast<int>(gens_.size()); }
    bool is_trivial() const { return gens_.empty(); }

    /// The map for a signed letter (+k / -k, 1-based).
    const MobiusMap& letter(int signed_index) const;

    /// Apply a whole word to a vector, leftmost letter applied last.
    Vec apply_word(const Word& w, Vec x) const;
    MobiusMap word_map(const Word& w) const;

    /// Deterministic probe points used for dedup and identity checks.
    const std::vector<Vec>& probes() const { return probes_; }

private:
    int dim_;
    std::string label_;
    std::vector<MobiusMap> gens_;
    std::vector<MobiusMap> inv_gens_;
    std::vector<Vec> probes_;
};

using GroupHandle = std::shared_ptr<const GroupPresentation>;

// ---------------------------------------------------------------------------
// Canonical families
// ---------------------------------------------------------------------------

/// Cyclic group generated by the hyperbolic translation of length ell along
/// the first coordinate axis. The generator maps 0 to (tanh(ell/2), 0, ...).
GroupHandle make_cyclic_translation(int n, double ell);

/// Defining data for one Schottky handle in n = 2: two geodesic circles,
/// each given by its Euclidean center c with |c| > 1; the radius
/// sqrt(|c|^2 - 1) is implied by orthogonality to the unit circle.
struct CirclePair {
    Vec c1;
    Vec c2;
};

/// Free purely hyperbolic group generated by pairing the given geodesics
/// (generator = inversion in c2-circle after inversion in c1-circle).
/// Rejects configurations whose closed disks are not pairwise disjoint.
GroupHandle make_schottky_2d(const std::vector<CirclePair>& pairs);

/// The group with no nontrivial elements (quotient metric = hyperbolic).
GroupHandle make_trivial_group(int n);

// ---------------------------------------------------------------------------
// Enumeration and orbit search
// ---------------------------------------------------------------------------

struct GroupElement {
    Word word;
    MobiusMap map;
};

/// All freely reduced words up to max_word_len, deduplicated by action on the
/// probe set (tolerance 1e-9). The identity (empty word) comes first; order
/// is word length, then letter order +1, -1, +2, -2, ...
/// Throws BudgetExceeded when the distinct-element count would exceed cap.
std::vector<GroupElement> enumerate_elements(const GroupPresentation& g,
                                             int max_word_len,
                                             std::size_t cap = 1000000);

struct OrbitPoint {
    Word word;
    Vec point;
    double displacement;  // hyp_dist(point, seed)
    double center_dist;   // hyp_dist(point, center) of the enclosing query
};

struct OrbitResult {
    std::vector<OrbitPoint> points;  // sorted by center_dist, then word order
    bool budget_incomplete = false;  // word-length frontier was still hot
    std::size_t nodes_expanded = 0;
};

/// All orbit points w(seed), |w| <= max_word_len, with h(w(seed), center) <=
/// radius. Subtrees are pruned by the triangle-inequality bound
///   h(w(seed), center) - remaining_letters * max_letter_displacement > radius.
/// budget_incomplete is set when some word at the length cap still had
/// children that the bound could not exclude from the ball.
OrbitResult orbit_in_ball(const GroupPresentation& g, const Point& seed,
                          const Point& center, double radius, int max_word_len,
                          std::size_t cap = 1000000);

struct MinOrbitDist {
    double value = 0.0;
    Word word;          // argmin word
    Vec point;          // word applied to z1
    bool budget_incomplete = false;
    std::size_t nodes_expanded = 0;
};

/// min over freely reduced words w with |w| <= max_word_len of
/// h(w(z1), z2), found by branch-and-bound (the empty word gives the
/// initial bound h(z1, z2)). With exclude_trivial the empty word is not a
/// candidate (used for displacement infima); the result is +infinity when
/// no nontrivial word exists.
MinOrbitDist min_orbit_dist(const GroupPresentation& g, const Vec& z1,
                            const Vec& z2, int max_word_len,
                            bool exclude_trivial = false);

// ---------------------------------------------------------------------------
// Discreteness / fixed-point falsifier
// ---------------------------------------------------------------------------

struct DiscretenessReport {
    double min_displacement = 0.0;  // over nontrivial words and probes
    Word worst_word;
    Vec worst_probe;
    std::size_t element_count = 0;
    double pass_threshold = 1e-3;
    bool pass = false;
    bool fixed_point_found = false;  // min displacement below 1e-6
};

/// Heuristic falsifier for "acts discontinuously without fixed points":
/// scans min over nontrivial enumerated words and probe points of
/// h(z, w(z)). Never a proof of discreteness.
DiscretenessReport check_discreteness(const GroupPresentation& g,
                                      int max_word_len, int probe_count);

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

/// Loads {"dimension":n,"label":s,"generators":[{"chain":[...]}]} or the
/// shorthands {"cyclic":{"dimension":n,"length":l}} and
/// {"schottky2d":{"pairs":[{"c1":[..],"c2":[..]}]}}. Unknown keys are errors.
GroupHandle group_from_json(const nlohmann::json& spec);
nlohmann::json group_to_json(const GroupPresentation& g);

}  // namespace factorball
