#pragma once

#include <string>
#include <span>
#include <vector>

#include "striptsp/geometry.h"
#include "striptsp/matching.h"

namespace striptsp {

// Case prover for tours that cross a separator four times in a strip of
// width 2*sqrt(2) with integer x-coordinates.
//
// Copy labels: the four crossing edges are numbered 0..3 (left to right by
// their order in the input). Label i is the left endpoint copy of edge i,
// label 4+i its right endpoint copy. Shared endpoints therefore appear as
// two labels at the same location.

inline constexpr int kCopies = 8;

// ---- Step 1: consolidation -------------------------------------------------

struct ConsolidationMove {
    int copy = 0;
    Point from;
    Point to;
    double distance = 0.0;
};

struct Consolidation {
    int x_star = 0;                 // s* lies at x_star + 1/2
    std::vector<Edge> edges;        // F, as given (index i -> copies i, 4+i)
    std::vector<Point> original;    // copy positions before any move
    std::vector<Point> copies;      // after the moves
    std::vector<ConsolidationMove> log;
    int n_left = 0;                 // distinct locations left of s*
    int n_right = 0;

    double total_displacement() const;
    /// |F| minus the length of the moved edge set.
    double length_before() const;
    double length_after() const;
    /// Crossings of x = x_line by the original / moved edges.
    int crossings_before(double x_line) const;
    int crossings_after(double x_line) const;
    /// Copies whose move took them across x = x_line.
    int moved_across(double x_line) const;
};

/// Moves endpoints along their edges toward s* until both sides occupy
/// consecutive integer columns. Requires integer x-coordinates; throws
/// PreconditionError unless exactly four of `edges_F` cross s* and s* is
/// the rightmost half-integer line crossed by all four.
Consolidation consolidate_endpoints(std::span<const Edge> edges_F, const Separator& s_star,
                                    const StripInstance& inst);

/// Connectivity pattern of `tour` with respect to the four edges `f`: each
/// path of tour minus f becomes a connection between two copy labels.
Matching connectivity_pattern(const Tour& tour, std::span<const Edge> f);

/// Every perfect matching F' on 0..endpoints-1 whose union with `pattern`
/// is a single cycle, in lexicographic order.
std::vector<Matching> generate_replacements(const Matching& pattern, int endpoints);

// ---- Step 2: interval prover ----------------------------------------------

struct YRange {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const YRange&, const YRange&) = default;
    friend auto operator<=>(const YRange&, const YRange&) = default;
};

struct LengthBounds {
    double lower = 0.0;
    double upper = 0.0;
};

LengthBounds interval_edge_bounds(double p_x, YRange p_y, double q_x, YRange q_y);

/// One point of a case: the copies it carries and its allowed x-columns.
struct CasePoint {
    std::string name;
    std::vector<int> copies;
    std::vector<int> allowed_x;
};

struct ProverCase {
    int n_left = 0;
    int n_right = 0;
    std::vector<CasePoint> points;
    Matching f_bar;    // over copy labels
    Matching pattern;  // the connectivity pattern, over copy labels

    int point_of(int copy) const;
};

/// The six cases, built from the structure of a four-crossing separator.
std::vector<ProverCase> generate_case_definitions();

std::vector<ProverCase> parse_cases(const std::string& json_text);
std::string cases_to_json(const std::vector<ProverCase>& cases);
std::vector<ProverCase> load_cases(const std::string& path);
/// Throws PreconditionError when the pair is not one of the six cases.
const ProverCase& find_case(const std::vector<ProverCase>& cases, int n_left, int n_right);

/// All x-assignments (one column per point, pairwise distinct), sorted.
std::vector<std::vector<int>> x_assignments(const ProverCase& c);

enum class Verdict { Success, Fail };

struct Scenario {
    std::vector<int> x;       // per case point
    std::vector<YRange> y;    // per case point
    friend bool operator==(const Scenario&, const Scenario&) = default;
    friend auto operator<=>(const Scenario&, const Scenario&) = default;
};

struct ProofOutcome {
    Scenario scenario;
    Verdict verdict = Verdict::Fail;
    Matching witness;         // F', empty on Fail
    int depth = 0;            // number of halvings from the full box
};

struct ProverOptions {
    double delta = 2.8284271247461903;
    double epsilon = 0.05;
    double eta = 1e-6;
    unsigned threads = 1;
};

/// Leaf scenarios of the subdivision for every x-assignment, sorted by
/// scenario. Throws PreconditionError for an unknown (n_left, n_right).
std::vector<ProofOutcome> find_shorter_tour(const ProverCase& c, const ProverOptions& opts = {});

/// Length bounds of an edge set (copy labels) in a scenario.
LengthBounds matching_bounds(const ProverCase& c, const Scenario& s, const Matching& m);

/// Re-checks a Success outcome with separately written bound arithmetic and
/// cycle tracing.
bool verify_certificate(const ProverCase& c, const ProofOutcome& o, const ProverOptions& opts = {});

/// Per x-assignment, the leaf boxes are distinct, inside [0, delta]^m and
/// their volumes add up to delta^m.
bool check_coverage(const ProverCase& c, std::span<const ProofOutcome> outcomes, double delta);

/// Geometry of a scenario with point names dropped: (x, y-range) sorted by
/// x, optionally mirrored by x -> -1 - x. Identifies scenarios across cases.
std::vector<std::pair<int, YRange>> scenario_shape(const Scenario& s, bool mirror);

/// Distinct x-assignments carrying at least one Fail.
std::vector<std::vector<int>> failing_x_assignments(std::span<const ProofOutcome> outcomes);

// ---- residual scenarios ----------------------------------------------------

struct ScenarioCheck {
    std::string name;
    double threshold = 0.0;
    int grid_points = 0;
    int violations = 0;
    double worst_slack = 0.0;  // min over the grid of (rhs - lhs), per side
};

struct WorstCaseReport {
    std::vector<ScenarioCheck> checks;
    int observation_samples = 0;
    int observation_violations = 0;
    bool ok() const;
};

/// The two scenarios the interval prover leaves open, with the extreme
/// points pushed to the strip boundary; `grid` values of the free
/// coordinate on [0, 2 sqrt 2].
WorstCaseReport verify_worst_case_scenarios(int grid = 10001);

/// Lengths of the three edge sets of a residual scenario at free
/// coordinate y: {F, F'_1, F'_2}.
struct ResidualLengths {
    double f = 0.0, f1 = 0.0, f2 = 0.0;
};
ResidualLengths residual_left(double y);
ResidualLengths residual_right(double y);

}  // namespace striptsp
