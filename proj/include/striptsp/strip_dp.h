#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "striptsp/exact_oracle.h"
#include "striptsp/geometry.h"
#include "striptsp/matching.h"

namespace striptsp {

// Separator/block dynamic program for points in a narrow strip.
//
// Boundary states are multisets of "slots": the right endpoints of the tour
// edges crossing a separator. A point shows up twice when both of its tour
// edges cross the line, which a plain point set cannot express.

struct StripDpOptions {
    int c1 = 4;                 // near slots <= floor(c1 * sqrt(k))
    int cstar = 8;              // slots in the five-square zone
    int max_cross = 4;          // total slots per separator
    int max_cross_distant = 2;  // total slots when one of them is distant
    int reach = 8;              // non-distant slots among the first `reach` points right of the line
    std::size_t block_cap = 18;
    // Checked between block patterns; DeadlineExceeded once passed.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Squares sigma_i = ((i-1) delta, i delta] x [0, delta]. A point on a
/// boundary belongs to the square on its left.
struct SquareGrid {
    double delta = 1.0;
    std::map<long, std::vector<int>> occupancy;  // only non-empty squares
    int k = 0;                                   // max points per square

    std::vector<long> nonempty() const;
};

long square_of(double x, double delta);
SquareGrid build_grid(const StripInstance& inst);

struct PlacedSeparator {
    double x_line = 0.0;
    long square = 0;
};

struct BlockDecomposition {
    std::vector<PlacedSeparator> separators;  // s_1..s_t
    double left_sentinel = 0.0;               // s_0
    double right_sentinel = 0.0;              // s_{t+1}
    std::vector<std::vector<int>> blocks;     // P_1..P_{t+1}, ascending indices

    int t() const { return static_cast<int>(separators.size()); }
};

BlockDecomposition place_separators(const SquareGrid& grid, const StripInstance& inst);

/// Sorted multiset of point indices.
struct CandidateEndpointSet {
    std::vector<int> points;
    std::optional<int> distant_point;  // the slot beyond s_{j+3}, if any
};

/// Family B_j for 1 <= j <= t (j = 0 and j = t+1 give the empty set only).
std::vector<CandidateEndpointSet> enumerate_candidates(const BlockDecomposition& decomp,
                                                       const SquareGrid& grid, int j,
                                                       const StripInstance& inst,
                                                       const StripDpOptions& opts = {});

/// Right endpoints of edges crossing x = x_line, as a sorted multiset.
std::vector<int> endpoint_configuration(const StripInstance& inst, std::span<const Edge> edges,
                                        double x_line);

/// Boundary of one block: entry terminals (block points already reached
/// from the left) followed by exit copies (points right of the block).
struct BlockSolution {
    std::vector<int> terminals;  // point index per terminal label
    std::vector<int> interior;
    RepSet repset;               // over terminal labels 0..|terminals|-1
};

/// Representative set of the block's path covers. `b_prev` are slots at the
/// block's left separator, `b_cur` at its right separator (both multisets).
/// Slots in b_prev that lie right of the block must reappear in b_cur.
/// Throws SizeError if |block ∪ terminals| exceeds `cap`.
BlockSolution block_repset(const StripInstance& inst, std::span<const int> block_points,
                           std::span<const int> b_prev, std::span<const int> b_cur,
                           std::size_t cap = 18);

struct StripDpStats {
    int t = 0;
    int k = 0;
    std::size_t states = 0;
    std::size_t block_solves = 0;
    std::size_t joins = 0;
};

struct StripDpResult {
    Tour tour;
    double length = 0.0;
    StripDpStats stats;
};

/// Optional view into the DP table: called once per (j, B) after reduce,
/// for 1 <= j <= t.
using StripDpObserver = std::function<void(int j, const std::vector<int>& b, const RepSet& table)>;

StripDpResult narrow_rect_tsp(const StripInstance& inst, const StripDpOptions& opts = {},
                              const StripDpObserver& observer = {});

}  // namespace striptsp
