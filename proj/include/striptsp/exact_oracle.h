#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "striptsp/geometry.h"

namespace striptsp {

// Brute-force ground truth. Nothing in here is clever on purpose: the rest
// of the toolkit is validated against these routines.

struct TourResult {
    Tour tour;
    double length = 0.0;
};

inline constexpr std::size_t kHeldKarpMaxPoints = 20;
inline constexpr std::size_t kEnumerateMaxPoints = 10;
inline constexpr std::size_t kPathCoverMaxPoints = 20;

/// Exact TSP by subset dynamic programming. 3 <= n <= 20.
TourResult held_karp(const StripInstance& inst);

/// Calls `visit` once per undirected tour (canonical form). n <= 10.
void for_each_tour(const StripInstance& inst,
                   const std::function<void(const Tour&, double)>& visit);
std::vector<TourResult> enumerate_all_tours(const StripInstance& inst);

/// Perfect matching on a boundary set, as unordered index pairs.
struct BoundaryMatching {
    std::vector<std::pair<int, int>> pairs;
};

struct PathCoverSolution {
    std::vector<std::vector<int>> paths;  // paths[i] runs from pairs[i].first to .second
    double length = 0.0;
};

/// Minimum-length collection of paths over `subset` whose endpoints realize
/// `m` on `boundary` and which together visit every subset point once.
/// Indices refer to `inst`. |subset| <= 20.
PathCoverSolution exact_path_cover(const StripInstance& inst,
                                   std::span<const int> subset,
                                   std::span<const int> boundary,
                                   const BoundaryMatching& m);

/// Same problem over an abstract complete graph given by a symmetric cost
/// matrix (infinity forbids an edge). Nodes not named in `m` and listed in
/// `interior` must be visited as path interiors. Returns length = +inf when
/// no realization exists.
PathCoverSolution exact_path_cover(const std::vector<std::vector<double>>& cost,
                                   std::span<const int> interior,
                                   const BoundaryMatching& m);

}  // namespace striptsp
