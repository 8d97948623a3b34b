#pragma once

#include <functional>
#include <vector>

#include "striptsp/exact_oracle.h"
#include "striptsp/geometry.h"

namespace striptsp {

/// Shortest bitonic tour in O(n^2). Requires n >= 3 and strictly
/// increasing x-coordinates.
TourResult bitonic_tsp(const StripInstance& inst);

inline constexpr std::size_t kBitonicEnumerateMaxPoints = 18;

/// Every distinct bitonic tour (2^(n-3) of them for n >= 3): each interior
/// point goes on the upper or the lower chain, with point 1 pinned to the
/// upper chain so mirror partitions are not repeated.
void for_each_bitonic_tour(const StripInstance& inst,
                           const std::function<void(const Tour&, double)>& visit);
std::vector<TourResult> enumerate_bitonic_tours(const StripInstance& inst);

}  // namespace striptsp
