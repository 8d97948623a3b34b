#pragma once

#include <span>
#include <vector>

#include "striptsp/geometry.h"

namespace striptsp {

/// Replaces the directed tour edges q1->q2 and r1->r2 by q1-r1 and q2-r2;
/// the stretch of the tour between them is reversed. Both edges must follow
/// the same traversal direction (both along the stored order, or both
/// against it). Throws ContractViolation otherwise.
Tour swap_edges(const Tour& tour, const Edge& e1, const Edge& e2, const StripInstance& inst);

struct TonicitySwap {
    int separator = 0;  // combinatorial separator index, 1-based
    Edge first, second;
    double gain = 0.0;  // old length minus new length; >= 0 up to rounding
};

struct TonicityReduction {
    Tour tour;
    std::vector<TonicitySwap> swaps;
};

/// Repeatedly swaps pairs of edges that cross a separator in the same
/// direction whenever that does not lengthen the tour (ties swap too). Each
/// swap lowers the tonicity profile by 2 on the pair's common x-range and
/// leaves it unchanged elsewhere. `separators` restricts the search to the
/// given 1-based separator indices; empty means all of them. Separators
/// between points with equal x are skipped. Requires at most n^2 swaps
/// (ContractViolation otherwise).
TonicityReduction reduce_tonicity_traced(const Tour& tour, const StripInstance& inst,
                                         std::span<const int> separators = {});
Tour reduce_tonicity(const Tour& tour, const StripInstance& inst);

/// 2 * ceil(2 sqrt(delta + 1) - 1); DomainError for negative delta.
int tonicity_bound_integer(double delta);
/// 2 * ceil(2 sqrt(c delta) + 2c - 1); DomainError for negative delta or c < 1.
int tonicity_bound_sparse(double delta, int c);

/// x_{i+1} - x_i for the 1-based separator index i.
double separator_gap(const StripInstance& inst, int i);

/// If delta <= k * gap(i), reduces the tour at s_i only and reports whether
/// the tonicity there is at most 2k; true when the hypothesis fails. While
/// searching it asserts, for each consecutive non-swappable pair, that the
/// pieces clipped to [x_i, x_{i+1}] keep the same strict inequality and are
/// each at least x_{i+1} - x_i long (ContractViolation otherwise). The tour
/// is expected to be optimal.
bool check_gap_lemma(const StripInstance& inst, const Tour& tour, int i, int k);

/// Two-separator form: for 1-based i < j with
/// delta <= (x_j - x_i)(k - j + i + 1), reduction at s_i and s_{j-1} leaves
/// both with tonicity at most 2k.
bool check_gap_lemma_pair(const StripInstance& inst, const Tour& tour, int i, int j, int k);

}  // namespace striptsp
