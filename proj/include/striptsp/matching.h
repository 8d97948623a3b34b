#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace striptsp {

/// Perfect matching over integer labels. Normalized form: every pair has
/// first < second and pairs are sorted.
struct Matching {
    std::vector<std::pair<int, int>> pairs;

    Matching() = default;
    explicit Matching(std::vector<std::pair<int, int>> p);

    bool empty() const { return pairs.empty(); }
    /// Labels covered, ascending.
    std::vector<int> support() const;

    friend bool operator==(const Matching&, const Matching&) = default;
    friend auto operator<=>(const Matching&, const Matching&) = default;
};

/// True if `m` covers exactly labels 0..slots-1, each once.
bool is_perfect_on(const Matching& m, int slots);

/// All perfect matchings on 0..slots-1 (slots even), in lexicographic order
/// of "pair the smallest free label with each later label in turn".
std::vector<Matching> all_perfect_matchings(int slots);

/// Union of the matchings has maximum degree 2 and is either a set of paths
/// or exactly one cycle containing every edge.
bool compatible(const Matching& a, const Matching& b);

/// Contracts degree-2 vertices of the union; the result pairs up the
/// endpoints of every path (labels of odd multiplicity). A union that is one
/// full cycle joins to the empty matching. Throws ContractViolation when
/// the inputs are not compatible.
Matching join(const Matching& a, const Matching& b);

/// Multi-way variant used by the strip DP: nullopt instead of throwing, and
/// a closed cycle is accepted only when `allow_cycle` is set.
std::optional<Matching> join_union(std::span<const Matching* const> parts, bool allow_cycle);

/// Same labels, union is a single Hamiltonian cycle.
bool fits(const Matching& a, const Matching& b);

struct WeightedMatching {
    Matching matching;
    double weight = 0.0;
    std::size_t tag = 0;  // caller payload, carried through reduce()
};

/// Weighted matchings over the boundary 0..boundary-1.
struct RepSet {
    int boundary = 0;
    std::vector<WeightedMatching> entries;
};

/// min weight over entries fitting m; +inf when none does.
double opt(const Matching& m, const RepSet& r);

/// Rank-based reduction: keeps a minimum-weight basis of the cut-consistency
/// matrix over GF(2). Output has at most 2^(boundary-1) entries and
/// preserves opt(M, .) for every perfect matching M on the boundary.
RepSet reduce(const RepSet& r);

}  // namespace striptsp
