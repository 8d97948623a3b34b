#include "striptsp/bitonic.h"

#include <limits>

namespace striptsp {

namespace {

void require_bitonic_input(const StripInstance& inst) {
    if (inst.size() < 3) throw SizeError("bitonic tour needs at least 3 points");
    if (!inst.distinct_x())
        throw PreconditionError("bitonic tour needs strictly increasing x-coordinates");
}

// Rebuilds a cyclic order from an undirected edge list that forms one cycle.
std::vector<int> cycle_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> order{0};
    int prev = -1, cur = 0;
    while (static_cast<int>(order.size()) < n) {
        const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
        order.push_back(next);
        prev = cur;
        cur = next;
    }
    return order;
}

}  // namespace

TourResult bitonic_tsp(const StripInstance& inst) {
    require_bitonic_input(inst);
    const int n = static_cast<int>(inst.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // len[i][j], i < j: shortest pair of disjoint x-monotone chains from p_0,
    // one ending at p_i and one at p_j, jointly covering p_0..p_j.
    std::vector<std::vector<double>> len(n, std::vector<double>(n, inf));
    std::vector<int> split(n, -1);  // predecessor of p_j when i == j-1
    len[0][1] = inst.dist(0, 1);
    for (int j = 2; j < n; ++j) {
        for (int i = 0; i < j - 1; ++i) len[i][j] = len[i][j - 1] + inst.dist(j - 1, j);
        double best = inf;
        for (int k = 0; k < j - 1; ++k) {
            const double cand = len[k][j - 1] + inst.dist(k, j);
            if (cand < best) {
                best = cand;
                split[j] = k;
            }
        }
        len[j - 1][j] = best;
    }

    std::vector<std::pair<int, int>> edges{{n - 2, n - 1}};
    int i = n - 2, j = n - 1;
    while (j > 1) {
        if (i < j - 1) {
            edges.emplace_back(j - 1, j);
            --j;
        } else {
            const int k = split[j];
            edges.emplace_back(k, j);
            j = j - 1;
            i = k;
        }
    }
    edges.emplace_back(0, 1);

    Tour tour(cycle_from_edges(n, edges));
    return {tour, tour_length(inst, tour)};
}

void for_each_bitonic_tour(const StripInstance& inst,
                           const std::function<void(const Tour&, double)>& visit) {
    require_bitonic_input(inst);
    const int n = static_cast<int>(inst.size());
    if (static_cast<std::size_t>(n) > kBitonicEnumerateMaxPoints)
        throw SizeError("bitonic enumeration limited to 18 points");
    // Bit b of `lower` sends interior point b + 2 to the lower chain.
    const int free_points = n - 3;
    std::vector<int> order;
    order.reserve(n);
    for (unsigned long lower = 0; lower < (1ul << free_points); ++lower) {
        order.assign({0, 1});
        for (int p = 2; p < n - 1; ++p)
            if (!(lower >> (p - 2) & 1)) order.push_back(p);
        order.push_back(n - 1);
        for (int p = n - 2; p >= 2; --p)
            if (lower >> (p - 2) & 1) order.push_back(p);
        Tour t(order);
        visit(t, tour_length(inst, t));
    }
}

std::vector<TourResult> enumerate_bitonic_tours(const StripInstance& inst) {
    std::vector<TourResult> out;
    for_each_bitonic_tour(inst, [&](const Tour& t, double len) { out.push_back({t, len}); });
    return out;
}

}  // namespace striptsp
