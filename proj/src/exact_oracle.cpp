#include "striptsp/exact_oracle.h"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

namespace striptsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TourResult held_karp(const StripInstance& inst) {
    const int n = static_cast<int>(inst.size());
    if (n < 3 || static_cast<std::size_t>(n) > kHeldKarpMaxPoints)
        throw SizeError("held_karp needs 3 <= n <= 20, got " + std::to_string(n));

    // Bit b of a mask stands for point b + 1; point 0 is the fixed start.
    const int m = n - 1;
    const std::size_t full = (std::size_t{1} << m) - 1;
    std::vector<double> dp((full + 1) * m, kInf);
    std::vector<std::int8_t> parent((full + 1) * m, -1);
    auto at = [m](std::size_t mask, int v) { return mask * m + v; };

    for (int v = 0; v < m; ++v) dp[at(std::size_t{1} << v, v)] = inst.dist(0, v + 1);

    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (int v = 0; v < m; ++v) {
            if (!(mask >> v & 1)) continue;
            const std::size_t prev = mask & ~(std::size_t{1} << v);
            if (prev == 0) continue;
            double best = kInf;
            int arg = -1;
            for (int u = 0; u < m; ++u) {
                if (!(prev >> u & 1)) continue;
                const double cand = dp[at(prev, u)] + inst.dist(u + 1, v + 1);
                if (cand < best) {
                    best = cand;
                    arg = u;
                }
            }
            dp[at(mask, v)] = best;
            parent[at(mask, v)] = static_cast<std::int8_t>(arg);
        }
    }

    double best = kInf;
    int last = -1;
    for (int v = 0; v < m; ++v) {
        const double cand = dp[at(full, v)] + inst.dist(v + 1, 0);
        if (cand < best) {
            best = cand;
            last = v;
        }
    }

    std::vector<int> order;
    order.reserve(n);
    std::size_t mask = full;
    for (int v = last; v >= 0;) {
        order.push_back(v + 1);
        const int p = parent[at(mask, v)];
        mask &= ~(std::size_t{1} << v);
        v = p;
    }
    order.push_back(0);
    std::reverse(order.begin(), order.end());
    return {Tour(std::move(order)), best};
}

void for_each_tour(const StripInstance& inst,
                   const std::function<void(const Tour&, double)>& visit) {
    const int n = static_cast<int>(inst.size());
    if (n < 3 || static_cast<std::size_t>(n) > kEnumerateMaxPoints)
        throw SizeError("tour enumeration needs 3 <= n <= 10, got " + std::to_string(n));
    std::vector<int> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 1);
    std::vector<int> order(n);
    order[0] = 0;
    do {
        if (rest.front() > rest.back()) continue;  // the reversed copy is visited instead
        std::copy(rest.begin(), rest.end(), order.begin() + 1);
        Tour t(order);
        visit(t, tour_length(inst, t));
    } while (std::next_permutation(rest.begin(), rest.end()));
}

std::vector<TourResult> enumerate_all_tours(const StripInstance& inst) {
    std::vector<TourResult> out;
    for_each_tour(inst, [&](const Tour& t, double len) { out.push_back({t, len}); });
    return out;
}

PathCoverSolution exact_path_cover(const std::vector<std::vector<double>>& cost,
                                   std::span<const int> interior,
                                   const BoundaryMatching& m) {
    const int pairs = static_cast<int>(m.pairs.size());
    const int ni = static_cast<int>(interior.size());
    if (ni + 2 * pairs > static_cast<int>(kPathCoverMaxPoints))
        throw SizeError("path cover limited to 20 nodes");
    const int nodes = static_cast<int>(cost.size());
    for (auto [a, b] : m.pairs)
        if (a < 0 || b < 0 || a >= nodes || b >= nodes || a == b)
            throw IndexError("bad matching pair");
    for (int v : interior)
        if (v < 0 || v >= nodes) throw IndexError("bad interior node");

    PathCoverSolution sol;
    if (pairs == 0) {
        sol.length = ni == 0 ? 0.0 : kInf;
        return sol;
    }

    // State (pair p, visited interior mask, current position). Position ni
    // means "standing at the start terminal of pair p".
    const std::size_t masks = std::size_t{1} << ni;
    const int pos_count = ni + 1;
    auto idx = [&](int p, std::size_t mask, int pos) {
        return (static_cast<std::size_t>(p) * masks + mask) * pos_count + pos;
    };
    std::vector<double> f(static_cast<std::size_t>(pairs) * masks * pos_count, kInf);
    std::vector<std::int8_t> from(f.size(), -1);
    auto node_of = [&](int p, int pos) { return pos == ni ? m.pairs[p].first : interior[pos]; };

    f[idx(0, 0, ni)] = 0.0;
    double best = kInf;
    int best_pos = -1;
    const std::size_t full = masks - 1;
    for (int p = 0; p < pairs; ++p) {
        const int target = m.pairs[p].second;
        for (std::size_t mask = 0; mask < masks; ++mask) {
            for (int pos = 0; pos <= ni; ++pos) {
                const double v = f[idx(p, mask, pos)];
                if (v == kInf) continue;
                const int here = node_of(p, pos);
                for (int u = 0; u < ni; ++u) {
                    if (mask >> u & 1) continue;
                    const double c = v + cost[here][interior[u]];
                    const std::size_t j = idx(p, mask | (std::size_t{1} << u), u);
                    if (c < f[j]) {
                        f[j] = c;
                        from[j] = static_cast<std::int8_t>(pos);
                    }
                }
                const double close = v + cost[here][target];
                if (p + 1 < pairs) {
                    const std::size_t j = idx(p + 1, mask, ni);
                    if (close < f[j]) {
                        f[j] = close;
                        from[j] = static_cast<std::int8_t>(pos);
                    }
                } else if (mask == full && close < best) {
                    best = close;
                    best_pos = pos;
                }
            }
        }
    }

    sol.length = best;
    if (best == kInf) return sol;

    sol.paths.assign(pairs, {});
    std::size_t mask = full;
    int pos = best_pos;
    for (int p = pairs - 1; p >= 0; --p) {
        auto& path = sol.paths[p];
        path.push_back(m.pairs[p].second);
        while (pos != ni) {
            path.push_back(interior[pos]);
            const int prev = from[idx(p, mask, pos)];
            mask &= ~(std::size_t{1} << pos);
            pos = prev;
        }
        path.push_back(m.pairs[p].first);
        std::reverse(path.begin(), path.end());
        if (p > 0) pos = from[idx(p, mask, ni)];
    }
    return sol;
}

PathCoverSolution exact_path_cover(const StripInstance& inst,
                                   std::span<const int> subset,
                                   std::span<const int> boundary,
                                   const BoundaryMatching& m) {
    if (subset.size() > kPathCoverMaxPoints) throw SizeError("path cover limited to 20 points");
    for (int v : subset) inst.at(v);
    std::vector<int> sorted_subset(subset.begin(), subset.end());
    std::sort(sorted_subset.begin(), sorted_subset.end());
    if (std::adjacent_find(sorted_subset.begin(), sorted_subset.end()) != sorted_subset.end())
        throw PreconditionError("subset repeats a point");

    std::vector<int> local(inst.size(), -1);
    for (std::size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<int>(i);
    std::vector<char> is_boundary(subset.size(), 0);
    for (int b : boundary) {
        if (b < 0 || static_cast<std::size_t>(b) >= inst.size() || local[b] < 0)
            throw PreconditionError("boundary point outside subset");
        is_boundary[local[b]] = 1;
    }
    std::vector<int> covered(subset.size(), 0);
    BoundaryMatching lm;
    for (auto [a, b] : m.pairs) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= inst.size() ||
            static_cast<std::size_t>(b) >= inst.size() || local[a] < 0 || local[b] < 0 ||
            !is_boundary[local[a]] || !is_boundary[local[b]])
            throw PreconditionError("matching pair not on the boundary");
        ++covered[local[a]];
        ++covered[local[b]];
        lm.pairs.emplace_back(local[a], local[b]);
    }
    std::vector<int> interior;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (is_boundary[i] && covered[i] != 1)
            throw PreconditionError("matching is not perfect on the boundary");
        if (!is_boundary[i]) interior.push_back(static_cast<int>(i));
    }

    std::vector<std::vector<double>> cost(subset.size(), std::vector<double>(subset.size()));
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = 0; j < subset.size(); ++j)
            cost[i][j] = i == j ? kInf : inst.dist(subset[i], subset[j]);

    PathCoverSolution sol = exact_path_cover(cost, interior, lm);
    for (auto& path : sol.paths)
        for (int& v : path) v = subset[v];
    return sol;
}

}  // namespace striptsp
