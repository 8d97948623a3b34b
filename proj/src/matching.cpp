#include "striptsp/matching.h"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "striptsp/errors.h"

namespace striptsp {

Matching::Matching(std::vector<std::pair<int, int>> p) : pairs(std::move(p)) {
    for (auto& [a, b] : pairs)
        if (a > b) std::swap(a, b);
    std::sort(pairs.begin(), pairs.end());
}

std::vector<int> Matching::support() const {
    std::vector<int> out;
    out.reserve(2 * pairs.size());
    for (auto [a, b] : pairs) {
        out.push_back(a);
        out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_perfect_on(const Matching& m, int slots) {
    if (slots < 0 || static_cast<int>(m.pairs.size()) * 2 != slots) return false;
    std::vector<char> seen(slots, 0);
    for (auto [a, b] : m.pairs) {
        if (a < 0 || b < 0 || a >= slots || b >= slots || a == b) return false;
        if (seen[a]++ || seen[b]++) return false;
    }
    return true;
}

namespace {

void extend_matchings(std::vector<int>& free, std::vector<std::pair<int, int>>& cur,
                      std::vector<Matching>& out) {
    if (free.empty()) {
        out.emplace_back(cur);
        return;
    }
    const int first = free.front();
    for (std::size_t i = 1; i < free.size(); ++i) {
        const int partner = free[i];
        std::vector<int> rest;
        rest.reserve(free.size() - 2);
        for (std::size_t j = 1; j < free.size(); ++j)
            if (j != i) rest.push_back(free[j]);
        cur.emplace_back(first, partner);
        extend_matchings(rest, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Matching> all_perfect_matchings(int slots) {
    if (slots < 0 || slots % 2 != 0) throw PreconditionError("perfect matchings need an even label count");
    std::vector<int> free(slots);
    std::iota(free.begin(), free.end(), 0);
    std::vector<std::pair<int, int>> cur;
    std::vector<Matching> out;
    extend_matchings(free, cur, out);
    return out;
}

std::optional<Matching> join_union(std::span<const Matching* const> parts, bool allow_cycle) {
    // Compact the labels, then walk the union graph.
    std::vector<int> labels;
    for (const Matching* m : parts)
        for (auto [a, b] : m->pairs) {
            labels.push_back(a);
            labels.push_back(b);
        }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    const int n = static_cast<int>(labels.size());
    auto local = [&](int v) {
        return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), v) - labels.begin());
    };

    std::vector<std::array<int, 2>> adj(n, {-1, -1});
    std::vector<int> deg(n, 0);
    int edge_count = 0;
    for (const Matching* m : parts)
        for (auto [a, b] : m->pairs) {
            const int u = local(a), v = local(b);
            if (u == v) return std::nullopt;
            if (deg[u] == 2 || deg[v] == 2) return std::nullopt;
            adj[u][deg[u]++] = v;
            adj[v][deg[v]++] = u;
            ++edge_count;
        }

    std::vector<char> visited(n, 0);
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < n; ++s) {
        if (visited[s] || deg[s] != 1) continue;
        int prev = -1, cur = s;
        visited[s] = 1;
        for (;;) {
            const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
            if (next < 0) break;
            prev = cur;
            cur = next;
            visited[cur] = 1;
            if (deg[cur] == 1) break;
        }
        out.emplace_back(labels[s], labels[cur]);
    }
    // Anything left unvisited lies on a cycle.
    const bool has_cycle = std::find(visited.begin(), visited.end(), 0) != visited.end();
    if (has_cycle) {
        if (!allow_cycle || !out.empty()) return std::nullopt;
        // The cycle must be the whole union: its vertex count equals its edge count.
        if (edge_count != n) return std::nullopt;
        int prev = -1, cur = 0, steps = 0;
        do {
            const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
            prev = cur;
            cur = next;
            ++steps;
        } while (cur != 0 && steps <= n);
        if (steps != n) return std::nullopt;
        // A 2-cycle made of one pair taken twice walks back immediately.
    }
    return Matching(std::move(out));
}

bool compatible(const Matching& a, const Matching& b) {
    const Matching* parts[] = {&a, &b};
    return join_union(parts, true).has_value();
}

Matching join(const Matching& a, const Matching& b) {
    const Matching* parts[] = {&a, &b};
    auto r = join_union(parts, true);
    if (!r) throw ContractViolation("join of incompatible matchings");
    return *r;
}

bool fits(const Matching& a, const Matching& b) {
    if (a.support() != b.support()) return false;
    if (a.empty()) return true;
    const Matching* parts[] = {&a, &b};
    auto r = join_union(parts, true);
    return r && r->empty();
}

double opt(const Matching& m, const RepSet& r) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : r.entries)
        if (e.weight < best && fits(m, e.matching)) best = e.weight;
    return best;
}

namespace {

using Row = std::vector<std::uint64_t>;

// Bit X (X ranges over subsets of 1..m-1; label 0 is always on the "inside")
// is set when every pair of `m` lies entirely inside or entirely outside.
Row cut_row(const Matching& m, int boundary) {
    const int free_bits = boundary - 1;
    const std::size_t cuts = std::size_t{1} << free_bits;
    Row row((cuts + 63) / 64, 0);
    for (std::size_t x = 0; x < cuts; ++x) {
        const std::size_t side = x << 1 | 1;  // label 0 inside
        bool ok = true;
        for (auto [a, b] : m.pairs)
            if ((side >> a & 1) != (side >> b & 1)) {
                ok = false;
                break;
            }
        if (ok) row[x / 64] |= std::uint64_t{1} << (x % 64);
    }
    return row;
}

int lowest_bit(const Row& r) {
    for (std::size_t w = 0; w < r.size(); ++w)
        if (r[w]) return static_cast<int>(w * 64 + __builtin_ctzll(r[w]));
    return -1;
}

}  // namespace

RepSet reduce(const RepSet& r) {
    if (r.boundary < 0 || r.boundary % 2 != 0) throw ContractViolation("odd boundary in reduce");
    if (r.boundary > 24) throw ContractViolation("boundary too large for reduce");
    for (const auto& e : r.entries)
        if (!is_perfect_on(e.matching, r.boundary))
            throw ContractViolation("reduce: entry not a perfect matching on the shared boundary");

    std::vector<std::size_t> order(r.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = r.entries[i];
        const auto& b = r.entries[j];
        if (a.weight != b.weight) return a.weight < b.weight;
        return a.matching < b.matching;
    });

    RepSet out{r.boundary, {}};
    if (r.boundary == 0) {
        if (!order.empty()) out.entries.push_back(r.entries[order.front()]);
        return out;
    }

    // Gaussian elimination over GF(2), greedy by weight: a row is kept iff it
    // is independent of the rows kept before it.
    std::vector<Row> basis;
    std::vector<int> pivots;
    for (std::size_t i : order) {
        Row row = cut_row(r.entries[i].matching, r.boundary);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const int p = pivots[b];
            if (row[p / 64] >> (p % 64) & 1)
                for (std::size_t w = 0; w < row.size(); ++w) row[w] ^= basis[b][w];
        }
        const int p = lowest_bit(row);
        if (p < 0) continue;
        // Keep the basis reduced so later eliminations stay single-pass.
        for (auto& other : basis)
            if (other[p / 64] >> (p % 64) & 1)
                for (std::size_t w = 0; w < row.size(); ++w) other[w] ^= row[w];
        basis.push_back(std::move(row));
        pivots.push_back(p);
        out.entries.push_back(r.entries[i]);
    }
    return out;
}

}  // namespace striptsp
