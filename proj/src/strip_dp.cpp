#include "striptsp/strip_dp.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>

#include "striptsp/errors.h"

namespace striptsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pdist(const StripInstance& inst, int a, int b) {
    const double dx = inst[a].x - inst[b].x;
    const double dy = inst[a].y - inst[b].y;
    return std::sqrt(dx * dx + dy * dy);
}

// Groups a sorted multiset into (value, count) runs.
std::vector<std::pair<int, int>> runs_of(std::span<const int> ms) {
    std::vector<std::pair<int, int>> out;
    for (int v : ms) {
        if (!out.empty() && out.back().first == v) ++out.back().second;
        else out.emplace_back(v, 1);
    }
    return out;
}

int count_of(std::span<const int> sorted, int v) {
    auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), v);
    return static_cast<int>(hi - lo);
}

// Terminals are entries first (ascending), then exit copies (ascending).
struct BlockProblem {
    std::vector<int> terminals;
    std::vector<char> is_exit;
    std::vector<int> interior;
    int entries = 0;
};

double terminal_pair_cost(const StripInstance& inst, const BlockProblem& p, int a, int b) {
    if (p.is_exit[a] && p.is_exit[b]) return kInf;
    if (p.terminals[a] == p.terminals[b]) return kInf;
    return pdist(inst, p.terminals[a], p.terminals[b]);
}

// A block together with the slots entering it from the left. Shortest-path
// tables over the interior are shared by every exit set solved against it.
class PatternSolver {
public:
    PatternSolver(const StripInstance& inst, std::span<const int> block_points,
                  std::span<const int> prev_in_block)
        : inst_(inst) {
        for (int v : block_points) {
            const int c = count_of(prev_in_block, v);
            if (c == 0) interior_.push_back(v);
            else if (c == 1) entries_.push_back(v);
        }
        std::sort(interior_.begin(), interior_.end());
        std::sort(entries_.begin(), entries_.end());
        ni_ = static_cast<int>(interior_.size());
        masks_ = std::size_t{1} << ni_;
        dii_.resize(static_cast<std::size_t>(ni_) * ni_);
        for (int u = 0; u < ni_; ++u)
            for (int v = 0; v < ni_; ++v) dii_[u * ni_ + v] = pdist(inst, interior_[u], interior_[v]);
    }

    std::size_t interior_size() const { return interior_.size(); }

    BlockProblem problem(std::span<const int> exits) const {
        BlockProblem p;
        p.terminals = entries_;
        p.is_exit.assign(entries_.size(), 0);
        p.entries = static_cast<int>(entries_.size());
        for (int v : exits) {
            p.terminals.push_back(v);
            p.is_exit.push_back(1);
        }
        p.interior = interior_;
        return p;
    }

    RepSet solve(const BlockProblem& p) {
        const int nt = static_cast<int>(p.terminals.size());
        if (nt % 2 != 0) return RepSet{nt, {}};
        if (nt == 0) {
            RepSet r{0, {}};
            if (ni_ == 0) r.entries.push_back({Matching(), 0.0, 0});
            return r;
        }
        const std::size_t full = masks_ - 1;
        std::vector<const std::vector<double>*> w(static_cast<std::size_t>(nt) * nt, nullptr);
        auto wrow = [&](int a, int b) -> const std::vector<double>& {
            auto& slot = w[a * nt + b];
            if (!slot) slot = &row(p, a, b);
            return *slot;
        };

        RepSet out{nt, {}};
        std::vector<std::pair<int, int>> chosen;
        // Pair the lowest free terminal with each other free terminal; h holds
        // the best cost of the pairs chosen so far per set of interior points.
        auto rec = [&](auto& self, std::vector<int>& free, const std::vector<double>* h) -> void {
            const int first = free.front();
            for (std::size_t i = 1; i < free.size(); ++i) {
                const int partner = free[i];
                const auto& wp = wrow(first, partner);
                chosen.emplace_back(first, partner);
                if (free.size() == 2) {
                    double best = kInf;
                    if (!h) best = wp[full];
                    else
                        for (std::size_t sub = full;; sub = (sub - 1) & full) {
                            const double c = (*h)[sub] + wp[full ^ sub];
                            if (c < best) best = c;
                            if (sub == 0) break;
                        }
                    if (best < kInf) out.entries.push_back({Matching(chosen), best, 0});
                } else {
                    std::vector<int> rest;
                    rest.reserve(free.size() - 2);
                    for (std::size_t k = 1; k < free.size(); ++k)
                        if (k != i) rest.push_back(free[k]);
                    if (!h) {
                        self(self, rest, &wp);
                    } else {
                        std::vector<double> hn(masks_, kInf);
                        for (std::size_t s = 0; s < masks_; ++s) {
                            double best = kInf;
                            for (std::size_t sub = s;; sub = (sub - 1) & s) {
                                const double c = (*h)[sub] + wp[s ^ sub];
                                if (c < best) best = c;
                                if (sub == 0) break;
                            }
                            hn[s] = best;
                        }
                        self(self, rest, &hn);
                    }
                }
                chosen.pop_back();
            }
        };
        std::vector<int> free(nt);
        std::iota(free.begin(), free.end(), 0);
        rec(rec, free, nullptr);
        return reduce(out);
    }

private:
    // g[S][v]: shortest path leaving `start`, visiting exactly S, ending at v.
    const std::vector<double>& paths_from(int start) {
        auto it = paths_.find(start);
        if (it != paths_.end()) return it->second;
        std::vector<double> g(masks_ * std::max(ni_, 1), kInf);
        for (int v = 0; v < ni_; ++v) g[(std::size_t{1} << v) * ni_ + v] = pdist(inst_, start, interior_[v]);
        for (std::size_t s = 1; s < masks_; ++s)
            for (int v = 0; v < ni_; ++v) {
                if (!(s >> v & 1)) continue;
                const double val = g[s * ni_ + v];
                if (val == kInf) continue;
                for (int u = 0; u < ni_; ++u) {
                    if (s >> u & 1) continue;
                    double& slot = g[(s | std::size_t{1} << u) * ni_ + u];
                    const double c = val + dii_[v * ni_ + u];
                    if (c < slot) slot = c;
                }
            }
        return paths_.emplace(start, std::move(g)).first->second;
    }

    // W[S]: shortest path from terminal a through exactly S to terminal b.
    const std::vector<double>& row(const BlockProblem& p, int a, int b) {
        int pa = p.terminals[a], pb = p.terminals[b];
        // Entry tables are reused by every exit set, so start from an entry.
        if (p.is_exit[a] && !p.is_exit[b]) std::swap(pa, pb);
        const auto key = std::make_pair(pa, pb);
        auto it = rows_.find(key);
        if (it != rows_.end()) return it->second;
        std::vector<double> r(masks_, kInf);
        r[0] = terminal_pair_cost(inst_, p, a, b);
        if (ni_ > 0) {
            const auto& g = paths_from(pa);
            std::vector<double> to_b(ni_);
            for (int v = 0; v < ni_; ++v) to_b[v] = pdist(inst_, interior_[v], pb);
            for (std::size_t s = 1; s < masks_; ++s) {
                double best = kInf;
                for (int v = 0; v < ni_; ++v)
                    if (s >> v & 1) best = std::min(best, g[s * ni_ + v] + to_b[v]);
                r[s] = best;
            }
        }
        return rows_.emplace(key, std::move(r)).first->second;
    }

    const StripInstance& inst_;
    std::vector<int> interior_, entries_;
    int ni_ = 0;
    std::size_t masks_ = 1;
    std::vector<double> dii_;
    std::map<int, std::vector<double>> paths_;
    std::map<std::pair<int, int>, std::vector<double>> rows_;
};

// Explicit paths for one block matching, via the exact oracle.
std::vector<std::vector<int>> block_paths(const StripInstance& inst, const BlockProblem& p,
                                          const Matching& m) {
    const int nt = static_cast<int>(p.terminals.size());
    const int ni = static_cast<int>(p.interior.size());
    const int nodes = nt + ni;
    auto point_of = [&](int v) { return v < nt ? p.terminals[v] : p.interior[v - nt]; };
    std::vector<std::vector<double>> cost(nodes, std::vector<double>(nodes, kInf));
    for (int a = 0; a < nodes; ++a)
        for (int b = 0; b < nodes; ++b) {
            if (a == b) continue;
            if (a < nt && b < nt) cost[a][b] = terminal_pair_cost(inst, p, a, b);
            else cost[a][b] = pdist(inst, point_of(a), point_of(b));
        }
    std::vector<int> interior(ni);
    std::iota(interior.begin(), interior.end(), nt);
    BoundaryMatching bm{m.pairs};
    auto sol = exact_path_cover(cost, interior, bm);
    if (sol.length == kInf) throw ContractViolation("block matching has no realization");
    for (auto& path : sol.paths)
        for (int& v : path) v = point_of(v);
    return sol.paths;
}

}  // namespace

std::vector<long> SquareGrid::nonempty() const {
    std::vector<long> out;
    out.reserve(occupancy.size());
    for (const auto& [i, pts] : occupancy) out.push_back(i);
    return out;
}

long square_of(double x, double delta) {
    return static_cast<long>(std::ceil(x / delta));
}

SquareGrid build_grid(const StripInstance& inst) {
    SquareGrid g;
    g.delta = inst.delta();
    for (std::size_t i = 0; i < inst.size(); ++i)
        g.occupancy[square_of(inst[i].x, g.delta)].push_back(static_cast<int>(i));
    for (const auto& [sq, pts] : g.occupancy) g.k = std::max(g.k, static_cast<int>(pts.size()));
    return g;
}

BlockDecomposition place_separators(const SquareGrid& grid, const StripInstance& inst) {
    BlockDecomposition d;
    const auto squares = grid.nonempty();
    if (squares.empty()) return d;
    const double delta = grid.delta;
    d.left_sentinel = static_cast<double>(squares.front() - 1) * delta;
    d.right_sentinel = static_cast<double>(squares.back()) * delta;
    const double xmin = inst[0].x;
    const double xmax = inst[inst.size() - 1].x;

    auto points_in = [&](long sq) -> const std::vector<int>* {
        auto it = grid.occupancy.find(sq);
        return it == grid.occupancy.end() ? nullptr : &it->second;
    };

    for (std::size_t r = 1; r < squares.size(); r += 2) {
        const long i = squares[r];
        const double lo = static_cast<double>(i - 1) * delta;
        const double hi = static_cast<double>(i) * delta;
        std::vector<double> xs;
        for (long sq = i - 1; sq <= i + 1; ++sq)
            if (auto pts = points_in(sq))
                for (int v : *pts) xs.push_back(inst[v].x);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

        std::vector<double> lines;
        for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
            const double mid = xs[a] + (xs[a + 1] - xs[a]) / 2.0;
            if (mid > lo && mid <= hi) lines.push_back(mid);
        }
        if (!std::binary_search(xs.begin(), xs.end(), hi)) lines.push_back(hi);
        // With every point of the square sitting on its right side there is
        // no midpoint inside; fall back to midpoints against the square's sides.
        bool any_valid = false;
        for (double line : lines)
            if (line > xmin && line < xmax && (d.separators.empty() || line > d.separators.back().x_line))
                any_valid = true;
        if (!any_valid) {
            std::vector<double> inside{lo, hi};
            for (double x : xs)
                if (x > lo && x < hi) inside.push_back(x);
            std::sort(inside.begin(), inside.end());
            for (std::size_t a = 0; a + 1 < inside.size(); ++a) {
                const double mid = inside[a] + (inside[a + 1] - inside[a]) / 2.0;
                if (!std::binary_search(xs.begin(), xs.end(), mid)) lines.push_back(mid);
            }
        }
        std::sort(lines.begin(), lines.end());

        double best_line = 0.0;
        long best_score = -1;
        for (double line : lines) {
            if (!(line > xmin && line < xmax)) continue;
            if (!d.separators.empty() && !(line > d.separators.back().x_line)) continue;
            // Pairs within distance delta that the line would split.
            long score = 0;
            for (std::size_t a = 0; a < inst.size(); ++a) {
                if (inst[a].x >= line || inst[a].x < line - delta) continue;
                for (std::size_t b = a + 1; b < inst.size(); ++b) {
                    if (inst[b].x > line + delta) break;
                    if (inst[b].x > line && inst.dist(a, b) <= delta) ++score;
                }
            }
            if (best_score < 0 || score < best_score) {
                best_score = score;
                best_line = line;
            }
        }
        if (best_score >= 0) d.separators.push_back({best_line, i});
    }

    d.blocks.assign(d.separators.size() + 1, {});
    for (std::size_t v = 0; v < inst.size(); ++v) {
        std::size_t j = 0;
        while (j < d.separators.size() && inst[v].x > d.separators[j].x_line) ++j;
        d.blocks[j].push_back(static_cast<int>(v));
    }
    return d;
}

std::vector<CandidateEndpointSet> enumerate_candidates(const BlockDecomposition& decomp,
                                                       const SquareGrid& grid, int j,
                                                       const StripInstance& inst,
                                                       const StripDpOptions& opts) {
    const int t = decomp.t();
    if (j < 1 || j > t) return {CandidateEndpointSet{}};
    const double line = decomp.separators[j - 1].x_line;
    const double near_end = static_cast<double>(decomp.separators[j - 1].square + 1) * grid.delta;
    const double far_line = j + 3 <= t ? decomp.separators[j + 2].x_line : kInf;

    std::vector<int> zone1, zone2, zone3;
    int rank = 0;
    for (std::size_t v = 0; v < inst.size(); ++v) {
        const double x = inst[v].x;
        if (x <= line) continue;
        if (x > far_line) zone3.push_back(static_cast<int>(v));
        else if (rank >= opts.reach) continue;
        else if (x <= near_end) zone1.push_back(static_cast<int>(v));
        else zone2.push_back(static_cast<int>(v));
        ++rank;
    }
    const int near_cap = std::min(
        opts.max_cross, static_cast<int>(std::floor(opts.c1 * std::sqrt(double(grid.k)) + 1e-9)));
    const int mid_cap = std::min(opts.max_cross, opts.cstar);

    std::vector<CandidateEndpointSet> out;
    std::vector<int> cur;
    auto emit = [&]() {
        const int s = static_cast<int>(cur.size());
        if (s % 2 == 0) {
            if (s >= 2) out.push_back({cur, std::nullopt});
        } else if (s + 1 <= std::min(opts.max_cross, opts.max_cross_distant)) {
            for (int d : zone3) {
                CandidateEndpointSet c{cur, d};
                c.points.push_back(d);
                std::sort(c.points.begin(), c.points.end());
                out.push_back(std::move(c));
            }
        }
    };
    // Choose multiplicities 0..2 for each zone-1 point, then each zone-2 point.
    auto pick2 = [&](auto& self, std::size_t idx, int used) -> void {
        if (idx == zone2.size()) {
            emit();
            return;
        }
        for (int m = 0; m <= 2; ++m) {
            if (used + m > mid_cap || static_cast<int>(cur.size()) + m > opts.max_cross) break;
            for (int r = 0; r < m; ++r) cur.push_back(zone2[idx]);
            self(self, idx + 1, used + m);
            for (int r = 0; r < m; ++r) cur.pop_back();
        }
    };
    auto pick1 = [&](auto& self, std::size_t idx, int used) -> void {
        if (idx == zone1.size()) {
            pick2(pick2, 0, 0);
            return;
        }
        for (int m = 0; m <= 2; ++m) {
            if (used + m > near_cap) break;
            for (int r = 0; r < m; ++r) cur.push_back(zone1[idx]);
            self(self, idx + 1, used + m);
            for (int r = 0; r < m; ++r) cur.pop_back();
        }
    };
    pick1(pick1, 0, 0);
    return out;
}

std::vector<int> endpoint_configuration(const StripInstance& inst, std::span<const Edge> edges,
                                        double x_line) {
    std::vector<int> out;
    for (const Edge& e : edges) {
        const double xa = inst.at(e.from).x, xb = inst.at(e.to).x;
        if (xa == x_line || xb == x_line)
            throw DegenerateSeparatorError("separator passes through an edge endpoint");
        if ((xa < x_line) == (xb < x_line)) continue;
        out.push_back(xa > x_line ? e.from : e.to);
    }
    std::sort(out.begin(), out.end());
    return out;
}

BlockSolution block_repset(const StripInstance& inst, std::span<const int> block_points,
                           std::span<const int> b_prev, std::span<const int> b_cur,
                           std::size_t cap) {
    std::vector<int> block(block_points.begin(), block_points.end());
    std::sort(block.begin(), block.end());
    std::vector<int> prev(b_prev.begin(), b_prev.end()), cur(b_cur.begin(), b_cur.end());
    std::sort(prev.begin(), prev.end());
    std::sort(cur.begin(), cur.end());
    for (int v : block) inst.at(v);
    for (int v : prev) inst.at(v);
    for (int v : cur) inst.at(v);

    std::vector<int> prev_in_block, exits;
    for (auto [v, c] : runs_of(prev)) {
        if (std::binary_search(block.begin(), block.end(), v)) {
            if (c > 2) throw PreconditionError("a slot point appears more than twice");
            for (int r = 0; r < c; ++r) prev_in_block.push_back(v);
        } else if (count_of(cur, v) < c) {
            throw PreconditionError("slot right of the block does not continue");
        }
    }
    for (auto [v, c] : runs_of(cur)) {
        if (std::binary_search(block.begin(), block.end(), v))
            throw PreconditionError("right boundary slot inside the block");
        const int passing = count_of(prev, v);
        for (int r = passing; r < c; ++r) exits.push_back(v);
    }
    const std::size_t nodes = block.size() + exits.size();
    if (nodes > cap)
        throw SizeError("block holds " + std::to_string(nodes) + " nodes, cap is " +
                        std::to_string(cap) + "; raise --block-cap");
    PatternSolver solver(inst, block, prev_in_block);
    const BlockProblem p = solver.problem(exits);
    BlockSolution sol;
    sol.repset = solver.solve(p);
    sol.terminals = p.terminals;
    sol.interior = p.interior;
    return sol;
}

namespace {

struct Record {
    int prev_state = -1;
    int prev_entry = -1;
    int block = -1;
    int block_entry = -1;
};

struct DpState {
    std::vector<int> key;
    RepSet table;
    std::vector<Record> records;  // indexed by entry tag
};

struct CachedBlock {
    BlockProblem problem;
    RepSet repset;
};

// Sub-multisets of a sorted multiset, emitted in sorted form.
void for_each_submultiset(std::span<const int> ms,
                          const std::function<void(const std::vector<int>&)>& fn) {
    auto runs = runs_of(ms);
    std::vector<int> cur;
    auto rec = [&](auto& self, std::size_t idx) -> void {
        if (idx == runs.size()) {
            fn(cur);
            return;
        }
        for (int c = 0; c <= runs[idx].second; ++c) {
            for (int r = 0; r < c; ++r) cur.push_back(runs[idx].first);
            self(self, idx + 1);
            for (int r = 0; r < c; ++r) cur.pop_back();
        }
    };
    rec(rec, 0);
}

std::vector<int> cycle_order(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::array<int, 2>> adj(n, {-1, -1});
    for (auto [a, b] : edges) {
        for (int v : {a, b})
            if (adj[v][1] != -1) throw ContractViolation("reconstructed tour has a vertex of degree > 2");
        adj[a][adj[a][0] == -1 ? 0 : 1] = b;
        adj[b][adj[b][0] == -1 ? 0 : 1] = a;
    }
    std::vector<int> order{0};
    int prev = -1, cur = 0;
    while (order.size() < n) {
        const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
        if (next < 0 || next == 0) break;
        order.push_back(next);
        prev = cur;
        cur = next;
    }
    if (order.size() != n) throw ContractViolation("reconstructed edges are not a Hamiltonian cycle");
    return order;
}

}  // namespace

StripDpResult narrow_rect_tsp(const StripInstance& inst, const StripDpOptions& opts,
                              const StripDpObserver& observer) {
    const std::size_t n = inst.size();
    if (n < 3) throw SizeError("narrow_rect_tsp needs at least 3 points");
    const SquareGrid grid = build_grid(inst);
    const BlockDecomposition decomp = place_separators(grid, inst);
    const int t = decomp.t();

    StripDpResult result;
    result.stats.t = t;
    result.stats.k = grid.k;

    if (t == 0) {
        if (n > opts.block_cap || n > kHeldKarpMaxPoints)
            throw SizeError("single block of " + std::to_string(n) + " points exceeds the cap; raise --block-cap");
        auto hk = held_karp(inst);
        result.tour = hk.tour;
        result.length = hk.length;
        result.stats.block_solves = 1;
        return result;
    }

    std::vector<double> lines(t + 2);
    lines[0] = decomp.left_sentinel;
    for (int j = 1; j <= t; ++j) lines[j] = decomp.separators[j - 1].x_line;
    lines[t + 1] = kInf;

    std::vector<std::vector<DpState>> layers(t + 2);
    std::vector<std::vector<CachedBlock>> blocks(t + 2);
    {
        DpState s0;
        s0.table = RepSet{0, {{Matching(), 0.0, 0}}};
        s0.records.push_back({});
        layers[0].push_back(std::move(s0));
    }

    for (int j = 1; j <= t + 1; ++j) {
        const auto& block_points = decomp.blocks[j - 1];
        const double line = lines[j];
        const auto& prev_layer = layers[j - 1];
        const auto family = enumerate_candidates(decomp, grid, j, inst, opts);
        const bool last = j == t + 1;

        // Split every previous key into its slots inside block j (the
        // pattern) and the slots passing over the block.
        std::map<std::vector<int>, std::vector<int>> by_pattern;
        std::vector<std::vector<int>> beyond_of(prev_layer.size());
        std::set<std::vector<int>> beyond_parts;
        for (std::size_t s = 0; s < prev_layer.size(); ++s) {
            std::vector<int> inside;
            for (int v : prev_layer[s].key) (inst[v].x < line ? inside : beyond_of[s]).push_back(v);
            by_pattern[inside].push_back(static_cast<int>(s));
            beyond_parts.insert(beyond_of[s]);
        }
        std::map<std::vector<int>, std::vector<int>> containing;
        for (std::size_t c = 0; c < family.size(); ++c)
            for_each_submultiset(family[c].points, [&](const std::vector<int>& sub) {
                if (beyond_parts.count(sub)) containing[sub].push_back(static_cast<int>(c));
            });

        std::vector<std::vector<WeightedMatching>> pending(family.size());
        std::vector<std::vector<Record>> pending_records(family.size());
        auto shrink = [&](std::size_t c) {
            RepSet r = reduce(RepSet{static_cast<int>(family[c].points.size()), std::move(pending[c])});
            std::vector<Record> kept;
            kept.reserve(r.entries.size());
            for (auto& e : r.entries) {
                kept.push_back(pending_records[c][e.tag]);
                e.tag = kept.size() - 1;
            }
            pending[c] = std::move(r.entries);
            pending_records[c] = std::move(kept);
        };

        for (const auto& [pattern, states] : by_pattern) {
            if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline)
                throw DeadlineExceeded("strip DP stopped at separator " + std::to_string(j) + " of " +
                                       std::to_string(t));
            PatternSolver solver(inst, block_points, pattern);
            std::map<std::vector<int>, int> solved;
            for (int sp : states) {
                auto hit = containing.find(beyond_of[sp]);
                if (hit == containing.end()) continue;
                const DpState& ps = prev_layer[sp];
                const std::vector<int>& passing = beyond_of[sp];
                for (int ci : hit->second) {
                    const std::vector<int>& bkey = family[ci].points;
                    std::vector<int> exits;
                    std::set_difference(bkey.begin(), bkey.end(), passing.begin(), passing.end(),
                                        std::back_inserter(exits));
                    int bid;
                    if (auto it = solved.find(exits); it != solved.end()) {
                        bid = it->second;
                    } else {
                        if (block_points.size() + exits.size() > opts.block_cap)
                            throw SizeError("block " + std::to_string(j) + " holds " +
                                            std::to_string(block_points.size() + exits.size()) +
                                            " nodes, cap is " + std::to_string(opts.block_cap) +
                                            "; raise --block-cap");
                        CachedBlock cb{solver.problem(exits), {}};
                        cb.repset = solver.solve(cb.problem);
                        ++result.stats.block_solves;
                        bid = static_cast<int>(blocks[j].size());
                        blocks[j].push_back(std::move(cb));
                        solved.emplace(exits, bid);
                    }
                    const CachedBlock& cb = blocks[j][bid];
                    if (cb.repset.entries.empty()) continue;

                    // Node layout: prev slots | block terminals | current slots.
                    const int m = static_cast<int>(bkey.size());
                    const int mp = static_cast<int>(ps.key.size());
                    const int nt = static_cast<int>(cb.problem.terminals.size());
                    const int base_t = mp, base_b = mp + nt;
                    const int total = mp + nt + m;
                    std::vector<int> ident(total, -1);
                    auto link = [&](int a, int b) {
                        ident[a] = b;
                        ident[b] = a;
                    };
                    auto first_in_b = [&](int v) {
                        return static_cast<int>(std::lower_bound(bkey.begin(), bkey.end(), v) - bkey.begin());
                    };
                    for (int a = 0; a < mp;) {
                        const int v = ps.key[a];
                        int r = 1;
                        while (a + r < mp && ps.key[a + r] == v) ++r;
                        if (inst[v].x < line) {
                            if (r == 2) {
                                link(a, a + 1);
                            } else {
                                const auto& term = cb.problem.terminals;
                                const int e = static_cast<int>(
                                    std::lower_bound(term.begin(), term.begin() + cb.problem.entries, v) -
                                    term.begin());
                                link(a, base_t + e);
                            }
                        } else {
                            const int b0 = first_in_b(v);
                            for (int q = 0; q < r; ++q) link(a + q, base_b + b0 + q);
                        }
                        a += r;
                    }
                    for (int a = cb.problem.entries; a < nt;) {
                        const int v = cb.problem.terminals[a];
                        int r = 1;
                        while (a + r < nt && cb.problem.terminals[a + r] == v) ++r;
                        const int b0 = first_in_b(v) + count_of(passing, v);
                        for (int q = 0; q < r; ++q) link(base_t + a + q, base_b + b0 + q);
                        a += r;
                    }

                    auto& out = pending[ci];
                    auto& out_records = pending_records[ci];
                    std::vector<int> mate(total, -1);
                    std::vector<char> seen(m, 0);
                    for (std::size_t ei = 0; ei < ps.table.entries.size(); ++ei) {
                        const auto& pe = ps.table.entries[ei];
                        for (auto [a, b] : pe.matching.pairs) {
                            mate[a] = b;
                            mate[b] = a;
                        }
                        for (std::size_t bi = 0; bi < cb.repset.entries.size(); ++bi) {
                            const auto& be = cb.repset.entries[bi];
                            for (auto [a, b] : be.matching.pairs) {
                                mate[base_t + a] = base_t + b;
                                mate[base_t + b] = base_t + a;
                            }
                            ++result.stats.joins;
                            std::vector<std::pair<int, int>> pairs;
                            int visited = 0;
                            if (!last) {
                                std::fill(seen.begin(), seen.end(), 0);
                                for (int b = 0; b < m; ++b) {
                                    if (seen[b]) continue;
                                    int cur = base_b + b;
                                    ++visited;
                                    for (;;) {
                                        const int x = ident[cur];
                                        ++visited;
                                        if (x >= base_b) {
                                            seen[x - base_b] = 1;
                                            pairs.emplace_back(b, x - base_b);
                                            break;
                                        }
                                        cur = mate[x];
                                        ++visited;
                                    }
                                }
                            } else {
                                // Every node has degree 2: accept one cycle through everything.
                                int cur = 0;
                                do {
                                    cur = ident[mate[cur]];
                                    visited += 2;
                                } while (cur != 0 && visited <= total);
                            }
                            // A node left unvisited sits on a closed cycle.
                            if (visited != total) continue;
                            out_records.push_back({sp, static_cast<int>(pe.tag), bid, static_cast<int>(bi)});
                            out.push_back({Matching(std::move(pairs)), pe.weight + be.weight,
                                           out_records.size() - 1});
                        }
                    }
                    if (out.size() > 64 + (std::size_t{2} << m)) shrink(ci);
                }
            }
        }

        for (std::size_t c = 0; c < family.size(); ++c) {
            if (pending[c].empty()) continue;
            shrink(c);
            DpState st;
            st.key = family[c].points;
            st.table = RepSet{static_cast<int>(st.key.size()), std::move(pending[c])};
            st.records = std::move(pending_records[c]);
            if (observer && !last) observer(j, st.key, st.table);
            layers[j].push_back(std::move(st));
        }
        result.stats.states += layers[j].size();
        if (layers[j].empty())
            throw ContractViolation("no candidate configuration at separator " + std::to_string(j) +
                                    " admits a tour; the candidate family is too narrow");

        // Keep only the block solutions that surviving entries point at.
        std::vector<int> remap(blocks[j].size(), -1);
        std::vector<CachedBlock> kept;
        for (auto& st : layers[j])
            for (auto& rec : st.records) {
                int& slot = remap[rec.block];
                if (slot < 0) {
                    slot = static_cast<int>(kept.size());
                    kept.push_back(std::move(blocks[j][rec.block]));
                }
                rec.block = slot;
            }
        blocks[j] = std::move(kept);
    }

    const DpState& final_state = layers[t + 1].front();
    const auto& best = final_state.table.entries.front();
    result.length = best.weight;

    std::vector<std::pair<int, int>> edges;
    Record rec = final_state.records[best.tag];
    for (int j = t + 1; j >= 1; --j) {
        const CachedBlock& cb = blocks[j][rec.block];
        const Matching& bm = cb.repset.entries[rec.block_entry].matching;
        for (const auto& path : block_paths(inst, cb.problem, bm))
            for (std::size_t i = 0; i + 1 < path.size(); ++i) edges.emplace_back(path[i], path[i + 1]);
        rec = layers[j - 1][rec.prev_state].records[rec.prev_entry];
    }
    if (edges.size() != n) throw ContractViolation("reconstruction produced the wrong edge count");
    result.tour = Tour(cycle_order(n, edges));
    return result;
}

}  // namespace striptsp
