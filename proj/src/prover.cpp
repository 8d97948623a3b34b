#include "striptsp/prover.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "striptsp/errors.h"

namespace striptsp {

namespace {

bool is_integer(double v) { return std::floor(v) == v; }

int column(double x) { return static_cast<int>(std::lround(x)); }

// Point on the line through a and b at abscissa x.
Point at_x(const Point& a, const Point& b, double x) {
    const double t = (x - a.x) / (b.x - a.x);
    return {x, a.y + t * (b.y - a.y)};
}

bool straddles(const Point& a, const Point& b, double x_line) {
    return (a.x < x_line && b.x > x_line) || (b.x < x_line && a.x > x_line);
}

}  // namespace

// ---- consolidation ----------------------------------------------------------

double Consolidation::total_displacement() const {
    double s = 0.0;
    for (const auto& m : log) s += m.distance;
    return s;
}

double Consolidation::length_before() const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += distance(original[i], original[4 + i]);
    return s;
}

double Consolidation::length_after() const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += distance(copies[i], copies[4 + i]);
    return s;
}

int Consolidation::crossings_before(double x_line) const {
    int c = 0;
    for (int i = 0; i < 4; ++i) c += straddles(original[i], original[4 + i], x_line);
    return c;
}

int Consolidation::crossings_after(double x_line) const {
    int c = 0;
    for (int i = 0; i < 4; ++i) c += straddles(copies[i], copies[4 + i], x_line);
    return c;
}

int Consolidation::moved_across(double x_line) const {
    int c = 0;
    for (int i = 0; i < kCopies; ++i) c += straddles(original[i], copies[i], x_line);
    return c;
}

Consolidation consolidate_endpoints(std::span<const Edge> edges_F, const Separator& s_star,
                                    const StripInstance& inst) {
    for (const auto& p : inst.points())
        if (!is_integer(p.x)) throw PreconditionError("consolidation needs integer x-coordinates");
    if (!is_integer(s_star.x_line - 0.5)) throw PreconditionError("s* must lie at a half-integer");
    if (edges_F.size() != 4) throw PreconditionError("consolidation needs exactly four edges");

    Consolidation out;
    out.x_star = static_cast<int>(std::floor(s_star.x_line));
    out.edges.assign(edges_F.begin(), edges_F.end());
    out.original.resize(kCopies);
    int min_right = 0;
    for (int i = 0; i < 4; ++i) {
        const Edge& e = edges_F[i];
        if (e.from < 0 || e.to < 0 || static_cast<std::size_t>(std::max(e.from, e.to)) >= inst.size())
            throw IndexError("edge endpoint out of range");
        Point a = inst[e.from], b = inst[e.to];
        if (!straddles(a, b, s_star.x_line)) throw PreconditionError("an edge of F does not cross s*");
        if (a.x > b.x) std::swap(a, b);
        out.original[i] = a;
        out.original[4 + i] = b;
        min_right = i == 0 ? column(b.x) : std::min(min_right, column(b.x));
    }
    if (min_right != out.x_star + 1)
        throw PreconditionError("s* is not the rightmost line crossing all four edges");

    out.copies = out.original;
    auto move = [&](int copy, double x) {
        const int edge = copy % 4;
        const Point to = at_x(out.original[edge], out.original[4 + edge], x);
        out.log.push_back({copy, out.copies[copy], to, distance(out.copies[copy], to)});
        out.copies[copy] = to;
    };

    // Left side: fill the free column nearest to s*, pulling along an edge
    // that still crosses it.
    for (;;) {
        std::set<int> used;
        for (int i = 0; i < 4; ++i) used.insert(column(out.copies[i].x));
        int z = out.x_star;
        while (used.count(z)) --z;
        int pick = -1;
        for (int i = 0; i < 4 && pick < 0; ++i)
            if (out.copies[i].x < z) pick = i;
        if (pick < 0) break;
        move(pick, z);
    }
    for (;;) {
        std::set<int> used;
        for (int i = 4; i < kCopies; ++i) used.insert(column(out.copies[i].x));
        int z = out.x_star + 1;
        while (used.count(z)) ++z;
        int pick = -1;
        for (int i = 4; i < kCopies && pick < 0; ++i)
            if (out.copies[i].x > z) pick = i;
        if (pick < 0) break;
        move(pick, z);
    }

    auto distinct = [&](int from, int to) {
        std::vector<std::pair<double, double>> loc;
        for (int i = from; i < to; ++i) loc.emplace_back(out.copies[i].x, out.copies[i].y);
        std::sort(loc.begin(), loc.end());
        return static_cast<int>(std::unique(loc.begin(), loc.end()) - loc.begin());
    };
    out.n_left = distinct(0, 4);
    out.n_right = distinct(4, kCopies);
    return out;
}

Matching connectivity_pattern(const Tour& tour, std::span<const Edge> f) {
    const auto& o = tour.order();
    const int n = static_cast<int>(o.size());
    const int k = static_cast<int>(f.size());
    // Position of each f-edge along the cycle.
    std::vector<std::pair<int, int>> hits;  // (position, edge id)
    for (int p = 0; p < n; ++p) {
        const int a = o[p], b = o[(p + 1) % n];
        for (int i = 0; i < k; ++i)
            if ((f[i].from == a && f[i].to == b) || (f[i].from == b && f[i].to == a)) {
                hits.emplace_back(p, i);
                break;
            }
    }
    if (static_cast<int>(hits.size()) != k) throw PreconditionError("edge of F is not a tour edge");
    auto copy = [&](int edge, int v) { return v == std::min(f[edge].from, f[edge].to) ? edge : k + edge; };
    std::vector<std::pair<int, int>> pairs;
    for (int h = 0; h < k; ++h) {
        const auto [pa, a] = hits[h];
        const auto [pb, b] = hits[(h + 1) % k];
        pairs.emplace_back(copy(a, o[(pa + 1) % n]), copy(b, o[pb]));
    }
    return Matching(std::move(pairs));
}

std::vector<Matching> generate_replacements(const Matching& pattern, int endpoints) {
    if (!is_perfect_on(pattern, endpoints)) throw PreconditionError("pattern is not perfect on the endpoints");
    std::vector<Matching> out;
    for (auto& m : all_perfect_matchings(endpoints))
        if (fits(pattern, m)) out.push_back(std::move(m));
    return out;
}

// ---- bounds -------------------------------------------------------------------

LengthBounds interval_edge_bounds(double p_x, YRange p_y, double q_x, YRange q_y) {
    const double dx = std::abs(p_x - q_x);
    double gap = 0.0;
    if (p_y.hi < q_y.lo)
        gap = q_y.lo - p_y.hi;
    else if (q_y.hi < p_y.lo)
        gap = p_y.lo - q_y.hi;
    const double far = std::max(std::abs(q_y.hi - p_y.lo), std::abs(p_y.hi - q_y.lo));
    return {std::sqrt(dx * dx + gap * gap), std::sqrt(dx * dx + far * far)};
}

int ProverCase::point_of(int copy) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int c : points[i].copies)
            if (c == copy) return static_cast<int>(i);
    throw IndexError("copy label without a point");
}

// ---- case data ------------------------------------------------------------------

std::vector<ProverCase> generate_case_definitions() {
    // Edges 0,1 end at the shared point right of s*; the pattern joins the
    // left copies of edges 0 and 2, and of 1 and 3 (the other left pairing
    // is the same case with edges 2 and 3 renamed; pairing 0 with 1 closes
    // a short cycle).
    const Matching f_bar({{0, 4}, {1, 5}, {2, 6}, {3, 7}});
    const Matching pattern({{0, 2}, {1, 3}, {4, 5}, {6, 7}});

    std::vector<ProverCase> out;
    for (int n_right : {2, 3})
        for (int n_left : {2, 3, 4}) {
            ProverCase c;
            c.n_left = n_left;
            c.n_right = n_right;
            c.f_bar = f_bar;
            c.pattern = pattern;
            std::vector<std::vector<int>> left;
            if (n_left == 2) left = {{0, 2}, {1, 3}};
            if (n_left == 3) left = {{0, 2}, {1}, {3}};
            if (n_left == 4) left = {{0}, {1}, {2}, {3}};
            std::vector<int> cols(n_left);
            std::iota(cols.begin(), cols.end(), -n_left);
            for (auto& copies : left) {
                std::string name = "L";
                for (int cp : copies) name += std::to_string(cp);
                c.points.push_back({name, copies, cols});
            }
            c.points.push_back({"R45", {4, 5}, {0}});
            if (n_right == 2)
                c.points.push_back({"R67", {6, 7}, {1}});
            else {
                c.points.push_back({"R6", {6}, {1, 2}});
                c.points.push_back({"R7", {7}, {1, 2}});
            }
            out.push_back(std::move(c));
        }
    return out;
}

namespace {

using nlohmann::json;

json pairs_json(const Matching& m) {
    json a = json::array();
    for (auto [u, v] : m.pairs) a.push_back({u, v});
    return a;
}

Matching pairs_from(const json& a) {
    std::vector<std::pair<int, int>> p;
    for (const auto& e : a) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("pair entries must be [a, b]");
        p.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Matching(std::move(p));
}

void validate_case(const ProverCase& c) {
    if (!is_perfect_on(c.f_bar, kCopies) || !is_perfect_on(c.pattern, kCopies))
        throw ConfigError("f_bar and pattern must be perfect on the eight copies");
    if (!fits(c.pattern, c.f_bar)) throw ConfigError("pattern and f_bar do not form one cycle");
    std::vector<int> owner(kCopies, -1);
    int left = 0, right = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& p = c.points[i];
        if (p.copies.empty() || p.copies.size() > 2 || p.allowed_x.empty())
            throw ConfigError("point " + p.name + " needs one or two copies and allowed columns");
        for (int cp : p.copies) {
            if (cp < 0 || cp >= kCopies || owner[cp] >= 0) throw ConfigError("copies must partition 0..7");
            owner[cp] = static_cast<int>(i);
        }
        const bool is_left = p.copies.front() < 4;
        for (int cp : p.copies)
            if ((cp < 4) != is_left) throw ConfigError("point " + p.name + " spans both sides");
        for (int x : p.allowed_x)
            if ((x < 0) != is_left) throw ConfigError("point " + p.name + " has a column on the wrong side");
        if (p.copies.size() == 2 &&
            std::find(c.pattern.pairs.begin(), c.pattern.pairs.end(),
                      std::pair{std::min(p.copies[0], p.copies[1]), std::max(p.copies[0], p.copies[1])}) ==
                c.pattern.pairs.end())
            throw ConfigError("copies of point " + p.name + " must be joined by the pattern");
        (is_left ? left : right) += 1;
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end()) throw ConfigError("a copy has no point");
    if (left != c.n_left || right != c.n_right) throw ConfigError("point counts disagree with the case");
}

}  // namespace

std::vector<ProverCase> parse_cases(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("case file: ") + e.what());
    }
    std::vector<ProverCase> out;
    try {
        for (const auto& jc : doc.at("cases")) {
            ProverCase c;
            c.n_left = jc.at("n_left").get<int>();
            c.n_right = jc.at("n_right").get<int>();
            for (const auto& jp : jc.at("points"))
                c.points.push_back({jp.at("name").get<std::string>(), jp.at("copies").get<std::vector<int>>(),
                                    jp.at("x").get<std::vector<int>>()});
            c.f_bar = pairs_from(jc.at("f_bar"));
            c.pattern = pairs_from(jc.at("pattern"));
            validate_case(c);
            out.push_back(std::move(c));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("case file: ") + e.what());
    }
    return out;
}

std::string cases_to_json(const std::vector<ProverCase>& cases) {
    json doc;
    doc["comment"] =
        "Copies 0-3 are the left ends of the four crossing edges, 4-7 their right ends "
        "(edge i joins i and 4+i). Columns are relative to the separator at x = -1/2.";
    doc["cases"] = json::array();
    for (const auto& c : cases) {
        json jc;
        jc["n_left"] = c.n_left;
        jc["n_right"] = c.n_right;
        jc["points"] = json::array();
        for (const auto& p : c.points) jc["points"].push_back({{"name", p.name}, {"copies", p.copies}, {"x", p.allowed_x}});
        jc["f_bar"] = pairs_json(c.f_bar);
        jc["pattern"] = pairs_json(c.pattern);
        doc["cases"].push_back(std::move(jc));
    }
    return doc.dump(2) + "\n";
}

std::vector<ProverCase> load_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open case file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_cases(ss.str());
}

const ProverCase& find_case(const std::vector<ProverCase>& cases, int n_left, int n_right) {
    if (n_left < 2 || n_left > 4 || n_right < 2 || n_right > 3)
        throw PreconditionError("no case (" + std::to_string(n_left) + ", " + std::to_string(n_right) + ")");
    for (const auto& c : cases)
        if (c.n_left == n_left && c.n_right == n_right) return c;
    throw PreconditionError("case file lacks (" + std::to_string(n_left) + ", " + std::to_string(n_right) + ")");
}

std::vector<std::vector<int>> x_assignments(const ProverCase& c) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == c.points.size()) {
            out.push_back(cur);
            return;
        }
        for (int x : c.points[i].allowed_x) {
            if (std::find(cur.begin(), cur.end(), x) != cur.end()) continue;
            cur.push_back(x);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// ---- subdivision prover -----------------------------------------------------------

LengthBounds matching_bounds(const ProverCase& c, const Scenario& s, const Matching& m) {
    LengthBounds b;
    for (auto [u, v] : m.pairs) {
        const int p = c.point_of(u), q = c.point_of(v);
        if (p == q) continue;
        const auto e = interval_edge_bounds(s.x[p], s.y[p], s.x[q], s.y[q]);
        b.lower += e.lower;
        b.upper += e.upper;
    }
    return b;
}

namespace {

struct Search {
    const ProverCase& c;
    const ProverOptions& opts;
    std::vector<Matching> candidates;
    // Edges as point pairs, shared by f_bar and all candidates.
    std::vector<std::vector<std::pair<int, int>>> cand_edges;
    std::vector<std::pair<int, int>> f_edges;

    std::vector<std::pair<int, int>> point_edges(const Matching& m) const {
        std::vector<std::pair<int, int>> e;
        for (auto [u, v] : m.pairs) e.emplace_back(c.point_of(u), c.point_of(v));
        return e;
    }

    Search(const ProverCase& cs, const ProverOptions& o) : c(cs), opts(o) {
        for (auto& m : generate_replacements(c.pattern, kCopies)) {
            if (m == c.f_bar) continue;
            auto e = point_edges(m);
            if (std::any_of(e.begin(), e.end(), [](auto pq) { return pq.first == pq.second; })) continue;
            cand_edges.push_back(std::move(e));
            candidates.push_back(std::move(m));
        }
        f_edges = point_edges(c.f_bar);
    }

    void run(Scenario& s, int depth, std::vector<ProofOutcome>& out) const {
        const int m = static_cast<int>(s.x.size());
        LengthBounds table[8][8];
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) table[p][q] = table[q][p] = interval_edge_bounds(s.x[p], s.y[p], s.x[q], s.y[q]);
        double f_lower = 0.0;
        for (auto [p, q] : f_edges) f_lower += table[p][q].lower;
        double best = INFINITY;
        int best_i = -1;
        for (std::size_t i = 0; i < cand_edges.size(); ++i) {
            double u = 0.0;
            for (auto [p, q] : cand_edges[i]) u += table[p][q].upper;
            if (u < best) {
                best = u;
                best_i = static_cast<int>(i);
            }
        }
        if (best_i >= 0 && best < f_lower - opts.eta) {
            out.push_back({s, Verdict::Success, candidates[best_i], depth});
            return;
        }
        bool small = true;
        for (const auto& r : s.y) small = small && r.hi - r.lo <= opts.epsilon;
        if (small) {
            out.push_back({s, Verdict::Fail, {}, depth});
            return;
        }
        const std::vector<YRange> box = s.y;
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            for (int p = 0; p < m; ++p) {
                const double mid = box[p].lo + (box[p].hi - box[p].lo) / 2;
                s.y[p] = (mask >> p & 1) ? YRange{mid, box[p].hi} : YRange{box[p].lo, mid};
            }
            run(s, depth + 1, out);
        }
        s.y = box;
    }
};

}  // namespace

std::vector<ProofOutcome> find_shorter_tour(const ProverCase& c, const ProverOptions& opts) {
    if (c.n_left < 2 || c.n_left > 4 || c.n_right < 2 || c.n_right > 3)
        throw PreconditionError("no case (" + std::to_string(c.n_left) + ", " + std::to_string(c.n_right) + ")");
    if (!(opts.delta > 0) || !(opts.epsilon > 0) || !(opts.eta >= 0))
        throw PreconditionError("prover needs delta > 0, epsilon > 0, eta >= 0");
    validate_case(c);

    const Search search(c, opts);
    const auto xs = x_assignments(c);
    std::vector<std::vector<ProofOutcome>> parts(xs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < xs.size();) {
            Scenario s{xs[i], std::vector<YRange>(c.points.size(), YRange{0.0, opts.delta})};
            search.run(s, 0, parts[i]);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(xs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<ProofOutcome> out;
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
    std::sort(out.begin(), out.end(), [](const ProofOutcome& a, const ProofOutcome& b) { return a.scenario < b.scenario; });
    return out;
}

bool verify_certificate(const ProverCase& c, const ProofOutcome& o, const ProverOptions& opts) {
    if (o.verdict != Verdict::Success) return false;
    const Scenario& s = o.scenario;
    const std::size_t m = c.points.size();
    if (s.x.size() != m || s.y.size() != m) return false;
    for (std::size_t p = 0; p < m; ++p) {
        const auto& allowed = c.points[p].allowed_x;
        if (std::find(allowed.begin(), allowed.end(), s.x[p]) == allowed.end()) return false;
        if (s.y[p].lo < 0 || s.y[p].hi > opts.delta || s.y[p].lo > s.y[p].hi) return false;
        for (std::size_t q = 0; q < p; ++q)
            if (s.x[p] == s.x[q]) return false;
    }

    // Walk pattern and witness alternately; a tour returns after 8 steps.
    int pat[kCopies], wit[kCopies];
    std::fill(std::begin(pat), std::end(pat), -1);
    std::fill(std::begin(wit), std::end(wit), -1);
    for (auto [u, v] : c.pattern.pairs) pat[u] = v, pat[v] = u;
    for (auto [u, v] : o.witness.pairs) {
        if (u < 0 || v < 0 || u >= kCopies || v >= kCopies || wit[u] >= 0 || wit[v] >= 0) return false;
        wit[u] = v, wit[v] = u;
    }
    if (std::count(std::begin(wit), std::end(wit), -1) != 0) return false;
    int at = 0, steps = 0;
    do {
        at = wit[pat[at]];
        steps += 2;
    } while (at != 0 && steps <= kCopies);
    if (steps != kCopies) return false;

    std::vector<int> owner(kCopies);
    for (std::size_t p = 0; p < m; ++p)
        for (int cp : c.points[p].copies) owner[cp] = static_cast<int>(p);
    auto sum = [&](const Matching& mm, bool upper) {
        double t = 0.0;
        for (auto [u, v] : mm.pairs) {
            const auto& a = s.y[owner[u]];
            const auto& b = s.y[owner[v]];
            const double dx = s.x[owner[u]] - s.x[owner[v]];
            const double dy = upper ? std::max(b.hi - a.lo, a.hi - b.lo)
                                    : std::max(0.0, std::max(a.lo, b.lo) - std::min(a.hi, b.hi));
            t += std::hypot(dx, dy);
        }
        return t;
    };
    return sum(o.witness, true) < sum(c.f_bar, false) - opts.eta;
}

bool check_coverage(const ProverCase& c, std::span<const ProofOutcome> outcomes, double delta) {
    const std::size_t m = c.points.size();
    std::map<std::vector<int>, std::vector<const ProofOutcome*>> by_x;
    for (const auto& o : outcomes) by_x[o.scenario.x].push_back(&o);
    const auto xs = x_assignments(c);
    if (by_x.size() != xs.size()) return false;
    for (const auto& x : xs) {
        auto it = by_x.find(x);
        if (it == by_x.end()) return false;
        // Each leaf is a dyadic cell (depth, index vector); no leaf may be an
        // ancestor of another, and the volumes must fill the box.
        std::set<std::pair<int, std::vector<long>>> cells;
        double volume = 0.0;
        for (const ProofOutcome* o : it->second) {
            if (o->scenario.y.size() != m || o->depth < 0 || o->depth > 60) return false;
            const double w = delta / std::ldexp(1.0, o->depth);
            std::vector<long> idx(m);
            double v = 1.0;
            for (std::size_t p = 0; p < m; ++p) {
                const auto& r = o->scenario.y[p];
                idx[p] = std::lround(r.lo / w);
                if (std::abs(r.lo - idx[p] * w) > 1e-9 || std::abs(r.hi - (idx[p] + 1) * w) > 1e-9) return false;
                if (idx[p] < 0 || (idx[p] + 1) * w > delta + 1e-9) return false;
                v *= r.hi - r.lo;
            }
            if (!cells.insert({o->depth, idx}).second) return false;
            volume += v;
        }
        for (const auto& [d, idx] : cells) {
            std::vector<long> up = idx;
            for (int a = d - 1; a >= 0; --a) {
                for (auto& k : up) k >>= 1;
                if (cells.count({a, up})) return false;
            }
        }
        if (std::abs(volume - std::pow(delta, static_cast<double>(m))) > 1e-9 * std::pow(delta, static_cast<double>(m)))
            return false;
    }
    return true;
}

std::vector<std::pair<int, YRange>> scenario_shape(const Scenario& s, bool mirror) {
    std::vector<std::pair<int, YRange>> out;
    for (std::size_t p = 0; p < s.x.size(); ++p) out.emplace_back(mirror ? -1 - s.x[p] : s.x[p], s.y[p]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> failing_x_assignments(std::span<const ProofOutcome> outcomes) {
    std::set<std::vector<int>> xs;
    for (const auto& o : outcomes)
        if (o.verdict == Verdict::Fail) xs.insert(o.scenario.x);
    return {xs.begin(), xs.end()};
}

// ---- residual scenarios -------------------------------------------------------

namespace {

constexpr double kTop = 2.8284271247461903;  // 2 sqrt 2

// q1 is the shared left point (one edge to q4 at x = 0, one to q5 at x = 1),
// q2 is joined to q4 and q3 to q5. Both replacements swap two edges.
ResidualLengths residual(Point q1, Point q2, Point q3, Point q4, Point q5) {
    const double f = distance(q2, q4) + distance(q1, q5) + distance(q1, q4) + distance(q3, q5);
    ResidualLengths r;
    r.f = f;
    r.f1 = f - distance(q2, q4) - distance(q1, q5) + distance(q2, q1) + distance(q4, q5);
    r.f2 = f - distance(q1, q4) - distance(q3, q5) + distance(q3, q1) + distance(q4, q5);
    return r;
}

ScenarioCheck check_residual(const std::string& name, double threshold, int grid,
                             ResidualLengths (*fn)(double)) {
    ScenarioCheck c{name, threshold, grid, 0, INFINITY};
    for (int i = 0; i < grid; ++i) {
        const double y = kTop * i / (grid - 1);
        const auto r = fn(y);
        // Above the threshold F'_1 is no longer, below it F'_2; at the
        // threshold both.
        double slack = INFINITY;
        if (y >= threshold) slack = std::min(slack, r.f - r.f1);
        if (y <= threshold) slack = std::min(slack, r.f - r.f2);
        c.worst_slack = std::min(c.worst_slack, slack);
        if (slack < -1e-12) ++c.violations;
    }
    return c;
}

// Moving c down along its vertical: the rate at which |ac| grows is the
// cosine of the angle between c->a and the upward direction.
double upward_angle(const Point& c, const Point& a) {
    return std::acos(std::clamp((a.y - c.y) / distance(a, c), -1.0, 1.0));
}

}  // namespace

// F'_1 and F'_2 as copy matchings of case (3, 2): q1 = copies {0, 2},
// q2 = 1, q3 = 3, q4 = {4, 5}, q5 = {6, 7}.
ResidualLengths residual_left(double y) {
    return residual({-1, y}, {-2, kTop}, {-3, 0}, {0, kTop}, {1, 0});
}

ResidualLengths residual_right(double y) {
    return residual({-1, y}, {-3, kTop}, {-2, 0}, {0, kTop}, {1, 0});
}

bool WorstCaseReport::ok() const {
    if (observation_violations != 0 || checks.empty()) return false;
    for (const auto& c : checks)
        if (c.violations != 0) return false;
    return true;
}

WorstCaseReport verify_worst_case_scenarios(int grid) {
    if (grid < 2) throw PreconditionError("grid needs at least two points");
    WorstCaseReport rep;
    rep.checks.push_back(check_residual("left", 8 * std::sqrt(2.0) / 7, grid, residual_left));
    rep.checks.push_back(check_residual("right", std::sqrt(2.0), grid, residual_right));

    // Finite-difference check of the moving observation on random triples.
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    constexpr int kSteps = 50;
    constexpr double kStep = 1e-3;
    for (int s = 0; s < 20000; ++s) {
        const Point a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
        Point c{coord(rng), coord(rng)};
        if (std::abs(c.x - a.x) < 1e-3 || std::abs(c.x - b.x) < 1e-3) continue;
        const double ac0 = distance(a, c), bc0 = distance(b, c);
        bool premise = true;
        for (int k = 0; k <= kSteps && premise; ++k) {
            const Point ck{c.x, c.y - k * kStep};
            premise = upward_angle(ck, a) < upward_angle(ck, b);
        }
        if (!premise) continue;
        c.y -= kSteps * kStep;
        ++rep.observation_samples;
        if (distance(a, c) - ac0 < distance(b, c) - bc0 - 1e-12) ++rep.observation_violations;
    }
    return rep;
}

}  // namespace striptsp
