#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "striptsp/errors.h"
#include "striptsp/matching.h"

using namespace striptsp;

namespace {

// Reference path tracer via union-find over the multigraph union.
struct RefJoin {
    bool ok = true;
    bool single_cycle = false;
    std::set<std::pair<int, int>> ends;
};

RefJoin ref_join(const Matching& a, const Matching& b) {
    std::map<int, std::vector<int>> adj;
    for (const Matching* m : {&a, &b})
        for (auto [u, v] : m->pairs) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    RefJoin r;
    for (auto& [v, nb] : adj)
        if (nb.size() > 2) r.ok = false;
    if (!r.ok) return r;
    std::set<int> seen;
    int cycles = 0, paths = 0;
    for (auto& [start, nb] : adj) {
        if (seen.count(start)) continue;
        // collect component by BFS
        std::vector<int> comp{start};
        seen.insert(start);
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int w : adj[comp[i]])
                if (!seen.count(w)) {
                    seen.insert(w);
                    comp.push_back(w);
                }
        std::vector<int> deg1;
        for (int v : comp)
            if (adj[v].size() == 1) deg1.push_back(v);
        if (deg1.empty()) ++cycles;
        else {
            ++paths;
            r.ends.insert({std::min(deg1[0], deg1[1]), std::max(deg1[0], deg1[1])});
        }
    }
    if (cycles > 1 || (cycles == 1 && paths > 0)) r.ok = false;
    r.single_cycle = cycles == 1 && paths == 0;
    return r;
}

Matching random_matching(std::mt19937_64& rng, std::vector<int> labels) {
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<std::pair<int, int>> p;
    for (std::size_t i = 0; i + 1 < labels.size(); i += 2) p.emplace_back(labels[i], labels[i + 1]);
    return Matching(p);
}

}  // namespace

TEST_CASE("compatible and join examples") {
    const int a = 0, b = 1, c = 2, d = 3;
    Matching ab({{a, b}});
    Matching acbd({{a, c}, {b, d}});
    CHECK(compatible(ab, ab));
    CHECK(join(ab, ab).empty());
    CHECK(compatible(ab, acbd));
    CHECK(join(ab, acbd) == Matching({{c, d}}));
    Matching two({{a, b}, {c, d}});
    CHECK_FALSE(compatible(two, two));
    CHECK_THROWS_AS(join(two, two), ContractViolation);
}

TEST_CASE("perfect matching enumeration") {
    CHECK(all_perfect_matchings(0).size() == 1);
    CHECK(all_perfect_matchings(4).size() == 3);
    CHECK(all_perfect_matchings(6).size() == 15);
    CHECK(all_perfect_matchings(8).size() == 105);
    for (const auto& m : all_perfect_matchings(6)) CHECK(is_perfect_on(m, 6));
    CHECK_THROWS_AS(all_perfect_matchings(3), PreconditionError);
}

TEST_CASE("join agrees with reference path tracer") {
    std::mt19937_64 rng(9);
    int compatible_seen = 0;
    for (int rep = 0; rep < 3000; ++rep) {
        // Boundaries B1 and B2 drawn from 0..9 with random overlap.
        std::vector<int> b1, b2;
        for (int v = 0; v < 10; ++v) {
            const int r = rng() % 4;
            if (r == 0 || r == 2) b1.push_back(v);
            if (r == 1 || r == 2) b2.push_back(v);
        }
        if (b1.size() % 2) b1.pop_back();
        if (b2.size() % 2) b2.pop_back();
        auto m1 = random_matching(rng, b1);
        auto m2 = random_matching(rng, b2);
        auto ref = ref_join(m1, m2);
        CHECK(compatible(m1, m2) == ref.ok);
        if (!ref.ok) continue;
        ++compatible_seen;
        auto j = join(m1, m2);
        CHECK(std::set<std::pair<int, int>>(j.pairs.begin(), j.pairs.end()) == ref.ends);
        // Result covers exactly the symmetric difference.
        std::set<int> s1(b1.begin(), b1.end()), s2(b2.begin(), b2.end()), sym;
        std::set_symmetric_difference(s1.begin(), s1.end(), s2.begin(), s2.end(),
                                      std::inserter(sym, sym.end()));
        auto sup = j.support();
        CHECK(std::set<int>(sup.begin(), sup.end()) == sym);
        CHECK(sup.size() == sym.size());
    }
    CHECK(compatible_seen > 300);
}

TEST_CASE("fits means single Hamiltonian cycle") {
    auto all = all_perfect_matchings(6);
    for (const auto& a : all)
        for (const auto& b : all) CHECK(fits(a, b) == ref_join(a, b).single_cycle);
}

TEST_CASE("reduce examples") {
    RepSet one{2, {{Matching({{0, 1}}), 3.0, 0}}};
    auto r1 = reduce(one);
    REQUIRE(r1.entries.size() == 1);
    CHECK(r1.entries[0].weight == 3.0);

    RepSet dup{4, {{Matching({{0, 1}, {2, 3}}), 7.0, 1}, {Matching({{0, 1}, {2, 3}}), 5.0, 2}}};
    auto r2 = reduce(dup);
    REQUIRE(r2.entries.size() == 1);
    CHECK(r2.entries[0].weight == 5.0);
    CHECK(r2.entries[0].tag == 2);

    RepSet mixed{4, {{Matching({{0, 1}}), 1.0, 0}}};
    CHECK_THROWS_AS(reduce(mixed), ContractViolation);

    RepSet empty_boundary{0, {{Matching(), 4.0, 0}, {Matching(), 2.0, 1}}};
    auto r3 = reduce(empty_boundary);
    REQUIRE(r3.entries.size() == 1);
    CHECK(r3.entries[0].weight == 2.0);
}

TEST_CASE("reduce preserves opt for all fitting matchings") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> w(0, 10);
    for (int boundary : {2, 4, 6, 8}) {
        auto all = all_perfect_matchings(boundary);
        for (int rep = 0; rep < 20; ++rep) {
            RepSet in{boundary, {}};
            for (std::size_t i = 0; i < all.size(); ++i)
                if (rng() % 3 != 0) in.entries.push_back({all[i], w(rng), i});
            auto out = reduce(in);
            CHECK(out.entries.size() <= (std::size_t{1} << (boundary - 1)));
            for (const auto& m : all) CHECK(opt(m, out) == opt(m, in));
        }
    }
}
