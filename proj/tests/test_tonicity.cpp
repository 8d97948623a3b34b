#include <cmath>
#include <random>

#include "doctest.h"
#include "striptsp/bitonic.h"
#include "striptsp/errors.h"
#include "striptsp/exact_oracle.h"
#include "striptsp/tonicity.h"
#include "test_util.h"

using namespace striptsp;

namespace {

Tour random_tour(std::mt19937_64& rng, int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    return Tour(order);
}

}  // namespace

TEST_CASE("swap_edges on parallel edges") {
    // Sorted: A(0,0)=0, C(0,1)=1, B(2,0)=2, D(2,1)=3.
    StripInstance inst({{0, 0}, {2, 0}, {0, 1}, {2, 1}}, 1.0);
    Tour t({0, 2, 1, 3});
    const Separator mid{1.0, 0};
    CHECK(tonicity_at(t.edges(), mid, inst) == 4);
    Tour s = swap_edges(t, {0, 2}, {1, 3}, inst);
    CHECK(s.order() == std::vector<int>{0, 1, 2, 3});
    CHECK(tour_length(inst, s) - tour_length(inst, t) == doctest::Approx(-2.0));
    CHECK(tonicity_at(s.edges(), mid, inst) == 2);
    // Swapping the two new edges back restores the tour.
    CHECK(swap_edges(s, {0, 1}, {2, 3}, inst) == t);
    // Same pair given against the stored direction.
    CHECK(swap_edges(t, {2, 0}, {3, 1}, inst) == s);
}

TEST_CASE("swap_edges rejects bad edges") {
    StripInstance inst({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, 1.0);
    Tour t({0, 1, 2, 3, 4});
    CHECK_THROWS_AS(swap_edges(t, {0, 2}, {3, 4}, inst), ContractViolation);
    CHECK_THROWS_AS(swap_edges(t, {0, 1}, {4, 3}, inst), ContractViolation);
    CHECK_THROWS_AS(swap_edges(t, {1, 2}, {1, 2}, inst), ContractViolation);
    CHECK_THROWS_AS(swap_edges(t, {1, 9}, {2, 3}, inst), ContractViolation);
}

TEST_CASE("swap_edges length identity") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 500; ++rep) {
        const int n = 5 + rep % 8;
        auto inst = testutil::random_instance(rng, n, 2.0, n);
        Tour t = random_tour(rng, n);
        const auto edges = t.edges();
        std::uniform_int_distribution<int> pick(0, n - 1);
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        const Edge q = edges[a], r = edges[b];
        Tour s = swap_edges(t, q, r, inst);
        const double expect = tour_length(inst, t) - inst.dist(q.from, q.to) - inst.dist(r.from, r.to) +
                              inst.dist(q.from, r.from) + inst.dist(q.to, r.to);
        CHECK(std::abs(tour_length(inst, s) - expect) < 1e-12);
    }
}

TEST_CASE("reduce_tonicity examples") {
    // Rectangle A,B,C,D between E on the left and F on the right.
    StripInstance inst({{-1, 0.5}, {0, 0}, {0, 1}, {2, 0}, {2, 1}, {3, 0.5}}, 1.0);
    // E=0, A=1, C=2, B=3, D=4, F=5; tour E A B C D F.
    Tour t({0, 1, 3, 2, 4, 5});
    auto red = reduce_tonicity_traced(t, inst);
    REQUIRE(red.swaps.size() == 1);
    CHECK(red.swaps[0].separator == 3);
    CHECK(red.swaps[0].gain == doctest::Approx(2.0));
    CHECK(tour_length(inst, red.tour) == doctest::Approx(tour_length(inst, t) - 2.0));
    CHECK(tonicity_at(red.tour.edges(), Separator{1.0, 0}, inst) == 2);

    std::mt19937_64 rng(2);
    auto flat = testutil::random_instance(rng, 9, 1.0, 9.0);
    Tour b = bitonic_tsp(flat).tour;
    CHECK(reduce_tonicity(b, flat) == b);
}

TEST_CASE("reduce_tonicity never lengthens or raises the profile") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 5 + rep % 8;
        auto inst = testutil::random_instance(rng, n, 0.5 + rep % 4, n);
        Tour t = rep % 2 ? random_tour(rng, n) : held_karp(inst).tour;
        auto red = reduce_tonicity_traced(t, inst);
        CHECK(tour_length(inst, red.tour) <= tour_length(inst, t) + 1e-9);
        const auto before = tonicity_profile(t.edges(), inst);
        const auto after = tonicity_profile(red.tour.edges(), inst);
        CHECK(lower_tonicity(after, before));
        if (!red.swaps.empty()) CHECK(strictly_lower_tonicity(after, before));
        CHECK(red.swaps.size() <= std::size_t(n * n));
        for (const auto& s : red.swaps) CHECK(s.gain >= -1e-9);
    }
}

TEST_CASE("tonicity bounds") {
    CHECK(tonicity_bound_integer(0) == 2);
    CHECK(tonicity_bound_integer(8) == 10);
    CHECK(tonicity_bound_integer(2 * std::sqrt(2.0)) == 6);
    CHECK(tonicity_bound_integer(3) == 6);
    CHECK(tonicity_bound_sparse(2, 2) == 14);
    CHECK(tonicity_bound_sparse(0, 1) == 2);
    CHECK(tonicity_bound_sparse(4, 1) == 10);
    CHECK_THROWS_AS(tonicity_bound_integer(-0.1), DomainError);
    CHECK_THROWS_AS(tonicity_bound_sparse(-1, 2), DomainError);
    CHECK_THROWS_AS(tonicity_bound_sparse(1, 0), DomainError);
}

TEST_CASE("reduced optima respect the tonicity bounds") {
    std::mt19937_64 rng(41);
    const double deltas[] = {1, 2, 2 * std::sqrt(2.0), 4, 8};
    for (int rep = 0; rep < 100; ++rep) {
        const double delta = deltas[rep % 5];
        auto inst = testutil::integer_x_instance(rng, 6 + rep % 5, delta);
        auto red = reduce_tonicity(held_karp(inst).tour, inst);
        CHECK(is_k_tonic(red.edges(), tonicity_bound_integer(delta), inst));
    }
    for (int rep = 0; rep < 90; ++rep) {
        const int c = 1 + rep % 3;
        const double delta = deltas[(rep / 3) % 5];
        auto inst = testutil::sparse_instance(rng, 6 + rep % 5, delta, c);
        auto red = reduce_tonicity(held_karp(inst).tour, inst);
        CHECK(is_k_tonic(red.edges(), tonicity_bound_sparse(delta, c), inst));
    }
}

TEST_CASE("gap lemma checks") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 5 + rep % 6;
        auto inst = testutil::integer_x_instance(rng, n, 1.0);
        const Tour opt = held_karp(inst).tour;
        for (int i = 1; i < n; ++i) CHECK(check_gap_lemma(inst, opt, i, 1));
    }
    std::vector<Point> line;
    for (int i = 0; i < 7; ++i) line.push_back({i * 0.7, 0.0});
    StripInstance flat(line, 1e-9);
    const Tour fo = held_karp(flat).tour;
    for (int i = 1; i < 7; ++i) CHECK(check_gap_lemma(flat, fo, i, 1));

    int applied = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 6 + rep % 4;
        const double delta = 1.0 + rep % 4;
        auto inst = testutil::integer_x_instance(rng, n, delta);
        const Tour opt = held_karp(inst).tour;
        for (int k = 1; k <= 3; ++k)
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j) {
                    if (delta <= (j - i) * (k - j + i + 1)) ++applied;
                    CHECK(check_gap_lemma_pair(inst, opt, i, j, k));
                }
    }
    CHECK(applied > 100);
    StripInstance three({{0, 0}, {1, 0}, {2, 0}}, 1.0);
    CHECK_THROWS_AS(check_gap_lemma_pair(three, Tour({0, 1, 2}), 2, 2, 1), IndexError);
}
