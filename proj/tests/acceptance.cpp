// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "striptsp/errors.h"
#include "striptsp/exact_oracle.h"
#include "striptsp/harness.h"
#include "striptsp/matching.h"
#include "striptsp/prover.h"
#include "striptsp/strip_dp.h"
#include "striptsp/tonicity.h"

using namespace striptsp;

namespace {

const double kRoot2 = std::sqrt(2.0);

struct Check {
    bool pass = false;
    std::string detail;
};

const RunSpec& run_named(const CampaignConfig& cfg, const std::string& name) {
    for (const auto& r : cfg.runs)
        if (r.name == name) return r;
    throw ConfigError("acceptance config lacks run " + name);
}

// Runs one campaign run and folds its summary into a verdict.
Check campaign_verdict(const CampaignConfig& cfg, const std::vector<std::string>& names, int min_instances) {
    CampaignConfig sub{cfg.name, {}};
    for (const auto& n : names) sub.runs.push_back(run_named(cfg, n));
    const auto res = run_campaign(sub, nullptr, thread_budget());
    std::ostringstream d;
    bool ok = true;
    for (const auto& r : res.runs) {
        d << r.name << ": " << r.instances << " instances, " << r.violations << " violations; ";
        ok = ok && r.violations == 0 && r.instances >= min_instances;
        for (std::size_t i = 0; i < std::min<std::size_t>(3, r.messages.size()); ++i) d << r.messages[i] << "; ";
    }
    return {ok, d.str()};
}

Check criterion_1(const CampaignConfig& cfg) {
    return campaign_verdict(cfg, {"strip-dp-vs-held-karp"}, 200);
}

Check criterion_2(const CampaignConfig& cfg) {
    const auto& run = run_named(cfg, "bitonic-vs-held-karp");
    for (auto k : run.kinds)
        if (k != GenKind::IntegerX) return {false, "run must use integer-x instances"};
    return campaign_verdict(cfg, {"bitonic-vs-held-karp"}, 500);
}

Check criterion_3() {
    const auto a = counterexample_search(3.0);
    const auto b = counterexample_search(2 * kRoot2);
    const double err = std::abs(a.gap - (std::sqrt(10.0) - 3));
    std::ostringstream d;
    d.precision(12);
    d << "delta=3 gap " << a.gap << " (|err| " << err << "), delta=2sqrt2 largest gap " << b.gap;
    const bool ok = a.found && a.instance && a.instance->size() == 5 && err <= 1e-9 && !b.found && b.gap <= 1e-9;
    return {ok, d.str()};
}

Check criterion_4(const std::string& cases_path, const std::vector<double>& epsilons) {
    const auto cases = load_cases(cases_path);
    std::ostringstream d;
    bool ok = true;
    for (double epsilon : epsilons) {
        ProverOptions o;
        o.epsilon = epsilon;
        o.threads = thread_budget();
        d << "epsilon " << epsilon << ": ";
        for (auto [l, r] : {std::pair{2, 2}, {4, 2}, {3, 3}, {4, 3}, {3, 2}}) {
            const auto& c = find_case(cases, l, r);
            const auto out = find_shorter_tour(c, o);
            std::size_t bad = 0;
            for (const auto& x : out)
                if (x.verdict == striptsp::Verdict::Success) bad += !verify_certificate(c, x, o);
            const bool covered = check_coverage(c, out, o.delta);
            const auto failing = failing_x_assignments(out);
            bool fail_ok = failing.empty();
            if (l == 3 && r == 2) {
                // The two residual configurations: shared left point at -1,
                // the single left points on -2 and -3 in either order.
                std::set<std::vector<int>> expect;
                for (const auto& x : x_assignments(c))
                    if (x[0] == -1) expect.insert(x);
                fail_ok = std::set<std::vector<int>>(failing.begin(), failing.end()) == expect && expect.size() == 2;
            }
            ok = ok && bad == 0 && covered && fail_ok;
            d << "(" << l << "," << r << ") " << out.size() << " scenarios, " << failing.size() << " failing x-assignments"
              << (bad ? ", rejected certificates" : "") << (covered ? "" : ", coverage broken") << "; ";
        }
    }
    return {ok, d.str()};
}

Check criterion_5() {
    const auto rep = verify_worst_case_scenarios(10001);
    const double tl = 8 * kRoot2 / 7;
    const auto l = residual_left(tl), r = residual_right(kRoot2);
    const double eq = std::max({std::abs(l.f - l.f1), std::abs(l.f - l.f2), std::abs(r.f - r.f1), std::abs(r.f - r.f2)});
    std::ostringstream d;
    for (const auto& c : rep.checks) d << c.name << ": " << c.violations << " violations on " << c.grid_points << " points; ";
    d << "threshold equality error " << eq << "; moving observation " << rep.observation_violations << "/"
      << rep.observation_samples;
    return {rep.ok() && eq <= 1e-9 && rep.checks.size() == 2 && rep.checks[0].grid_points >= 10000, d.str()};
}

Check criterion_6(const CampaignConfig& cfg) {
    const auto v = campaign_verdict(
        cfg, {"tonicity-integer-x", "tonicity-sparse-c1", "tonicity-sparse-c2", "tonicity-sparse-c3"}, 500);
    std::set<int> cs;
    for (const auto* n : {"tonicity-sparse-c1", "tonicity-sparse-c2", "tonicity-sparse-c3"}) cs.insert(run_named(cfg, n).c);
    return {v.pass && cs == std::set<int>{1, 2, 3}, v.detail};
}

Check criterion_7(const CampaignConfig& cfg) {
    const auto& run = run_named(cfg, "strip-dp-vs-held-karp");
    int separators = 0, missing = 0, double_cross = 0;
    for (int i = 0; i < run.count; ++i) {
        const auto inst = generate(instance_spec(run, i));
        const auto grid = build_grid(inst);
        const auto decomp = place_separators(grid, inst);
        const auto edges = held_karp(inst).tour.edges();
        for (int j = 1; j <= decomp.t(); ++j) {
            const auto config = endpoint_configuration(inst, edges, decomp.separators[j - 1].x_line);
            const auto fam = enumerate_candidates(decomp, grid, j, inst, run.dp);
            missing += std::none_of(fam.begin(), fam.end(), [&](const auto& c) { return c.points == config; });
            ++separators;
        }
        for (int j = 1; j + 3 <= decomp.t(); ++j) {
            const double a = decomp.separators[j - 1].x_line, b = decomp.separators[j + 2].x_line;
            int both = 0;
            for (const auto& e : edges)
                both += std::min(inst[e.from].x, inst[e.to].x) < a && std::max(inst[e.from].x, inst[e.to].x) > b;
            double_cross += both > 1;
        }
    }

    // reduce keeps opt(M, .) for every perfect matching M on the boundary.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> w(0.0, 10.0);
    int reduce_bad = 0, reduce_checks = 0;
    for (int b : {2, 4, 6, 8}) {
        const auto all = all_perfect_matchings(b);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        for (int rep = 0; rep < 50; ++rep) {
            RepSet r{b, {}};
            const int m = 1 + rep % 40;
            for (int e = 0; e < m; ++e) r.entries.push_back({all[pick(rng)], std::round(w(rng) * 4) / 4, 0});
            const RepSet red = reduce(r);
            for (const auto& mm : all) {
                ++reduce_checks;
                reduce_bad += opt(mm, r) != opt(mm, red);
            }
        }
    }
    std::ostringstream d;
    d << separators << " separators, " << missing << " configurations outside the family; " << double_cross
      << " separator pairs crossed twice; reduce: " << reduce_bad << "/" << reduce_checks << " opt mismatches";
    return {missing == 0 && double_cross == 0 && reduce_bad == 0 && separators > 0, d.str()};
}

Check criterion_8(const CampaignConfig& scaling) {
    const auto res = run_campaign(scaling, nullptr, 1);
    std::ostringstream d;
    bool ok = true;
    for (const auto& r : res.runs) {
        d << r.name << ": times";
        for (double t : r.times) d << ' ' << t;
        d << " s";
        for (const auto& m : r.messages) d << "; " << m;
        d << " | ";
        ok = ok && r.violations == 0;
    }
    return {ok, d.str()};
}

Check criterion_9() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3), ang(0, 2 * M_PI), unit(0, 1);
    int deriv_bad = 0;
    for (int checked = 0; checked < 1000;) {
        const Point a{u(rng), u(rng)};
        const double na = std::hypot(a.x, a.y);
        if (na < 0.1) continue;
        const double th = ang(rng), h = 1e-6;
        const Point v{std::cos(th), std::sin(th)};
        const double deriv = (distance({a.x + h * v.x, a.y + h * v.y}, {0, 0}) -
                              distance({a.x - h * v.x, a.y - h * v.y}, {0, 0})) / (2 * h);
        deriv_bad += std::abs(deriv - (a.x * v.x + a.y * v.y) / na) >= 1e-5;
        ++checked;
    }

    const double delta = 2 * kRoot2;
    int bound_bad = 0;
    for (int i = 0; i < 100000; ++i) {
        double a = unit(rng) * delta, b = unit(rng) * delta, c = unit(rng) * delta, e = unit(rng) * delta;
        if (a > b) std::swap(a, b);
        if (c > e) std::swap(c, e);
        const double px = std::floor(u(rng)), qx = std::floor(u(rng));
        const auto bd = interval_edge_bounds(px, {a, b}, qx, {c, e});
        const double len = std::hypot(px - qx, (a + unit(rng) * (b - a)) - (c + unit(rng) * (e - c)));
        bound_bad += len < bd.lower - 1e-12 || len > bd.upper + 1e-12;
    }

    int swap_bad = 0, swaps = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 5 + rep % 8;
        const auto inst = generate({GenKind::RandomUniform, n, 2.0, 2, static_cast<std::uint64_t>(rep + 1)});
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const Tour t(order);
        const auto edges = t.edges();
        std::uniform_int_distribution<int> pick(0, n - 1);
        const int x = pick(rng), y = pick(rng);
        if (x == y) continue;
        const Edge q = edges[x], r = edges[y];
        const Tour s = swap_edges(t, q, r, inst);
        const double expect = tour_length(inst, t) - inst.dist(q.from, q.to) - inst.dist(r.from, r.to) +
                              inst.dist(q.from, r.from) + inst.dist(q.to, r.to);
        swap_bad += std::abs(tour_length(inst, s) - expect) >= 1e-12;
        ++swaps;
    }
    std::ostringstream d;
    d << "derivative " << deriv_bad << "/1000, interval bounds " << bound_bad << "/100000, swap identity " << swap_bad
      << "/" << swaps;
    return {deriv_bad == 0 && bound_bad == 0 && swap_bad == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string config = STRIPTSP_SOURCE_DIR "/configs/acceptance.json";
    std::string scaling = STRIPTSP_SOURCE_DIR "/configs/scaling.json";
    std::string cases = STRIPTSP_SOURCE_DIR "/data/cases.json";
    std::vector<double> epsilons{0.05, 0.001};
    std::vector<int> only, known;
    app.add_option("--config", config);
    app.add_option("--scaling", scaling);
    app.add_option("--cases", cases);
    app.add_option("--epsilon", epsilons, "prover resolutions for criterion 4");
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--known-failure", known, "criteria whose FAIL does not affect the exit code");
    CLI11_PARSE(app, argc, argv);

    const double budget_s[10] = {0, 300, 180, 60, 1800, 1, 300, 300, 900, 60};
    int unexpected = 0;
    try {
        const auto acc = load_campaign(config);
        const auto scal = load_campaign(scaling);
        const std::vector<std::function<Check()>> crit{
            [&] { return criterion_1(acc); },
            [&] { return criterion_2(acc); },
            [] { return criterion_3(); },
            [&] { return criterion_4(cases, epsilons); },
            [] { return criterion_5(); },
            [&] { return criterion_6(acc); },
            [&] { return criterion_7(acc); },
            [&] { return criterion_8(scal); },
            [] { return criterion_9(); },
        };
        for (int i = 1; i <= 9; ++i) {
            if (!only.empty() && std::find(only.begin(), only.end(), i) == only.end()) continue;
            const auto t0 = std::chrono::steady_clock::now();
            Check v;
            try {
                v = crit[i - 1]();
            } catch (const std::exception& e) {
                v = {false, std::string("exception: ") + e.what()};
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (secs > budget_s[i]) {
                v.pass = false;
                v.detail += " [over the " + std::to_string(static_cast<int>(budget_s[i])) + " s budget]";
            }
            const bool is_known = std::find(known.begin(), known.end(), i) != known.end();
            std::cout << "CRITERION " << i << ": " << (v.pass ? "PASS" : "FAIL") << " (" << secs << " s)"
                      << (!v.pass && is_known ? " [known failure]" : "") << " -- " << v.detail << std::endl;
            if (!v.pass && !is_known) ++unexpected;
        }
    } catch (const std::exception& e) {
        std::cout << "acceptance setup failed: " << e.what() << '\n';
        return 2;
    }
    return unexpected == 0 ? 0 : 1;
}
