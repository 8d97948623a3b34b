#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "striptsp/errors.h"
#include "striptsp/exact_oracle.h"
#include "striptsp/harness.h"

using namespace striptsp;

TEST_CASE("generators satisfy their invariants") {
    const auto ix = generate({GenKind::IntegerX, 5, 1.5, 2, 9});
    REQUIRE(ix.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(ix[i].x == i);

    for (std::uint64_t seed = 1; seed <= 50; ++seed)
        for (int c : {1, 2, 3}) {
            const GenSpec spec{GenKind::Sparse, 60, 1.0, c, seed};
            const auto inst = generate(spec);
            CHECK(check_generated(spec, inst));
            // Independent window count: [x_i, x_i + 1] for every i.
            int worst = 0;
            for (std::size_t i = 0; i < inst.size(); ++i) {
                int in = 0;
                for (std::size_t j = i; j < inst.size() && inst[j].x <= inst[i].x + 1.0; ++j) ++in;
                worst = std::max(worst, in);
            }
            CHECK(worst <= c);
        }

    const GenSpec ru{GenKind::RandomUniform, 40, 2.0, 2, 77};
    const auto a = generate(ru), b = generate(ru);
    CHECK(instance_to_string(a) == instance_to_string(b));
    CHECK(check_generated(ru, a));
    for (const auto& p : a.points()) {
        CHECK(p.x >= 0);
        CHECK(p.x <= 40);
    }
    GenSpec other = ru;
    other.seed = 78;
    CHECK(instance_to_string(generate(other)) != instance_to_string(a));
}

TEST_CASE("generator errors") {
    CHECK_THROWS_AS(generate({GenKind::IntegerX, 2, 1.0, 2, 1}), ConfigError);
    CHECK_THROWS_AS(generate({GenKind::IntegerX, 5, 0.0, 2, 1}), ConfigError);
    CHECK_THROWS_AS(generate({GenKind::Sparse, 5, 1.0, 0, 1}), ConfigError);
    CHECK_THROWS_AS(parse_gen_kind("grid"), ConfigError);
    CHECK(parse_gen_kind(to_string(GenKind::Sparse)) == GenKind::Sparse);
}

TEST_CASE("instance digest") {
    const auto a = generate({GenKind::IntegerX, 8, 1.0, 2, 3});
    CHECK(instance_digest(a) == instance_digest(generate({GenKind::IntegerX, 8, 1.0, 2, 3})));
    CHECK(instance_digest(a) != instance_digest(generate({GenKind::IntegerX, 8, 1.0, 2, 4})));
    // FNV-1a reference: hash of the serialized text, computed byte by byte.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : instance_to_string(a)) h = (h ^ ch) * 0x100000001b3ull;
    CHECK(instance_digest(a) == h);
    CHECK(digest_hex(0xabcull) == "0000000000000abc");
}

TEST_CASE("thread budget from the environment") {
    setenv("STRIP_TSP_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    setenv("STRIP_TSP_THREADS", "zero", 1);
    CHECK_THROWS_AS(thread_budget(), ConfigError);
    unsetenv("STRIP_TSP_THREADS");
    CHECK(thread_budget() >= 1);
}

TEST_CASE("counterexample search") {
    const auto at3 = counterexample_search(3.0);
    CHECK(at3.found);
    CHECK(std::abs(at3.gap - (std::sqrt(10.0) - 3)) < 1e-9);
    REQUIRE(at3.instance);
    CHECK(at3.instance->size() == 5);
    CHECK(at3.configurations == 243);
    // The optimum crosses some separator four times.
    const auto prof = tonicity_profile(at3.optimal_tour.edges(), *at3.instance);
    CHECK(*std::max_element(prof.begin(), prof.end()) == 4);
    CHECK(held_karp(*at3.instance).length == doctest::Approx(at3.optimal));

    const auto at29 = counterexample_search(2.9);
    CHECK(at29.found);
    CHECK(std::abs(at29.gap - (std::sqrt(1 + 2.9 * 2.9) - 3)) < 1e-9);
    CHECK(at29.gap == doctest::Approx(0.0675723300));

    for (double d : {2 * std::sqrt(2.0), 2.5, 1.0}) {
        const auto r = counterexample_search(d);
        CHECK_FALSE(r.found);
        CHECK(r.gap <= 1e-9);
    }
}

namespace {

const char* kSmall = R"({
  "name": "small",
  "runs": [
    {"name": "dp", "generators": ["random-uniform", "integer-x", "sparse"], "n_range": [6, 9],
     "delta": [0.5, 2], "count": 12, "seed": 5, "algorithms": ["strip-dp", "held-karp"],
     "compare": "equal-length"},
    {"name": "ton", "generators": ["integer-x"], "n": [8], "delta": [2], "count": 4,
     "algorithms": ["held-karp"], "compare": "tonicity-bound"}
  ]
})";

}  // namespace

TEST_CASE("campaign config errors") {
    CHECK_THROWS_AS(parse_campaign("{}"), ConfigError);
    CHECK_THROWS_AS(parse_campaign(R"({"runs": []})"), ConfigError);
    CHECK_THROWS_AS(parse_campaign(R"({"runs": [{"name": "x", "generators": ["integer-x"], "n": [6],
        "delta": [1], "algorithms": []}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_campaign(R"({"runs": [{"name": "x", "generators": ["random-uniform"], "n": [6],
        "delta": [1], "algorithms": ["held-karp"], "compare": "tonicity-bound"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_campaign(R"({"runs": [{"name": "x", "generators": ["integer-x"], "n": [6],
        "delta": [1], "algorithms": ["held-karp"], "compare": "equal-length"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_campaign(R"({"runs": [{"name": "x", "generators": ["integer-x"], "n": [6],
        "delta": [1], "algorithms": ["simplex"]}]})"),
                    ConfigError);
}

TEST_CASE("instance specs cycle kinds, then deltas, then sizes") {
    const auto cfg = parse_campaign(kSmall);
    const auto& run = cfg.runs[0];
    CHECK(instance_spec(run, 0).kind == GenKind::RandomUniform);
    CHECK(instance_spec(run, 1).kind == GenKind::IntegerX);
    CHECK(instance_spec(run, 3).delta == 2);
    CHECK(instance_spec(run, 6).n == 7);
    CHECK(instance_spec(run, 4).seed == instance_spec(run, 4).seed);
    CHECK(instance_spec(run, 4).seed != instance_spec(run, 5).seed);
}

TEST_CASE("campaign runs and reports") {
    const auto cfg = parse_campaign(kSmall);
    std::ostringstream out1, out2;
    const auto r1 = run_campaign(cfg, &out1, 1);
    const auto r2 = run_campaign(cfg, &out2, 2);
    CHECK(r1.violations() == 0);
    CHECK(r2.violations() == 0);
    REQUIRE(r1.runs.size() == 2);
    CHECK(r1.runs[0].instances == 12);

    auto lengths = [](const std::string& text) {
        std::vector<std::pair<std::string, double>> v;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const auto j = nlohmann::json::parse(line);
            CHECK(j.at("schema") == kReportSchema);
            if (j.contains("length")) v.emplace_back(j["digest"].get<std::string>() + j["algorithm"].get<std::string>(), j["length"].get<double>());
        }
        return v;
    };
    const auto l1 = lengths(out1.str()), l2 = lengths(out2.str());
    CHECK(l1.size() == 28);
    CHECK(l1 == l2);
}

TEST_CASE("time-ratio runs flag out-of-range growth") {
    // Identical instances: ratios near 1, outside [50, 60].
    const auto cfg = parse_campaign(R"({"runs": [{"name": "t", "generators": ["integer-x"], "n": [9],
        "delta": [1], "count": 2, "algorithms": ["held-karp"], "compare": "time-ratio", "ratio": [50, 60]}]})");
    const auto r = run_campaign(cfg, nullptr);
    CHECK(r.violations() == 1);
    CHECK(r.runs[0].times.size() == 2);
}
