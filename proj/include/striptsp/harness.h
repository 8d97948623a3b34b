#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "striptsp/geometry.h"
#include "striptsp/strip_dp.h"

namespace striptsp {

enum class GenKind { RandomUniform, IntegerX, Sparse };

GenKind parse_gen_kind(const std::string& s);  // ConfigError on unknown names
std::string to_string(GenKind k);

struct GenSpec {
    GenKind kind = GenKind::RandomUniform;
    int n = 10;
    double delta = 1.0;
    int c = 2;  // sparse only: at most c points per closed unit window
    std::uint64_t seed = 1;
};

/// Deterministic for a fixed spec. random-uniform: i.i.d. on [0,n]x[0,delta];
/// integer-x: x = 0..n-1, uniform y; sparse: consecutive x-gaps drawn from
/// U(1/c, 2/c), which keeps every unit window at c points or fewer.
StripInstance generate(const GenSpec& spec);

/// The kind's invariant, checked on an instance.
bool check_generated(const GenSpec& spec, const StripInstance& inst);

/// FNV-1a over the instance's text serialization.
std::uint64_t instance_digest(const StripInstance& inst);
std::string digest_hex(std::uint64_t d);

/// Threads allowed by STRIP_TSP_THREADS (default: hardware concurrency, at least 1).
unsigned thread_budget();

struct CounterexampleResult {
    bool found = false;
    double delta = 0.0;
    double gap = 0.0;       // bitonic minus optimal, largest over the family
    double bitonic = 0.0;
    double optimal = 0.0;
    std::optional<StripInstance> instance;
    Tour optimal_tour;
    int configurations = 0;
};

/// Exhaustive search over five points at x = 0..4 with y in {0, delta/2,
/// delta}, solved by full tour enumeration. Found when some configuration
/// has a positive gap (beyond 1e-9).
CounterexampleResult counterexample_search(double delta);

// ---- campaigns ----------------------------------------------------------------

enum class Algorithm { HeldKarp, Bitonic, StripDp };
Algorithm parse_algorithm(const std::string& s);
std::string to_string(Algorithm a);

enum class Comparison { None, EqualLength, TonicityBound, TimeRatio };

struct RunSpec {
    std::string name;
    std::vector<GenKind> kinds;
    std::vector<int> sizes;
    std::vector<double> deltas;
    int c = 2;
    int count = 1;
    std::uint64_t seed = 1;
    std::vector<Algorithm> algorithms;
    Comparison compare = Comparison::None;
    double tolerance = 1e-9;
    double ratio_lo = 0.0, ratio_hi = 0.0;  // TimeRatio bounds
    double deadline_factor = 0.0;           // TimeRatio: cap later runs at factor x first time
    StripDpOptions dp;
};

struct CampaignConfig {
    std::string name;
    std::vector<RunSpec> runs;
};

CampaignConfig parse_campaign(const std::string& json_text);
CampaignConfig load_campaign(const std::string& path);

/// Instance i of a run: kinds vary fastest, then deltas, then sizes.
GenSpec instance_spec(const RunSpec& run, int i);

struct RunSummary {
    std::string name;
    int instances = 0;
    int violations = 0;
    double seconds = 0.0;
    std::vector<double> times;  // per instance, first algorithm
    std::vector<std::string> messages;
};

struct CampaignResult {
    std::vector<RunSummary> runs;
    int violations() const;
};

/// Runs every instance of every run, writes one JSON line per (instance,
/// algorithm), one per failed check and one summary per run to `report`
/// (if non-null). Untimed runs use up to `threads` workers.
CampaignResult run_campaign(const CampaignConfig& cfg, std::ostream* report, unsigned threads = 1);

inline constexpr const char* kReportSchema = "strip-tsp-report/1";

}  // namespace striptsp
