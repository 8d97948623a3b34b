#include "striptsp/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "striptsp/bitonic.h"
#include "striptsp/errors.h"
#include "striptsp/exact_oracle.h"
#include "striptsp/tonicity.h"

namespace striptsp {

using nlohmann::json;

GenKind parse_gen_kind(const std::string& s) {
    if (s == "random-uniform") return GenKind::RandomUniform;
    if (s == "integer-x") return GenKind::IntegerX;
    if (s == "sparse") return GenKind::Sparse;
    throw ConfigError("unknown generator kind '" + s + "'");
}

std::string to_string(GenKind k) {
    switch (k) {
        case GenKind::RandomUniform: return "random-uniform";
        case GenKind::IntegerX: return "integer-x";
        case GenKind::Sparse: return "sparse";
    }
    return "?";
}

StripInstance generate(const GenSpec& spec) {
    if (spec.n < 3) throw ConfigError("generator needs n >= 3");
    if (!(spec.delta > 0) || !std::isfinite(spec.delta)) throw ConfigError("generator needs a finite delta > 0");
    if (spec.kind == GenKind::Sparse && spec.c < 1) throw ConfigError("sparse generator needs c >= 1");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uy(0.0, spec.delta);
    std::vector<Point> pts;
    pts.reserve(spec.n);
    switch (spec.kind) {
        case GenKind::RandomUniform: {
            std::uniform_real_distribution<double> ux(0.0, spec.n);
            for (int i = 0; i < spec.n; ++i) {
                const double x = ux(rng);
                pts.push_back({x, uy(rng)});
            }
            break;
        }
        case GenKind::IntegerX:
            for (int i = 0; i < spec.n; ++i) pts.push_back({double(i), uy(rng)});
            break;
        case GenKind::Sparse: {
            std::uniform_real_distribution<double> gap(1.0 / spec.c, 2.0 / spec.c);
            double x = 0.0;
            for (int i = 0; i < spec.n; ++i) {
                pts.push_back({x, uy(rng)});
                x += gap(rng);
            }
            break;
        }
    }
    StripInstance inst(std::move(pts), spec.delta);
    if (!check_generated(spec, inst)) throw ContractViolation("generator output fails its own invariant");
    return inst;
}

bool check_generated(const GenSpec& spec, const StripInstance& inst) {
    if (static_cast<int>(inst.size()) != spec.n || inst.delta() != spec.delta) return false;
    for (const auto& p : inst.points())
        if (p.y < 0 || p.y > spec.delta) return false;
    switch (spec.kind) {
        case GenKind::RandomUniform:
            for (const auto& p : inst.points())
                if (p.x < 0 || p.x > spec.n) return false;
            return true;
        case GenKind::IntegerX:
            for (int i = 0; i < spec.n; ++i)
                if (inst[i].x != i) return false;
            return true;
        case GenKind::Sparse:
            // c + 1 consecutive points never fit in a closed unit window.
            for (std::size_t i = 0; i + spec.c < inst.size(); ++i)
                if (inst[i + spec.c].x - inst[i].x <= 1.0) return false;
            return inst.distinct_x();
    }
    return false;
}

std::uint64_t instance_digest(const StripInstance& inst) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : instance_to_string(inst)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(std::uint64_t d) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

unsigned thread_budget() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("STRIP_TSP_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("STRIP_TSP_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

// ---- counterexample -------------------------------------------------------------

CounterexampleResult counterexample_search(double delta) {
    if (!(delta > 0) || !std::isfinite(delta)) throw PreconditionError("delta must be positive");
    CounterexampleResult best;
    best.delta = delta;
    const double levels[3] = {0.0, delta / 2, delta};
    for (int code = 0; code < 243; ++code) {
        std::vector<Point> pts;
        for (int i = 0, c = code; i < 5; ++i, c /= 3) pts.push_back({double(i), levels[c % 3]});
        StripInstance inst(pts, delta);
        ++best.configurations;
        const auto all = enumerate_all_tours(inst);
        const auto shortest = std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
            return a.length < b.length;
        });
        const double bit = bitonic_tsp(inst).length;
        const double gap = bit - shortest->length;
        if (!best.instance || gap > best.gap + 1e-12) {
            best.gap = gap;
            best.bitonic = bit;
            best.optimal = shortest->length;
            best.instance = inst;
            best.optimal_tour = shortest->tour;
        }
    }
    best.found = best.gap > 1e-9;
    return best;
}

// ---- campaigns --------------------------------------------------------------------

Algorithm parse_algorithm(const std::string& s) {
    if (s == "held-karp") return Algorithm::HeldKarp;
    if (s == "bitonic") return Algorithm::Bitonic;
    if (s == "strip-dp") return Algorithm::StripDp;
    throw ConfigError("unknown algorithm '" + s + "'");
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::HeldKarp: return "held-karp";
        case Algorithm::Bitonic: return "bitonic";
        case Algorithm::StripDp: return "strip-dp";
    }
    return "?";
}

namespace {

Comparison parse_comparison(const std::string& s) {
    if (s == "none") return Comparison::None;
    if (s == "equal-length") return Comparison::EqualLength;
    if (s == "tonicity-bound") return Comparison::TonicityBound;
    if (s == "time-ratio") return Comparison::TimeRatio;
    throw ConfigError("unknown comparison '" + s + "'");
}

RunSpec parse_run(const json& j) {
    RunSpec r;
    r.name = j.at("name").get<std::string>();
    for (const auto& k : j.at("generators")) r.kinds.push_back(parse_gen_kind(k.get<std::string>()));
    if (j.contains("n_range")) {
        const auto lo = j["n_range"].at(0).get<int>(), hi = j["n_range"].at(1).get<int>();
        for (int n = lo; n <= hi; ++n) r.sizes.push_back(n);
    } else {
        r.sizes = j.at("n").get<std::vector<int>>();
    }
    r.deltas = j.at("delta").get<std::vector<double>>();
    r.c = j.value("c", 2);
    r.count = j.value("count", 1);
    r.seed = j.value("seed", std::uint64_t{1});
    for (const auto& a : j.at("algorithms")) r.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    r.compare = parse_comparison(j.value("compare", std::string("none")));
    r.tolerance = j.value("tolerance", 1e-9);
    if (j.contains("ratio")) {
        r.ratio_lo = j["ratio"].at(0).get<double>();
        r.ratio_hi = j["ratio"].at(1).get<double>();
    }
    r.deadline_factor = j.value("deadline_factor", 0.0);
    if (j.contains("dp")) {
        const auto& d = j["dp"];
        r.dp.c1 = d.value("c1", r.dp.c1);
        r.dp.cstar = d.value("cstar", r.dp.cstar);
        r.dp.max_cross = d.value("max_cross", r.dp.max_cross);
        r.dp.block_cap = d.value("block_cap", r.dp.block_cap);
    }

    if (r.kinds.empty() || r.sizes.empty() || r.deltas.empty()) throw ConfigError(r.name + ": empty generator list");
    if (r.algorithms.empty()) throw ConfigError(r.name + ": empty algorithm list");
    if (r.count < 1) throw ConfigError(r.name + ": count must be positive");
    const auto has = [&](Algorithm a) { return std::find(r.algorithms.begin(), r.algorithms.end(), a) != r.algorithms.end(); };
    if (r.compare == Comparison::EqualLength && r.algorithms.size() < 2)
        throw ConfigError(r.name + ": equal-length needs two algorithms");
    if (r.compare == Comparison::TonicityBound) {
        if (!has(Algorithm::HeldKarp)) throw ConfigError(r.name + ": tonicity-bound needs held-karp");
        for (auto k : r.kinds)
            if (k == GenKind::RandomUniform) throw ConfigError(r.name + ": no tonicity bound for random-uniform");
    }
    if (r.compare == Comparison::TimeRatio && !(r.ratio_hi > 0))
        throw ConfigError(r.name + ": time-ratio needs \"ratio\": [lo, hi]");
    return r;
}

struct AlgoRun {
    Algorithm algo;
    double length = 0.0;
    Tour tour;
    double seconds = 0.0;
    bool timed_out = false;
    std::string error;
};

struct InstanceRun {
    GenSpec spec;
    std::uint64_t digest = 0;
    std::vector<AlgoRun> algos;
    std::vector<std::string> failures;
};

AlgoRun run_algorithm(Algorithm a, const StripInstance& inst, StripDpOptions dp) {
    AlgoRun r;
    r.algo = a;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (a) {
            case Algorithm::HeldKarp: {
                auto res = held_karp(inst);
                r.tour = res.tour;
                r.length = res.length;
                break;
            }
            case Algorithm::Bitonic: {
                auto res = bitonic_tsp(inst);
                r.tour = res.tour;
                r.length = res.length;
                break;
            }
            case Algorithm::StripDp: {
                auto res = narrow_rect_tsp(inst, dp);
                r.tour = res.tour;
                r.length = res.length;
                break;
            }
        }
    } catch (const DeadlineExceeded&) {
        r.timed_out = true;
        r.error = "deadline exceeded";
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void check_instance(const RunSpec& run, const StripInstance& inst, InstanceRun& ir) {
    for (const auto& a : ir.algos)
        if (!a.error.empty() && !a.timed_out) ir.failures.push_back(to_string(a.algo) + ": " + a.error);
    if (!ir.failures.empty()) return;
    if (run.compare == Comparison::EqualLength) {
        const double ref = ir.algos.front().length;
        for (const auto& a : ir.algos)
            if (std::abs(a.length - ref) > run.tolerance * std::max(1.0, ref)) {
                std::ostringstream m;
                m.precision(17);
                m << to_string(a.algo) << " length " << a.length << " vs " << to_string(ir.algos.front().algo) << " "
                  << ref;
                ir.failures.push_back(m.str());
            }
    }
    if (run.compare == Comparison::TonicityBound) {
        const auto hk = std::find_if(ir.algos.begin(), ir.algos.end(), [](const AlgoRun& a) { return a.algo == Algorithm::HeldKarp; });
        const int k = ir.spec.kind == GenKind::IntegerX ? tonicity_bound_integer(ir.spec.delta)
                                                        : tonicity_bound_sparse(ir.spec.delta, ir.spec.c);
        const Tour reduced = reduce_tonicity(hk->tour, inst);
        if (std::abs(tour_length(inst, reduced) - hk->length) > 1e-9 * std::max(1.0, hk->length))
            ir.failures.push_back("reduction changed the tour length");
        if (!is_k_tonic(reduced.edges(), 2 * k, inst))
            ir.failures.push_back("reduced optimum is not " + std::to_string(2 * k) + "-tonic");
    }
}

json spec_json(const GenSpec& s) {
    json j{{"kind", to_string(s.kind)}, {"n", s.n}, {"delta", s.delta}, {"seed", s.seed}};
    if (s.kind == GenKind::Sparse) j["c"] = s.c;
    return j;
}

}  // namespace

int CampaignResult::violations() const {
    int v = 0;
    for (const auto& r : runs) v += r.violations;
    return v;
}

CampaignConfig parse_campaign(const std::string& json_text) {
    CampaignConfig cfg;
    try {
        const json doc = json::parse(json_text);
        cfg.name = doc.value("name", std::string("campaign"));
        for (const auto& r : doc.at("runs")) cfg.runs.push_back(parse_run(r));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("campaign config: ") + e.what());
    }
    if (cfg.runs.empty()) throw ConfigError("campaign config has no runs");
    return cfg;
}

CampaignConfig load_campaign(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open campaign config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_campaign(ss.str());
}

GenSpec instance_spec(const RunSpec& run, int i) {
    const int nk = static_cast<int>(run.kinds.size()), nd = static_cast<int>(run.deltas.size());
    const int ns = static_cast<int>(run.sizes.size());
    GenSpec s;
    s.kind = run.kinds[i % nk];
    s.delta = run.deltas[(i / nk) % nd];
    s.n = run.sizes[(i / (nk * nd)) % ns];
    s.c = run.c;
    // Spread seeds so neighbouring runs do not share streams.
    std::seed_seq seq{static_cast<std::uint32_t>(run.seed), static_cast<std::uint32_t>(run.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 mix(seq);
    s.seed = mix();
    return s;
}

CampaignResult run_campaign(const CampaignConfig& cfg, std::ostream* report, unsigned threads) {
    CampaignResult result;
    for (const auto& run : cfg.runs) {
        RunSummary sum;
        sum.name = run.name;
        sum.instances = run.count;
        std::vector<InstanceRun> runs(run.count);
        const auto t0 = std::chrono::steady_clock::now();

        auto do_one = [&](int i, std::optional<double> budget) {
            InstanceRun& ir = runs[i];
            ir.spec = instance_spec(run, i);
            const StripInstance inst = generate(ir.spec);
            ir.digest = instance_digest(inst);
            for (auto a : run.algorithms) {
                StripDpOptions dp = run.dp;
                if (budget)
                    dp.deadline = std::chrono::steady_clock::now() +
                                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(*budget));
                ir.algos.push_back(run_algorithm(a, inst, dp));
            }
            check_instance(run, inst, ir);
        };

        if (run.compare == Comparison::TimeRatio) {
            // Timed runs stay sequential so they do not compete for cores.
            for (int i = 0; i < run.count; ++i) {
                std::optional<double> budget;
                if (i > 0 && run.deadline_factor > 0) budget = run.deadline_factor * runs[0].algos.front().seconds;
                do_one(i, budget);
            }
            for (int i = 1; i < run.count; ++i) {
                const auto& prev = runs[i - 1].algos.front();
                const auto& cur = runs[i].algos.front();
                const double ratio = cur.seconds / std::max(prev.seconds, 1e-9);
                std::ostringstream m;
                m << "time ratio " << ratio << " (" << cur.seconds << " s / " << prev.seconds << " s)";
                if (cur.timed_out) m << ", stopped at the deadline";
                if (cur.timed_out || ratio < run.ratio_lo || ratio > run.ratio_hi) runs[i].failures.push_back(m.str());
                sum.messages.push_back(m.str());
            }
        } else {
            std::atomic<int> next{0};
            auto worker = [&] {
                for (int i; (i = next++) < run.count;) do_one(i, std::nullopt);
            };
            const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(run.count)));
            std::vector<std::thread> pool;
            for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker);
            worker();
            for (auto& th : pool) th.join();
        }
        sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        for (int i = 0; i < run.count; ++i) {
            const auto& ir = runs[i];
            sum.times.push_back(ir.algos.front().seconds);
            sum.violations += !ir.failures.empty();
            for (const auto& f : ir.failures) sum.messages.push_back("instance " + std::to_string(i) + ": " + f);
            if (!report) continue;
            for (const auto& a : ir.algos) {
                json line{{"schema", kReportSchema},
                          {"campaign", cfg.name},
                          {"run", run.name},
                          {"index", i},
                          {"algorithm", to_string(a.algo)},
                          {"generator", spec_json(ir.spec)},
                          {"digest", digest_hex(ir.digest)},
                          {"elapsed_s", a.seconds}};
                if (a.error.empty()) {
                    line["length"] = a.length;
                    line["tour"] = a.tour.order();
                } else {
                    line["error"] = a.error;
                }
                if (a.algo == Algorithm::StripDp)
                    line["params"] = {{"c1", run.dp.c1}, {"cstar", run.dp.cstar}, {"max_cross", run.dp.max_cross},
                                      {"block_cap", run.dp.block_cap}};
                *report << line.dump() << '\n';
            }
            for (const auto& f : ir.failures)
                *report << json{{"schema", kReportSchema}, {"run", run.name}, {"index", i}, {"violation", f}}.dump()
                        << '\n';
        }
        if (report)
            *report << json{{"schema", kReportSchema},
                            {"run", run.name},
                            {"summary", {{"instances", sum.instances}, {"violations", sum.violations}, {"seconds", sum.seconds}}}}
                           .dump()
                    << '\n';
        result.runs.push_back(std::move(sum));
    }
    return result;
}

}  // namespace striptsp
