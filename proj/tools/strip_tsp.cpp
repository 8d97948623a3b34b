#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "striptsp/bitonic.h"
#include "striptsp/errors.h"
#include "striptsp/exact_oracle.h"
#include "striptsp/harness.h"
#include "striptsp/prover.h"
#include "striptsp/strip_dp.h"
#include "striptsp/tonicity.h"

using namespace striptsp;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kViolation = 1, kUsage = 2;

json tour_json(const Tour& t) { return t.order(); }

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot write " + path);
    return file;
}

int cmd_gen(const std::string& kind, int n, double delta, int c, std::uint64_t seed, const std::string& out) {
    const auto inst = generate({parse_gen_kind(kind), n, delta, c, seed});
    std::ofstream f;
    write_instance(open_out(out, f), inst);
    return kOk;
}

int cmd_solve(const std::string& input, const std::string& algo, const StripDpOptions& dp) {
    const auto inst = read_instance_file(input);
    const auto a = parse_algorithm(algo);
    const auto t0 = std::chrono::steady_clock::now();
    TourResult r;
    json extra;
    switch (a) {
        case Algorithm::HeldKarp: r = held_karp(inst); break;
        case Algorithm::Bitonic: r = bitonic_tsp(inst); break;
        case Algorithm::StripDp: {
            const auto s = narrow_rect_tsp(inst, dp);
            r = {s.tour, s.length};
            extra = {{"t", s.stats.t}, {"k", s.stats.k}, {"states", s.stats.states},
                     {"block_solves", s.stats.block_solves}, {"joins", s.stats.joins}};
            break;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j{{"schema", kReportSchema},
           {"algorithm", to_string(a)},
           {"digest", digest_hex(instance_digest(inst))},
           {"n", inst.size()},
           {"delta", inst.delta()},
           {"length", r.length},
           {"tour", tour_json(r.tour)},
           {"elapsed_s", secs}};
    if (a == Algorithm::StripDp) {
        j["params"] = {{"c1", dp.c1}, {"cstar", dp.cstar}, {"max_cross", dp.max_cross}, {"block_cap", dp.block_cap}};
        j["stats"] = extra;
    }
    std::cout << j.dump() << '\n';
    return kOk;
}

int cmd_prove(int n_left, int n_right, const ProverOptions& opts, const std::string& cases_path, const std::string& out) {
    const auto cases = load_cases(cases_path);
    const auto& c = find_case(cases, n_left, n_right);
    const auto t0 = std::chrono::steady_clock::now();
    const auto outcomes = find_shorter_tour(c, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t fails = 0, bad_certs = 0;
    for (const auto& o : outcomes) {
        if (o.verdict == Verdict::Fail)
            ++fails;
        else
            bad_certs += !verify_certificate(c, o, opts);
    }
    const bool covered = check_coverage(c, outcomes, opts.delta);
    const auto failing = failing_x_assignments(outcomes);

    std::cout << "case (" << n_left << "," << n_right << ") delta=" << opts.delta << " epsilon=" << opts.epsilon
              << ": " << outcomes.size() << " scenarios, " << fails << " FAIL, " << bad_certs
              << " rejected certificates, coverage " << (covered ? "exact" : "BROKEN") << ", " << secs << " s\n";
    for (const auto& x : failing) {
        std::cout << "  FAIL at x-assignment";
        for (std::size_t p = 0; p < x.size(); ++p) std::cout << ' ' << c.points[p].name << '=' << x[p];
        std::cout << '\n';
    }

    if (!out.empty()) {
        json rep{{"schema", kReportSchema}, {"n_left", n_left}, {"n_right", n_right}, {"delta", opts.delta},
                 {"epsilon", opts.epsilon}, {"eta", opts.eta}};
        for (const auto& p : c.points) rep["points"].push_back({{"name", p.name}, {"copies", p.copies}});
        rep["scenarios"] = json::array();
        for (const auto& o : outcomes) {
            json s{{"x_assign", o.scenario.x}, {"verdict", o.verdict == Verdict::Success ? "SUCCESS" : "FAIL"}};
            for (const auto& r : o.scenario.y) s["y_ranges"].push_back({r.lo, r.hi});
            if (o.verdict == Verdict::Success) {
                for (auto [u, v] : o.witness.pairs) s["witness"].push_back({u, v});
            } else {
                s["witness"] = nullptr;
            }
            rep["scenarios"].push_back(std::move(s));
        }
        std::ofstream f;
        open_out(out, f) << rep.dump() << '\n';
    }
    return bad_certs == 0 && covered ? kOk : kViolation;
}

int cmd_tonicity(const std::string& input, std::optional<int> k_opt) {
    const auto inst = read_instance_file(input);
    if (!inst.distinct_x()) throw PreconditionError("tonicity needs distinct x-coordinates");
    const auto opt = inst.size() <= 13 ? held_karp(inst) : [&] {
        const auto s = narrow_rect_tsp(inst);
        return TourResult{s.tour, s.length};
    }();
    const auto red = reduce_tonicity_traced(opt.tour, inst);

    bool integer_x = true;
    for (const auto& p : inst.points()) integer_x = integer_x && std::floor(p.x) == p.x;
    const std::optional<int> k = k_opt ? k_opt : integer_x ? std::optional<int>(tonicity_bound_integer(inst.delta())) : std::nullopt;

    auto print_profile = [&](const char* label, const Tour& t) {
        std::cout << label;
        for (int v : tonicity_profile(t.edges(), inst)) std::cout << ' ' << v;
        std::cout << '\n';
    };
    std::cout << "length " << opt.length << '\n';
    print_profile("profile", opt.tour);
    for (const auto& s : red.swaps)
        std::cout << "swap at s" << s.separator << ": (" << s.first.from << "," << s.first.to << ") (" << s.second.from
                  << "," << s.second.to << ") gain " << s.gain << '\n';
    print_profile("reduced", red.tour);
    if (!k) {
        std::cout << "bound: none (pass --k)\n";
        return kOk;
    }
    const bool ok = is_k_tonic(red.tour.edges(), 2 * *k, inst);
    std::cout << "bound 2k = " << 2 * *k << ": " << (ok ? "holds" : "VIOLATED") << '\n';
    return ok ? kOk : kViolation;
}

int cmd_counterexample(double delta, const std::string& out) {
    const auto r = counterexample_search(delta);
    std::cout << "delta " << delta << ": " << r.configurations << " configurations, largest gap " << r.gap
              << (r.found ? " (counterexample)" : " (none)") << '\n';
    if (r.found) {
        std::cout << "closed form sqrt(1+delta^2)-3 = " << std::sqrt(1 + delta * delta) - 3 << '\n';
        std::ofstream f;
        write_instance(open_out(out, f), *r.instance);
    }
    return kOk;
}

int cmd_campaign(const std::string& config, const std::string& out) {
    const auto cfg = load_campaign(config);
    std::ofstream f;
    std::ostream* report = nullptr;
    if (!out.empty()) report = &open_out(out, f);
    const auto res = run_campaign(cfg, report, thread_budget());
    for (const auto& r : res.runs) {
        std::cerr << r.name << ": " << r.instances << " instances, " << r.violations << " violations, " << r.seconds
                  << " s\n";
        for (const auto& m : r.messages) std::cerr << "  " << m << '\n';
    }
    return res.violations() == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shortest tours for points in a narrow strip"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate an instance");
    std::string kind = "random-uniform", out;
    int n = 10, c = 2;
    double delta = 1.0;
    std::uint64_t seed = 1;
    gen->add_option("--kind", kind, "random-uniform | integer-x | sparse");
    gen->add_option("--n", n)->required();
    gen->add_option("--delta", delta)->required();
    gen->add_option("--c", c, "sparse density");
    gen->add_option("--seed", seed);
    gen->add_option("--out", out);

    auto* solve = app.add_subcommand("solve", "solve an instance file");
    std::string input, algo = "strip-dp";
    StripDpOptions dp;
    solve->add_option("--input", input)->required();
    solve->add_option("--algo", algo, "held-karp | bitonic | strip-dp");
    solve->add_option("--c1", dp.c1);
    solve->add_option("--cstar", dp.cstar);
    solve->add_option("--max-cross", dp.max_cross);
    solve->add_option("--block-cap", dp.block_cap);

    auto* prove = app.add_subcommand("prove", "run the case prover");
    int n_left = 2, n_right = 2;
    ProverOptions popts;
    popts.threads = 0;
    std::string cases_path = STRIPTSP_DATA_DIR "/cases.json";
    prove->add_option("--nleft", n_left)->required();
    prove->add_option("--nright", n_right)->required();
    prove->add_option("--epsilon", popts.epsilon);
    prove->add_option("--delta", popts.delta);
    prove->add_option("--cases", cases_path);
    prove->add_option("--out", out);

    auto* ton = app.add_subcommand("tonicity", "tonicity profile and reduction of an optimal tour");
    std::optional<int> k;
    ton->add_option("--input", input)->required();
    ton->add_option("--k", k);

    auto* cex = app.add_subcommand("counterexample", "search the five-point family");
    double cex_delta = 3.0;
    cex->add_option("--delta", cex_delta);
    cex->add_option("--out", out);

    auto* camp = app.add_subcommand("campaign", "run a campaign config");
    std::string config;
    camp->add_option("--config", config)->required();
    camp->add_option("--out", out, "JSON-lines report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(kind, n, delta, c, seed, out);
        if (*solve) return cmd_solve(input, algo, dp);
        if (*prove) {
            if (popts.threads == 0) popts.threads = thread_budget();
            return cmd_prove(n_left, n_right, popts, cases_path, out);
        }
        if (*ton) return cmd_tonicity(input, k);
        if (*cex) return cmd_counterexample(cex_delta, out);
        if (*camp) return cmd_campaign(config, out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
