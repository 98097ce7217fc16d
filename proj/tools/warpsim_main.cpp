#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "warpsim/analysis.hpp"
#include "warpsim/errors.hpp"
#include "warpsim/gamma_space.hpp"
#include "warpsim/moments.hpp"
#include "warpsim/montecarlo.hpp"
#include "warpsim/samplers.hpp"
#include "warpsim/validate.hpp"
#include "warpsim/warp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace warpsim;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string now_utc() {
    auto now = std::chrono::system_clock::now();
    return format_iso8601(
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

void write_manifest(const fs::path& dir, const std::string& command, const json& params,
                    std::uint64_t master_seed) {
    json m;
    m["schema_version"] = 1;
    m["command"] = command;
    m["parameters"] = params;
    m["master_seed"] = master_seed;
    m["tool_version"] = kVersion;
    m["created_utc"] = now_utc();
    std::ofstream os(dir / "manifest.json");
    if (!os) throw IngestionError("cannot write manifest in " + dir.string());
    os << m.dump(2) << '\n';
}

TargetWarp resolve_target(const std::string& name) {
    if (name.rfind("file:", 0) == 0) {
        WarpPath path = read_warp_csv(name.substr(5));
        return TargetWarp::empirical(path, name);
    }
    return TargetWarp::by_name(name);
}

std::int64_t parse_time_flexible(const std::string& s) {
    if (s.size() == 4) return parse_iso8601(s + "-01-01");
    return parse_iso8601(s);
}

// "START..END"
std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
    auto pos = s.find("..");
    if (pos == std::string::npos)
        throw InvalidParameterError("range must look like START..END: " + s);
    return {parse_time_flexible(s.substr(0, pos)), parse_time_flexible(s.substr(pos + 2))};
}

// "label:START..END;label:START..END"
std::vector<PeriodSpec> parse_periods(const std::string& s) {
    std::vector<PeriodSpec> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw InvalidParameterError("period must look like label:START..END: " + item);
        auto range = parse_range(item.substr(colon + 1));
        out.push_back({item.substr(0, colon), range.first, range.second});
    }
    if (out.empty()) throw InvalidParameterError("no periods given");
    return out;
}

// "label:START:COUNT:DRIFT[:SCALE];..."
std::vector<SynthPeriodSpec> parse_synth(const std::string& s) {
    std::vector<SynthPeriodSpec> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string f;
        while (std::getline(is, f, ':')) parts.push_back(f);
        if (parts.size() < 4)
            throw InvalidParameterError(
                "synthesis period must look like label:START:COUNT:DRIFT[:SCALE]: " + item);
        SynthPeriodSpec sp;
        sp.label = parts[0];
        sp.start = parse_time_flexible(parts[1]);
        sp.count = std::stoull(parts[2]);
        sp.location_shift = std::stod(parts[3]);
        sp.scale = parts.size() > 4 ? std::stod(parts[4]) : 1.0;
        out.push_back(sp);
    }
    if (out.empty()) throw InvalidParameterError("no synthesis periods given");
    return out;
}

struct SimulateArgs {
    std::string algo;
    std::size_t n = 25;
    std::size_t m = 0;
    double theta = 0.0;
    double p = 0.5;
    std::string target = "phi1";
    std::size_t paths = 1;
    std::uint64_t seed = 0;
    std::string out = ".";
    bool theta_set = false;
};

int cmd_simulate(const SimulateArgs& a) {
    const bool needs_theta = a.algo != "mzw-original";
    if (needs_theta && !a.theta_set) {
        std::cerr << "simulate: --theta is required for --algo " << a.algo << "\n";
        return kExitUsage;
    }
    TargetWarp target = resolve_target(a.target);
    fs::create_directories(a.out);

    std::size_t m = a.m ? a.m : a.n;
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 / ((i + 1.0) * (i + 1.0));

    RngStream root(a.seed);
    for (std::size_t k = 0; k < a.paths; ++k) {
        RngStream rs = root.split(k);
        WarpPath path = WarpPath::identity();
        if (a.algo == "cdh") {
            std::vector<double> grid(a.n + 2);
            for (std::size_t i = 0; i < a.n + 2; ++i)
                grid[i] = static_cast<double>(i) / static_cast<double>(a.n + 1);
            grid.back() = 1.0;
            path = simulate_cdh(a.n, grid, a.theta, rs);
        } else if (a.algo == "bk") {
            path = simulate_bk({a.n, a.theta, target}, rs);
        } else if (a.algo == "cdf") {
            path = simulate_cdf({a.n, a.theta, a.p, target}, rs);
        } else if (a.algo == "mzw") {
            path = simulate_mzw({m, a.theta, v, target, nullptr}, rs);
        } else if (a.algo == "mzw-original") {
            path = simulate_mzw_original(m, v, rs);
        } else {
            std::cerr << "simulate: unknown --algo " << a.algo << "\n";
            return kExitUsage;
        }
        char name[32];
        std::snprintf(name, sizeof(name), "path_%04zu.csv", k);
        write_warp_csv((fs::path(a.out) / name).string(), path);
    }

    json params{{"algo", a.algo},       {"n", a.n},         {"m", m},
                {"theta", a.theta},     {"p", a.p},         {"target", a.target},
                {"paths", a.paths}};
    write_manifest(a.out, "simulate", params, a.seed);
    return kExitOk;
}

struct OracleArgs {
    std::string algo = "cdf";
    std::size_t n = 25;
    double theta = 1.0;
    double p = 0.5;
    std::string target = "phi3";
    std::size_t grid_size = 99;
    std::string out = ".";
};

int cmd_oracle(const OracleArgs& a) {
    if (a.algo != "bk" && a.algo != "cdf") {
        std::cerr << "oracle: --algo must be bk or cdf\n";
        return kExitUsage;
    }
    TargetWarp target = resolve_target(a.target);
    fs::create_directories(a.out);

    std::vector<double> grid(a.grid_size);
    for (std::size_t i = 0; i < a.grid_size; ++i)
        grid[i] = static_cast<double>(i + 1) / static_cast<double>(a.grid_size + 1);

    MomentProfile asym = asymptotic_profile(grid, a.theta, target);
    MomentProfile exact;
    exact.grid = grid;
    exact.kind = "exact";
    exact.algorithm = a.algo;
    exact.size_param = a.n;
    exact.theta = a.theta;
    exact.p = a.p;
    for (double t : grid) {
        if (a.algo == "bk") {
            exact.mean.push_back(bk_mean_exact(t, a.n, target));
            exact.variance.push_back(bk_var_exact(t, a.n, a.theta, target));
        } else {
            exact.mean.push_back(cdf_mean_exact(t, a.n, a.p, target));
            exact.variance.push_back(cdf_var_exact(t, a.n, a.theta, a.p, target));
        }
    }
    exact.finalize();

    std::ofstream os(fs::path(a.out) / "profile.csv");
    os << "t,mean_exact,var_exact,mean_asymptotic,var_asymptotic,mean_gap,var_gap\n";
    os.precision(17);
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << grid[i] << ',' << exact.mean[i] << ',' << exact.variance[i] << ','
           << asym.mean[i] << ',' << asym.variance[i] << ',' << exact.mean[i] - asym.mean[i]
           << ',' << exact.variance[i] - asym.variance[i] << '\n';

    json params{{"algo", a.algo}, {"n", a.n},           {"theta", a.theta},
                {"p", a.p},       {"target", a.target}, {"grid_size", a.grid_size}};
    write_manifest(a.out, "oracle", params, 0);
    return kExitOk;
}

struct ValidateArgs {
    std::string suite = "moments";
    std::uint64_t seed = 2024;
    int threads = 0;
    bool include_long = false;
    std::string out = ".";
};

int cmd_validate(const ValidateArgs& a) {
    ValidateOptions opts;
    opts.master_seed = a.seed;
    opts.threads = a.threads;
    opts.include_long = a.include_long;

    std::vector<std::string> names;
    if (a.suite == "all") {
        names = {"moments", "rates",      "l2",    "frechet",     "mzw-limit",
                 "table2",  "structural", "drift", "convergence", "theta-sweep"};
    } else {
        names = {a.suite};
    }

    fs::create_directories(a.out);
    bool all_ok = true;
    json report = json::array();
    for (const auto& name : names) {
        SuiteResult suite = run_suite_by_name(name, opts);
        report.push_back(json::parse(suite_json(suite)));
        for (const auto& c : suite.checks) {
            std::cout << (c.passed ? "PASS" : "FAIL") << " [" << suite.suite << "] " << c.name;
            if (!c.passed)
                std::cout << " (measured " << c.measured << ", tolerance " << c.tolerance
                          << (c.details.empty() ? "" : "; " + c.details) << ")";
            std::cout << "\n";
            all_ok = all_ok && c.passed;
        }
    }
    {
        std::ofstream os(fs::path(a.out) / "validate_report.json");
        os << report.dump(2) << '\n';
    }
    json params{{"suite", a.suite}, {"threads", a.threads}, {"include_long", a.include_long}};
    write_manifest(a.out, "validate", params, a.seed);
    return all_ok ? kExitOk : kExitCheckFailed;
}

struct AnalyzeArgs {
    std::string data;
    std::string synthesize;
    std::string reference;
    std::string periods;
    std::size_t m = 50;
    std::size_t B = 100;
    double alpha = 0.05;
    double p = 0.5;
    std::uint64_t seed = 0;
    std::string out = ".";
};

int cmd_analyze(const AnalyzeArgs& a) {
    if (a.data.empty() == a.synthesize.empty()) {
        std::cerr << "analyze: exactly one of --data / --synthesize is required\n";
        return kExitUsage;
    }
    if (a.reference.empty()) {
        std::cerr << "analyze: --reference START..END is required\n";
        return kExitUsage;
    }

    std::vector<Record> records;
    std::vector<PeriodSpec> periods;
    std::size_t skipped = 0;
    if (!a.data.empty()) {
        if (a.periods.empty()) {
            std::cerr << "analyze: --periods is required with --data\n";
            return kExitUsage;
        }
        IngestResult in = load_observations_csv(a.data);
        records = std::move(in.records);
        skipped = in.skipped;
        if (skipped) std::cerr << "analyze: skipped " << skipped << " malformed rows\n";
        periods = parse_periods(a.periods);
    } else {
        auto synth = parse_synth(a.synthesize);
        RngStream rng(a.seed, 999);
        records = synthesize_temperature(synth, rng);
        if (!a.periods.empty()) {
            periods = parse_periods(a.periods);
        } else {
            for (const auto& s : synth)
                periods.push_back(
                    {s.label, s.start, s.start + static_cast<std::int64_t>(s.count) * 3600});
        }
    }

    auto range = parse_range(a.reference);
    AnalyzeOptions opts;
    opts.m = a.m;
    opts.B = a.B;
    opts.alpha = a.alpha;
    opts.p = a.p;
    opts.master_seed = a.seed;

    auto results = analyze_periods(records, range.first, range.second, periods, opts);
    fs::create_directories(a.out);
    for (const auto& pa : results) {
        std::ofstream os(fs::path(a.out) / ("band_" + pa.label + ".csv"));
        write_band_csv(os, pa.band);
        std::ofstream js(fs::path(a.out) / ("band_" + pa.label + ".json"));
        json meta = json::parse(band_metadata_json(pa.band, a.seed));
        meta["label"] = pa.label;
        meta["count"] = pa.count;
        meta["n_i"] = pa.n_i;
        meta["theta_negative_flagged"] = pa.theta.negative_flagged;
        js << meta.dump(2) << '\n';
        std::cout << pa.label << ": theta_hat=" << pa.band.theta_hat
                  << " h=" << pa.band.half_width << " n_i=" << pa.n_i << "\n";
    }

    json params{{"data", a.data},
                {"synthesize", a.synthesize},
                {"reference", a.reference},
                {"periods", a.periods},
                {"m", a.m},
                {"B", a.B},
                {"alpha", a.alpha},
                {"p", a.p},
                {"skipped_rows", skipped}};
    write_manifest(a.out, "analyze", params, a.seed);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"warping-process simulation, moment oracles and drift analysis"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "draw warping paths and write them as CSV");
    s->add_option("--algo", sim.algo, "cdh|bk|cdf|mzw|mzw-original")->required();
    s->add_option("--n", sim.n, "partition size (cdh, bk, cdf)");
    s->add_option("--m", sim.m, "truncation order (mzw family); defaults to --n");
    auto* theta_opt = s->add_option("--theta", sim.theta, "concentration parameter");
    s->add_option("--p", sim.p, "knot localization in (0,1) (cdf)");
    s->add_option("--target", sim.target, "phi1|phi2|phi3|file:PATH");
    s->add_option("--paths", sim.paths, "number of paths");
    s->add_option("--seed", sim.seed, "master seed");
    s->add_option("--out", sim.out, "output directory");

    OracleArgs ora;
    auto* o = app.add_subcommand("oracle", "exact and asymptotic moment profiles");
    o->add_option("--algo", ora.algo, "bk|cdf")->required();
    o->add_option("--n", ora.n, "partition size")->required();
    o->add_option("--theta", ora.theta, "concentration parameter")->required();
    o->add_option("--p", ora.p, "knot localization (cdf)");
    o->add_option("--target", ora.target, "phi1|phi2|phi3|file:PATH");
    o->add_option("--grid-size", ora.grid_size, "number of interior grid points");
    o->add_option("--out", ora.out, "output directory");

    ValidateArgs val;
    auto* v = app.add_subcommand("validate", "run a validation suite; exit 0 iff it passes");
    v->add_option("--suite", val.suite,
                  "moments|rates|l2|frechet|mzw-limit|table2|structural|drift|"
                  "convergence|theta-sweep|all")
        ->required();
    v->add_option("--seed", val.seed, "master seed");
    v->add_option("--threads", val.threads, "thread cap (0 = all cores)");
    v->add_flag("--include-long", val.include_long, "include the n=40000 estimator cells");
    v->add_option("--out", val.out, "output directory for the JSON report");

    AnalyzeArgs ana;
    auto* an = app.add_subcommand("analyze", "quantile-warp drift analysis with bootstrap bands");
    an->add_option("--data", ana.data, "observations CSV (timestamp,value)");
    an->add_option("--synthesize", ana.synthesize,
                   "synthesize data: label:START:COUNT:DRIFT[:SCALE];...");
    an->add_option("--reference", ana.reference, "reference range START..END")->required();
    an->add_option("--periods", ana.periods, "periods label:START..END;...");
    an->add_option("--m", ana.m, "sub-samples per period");
    an->add_option("--B", ana.B, "bootstrap replicates");
    an->add_option("--alpha", ana.alpha, "band level (coverage 1-alpha)");
    an->add_option("--p", ana.p, "knot localization for the fitted sampler");
    an->add_option("--seed", ana.seed, "master seed");
    an->add_option("--out", ana.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (s->parsed()) {
            sim.theta_set = theta_opt->count() > 0;
            return cmd_simulate(sim);
        }
        if (o->parsed()) return cmd_oracle(ora);
        if (v->parsed()) return cmd_validate(val);
        if (an->parsed()) return cmd_analyze(ana);
    } catch (const InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IngestionError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const InsufficientSampleError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateWarpError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateEstimateError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
