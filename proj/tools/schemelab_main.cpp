// schemelab command-line surface: build/verify/evaluate with deterministic,
// config-stamped JSON/CSV outputs.
//
// Exit codes: 0 success or verified-true, 1 verified-false (a mathematical
// finding), 2 usage/parse/structural error, 3 enumeration budget exceeded.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schemelab/json_io.hpp"

namespace sl = schemelab;
using sl::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("SCHEMELAB_OUT_DIR")) {
        std::filesystem::create_directories(dir);
        return (std::filesystem::path(dir) / p).string();
    }
    return path;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Emitter {
    json config;
    std::string out_path;
    std::string record_path;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    /// Writes {"config","result"} to --out (deterministic bytes) and, when
    /// requested, the RunRecord wrapper with version/timestamp/duration.
    void emit(const json& result) const {
        const json payload{{"config", config}, {"result", result}};
        if (!out_path.empty()) sl::write_text_file(resolve_out(out_path), payload.dump(2) + "\n");
        if (!record_path.empty()) {
            const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - started)
                                     .count();
            const json record{{"config", config},
                              {"version", kVersion},
                              {"timestamp", iso_timestamp()},
                              {"duration_ms", elapsed},
                              {"result", result}};
            sl::write_text_file(resolve_out(record_path), record.dump(2) + "\n");
        }
    }
};

sl::Learner learner_by_name(const std::string& name) {
    if (name == "rank") return sl::rank_learner();
    throw sl::SchemaError("unknown learner: " + name);
}

sl::CompressionScheme scheme_by_name(const std::string& name) {
    if (name == "max") return sl::max_scheme();
    throw sl::SchemaError("unknown scheme: " + name);
}

std::vector<double> parse_point(const std::string& csv) {
    std::vector<double> x;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            x.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw sl::SchemaError("malformed coordinate: " + item);
        }
    }
    if (x.size() < 2) throw sl::SchemaError("--x needs at least two coordinates");
    return x;
}

// ---------------------------------------------------------------------------
// scheme verify

struct SchemeVerifyArgs {
    std::string scheme_name;
    std::string scheme_file;
    sl::Rank ground_n = -1;
    std::string ground_kind = "naturals";
    int jobs = 1;
    std::string out, fiber_csv, record;
};

int run_scheme_verify(const SchemeVerifyArgs& a) {
    sl::CompressionScheme scheme;
    sl::Rank n = a.ground_n;
    if (!a.scheme_file.empty()) {
        auto [s, table_n] = sl::scheme_from_table(sl::load_json_file(a.scheme_file));
        scheme = std::move(s);
        if (n < 0) n = table_n;
    } else {
        scheme = scheme_by_name(a.scheme_name);
        if (n < 0) throw sl::SchemaError("--ground-n is required for named schemes");
    }
    const sl::OrderedGround ground = a.ground_kind == "rationals"
                                         ? sl::OrderedGround::rationals(n)
                                         : sl::OrderedGround::naturals(n);

    Emitter em;
    em.config = json{{"command", "scheme verify"},
                     {"scheme", a.scheme_file.empty() ? a.scheme_name : a.scheme_file},
                     {"ground", sl::ground_to_json(ground)}};
    em.out_path = a.out;
    em.record_path = a.record;

    const sl::SchemeReport report = sl::verify_scheme(scheme, ground, a.jobs);
    json result = sl::scheme_report_to_json(report);
    result["ground"] = sl::ground_to_json(ground);
    result["scheme"] = json{{"name", scheme.name}, {"m", scheme.m}, {"d", scheme.d}};
    em.emit(result);
    if (!a.fiber_csv.empty())
        sl::write_text_file(resolve_out(a.fiber_csv), sl::fiber_histogram_csv(report));

    std::cout << "scheme verify: monotone_ok=" << (report.monotone_ok ? "true" : "false")
              << " cover_ok=" << (report.cover_ok ? "true" : "false")
              << " max_fiber=" << report.max_fiber << " domain=" << report.domain_size << "\n";
    return report.monotone_ok && report.cover_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// kuratowski

struct KuratowskiArgs {
    int k = 0;
    sl::Rank n = 0;
    std::string policy = "identity";
    std::uint64_t seed = 0;
    std::string in_file;
    std::optional<sl::Rank> stability_n;
    std::string out, fiber_csv, record;
    int jobs = 1;
};

sl::OrderPolicy policy_from_args(const KuratowskiArgs& a) {
    if (a.policy == "identity") return sl::OrderPolicy::identity();
    if (a.policy == "seeded") return sl::OrderPolicy::seeded(a.seed);
    throw sl::SchemaError("unknown policy: " + a.policy);
}

int run_kuratowski_build(const KuratowskiArgs& a) {
    if (a.k < 0) throw sl::SchemaError("--k must be non-negative");
    if (a.n < 1) throw sl::SchemaError("--n must be positive");
    const sl::Decomposition d = sl::build_decomposition(a.k, a.n, policy_from_args(a));
    Emitter em;
    em.config = json{{"command", "kuratowski build"}, {"k", a.k}, {"n", a.n}, {"policy", a.policy},
                     {"seed", a.seed}};
    em.out_path = a.out;
    em.record_path = a.record;
    em.emit(sl::decomposition_to_json(d));
    std::cout << "kuratowski build: k=" << a.k << " n=" << a.n << " points=" << d.points() << "\n";
    return 0;
}

int run_kuratowski_check(const KuratowskiArgs& a) {
    const json file = sl::load_json_file(a.in_file);
    const json& body = file.contains("result") ? file.at("result") : file;
    const sl::Decomposition d = sl::decomposition_from_json(body);
    Emitter em;
    em.config = json{{"command", "kuratowski check"},
                     {"file", a.in_file},
                     {"stability_n", a.stability_n ? json(*a.stability_n) : json(nullptr)}};
    em.out_path = a.out;
    em.record_path = a.record;
    const sl::DecompositionReport report = sl::check_decomposition(d, a.stability_n);
    em.emit(sl::decomposition_report_to_json(report));
    if (!a.fiber_csv.empty())
        sl::write_text_file(resolve_out(a.fiber_csv),
                            sl::direction_fibers_csv(sl::direction_fiber_table(d)));
    std::cout << "kuratowski check: partition_ok=" << (report.partition_ok ? "true" : "false");
    if (report.truncation_stable)
        std::cout << " truncation_stable=" << (*report.truncation_stable ? "true" : "false");
    std::cout << "\n";
    const bool ok = report.partition_ok && (!report.truncation_stable || *report.truncation_stable);
    return ok ? 0 : 1;
}

int run_kuratowski_to_scheme(const KuratowskiArgs& a) {
    const json file = sl::load_json_file(a.in_file);
    const json& body = file.contains("result") ? file.at("result") : file;
    const sl::Decomposition d = sl::decomposition_from_json(body);
    Emitter em;
    em.config = json{{"command", "kuratowski to-scheme"}, {"file", a.in_file}};
    em.out_path = a.out;
    em.record_path = a.record;

    const sl::CompressionScheme scheme = sl::scheme_from_decomposition(d);
    const sl::SchemeReport report =
        sl::verify_scheme(scheme, sl::OrderedGround::naturals(d.side()), a.jobs);
    json result{{"table", sl::scheme_to_table(scheme, d.side())},
                {"verify", sl::scheme_report_to_json(report)}};
    em.emit(result);
    std::cout << "kuratowski to-scheme: m=" << scheme.m << " d=" << scheme.d
              << " monotone_ok=" << (report.monotone_ok ? "true" : "false")
              << " cover_ok=" << (report.cover_ok ? "true" : "false") << "\n";
    return report.monotone_ok && report.cover_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// emx

struct EmxArgs {
    std::vector<std::string> dist_files;
    std::string learner = "rank";
    int d = 3;
    std::string epsilon = "1/3";
    std::string delta; // defaults to epsilon
    std::string mode = "exact";
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::uint64_t budget = sl::kDefaultEnumerationBudget;
    sl::Rank ground_n = 0;
    int jobs = 1;
    std::string out, record;
};

sl::EMXReport eval_one(const EmxArgs& a, const sl::FiniteSupportDistribution& dist) {
    const sl::Learner learner = learner_by_name(a.learner);
    const sl::Rational epsilon = sl::parse_rational(a.epsilon);
    const sl::Rational delta = a.delta.empty() ? epsilon : sl::parse_rational(a.delta);
    if (a.mode == "exact")
        return sl::eval_exact(learner, dist, a.d, epsilon, delta, a.jobs, a.budget);
    if (a.mode == "mc")
        return sl::eval_mc(learner, dist, a.d, epsilon, delta, a.trials, a.seed, a.jobs);
    throw sl::SchemaError("unknown mode: " + a.mode);
}

int run_emx_eval(const EmxArgs& a) {
    if (a.dist_files.size() != 1) throw sl::SchemaError("emx eval takes exactly one --dist file");
    const sl::FiniteSupportDistribution dist =
        sl::distribution_from_json(sl::load_json_file(a.dist_files[0]));
    Emitter em;
    em.config = json{{"command", "emx eval"},     {"dist", a.dist_files[0]}, {"learner", a.learner},
                     {"d", a.d},                  {"epsilon", a.epsilon},
                     {"delta", a.delta.empty() ? a.epsilon : a.delta},       {"mode", a.mode},
                     {"trials", a.trials},        {"seed", a.seed}};
    em.out_path = a.out;
    em.record_path = a.record;
    const sl::EMXReport report = eval_one(a, dist);
    em.emit(sl::emx_report_to_json(report));
    if (report.mode == sl::EMXReport::Mode::exact)
        std::cout << "emx eval: failure_probability=" << sl::rational_to_string(report.failure_probability)
                  << " satisfied=" << (report.satisfied ? "true" : "false") << "\n";
    else
        std::cout << "emx eval: estimate=" << report.estimate << " half_width=" << report.half_width
                  << " satisfied=" << (report.satisfied ? "true" : "false") << "\n";
    return 0;
}

int run_emx_sweep(const EmxArgs& a) {
    if (a.dist_files.empty()) throw sl::SchemaError("emx sweep needs at least one --dist file");
    std::string csv = sl::sweep_csv_header();
    bool all_satisfied = true;
    for (const std::string& path : a.dist_files) {
        const sl::FiniteSupportDistribution dist =
            sl::distribution_from_json(sl::load_json_file(path));
        const sl::EMXReport report = eval_one(a, dist);
        all_satisfied = all_satisfied && report.satisfied;
        csv += sl::sweep_csv_row(std::filesystem::path(path).stem().string(), report);
    }
    if (!a.out.empty()) sl::write_text_file(resolve_out(a.out), csv);
    std::cout << csv;
    return all_satisfied ? 0 : 1;
}

int run_emx_derive_scheme(const EmxArgs& a) {
    if (a.ground_n < 1) throw sl::SchemaError("--ground-n is required");
    const sl::Learner learner = learner_by_name(a.learner);
    const sl::CompressionScheme scheme = sl::scheme_from_learner(learner, a.d);
    const sl::SchemeReport report =
        sl::verify_scheme(scheme, sl::OrderedGround::naturals(a.ground_n), a.jobs);

    Emitter em;
    em.config = json{{"command", "emx derive-scheme"},
                     {"learner", a.learner},
                     {"d", a.d},
                     {"ground_n", a.ground_n}};
    em.out_path = a.out;
    em.record_path = a.record;
    json result{{"m", scheme.m}, {"d", scheme.d}, {"verify", sl::scheme_report_to_json(report)}};
    if (!a.out.empty()) result["table"] = sl::scheme_to_table(scheme, a.ground_n);
    em.emit(result);
    std::cout << "emx derive-scheme: " << scheme.m << "->" << scheme.d
              << " monotone_ok=" << (report.monotone_ok ? "true" : "false")
              << " cover_ok=" << (report.cover_ok ? "true" : "false")
              << " max_fiber=" << report.max_fiber << "\n";
    return report.monotone_ok && report.cover_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// fiber probe

struct FiberArgs {
    std::string selector;
    int m = 2;
    std::uint64_t trials = 1000;
    std::uint64_t witnesses = 1000;
    std::uint64_t points = 1;
    std::uint64_t seed = 0;
    std::string x_csv;
    bool expect_drift = false;
    std::string out, record;
};

int run_fiber_probe(const FiberArgs& a) {
    const auto sel = sl::fiberprobe::find_selector(a.selector);
    if (!sel) throw sl::SchemaError("unknown selector: " + a.selector);

    Emitter em;
    em.config = json{{"command", "fiber probe"}, {"selector", a.selector},      {"m", a.m},
                     {"trials", a.trials},       {"witnesses", a.witnesses},    {"points", a.points},
                     {"seed", a.seed},           {"expect_drift", a.expect_drift}};
    em.out_path = a.out;
    em.record_path = a.record;

    std::vector<std::vector<double>> probe_points;
    if (!a.x_csv.empty()) {
        probe_points.push_back(parse_point(a.x_csv));
    } else {
        for (std::uint64_t i = 0; i < a.points; ++i)
            probe_points.push_back(sl::fiberprobe::random_probe_point(a.m, sl::mix_seed(a.seed, i)));
    }

    json reports = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < probe_points.size(); ++i) {
        const auto& x = probe_points[i];
        const std::uint64_t point_seed = sl::mix_seed(a.seed, 1000 + i);
        try {
            const auto report =
                sl::fiberprobe::probe_point(*sel, x, a.trials, a.witnesses, point_seed);
            reports.push_back(sl::probe_report_to_json(report));
            all_pass = all_pass && report.locally_constant;
        } catch (const sl::ImageDrift& drift) {
            reports.push_back(json{{"selector", a.selector},
                                   {"m", a.m},
                                   {"x", x},
                                   {"image_drift", true},
                                   {"drift_point", drift.point},
                                   {"seed", point_seed}});
            all_pass = false;
        }
    }
    em.emit(json{{"reports", reports}, {"all_pass", all_pass}});
    std::cout << "fiber probe: selector=" << a.selector << " points=" << probe_points.size()
              << " all_pass=" << (all_pass ? "true" : "false") << "\n";
    if (a.expect_drift) return all_pass ? 1 : 0; // the control is supposed to misbehave
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"schemelab: monotone compression schemes, Kuratowski decompositions, EMX evaluation"};
    app.require_subcommand(1);
    std::function<int()> action;

    // scheme verify
    auto* scheme_cmd = app.add_subcommand("scheme", "compression scheme operations");
    scheme_cmd->require_subcommand(1);
    auto sv = std::make_shared<SchemeVerifyArgs>();
    auto* verify_cmd = scheme_cmd->add_subcommand("verify", "exhaustively verify a scheme on a finite ground");
    verify_cmd->add_option("--scheme", sv->scheme_name, "named scheme (max)");
    verify_cmd->add_option("--scheme-file", sv->scheme_file, "scheme table JSON");
    verify_cmd->add_option("--ground-n", sv->ground_n, "ground truncation size");
    verify_cmd->add_option("--ground-kind", sv->ground_kind, "naturals|rationals")
        ->check(CLI::IsMember({"naturals", "rationals"}));
    verify_cmd->add_option("--jobs", sv->jobs, "worker cap");
    verify_cmd->add_option("--out", sv->out, "report JSON path");
    verify_cmd->add_option("--fiber-csv", sv->fiber_csv, "fiber histogram CSV path");
    verify_cmd->add_option("--record", sv->record, "RunRecord JSON path");
    verify_cmd->callback([&action, sv] { action = [sv] { return run_scheme_verify(*sv); }; });

    // kuratowski build|check|to-scheme
    auto* kur_cmd = app.add_subcommand("kuratowski", "decompositions of finite powers");
    kur_cmd->require_subcommand(1);
    auto kb = std::make_shared<KuratowskiArgs>();
    auto* build_cmd = kur_cmd->add_subcommand("build", "build the level-k decomposition of n^(k+2)");
    build_cmd->add_option("--k", kb->k, "level (parts = k+2)")->required();
    build_cmd->add_option("--n", kb->n, "side length")->required();
    build_cmd->add_option("--policy", kb->policy, "identity|seeded")
        ->check(CLI::IsMember({"identity", "seeded"}));
    build_cmd->add_option("--seed", kb->seed, "seed for the seeded policy");
    build_cmd->add_option("--out", kb->out, "decomposition JSON path");
    build_cmd->add_option("--record", kb->record, "RunRecord JSON path");
    build_cmd->callback([&action, kb] { action = [kb] { return run_kuratowski_build(*kb); }; });

    auto kc = std::make_shared<KuratowskiArgs>();
    auto* check_cmd = kur_cmd->add_subcommand("check", "verify partition and direction fibers");
    check_cmd->add_option("file", kc->in_file, "decomposition JSON")->required();
    sl::Rank stability_n = -1;
    check_cmd->add_option("--stability-n", stability_n, "rebuild at this larger side and compare fibers");
    check_cmd->add_option("--out", kc->out, "report JSON path");
    check_cmd->add_option("--fiber-csv", kc->fiber_csv, "direction fiber CSV path");
    check_cmd->add_option("--record", kc->record, "RunRecord JSON path");
    check_cmd->callback([&action, kc, &stability_n] {
        action = [kc, stability_n] {
            KuratowskiArgs a = *kc;
            if (stability_n >= 0) a.stability_n = stability_n;
            return run_kuratowski_check(a);
        };
    });

    auto kt = std::make_shared<KuratowskiArgs>();
    auto* tos_cmd = kur_cmd->add_subcommand("to-scheme", "derive the (k+2)->(k+1) scheme and verify it");
    tos_cmd->add_option("file", kt->in_file, "decomposition JSON")->required();
    tos_cmd->add_option("--out", kt->out, "scheme+report JSON path");
    tos_cmd->add_option("--jobs", kt->jobs, "worker cap");
    tos_cmd->add_option("--record", kt->record, "RunRecord JSON path");
    tos_cmd->callback([&action, kt] { action = [kt] { return run_kuratowski_to_scheme(*kt); }; });

    // emx eval|derive-scheme|sweep
    auto* emx_cmd = app.add_subcommand("emx", "EMX criterion evaluation and translations");
    emx_cmd->require_subcommand(1);
    auto ev = std::make_shared<EmxArgs>();
    auto* eval_cmd = emx_cmd->add_subcommand("eval", "evaluate the (epsilon,delta) criterion for one distribution");
    eval_cmd->add_option("--dist", ev->dist_files, "distribution JSON")->required();
    eval_cmd->add_option("--learner", ev->learner, "learner name (rank)");
    eval_cmd->add_option("--d", ev->d, "sample size");
    eval_cmd->add_option("--epsilon", ev->epsilon, "epsilon as num/den");
    eval_cmd->add_option("--delta", ev->delta, "delta as num/den (defaults to epsilon)");
    eval_cmd->add_option("--mode", ev->mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    eval_cmd->add_option("--trials", ev->trials, "MC trials");
    eval_cmd->add_option("--seed", ev->seed, "MC seed");
    eval_cmd->add_option("--budget", ev->budget, "exact enumeration budget");
    eval_cmd->add_option("--jobs", ev->jobs, "worker cap");
    eval_cmd->add_option("--out", ev->out, "report JSON path");
    eval_cmd->add_option("--record", ev->record, "RunRecord JSON path");
    eval_cmd->callback([&action, ev] { action = [ev] { return run_emx_eval(*ev); }; });

    auto sw = std::make_shared<EmxArgs>();
    auto* sweep_cmd = emx_cmd->add_subcommand("sweep", "evaluate several distributions into a CSV");
    sweep_cmd->add_option("--dist", sw->dist_files, "distribution JSON files")->required();
    sweep_cmd->add_option("--learner", sw->learner, "learner name (rank)");
    sweep_cmd->add_option("--d", sw->d, "sample size");
    sweep_cmd->add_option("--epsilon", sw->epsilon, "epsilon as num/den");
    sweep_cmd->add_option("--delta", sw->delta, "delta as num/den (defaults to epsilon)");
    sweep_cmd->add_option("--mode", sw->mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    sweep_cmd->add_option("--trials", sw->trials, "MC trials");
    sweep_cmd->add_option("--seed", sw->seed, "MC seed");
    sweep_cmd->add_option("--budget", sw->budget, "exact enumeration budget");
    sweep_cmd->add_option("--jobs", sw->jobs, "worker cap");
    sweep_cmd->add_option("--out", sw->out, "sweep CSV path");
    sweep_cmd->callback([&action, sw] { action = [sw] { return run_emx_sweep(*sw); }; });

    auto ds = std::make_shared<EmxArgs>();
    auto* derive_cmd = emx_cmd->add_subcommand("derive-scheme", "extract the (m+1)->m scheme from a learner and verify");
    derive_cmd->add_option("--learner", ds->learner, "learner name (rank)");
    derive_cmd->add_option("--d", ds->d, "learner sample size");
    derive_cmd->add_option("--ground-n", ds->ground_n, "verification ground size")->required();
    derive_cmd->add_option("--jobs", ds->jobs, "worker cap");
    derive_cmd->add_option("--out", ds->out, "scheme table + report JSON path");
    derive_cmd->add_option("--record", ds->record, "RunRecord JSON path");
    derive_cmd->callback([&action, ds] { action = [ds] { return run_emx_derive_scheme(*ds); }; });

    // fiber probe
    auto* fiber_cmd = app.add_subcommand("fiber", "continuity probes for interval selectors");
    fiber_cmd->require_subcommand(1);
    auto fp = std::make_shared<FiberArgs>();
    auto* probe_cmd = fiber_cmd->add_subcommand("probe", "probe drop-index constancy and fibers");
    probe_cmd->add_option("--selector", fp->selector, "gallery selector name")->required();
    probe_cmd->add_option("--m", fp->m, "target arity (input tuples have m+1 coordinates)");
    probe_cmd->add_option("--trials", fp->trials, "local constancy samples per point");
    probe_cmd->add_option("--witnesses", fp->witnesses, "fiber witnesses per point");
    probe_cmd->add_option("--points", fp->points, "number of random probe points");
    probe_cmd->add_option("--seed", fp->seed, "probe seed");
    probe_cmd->add_option("--x", fp->x_csv, "explicit probe point, comma-separated");
    probe_cmd->add_flag("--expect-drift", fp->expect_drift, "succeed when drift IS found (negative controls)");
    probe_cmd->add_option("--out", fp->out, "probe report JSON path");
    probe_cmd->add_option("--record", fp->record, "RunRecord JSON path");
    probe_cmd->callback([&action, fp] { action = [fp] { return run_fiber_probe(*fp); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 2;
    } catch (const sl::BudgetExceeded& e) {
        std::cerr << json{{"error", "BudgetExceeded"}, {"message", e.what()},
                          {"hint", "switch to --mode mc"}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const sl::Error& e) {
        std::cerr << json{{"error", "Error"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "Exception"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }
}
