#pragma once

#include "crn/crn.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

namespace crn::cli {

enum Exit { ok = 0, parse_failure = 1, precondition_failure = 2, verification_failure = 3 };

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool color = false;
    bool timestamp = false;
    unsigned jobs = 1;
};

inline bool color_enabled(std::ostream& err) {
    const char* env = std::getenv("CRN_COLOR");
    if (env && std::string(env) == "never") return false;
    return &err == &std::cerr && ::isatty(STDERR_FILENO);
}

inline void diagnose(const Context& ctx, Severity sev, const std::string& where, const std::string& msg) {
    const char* label = sev == Severity::error ? "error" : "warning";
    const char* on = sev == Severity::error ? "\033[1;31m" : "\033[1;33m";
    ctx.err << where << (where.empty() ? "" : ": ");
    if (ctx.color) ctx.err << on << label << "\033[0m";
    else ctx.err << label;
    ctx.err << ": " << msg << "\n";
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses a .crn or .json file. Warnings go to stderr; errors are printed
/// and rethrown.
inline ReactionNetwork load_network(const Context& ctx, const std::string& path) {
    const std::string text = read_file(path);
    if (std::filesystem::path(path).extension() == ".json") {
        try {
            return network_from_json(text);
        } catch (const ParseError& e) {
            for (const auto& d : e.diagnostics())
                diagnose(ctx, d.severity, path + ":" + std::to_string(d.line) + ":" + std::to_string(d.column),
                         d.message);
            throw;
        }
    }
    auto res = parse_network(text);
    for (const auto& d : res.diagnostics)
        diagnose(ctx, d.severity, path + ":" + std::to_string(d.line) + ":" + std::to_string(d.column), d.message);
    if (!res.ok()) throw ParseError(res.errors());
    return std::move(*res.network);
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline RationalVector parse_direction(const std::string& text) {
    RationalVector u;
    for (const auto& s : split_list(text)) {
        auto q = parse_rational(s);
        if (!q) throw PreconditionError("malformed direction entry '" + s + "'");
        u.push_back(*q);
    }
    return u;
}

inline std::vector<double> parse_state(const std::string& text) {
    std::vector<double> x;
    for (const auto& s : split_list(text)) {
        auto q = parse_rational(s);
        if (!q) throw PreconditionError("malformed initial-state entry '" + s + "'");
        x.push_back(to_double(*q));
    }
    return x;
}

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void emit(const Context& ctx, Json j) {
    if (ctx.timestamp) j["timestamp"] = utc_now();
    ctx.out << dump_json(j) << "\n";
}

inline Json classify_json(const Context& ctx, const ReactionNetwork& net, const std::string& where) {
    Json j;
    j["species"] = net.species();
    j["reactions"] = reactions_text_json(net);
    Json complexes = Json::array();
    for (const auto& v : net.vertices()) complexes.push_back(complex_text(net, v));
    j["complexes"] = std::move(complexes);
    j["order"] = rational_json(net.order());
    j["net_order"] = rational_json(net.net_order());
    j["first_order"] = net.is_first_order();
    j["weakly_reversible"] = is_weakly_reversible(net);
    const auto def = deficiency_report(net);
    j["deficiency_paper"] = def.by_sccs;
    j["deficiency_standard"] = def.standard;
    j["nontrivial_strong_components"] = def.nontrivial_sccs;
    j["linkage_classes"] = def.linkage_classes;
    if (def.by_sccs < 0)
        diagnose(ctx, Severity::warning, where,
                 "deficiency with strong components of >= 2 vertices is negative (" + std::to_string(def.by_sccs) +
                     "); a linkage class holds several nontrivial strong components");
    j["strongly_connected_components"] = partition_json(net, strongly_connected_components(net));
    j["weakly_connected_components"] = partition_json(net, weakly_connected_components(net));
    const auto [g0, gb] = zero_component_split(net);
    j["G0"] = reactions_text_json(g0);
    j["Gbullet"] = reactions_text_json(gb);
    j["Glir"] = reactions_text_json(lir_subgraph(net));
    j["Gstar"] = net.empty() ? Json::array() : reactions_text_json(highest_order_subgraph(net));
    j["homogeneous"] = is_homogeneous(net);
    const auto S = stoichiometric_subspace(net);
    j["stoichiometric_subspace"] = Json{{"dimension", S.dim()}, {"basis", matrix_json(S.vectors)}};
    const auto cons = conservation_laws(net);
    Json c;
    c["basis"] = matrix_json(cons.basis.vectors);
    c["positive_vector"] = cons.positive ? rational_vector_json(*cons.positive) : Json(nullptr);
    j["conservation_laws"] = std::move(c);
    try {
        const auto s = jkl_sets(net);
        auto names = [&](const std::vector<std::size_t>& idx) {
            Json a = Json::array();
            for (auto k : idx) a.push_back(net.species()[k]);
            return a;
        };
        j["jkl"] = Json{{"J", names(s.J)}, {"K", names(s.K)}, {"L", names(s.L)}};
    } catch (const PreconditionError&) {
        j["jkl"] = nullptr;
    }
    return j;
}

inline int cmd_classify(Context& ctx, const std::string& input) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(input)) {
        emit(ctx, classify_json(ctx, load_network(ctx, input), input));
        return ok;
    }
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(input)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".crn" || ext == ".json")) files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<Json> results(files.size());
    std::vector<std::string> errors(files.size());
    std::vector<int> codes(files.size(), ok);
    std::atomic<std::size_t> next{0};
    // Diagnostics from workers are buffered so stderr stays in file order.
    std::vector<std::ostringstream> logs(files.size());
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            Context local{ctx.out, logs[i], ctx.color, false, 1};
            try {
                results[i] = classify_json(local, load_network(local, files[i]), files[i]);
            } catch (const ParseError&) {
                codes[i] = parse_failure;
            } catch (const Error& e) {
                diagnose(local, Severity::error, files[i], e.what());
                codes[i] = precondition_failure;
            }
        }
    };
    const unsigned jobs = std::max(1U, std::min<unsigned>(ctx.jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Json arr = Json::array();
    int worst = ok;
    for (std::size_t i = 0; i < files.size(); ++i) {
        ctx.err << logs[i].str();
        Json entry;
        entry["file"] = fs::path(files[i]).filename().string();
        entry["report"] = codes[i] == ok ? results[i] : Json(nullptr);
        arr.push_back(std::move(entry));
        worst = std::max(worst, codes[i]);
    }
    Json doc;
    doc["networks"] = std::move(arr);
    emit(ctx, doc);
    return worst;
}

struct EndoFlags {
    std::string vector;
    bool strong = false;
    bool all_witnesses = false;
};

inline int cmd_endotactic(Context& ctx, const std::string& input, const EndoFlags& f) {
    const auto net = load_network(ctx, input);
    EndoVerdict v;
    if (!f.vector.empty()) {
        const auto u = parse_direction(f.vector);
        v = f.strong ? u_strongly_endotactic(net, u) : u_endotactic(net, u);
    } else if (net.is_first_order() && net.is_integral()) {
        ScanOptions opt{f.all_witnesses, ctx.jobs};
        v = f.strong ? first_order_strongly_endotactic(net, opt) : first_order_endotactic(net, opt);
    } else if (f.strong) {
        if (stoichiometric_dim(net) != 1)
            throw PreconditionError("--strong needs a first-order or one-dimensional network, or --vector");
        v = one_dim_endotactic(net, true);
    } else {
        v = sufficient_endotactic(net);
    }
    Json j;
    j["species"] = net.species();
    j["strong"] = f.strong;
    const Json verdict = verdict_json(net, v);
    for (auto it = verdict.begin(); it != verdict.end(); ++it) j[it.key()] = it.value();
    emit(ctx, j);
    return ok;
}

inline int cmd_realize(Context& ctx, const std::string& input) {
    const auto net = load_network(ctx, input);
    const auto spade = spade_realization(net);
    const auto match = flux_match(net, spade);
    Json j;
    j["dsl"] = serialize_network(spade, Format::dsl);
    j["network"] = network_json(spade);
    Json cert = Json::array();
    bool all = true;
    for (const auto& m : match) {
        Json o;
        o["source"] = complex_text(net, m.source);
        o["original"] = rational_vector_json(m.original);
        o["realized"] = rational_vector_json(m.realized);
        o["equal"] = m.equal;
        all = all && m.equal;
        cert.push_back(std::move(o));
    }
    j["flux_match"] = std::move(cert);
    j["strong_realization"] = all;
    j["weakly_reversible"] = is_weakly_reversible(spade);
    j["deficiency_paper"] = deficiency(spade);
    emit(ctx, j);
    return all ? ok : verification_failure;
}

inline int cmd_equilibrium(Context& ctx, const std::string& input, const std::string& init, bool force) {
    const auto net = load_network(ctx, input);
    const auto sys = flux_system(net);
    const auto res = equilibrium(sys, parse_state(init), {force});
    if (res.forced)
        diagnose(ctx, Severity::warning, input,
                 "network is not certified endotactic; the equilibrium may be neither unique nor positive");
    Json j = equilibrium_json(net, res);
    emit(ctx, j);
    return ok;
}

struct SimFlags {
    std::string init;
    double t_end = 10.0;
    double dt = 1e-3;
    bool closed_form = false;
    std::string out;
};

inline int cmd_simulate(Context& ctx, const std::string& input, const SimFlags& f) {
    const auto net = load_network(ctx, input);
    const auto tr = simulate(net, parse_state(f.init), f.t_end, f.dt, {f.closed_form});
    if (tr.clamped > 0)
        diagnose(ctx, Severity::warning, input, std::to_string(tr.clamped) + " negative round-off entries clamped to 0");
    if (f.out.empty()) {
        write_csv(ctx.out, tr, net.species());
        return ok;
    }
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw PreconditionError("cannot write '" + f.out + "'");
    write_csv(file, tr, net.species());
    return ok;
}

inline int cmd_verify(Context& ctx, const std::string& input, const SimFlags& f) {
    const auto net = load_network(ctx, input);
    const auto x0 = parse_state(f.init);
    const auto sys = flux_system(net);
    const auto eq = equilibrium(sys, x0);
    const auto spec = spectral_report(sys, true);
    const auto tr = simulate(net, x0, f.t_end, f.dt, {f.closed_form});
    const auto bound = verify_bound(tr, eq.x_star, spec, conservation_laws(net).basis.vectors);
    Json j;
    j["x_star"] = row_json(eq.x_star);
    j["spectral"] = spectral_json(spec);
    j["rho"] = spec.rho ? Json(*spec.rho) : Json(nullptr);
    j["n"] = spec.n;
    j["bound"] = bound_json(bound);
    j["pass"] = bound.pass;
    emit(ctx, j);
    return bound.pass ? ok : verification_failure;
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mass-action reaction network analysis"};
    app.require_subcommand(1);
    app.name("crn");
    unsigned jobs = 1;
    bool timestamp = false;
    app.add_option("--jobs", jobs, "worker threads for the test-set scan and directory batches")
        ->check(CLI::PositiveNumber);
    app.add_flag("--timestamp", timestamp, "add a UTC timestamp field to JSON output");

    std::string input;
    auto* classify = app.add_subcommand("classify", "structural report (file or directory)");
    classify->add_option("input", input, ".crn / .json file or directory")->required();

    EndoFlags ef;
    auto* endo = app.add_subcommand("endotactic", "endotacticity verdict with witnesses");
    endo->add_option("input", input)->required();
    endo->add_option("--vector", ef.vector, "check one direction, e.g. \"1,-1/2\"");
    endo->add_flag("--strong", ef.strong, "strongly endotactic variants");
    endo->add_flag("--all-witnesses", ef.all_witnesses, "collect every violating test-set direction");

    auto* realize = app.add_subcommand("realize", "weakly reversible strong realization");
    realize->add_option("input", input)->required();

    std::string init;
    bool force = false;
    auto* equil = app.add_subcommand("equilibrium", "equilibrium in the class of --init");
    equil->add_option("input", input)->required();
    equil->add_option("--init", init, "initial state v1,...,vd")->required();
    equil->add_flag("--force", force, "skip the endotacticity certificate");

    SimFlags sf;
    auto* sim = app.add_subcommand("simulate", "integrate and write CSV");
    sim->add_option("input", input)->required();
    sim->add_option("--init", sf.init)->required();
    sim->add_option("--t-end", sf.t_end)->capture_default_str();
    sim->add_option("--dt", sf.dt)->capture_default_str();
    sim->add_flag("--closed-form", sf.closed_form, "matrix exponential instead of RK4");
    sim->add_option("--out", sf.out, "CSV path (default stdout)");

    SimFlags vf;
    auto* verify = app.add_subcommand("verify-bound", "check the exponential convergence bound");
    verify->add_option("input", input)->required();
    verify->add_option("--init", vf.init)->required();
    verify->add_option("--t-end", vf.t_end)->capture_default_str();
    verify->add_option("--dt", vf.dt)->capture_default_str();
    verify->add_flag("--closed-form", vf.closed_form);

    std::vector<std::string> argv_store{"crn"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : precondition_failure;
    }

    Context ctx{out, err, color_enabled(err), timestamp, jobs};
    try {
        if (*classify) return cmd_classify(ctx, input);
        if (*endo) return cmd_endotactic(ctx, input, ef);
        if (*realize) return cmd_realize(ctx, input);
        if (*equil) return cmd_equilibrium(ctx, input, init, force);
        if (*sim) return cmd_simulate(ctx, input, sf);
        if (*verify) return cmd_verify(ctx, input, vf);
    } catch (const ParseError&) {
        return parse_failure;
    } catch (const PreconditionError& e) {
        diagnose(ctx, Severity::error, input, e.what());
        return precondition_failure;
    } catch (const Error& e) {
        diagnose(ctx, Severity::error, input, e.what());
        return verification_failure;
    }
    return precondition_failure;
}

}  // namespace crn::cli
