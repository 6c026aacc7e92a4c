#pragma once

// Command implementations behind the graphkms executable. Each command
// produces a JSON report and an equivalent human-readable table.

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <graphkms/graphkms.hpp>

namespace graphkms::cli {

enum ExitCode { Ok = 0, Failure = 1, Schema = 2, Mode = 3, Infeasible = 4, VerifyFailed = 5 };

struct Options
{
    std::string command;
    std::string file;
    std::string builtin;
    std::string format = "json";
    std::string q;
    std::size_t depth = 1;
    std::size_t seed = 0;
    std::string seed_measure;
    bool exact = false;
    std::vector<std::string> scan;
};

struct Outcome
{
    int code = Ok;
    Json report;
    std::string table;
};

inline GraphPtr load_graph(const Options& o)
{
    if (!o.file.empty() && !o.builtin.empty())
        throw SchemaError("give either --file or --builtin, not both");
    if (!o.builtin.empty())
        return graph_from_json(Json{{"builtin", o.builtin}});
    if (!o.file.empty())
        return graph_from_file(o.file);
    throw SchemaError("no graph given; use --file PATH or --builtin NAME");
}

inline Rational require_q(const Options& o)
{
    if (o.q.empty())
        throw InvalidParameter("--q is required");
    const Rational q = parse_rational(o.q);
    if (q <= 0)
        throw InvalidParameter("--q must be positive");
    return q;
}

inline std::string beta_text(const Rational& q)
{
    return fixed_decimal(std::log(to_double(q)), 6);
}

inline Outcome cmd_classify(const GraphPtr& g)
{
    Outcome out;
    const auto classes = classify_vertices(*g);
    Json vertices = Json::array();
    std::ostringstream t;
    t << "vertex\tclass\tin-degree\tboundary\n";
    for (const auto& v : g->vertices()) {
        const auto c = to_string(classes.at(v));
        vertices.push_back({{"id", v}, {"class", c}, {"in_degree", g->in_degree(v)}, {"boundary", g->is_boundary(v)}});
        t << v << '\t' << c << '\t' << g->in_degree(v) << '\t' << (g->is_boundary(v) ? "yes" : "no") << '\n';
    }
    const bool principal = is_principal(*g);
    t << "principal groupoid: " << (principal ? "yes" : "no") << '\n';
    out.report = {{"vertices", vertices}, {"principal", principal}, {"windowed", g->is_windowed()}};
    out.table = t.str();
    return out;
}

inline Outcome cmd_transfer(const GraphPtr& g)
{
    Outcome out;
    const auto t = transfer_matrix(*g);
    const auto& vs = g->vertices();
    Json rows = Json::array();
    std::ostringstream tab;
    tab << "A(v,w) = #edges w -> v\n\t";
    for (const auto& w : vs)
        tab << w << '\t';
    tab << '\n';
    for (const auto& v : vs) {
        Json row = Json::array();
        tab << v << '\t';
        for (const auto& w : vs) {
            row.push_back(format_rational(t(v, w)));
            tab << format_rational(t(v, w)) << '\t';
        }
        rows.push_back(row);
        tab << '\n';
    }
    Json images = Json::object();
    for (const auto& v : vs) {
        const auto img = t.apply(VertexMeasure::dirac(g->vertex_space(), v));
        images[v] = measure_to_json(img);
        tab << "T delta_" << v << " = ";
        bool first = true;
        for (const auto& [w, x] : img.weights()) {
            tab << (first ? "" : " + ") << (x == 1 ? "" : format_rational(x) + "*") << "delta_" << w;
            first = false;
        }
        tab << (first ? "0" : "") << '\n';
    }
    out.report = {{"order", vs}, {"matrix", rows}, {"dirac_images", images}};
    out.table = tab.str();
    return out;
}

inline Outcome cmd_spectrum(const GraphPtr& g, const Options& o)
{
    Outcome out;
    Spectrum s;
    if (!o.scan.empty()) {
        if (o.exact)
            throw InvalidParameter("--exact and --scan are exclusive");
        if (o.scan.size() != 3)
            throw InvalidParameter("--scan takes qmin qmax steps");
        const auto steps = parse_rational(o.scan[2]);
        if (denominator(steps) != 1 || steps < 1)
            throw InvalidParameter("scan steps must be a positive integer");
        s = scan_spectrum(g, scan_grid(parse_rational(o.scan[0]), parse_rational(o.scan[1]),
                                       numerator(steps).convert_to<std::size_t>()));
    } else {
        s = exact_spectrum(g);
    }
    std::ostringstream t;
    t << "mode: " << s.mode << (s.window_relaxed ? " (window-relaxed)" : "") << '\n';
    t << "q\t~q\tbeta\tdim\tmethod\n";
    for (const auto& e : s.entries) {
        t << (e.q.is_rational() ? format_rational(*e.q.rational()) : "root of " + e.q.polynomial().str()) << '\t'
          << fixed_decimal(e.q.approx(), 6) << '\t' << fixed_decimal(std::log(e.q.approx()), 6) << '\t'
          << e.dimension << '\t' << e.method << (e.tracial ? "\ttracial (beta = 0)" : "") << '\n';
    }
    if (s.entries.empty())
        t << "(no feasible q)\n";
    out.report = spectrum_to_json(s);
    out.table = t.str();
    return out;
}

inline Outcome cmd_solve(const GraphPtr& g, const Options& o)
{
    Outcome out;
    const Rational q = require_q(o);
    const auto cone = solve_cone(g, q);
    out.report = cone_to_json(cone);
    Json norms = Json::array();
    std::ostringstream t;
    t << "q = " << format_rational(q) << " (beta = " << beta_text(q) << ")"
      << (cone.window_relaxed ? ", window-relaxed" : "") << '\n';
    t << "dimension: " << cone.dimension << '\n';
    for (std::size_t i = 0; i < cone.rays.size(); ++i) {
        const auto& r = cone.rays[i];
        t << "ray " << i << ':';
        const auto weights = measure_to_json(r);
        for (const auto& [v, w] : weights.items())
            t << ' ' << v << '=' << w.get<std::string>();
        const auto n = normalization(g, r, q);
        Json nj{{"normalizable", n.normalizable}, {"note", n.note}};
        if (n.probability)
            nj["probability"] = measure_to_json(*n.probability);
        norms.push_back(std::move(nj));
        t << "\n  " << n.note << '\n';
    }
    if (cone.rays.empty())
        t << "empty cone\n";
    out.report["normalization"] = norms;
    out.table = t.str();
    return out;
}

inline VertexMeasure choose_seed(const GraphPtr& g, const Options& o, const Rational& q)
{
    if (!o.seed_measure.empty()) {
        Json doc;
        try {
            doc = Json::parse(o.seed_measure);
        } catch (const Json::parse_error& e) {
            throw SchemaError(std::string("malformed seed measure: ") + e.what());
        }
        return vertex_measure_from_json(doc, *g);
    }
    const auto cone = solve_cone(g, q);
    if (o.seed >= cone.rays.size())
        throw NotSubInvariant("no ray with index " + std::to_string(o.seed) + "; the cone at q = " +
                              format_rational(q) + " has " + std::to_string(cone.rays.size()) + " rays");
    return cone.rays[o.seed];
}

struct TowerChecks
{
    bool certificates = true;
    QuasiInvarianceReport quasi;
    std::optional<VertexId> pushforward_witness;

    bool passed() const { return certificates && quasi.passed && !pushforward_witness; }
};

inline TowerChecks check_tower(const MeasureTower& t)
{
    TowerChecks c;
    for (const auto& cert : t.certificates)
        c.certificates = c.certificates && cert.holds;
    c.quasi = verify_quasi_invariance(t);
    c.pushforward_witness = pushforward_mismatch(t);
    return c;
}

inline Json checks_to_json(const TowerChecks& c)
{
    return Json{{"certificates", c.certificates},
                {"quasi_invariance", quasi_invariance_to_json(c.quasi)},
                {"pushforward_matches_seed", !c.pushforward_witness.has_value()},
                {"pushforward_witness", c.pushforward_witness ? Json(*c.pushforward_witness) : Json(nullptr)},
                {"passed", c.passed()}};
}

inline Outcome cmd_tower(const GraphPtr& g, const Options& o)
{
    Outcome out;
    const Rational q = require_q(o);
    const auto seed = choose_seed(g, o, q);
    const auto tower = build_tower(g, seed, q, o.depth);
    const auto checks = check_tower(tower);
    out.report = tower_to_json(tower);
    out.report["checks"] = checks_to_json(checks);
    std::ostringstream t;
    t << "q = " << format_rational(q) << ", depth " << tower.depth() << (tower.window_relaxed ? ", window-relaxed" : "")
      << '\n';
    for (std::size_t n = 0; n <= tower.depth(); ++n) {
        t << "mu_" << n << " (mass " << format_rational(tower.measures[n].total_mass()) << "):";
        const auto weights = measure_to_json(tower.measures[n]);
        for (const auto& [p, w] : weights.items())
            t << ' ' << p << '=' << w.get<std::string>();
        t << '\n';
        if (n > 0 && !tower.certificates[n - 1].relaxed_points.empty())
            t << "  certificate relaxed at " << tower.certificates[n - 1].relaxed_points.size() << " cut points\n";
    }
    t << "certificates: " << (checks.certificates ? "pass" : "FAIL") << '\n'
      << "quasi-invariance: " << (checks.quasi.passed ? "pass" : "FAIL") << '\n'
      << "pushforward = seed: " << (checks.pushforward_witness ? "FAIL at " + *checks.pushforward_witness : "pass")
      << '\n';
    out.table = t.str();
    out.code = checks.passed() ? Ok : VerifyFailed;
    return out;
}

inline Outcome cmd_verify(const GraphPtr& g, const Options& o)
{
    Outcome out;
    const Rational q = require_q(o);
    const auto cone = solve_cone(g, q);
    Json rays = Json::array();
    bool all = true;
    std::ostringstream t;
    t << "q = " << format_rational(q) << ", depth " << o.depth << ", " << cone.rays.size() << " rays"
      << (cone.window_relaxed ? ", window-relaxed" : "") << '\n';
    for (std::size_t i = 0; i < cone.rays.size(); ++i) {
        Json entry{{"index", i}, {"seed", measure_to_json(cone.rays[i])}};
        try {
            const auto tower = build_tower(g, cone.rays[i], q, o.depth);
            const auto checks = check_tower(tower);
            entry["checks"] = checks_to_json(checks);
            all = all && checks.passed();
            t << "ray " << i << ": " << (checks.passed() ? "pass" : "FAIL") << '\n';
        } catch (const Error& e) {
            entry["error"] = e.what();
            all = false;
            t << "ray " << i << ": FAIL (" << e.what() << ")\n";
        }
        rays.push_back(std::move(entry));
    }
    out.report = {{"q", format_rational(q)},
                  {"depth", o.depth},
                  {"window_relaxed", cone.window_relaxed},
                  {"rays", rays},
                  {"passed", all}};
    if (q == 1) {
        out.report["annotation"] = "β=0 excluded by the classification theorem; tracial case";
        t << "note: q = 1 is the tracial case (beta = 0)\n";
    }
    t << (all ? "verification passed" : "verification FAILED") << '\n';
    out.table = t.str();
    out.code = all ? Ok : VerifyFailed;
    return out;
}

/** Runs one command; library errors are mapped to exit codes. */
inline Outcome run(const Options& o)
{
    const auto started = std::chrono::steady_clock::now();
    Outcome out;
    try {
        const auto g = load_graph(o);
        if (o.command == "classify")
            out = cmd_classify(g);
        else if (o.command == "transfer")
            out = cmd_transfer(g);
        else if (o.command == "spectrum")
            out = cmd_spectrum(g, o);
        else if (o.command == "solve")
            out = cmd_solve(g, o);
        else if (o.command == "tower")
            out = cmd_tower(g, o);
        else if (o.command == "verify")
            out = cmd_verify(g, o);
        else
            throw InvalidParameter("unknown command '" + o.command + "'");
        Json report{{"command", o.command}, {"input_digest", input_digest(*g)}, {"results", out.report}};
        out.report = std::move(report);
        const auto ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        out.table = o.command + " [" + input_digest(*g) + "]\n" + out.table + "elapsed: " + fixed_decimal(ms, 3) +
                    " ms\n";
        return out;
    } catch (const SchemaError& e) {
        out.code = Schema;
        out.table = e.what();
    } catch (const WindowRuleMissing& e) {
        out.code = Schema;
        out.table = e.what();
    } catch (const InvalidParameter& e) {
        out.code = Schema;
        out.table = e.what();
    } catch (const ExactModeUnavailable& e) {
        out.code = Mode;
        out.table = e.what();
    } catch (const WindowTooSmall& e) {
        out.code = Mode;
        out.table = e.what();
    } catch (const NotSubInvariant& e) {
        out.code = Infeasible;
        out.table = e.what();
    } catch (const ConsistencyFailure& e) {
        out.code = VerifyFailed;
        out.table = e.what();
    } catch (const Error& e) {
        out.code = Failure;
        out.table = e.what();
    }
    out.report = Json{{"command", o.command}, {"error", out.table}, {"exit_code", out.code}};
    return out;
}

} // namespace graphkms::cli
