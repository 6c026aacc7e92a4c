#pragma once

// JSON graph files and JSON forms of measures, cones and towers.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "graphkms/boundary.hpp"
#include "graphkms/builtins.hpp"
#include "graphkms/errors.hpp"
#include "graphkms/graph.hpp"
#include "graphkms/kms.hpp"
#include "graphkms/rational.hpp"

namespace graphkms {

using Json = nlohmann::ordered_json;

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw SchemaError(what);
}

inline void only_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, value] : obj.items())
        require(allowed.count(key) != 0, "unexpected key '" + key + "' in " + where);
}

inline std::string identifier(const Json& j, const std::string& where)
{
    require(j.is_string(), where + " must be a string");
    auto s = j.get<std::string>();
    require(!s.empty(), where + " must be nonempty");
    require(s.find('.') == std::string::npos, where + " '" + s + "' must not contain '.'");
    return s;
}

inline long integer(const Json& j, const std::string& where)
{
    require(j.is_number_integer(), where + " must be an integer");
    return j.get<long>();
}

} // namespace detail

/**
 * Reads a graph document: {"builtin": name}, or vertices and edges with an
 * optional integer-line window. A window with rules generates its own
 * vertices and edges.
 */
inline GraphPtr graph_from_json(const Json& doc)
{
    using detail::require;
    require(doc.is_object(), "graph document must be a JSON object");
    if (doc.contains("builtin")) {
        detail::only_keys(doc, {"builtin"}, "builtin reference");
        require(doc["builtin"].is_string(), "builtin must be a string");
        try {
            return builtin_graph(doc["builtin"].get<std::string>());
        } catch (const UnknownIdentifier& e) {
            throw SchemaError(e.what());
        }
    }
    detail::only_keys(doc, {"vertices", "edges", "window"}, "graph document");

    std::optional<WindowDescriptor> window;
    if (doc.contains("window")) {
        const auto& w = doc["window"];
        require(w.is_object(), "window must be an object");
        detail::only_keys(w, {"kind", "radius", "rules"}, "window");
        require(w.contains("kind") && w["kind"] == "integer-line", "window kind must be \"integer-line\"");
        require(w.contains("radius"), "window needs a radius");
        WindowDescriptor d;
        d.radius = detail::integer(w["radius"], "window radius");
        require(d.radius >= 1, "window radius must be at least 1");
        if (w.contains("rules")) {
            const auto& r = w["rules"];
            require(r.is_object(), "window rules must be an object");
            detail::only_keys(r, {"vertex", "edges"}, "window rules");
            WindowRules rules;
            if (r.contains("vertex")) {
                require(r["vertex"].is_string(), "vertex pattern must be a string");
                rules.vertex_pattern = r["vertex"].get<std::string>();
            }
            require(rules.vertex_pattern.find("{n}") != std::string::npos, "vertex pattern must contain {n}");
            require(r.contains("edges") && r["edges"].is_array(), "window rules need an edges array");
            std::set<std::string> patterns;
            for (const auto& t : r["edges"]) {
                require(t.is_object(), "edge rule must be an object");
                detail::only_keys(t, {"id", "src", "rng"}, "edge rule");
                require(t.contains("id") && t.contains("src") && t.contains("rng"), "edge rule needs id, src, rng");
                EdgeTemplate et{detail::identifier(t["id"], "edge rule id"), detail::integer(t["src"], "edge rule src"),
                                detail::integer(t["rng"], "edge rule rng")};
                require(et.id_pattern.find("{n}") != std::string::npos, "edge id pattern must contain {n}");
                require(patterns.insert(et.id_pattern).second, "duplicate edge id pattern '" + et.id_pattern + "'");
                rules.edges.push_back(std::move(et));
            }
            d.rules = std::move(rules);
        }
        window = std::move(d);
    }

    try {
        if (window && window->rules) {
            require(!doc.contains("vertices") && !doc.contains("edges"),
                    "a window with rules generates its own vertices and edges");
            return std::make_shared<const DiscreteGraph>(DiscreteGraph::integer_line(window->radius, *window->rules));
        }
        require(doc.contains("vertices") && doc["vertices"].is_array(), "graph needs a vertices array");
        std::vector<VertexId> vertices;
        std::set<std::string> ids;
        for (const auto& v : doc["vertices"]) {
            vertices.push_back(detail::identifier(v, "vertex id"));
            require(ids.insert(vertices.back()).second, "duplicate id '" + vertices.back() + "'");
        }
        std::vector<EdgeRecord> edges;
        if (doc.contains("edges")) {
            require(doc["edges"].is_array(), "edges must be an array");
            for (const auto& e : doc["edges"]) {
                require(e.is_object(), "edge must be an object");
                detail::only_keys(e, {"id", "src", "rng"}, "edge");
                require(e.contains("id") && e.contains("src") && e.contains("rng"), "edge needs id, src, rng");
                EdgeRecord rec{detail::identifier(e["id"], "edge id"), detail::identifier(e["src"], "edge src"),
                               detail::identifier(e["rng"], "edge rng")};
                require(ids.insert(rec.id).second, "duplicate id '" + rec.id + "'");
                edges.push_back(std::move(rec));
            }
        }
        if (window)
            return std::make_shared<const DiscreteGraph>(
                DiscreteGraph::unruled_window(std::move(vertices), edges, window->radius));
        return std::make_shared<const DiscreteGraph>(std::move(vertices), edges);
    } catch (const UnknownIdentifier& e) {
        throw SchemaError(e.what());
    } catch (const InvalidParameter& e) {
        throw SchemaError(e.what());
    }
}

inline GraphPtr graph_from_text(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    return graph_from_json(doc);
}

inline GraphPtr graph_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return graph_from_text(buf.str());
}

/** Canonical document: rule-generated windows are written by their rules only. */
inline Json graph_to_json(const DiscreteGraph& g)
{
    Json doc = Json::object();
    const auto& w = g.window();
    if (w && w->rules) {
        Json edges = Json::array();
        for (const auto& t : w->rules->edges)
            edges.push_back({{"id", t.id_pattern}, {"src", t.source_offset}, {"rng", t.range_offset}});
        doc["window"] = {{"kind", w->kind},
                         {"radius", w->radius},
                         {"rules", {{"vertex", w->rules->vertex_pattern}, {"edges", edges}}}};
        return doc;
    }
    doc["vertices"] = g.vertices();
    Json edges = Json::array();
    for (const auto& e : g.edges())
        edges.push_back({{"id", e}, {"src", g.source(e)}, {"rng", g.range(e)}});
    doc["edges"] = edges;
    if (w)
        doc["window"] = {{"kind", w->kind}, {"radius", w->radius}};
    return doc;
}

/** FNV-1a (64 bit) of the canonical graph document. */
inline std::string input_digest(const DiscreteGraph& g)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : graph_to_json(g).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/** Nonzero weights in the space's point order, as {"label": "p/q"}. */
template <class Point>
Json measure_to_json(const AtomicMeasure<Point>& mu)
{
    Json out = Json::object();
    for (const auto& p : mu.space()->points())
        if (auto w = mu.weight(p); w != 0)
            out[point_label(p)] = format_rational(w);
    return out;
}

/** {"v": "p/q" | integer, ...} over the graph's vertices. */
inline VertexMeasure vertex_measure_from_json(const Json& doc, const DiscreteGraph& g)
{
    detail::require(doc.is_object(), "seed measure must be a JSON object");
    std::map<VertexId, Rational> w;
    for (const auto& [key, value] : doc.items()) {
        detail::require(g.vertex_space()->contains(key), "seed measure names unknown vertex '" + key + "'");
        Rational x;
        if (value.is_string())
            x = parse_rational(value.get<std::string>());
        else if (value.is_number_integer())
            x = Rational(value.get<long>());
        else
            throw SchemaError("seed weight for '" + key + "' must be a rational string or an integer");
        detail::require(x >= 0, "seed weight for '" + key + "' is negative");
        w.emplace(key, x);
    }
    return VertexMeasure(g.vertex_space(), w);
}

inline std::string fixed_decimal(double x, int digits = 9)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

/** Exact value when rational, otherwise the defining polynomial and isolating interval. */
inline Json algebraic_to_json(const AlgebraicReal& x)
{
    if (x.is_rational())
        return format_rational(*x.rational());
    return Json{{"polynomial", x.polynomial().str()},
                {"interval", {format_rational(x.lower()), format_rational(x.upper())}}};
}

inline Json cone_to_json(const SolutionCone& cone)
{
    Json rays = Json::array();
    for (const auto& r : cone.rays)
        rays.push_back(measure_to_json(r));
    return Json{{"q", format_rational(cone.q)},
                {"dimension", cone.dimension},
                {"window_relaxed", cone.window_relaxed},
                {"rays", rays}};
}

inline Json spectrum_to_json(const Spectrum& s)
{
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        Json j{{"q", algebraic_to_json(e.q)},
               {"q_approx", fixed_decimal(e.q.approx())},
               {"beta_approx", fixed_decimal(std::log(e.q.approx()))},
               {"dimension", e.dimension},
               {"method", e.method}};
        if (e.tracial)
            j["annotation"] = "β=0 excluded by the classification theorem; tracial case";
        entries.push_back(std::move(j));
    }
    return Json{{"mode", s.mode}, {"window_relaxed", s.window_relaxed}, {"entries", entries}};
}

inline Json tower_to_json(const MeasureTower& t)
{
    Json levels = Json::array();
    for (std::size_t n = 0; n < t.measures.size(); ++n) {
        Json level{{"depth", n}, {"points", t.spaces[n].points().size()}, {"measure", measure_to_json(t.measures[n])}};
        if (n == 0) {
            level["certificate"] = nullptr;
        } else {
            const auto& c = t.certificates[n - 1];
            level["certificate"] = c.holds;
            Json relaxed = Json::array();
            for (const auto& p : c.relaxed_points)
                relaxed.push_back(p.label());
            level["relaxed_points"] = relaxed;
        }
        levels.push_back(std::move(level));
    }
    return Json{{"q", format_rational(t.q)},
                {"depth", t.depth()},
                {"seed", measure_to_json(t.seed)},
                {"window_relaxed", t.window_relaxed},
                {"levels", levels}};
}

inline Json quasi_invariance_to_json(const QuasiInvarianceReport& r)
{
    Json depths = Json::array();
    for (const auto& d : r.depths)
        depths.push_back({{"depth", d.depth},
                          {"passed", d.passed},
                          {"witness", d.witness ? Json(d.witness->label()) : Json(nullptr)}});
    return Json{{"passed", r.passed}, {"depths", depths}};
}

} // namespace graphkms
