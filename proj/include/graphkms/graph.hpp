#pragma once

// Discrete topological graphs E = (E0, E1, r, s).
//
// For discrete vertex and edge spaces the source map is automatically a local
// homeomorphism, every prefix map a ↦ a(n) is trivially continuous, and the
// topological regularity condition reduces to "r^{-1}(v) is nonempty and
// finite". Infinite integer-indexed graphs are handled through a finite
// window plus a translation-invariant rule; the window's in-degree rule is
// what certifies regularity near the window edge, since a truncation alone
// cannot.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphkms/errors.hpp"
#include "graphkms/measure.hpp"

namespace graphkms {

using VertexId = std::string;
using EdgeId = std::string;

/**
 * A finite path a = a_1 a_2 ⋯ a_n with s(a_k) = r(a_{k+1}), or a bare vertex
 * when n = 0. The vertices visited are stored alongside the edges
 * (r(a), s(a_1), …, s(a_n)) so that prefixes, segments and shifts need no
 * graph lookup.
 */
class FinitePath
{
public:
    FinitePath() = default;

    static FinitePath vertex(VertexId v)
    {
        FinitePath p;
        p.vertices_.push_back(std::move(v));
        return p;
    }

    /** Unchecked; DiscreteGraph::path validates composability. */
    static FinitePath from_parts(std::vector<EdgeId> edges, std::vector<VertexId> vertices)
    {
        if (vertices.size() != edges.size() + 1)
            throw InvalidParameter("a path of length n visits n + 1 vertices");
        FinitePath p;
        p.edges_ = std::move(edges);
        p.vertices_ = std::move(vertices);
        return p;
    }

    std::size_t length() const noexcept { return edges_.size(); }
    bool is_vertex() const noexcept { return edges_.empty(); }
    const VertexId& range() const { return vertices_.front(); }
    const VertexId& source() const { return vertices_.back(); }
    const std::vector<EdgeId>& edges() const noexcept { return edges_; }
    const std::vector<VertexId>& vertices() const noexcept { return vertices_; }

    /** Vertex id for length 0, otherwise the edge ids joined with '.'. */
    std::string label() const
    {
        if (edges_.empty())
            return vertices_.empty() ? std::string{} : vertices_.front();
        std::string out = edges_.front();
        for (std::size_t i = 1; i < edges_.size(); ++i)
            out += '.' + edges_[i];
        return out;
    }

    /** Concatenation a·b, defined when s(a) = r(b). */
    FinitePath concat(const FinitePath& tail) const
    {
        if (source() != tail.range())
            throw NotComposable("cannot append '" + tail.label() + "' to '" + label() + "'");
        FinitePath p = *this;
        p.edges_.insert(p.edges_.end(), tail.edges_.begin(), tail.edges_.end());
        p.vertices_.insert(p.vertices_.end(), tail.vertices_.begin() + 1, tail.vertices_.end());
        return p;
    }

    friend bool operator==(const FinitePath& a, const FinitePath& b)
    {
        return a.edges_ == b.edges_ && a.vertices_ == b.vertices_;
    }

    friend bool operator<(const FinitePath& a, const FinitePath& b)
    {
        if (a.edges_.size() != b.edges_.size())
            return a.edges_.size() < b.edges_.size();
        if (a.edges_ != b.edges_)
            return a.edges_ < b.edges_;
        return a.vertices_ < b.vertices_;
    }

private:
    std::vector<EdgeId> edges_;
    std::vector<VertexId> vertices_;
};

inline std::string point_label(const FinitePath& p)
{
    return p.label();
}

/** a(n) = a_1 ⋯ a_n, with a(0) = r(a). */
inline FinitePath prefix(const FinitePath& a, std::size_t n)
{
    if (n > a.length())
        throw IndexOutOfRange("prefix length " + std::to_string(n) + " exceeds |a| = " +
                              std::to_string(a.length()));
    return FinitePath::from_parts({a.edges().begin(), a.edges().begin() + n},
                                  {a.vertices().begin(), a.vertices().begin() + n + 1});
}

/** a(k, n) = a_k ⋯ a_n for 1 ≤ k ≤ n ≤ |a|. */
inline FinitePath segment(const FinitePath& a, std::size_t k, std::size_t n)
{
    if (k < 1 || k > n || n > a.length())
        throw IndexOutOfRange("segment (" + std::to_string(k) + ", " + std::to_string(n) +
                              ") of a path of length " + std::to_string(a.length()));
    return FinitePath::from_parts({a.edges().begin() + (k - 1), a.edges().begin() + n},
                                  {a.vertices().begin() + (k - 1), a.vertices().begin() + n + 1});
}

struct EdgeRecord
{
    EdgeId id;
    VertexId source;
    VertexId range;
};

/** Edge family e_m of a translation-invariant integer line: s = v_{m+src}, r = v_{m+rng}. */
struct EdgeTemplate
{
    std::string id_pattern;
    long source_offset = 0;
    long range_offset = 0;
};

/** Labels are produced by replacing "{n}" in the patterns with the index. */
struct WindowRules
{
    std::string vertex_pattern = "v{n}";
    std::vector<EdgeTemplate> edges;
};

struct WindowDescriptor
{
    std::string kind = "integer-line";
    long radius = 1;
    std::optional<WindowRules> rules;
};

inline std::string expand_pattern(const std::string& pattern, long n)
{
    std::string out;
    const std::string key = "{n}";
    std::size_t pos = 0;
    for (;;) {
        auto hit = pattern.find(key, pos);
        if (hit == std::string::npos) {
            out += pattern.substr(pos);
            return out;
        }
        out += pattern.substr(pos, hit - pos) + std::to_string(n);
        pos = hit + key.size();
    }
}

enum class VertexClass { Regular, Singular };

inline const char* to_string(VertexClass c)
{
    return c == VertexClass::Regular ? "regular" : "singular";
}

/**
 * The quadruple (E0, E1, r, s) over finite discrete spaces. A windowed graph
 * is the finite subgraph of an integer-indexed graph spanned by the indices
 * in [-radius, radius]; vertices whose in-edges are cut by the window are
 * flagged as boundary vertices.
 */
class DiscreteGraph
{
public:
    DiscreteGraph(std::vector<VertexId> vertices, const std::vector<EdgeRecord>& edges)
        : vertices_(make_space(std::move(vertices)))
    {
        std::vector<EdgeId> ids;
        for (const auto& e : edges) {
            if (vertices_->contains(e.id))
                throw InvalidParameter("edge id '" + e.id + "' collides with a vertex id");
            if (!vertices_->contains(e.source))
                throw UnknownIdentifier("edge '" + e.id + "' has unknown source '" + e.source + "'");
            if (!vertices_->contains(e.range))
                throw UnknownIdentifier("edge '" + e.id + "' has unknown range '" + e.range + "'");
            ids.push_back(e.id);
            source_.emplace(e.id, e.source);
            range_.emplace(e.id, e.range);
            in_edges_[e.range].push_back(e.id);
            out_edges_[e.source].push_back(e.id);
        }
        edges_ = make_space(std::move(ids));
    }

    /** Window [-radius, radius] of the integer line described by the rules. */
    static DiscreteGraph integer_line(long radius, const WindowRules& rules)
    {
        if (radius < 1)
            throw InvalidParameter("window radius must be at least 1");
        auto in_window = [radius](long n) { return -radius <= n && n <= radius; };
        std::vector<VertexId> vertices;
        for (long n = -radius; n <= radius; ++n)
            vertices.push_back(expand_pattern(rules.vertex_pattern, n));
        std::vector<EdgeRecord> edges;
        std::set<VertexId> boundary;
        // Edge e_m is kept when both endpoints lie in the window.
        for (const auto& t : rules.edges) {
            const long lo = -radius - std::max(t.source_offset, t.range_offset);
            const long hi = radius - std::min(t.source_offset, t.range_offset);
            for (long m = lo; m <= hi; ++m) {
                const long s = m + t.source_offset;
                const long r = m + t.range_offset;
                if (in_window(s) && in_window(r))
                    edges.push_back({expand_pattern(t.id_pattern, m),
                                     expand_pattern(rules.vertex_pattern, s),
                                     expand_pattern(rules.vertex_pattern, r)});
                else if (in_window(r))
                    boundary.insert(expand_pattern(rules.vertex_pattern, r));
            }
        }
        DiscreteGraph g(std::move(vertices), edges);
        g.window_ = WindowDescriptor{"integer-line", radius, rules};
        g.boundary_ = std::move(boundary);
        return g;
    }

    /** Explicitly listed window without a rule; regularity is then undecidable. */
    static DiscreteGraph unruled_window(std::vector<VertexId> vertices, const std::vector<EdgeRecord>& edges,
                                        long radius)
    {
        DiscreteGraph g(std::move(vertices), edges);
        g.window_ = WindowDescriptor{"integer-line", radius, std::nullopt};
        return g;
    }

    const SpacePtr<VertexId>& vertex_space() const noexcept { return vertices_; }
    const SpacePtr<EdgeId>& edge_space() const noexcept { return edges_; }
    const std::vector<VertexId>& vertices() const noexcept { return vertices_->points(); }
    const std::vector<EdgeId>& edges() const noexcept { return edges_->points(); }

    const VertexId& range(const EdgeId& e) const { return lookup(range_, e); }
    const VertexId& source(const EdgeId& e) const { return lookup(source_, e); }

    /** r^{-1}(v) within the materialized graph, in edge order. */
    const std::vector<EdgeId>& in_edges(const VertexId& v) const { return lookup_list(in_edges_, v); }
    const std::vector<EdgeId>& out_edges(const VertexId& v) const { return lookup_list(out_edges_, v); }

    bool is_windowed() const noexcept { return window_.has_value(); }
    const std::optional<WindowDescriptor>& window() const noexcept { return window_; }

    /** True when the window cuts some in-edge of v. Always false for finite graphs. */
    bool is_boundary(const VertexId& v) const { return boundary_.count(v) != 0; }
    const std::set<VertexId>& boundary_vertices() const noexcept { return boundary_; }

    /**
     * #r^{-1}(v) in the full graph. For windows this comes from the rule
     * (every template contributes one in-edge to every vertex).
     */
    std::size_t in_degree(const VertexId& v) const
    {
        vertices_->index_of(v);
        if (!window_)
            return in_edges(v).size();
        if (!window_->rules)
            throw WindowRuleMissing("window over " + std::to_string(vertices_->size()) +
                                    " vertices has no in-degree rule");
        return window_->rules->edges.size();
    }

    FinitePath vertex_path(const VertexId& v) const
    {
        vertices_->index_of(v);
        return FinitePath::vertex(v);
    }

    /** Validated path from an edge sequence (nonempty). */
    FinitePath path(const std::vector<EdgeId>& edges) const
    {
        if (edges.empty())
            throw InvalidParameter("use vertex_path for length-0 paths");
        std::vector<VertexId> visited{range(edges.front())};
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (k > 0 && source(edges[k - 1]) != range(edges[k]))
                throw NotComposable("s(" + edges[k - 1] + ") != r(" + edges[k] + ")");
            visited.push_back(source(edges[k]));
        }
        return FinitePath::from_parts(edges, std::move(visited));
    }

    /** a·e for s(a) = r(e). */
    FinitePath extend(const FinitePath& a, const EdgeId& e) const
    {
        if (a.source() != range(e))
            throw NotComposable("s(" + a.label() + ") != r(" + e + ")");
        auto edges = a.edges();
        auto visited = a.vertices();
        edges.push_back(e);
        visited.push_back(source(e));
        return FinitePath::from_parts(std::move(edges), std::move(visited));
    }

    DiscreteMap<EdgeId, VertexId> range_map() const { return {edges_, vertices_, range_}; }
    DiscreteMap<EdgeId, VertexId> source_map() const { return {edges_, vertices_, source_}; }

private:
    template <class Map>
    static const VertexId& lookup(const Map& m, const EdgeId& e)
    {
        auto it = m.find(e);
        if (it == m.end())
            throw UnknownIdentifier("unknown edge '" + e + "'");
        return it->second;
    }

    const std::vector<EdgeId>& lookup_list(const std::map<VertexId, std::vector<EdgeId>>& m,
                                           const VertexId& v) const
    {
        static const std::vector<EdgeId> none;
        vertices_->index_of(v);
        auto it = m.find(v);
        return it == m.end() ? none : it->second;
    }

    SpacePtr<VertexId> vertices_;
    SpacePtr<EdgeId> edges_;
    std::map<EdgeId, VertexId> source_;
    std::map<EdgeId, VertexId> range_;
    std::map<VertexId, std::vector<EdgeId>> in_edges_;
    std::map<VertexId, std::vector<EdgeId>> out_edges_;
    std::optional<WindowDescriptor> window_;
    std::set<VertexId> boundary_;
};

/** v is regular iff 0 < #r^{-1}(v) < ∞. */
inline std::map<VertexId, VertexClass> classify_vertices(const DiscreteGraph& g)
{
    std::map<VertexId, VertexClass> out;
    for (const auto& v : g.vertices())
        out.emplace(v, g.in_degree(v) > 0 ? VertexClass::Regular : VertexClass::Singular);
    return out;
}

inline std::set<VertexId> singular_vertices(const DiscreteGraph& g)
{
    std::set<VertexId> out;
    for (const auto& [v, c] : classify_vertices(g))
        if (c == VertexClass::Singular)
            out.insert(v);
    return out;
}

/** E^n: all composable edge sequences of length n (the vertices when n = 0). */
inline std::vector<FinitePath> enumerate_paths(const DiscreteGraph& g, std::size_t n)
{
    std::vector<FinitePath> level;
    for (const auto& v : g.vertices())
        level.push_back(FinitePath::vertex(v));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<FinitePath> next;
        for (const auto& a : level)
            for (const auto& e : g.in_edges(a.source()))
                next.push_back(k == 0 ? g.path({e}) : g.extend(a, e));
        level = std::move(next);
    }
    return level;
}

/** Minimal p dividing |c| such that the edge word of c is invariant under rotation by p. */
inline std::size_t minimal_rotation_period(const std::vector<EdgeId>& word)
{
    const std::size_t n = word.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0)
            continue;
        bool periodic = true;
        for (std::size_t i = 0; i + p < n && periodic; ++i)
            periodic = word[i] == word[i + p];
        if (periodic)
            return p;
    }
    return n;
}

/** A based cycle: |c| ≥ 1 and r(c) = s(c). */
class Cycle
{
public:
    explicit Cycle(FinitePath path) : path_(std::move(path))
    {
        if (path_.length() == 0 || path_.range() != path_.source())
            throw NotACycle("'" + path_.label() + "' is not a cycle");
        primitive_length_ = minimal_rotation_period(path_.edges());
    }

    const FinitePath& path() const noexcept { return path_; }
    std::size_t length() const noexcept { return path_.length(); }
    std::size_t primitive_length() const noexcept { return primitive_length_; }
    bool is_primitive() const noexcept { return primitive_length_ == path_.length(); }

    /** The primitive root d with c = d^k. */
    Cycle primitive() const { return is_primitive() ? *this : Cycle(prefix(path_, primitive_length_)); }

    friend bool operator==(const Cycle& a, const Cycle& b) { return a.path_ == b.path_; }
    friend bool operator<(const Cycle& a, const Cycle& b) { return a.path_ < b.path_; }

private:
    FinitePath path_;
    std::size_t primitive_length_ = 0;
};

/** True iff b = a'·c for some path a' (possibly a vertex). */
inline bool ends_with_cycle(const FinitePath& b, const Cycle& c)
{
    const auto& be = b.edges();
    const auto& ce = c.path().edges();
    return be.size() >= ce.size() && std::equal(ce.begin(), ce.end(), be.end() - ce.size());
}

/**
 * The infinite path b c^∞, where b is an exit of c: s(b) = r(c) and b is not
 * of the form a'c. By default a non-primitive cycle is reduced to its
 * primitive root (stripping trailing copies of the root from b); strict
 * mode rejects it instead.
 */
class EventuallyCyclicPath
{
public:
    EventuallyCyclicPath(FinitePath exit, Cycle cycle, bool strict = false)
        : exit_(std::move(exit)), cycle_(std::move(cycle))
    {
        if (exit_.source() != cycle_.path().range())
            throw NotAnExit("s(" + exit_.label() + ") != r(" + cycle_.path().label() + ")");
        if (ends_with_cycle(exit_, cycle_))
            throw NotAnExit("'" + exit_.label() + "' ends with the cycle '" + cycle_.path().label() + "'");
        if (!cycle_.is_primitive()) {
            if (strict)
                throw NonPrimitiveCycle("'" + cycle_.path().label() + "' has primitive length " +
                                        std::to_string(cycle_.primitive_length()));
            cycle_ = cycle_.primitive();
            while (ends_with_cycle(exit_, cycle_))
                exit_ = prefix(exit_, exit_.length() - cycle_.length());
        }
    }

    const FinitePath& exit() const noexcept { return exit_; }
    const Cycle& cycle() const noexcept { return cycle_; }

    /** First n edges of b c^∞. */
    std::vector<EdgeId> truncation(std::size_t n) const
    {
        std::vector<EdgeId> out;
        out.reserve(n);
        const auto& b = exit_.edges();
        const auto& c = cycle_.path().edges();
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(i < b.size() ? b[i] : c[(i - b.size()) % c.size()]);
        return out;
    }

private:
    FinitePath exit_;
    Cycle cycle_;
};

/** Positive generator of Per(a) = |c|ℤ for a = b c^∞ with c primitive. */
inline std::size_t periodicity_group(const EventuallyCyclicPath& a)
{
    return a.cycle().primitive_length();
}

/**
 * All based cycles of length ≤ max_length, each edge sequence listed once
 * (rotations are distinct cycles). Exhaustive bounded search.
 */
inline std::vector<Cycle> find_cycles(const DiscreteGraph& g, std::size_t max_length)
{
    std::vector<Cycle> out;
    std::vector<FinitePath> frontier;
    for (const auto& e : g.edges())
        frontier.push_back(g.path({e}));
    for (std::size_t len = 1; len <= max_length && !frontier.empty(); ++len) {
        std::vector<FinitePath> next;
        for (auto& a : frontier) {
            if (a.range() == a.source())
                out.emplace_back(a);
            if (len < max_length)
                for (const auto& e : g.in_edges(a.source()))
                    next.push_back(g.extend(a, e));
        }
        frontier = std::move(next);
    }
    return out;
}

/**
 * The graph groupoid is principal iff the graph has no cycle. Decided by
 * peeling vertices without incoming edges (Kahn's algorithm): a cycle
 * survives every peel.
 */
inline bool is_principal(const DiscreteGraph& g)
{
    std::map<VertexId, std::size_t> indegree;
    for (const auto& v : g.vertices())
        indegree[v] = g.in_edges(v).size();
    std::deque<VertexId> ready;
    for (const auto& [v, d] : indegree)
        if (d == 0)
            ready.push_back(v);
    std::size_t removed = 0;
    while (!ready.empty()) {
        const VertexId v = ready.front();
        ready.pop_front();
        ++removed;
        for (const auto& e : g.out_edges(v))
            if (--indegree[g.range(e)] == 0)
                ready.push_back(g.range(e));
    }
    return removed == g.vertices().size();
}

} // namespace graphkms
