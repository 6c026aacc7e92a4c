#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's solvers: boundary spaces are enumerated from raw edge
// sequences, cones are found by enumerating tight-constraint patterns with a
// separate elimination routine, and periods are read off explicit
// truncations.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <graphkms/graphkms.hpp>

namespace oracle {

using graphkms::DiscreteGraph;
using graphkms::EdgeRecord;
using graphkms::Rational;
using Vec = std::vector<Rational>;

/** Raw edge list with integer endpoints; the shape used by generators. */
struct RawGraph
{
    std::size_t vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // (source, range)
};

inline DiscreteGraph to_graph(const RawGraph& raw)
{
    std::vector<std::string> vs;
    for (std::size_t i = 0; i < raw.vertices; ++i)
        vs.push_back("x" + std::to_string(i));
    std::vector<EdgeRecord> es;
    for (std::size_t k = 0; k < raw.edges.size(); ++k)
        es.push_back({"f" + std::to_string(k), vs[raw.edges[k].first], vs[raw.edges[k].second]});
    return DiscreteGraph(vs, es);
}

inline graphkms::GraphPtr to_graph_ptr(const RawGraph& raw)
{
    return std::make_shared<const DiscreteGraph>(to_graph(raw));
}

inline RawGraph random_graph(std::mt19937& rng, std::size_t max_vertices, std::size_t max_edges)
{
    RawGraph g;
    g.vertices = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
    const auto m = std::uniform_int_distribution<std::size_t>(0, max_edges)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, g.vertices - 1);
    for (std::size_t k = 0; k < m; ++k)
        g.edges.emplace_back(pick(rng), pick(rng));
    return g;
}

// ---------------------------------------------------------------------------
// Exact elimination, written independently of the library's linear algebra.

/** Rank and a null-space basis of the rows (each of length n). */
struct Elimination
{
    std::size_t rank = 0;
    std::vector<Vec> kernel;
};

inline Elimination eliminate(std::vector<Vec> rows, std::size_t n)
{
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0)
            ++p;
        if (p >= rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        const Rational lead = rows[r][c];
        for (auto& x : rows[r])
            x /= lead;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i][c] != 0) {
                const Rational f = rows[i][c];
                for (std::size_t j = 0; j < n; ++j)
                    rows[i][j] -= f * rows[r][j];
            }
        pivot_col.push_back(c);
        ++r;
    }
    Elimination out;
    out.rank = r;
    for (std::size_t free = 0; free < n; ++free) {
        if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end())
            continue;
        Vec x(n);
        x[free] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            x[pivot_col[i]] = -rows[i][free];
        out.kernel.push_back(std::move(x));
    }
    return out;
}

inline Rational dotp(const Vec& a, const Vec& b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

/** Equality and inequality rows of Tμ ≤ qμ (equality where r^{-1}(v) ≠ ∅), built from the edge list. */
struct RawConstraints
{
    std::size_t n = 0;
    std::vector<Vec> equalities;
    std::vector<Vec> inequalities; // includes μ ≥ 0
};

inline RawConstraints sub_invariance_rows(const RawGraph& g, const Rational& q)
{
    RawConstraints c;
    c.n = g.vertices;
    for (std::size_t v = 0; v < g.vertices; ++v) {
        Vec row(g.vertices);
        row[v] = q;
        bool has_in = false;
        for (auto [s, r] : g.edges)
            if (r == v) {
                row[s] -= 1;
                has_in = true;
            }
        (has_in ? c.equalities : c.inequalities).push_back(std::move(row));
    }
    for (std::size_t v = 0; v < g.vertices; ++v) {
        Vec e(g.vertices);
        e[v] = 1;
        c.inequalities.push_back(std::move(e));
    }
    return c;
}

inline bool feasible(const RawConstraints& c, const Vec& x)
{
    for (const auto& a : c.equalities)
        if (dotp(a, x) != 0)
            return false;
    for (const auto& a : c.inequalities)
        if (dotp(a, x) < 0)
            return false;
    return true;
}

inline void normalize(Vec& x)
{
    for (const auto& v : x)
        if (v != 0) {
            const Rational s = v < 0 ? Rational(-v) : v;
            for (auto& y : x)
                y /= s;
            return;
        }
}

/**
 * Brute force over tight sets: every extreme ray is the one-dimensional
 * solution of the equalities plus some set of inequalities held at zero.
 * Returns the distinct feasible rays found.
 */
inline std::vector<Vec> brute_force_rays(const RawConstraints& c)
{
    const std::size_t m = c.inequalities.size();
    std::vector<Vec> rays;
    std::vector<std::size_t> chosen;
    auto consider = [&] {
        std::vector<Vec> rows = c.equalities;
        for (auto i : chosen)
            rows.push_back(c.inequalities[i]);
        const auto e = eliminate(rows, c.n);
        if (e.kernel.size() != 1)
            return;
        for (int sign : {1, -1}) {
            Vec x = e.kernel.front();
            for (auto& v : x)
                v *= sign;
            if (!feasible(c, x))
                continue;
            normalize(x);
            if (std::find(rays.begin(), rays.end(), x) == rays.end())
                rays.push_back(x);
        }
    };
    // Subsets of size ≤ n − 1 suffice: a one-dimensional kernel needs rank n − 1.
    std::function<void(std::size_t)> walk = [&](std::size_t start) {
        consider();
        if (chosen.size() + 1 >= c.n)
            return;
        for (std::size_t i = start; i < m; ++i) {
            chosen.push_back(i);
            walk(i + 1);
            chosen.pop_back();
        }
    };
    walk(0);
    return rays;
}

inline std::size_t span_dimension(const std::vector<Vec>& vs, std::size_t n)
{
    return vs.empty() ? 0 : eliminate(vs, n).rank;
}

// ---------------------------------------------------------------------------
// Paths

/** All composable edge sequences of length exactly n, from raw products of edges. */
inline std::vector<std::vector<std::string>> raw_paths(const DiscreteGraph& g, std::size_t n)
{
    std::vector<std::vector<std::string>> out{{}};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::vector<std::string>> next;
        for (const auto& p : out)
            for (const auto& e : g.edges())
                if (p.empty() || g.source(p.back()) == g.range(e)) {
                    auto q = p;
                    q.push_back(e);
                    next.push_back(std::move(q));
                }
        out = std::move(next);
    }
    return out;
}

/** Labels of ∂E_n from the definition: E^k_sng for k < n together with E^n. */
inline std::set<std::string> boundary_labels(const DiscreteGraph& g, std::size_t n)
{
    std::set<std::string> no_in_edges;
    for (const auto& v : g.vertices())
        if (g.in_degree(v) == 0)
            no_in_edges.insert(v);
    auto label = [](const std::vector<std::string>& p) {
        std::string s;
        for (const auto& e : p)
            s += (s.empty() ? "" : ".") + e;
        return s;
    };
    std::set<std::string> out;
    if (n == 0) {
        out.insert(g.vertices().begin(), g.vertices().end());
        return out;
    }
    for (const auto& v : no_in_edges)
        out.insert(v);
    for (std::size_t k = 1; k < n; ++k)
        for (const auto& p : raw_paths(g, k))
            if (no_in_edges.count(g.source(p.back())))
                out.insert(label(p));
    for (const auto& p : raw_paths(g, n))
        out.insert(label(p));
    return out;
}

/** #E^n: entry sum of M^{n-1} on edges, M(e, f) = 1 when s(e) = r(f); |E^0| for n = 0. */
inline Rational path_count_by_matrix(const DiscreteGraph& g, std::size_t n)
{
    const auto& es = g.edges();
    const std::size_t m = es.size();
    if (n == 0)
        return Rational(static_cast<long>(g.vertices().size()));
    std::vector<Rational> count(m, 1); // paths of length 1 ending (at the source side) with edge j
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<Rational> next(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (g.source(es[i]) == g.range(es[j]))
                    next[j] += count[i];
        count = std::move(next);
    }
    return std::accumulate(count.begin(), count.end(), Rational(0));
}

/** True iff some vertex returns to itself, from traces of powers of the vertex matrix. */
inline bool has_cycle_by_traces(const RawGraph& g)
{
    const std::size_t n = g.vertices;
    std::vector<std::vector<long>> a(n, std::vector<long>(n, 0)), p;
    for (auto [s, r] : g.edges)
        a[s][r] = 1;
    p = a;
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            if (p[i][i] > 0)
                return true;
        std::vector<std::vector<long>> next(n, std::vector<long>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (p[i][j])
                    for (std::size_t l = 0; l < n; ++l)
                        if (a[j][l])
                            next[i][l] = 1;
        p = std::move(next);
    }
    return false;
}

/**
 * min{k − l : σ^k(a) = σ^l(a), k > l} for an infinite word given by a long
 * enough truncation. l runs over [0, lmax]; tails are compared on `window`
 * symbols, which is exact once window ≥ preperiod + period.
 */
inline std::optional<std::size_t> brute_force_period(const std::vector<int>& word, std::size_t lmax,
                                                     std::size_t dmax, std::size_t window)
{
    for (std::size_t d = 1; d <= dmax; ++d)
        for (std::size_t l = 0; l <= lmax; ++l) {
            bool equal = true;
            for (std::size_t i = 0; i < window && equal; ++i)
                equal = word[l + i] == word[l + d + i];
            if (equal)
                return d;
        }
    return std::nullopt;
}

} // namespace oracle
