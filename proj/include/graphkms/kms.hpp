#pragma once

// Transfer operator, β-sub-invariant cones, KMS spectrum and the measure
// tower realizing a β-quasi-invariant boundary measure. The inverse
// temperature enters only through q = e^β, a positive rational.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphkms/boundary.hpp"
#include "graphkms/cone.hpp"
#include "graphkms/errors.hpp"
#include "graphkms/graph.hpp"
#include "graphkms/linalg.hpp"
#include "graphkms/measure.hpp"
#include "graphkms/polynomial.hpp"

namespace graphkms {

using VertexMeasure = AtomicMeasure<VertexId>;
using PathMeasure = AtomicMeasure<FinitePath>;

/** T = r_* s^* on the vertex space, checked against the sheaf composition. */
inline VertexMeasure transfer_via_sheaf(const DiscreteGraph& g, const VertexMeasure& mu)
{
    auto s = LocalHomeoPresentation<EdgeId, VertexId>::with_fiber_pieces(g.source_map());
    return pushforward(g.range_map(), pullback(s, mu));
}

/** A(v, w) = #{e : r(e) = v, s(e) = w}, rows and columns in vertex order. */
class TransferMatrix
{
public:
    explicit TransferMatrix(const DiscreteGraph& g)
        : vertices_(g.vertex_space()), a_(g.vertices().size(), g.vertices().size())
    {
        for (const auto& e : g.edges())
            a_(vertices_->index_of(g.range(e)), vertices_->index_of(g.source(e))) += 1;
        for (const auto& v : g.vertices()) {
            const auto via_sheaf = transfer_via_sheaf(g, VertexMeasure::dirac(vertices_, v));
            if (via_sheaf.weights() != apply(VertexMeasure::dirac(vertices_, v)).weights())
                throw ConsistencyFailure("transfer matrix disagrees with r_*s^* at δ_" + v);
        }
    }

    const SpacePtr<VertexId>& vertices() const noexcept { return vertices_; }
    const RationalMatrix& matrix() const noexcept { return a_; }

    const Rational& operator()(const VertexId& v, const VertexId& w) const
    {
        return a_(vertices_->index_of(v), vertices_->index_of(w));
    }

    /** (Tμ)(v) = Σ_w A(v, w) μ(w). */
    VertexMeasure apply(const VertexMeasure& mu) const
    {
        std::map<VertexId, Rational> out;
        const auto& vs = vertices_->points();
        for (const auto& [w, m] : mu.weights()) {
            const auto j = vertices_->index_of(w);
            for (std::size_t i = 0; i < vs.size(); ++i)
                if (a_(i, j) != 0)
                    out[vs[i]] += a_(i, j) * m;
        }
        return VertexMeasure(vertices_, out);
    }

private:
    SpacePtr<VertexId> vertices_;
    RationalMatrix a_;
};

inline TransferMatrix transfer_matrix(const DiscreteGraph& g)
{
    return TransferMatrix(g);
}

/** One constraint row: (Tμ)(v) = qμ(v) or (Tμ)(v) ≤ qμ(v). */
struct ConstraintRow
{
    VertexId vertex;
    bool equality = false;
    bool boundary = false; // demoted to an inequality by the window
};

/**
 * Tμ ≤ qμ on E^0 with equality at regular vertices, μ ≥ 0. Regular vertices
 * whose in-edges are cut by a window are demoted to inequality rows.
 */
class SubInvarianceProblem
{
public:
    SubInvarianceProblem(GraphPtr graph, Rational q) : graph_(std::move(graph)), q_(std::move(q)), t_(*graph_)
    {
        if (q_ <= 0)
            throw InvalidParameter("q = e^β must be positive, got " + format_rational(q_));
        const auto classes = classify_vertices(*graph_);
        bool any_equality = false;
        for (const auto& v : graph_->vertices()) {
            const bool regular = classes.at(v) == VertexClass::Regular;
            const bool boundary = graph_->is_boundary(v);
            rows_.push_back({v, regular && !boundary, boundary});
            any_equality = any_equality || (regular && !boundary);
        }
        if (graph_->is_windowed() && !any_equality)
            throw WindowTooSmall("every vertex of the window is a boundary vertex");
    }

    const GraphPtr& graph() const noexcept { return graph_; }
    const Rational& q() const noexcept { return q_; }
    const TransferMatrix& transfer() const noexcept { return t_; }
    const std::vector<ConstraintRow>& rows() const noexcept { return rows_; }
    bool window_relaxed() const noexcept { return graph_->is_windowed(); }

    /** Coefficients of qμ(v) − (Tμ)(v) in vertex order. */
    RationalVector coefficients(const ConstraintRow& row) const
    {
        const auto i = t_.vertices()->index_of(row.vertex);
        const auto n = t_.vertices()->size();
        RationalVector c(n);
        for (std::size_t j = 0; j < n; ++j)
            c[j] = -t_.matrix()(i, j);
        c[i] += q_;
        return c;
    }

    ConeConstraints constraints() const
    {
        ConeConstraints c;
        c.dimension = t_.vertices()->size();
        for (const auto& row : rows_)
            (row.equality ? c.equalities : c.inequalities).push_back(coefficients(row));
        for (std::size_t i = 0; i < c.dimension; ++i) {
            RationalVector e(c.dimension);
            e[i] = 1;
            c.inequalities.push_back(std::move(e));
        }
        return c;
    }

    /** Description of the first violated row, or nullopt when μ is a member. */
    std::optional<std::string> violation(const VertexMeasure& mu) const
    {
        if (!same_points(*mu.space(), *t_.vertices()))
            throw SpaceMismatch("seed measure does not live on the vertex space");
        const auto tmu = t_.apply(mu);
        for (const auto& row : rows_) {
            const Rational lhs = tmu.weight(row.vertex);
            const Rational rhs = q_ * mu.weight(row.vertex);
            if (row.equality && lhs != rhs)
                return "(Tμ)(" + row.vertex + ") = " + format_rational(lhs) + " but qμ(" + row.vertex +
                       ") = " + format_rational(rhs) + " at a regular vertex";
            if (!row.equality && lhs > rhs)
                return "(Tμ)(" + row.vertex + ") = " + format_rational(lhs) + " exceeds qμ(" + row.vertex +
                       ") = " + format_rational(rhs);
        }
        return std::nullopt;
    }

private:
    GraphPtr graph_;
    Rational q_;
    TransferMatrix t_;
    std::vector<ConstraintRow> rows_;
};

struct SolutionCone
{
    Rational q;
    std::vector<VertexMeasure> rays;
    std::size_t dimension = 0;
    bool window_relaxed = false;
};

/** Extreme rays of the sub-invariant cone, first nonzero weight 1, sorted. */
inline SolutionCone solve_cone(const SubInvarianceProblem& problem)
{
    const auto gen = extreme_rays(problem.constraints());
    if (!gen.lineality.empty())
        throw ConsistencyFailure("sub-invariant cone has a nontrivial lineality space");
    SolutionCone cone;
    cone.q = problem.q();
    cone.window_relaxed = problem.window_relaxed();
    const auto& space = problem.transfer().vertices();
    for (const auto& x : gen.rays) {
        std::map<VertexId, Rational> w;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != 0)
                w.emplace(space->points()[i], x[i]);
        cone.rays.emplace_back(space, w);
    }
    cone.dimension = rank(gen.rays, space->size());
    return cone;
}

inline SolutionCone solve_cone(const GraphPtr& g, const Rational& q)
{
    return solve_cone(SubInvarianceProblem(g, q));
}

// ---------------------------------------------------------------------------
// Spectrum

/** A strongly connected class of the relation i → j iff A(i, j) > 0. */
struct SpectralClass
{
    std::vector<std::size_t> members;
    AlgebraicReal radius = AlgebraicReal::exact(0);
    bool distinguished = false;
};

/**
 * Classes of A with their spectral radii. A class α is distinguished when
 * its radius is positive and strictly exceeds the radius of every other class
 * having access to α; these are exactly the supports of the nonnegative
 * eigenvectors of A (one extreme eigenvector per distinguished class).
 */
inline std::vector<SpectralClass> spectral_classes(const RationalMatrix& a)
{
    const std::size_t n = a.rows();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        std::deque<std::size_t> todo{i};
        reach[i][i] = true;
        while (!todo.empty()) {
            const auto u = todo.front();
            todo.pop_front();
            for (std::size_t j = 0; j < n; ++j)
                if (a(u, j) > 0 && !reach[i][j]) {
                    reach[i][j] = true;
                    todo.push_back(j);
                }
        }
    }
    std::vector<SpectralClass> classes;
    std::vector<int> class_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (class_of[i] >= 0)
            continue;
        SpectralClass c;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i]) {
                c.members.push_back(j);
                class_of[j] = static_cast<int>(classes.size());
            }
        RationalMatrix block(c.members.size(), c.members.size());
        for (std::size_t x = 0; x < c.members.size(); ++x)
            for (std::size_t y = 0; y < c.members.size(); ++y)
                block(x, y) = a(c.members[x], c.members[y]);
        if (auto r = largest_real_root(characteristic_polynomial(block)); r && AlgebraicReal::exact(0) < *r)
            c.radius = *r;
        classes.push_back(std::move(c));
    }
    const auto zero = AlgebraicReal::exact(0);
    for (std::size_t x = 0; x < classes.size(); ++x) {
        auto& alpha = classes[x];
        alpha.distinguished = zero < alpha.radius;
        for (std::size_t y = 0; y < classes.size() && alpha.distinguished; ++y) {
            if (y == x || !reach[classes[y].members.front()][alpha.members.front()])
                continue;
            if (!(classes[y].radius < alpha.radius))
                alpha.distinguished = false;
        }
    }
    return classes;
}

struct SpectrumEntry
{
    AlgebraicReal q;
    std::size_t dimension = 0;
    bool tracial = false;   // q = 1, i.e. β = 0
    std::string method;     // "cone" or "perron-classes"
};

struct Spectrum
{
    std::string mode; // "exact" or "scan"
    bool window_relaxed = false;
    std::vector<SpectrumEntry> entries;
};

inline bool all_regular_finite(const DiscreteGraph& g)
{
    if (g.is_windowed())
        return false;
    for (const auto& [v, c] : classify_vertices(g))
        if (c != VertexClass::Regular)
            return false;
    return true;
}

/**
 * Exact spectrum of an all-regular finite graph: the positive roots of the
 * characteristic polynomial of A that carry a nonnegative eigenvector.
 * Rational candidates are decided by solving the cone; irrational ones by the
 * distinguished-class criterion.
 */
inline Spectrum exact_spectrum(const GraphPtr& g)
{
    if (g->is_windowed())
        throw ExactModeUnavailable("exact mode needs a finite graph; use a scan for windows");
    if (!all_regular_finite(*g))
        throw ExactModeUnavailable("graph has singular vertices; use a scan");
    const TransferMatrix t(*g);
    const auto classes = spectral_classes(t.matrix());
    Spectrum out;
    out.mode = "exact";
    for (auto& root : positive_real_roots(characteristic_polynomial(t.matrix()))) {
        SpectrumEntry entry{root, 0, false, ""};
        if (root.is_rational()) {
            entry.dimension = solve_cone(g, *root.rational()).dimension;
            entry.method = "cone";
            entry.tracial = *root.rational() == 1;
        } else {
            for (const auto& c : classes)
                if (c.distinguished && c.radius == root)
                    ++entry.dimension;
            entry.method = "perron-classes";
        }
        if (entry.dimension > 0)
            out.entries.push_back(std::move(entry));
    }
    return out;
}

/** steps equally spaced points from qmin to qmax inclusive. */
inline std::vector<Rational> scan_grid(const Rational& qmin, const Rational& qmax, std::size_t steps)
{
    if (qmin <= 0 || qmax < qmin)
        throw InvalidParameter("scan needs 0 < qmin ≤ qmax");
    if (steps == 0)
        throw InvalidParameter("scan needs at least one step");
    if (steps == 1)
        return {qmin};
    std::vector<Rational> grid;
    for (std::size_t i = 0; i < steps; ++i)
        grid.push_back(qmin + (qmax - qmin) * Rational(static_cast<long>(i), static_cast<long>(steps - 1)));
    return grid;
}

/** Thread cap from GRAPHKMS_THREADS, defaulting to the hardware concurrency. */
inline std::size_t scan_threads()
{
    if (const char* env = std::getenv("GRAPHKMS_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1)
            return static_cast<std::size_t>(n);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/** Cone dimension over a q-grid; grid points run concurrently, results kept in q order. */
inline Spectrum scan_spectrum(const GraphPtr& g, const std::vector<Rational>& grid, std::size_t threads = scan_threads())
{
    std::vector<std::size_t> dims(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
            try {
                dims[i] = solve_cone(g, grid[i]).dimension;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < std::min(threads, grid.size()); ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    Spectrum out;
    out.mode = "scan";
    out.window_relaxed = g->is_windowed();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (dims[i] > 0)
            out.entries.push_back({AlgebraicReal::exact(grid[i]), dims[i], grid[i] == 1, "cone"});
    return out;
}

// ---------------------------------------------------------------------------
// Normalization

struct NormalizationReport
{
    bool normalizable = false;
    std::optional<VertexMeasure> probability;
    std::string note;
};

/**
 * Scales a ray of a finite graph to total mass 1. For a window the ray is
 * compared with the ray at radius + 1, both aligned at index 0; growing mass
 * rules out a probability normalization.
 */
inline NormalizationReport normalization(const GraphPtr& g, const VertexMeasure& ray, const Rational& q)
{
    NormalizationReport rep;
    if (ray.is_zero()) {
        rep.note = "zero measure";
        return rep;
    }
    if (!g->is_windowed()) {
        rep.normalizable = true;
        rep.probability = ray.scaled(1 / ray.total_mass());
        rep.note = "probability measure";
        return rep;
    }
    const auto& win = *g->window();
    if (!win.rules)
        throw WindowRuleMissing("window without an in-degree rule cannot be extended");
    const auto origin = expand_pattern(win.rules->vertex_pattern, 0);
    auto larger = std::make_shared<const DiscreteGraph>(DiscreteGraph::integer_line(win.radius + 1, *win.rules));
    const auto small_cone = solve_cone(g, q);
    const auto large_cone = solve_cone(larger, q);
    if (small_cone.dimension != 1 || large_cone.dimension != 1 || ray.weight(origin) == 0 ||
        large_cone.rays.front().weight(origin) == 0) {
        rep.note = "window-relaxed: normalization undetermined";
        return rep;
    }
    const Rational m_small = ray.total_mass() / ray.weight(origin);
    const auto& big = large_cone.rays.front();
    const Rational m_large = big.total_mass() / big.weight(origin);
    if (m_large > m_small) {
        if (q > 1)
            rep.note = "no probability normalization within window, mass grows like q^n";
        else if (q < 1)
            rep.note = "no probability normalization within window, mass grows like q^n as n -> -inf";
        else
            rep.note = "no probability normalization within window, mass grows linearly with the window";
        return rep;
    }
    rep.normalizable = true;
    rep.probability = ray.scaled(1 / ray.total_mass());
    rep.note = "window-relaxed: normalized within window";
    return rep;
}

// ---------------------------------------------------------------------------
// Measure towers

/** (ρ_n)_*μ_n = μ_{n-1}, except at window-cut points where it cannot hold. */
struct Certificate
{
    std::size_t depth = 0;
    bool holds = false;
    std::vector<FinitePath> relaxed_points;
};

/** μ_0, …, μ_N with μ_n on ∂E_n; public so that faults can be injected in checks. */
struct MeasureTower
{
    GraphPtr graph;
    Rational q;
    VertexMeasure seed;
    std::vector<BoundarySpace> spaces;
    std::vector<PathMeasure> measures;
    std::vector<Certificate> certificates; // certificates[n-1] for depth n
    bool window_relaxed = false;

    std::size_t depth() const noexcept { return measures.empty() ? 0 : measures.size() - 1; }
};

/** Paths b ∈ E^{n-1} whose source is a boundary vertex: their extensions are cut by the window. */
inline bool is_cut_point(const DiscreteGraph& g, const FinitePath& b, std::size_t depth)
{
    return g.is_windowed() && b.length() == depth && g.is_boundary(b.source());
}

inline PathMeasure vertex_to_path_measure(const BoundarySpace& b0, const VertexMeasure& mu)
{
    std::map<FinitePath, Rational> w;
    for (const auto& [v, m] : mu.weights())
        w.emplace(FinitePath::vertex(v), m);
    return PathMeasure(b0.space(), w);
}

inline Certificate check_certificate(const MeasureTower& t, std::size_t n)
{
    const auto pushed = pushforward(rho_map(t.spaces[n], t.spaces[n - 1]), t.measures[n]);
    Certificate c{n, true, {}};
    for (const auto& b : t.spaces[n - 1].points()) {
        if (pushed.weight(b) == t.measures[n - 1].weight(b))
            continue;
        if (is_cut_point(*t.graph, b, n - 1))
            c.relaxed_points.push_back(b);
        else
            c.holds = false;
    }
    return c;
}

/**
 * μ_n({a}) = q^{-1} μ_{n-1}({σ(a)}) for |a| ≥ 1 and
 * μ_n({v}) = μ(v) − q^{-1}(Tμ)(v) for singular v.
 */
inline MeasureTower build_tower(const GraphPtr& g, const VertexMeasure& seed, const Rational& q, std::size_t depth)
{
    const SubInvarianceProblem problem(g, q);
    if (auto why = problem.violation(seed))
        throw NotSubInvariant(*why);

    MeasureTower t{g, q, seed, {}, {}, {}, g->is_windowed()};
    t.spaces.push_back(build_boundary(g, 0));
    t.measures.push_back(vertex_to_path_measure(t.spaces[0], seed));

    const auto singular = singular_vertices(*g);
    const auto tmu = problem.transfer().apply(seed);
    const Rational qinv = 1 / q;
    for (std::size_t n = 1; n <= depth; ++n) {
        t.spaces.push_back(build_boundary(g, n));
        const auto& from = t.spaces[n];
        const auto& to = t.spaces[n - 1];
        const auto shifted = pullback(shift_presentation(from, to), t.measures[n - 1]);
        std::map<FinitePath, Rational> w;
        for (const auto& [a, m] : shifted.weights())
            w.emplace(a, m * qinv);
        for (const auto& v : singular) {
            const Rational x = seed.weight(v) - qinv * tmu.weight(v);
            if (x < 0)
                throw NotSubInvariant("negative mass " + format_rational(x) + " at singular vertex " + v);
            if (x != 0)
                w.emplace(FinitePath::vertex(v), x);
        }
        t.measures.emplace_back(from.space(), w);
        auto cert = check_certificate(t, n);
        if (!cert.holds)
            throw ConsistencyFailure("(ρ_" + std::to_string(n) + ")_*μ_" + std::to_string(n) + " != μ_" +
                                     std::to_string(n - 1));
        t.certificates.push_back(std::move(cert));
    }
    return t;
}

struct DepthVerdict
{
    std::size_t depth = 0;
    bool passed = true;
    std::optional<FinitePath> witness;
};

struct QuasiInvarianceReport
{
    bool passed = true;
    std::vector<DepthVerdict> depths;
};

/** ν(Z_n(V)) for every path V = {a} realized in the tower, as μ_n(Z_n({a})). */
inline std::map<FinitePath, Rational> single_path_cylinders(const PathMeasure& mu)
{
    std::map<FinitePath, Rational> mass;
    for (const auto& [p, m] : mu.weights())
        for (std::size_t k = 0; k <= p.length(); ++k)
            mass[prefix(p, k)] += m;
    return mass;
}

/** Checks ν(Z{a}) = q^{-1} ν(Z{σ(a)}) for each a ∈ ∂E_n with |a| ≥ 1, 1 ≤ n ≤ N. */
inline QuasiInvarianceReport verify_quasi_invariance(const MeasureTower& t)
{
    QuasiInvarianceReport rep;
    const Rational qinv = 1 / t.q;
    for (std::size_t n = 1; n <= t.depth(); ++n) {
        const auto here = single_path_cylinders(t.measures[n]);
        const auto below = single_path_cylinders(t.measures[n - 1]);
        auto value = [](const std::map<FinitePath, Rational>& m, const FinitePath& a) {
            auto it = m.find(a);
            return it == m.end() ? Rational(0) : it->second;
        };
        DepthVerdict d{n, true, std::nullopt};
        for (const auto& a : t.spaces[n].points()) {
            if (a.is_vertex())
                continue;
            if (value(here, a) != qinv * value(below, shift(a))) {
                d.passed = false;
                d.witness = a;
                break;
            }
        }
        rep.passed = rep.passed && d.passed;
        rep.depths.push_back(std::move(d));
    }
    return rep;
}

/** r_*ν realized as (ρ_{0,∞})_*μ_N. */
inline VertexMeasure pushforward_to_vertices(const MeasureTower& t)
{
    const auto& top = t.spaces.back();
    const auto pushed = pushforward(rho_inf_map(top, t.spaces.front()), t.measures.back());
    std::map<VertexId, Rational> w;
    for (const auto& [p, m] : pushed.weights())
        w.emplace(p.range(), m);
    return VertexMeasure(t.graph->vertex_space(), w);
}

/**
 * Vertices not reached from a boundary vertex by a path of length < depth;
 * on these the depth-N tower is unaffected by the window. All vertices for
 * finite graphs.
 */
inline std::set<VertexId> interior_vertices(const DiscreteGraph& g, std::size_t depth)
{
    std::set<VertexId> affected;
    std::set<VertexId> frontier = g.boundary_vertices();
    for (std::size_t k = 0; k < depth && !frontier.empty(); ++k) {
        affected.insert(frontier.begin(), frontier.end());
        std::set<VertexId> next;
        for (const auto& v : frontier)
            for (const auto& e : g.out_edges(v))
                if (!affected.count(g.range(e)))
                    next.insert(g.range(e));
        frontier = std::move(next);
    }
    std::set<VertexId> out;
    for (const auto& v : g.vertices())
        if (!affected.count(v))
            out.insert(v);
    return out;
}

/** pushforward_to_vertices equals the seed (on interior vertices for windows). */
inline std::optional<VertexId> pushforward_mismatch(const MeasureTower& t)
{
    const auto pushed = pushforward_to_vertices(t);
    for (const auto& v : interior_vertices(*t.graph, t.depth()))
        if (pushed.weight(v) != t.seed.weight(v))
            return v;
    return std::nullopt;
}

/** ψ_ν on the diagonal indicator of Z(V): ν(Z(V)) = μ_k(Z_k(V)). */
inline Rational weight_eval(const MeasureTower& t, const CylinderBase& base)
{
    if (base.length() > t.depth())
        throw DepthExceeded("base length " + std::to_string(base.length()) + " exceeds tower depth " +
                            std::to_string(t.depth()));
    const auto k = base.length();
    return t.measures[k].mass(cylinder_members(t.spaces[k], base));
}

} // namespace graphkms
