#pragma once

// Truncated boundary path spaces ∂E_n = E^0_sng ⊔ … ⊔ E^{n-1}_sng ⊔ E^n,
// the tower maps ρ_n, ρ_{n,∞}, the backwards shift σ and cylinder sets.
//
// The full boundary path space is never materialized: it is the inverse
// limit of the ∂E_n along ρ_n, and cylinder values at finite depths
// determine a measure on it. The topology base Z(U) \ Z(K) has no finite
// content in the discrete truncated setting and is not represented.

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphkms/errors.hpp"
#include "graphkms/graph.hpp"
#include "graphkms/measure.hpp"

namespace graphkms {

using GraphPtr = std::shared_ptr<const DiscreteGraph>;

/** The n-th boundary path space of a graph, points in level order. */
class BoundarySpace
{
public:
    BoundarySpace(GraphPtr graph, std::size_t depth, SpacePtr<FinitePath> space)
        : graph_(std::move(graph)), depth_(depth), space_(std::move(space))
    {
    }

    const GraphPtr& graph() const noexcept { return graph_; }
    std::size_t depth() const noexcept { return depth_; }
    const SpacePtr<FinitePath>& space() const noexcept { return space_; }
    const std::vector<FinitePath>& points() const noexcept { return space_->points(); }
    bool contains(const FinitePath& a) const { return space_->contains(a); }

private:
    GraphPtr graph_;
    std::size_t depth_;
    SpacePtr<FinitePath> space_;
};

inline BoundarySpace build_boundary(const GraphPtr& g, std::size_t n)
{
    const auto singular = singular_vertices(*g);
    std::vector<FinitePath> points;
    std::vector<FinitePath> level;
    for (const auto& v : g->vertices())
        level.push_back(FinitePath::vertex(v));
    for (std::size_t k = 0;; ++k) {
        if (k == n) {
            points.insert(points.end(), level.begin(), level.end());
            break;
        }
        std::vector<FinitePath> next;
        for (const auto& a : level) {
            if (singular.count(a.source()))
                points.push_back(a);
            for (const auto& e : g->in_edges(a.source()))
                next.push_back(a.is_vertex() ? g->path({e}) : g->extend(a, e));
        }
        level = std::move(next);
    }
    return BoundarySpace(g, n, make_space(std::move(points)));
}

/** ρ_n(a) = a(n-1) when |a| = n, and a otherwise. */
inline FinitePath rho(const BoundarySpace& space, const FinitePath& a)
{
    if (space.depth() == 0)
        throw DepthMismatch("ρ_n needs n ≥ 1");
    if (!space.contains(a))
        throw DepthMismatch("'" + a.label() + "' is not a point of ∂E_" + std::to_string(space.depth()));
    return a.length() == space.depth() ? prefix(a, space.depth() - 1) : a;
}

inline DiscreteMap<FinitePath, FinitePath> rho_map(const BoundarySpace& from, const BoundarySpace& to)
{
    if (from.depth() != to.depth() + 1)
        throw DepthMismatch("ρ_n maps ∂E_n to ∂E_{n-1}");
    return DiscreteMap<FinitePath, FinitePath>::from_function(
        from.space(), to.space(), [&](const FinitePath& a) { return rho(from, a); });
}

/**
 * Depth-n image of a point of ∂E_N (n ≤ N): a(n) when |a| > n, a otherwise.
 * On the inverse limit this is ρ_{n,∞}; ρ_{0,∞} is the range map.
 */
inline FinitePath rho_inf(const BoundarySpace& space, std::size_t n, const FinitePath& a)
{
    if (n > space.depth())
        throw DepthMismatch("cannot project ∂E_" + std::to_string(space.depth()) + " to depth " +
                            std::to_string(n));
    if (!space.contains(a))
        throw DepthMismatch("'" + a.label() + "' is not a point of ∂E_" + std::to_string(space.depth()));
    return a.length() > n ? prefix(a, n) : a;
}

inline DiscreteMap<FinitePath, FinitePath> rho_inf_map(const BoundarySpace& from, const BoundarySpace& to)
{
    return DiscreteMap<FinitePath, FinitePath>::from_function(
        from.space(), to.space(), [&](const FinitePath& a) { return rho_inf(from, to.depth(), a); });
}

/** σ(a) = a(2, |a|) for |a| ≥ 2 and s(a) for |a| = 1; undefined on vertices. */
inline FinitePath shift(const FinitePath& a)
{
    if (a.is_vertex())
        throw ShiftOfVertex("σ is not defined on the vertex '" + a.label() + "'");
    return a.length() == 1 ? FinitePath::vertex(a.source()) : segment(a, 2, a.length());
}

/**
 * σ: ∂E_n \ E^0 → ∂E_{n-1} as a local homeomorphism. σ is injective on the
 * paths sharing a first edge, which gives the injective pieces.
 */
inline LocalHomeoPresentation<FinitePath, FinitePath> shift_presentation(const BoundarySpace& from,
                                                                         const BoundarySpace& to)
{
    if (from.depth() != to.depth() + 1)
        throw DepthMismatch("σ maps ∂E_n to ∂E_{n-1}");
    std::vector<FinitePath> domain_points;
    std::map<EdgeId, std::set<FinitePath>> by_first_edge;
    for (const auto& a : from.points())
        if (!a.is_vertex()) {
            domain_points.push_back(a);
            by_first_edge[a.edges().front()].insert(a);
        }
    auto domain = make_space(std::move(domain_points));
    std::vector<std::set<FinitePath>> pieces;
    for (auto& [e, piece] : by_first_edge)
        pieces.push_back(std::move(piece));
    auto map = DiscreteMap<FinitePath, FinitePath>::from_function(domain, to.space(),
                                                                 [](const FinitePath& a) { return shift(a); });
    return LocalHomeoPresentation<FinitePath, FinitePath>(std::move(map), Cover<FinitePath>(domain, pieces));
}

/** A cylinder base: a set V ⊆ E^k of paths of one common length k. */
class CylinderBase
{
public:
    CylinderBase(std::size_t length, std::set<FinitePath> paths) : length_(length), paths_(std::move(paths))
    {
        for (const auto& a : paths_)
            if (a.length() != length_)
                throw MixedLengthBase("'" + a.label() + "' has length " + std::to_string(a.length()) +
                                      ", base length is " + std::to_string(length_));
    }

    /** Infers the length from the paths; throws on an empty or mixed set. */
    static CylinderBase of(const std::set<FinitePath>& paths)
    {
        if (paths.empty())
            throw MixedLengthBase("cannot infer the length of an empty base");
        return CylinderBase(paths.begin()->length(), paths);
    }

    std::size_t length() const noexcept { return length_; }
    const std::set<FinitePath>& paths() const noexcept { return paths_; }

private:
    std::size_t length_;
    std::set<FinitePath> paths_;
};

/** Z_n(V) = {a ∈ ∂E_n : |a| ≥ k and a(k) ∈ V}. */
inline std::set<FinitePath> cylinder_members(const BoundarySpace& space, const CylinderBase& base)
{
    if (base.length() > space.depth())
        throw DepthMismatch("base of length " + std::to_string(base.length()) + " is not realized at depth " +
                            std::to_string(space.depth()));
    std::set<FinitePath> out;
    for (const auto& a : space.points())
        if (a.length() >= base.length() && base.paths().count(prefix(a, base.length())))
            out.insert(a);
    return out;
}

/** Base W of Z(U) ∩ Z(V): W = {a ∈ U : a(m) ∈ V} where U ⊆ E^n, V ⊆ E^m, n ≥ m. */
inline CylinderBase pi_system_partition(const CylinderBase& a, const CylinderBase& b)
{
    const auto& longer = a.length() >= b.length() ? a : b;
    const auto& shorter = a.length() >= b.length() ? b : a;
    std::set<FinitePath> w;
    for (const auto& p : longer.paths())
        if (shorter.paths().count(prefix(p, shorter.length())))
            w.insert(p);
    return CylinderBase(longer.length(), std::move(w));
}

} // namespace graphkms
