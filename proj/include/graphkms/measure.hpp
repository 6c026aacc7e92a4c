#pragma once

// Sheaf-of-measures calculus on countable discrete spaces.
//
// On a discrete space every subset is open and Borel, and a finitely supported
// nonnegative measure is automatically regular (finite on compacts, inner and
// outer regular). The distinction between Borel measures and regular Borel
// measures therefore collapses and is not encoded in the types. Measures of
// infinite total mass are only reachable through windowed spaces, which keep
// the support of each measure finite.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphkms/errors.hpp"
#include "graphkms/rational.hpp"

namespace graphkms {

inline std::string point_label(const std::string& point)
{
    return point;
}

/**
 * A finite (or windowed) discrete space. Points keep their declaration order,
 * which is the order used for every printed listing.
 */
template <class Point>
class DiscreteSpace
{
public:
    DiscreteSpace() = default;

    explicit DiscreteSpace(std::vector<Point> points) : points_(std::move(points))
    {
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (!index_.emplace(points_[i], i).second)
                throw InvalidParameter("duplicate point '" + point_label(points_[i]) + "'");
    }

    /** Enumerates exactly the labels of the indices in [-radius, radius]. */
    static DiscreteSpace windowed(long radius, const std::function<Point(long)>& label)
    {
        if (radius < 0)
            throw InvalidParameter("window radius must be nonnegative");
        std::vector<Point> points;
        for (long n = -radius; n <= radius; ++n)
            points.push_back(label(n));
        DiscreteSpace space(std::move(points));
        space.radius_ = radius;
        return space;
    }

    const std::vector<Point>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool contains(const Point& p) const { return index_.count(p) != 0; }
    std::optional<long> window_radius() const noexcept { return radius_; }

    std::size_t index_of(const Point& p) const
    {
        auto it = index_.find(p);
        if (it == index_.end())
            throw MemberNotInSpace("'" + point_label(p) + "' is not a point of the space");
        return it->second;
    }

    /** The members, in this space's order, as a space of their own. */
    DiscreteSpace subspace(const std::set<Point>& members) const
    {
        require_members(members);
        std::vector<Point> kept;
        for (const auto& p : points_)
            if (members.count(p))
                kept.push_back(p);
        return DiscreteSpace(std::move(kept));
    }

    void require_members(const std::set<Point>& members) const
    {
        for (const auto& p : members)
            if (!contains(p))
                throw MemberNotInSpace("'" + point_label(p) + "' is not a point of the space");
    }

    std::set<Point> point_set() const { return {points_.begin(), points_.end()}; }

    friend bool operator==(const DiscreteSpace& a, const DiscreteSpace& b)
    {
        return a.points_ == b.points_;
    }

private:
    std::vector<Point> points_;
    std::map<Point, std::size_t> index_;
    std::optional<long> radius_;
};

template <class Point>
using SpacePtr = std::shared_ptr<const DiscreteSpace<Point>>;

template <class Point>
SpacePtr<Point> make_space(std::vector<Point> points)
{
    return std::make_shared<const DiscreteSpace<Point>>(std::move(points));
}

/** Same point set, regardless of declaration order. */
template <class Point>
bool same_points(const DiscreteSpace<Point>& a, const DiscreteSpace<Point>& b)
{
    return &a == &b || (a.size() == b.size() && a.point_set() == b.point_set());
}

/** Finitely supported rational-valued function (may take negative values). */
template <class Point>
using FiniteFunction = std::map<Point, Rational>;

/**
 * A finitely supported nonnegative measure with exact weights. Only nonzero
 * weights are stored; every other point of the space has weight zero.
 */
template <class Point>
class AtomicMeasure
{
public:
    explicit AtomicMeasure(SpacePtr<Point> space) : space_(std::move(space)) {}

    AtomicMeasure(SpacePtr<Point> space, const std::map<Point, Rational>& weights)
        : space_(std::move(space))
    {
        for (const auto& [p, w] : weights) {
            if (!space_->contains(p))
                throw MemberNotInSpace("measure weight on unknown point '" + point_label(p) + "'");
            if (w < 0)
                throw InvalidParameter("negative weight " + format_rational(w) + " at '" +
                                       point_label(p) + "'");
            if (w != 0)
                weights_.emplace(p, w);
        }
    }

    static AtomicMeasure dirac(SpacePtr<Point> space, const Point& p, const Rational& w = 1)
    {
        return AtomicMeasure(std::move(space), {{p, w}});
    }

    const SpacePtr<Point>& space() const noexcept { return space_; }
    const std::map<Point, Rational>& weights() const noexcept { return weights_; }

    Rational weight(const Point& p) const
    {
        auto it = weights_.find(p);
        return it == weights_.end() ? Rational(0) : it->second;
    }

    Rational mass(const std::set<Point>& subset) const
    {
        Rational total = 0;
        for (const auto& p : subset)
            total += weight(p);
        return total;
    }

    Rational total_mass() const
    {
        Rational total = 0;
        for (const auto& [p, w] : weights_)
            total += w;
        return total;
    }

    bool is_zero() const noexcept { return weights_.empty(); }

    std::set<Point> support() const
    {
        std::set<Point> s;
        for (const auto& [p, w] : weights_)
            s.insert(p);
        return s;
    }

    AtomicMeasure scaled(const Rational& factor) const
    {
        if (factor < 0)
            throw InvalidParameter("measures scale by nonnegative factors only");
        std::map<Point, Rational> w;
        for (const auto& [p, x] : weights_)
            w.emplace(p, x * factor);
        return AtomicMeasure(space_, w);
    }

    friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b)
    {
        if (!same_points(*a.space_, *b.space_))
            throw SpaceMismatch("cannot add measures on different spaces");
        auto w = a.weights_;
        for (const auto& [p, x] : b.weights_)
            w[p] += x;
        return AtomicMeasure(a.space_, w);
    }

    friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b)
    {
        return a.weights_ == b.weights_ && same_points(*a.space_, *b.space_);
    }

private:
    SpacePtr<Point> space_;
    std::map<Point, Rational> weights_;
};

/** Restriction to a subset, viewed as a measure on that subspace. */
template <class Point>
AtomicMeasure<Point> restrict(const AtomicMeasure<Point>& mu, const std::set<Point>& members)
{
    auto sub = std::make_shared<const DiscreteSpace<Point>>(mu.space()->subspace(members));
    std::map<Point, Rational> w;
    for (const auto& p : members)
        if (auto x = mu.weight(p); x != 0)
            w.emplace(p, x);
    return AtomicMeasure<Point>(std::move(sub), w);
}

/**
 * An ordered cover of a space by subsets. The union of the pieces must be
 * the whole space.
 */
template <class Point>
class Cover
{
public:
    Cover(SpacePtr<Point> space, std::vector<std::set<Point>> pieces)
        : space_(std::move(space)), pieces_(std::move(pieces))
    {
        std::set<Point> covered;
        for (const auto& piece : pieces_) {
            space_->require_members(piece);
            covered.insert(piece.begin(), piece.end());
        }
        if (covered.size() != space_->size()) {
            for (const auto& p : space_->points())
                if (!covered.count(p))
                    throw CoverIncomplete("point '" + point_label(p) + "' lies in no piece");
        }
    }

    const SpacePtr<Point>& space() const noexcept { return space_; }
    const std::vector<std::set<Point>>& pieces() const noexcept { return pieces_; }

    /** S(i) = S ∩ (V_i \ (V_1 ∪ … ∪ V_{i-1})) applied to the whole space. */
    std::vector<std::set<Point>> disjointified() const
    {
        std::vector<std::set<Point>> parts(pieces_.size());
        std::set<Point> seen;
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            for (const auto& p : pieces_[i])
                if (seen.insert(p).second)
                    parts[i].insert(p);
        return parts;
    }

    std::optional<std::size_t> first_piece_containing(const Point& p) const
    {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].count(p))
                return i;
        return std::nullopt;
    }

private:
    SpacePtr<Point> space_;
    std::vector<std::set<Point>> pieces_;
};

/**
 * True iff the two measures agree on every piece of the cover. Since the
 * pieces cover the space this coincides with global equality.
 */
template <class Point>
bool check_locality(const AtomicMeasure<Point>& a, const AtomicMeasure<Point>& b,
                    const Cover<Point>& cover)
{
    if (!same_points(*a.space(), *cover.space()) || !same_points(*b.space(), *cover.space()))
        throw SpaceMismatch("locality check needs both measures on the covered space");
    for (const auto& piece : cover.pieces())
        if (!(restrict(a, piece) == restrict(b, piece)))
            return false;
    return true;
}

/**
 * Glues local measures, one per cover piece, into the unique global measure
 * restricting to each of them. Overlaps must agree; the weight of a point is
 * read from the first piece containing it.
 */
template <class Point>
AtomicMeasure<Point> glue(const Cover<Point>& cover, const std::vector<AtomicMeasure<Point>>& locals)
{
    const auto& pieces = cover.pieces();
    if (locals.size() != pieces.size())
        throw SpaceMismatch("expected " + std::to_string(pieces.size()) + " local measures, got " +
                            std::to_string(locals.size()));
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (locals[i].space()->point_set() != pieces[i])
            throw SpaceMismatch("local measure " + std::to_string(i) + " does not live on its piece");

    std::map<Point, Rational> glued;
    for (const auto& p : cover.space()->points()) {
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (!pieces[i].count(p))
                continue;
            if (!first) {
                first = i;
                continue;
            }
            if (locals[i].weight(p) != locals[*first].weight(p))
                throw IncompatibleSections(point_label(p), *first, i);
        }
        if (auto w = locals[*first].weight(p); w != 0)
            glued.emplace(p, w);
    }
    return AtomicMeasure<Point>(cover.space(), glued);
}

/** A total map between discrete spaces together with its fibers. */
template <class From, class To>
class DiscreteMap
{
public:
    DiscreteMap(SpacePtr<From> domain, SpacePtr<To> codomain, std::map<From, To> values)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), values_(std::move(values))
    {
        for (const auto& x : domain_->points()) {
            auto it = values_.find(x);
            if (it == values_.end())
                throw InvalidParameter("map undefined at '" + point_label(x) + "'");
            if (!codomain_->contains(it->second))
                throw MemberNotInSpace("image of '" + point_label(x) + "' is outside the codomain");
            fibers_[it->second].push_back(x);
        }
        if (values_.size() != domain_->size())
            throw MemberNotInSpace("map defined on points outside its domain");
    }

    static DiscreteMap from_function(SpacePtr<From> domain, SpacePtr<To> codomain,
                                     const std::function<To(const From&)>& f)
    {
        std::map<From, To> values;
        for (const auto& x : domain->points())
            values.emplace(x, f(x));
        return DiscreteMap(std::move(domain), std::move(codomain), std::move(values));
    }

    const SpacePtr<From>& domain() const noexcept { return domain_; }
    const SpacePtr<To>& codomain() const noexcept { return codomain_; }
    const std::map<From, To>& values() const noexcept { return values_; }

    const To& operator()(const From& x) const
    {
        auto it = values_.find(x);
        if (it == values_.end())
            throw MemberNotInSpace("'" + point_label(x) + "' is not in the domain");
        return it->second;
    }

    /** Preimage of y in domain order; empty when y has no preimage. */
    const std::vector<From>& fiber(const To& y) const
    {
        static const std::vector<From> empty;
        auto it = fibers_.find(y);
        return it == fibers_.end() ? empty : it->second;
    }

private:
    SpacePtr<From> domain_;
    SpacePtr<To> codomain_;
    std::map<From, To> values_;
    std::map<To, std::vector<From>> fibers_;
};

/**
 * A map together with a cover of its domain by pieces on which it is
 * injective: the finite witness of a local homeomorphism between discrete
 * spaces. The cover is stored normalized to a partition.
 */
template <class From, class To>
class LocalHomeoPresentation
{
public:
    LocalHomeoPresentation(DiscreteMap<From, To> map, const Cover<From>& injective_pieces)
        : map_(std::move(map)), pieces_(normalize(injective_pieces))
    {
        if (!same_points(*injective_pieces.space(), *map_.domain()))
            throw SpaceMismatch("injective pieces must cover the map's domain");
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            std::map<To, From> seen;
            for (const auto& x : pieces_[i]) {
                auto [it, fresh] = seen.emplace(map_(x), x);
                if (!fresh)
                    throw NotLocallyInjective("piece " + std::to_string(i) + " identifies '" +
                                              point_label(it->second) + "' and '" + point_label(x) + "'");
            }
        }
    }

    /** Partition whose k-th piece takes the k-th element of every fiber. */
    static LocalHomeoPresentation with_fiber_pieces(DiscreteMap<From, To> map)
    {
        std::vector<std::set<From>> pieces;
        for (const auto& y : map.codomain()->points()) {
            const auto& fib = map.fiber(y);
            if (pieces.size() < fib.size())
                pieces.resize(fib.size());
            for (std::size_t k = 0; k < fib.size(); ++k)
                pieces[k].insert(fib[k]);
        }
        Cover<From> cover(map.domain(), std::move(pieces));
        return LocalHomeoPresentation(std::move(map), cover);
    }

    const DiscreteMap<From, To>& map() const noexcept { return map_; }
    const std::vector<std::set<From>>& pieces() const noexcept { return pieces_; }

private:
    static std::vector<std::set<From>> normalize(const Cover<From>& cover)
    {
        auto parts = cover.disjointified();
        std::erase_if(parts, [](const auto& s) { return s.empty(); });
        return parts;
    }

    DiscreteMap<From, To> map_;
    std::vector<std::set<From>> pieces_;
};

/**
 * Pullback f^*μ, built as in the sheaf construction: on each injective piece
 * U the local measure is B ↦ μ(f(B)), and the local measures are glued.
 */
template <class From, class To>
AtomicMeasure<From> pullback(const LocalHomeoPresentation<From, To>& phi, const AtomicMeasure<To>& mu)
{
    const auto& f = phi.map();
    if (!same_points(*mu.space(), *f.codomain()))
        throw SpaceMismatch("pullback needs a measure on the codomain");
    std::vector<AtomicMeasure<From>> locals;
    locals.reserve(phi.pieces().size());
    for (const auto& piece : phi.pieces()) {
        auto sub = std::make_shared<const DiscreteSpace<From>>(f.domain()->subspace(piece));
        std::map<From, Rational> w;
        for (const auto& x : piece)
            w.emplace(x, mu.weight(f(x)));
        locals.emplace_back(std::move(sub), w);
    }
    return glue(Cover<From>(f.domain(), phi.pieces()), locals);
}

/** Pushforward f_*μ: the weight at y is μ(f^{-1}(y)). */
template <class From, class To>
AtomicMeasure<To> pushforward(const DiscreteMap<From, To>& f, const AtomicMeasure<From>& mu)
{
    if (!same_points(*mu.space(), *f.domain()))
        throw SpaceMismatch("pushforward needs a measure on the domain");
    std::map<To, Rational> w;
    for (const auto& [x, m] : mu.weights())
        w[f(x)] += m;
    return AtomicMeasure<To>(f.codomain(), w);
}

/** Transfer operator (Lf)(y) = Σ_{x ∈ φ^{-1}(y)} f(x). */
template <class From, class To>
FiniteFunction<To> transfer_apply(const LocalHomeoPresentation<From, To>& phi, const FiniteFunction<From>& f)
{
    const auto& map = phi.map();
    FiniteFunction<To> out;
    for (const auto& [x, value] : f) {
        if (!map.domain()->contains(x))
            throw MemberNotInSpace("function value at '" + point_label(x) + "' outside the domain");
        out[map(x)] += value;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

template <class Point>
Rational integrate(const AtomicMeasure<Point>& mu, const FiniteFunction<Point>& f)
{
    Rational total = 0;
    for (const auto& [x, value] : f) {
        if (!mu.space()->contains(x))
            throw MemberNotInSpace("function value at '" + point_label(x) + "' outside the space");
        total += value * mu.weight(x);
    }
    return total;
}

} // namespace graphkms
