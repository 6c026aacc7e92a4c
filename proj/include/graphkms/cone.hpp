#pragma once

// Extreme rays of polyhedral cones {x : Ex = 0, Gx ≥ 0} over ℚ by the
// double description method. Equalities are eliminated first by passing to a
// null-space basis; inequalities are then added one at a time.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "graphkms/errors.hpp"
#include "graphkms/linalg.hpp"

namespace graphkms {

struct ConeConstraints
{
    std::size_t dimension = 0;
    std::vector<RationalVector> equalities;   // a·x = 0
    std::vector<RationalVector> inequalities; // a·x ≥ 0
};

struct ConeGenerators
{
    std::vector<RationalVector> rays;
    std::vector<RationalVector> lineality;
};

/** Scales v so that its first nonzero entry has absolute value 1. */
inline void normalize_direction(RationalVector& v)
{
    for (const auto& x : v)
        if (x != 0) {
            const Rational s = x < 0 ? Rational(-x) : x;
            for (auto& y : v)
                y /= s;
            return;
        }
}

inline bool is_zero_vector(const RationalVector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

namespace detail {

inline std::vector<std::size_t> zero_set(const std::vector<RationalVector>& rows, std::size_t processed,
                                         const RationalVector& r)
{
    std::vector<std::size_t> z;
    for (std::size_t i = 0; i < processed; ++i)
        if (dot(rows[i], r) == 0)
            z.push_back(i);
    return z;
}

inline std::size_t rank_of(const std::vector<RationalVector>& rows, const std::vector<std::size_t>& which,
                           std::size_t cols)
{
    std::vector<RationalVector> picked;
    picked.reserve(which.size());
    for (auto i : which)
        picked.push_back(rows[i]);
    return rank(picked, cols);
}

// Keeps the rays whose tight rows have rank m − 1, one per direction.
inline void keep_extreme(std::vector<RationalVector>& rays, const std::vector<RationalVector>& rows,
                         std::size_t processed, std::size_t cols, std::size_t m)
{
    std::vector<RationalVector> kept;
    for (auto& r : rays) {
        normalize_direction(r);
        if (m == 0 || rank_of(rows, zero_set(rows, processed, r), cols) != m - 1)
            continue;
        if (std::find(kept.begin(), kept.end(), r) == kept.end())
            kept.push_back(std::move(r));
    }
    rays = std::move(kept);
}

} // namespace detail

/** Generators of {y ∈ ℚ^k : Gy ≥ 0}: extreme rays modulo the lineality space. */
inline ConeGenerators double_description(std::size_t k, const std::vector<RationalVector>& rows)
{
    ConeGenerators out;
    for (std::size_t i = 0; i < k; ++i) {
        RationalVector e(k);
        e[i] = 1;
        out.lineality.push_back(std::move(e));
    }
    auto& lin = out.lineality;
    auto& rays = out.rays;

    for (std::size_t step = 0; step < rows.size(); ++step) {
        const auto& a = rows[step];
        auto pivot = std::find_if(lin.begin(), lin.end(), [&](const RationalVector& l) { return dot(a, l) != 0; });
        if (pivot != lin.end()) {
            RationalVector l = *pivot;
            lin.erase(pivot);
            Rational al = dot(a, l);
            if (al < 0) {
                for (auto& x : l)
                    x = -x;
                al = -al;
            }
            auto project = [&](RationalVector& v) {
                const Rational f = dot(a, v) / al;
                if (f != 0)
                    for (std::size_t j = 0; j < k; ++j)
                        v[j] -= f * l[j];
            };
            for (auto& v : lin)
                project(v);
            for (auto& r : rays)
                project(r);
            rays.push_back(std::move(l));
            detail::keep_extreme(rays, rows, step + 1, k, k - lin.size());
            continue;
        }

        std::vector<RationalVector> positive, zero, negative;
        for (auto& r : rays) {
            const Rational v = dot(a, r);
            (v > 0 ? positive : (v < 0 ? negative : zero)).push_back(r);
        }
        const std::size_t m = k - lin.size();
        std::vector<RationalVector> next = positive;
        next.insert(next.end(), zero.begin(), zero.end());
        for (const auto& p : positive) {
            const auto zp = detail::zero_set(rows, step, p);
            for (const auto& n : negative) {
                const auto zn = detail::zero_set(rows, step, n);
                std::vector<std::size_t> common;
                std::set_intersection(zp.begin(), zp.end(), zn.begin(), zn.end(), std::back_inserter(common));
                if (m < 2 || common.size() < m - 2 || detail::rank_of(rows, common, k) != m - 2)
                    continue;
                const Rational ap = dot(a, p);
                const Rational an = dot(a, n);
                RationalVector c(k);
                for (std::size_t j = 0; j < k; ++j)
                    c[j] = ap * n[j] - an * p[j];
                next.push_back(std::move(c));
            }
        }
        rays = std::move(next);
        detail::keep_extreme(rays, rows, step + 1, k, m);
    }
    return out;
}

/**
 * Extreme rays of {x : Ex = 0, Gx ≥ 0}. The rays are normalized with first
 * nonzero entry ±1 and returned in lexicographic order.
 */
inline ConeGenerators extreme_rays(const ConeConstraints& c)
{
    const std::size_t d = c.dimension;
    std::vector<RationalVector> basis;
    if (c.equalities.empty()) {
        for (std::size_t i = 0; i < d; ++i) {
            RationalVector e(d);
            e[i] = 1;
            basis.push_back(std::move(e));
        }
    } else {
        basis = nullspace(RationalMatrix::from_rows(c.equalities, d));
    }
    const std::size_t k = basis.size();
    auto lift = [&](const RationalVector& y) {
        RationalVector x(d);
        for (std::size_t j = 0; j < k; ++j)
            if (y[j] != 0)
                for (std::size_t i = 0; i < d; ++i)
                    x[i] += y[j] * basis[j][i];
        return x;
    };
    std::vector<RationalVector> reduced;
    for (const auto& a : c.inequalities) {
        RationalVector g(k);
        for (std::size_t j = 0; j < k; ++j)
            g[j] = dot(a, basis[j]);
        reduced.push_back(std::move(g));
    }

    const auto gen = double_description(k, reduced);
    ConeGenerators out;
    for (const auto& y : gen.lineality)
        out.lineality.push_back(lift(y));
    std::vector<RationalVector> all_rows = c.equalities;
    all_rows.insert(all_rows.end(), c.inequalities.begin(), c.inequalities.end());
    const std::size_t m = d - out.lineality.size();
    for (const auto& y : gen.rays) {
        auto x = lift(y);
        normalize_direction(x);
        // Final extremality check in the original coordinates.
        if (m == 0 || detail::rank_of(all_rows, detail::zero_set(all_rows, all_rows.size(), x), d) != m - 1)
            continue;
        if (std::find(out.rays.begin(), out.rays.end(), x) == out.rays.end())
            out.rays.push_back(std::move(x));
    }
    std::sort(out.rays.begin(), out.rays.end());
    return out;
}

} // namespace graphkms
