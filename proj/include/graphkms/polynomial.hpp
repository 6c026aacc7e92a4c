#pragma once

// Univariate polynomials over ℚ with Sturm-sequence root isolation, and real
// algebraic numbers given by a square-free polynomial and an isolating
// interval.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphkms/linalg.hpp"
#include "graphkms/rational.hpp"

namespace graphkms {

/** Coefficients stored lowest degree first; the zero polynomial is empty. */
class Polynomial
{
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial constant(const Rational& a) { return Polynomial({a}); }
    static Polynomial linear_root(const Rational& r) { return Polynomial({-r, 1}); }

    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Rational>& coefficients() const noexcept { return c_; }
    Rational coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& x) const
    {
        Rational y = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            y = y * x + *it;
        return y;
    }

    Polynomial derivative() const
    {
        std::vector<Rational> d;
        for (std::size_t k = 1; k < c_.size(); ++k)
            d.push_back(c_[k] * static_cast<long>(k));
        return Polynomial(std::move(d));
    }

    Polynomial monic() const
    {
        if (is_zero())
            return *this;
        auto d = c_;
        const Rational lead = c_.back();
        for (auto& x : d)
            x /= lead;
        return Polynomial(std::move(d));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rational> d(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < d.size(); ++k)
            d[k] = a.coefficient(k) - b.coefficient(k);
        return Polynomial(std::move(d));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        std::vector<Rational> d(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                d[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(d));
    }

    /** Euclidean division a = q·b + r with deg r < deg b. */
    static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero())
            throw InvalidParameter("polynomial division by zero");
        std::vector<Rational> rem = a.c_;
        std::vector<Rational> quot(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
        for (std::size_t k = quot.size(); k-- > 0;) {
            const Rational f = rem[k + b.c_.size() - 1] / b.c_.back();
            quot[k] = f;
            if (f == 0)
                continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                rem[k + j] -= f * b.c_[j];
        }
        return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    std::string str() const
    {
        if (is_zero())
            return "0";
        std::string out;
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (c_[k] == 0)
                continue;
            Rational a = c_[k];
            if (!out.empty())
                out += a < 0 ? " - " : " + ";
            else if (a < 0)
                out += "-";
            if (a < 0)
                a = -a;
            if (a != 1 || k == 0)
                out += format_rational(a) + (k > 0 ? "*" : "");
            if (k >= 1)
                out += "x";
            if (k >= 2)
                out += "^" + std::to_string(k);
        }
        return out;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }

    std::vector<Rational> c_;
};

inline Polynomial gcd(Polynomial a, Polynomial b)
{
    while (!b.is_zero()) {
        auto r = Polynomial::divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/** p / gcd(p, p'): same roots, all simple. */
inline Polynomial square_free_part(const Polynomial& p)
{
    if (p.degree() <= 0)
        return p.monic();
    return Polynomial::divmod(p, gcd(p, p.derivative())).first.monic();
}

/** det(xI − A) via Faddeev–LeVerrier; exact over ℚ. */
inline Polynomial characteristic_polynomial(const RationalMatrix& a)
{
    const std::size_t n = a.rows();
    if (a.cols() != n)
        throw InvalidParameter("characteristic polynomial of a non-square matrix");
    std::vector<Rational> coeffs(n + 1);
    coeffs[n] = 1;
    RationalMatrix m(n, n); // M_0 = 0
    Rational c = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        RationalMatrix next = a * m;
        for (std::size_t i = 0; i < n; ++i)
            next(i, i) += c;
        m = std::move(next);
        c = -(a * m).trace() / static_cast<long>(k);
        coeffs[n - k] = c;
    }
    return Polynomial(std::move(coeffs));
}

/** Sturm chain of a square-free polynomial. */
inline std::vector<Polynomial> sturm_chain(const Polynomial& p)
{
    std::vector<Polynomial> chain{p, p.derivative()};
    while (!chain.back().is_zero()) {
        auto r = Polynomial::divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero())
            break;
        chain.push_back(Polynomial({Rational(0)}) - r);
    }
    return chain;
}

inline int sign_changes_at(const std::vector<Polynomial>& chain, const Rational& x)
{
    int changes = 0;
    int last = 0;
    for (const auto& q : chain) {
        const Rational v = q(x);
        const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0)
            continue;
        if (last != 0 && s != last)
            ++changes;
        last = s;
    }
    return changes;
}

/** Number of distinct real roots in (lo, hi] of the square-free p with chain. */
inline int count_roots(const std::vector<Polynomial>& chain, const Rational& lo, const Rational& hi)
{
    return sign_changes_at(chain, lo) - sign_changes_at(chain, hi);
}

/** 1 + max |a_k / a_n| bounds the absolute value of every root. */
inline Rational cauchy_bound(const Polynomial& p)
{
    Rational m = 0;
    for (int k = 0; k < p.degree(); ++k) {
        Rational r = p.coefficient(k) / p.leading();
        if (r < 0)
            r = -r;
        m = std::max(m, r);
    }
    return m + 1;
}

/**
 * A real algebraic number: the unique root of the square-free polynomial in
 * the half-open interval (lo, hi]. Rational values carry their exact value.
 */
class AlgebraicReal
{
public:
    static AlgebraicReal exact(const Rational& r)
    {
        AlgebraicReal a;
        a.poly_ = Polynomial::linear_root(r);
        a.lo_ = r - 1;
        a.hi_ = r;
        a.exact_ = r;
        return a;
    }

    AlgebraicReal(Polynomial square_free, Rational lo, Rational hi)
        : poly_(std::move(square_free)), lo_(std::move(lo)), hi_(std::move(hi))
    {
        chain_ = sturm_chain(poly_);
        if (count_roots(chain_, lo_, hi_) != 1)
            throw InvalidParameter("interval does not isolate exactly one root");
        if (poly_(hi_) == 0)
            exact_ = hi_;
        else
            detect_rational();
    }

    const Polynomial& polynomial() const noexcept { return poly_; }
    const Rational& lower() const noexcept { return lo_; }
    const Rational& upper() const noexcept { return hi_; }
    const std::optional<Rational>& rational() const noexcept { return exact_; }
    bool is_rational() const noexcept { return exact_.has_value(); }

    /** Halves the isolating interval. */
    void refine()
    {
        if (exact_)
            return;
        const Rational mid = (lo_ + hi_) / 2;
        if (poly_(mid) == 0) {
            exact_ = mid;
            lo_ = mid - (hi_ - lo_) / 4;
            hi_ = mid;
            return;
        }
        if (count_roots(chain(), lo_, mid) == 1)
            hi_ = mid;
        else
            lo_ = mid;
    }

    double approx() const
    {
        if (exact_)
            return to_double(*exact_);
        AlgebraicReal copy = *this;
        while (copy.hi_ - copy.lo_ > Rational(1, 1000000000000LL) && !copy.exact_)
            copy.refine();
        return copy.exact_ ? to_double(*copy.exact_) : to_double((copy.lo_ + copy.hi_) / 2);
    }

    friend bool operator==(const AlgebraicReal& a, const AlgebraicReal& b)
    {
        if (a.exact_ && b.exact_)
            return *a.exact_ == *b.exact_;
        if (a.exact_)
            return b.poly_(*a.exact_) == 0 && b.lo_ < *a.exact_ && *a.exact_ <= b.hi_;
        if (b.exact_)
            return b == a;
        const Rational lo = std::max(a.lo_, b.lo_);
        const Rational hi = std::min(a.hi_, b.hi_);
        if (lo >= hi)
            return false;
        const Polynomial g = gcd(a.poly_, b.poly_);
        if (g.degree() < 1)
            return false;
        return count_roots(sturm_chain(g), lo, hi) > 0;
    }

    friend bool operator<(AlgebraicReal a, AlgebraicReal b)
    {
        if (a == b)
            return false;
        for (;;) {
            const Rational& ahi = a.exact_ ? *a.exact_ : a.hi_;
            const Rational& blo = b.exact_ ? *b.exact_ : b.lo_;
            const Rational& alo = a.exact_ ? *a.exact_ : a.lo_;
            const Rational& bhi = b.exact_ ? *b.exact_ : b.hi_;
            if (ahi <= blo && !(a.exact_ && b.exact_ == std::nullopt && ahi == blo))
                return true;
            if (bhi <= alo && !(b.exact_ && a.exact_ == std::nullopt && bhi == alo))
                return false;
            if (a.exact_ && b.exact_)
                return *a.exact_ < *b.exact_;
            a.refine();
            b.refine();
        }
    }

private:
    AlgebraicReal() = default;

    const std::vector<Polynomial>& chain()
    {
        if (chain_.empty())
            chain_ = sturm_chain(poly_);
        return chain_;
    }

    // Integer-coefficient monic polynomials only have integer rational roots;
    // for general ℚ coefficients we test the single integer candidate left
    // after shrinking the interval below width 1, plus the exact endpoints hit
    // during refinement.
    void detect_rational()
    {
        bool integral = poly_.leading() == 1;
        for (const auto& c : poly_.coefficients())
            integral = integral && denominator(c) == 1;
        if (!integral)
            return;
        while (hi_ - lo_ >= 1 && !exact_)
            refine();
        if (exact_)
            return;
        Integer candidate = numerator(hi_) / denominator(hi_);
        if (hi_ < 0 && Rational(candidate) != hi_)
            candidate -= 1;
        const Rational c(candidate);
        if (lo_ < c && c <= hi_ && poly_(c) == 0) {
            exact_ = c;
            lo_ = c - 1;
            hi_ = c;
        }
    }

    Polynomial poly_;
    Rational lo_;
    Rational hi_;
    std::optional<Rational> exact_;
    std::vector<Polynomial> chain_;
};

/** Distinct positive real roots of p, ascending. */
inline std::vector<AlgebraicReal> positive_real_roots(const Polynomial& p)
{
    std::vector<AlgebraicReal> roots;
    if (p.degree() < 1)
        return roots;
    const Polynomial sf = square_free_part(p);
    const auto chain = sturm_chain(sf);
    std::vector<std::pair<Rational, Rational>> stack{{Rational(0), cauchy_bound(sf)}};
    std::vector<std::pair<Rational, Rational>> isolated;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        const int n = count_roots(chain, lo, hi);
        if (n == 0)
            continue;
        if (n == 1) {
            isolated.emplace_back(lo, hi);
            continue;
        }
        const Rational mid = (lo + hi) / 2;
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
    }
    std::sort(isolated.begin(), isolated.end());
    for (auto& [lo, hi] : isolated)
        roots.emplace_back(sf, lo, hi);
    return roots;
}

/** Largest real root of p, or nullopt when p has no real root. */
inline std::optional<AlgebraicReal> largest_real_root(const Polynomial& p)
{
    if (p.degree() < 1)
        return std::nullopt;
    const Polynomial sf = square_free_part(p);
    const auto chain = sturm_chain(sf);
    const Rational bound = cauchy_bound(sf);
    Rational lo = -bound;
    Rational hi = bound;
    if (count_roots(chain, lo, hi) == 0)
        return std::nullopt;
    while (count_roots(chain, lo, hi) > 1) {
        const Rational mid = (lo + hi) / 2;
        if (count_roots(chain, mid, hi) >= 1)
            lo = mid;
        else
            hi = mid;
    }
    return AlgebraicReal(sf, lo, hi);
}

} // namespace graphkms
