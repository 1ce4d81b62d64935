#pragma once

// Picard lattice of P^1 x P^1 blown up at n points.

#include <compare>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "tequiv/errors.hpp"
#include "tequiv/integer.hpp"

namespace tequiv {

/// The class r*F1 + s*F2 - sum a_i E_i.
///
/// F1 is the fibre class of the first projection, F2 of the second; a positive
/// a_i subtracts E_i, so the canonical class has every a_i = -1.
struct DivClass {
    Int r = 0;
    Int s = 0;
    std::vector<Int> a;

    DivClass() = default;
    explicit DivClass(std::size_t n) : a(n) {}
    DivClass(Int r_, Int s_, std::vector<Int> a_) : r(std::move(r_)), s(std::move(s_)), a(std::move(a_)) {}

    /// Convenience for literals: DivClass::of(7, 7, {2, 2}).
    static DivClass of(long long r, long long s, std::initializer_list<long long> as = {});

    std::size_t n() const noexcept { return a.size(); }
    bool is_zero() const;

    DivClass& operator+=(const DivClass& o);
    DivClass& operator-=(const DivClass& o);
    DivClass& operator*=(const Int& k);
    DivClass operator-() const;

    friend DivClass operator+(DivClass x, const DivClass& y) { return x += y; }
    friend DivClass operator-(DivClass x, const DivClass& y) { return x -= y; }
    friend DivClass operator*(const Int& k, DivClass x) { return x *= k; }
    friend DivClass operator*(DivClass x, const Int& k) { return x *= k; }

    friend bool operator==(const DivClass&, const DivClass&) = default;
    friend std::strong_ordering operator<=>(const DivClass& x, const DivClass& y);

    /// "(r,s;a1,...,an)"
    std::string to_string() const;

    /// Names of the odd coordinates ("r", "s", "a1", ...).
    std::vector<std::string> odd_coordinates() const;
    bool is_even() const { return odd_coordinates().empty(); }
    /// Exact halving; throws InvalidArgument when some coordinate is odd.
    DivClass halved() const;

    /// Drops trailing exceptional coordinates down to n entries.
    DivClass truncated(std::size_t n) const;
    /// Appends zero exceptional coordinates up to n entries.
    DivClass extended(std::size_t n) const;
};

/// Element of Pic(S) tensor Z[1/2], stored as twice its value.
class HalfClass {
public:
    HalfClass() = default;
    explicit HalfClass(const DivClass& c) : twice_(c * Int(2)) {}
    static HalfClass from_twice(DivClass twice) {
        HalfClass h;
        h.twice_ = std::move(twice);
        return h;
    }

    const DivClass& twice() const noexcept { return twice_; }
    bool is_integral() const { return twice_.is_even(); }
    DivClass to_class() const { return twice_.halved(); }

    HalfClass& operator+=(const HalfClass& o) {
        twice_ += o.twice_;
        return *this;
    }
    friend HalfClass operator+(HalfClass x, const HalfClass& y) { return x += y; }
    friend bool operator==(const HalfClass&, const HalfClass&) = default;

private:
    DivClass twice_;
};

class BlownQuadricLattice {
public:
    explicit BlownQuadricLattice(std::size_t n = 0) : n_(n) {}

    std::size_t n() const noexcept { return n_; }
    std::size_t rank() const noexcept { return n_ + 2; }

    DivClass zero() const { return DivClass(n_); }
    DivClass fibre1() const;
    DivClass fibre2() const;
    /// E_i as a class, i.e. a_i = -1.
    DivClass exceptional(std::size_t i) const;
    DivClass canonical_class() const;

    /// Throws InvalidArgument when the class lives in a different lattice.
    void require_member(const DivClass& c) const;

    /// Gram matrix in the basis F1, F2, E_1..E_n.
    std::vector<std::vector<long long>> gram() const;

    friend bool operator==(const BlownQuadricLattice&, const BlownQuadricLattice&) = default;

private:
    std::size_t n_;
};

/// A.B = r_A s_B + r_B s_A - sum a_i b_i.
Int intersect(const DivClass& x, const DivClass& y);

/// 4 times the intersection number of two half classes.
Int intersect_times4(const HalfClass& x, const HalfClass& y);

DivClass canonical_class(std::size_t n);

/// All a_i >= 2 and r, s > sum (a_i + 1).
bool is_comb_ample(const DivClass& c);

/// Riemann-Roch: 1 + L.(L - K)/2. Throws ConsistencyError on odd L.(L - K).
Int rr_chi(const DivClass& c);

enum class AmpleFact {
    ample,
    base_point_free,
    h1_vanishes,
    h1_of_dual_vanishes,
    h0_theta_twist_vanishes,
    h1_theta_twist_vanishes,
};

std::string to_string(AmpleFact f);

/// The cohomological facts guaranteed for a combinatorially ample class.
/// Throws InvalidArgument when the class is not combinatorially ample.
std::vector<AmpleFact> comb_ample_certificate(const DivClass& c);

/// Smallest alpha >= 0 with D + alpha*L combinatorially ample, searching up
/// to `cap`. L itself must be combinatorially ample.
Int ample_escalation(const DivClass& d, const DivClass& l, const Int& cap);

}  // namespace tequiv
