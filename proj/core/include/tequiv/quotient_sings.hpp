#pragma once

// Cyclic quotient singularities 1/p(1,q): normal forms, Hirzebruch-Jung
// chains, class T detection and fundamental cycles.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tequiv/errors.hpp"

namespace tequiv {

/// 1/p(1,q) with p >= 2, 1 <= q < p and gcd(p, q) = 1.
struct CyclicSing {
    std::int64_t p = 2;
    std::int64_t q = 1;
    /// Raw (p, a, b) as passed to normalize, if it came from there.
    std::optional<std::array<std::int64_t, 3>> origin;

    CyclicSing() = default;
    /// Throws InvalidArgument unless (p, q) is already in normal form.
    CyclicSing(std::int64_t p_, std::int64_t q_);

    bool is_rdp() const noexcept { return q == p - 1; }
    std::string to_string() const;

    /// Equality of the normal form; origin is ignored.
    friend bool operator==(const CyclicSing& x, const CyclicSing& y) { return x.p == y.p && x.q == y.q; }
};

/// The smooth germ (p = 1).
struct Smooth {
    friend bool operator==(const Smooth&, const Smooth&) = default;
};

using Germ = std::variant<Smooth, CyclicSing>;

std::int64_t mod_inverse(std::int64_t a, std::int64_t m);

/// Type 1/p(a,b) in the form 1/p(1, a^{-1} b). Common factors of (p, a, b)
/// are divided out first; throws InvalidArgument for non-isolated input.
Germ normalize(std::int64_t p, std::int64_t a, std::int64_t b);

/// p/q = b1 - 1/(b2 - ...), every bi >= 2.
struct HJChain {
    std::vector<std::int64_t> b;
    friend bool operator==(const HJChain&, const HJChain&) = default;
    std::string to_string() const;
};

HJChain hj(const CyclicSing& s);
/// Inverse of hj; the empty chain gives the smooth germ. Throws on entries < 2.
Germ from_chain(const HJChain& chain);

/// 1/p(1,q) with p = d n^2 and q = dna - 1 (or its inverse) mod p.
struct ClassTWitness {
    std::int64_t d = 0;
    std::int64_t n = 0;
    std::int64_t a = 0;
    friend bool operator==(const ClassTWitness&, const ClassTWitness&) = default;
};

/// First witness in the order n ascending, then a ascending over [1, n].
/// Rational double points are found with n = 1.
std::optional<ClassTWitness> class_t_witness(const CyclicSing& s);

enum class ClassTKind { none, smooth, rdp, cyclic_t };
std::string to_string(ClassTKind k);
ClassTKind class_t_kind(const Germ& g);

/// Same p and q2 in {q1, q1^{-1} mod p}.
bool is_iso(const CyclicSing& x, const CyclicSing& y);

struct FamilyMember {
    CyclicSing sing;
    HJChain chain;
};

/// 1/(2n+1)(1,2n-1) with chain [2,...,2,3] of n entries.
FamilyMember b_family(std::int64_t n);

/// 1/(4n)(1,2n-1) with chain [4] (n = 1) or [3,2,...,2,3] of n entries.
/// Indexed by type; see y_label for the subscript.
FamilyMember y_family_by_type(std::int64_t n);

/// Subscript attached to the type 1/(4n)(1,2n-1). Lifting the involution of
/// A_{2n-1} to C^2 gives exactly this type, so offset 0 labels it Y_n; offset 1
/// is the shifted labelling Y_{n+1}.
struct YLabelConvention {
    int offset = 0;
};
std::int64_t y_label(std::int64_t type_n, YLabelConvention conv = {});

using Gram = std::vector<std::vector<std::int64_t>>;

/// Sylvester's criterion with exact fraction-free elimination.
bool is_negative_definite(const Gram& g);

/// Weighted tree: self-intersections -b_i (b_i >= 2) and undirected edges.
struct ResolutionGraph {
    std::vector<std::int64_t> b;
    std::vector<std::pair<int, int>> edges;

    static ResolutionGraph chain(const HJChain& c);
    /// Intersection matrix: -b_i on the diagonal, 1 on edges.
    Gram intersection_matrix() const;
};

struct FundamentalCycle {
    std::vector<std::int64_t> coefficients;
    std::int64_t self_intersection = 0;
    /// Number of single-vertex increments after Z = sum E_i.
    int steps = 0;
};

/// Laufer's algorithm: start from sum E_i, add E_i while Z.E_i > 0.
/// Throws InvalidArgument unless the graph is a negative definite tree with all b_i >= 2.
FundamentalCycle fundamental_cycle(const ResolutionGraph& g);

/// (dna - 1)^2 == 1 mod dn^2.
bool q2_criterion(std::int64_t d, std::int64_t n, std::int64_t a);

}  // namespace tequiv
