#pragma once

// Lens-space links of cyclic quotient singularities, the sigma/tau mapping
// classes, Milnor lattices and lattice embedding obstructions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tequiv/quotient_sings.hpp"

namespace tequiv {

/// L(p,q) = S^3 / mu_p with xi(x1,x2) = (xi x1, xi^q x2). p = 1 is S^3.
struct LensSpace {
    std::int64_t p = 1;
    std::int64_t q = 0;

    bool is_sphere() const noexcept { return p == 1; }
    std::string to_string() const;
    friend bool operator==(const LensSpace&, const LensSpace&) = default;
};

LensSpace link_of(const Germ& g);

/// Links of isomorphic singularities are identified; (p,q) and (p,q^{-1})
/// are the same oriented lens space.
bool same_link(const Germ& x, const Germ& y);

struct MCGReport {
    LensSpace lens;
    /// q^2 = 1 mod p: sigma(x1,x2) = (x2,x1) descends.
    bool sigma_defined = false;
    /// q = 1 mod p.
    bool sigma_isotopic_to_id = false;
    /// q = -1 mod p.
    bool sigma_tau_isotopic_to_id = false;
    /// Generators of Diff+/Diff0+ left after dropping isotopically trivial ones.
    std::vector<std::string> generators;
};

MCGReport mcg(const LensSpace& l);

/// H_2 of a Milnor fibre with its intersection form.
struct MilnorLattice {
    std::string name;
    Gram gram;
    /// The canonical class is the nonzero 2-torsion element of H^2.
    bool torsion_canonical_two = false;
    /// Free rank; unset when it is not known.
    std::optional<int> rank;
};

enum class MilnorKind { A, D, E, B, Y_simultaneous, Y_qgorenstein };

/// A(n), n >= 1; D(n), n >= 4; E(6|7|8); B(n) and the Y components, n >= 1
/// (Y indexed by type, see y_family_by_type). Negated Dynkin / resolution forms.
MilnorLattice milnor_lattice(MilnorKind kind, int n);

/// Gram matrix of a tree: -b_i on the diagonal, 1 on edges.
Gram gram_of(const ResolutionGraph& g);

enum class AmbientModel { PlaneC2, BlowupC2, BlowupCxP1TwoPoints };
std::string to_string(AmbientModel a);
/// (0), [-1], diag(0,-1,-1).
Gram ambient_gram(AmbientModel a);

struct EmbedOptions {
    std::uint64_t node_budget = 50'000'000;
};

struct EmbedResult {
    bool embeds = false;
    /// "torsion" when decided by the canonical-class rule, "search" otherwise.
    std::string decided_by;
    /// Images of the source basis in ambient coordinates.
    std::optional<std::vector<std::vector<std::int64_t>>> witness;
    /// Coefficient bound per source basis vector; the searched box is
    /// [-bound, bound] on every definite ambient coordinate, 0 on the null ones.
    std::vector<std::int64_t> box;
    std::uint64_t nodes = 0;
};

/// Decides whether an isometric homomorphism H_2(source) -> H_2(ambient) exists.
/// Throws InvalidArgument for non negative definite sources and
/// SearchCapExceeded when the node budget runs out.
EmbedResult embeds(const MilnorLattice& source, AmbientModel ambient, const EmbedOptions& opts = {});

struct Verdict {
    /// "one_point_blowup", "affine_plane", "two_point_blowup" or "control".
    std::string obstruction;
    std::string source;
    AmbientModel ambient;
    bool expected;
    EmbedResult result;
    bool agrees() const { return result.embeds == expected; }
};

/// The negative embedding verdicts for family indices up to max_n:
/// A/D/E/B into the blow-up of C^2 at a point, both Y components into C^2,
/// A(n), n >= 2, into C x P^1 blown up at two points; plus the positive
/// control A(1) into the latter.
std::vector<Verdict> obstruction_verdicts(int max_n, const EmbedOptions& opts = {});

}  // namespace tequiv
