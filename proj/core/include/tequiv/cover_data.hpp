#pragma once

// Building data (L, D) for flat (Z/2)^r covers of a blown-up quadric.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tequiv/divisor_lattice.hpp"
#include "tequiv/f2_groups.hpp"

namespace tequiv {

/// D(sigma) = b on every sigma with psi(sigma) = 1.
struct UniformPart {
    GCharacter psi;
    DivClass base;
    friend bool operator==(const UniformPart&, const UniformPart&) = default;
};

/// The branch map D: G -> Pic(S).
///
/// Stored as a sparse table of explicit entries plus an optional uniform part
/// over the coset {psi = 1}:
///     D(sigma) = entries[sigma] + [psi(sigma) = 1] * base.
/// The uniform part is what lets a rank-80 group carry an ample class on half
/// of its elements without tabulating them.
class BranchMap {
public:
    BranchMap() = default;
    BranchMap(int rank, std::size_t n) : rank_(rank), n_(n) {}

    int rank() const noexcept { return rank_; }
    std::size_t n() const noexcept { return n_; }

    /// Replaces the explicit entry at sigma (zero removes it). sigma = 0 must stay zero.
    void set(const GVector& sigma, DivClass c);
    void add(const GVector& sigma, const DivClass& c);
    void set_uniform(const GCharacter& psi, DivClass base);
    void clear_uniform() { uniform_.reset(); }

    DivClass at(const GVector& sigma) const;

    const std::map<GVector, DivClass>& entries() const noexcept { return entries_; }
    const std::optional<UniformPart>& uniform() const noexcept { return uniform_; }

    /// Number of sigma with psi(sigma) = 1 and every phi(sigma) = 1, or zero
    /// without a uniform part.
    Int uniform_count(std::span<const GCharacter> phis) const;

    /// Number of sigma with D(sigma) != 0.
    Int support_size() const;

    /// Every sigma with D(sigma) != 0, lexicographic. Needs rank <= cap when a
    /// uniform part is present.
    std::vector<GVector> support(int cap = kDefaultRankCap) const;

    /// Distinct values taken by D over G, sorted (includes 0 when some D vanishes).
    std::vector<DivClass> distinct_values() const;

    /// Tabulates the uniform part into explicit entries (rank <= cap).
    BranchMap materialized(int cap = kDefaultRankCap) const;

    /// Truncates every class to the first n exceptional coordinates.
    BranchMap truncated(std::size_t n) const;

    friend BranchMap operator+(const BranchMap& x, const BranchMap& y);
    friend bool operator==(const BranchMap&, const BranchMap&) = default;

private:
    void require_element(const GVector& sigma) const;

    int rank_ = 0;
    std::size_t n_ = 0;
    std::map<GVector, DivClass> entries_;
    std::optional<UniformPart> uniform_;
};

/// A group G, the branch map D and L on a chosen dual basis.
class BuildingData {
public:
    BuildingData() = default;

    /// Takes L_basis as given; nothing is checked beyond shapes.
    BuildingData(BranchMap d, std::vector<GVector> basis, std::vector<DivClass> l_basis);

    int rank() const noexcept { return d_.rank(); }
    GroupF2 group() const { return GroupF2(rank()); }
    BlownQuadricLattice lattice() const { return BlownQuadricLattice(d_.n()); }
    const BranchMap& D() const noexcept { return d_; }
    const std::vector<GVector>& basis() const noexcept { return basis_; }
    const std::vector<GCharacter>& duals() const noexcept { return duals_; }
    const std::vector<DivClass>& L_basis() const noexcept { return l_basis_; }

    /// Coordinates of sigma in the chosen basis, as a bit vector.
    GVector basis_coordinates(const GVector& sigma) const;
    /// Dual-basis expansion of chi, as a bit vector.
    GVector dual_expansion(const GCharacter& chi) const;

    /// T(phi) = sum of D(sigma) over phi(sigma) = 1.
    DivClass branch_sum(const GCharacter& phi) const;
    /// sum of D(sigma) over chi(sigma) = eta(sigma) = 1.
    DivClass joint_branch_sum(const GCharacter& chi, const GCharacter& eta) const;

    /// 2 L(chi_j) - T(chi_j) for every basis character.
    std::vector<DivClass> residues() const;

    /// Same D and basis with the L values of another solution added.
    friend BuildingData operator+(const BuildingData& x, const BuildingData& y);
    friend bool operator==(const BuildingData& x, const BuildingData& y) {
        return x.d_ == y.d_ && x.basis_ == y.basis_ && x.l_basis_ == y.l_basis_;
    }

private:
    struct Entry {
        GVector sigma;
        GVector coords;
        DivClass value;
    };
    friend DivClass L_of(const BuildingData& data, const GCharacter& chi);

    BranchMap d_;
    std::vector<GVector> basis_;
    std::vector<GCharacter> duals_;
    std::vector<DivClass> l_basis_;
    std::vector<Entry> cached_;
};

/// L(chi) through the k-fold identity on the dual-basis expansion of chi.
DivClass L_of(const BuildingData& data, const GCharacter& chi);

/// L(chi) + L(eta) - L(chi + eta) - sum over chi(sigma) = eta(sigma) = 1 of D(sigma).
DivClass verify_pair(const BuildingData& data, const GCharacter& chi, const GCharacter& eta);

enum class VerifyMode { exhaustive, sampled, bounded };
std::string to_string(VerifyMode m);
VerifyMode parse_verify_mode(const std::string& s);

struct VerifyOptions {
    VerifyMode mode = VerifyMode::exhaustive;
    int rank_cap = kDefaultRankCap;
    std::uint64_t seed = 0;
    std::size_t random_pairs = 1024;
    std::size_t failure_cap = 64;
    bool parallel = false;
};

struct PairFailure {
    GCharacter chi;
    GCharacter eta;
    DivClass defect;
};

/// Range of one lattice coordinate of the pair defect over all pairs.
struct CoordinateBound {
    std::string coordinate;
    Int lo;
    Int hi;
};

struct CoverReport {
    VerifyMode mode = VerifyMode::exhaustive;
    /// Unordered pairs {chi, eta} (diagonal included) that the check covers.
    Int pairs_checked = 0;
    Int failure_count = 0;
    /// Canonically sorted and truncated to the failure cap.
    std::vector<PairFailure> failures;
    std::vector<CoordinateBound> bounds;
    bool passed = true;
};

CoverReport verify_all(const BuildingData& data, const VerifyOptions& opts = {});

/// Halves each basis branch sum; throws ParityError on an odd coordinate.
std::vector<DivClass> solve_basis_L(const BranchMap& d, std::span<const GVector> basis);

/// Convenience: D plus the unique L on `basis` (standard basis when empty).
BuildingData solve(const BranchMap& d, std::vector<GVector> basis = {});

/// The elementary solution (L, D)_{H, v} on the standard basis.
BuildingData elementary_solution(const Subspace& h, const DivClass& v, int rank_cap = kDefaultRankCap);

/// Lifts data to a lattice with m more exceptional coordinates.
/// d_lift must truncate to data.D(). Throws ParityError when halving fails.
BuildingData lift(const BuildingData& data, std::size_t m, const BranchMap& d_lift);

/// alpha(c) = r*w_r + s*w_s + sum a_i*w_a[i]; a homomorphism Pic(S) -> Z.
struct LinearFunctional {
    Int r = 0;
    Int s = 0;
    std::vector<Int> a;

    Int operator()(const DivClass& c) const;
    bool is_zero() const;
    /// alpha(c) = h . c
    static LinearFunctional intersection_with(const DivClass& h);
};

struct AmpleExtensionOptions {
    Int q_cap = 65536;
    int rank_cap = kDefaultRankCap;
};

struct AmpleExtensionResult {
    BuildingData data;
    Int q;
    /// min over chi != 0, sigma of alpha(L_chi - D_sigma).
    Int min_l_minus_d;
    /// min over sigma outside H of alpha(D_sigma).
    Int min_d_outside;
};

/// The summed construction extending D_on_H to G with both alpha bounds >= N.
/// Pieces: for tau in H the elementary solution on span{tau, eta} with value
/// D_on_H(tau); for tau outside H the rank-one solution with value q*v.
AmpleExtensionResult ample_extension(int rank, const Subspace& h, const BranchMap& d_on_h, const GVector& eta,
                                     const DivClass& v, const LinearFunctional& alpha, const Int& n_bound,
                                     const AmpleExtensionOptions& opts = {});

struct RamificationProfile {
    /// Elements with nonzero D, when the support is small enough to list.
    std::optional<std::vector<GVector>> I;
    Int I_size = 0;
    bool totally_ramified = false;
    bool simple = false;
};

RamificationProfile ramification_profile(const BuildingData& data, int rank_cap = kDefaultRankCap);

struct InvariantReport {
    Int K2;
    Int chi;
    Int K2_cross;
    Int chi_cross;
    /// "exhaustive" when L was summed over all characters, "moments" otherwise.
    std::string chi_route;
    std::string chi_cross_route;
    bool consistent = true;
};

/// K^2 and chi of the cover by two routes each. Throws ConsistencyError on
/// non-integral values or a route mismatch, and InvalidArgument when the data
/// fail the basis equations.
InvariantReport invariants(const BuildingData& data, int rank_cap = kDefaultRankCap);

struct Obligation {
    std::string kind;  // "L" or "L-D"
    GCharacter chi;
    std::optional<GVector> sigma;
    DivClass value;
    bool passed;
};

/// Box of classes, used for bounded checks.
struct ClassBox {
    DivClass lo;
    DivClass hi;
    bool all_comb_ample() const;
};

struct VanishingReport {
    VerifyMode mode = VerifyMode::exhaustive;
    bool l_ample = true;
    bool l_minus_d_ample = true;
    Int obligations_checked = 0;
    Int obligations_failed = 0;
    std::vector<Obligation> failures;
    /// In bounded mode: one line per checked family.
    std::vector<std::string> families;
    bool passed() const { return l_ample && l_minus_d_ample; }
};

/// Sufficient conditions for the cohomology vanishings needed to deform the
/// cover: L(chi) and L(chi) - D(sigma) (chi(sigma) = 0, D(sigma) != 0)
/// combinatorially ample.
VanishingReport check_vanishing(const BuildingData& data, const VerifyOptions& opts = {});

/// Boxes containing L(chi) for every nonzero chi, one per character family.
/// Sound for any data: the residues widen the boxes when the basis equations fail.
struct CharacterFamily {
    std::string name;
    std::optional<GCharacter> exact;
    ClassBox box;
};
std::vector<CharacterFamily> character_families(const BuildingData& data);

}  // namespace tequiv
