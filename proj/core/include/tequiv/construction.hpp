#pragma once

// The global generator: a (Z/2)^R group built from k curve configurations on
// P^1 x P^1, its branch divisors, certification of the ampleness conditions
// and the moduli bookkeeping behind the component count.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tequiv/cover_data.hpp"

namespace tequiv {

/// b = l*a and n = l*a*(2a - c) with 0 < 2c < a.
struct BnSplit {
    std::int64_t l = 0;
    std::int64_t c = 0;
    friend bool operator==(const BnSplit&, const BnSplit&) = default;
};

struct FactorParams {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t n = 0;
    std::optional<BnSplit> bn_split;
    friend bool operator==(const FactorParams&, const FactorParams&) = default;
};

struct ConstructionInput {
    int k = 0;
    std::vector<FactorParams> factors;
    /// Starting ampleness multiplier M.
    Int multiplier = 1;
    /// exhaustive or bounded.
    VerifyMode mode = VerifyMode::bounded;
    std::uint64_t seed = 0;
    int rank_cap = kDefaultRankCap;
    /// Escalation stops once M would exceed this.
    Int m_cap = 64;
    bool parallel = false;
};

/// Throws InvalidArgument unless a, b >= 3, a != b, 0 <= n <= 2ab, the n are
/// strictly increasing, k matches and every given split is valid.
void validate(const ConstructionInput& in);

/// Basis layout of G. Per factor i: alpha^i_1, alpha^i_2, eps^i_1..eps^i_n;
/// then tau_1, tau_2, eta_1, eta_2 and the extra summand zeta.
struct GroupLayout {
    struct Block {
        int alpha1 = 0;
        int alpha2 = 0;
        int eps_begin = 0;
        int n = 0;
        /// First exceptional coordinate of the factor in the lattice.
        std::size_t exc_begin = 0;
    };

    int rank = 0;
    std::size_t exceptional_count = 0;
    std::vector<Block> blocks;
    int tau1 = 0, tau2 = 0, eta1 = 0, eta2 = 0, zeta = 0;
    /// Name of every basis vector.
    std::vector<std::string> names;

    GVector unit(int index) const { return GVector::unit(rank, index); }
    /// j in 1..3, alpha^i_3 = alpha^i_1 + alpha^i_2; i and j are 1-based.
    GVector alpha(int i, int j) const;
    GVector epsilon(int i, int j) const;
    /// The character dual to zeta: 1 exactly off the subgroup G'.
    GCharacter psi() const;
    bool in_g_prime(const GVector& sigma) const { return !sigma.get(zeta); }
};

GroupLayout build_group(const std::vector<FactorParams>& factors);

/// The comb-ample base class (4N+2, 4N+2; 2, ..., 2), N exceptional curves.
DivClass base_class(std::size_t exceptional_count);

/// D on the subgroup G' as prescribed, or 0 for an unnamed element.
DivClass prescribed_class(const GroupLayout& layout, const std::vector<FactorParams>& factors,
                          const GVector& sigma);

/// The full branch map with multiplier M on the coset G - G'.
///
/// There D = M*A plus a parity correction: eps, tau and eta pick up -E, F1
/// and F2 at zeta + e, and zeta itself picks up (0, 0; 1, ..., 1). With these
/// every basis branch sum is even.
BranchMap assign_branch_divisors(const GroupLayout& layout, const std::vector<FactorParams>& factors, const Int& m);

/// min(a_i - 2, r - sum(a_i + 1) - 1, s - sum(a_i + 1) - 1): non-negative
/// exactly on combinatorially ample classes.
Int comb_ample_margin(const DivClass& c);

struct AmpleCheck {
    VerifyMode mode = VerifyMode::exhaustive;
    /// Pairs (chi, sigma) or elements sigma the check covers.
    Int covered = 0;
    /// Distinct classes actually tested.
    Int classes_checked = 0;
    Int failed = 0;
    std::vector<std::string> failures;
    /// Smallest margin seen; a bound from below in bounded mode.
    std::optional<Int> min_margin;
    bool passed = true;
};

/// L(chi) - D(sigma) combinatorially ample for every chi != 0 and every sigma.
AmpleCheck check_l_minus_d(const BuildingData& data, const VerifyOptions& opts = {});

/// D(sigma) combinatorially ample for every sigma with psi(sigma) = 1.
AmpleCheck check_coset_ample(const BuildingData& data, const GCharacter& psi, const VerifyOptions& opts = {});

/// D agrees with the prescribed classes on G' (exhaustive enumerates G').
struct PrescriptionCheck {
    bool alpha_ok = true;
    bool eps_fibre_ok = true;
    bool zero_elsewhere_ok = true;
    Int elements_checked = 0;
    std::vector<std::string> mismatches;
    bool passed() const { return alpha_ok && eps_fibre_ok && zero_elsewhere_ok; }
};
PrescriptionCheck check_prescription(const BuildingData& data, const GroupLayout& layout,
                                     const std::vector<FactorParams>& factors, const VerifyOptions& opts = {});

/// All (l, c) with l >= 2, b = l*a, n = l*a*(2a - c) and 0 < 2c < a.
std::vector<BnSplit> brill_noether_split(std::int64_t a, std::int64_t b, std::int64_t n);

/// n = b(2a - c).
std::int64_t n_of(std::int64_t a, std::int64_t b, std::int64_t c);
/// n + 2(a + b) - 1 + (k - 1)(c + 1) for k curves through n points.
std::int64_t moduli_dim(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t k, std::int64_t n);
/// 2n - 6; needs n >= 3.
std::int64_t h1_theta(std::int64_t n);
/// Same, with the requirement n > max(2a, 2b) enforced.
std::int64_t h1_theta(std::int64_t n, std::int64_t a, std::int64_t b);
/// (a - 1)(b - 1)
std::int64_t curve_genus(std::int64_t a, std::int64_t b);
/// h^0(C, L) = b(a - c) + a + b for L = (a - c, b).
std::int64_t h0_curve(std::int64_t a, std::int64_t b, std::int64_t c);

/// One of the two families of configurations of a split factor.
struct ComponentFamily {
    /// Bidegree of L.
    std::int64_t lr = 0;
    std::int64_t ls = 0;
    /// The shift c on the side that moves (c or l*c).
    std::int64_t shift = 0;
    std::int64_t dim = 0;
    std::int64_t h0 = 0;
};

struct FactorModuli {
    FactorParams params;
    std::optional<BnSplit> split;
    std::int64_t genus = 0;
    std::optional<std::int64_t> h1_theta;
    std::vector<ComponentFamily> families;
};

FactorModuli factor_moduli(const FactorParams& f);

struct Certificate {
    ConstructionInput input;
    GroupLayout layout;
    Int multiplier_used = 0;
    int attempts = 0;
    BuildingData data;
    CoverReport cover;
    /// Seeded random pairs, bounded mode only.
    std::optional<CoverReport> cover_sampled;
    AmpleCheck l_minus_d;
    PrescriptionCheck prescription;
    AmpleCheck coset_ample;
    VanishingReport vanishing;
    /// Every obligation's margin has non-negative slope in M.
    bool monotone_in_m = true;
    Int min_slope = 0;
    InvariantReport invariants;
    std::optional<Int> component_lower_bound;
    std::vector<FactorModuli> moduli;
    /// Smooth members of the family are pairwise deformation T-equivalent.
    bool diffeomorphic_family = false;

    bool passed() const;
};

/// Builds, escalates M (doubling) until L - D and D off G' are ample, then
/// certifies. Throws SearchCapExceeded when M passes the cap and
/// ConsistencyError when an implication or a dual computation fails.
Certificate certify(const ConstructionInput& in);

}  // namespace tequiv
