#pragma once

// Linear algebra over the two-element field for G = (Z/2)^r and its dual.

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tequiv/errors.hpp"
#include "tequiv/integer.hpp"

namespace tequiv {

inline constexpr int kMaxRank = 256;
inline constexpr int kDefaultRankCap = 24;

/// A length-r bit sequence b_1..b_r.
///
/// Bit j (0-based) is stored at position rank-1-j of a 256-bit word array, so
/// that numeric order of the storage equals lexicographic order of (b_1,...,b_r)
/// and, for rank <= 63, `index()` is the position of the element in the
/// canonical enumeration order.
template <class Tag>
class Bits {
public:
    Bits() = default;

    explicit Bits(int rank) : rank_(checked_rank(rank)) {}

    static Bits from_index(int rank, std::uint64_t index) {
        Bits b(rank);
        if (rank < 64 && (index >> rank) != 0) throw InvalidArgument("index out of range for rank");
        b.words_[0] = index;
        return b;
    }

    static Bits unit(int rank, int j) {
        Bits b(rank);
        b.set(j);
        return b;
    }

    /// Parses "0110" (b_1 first). Whitespace is not accepted.
    static Bits parse(std::string_view s) {
        Bits b(static_cast<int>(s.size()));
        for (int j = 0; j < b.rank(); ++j) {
            if (s[j] == '1')
                b.set(j);
            else if (s[j] != '0')
                throw InvalidArgument("bit string may only contain 0 and 1: " + std::string(s));
        }
        return b;
    }

    template <class OtherTag>
    static Bits transpose_of(const Bits<OtherTag>& other) {
        Bits b(other.rank());
        b.words_ = other.words();
        return b;
    }

    int rank() const noexcept { return rank_; }

    bool get(int j) const {
        const int pos = rank_ - 1 - j;
        return (words_[pos / 64] >> (pos % 64)) & 1U;
    }

    void set(int j, bool value = true) {
        if (j < 0 || j >= rank_) throw InvalidArgument("bit index out of range");
        const int pos = rank_ - 1 - j;
        const std::uint64_t mask = std::uint64_t{1} << (pos % 64);
        if (value)
            words_[pos / 64] |= mask;
        else
            words_[pos / 64] &= ~mask;
    }

    void flip(int j) { set(j, !get(j)); }

    bool is_zero() const noexcept {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    int weight() const noexcept {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    /// Smallest j with b_j = 1, or -1 for the zero sequence.
    int leading_index() const noexcept {
        for (int k = kWords - 1; k >= 0; --k) {
            if (words_[k] != 0) {
                const int pos = k * 64 + 63 - std::countl_zero(words_[k]);
                return rank_ - 1 - pos;
            }
        }
        return -1;
    }

    std::uint64_t index() const {
        if (rank_ > 63) throw InvalidArgument("index() requires rank <= 63");
        return words_[0];
    }

    Bits& operator+=(const Bits& o) {
        require_same_rank(o);
        for (int k = 0; k < kWords; ++k) words_[k] ^= o.words_[k];
        return *this;
    }

    friend Bits operator+(Bits a, const Bits& b) {
        a += b;
        return a;
    }

    friend bool operator==(const Bits& a, const Bits& b) = default;

    friend std::strong_ordering operator<=>(const Bits& a, const Bits& b) {
        if (a.rank_ != b.rank_) return a.rank_ <=> b.rank_;
        for (int k = kWords - 1; k >= 0; --k)
            if (a.words_[k] != b.words_[k]) return a.words_[k] <=> b.words_[k];
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        std::string s(rank_, '0');
        for (int j = 0; j < rank_; ++j)
            if (get(j)) s[j] = '1';
        return s;
    }

    static constexpr int kWords = kMaxRank / 64;
    const std::array<std::uint64_t, kWords>& words() const noexcept { return words_; }

    /// Parity of popcount(a AND b); the ranks must agree.
    template <class OtherTag>
    bool dot(const Bits<OtherTag>& o) const {
        if (rank_ != o.rank()) throw InvalidArgument("rank mismatch in pairing");
        int c = 0;
        for (int k = 0; k < kWords; ++k) c += std::popcount(words_[k] & o.words()[k]);
        return c & 1;
    }

private:
    static int checked_rank(int r) {
        if (r < 0 || r > kMaxRank) throw InvalidArgument("rank must lie in [0, 256]");
        return r;
    }
    void require_same_rank(const Bits& o) const {
        if (rank_ != o.rank_) throw InvalidArgument("rank mismatch");
    }

    int rank_ = 0;
    std::array<std::uint64_t, kWords> words_{};
};

struct ElementTag {};
struct CharacterTag {};

/// An element sigma of G.
using GVector = Bits<ElementTag>;
/// A character chi in the dual space, acting by chi(sigma) = parity of the bitwise AND.
using GCharacter = Bits<CharacterTag>;

inline bool pairing(const GCharacter& chi, const GVector& sigma) { return chi.dot(sigma); }

/// G = (Z/2)^r.
class GroupF2 {
public:
    explicit GroupF2(int rank) : rank_(rank) {
        if (rank < 0 || rank > kMaxRank) throw InvalidArgument("group rank must lie in [0, 256]");
    }

    int rank() const noexcept { return rank_; }
    Int order() const { return pow2(static_cast<unsigned>(rank_)); }

    GVector zero() const { return GVector(rank_); }
    GCharacter zero_character() const { return GCharacter(rank_); }

    /// Visits all 2^r elements in lexicographic order; refuses ranks above `cap`.
    template <class F>
    void for_each_element(F&& f, int cap = kDefaultRankCap) const {
        require_enumerable(cap);
        const std::uint64_t n = std::uint64_t{1} << rank_;
        for (std::uint64_t i = 0; i < n; ++i) f(GVector::from_index(rank_, i));
    }

    template <class F>
    void for_each_character(F&& f, int cap = kDefaultRankCap) const {
        require_enumerable(cap);
        const std::uint64_t n = std::uint64_t{1} << rank_;
        for (std::uint64_t i = 0; i < n; ++i) f(GCharacter::from_index(rank_, i));
    }

    void require_enumerable(int cap) const {
        if (rank_ > cap || rank_ > 62) throw RankCapExceeded(rank_, std::min(cap, 62));
    }

    std::vector<GVector> standard_basis() const;

    friend bool operator==(const GroupF2&, const GroupF2&) = default;

private:
    int rank_;
};

/// Rank of the span of `vs` (all of the same rank).
int span_rank(std::span<const GVector> vs);

/// True iff Gaussian elimination finds a pivot for every vector.
bool is_independent(std::span<const GVector> vs);

/// Characters chi_i with chi_i(sigma_j) = delta_ij. Throws InvalidArgument unless
/// `basis` is a basis of G (r vectors of rank r, independent).
std::vector<GCharacter> dual_basis(std::span<const GVector> basis);

/// Indices j with chi(basis_j) = 1: the expansion of chi in the dual basis.
std::vector<int> dual_coordinates(const GCharacter& chi, std::span<const GVector> basis);

/// Number of sigma in G with phi(sigma) = 1 for every functional in `phis`,
/// as a base-2 exponent; nullopt when the affine system is inconsistent.
std::optional<int> count_all_one_exponent(int rank, std::span<const GCharacter> phis);

/// A subspace H of G held as a reduced echelon basis (pivot = leading index).
class Subspace {
public:
    Subspace() = default;

    static Subspace span(int ambient_rank, std::span<const GVector> generators);
    static Subspace whole(int ambient_rank);

    int ambient_rank() const noexcept { return ambient_rank_; }
    int dim() const noexcept { return static_cast<int>(basis_.size()); }
    const std::vector<GVector>& basis() const noexcept { return basis_; }

    bool contains(const GVector& v) const;
    /// chi lies in the annihilator of H.
    bool annihilated_by(const GCharacter& chi) const;

    Int size() const { return pow2(static_cast<unsigned>(dim())); }
    /// |G - H| = 2^r - 2^dim.
    Int complement_size() const { return pow2(ambient_rank_) - size(); }

    /// The 2^dim elements, ordered by their coefficient vector on the echelon basis.
    std::vector<GVector> elements(int cap = kDefaultRankCap) const;

    /// Elements of G outside H, in lexicographic order.
    template <class F>
    void for_each_complement(F&& f, int cap = kDefaultRankCap) const {
        GroupF2(ambient_rank_).for_each_element(
            [&](const GVector& s) {
                if (!contains(s)) f(s);
            },
            cap);
    }

    friend bool operator==(const Subspace&, const Subspace&) = default;

private:
    GVector reduce(GVector v) const;

    int ambient_rank_ = 0;
    std::vector<GVector> basis_;
};

}  // namespace tequiv
