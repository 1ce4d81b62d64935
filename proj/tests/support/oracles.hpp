#pragma once

// Brute-force reference implementations used only by the tests. Nothing here
// calls into the library beyond plain value types.

#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "tequiv/cover_data.hpp"

namespace oracle {

using tequiv::DivClass;
using tequiv::Int;

// Bits are packed as plain integers; bit j of the sequence is bit (r-1-j).
inline int parity(std::uint64_t x) { return __builtin_popcountll(x) & 1; }
inline int pair(std::uint64_t chi, std::uint64_t sigma) { return parity(chi & sigma); }

inline Int dot(const DivClass& x, const DivClass& y) {
    Int v = x.r * y.s + x.s * y.r;
    for (std::size_t i = 0; i < x.a.size(); ++i) v -= x.a[i] * y.a[i];
    return v;
}

/// Fully tabulated building data on the standard basis.
struct Table {
    int r = 0;
    std::size_t n = 0;
    std::vector<DivClass> D;  // indexed by sigma
    std::vector<DivClass> L;  // indexed by chi
};

/// Tabulates D from a library branch map.
inline std::vector<DivClass> tabulate_D(const tequiv::BranchMap& d) {
    std::vector<DivClass> out;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << d.rank()); ++s)
        out.push_back(d.at(tequiv::GVector::from_index(d.rank(), s)));
    return out;
}

/// L on every character from L on the standard dual basis via the k-fold
/// identity written out term by term.
inline std::vector<DivClass> extend_L(int r, const std::vector<DivClass>& D, const std::vector<DivClass>& l_std) {
    const std::size_t n = D[0].a.size();
    std::vector<DivClass> L;
    const std::uint64_t g = std::uint64_t{1} << r;
    for (std::uint64_t chi = 0; chi < g; ++chi) {
        DivClass l(n);
        std::vector<std::uint64_t> parts;
        for (int j = 0; j < r; ++j) {
            const std::uint64_t cj = std::uint64_t{1} << (r - 1 - j);
            if (chi & cj) {
                l += l_std[j];
                parts.push_back(cj);
            }
        }
        for (std::uint64_t s = 0; s < g; ++s) {
            int hits = 0;
            for (auto p : parts) hits += pair(p, s);
            l -= Int(hits / 2) * D[s];
        }
        L.push_back(l);
    }
    return L;
}

inline bool cover_condition(int r, const std::vector<DivClass>& D, const std::vector<DivClass>& L) {
    const std::uint64_t g = std::uint64_t{1} << r;
    for (std::uint64_t x = 0; x < g; ++x)
        for (std::uint64_t y = 0; y < g; ++y) {
            DivClass rhs = L[x ^ y];
            for (std::uint64_t s = 0; s < g; ++s)
                if (pair(x, s) && pair(y, s)) rhs += D[s];
            if (L[x] + L[y] != rhs) return false;
        }
    return true;
}

/// Random branch map with even sums on every character: every value is doubled.
inline tequiv::BranchMap random_even_branch(int r, std::size_t n, std::mt19937_64& rng, int density = 50,
                                            int spread = 4) {
    tequiv::BranchMap d(r, n);
    std::uniform_int_distribution<int> coin(0, 99), val(-spread, spread);
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << r); ++s) {
        if (coin(rng) >= density) continue;
        DivClass c(n);
        c.r = 2 * val(rng);
        c.s = 2 * val(rng);
        for (auto& a : c.a) a = 2 * val(rng);
        d.set(tequiv::GVector::from_index(r, s), c);
    }
    return d;
}

/// Random branch map that is even on every basis sum but not doubled:
/// odd values are placed so that each standard character sees an even count.
inline tequiv::BranchMap random_branch(int r, std::size_t n, std::mt19937_64& rng, int spread = 5) {
    for (;;) {
        tequiv::BranchMap d(r, n);
        std::uniform_int_distribution<int> coin(0, 99), val(-spread, spread);
        for (std::uint64_t s = 1; s < (std::uint64_t{1} << r); ++s) {
            if (coin(rng) >= 60) continue;
            DivClass c(n);
            c.r = val(rng);
            c.s = val(rng);
            for (auto& a : c.a) a = val(rng);
            d.set(tequiv::GVector::from_index(r, s), c);
        }
        // Fix parity with the element whose coordinates are exactly the odd
        // characters: adding a 0/1 class there flips exactly those sums.
        for (std::size_t k = 0; k < n + 2; ++k) {
            std::uint64_t fix = 0;
            for (int j = 0; j < r; ++j) {
                const auto chi = tequiv::GCharacter::unit(r, j);
                Int sum = 0;
                for (const auto& [sigma, value] : d.entries())
                    if (tequiv::pairing(chi, sigma)) sum += (k == 0 ? value.r : k == 1 ? value.s : value.a[k - 2]);
                if (!tequiv::is_even(sum)) fix |= std::uint64_t{1} << (r - 1 - j);
            }
            if (fix == 0) continue;
            DivClass e(n);
            (k == 0 ? e.r : k == 1 ? e.s : e.a[k - 2]) = 1;
            d.add(tequiv::GVector::from_index(r, fix), e);
        }
        return d;
    }
}

/// Every subspace of (Z/2)^r, listed once each through reduced row echelon forms.
inline std::vector<tequiv::Subspace> all_subspaces(int r) {
    std::vector<tequiv::Subspace> out;
    for (std::uint64_t pivots = 0; pivots < (std::uint64_t{1} << r); ++pivots) {
        std::vector<int> piv;
        for (int j = 0; j < r; ++j)
            if (pivots & (std::uint64_t{1} << j)) piv.push_back(j);
        // free slots: (row k, column c) with c > piv[k] and c not a pivot column
        std::vector<std::pair<int, int>> slots;
        for (std::size_t k = 0; k < piv.size(); ++k)
            for (int c = piv[k] + 1; c < r; ++c)
                if (!(pivots & (std::uint64_t{1} << c))) slots.emplace_back(static_cast<int>(k), c);
        for (std::uint64_t fill = 0; fill < (std::uint64_t{1} << slots.size()); ++fill) {
            std::vector<tequiv::GVector> rows;
            for (int p : piv) rows.push_back(tequiv::GVector::unit(r, p));
            for (std::size_t t = 0; t < slots.size(); ++t)
                if (fill & (std::uint64_t{1} << t)) rows[slots[t].first].flip(slots[t].second);
            out.push_back(tequiv::Subspace::span(r, rows));
        }
    }
    return out;
}

}  // namespace oracle
