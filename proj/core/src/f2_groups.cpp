#include "tequiv/f2_groups.hpp"

#include <utility>

namespace tequiv {

namespace {

// Reduced row echelon form over F2 with an optional right-hand payload that
// follows every row operation.
template <class Row, class Payload>
struct Echelon {
    std::vector<Row> rows;
    std::vector<Payload> payload;
    std::vector<int> pivots;

    void reduce(Row& v, Payload& p) const {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (v.get(pivots[k])) {
                v += rows[k];
                p += payload[k];
            }
        }
    }

    // Returns false when v (after reduction) is zero.
    bool insert(Row v, Payload p) {
        reduce(v, p);
        const int piv = v.leading_index();
        if (piv < 0) return false;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].get(piv)) {
                rows[k] += v;
                payload[k] += p;
            }
        }
        rows.push_back(std::move(v));
        payload.push_back(std::move(p));
        pivots.push_back(piv);
        return true;
    }
};

struct NoPayload {
    NoPayload& operator+=(const NoPayload&) { return *this; }
};

struct ParityBit {
    bool value = false;
    ParityBit& operator+=(const ParityBit& o) {
        value ^= o.value;
        return *this;
    }
};

int common_rank(std::span<const GVector> vs) {
    if (vs.empty()) return 0;
    const int r = vs.front().rank();
    for (const auto& v : vs)
        if (v.rank() != r) throw InvalidArgument("vectors of different rank");
    return r;
}

}  // namespace

std::vector<GVector> GroupF2::standard_basis() const {
    std::vector<GVector> out;
    out.reserve(rank_);
    for (int j = 0; j < rank_; ++j) out.push_back(GVector::unit(rank_, j));
    return out;
}

int span_rank(std::span<const GVector> vs) {
    common_rank(vs);
    Echelon<GVector, NoPayload> e;
    int n = 0;
    for (const auto& v : vs) n += e.insert(v, {}) ? 1 : 0;
    return n;
}

bool is_independent(std::span<const GVector> vs) {
    return span_rank(vs) == static_cast<int>(vs.size());
}

std::vector<GCharacter> dual_basis(std::span<const GVector> basis) {
    const int r = static_cast<int>(basis.size());
    if (common_rank(basis) != r && r != 0) throw InvalidArgument("basis size differs from the group rank");
    // Gauss-Jordan on [M | I] with rows sigma_j; the payload ends up as M^{-1}.
    Echelon<GVector, GVector> e;
    for (int j = 0; j < r; ++j) {
        if (!e.insert(basis[j], GVector::unit(r, j))) throw InvalidArgument("vectors do not form a basis");
    }
    // Row k of the echelon has a single bit at pivots[k], so it is the unit
    // vector e_{pivots[k]} and payload[k] is row pivots[k] of M^{-1}.
    std::vector<GVector> inverse_rows(r, GVector(r));
    for (int k = 0; k < r; ++k) inverse_rows[e.pivots[k]] = e.payload[k];
    // chi_i is column i of M^{-1}.
    std::vector<GCharacter> duals(r, GCharacter(r));
    for (int row = 0; row < r; ++row)
        for (int i = 0; i < r; ++i)
            if (inverse_rows[row].get(i)) duals[i].set(row);
    return duals;
}

std::vector<int> dual_coordinates(const GCharacter& chi, std::span<const GVector> basis) {
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(basis.size()); ++j)
        if (pairing(chi, basis[j])) out.push_back(j);
    return out;
}

std::optional<int> count_all_one_exponent(int rank, std::span<const GCharacter> phis) {
    Echelon<GCharacter, ParityBit> e;
    for (const auto& phi : phis) {
        if (phi.rank() != rank) throw InvalidArgument("rank mismatch");
        GCharacter v = phi;
        ParityBit p{true};
        e.reduce(v, p);
        if (v.is_zero()) {
            if (p.value) return std::nullopt;
            continue;
        }
        e.insert(phi, ParityBit{true});
    }
    return rank - static_cast<int>(e.rows.size());
}

Subspace Subspace::span(int ambient_rank, std::span<const GVector> generators) {
    Subspace h;
    h.ambient_rank_ = ambient_rank;
    Echelon<GVector, NoPayload> e;
    for (const auto& g : generators) {
        if (g.rank() != ambient_rank) throw InvalidArgument("generator rank differs from ambient rank");
        e.insert(g, {});
    }
    // Order by pivot so that the basis is canonical.
    std::vector<std::size_t> order(e.rows.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return e.pivots[x] < e.pivots[y]; });
    for (auto k : order) h.basis_.push_back(e.rows[k]);
    return h;
}

Subspace Subspace::whole(int ambient_rank) {
    return span(ambient_rank, GroupF2(ambient_rank).standard_basis());
}

GVector Subspace::reduce(GVector v) const {
    for (const auto& b : basis_)
        if (v.get(b.leading_index())) v += b;
    return v;
}

bool Subspace::contains(const GVector& v) const {
    if (v.rank() != ambient_rank_) throw InvalidArgument("rank mismatch");
    return reduce(v).is_zero();
}

bool Subspace::annihilated_by(const GCharacter& chi) const {
    for (const auto& b : basis_)
        if (pairing(chi, b)) return false;
    return true;
}

std::vector<GVector> Subspace::elements(int cap) const {
    if (dim() > cap || dim() > 62) throw RankCapExceeded(dim(), cap);
    std::vector<GVector> out;
    const std::uint64_t n = std::uint64_t{1} << dim();
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        GVector v(ambient_rank_);
        for (int k = 0; k < dim(); ++k)
            if ((i >> (dim() - 1 - k)) & 1U) v += basis_[k];
        out.push_back(v);
    }
    return out;
}

}  // namespace tequiv
