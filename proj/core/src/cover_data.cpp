#include "tequiv/cover_data.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "tequiv/parallel.hpp"

namespace tequiv {

namespace {

int and_weight(const GVector& x, const GVector& y) {
    int c = 0;
    for (int k = 0; k < GVector::kWords; ++k) c += std::popcount(x.words()[k] & y.words()[k]);
    return c;
}

DivClass branch_sum_of(const BranchMap& d, const GCharacter& phi) {
    DivClass t(d.n());
    for (const auto& [sigma, value] : d.entries())
        if (pairing(phi, sigma)) t += value;
    if (d.uniform()) {
        const GCharacter phis[] = {phi};
        t += d.uniform_count(phis) * d.uniform()->base;
    }
    return t;
}

GCharacter random_character(int rank, std::mt19937_64& rng) {
    GCharacter c(rank);
    std::uint64_t word = 0;
    for (int j = 0; j < rank; ++j) {
        if (j % 64 == 0) word = rng();
        if ((word >> (j % 64)) & 1U) c.set(j);
    }
    return c;
}

std::vector<std::string> coordinate_names(std::size_t n) {
    std::vector<std::string> names{"r", "s"};
    for (std::size_t i = 0; i < n; ++i) names.push_back("a" + std::to_string(i + 1));
    return names;
}

Int& coord(DivClass& c, std::size_t k) { return k == 0 ? c.r : (k == 1 ? c.s : c.a[k - 2]); }
const Int& coord(const DivClass& c, std::size_t k) { return k == 0 ? c.r : (k == 1 ? c.s : c.a[k - 2]); }

bool pair_less(const PairFailure& x, const PairFailure& y) {
    if (x.chi != y.chi) return x.chi < y.chi;
    return x.eta < y.eta;
}

constexpr std::size_t kListableSupport = 4096;

}  // namespace

// ---------------------------------------------------------------------------
// BranchMap

void BranchMap::require_element(const GVector& sigma) const {
    if (sigma.rank() != rank_)
        throw InvalidArgument("element of rank " + std::to_string(sigma.rank()) + " in a branch map of rank " +
                              std::to_string(rank_));
}

void BranchMap::set(const GVector& sigma, DivClass c) {
    require_element(sigma);
    BlownQuadricLattice(n_).require_member(c);
    if (sigma.is_zero() && !c.is_zero()) throw InvalidArgument("D must vanish at the identity element");
    if (c.is_zero())
        entries_.erase(sigma);
    else
        entries_[sigma] = std::move(c);
}

void BranchMap::add(const GVector& sigma, const DivClass& c) {
    auto it = entries_.find(sigma);
    set(sigma, it == entries_.end() ? c : it->second + c);
}

void BranchMap::set_uniform(const GCharacter& psi, DivClass base) {
    if (psi.rank() != rank_) throw InvalidArgument("uniform character has the wrong rank");
    if (psi.is_zero()) throw InvalidArgument("uniform character must be nonzero");
    BlownQuadricLattice(n_).require_member(base);
    uniform_ = UniformPart{psi, std::move(base)};
}

DivClass BranchMap::at(const GVector& sigma) const {
    require_element(sigma);
    DivClass c(n_);
    if (auto it = entries_.find(sigma); it != entries_.end()) c = it->second;
    if (uniform_ && pairing(uniform_->psi, sigma)) c += uniform_->base;
    return c;
}

Int BranchMap::uniform_count(std::span<const GCharacter> phis) const {
    if (!uniform_) return 0;
    std::vector<GCharacter> all(phis.begin(), phis.end());
    all.push_back(uniform_->psi);
    auto e = count_all_one_exponent(rank_, all);
    return e ? pow2(static_cast<unsigned>(*e)) : Int(0);
}

Int BranchMap::support_size() const {
    if (!uniform_ || uniform_->base.is_zero()) return static_cast<long long>(entries_.size());
    Int count = pow2(static_cast<unsigned>(rank_ - 1));
    for (const auto& [sigma, value] : entries_) {
        if (pairing(uniform_->psi, sigma)) {
            if ((value + uniform_->base).is_zero()) --count;
        } else {
            ++count;
        }
    }
    return count;
}

std::vector<GVector> BranchMap::support(int cap) const {
    std::vector<GVector> out;
    if (!uniform_ || uniform_->base.is_zero()) {
        for (const auto& [sigma, value] : entries_) out.push_back(sigma);
        return out;
    }
    GroupF2(rank_).for_each_element(
        [&](const GVector& s) {
            if (!at(s).is_zero()) out.push_back(s);
        },
        cap);
    return out;
}

std::vector<DivClass> BranchMap::distinct_values() const {
    std::set<DivClass> values;
    values.insert(DivClass(n_));
    Int coset_with_entries = 0;
    for (const auto& [sigma, value] : entries_) {
        values.insert(at(sigma));
        if (uniform_ && pairing(uniform_->psi, sigma)) ++coset_with_entries;
    }
    if (uniform_ && coset_with_entries < pow2(static_cast<unsigned>(rank_ - 1))) values.insert(uniform_->base);
    return {values.begin(), values.end()};
}

BranchMap BranchMap::materialized(int cap) const {
    if (!uniform_) return *this;
    BranchMap out(rank_, n_);
    GroupF2(rank_).for_each_element([&](const GVector& s) { out.set(s, at(s)); }, cap);
    return out;
}

BranchMap BranchMap::truncated(std::size_t n) const {
    BranchMap out(rank_, n);
    for (const auto& [sigma, value] : entries_) out.set(sigma, value.truncated(n));
    if (uniform_) out.set_uniform(uniform_->psi, uniform_->base.truncated(n));
    return out;
}

BranchMap operator+(const BranchMap& x, const BranchMap& y) {
    if (x.rank_ != y.rank_ || x.n_ != y.n_) throw InvalidArgument("branch maps of different shape");
    if (x.uniform_ && y.uniform_ && x.uniform_->psi != y.uniform_->psi) return x.materialized() + y.materialized();
    BranchMap out = x;
    for (const auto& [sigma, value] : y.entries_) out.add(sigma, value);
    if (y.uniform_) {
        if (out.uniform_)
            out.uniform_->base += y.uniform_->base;
        else
            out.uniform_ = y.uniform_;
    }
    return out;
}

// ---------------------------------------------------------------------------
// BuildingData

BuildingData::BuildingData(BranchMap d, std::vector<GVector> basis, std::vector<DivClass> l_basis)
    : d_(std::move(d)), basis_(std::move(basis)), l_basis_(std::move(l_basis)) {
    const int r = d_.rank();
    if (static_cast<int>(basis_.size()) != r)
        throw InvalidArgument("basis has " + std::to_string(basis_.size()) + " vectors, group rank is " +
                              std::to_string(r));
    for (const auto& b : basis_)
        if (b.rank() != r) throw InvalidArgument("basis vector of the wrong rank");
    if (static_cast<int>(l_basis_.size()) != r) throw InvalidArgument("one L value per basis character is required");
    for (const auto& l : l_basis_) lattice().require_member(l);
    duals_ = dual_basis(basis_);
    for (const auto& [sigma, value] : d_.entries()) cached_.push_back({sigma, basis_coordinates(sigma), value});
}

GVector BuildingData::basis_coordinates(const GVector& sigma) const {
    GVector c(rank());
    for (int j = 0; j < rank(); ++j)
        if (pairing(duals_[j], sigma)) c.set(j);
    return c;
}

GVector BuildingData::dual_expansion(const GCharacter& chi) const {
    if (chi.rank() != rank()) throw InvalidArgument("character of the wrong rank");
    GVector s(rank());
    for (int j = 0; j < rank(); ++j)
        if (pairing(chi, basis_[j])) s.set(j);
    return s;
}

DivClass BuildingData::branch_sum(const GCharacter& phi) const { return branch_sum_of(d_, phi); }

DivClass BuildingData::joint_branch_sum(const GCharacter& chi, const GCharacter& eta) const {
    DivClass t(d_.n());
    for (const auto& e : cached_)
        if (pairing(chi, e.sigma) && pairing(eta, e.sigma)) t += e.value;
    if (d_.uniform()) {
        const GCharacter phis[] = {chi, eta};
        t += d_.uniform_count(phis) * d_.uniform()->base;
    }
    return t;
}

std::vector<DivClass> BuildingData::residues() const {
    std::vector<DivClass> out;
    for (int j = 0; j < rank(); ++j) out.push_back(Int(2) * l_basis_[j] - branch_sum(duals_[j]));
    return out;
}

BuildingData operator+(const BuildingData& x, const BuildingData& y) {
    if (x.basis_ != y.basis_) throw InvalidArgument("building data on different bases cannot be added");
    std::vector<DivClass> l = x.l_basis_;
    for (std::size_t j = 0; j < l.size(); ++j) l[j] += y.l_basis_[j];
    return BuildingData(x.d_ + y.d_, x.basis_, std::move(l));
}

DivClass L_of(const BuildingData& data, const GCharacter& chi) {
    const GVector s = data.dual_expansion(chi);
    DivClass l(data.D().n());
    for (int j = 0; j < data.rank(); ++j)
        if (s.get(j)) l += data.l_basis_[j];
    for (const auto& e : data.cached_) {
        const int w = and_weight(s, e.coords);
        if (w >= 2) l -= Int(w / 2) * e.value;
    }
    if (const auto& u = data.D().uniform()) {
        // Over the coset {psi = 1}: sum of floor(w/2) = (sum_j N(chi_j) - N(chi)) / 2,
        // N counting the coset elements where the character is 1.
        Int total = 0;
        for (int j = 0; j < data.rank(); ++j) {
            if (!s.get(j)) continue;
            const GCharacter phis[] = {data.duals_[j]};
            total += data.D().uniform_count(phis);
        }
        const GCharacter phis[] = {chi};
        total -= data.D().uniform_count(phis);
        l -= exact_div(total, 2) * u->base;
    }
    return l;
}

DivClass verify_pair(const BuildingData& data, const GCharacter& chi, const GCharacter& eta) {
    return L_of(data, chi) + L_of(data, eta) - L_of(data, chi + eta) - data.joint_branch_sum(chi, eta);
}

std::string to_string(VerifyMode m) {
    switch (m) {
        case VerifyMode::exhaustive: return "exhaustive";
        case VerifyMode::sampled: return "sampled";
        case VerifyMode::bounded: return "bounded";
    }
    return "?";
}

VerifyMode parse_verify_mode(const std::string& s) {
    if (s == "exhaustive") return VerifyMode::exhaustive;
    if (s == "sampled") return VerifyMode::sampled;
    if (s == "bounded") return VerifyMode::bounded;
    throw InvalidArgument("unknown verification mode '" + s + "'");
}

namespace {

CoverReport verify_exhaustive(const BuildingData& data, const VerifyOptions& opts) {
    const GroupF2 g = data.group();
    g.require_enumerable(opts.rank_cap);
    const std::uint64_t count = std::uint64_t{1} << g.rank();
    std::vector<DivClass> l(count);
    parallel_chunks(count, kDefaultChunks, opts.parallel, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) l[i] = L_of(data, GCharacter::from_index(g.rank(), i));
    });

    struct ChunkResult {
        std::vector<PairFailure> failures;
        std::uint64_t failure_count = 0;
    };
    std::vector<ChunkResult> results(kDefaultChunks);
    parallel_chunks(count, kDefaultChunks, opts.parallel, [&](std::size_t c, std::size_t b, std::size_t e) {
        auto& out = results[c];
        for (std::size_t i = b; i < e; ++i) {
            const auto chi = GCharacter::from_index(g.rank(), i);
            for (std::size_t j = i; j < count; ++j) {
                const auto eta = GCharacter::from_index(g.rank(), j);
                DivClass defect = l[i] + l[j] - l[i ^ j] - data.joint_branch_sum(chi, eta);
                if (defect.is_zero()) continue;
                ++out.failure_count;
                if (out.failures.size() < opts.failure_cap) out.failures.push_back({chi, eta, std::move(defect)});
            }
        }
    });

    CoverReport rep;
    rep.mode = VerifyMode::exhaustive;
    rep.pairs_checked = Int(count) * Int(count + 1) / 2;
    for (auto& r : results) {
        rep.failure_count += r.failure_count;
        for (auto& f : r.failures)
            if (rep.failures.size() < opts.failure_cap) rep.failures.push_back(std::move(f));
    }
    rep.passed = rep.failure_count == 0;
    return rep;
}

CoverReport verify_sampled(const BuildingData& data, const VerifyOptions& opts) {
    const int r = data.rank();
    std::vector<std::pair<GCharacter, GCharacter>> pairs;
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) pairs.emplace_back(data.duals()[i], data.duals()[j]);
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.random_pairs; ++k) {
        auto chi = random_character(r, rng);
        auto eta = random_character(r, rng);
        if (eta < chi) std::swap(chi, eta);
        pairs.emplace_back(std::move(chi), std::move(eta));
    }
    std::vector<std::vector<PairFailure>> found(kDefaultChunks);
    parallel_chunks(pairs.size(), kDefaultChunks, opts.parallel, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            DivClass defect = verify_pair(data, pairs[k].first, pairs[k].second);
            if (!defect.is_zero()) found[c].push_back({pairs[k].first, pairs[k].second, std::move(defect)});
        }
    });
    std::vector<PairFailure> all;
    for (auto& f : found) all.insert(all.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
    std::sort(all.begin(), all.end(), pair_less);
    all.erase(std::unique(all.begin(), all.end(),
                          [](const PairFailure& x, const PairFailure& y) { return x.chi == y.chi && x.eta == y.eta; }),
              all.end());

    CoverReport rep;
    rep.mode = VerifyMode::sampled;
    rep.pairs_checked = static_cast<long long>(pairs.size());
    rep.failure_count = static_cast<long long>(all.size());
    if (all.size() > opts.failure_cap) all.resize(opts.failure_cap);
    rep.failures = std::move(all);
    rep.passed = rep.failure_count == 0;
    return rep;
}

// The defect of (chi, eta) is the sum of the residues 2L_j - T(chi_j) over the
// basis indices shared by the dual expansions of chi and eta, so its range over
// all pairs is, per coordinate, [sum of negative parts, sum of positive parts].
CoverReport verify_bounded(const BuildingData& data, const VerifyOptions& opts) {
    const auto rho = data.residues();
    const auto names = coordinate_names(data.D().n());
    CoverReport rep;
    rep.mode = VerifyMode::bounded;
    const Int g = pow2(static_cast<unsigned>(data.rank()));
    rep.pairs_checked = g * (g + 1) / 2;
    for (std::size_t k = 0; k < names.size(); ++k) {
        CoordinateBound b{names[k], 0, 0};
        for (const auto& r : rho) {
            const Int& v = coord(r, k);
            if (v < 0) b.lo += v;
            if (v > 0) b.hi += v;
        }
        rep.bounds.push_back(std::move(b));
    }
    for (int j = 0; j < data.rank(); ++j) {
        if (rho[j].is_zero()) continue;
        ++rep.failure_count;
        if (rep.failures.size() < opts.failure_cap) rep.failures.push_back({data.duals()[j], data.duals()[j], rho[j]});
    }
    std::sort(rep.failures.begin(), rep.failures.end(), pair_less);
    rep.passed = rep.failure_count == 0;
    return rep;
}

}  // namespace

CoverReport verify_all(const BuildingData& data, const VerifyOptions& opts) {
    switch (opts.mode) {
        case VerifyMode::exhaustive: return verify_exhaustive(data, opts);
        case VerifyMode::sampled: return verify_sampled(data, opts);
        case VerifyMode::bounded: return verify_bounded(data, opts);
    }
    throw InvalidArgument("unknown verification mode");
}

std::vector<DivClass> solve_basis_L(const BranchMap& d, std::span<const GVector> basis) {
    if (d.at(GVector(d.rank())).is_zero() == false) throw InvalidArgument("D must vanish at the identity element");
    const auto duals = dual_basis(basis);
    std::vector<DivClass> l;
    for (std::size_t i = 0; i < duals.size(); ++i) {
        const DivClass t = branch_sum_of(d, duals[i]);
        auto odd = t.odd_coordinates();
        if (!odd.empty()) throw ParityError(static_cast<int>(i), duals[i].to_string(), std::move(odd));
        l.push_back(t.halved());
    }
    return l;
}

BuildingData solve(const BranchMap& d, std::vector<GVector> basis) {
    if (basis.empty()) basis = GroupF2(d.rank()).standard_basis();
    auto l = solve_basis_L(d, basis);
    return BuildingData(d, std::move(basis), std::move(l));
}

BuildingData elementary_solution(const Subspace& h, const DivClass& v, int rank_cap) {
    if (h.dim() == 0) throw InvalidArgument("elementary solutions need a nonzero subspace");
    const int r = h.ambient_rank();
    const DivClass d_value = h.dim() == 1 ? Int(2) * v : v;
    const DivClass l_value = h.dim() == 1 ? v : pow2(static_cast<unsigned>(h.dim() - 2)) * v;
    BranchMap d(r, v.n());
    for (const auto& s : h.elements(rank_cap))
        if (!s.is_zero()) d.set(s, d_value);
    auto basis = GroupF2(r).standard_basis();
    std::vector<DivClass> l;
    for (int i = 0; i < r; ++i)
        l.push_back(h.annihilated_by(GCharacter::unit(r, i)) ? DivClass(v.n()) : l_value);
    return BuildingData(std::move(d), std::move(basis), std::move(l));
}

BuildingData lift(const BuildingData& data, std::size_t m, const BranchMap& d_lift) {
    const std::size_t n = data.D().n();
    if (d_lift.rank() != data.rank() || d_lift.n() != n + m)
        throw InvalidArgument("lifted branch map must have the same rank and " + std::to_string(m) +
                              " more exceptional coordinates");
    if (!(d_lift.truncated(n) == data.D())) throw InvalidArgument("lifted branch map does not project to D");
    auto l = solve_basis_L(d_lift, data.basis());
    for (std::size_t j = 0; j < l.size(); ++j)
        if (l[j].truncated(n) != data.L_basis()[j])
            throw ConsistencyError("input data fail the basis equations; no lift of L exists");
    return BuildingData(d_lift, data.basis(), std::move(l));
}

// ---------------------------------------------------------------------------
// Ample extension

Int LinearFunctional::operator()(const DivClass& c) const {
    if (c.n() != a.size()) throw InvalidArgument("functional and class live in different lattices");
    Int v = r * c.r + s * c.s;
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * c.a[i];
    return v;
}

bool LinearFunctional::is_zero() const {
    return r == 0 && s == 0 && std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; });
}

LinearFunctional LinearFunctional::intersection_with(const DivClass& h) {
    LinearFunctional f;
    f.r = h.s;
    f.s = h.r;
    for (const auto& x : h.a) f.a.push_back(-x);
    return f;
}

AmpleExtensionResult ample_extension(int rank, const Subspace& h, const BranchMap& d_on_h, const GVector& eta,
                                     const DivClass& v, const LinearFunctional& alpha, const Int& n_bound,
                                     const AmpleExtensionOptions& opts) {
    if (rank < 4) throw InvalidArgument("ample extension needs a group of rank at least 4");
    if (h.ambient_rank() != rank) throw InvalidArgument("subspace lives in a group of another rank");
    if (h.dim() >= rank) throw InvalidArgument("subspace must be proper");
    if (eta.rank() != rank || h.contains(eta)) throw InvalidArgument("eta must lie outside the subspace");
    if (alpha.is_zero()) throw InvalidArgument("alpha must be nonzero");
    const Int alpha_v = alpha(v);
    if (alpha_v <= 0) throw InvalidArgument("alpha(v) must be positive");
    if (d_on_h.rank() != rank || d_on_h.n() != v.n()) throw InvalidArgument("D on H has the wrong shape");
    if (d_on_h.uniform()) throw InvalidArgument("D on H must be given by explicit entries");
    for (const auto& [sigma, value] : d_on_h.entries())
        if (!h.contains(sigma)) throw InvalidArgument("D on H has an entry outside H: " + sigma.to_string());
    const GroupF2 g(rank);
    g.require_enumerable(opts.rank_cap);
    const std::size_t n = v.n();

    // q-independent part: the pieces indexed by tau in H.
    BranchMap d_fixed(rank, n);
    std::vector<DivClass> l_fixed(rank, DivClass(n));
    for (const auto& tau : h.elements(opts.rank_cap)) {
        const DivClass dt = d_on_h.at(tau);
        if (tau.is_zero() || dt.is_zero()) continue;
        d_fixed.add(tau, dt);
        d_fixed.add(eta, dt);
        d_fixed.add(tau + eta, dt);
        for (int i = 0; i < rank; ++i) {
            const auto chi = GCharacter::unit(rank, i);
            if (pairing(chi, tau) || pairing(chi, eta)) l_fixed[i] += dt;
        }
    }
    const auto basis = g.standard_basis();
    const BuildingData fixed(d_fixed, basis, l_fixed);

    // Everything below is affine in q: value = constant + q * slope.
    const Int outside_half = pow2(static_cast<unsigned>(rank - 1));
    const Int inside_half = h.dim() == 0 ? Int(0) : pow2(static_cast<unsigned>(h.dim() - 1));
    struct Affine {
        Int c, m;
    };
    std::vector<Affine> l_terms, d_terms, d_outside;
    g.for_each_character(
        [&](const GCharacter& chi) {
            if (chi.is_zero()) return;
            const Int tau_count = h.annihilated_by(chi) ? outside_half : outside_half - inside_half;
            l_terms.push_back({alpha(L_of(fixed, chi)), tau_count * alpha_v});
        },
        opts.rank_cap);
    g.for_each_element(
        [&](const GVector& s) {
            const bool out = !h.contains(s);
            Affine t{alpha(d_fixed.at(s)), out ? Int(2) * alpha_v : Int(0)};
            d_terms.push_back(t);
            if (out) d_outside.push_back(t);
        },
        opts.rank_cap);

    auto margins = [&](const Int& q) {
        Int lmin = l_terms.front().c + q * l_terms.front().m;
        for (const auto& t : l_terms) lmin = std::min<Int>(lmin, t.c + q * t.m);
        Int dmax = d_terms.front().c + q * d_terms.front().m;
        for (const auto& t : d_terms) dmax = std::max<Int>(dmax, t.c + q * t.m);
        Int omin = d_outside.front().c + q * d_outside.front().m;
        for (const auto& t : d_outside) omin = std::min<Int>(omin, t.c + q * t.m);
        return std::pair<Int, Int>{lmin - dmax, omin};
    };

    for (Int q = 1; q <= opts.q_cap; ++q) {
        auto [a_margin, b_margin] = margins(q);
        if (a_margin < n_bound || b_margin < n_bound) continue;
        BranchMap d = d_fixed;
        std::vector<DivClass> l = l_fixed;
        g.for_each_element(
            [&](const GVector& s) {
                if (!h.contains(s)) d.add(s, Int(2) * q * v);
            },
            opts.rank_cap);
        for (int i = 0; i < rank; ++i) {
            const auto chi = GCharacter::unit(rank, i);
            const Int tau_count = h.annihilated_by(chi) ? outside_half : outside_half - inside_half;
            l[i] += q * tau_count * v;
        }
        return {BuildingData(std::move(d), basis, std::move(l)), q, a_margin, b_margin};
    }
    throw SearchCapExceeded("no q <= " + opts.q_cap.str() + " satisfies both bounds");
}

// ---------------------------------------------------------------------------
// Ramification and invariants

RamificationProfile ramification_profile(const BuildingData& data, int rank_cap) {
    RamificationProfile p;
    const BranchMap& d = data.D();
    const int r = data.rank();
    p.I_size = d.support_size();
    const bool listable = p.I_size <= kListableSupport && (!d.uniform() || r <= rank_cap);
    if (listable) {
        auto support = d.support(rank_cap);
        p.totally_ramified = span_rank(support) == r;
        p.simple = static_cast<int>(support.size()) == r && is_independent(support);
        p.I = std::move(support);
        return p;
    }
    // Large support: the uniform coset part alone spans G once it has more
    // elements than any proper subspace can meet the coset in.
    Int coset_support = pow2(static_cast<unsigned>(r - 1));
    if (d.uniform() && !d.uniform()->base.is_zero()) {
        for (const auto& [sigma, value] : d.entries())
            if (pairing(d.uniform()->psi, sigma) && (value + d.uniform()->base).is_zero()) --coset_support;
    } else {
        coset_support = 0;
    }
    if (coset_support > pow2(static_cast<unsigned>(std::max(0, r - 2)))) {
        p.totally_ramified = true;
    } else {
        auto support = d.support(rank_cap);
        p.totally_ramified = span_rank(support) == r;
    }
    p.simple = false;
    return p;
}

namespace {

struct Moments {
    DivClass S;  // sum of D
    Int Q = 0;   // sum of D^2
    Int KS = 0;  // sum of K.D
    Int P = 0;   // sum over unordered pairs of D.D'
    bool P_enumerated = false;
};

Moments moments(const BuildingData& data, int rank_cap) {
    const BranchMap& d = data.D();
    const std::size_t n = d.n();
    const DivClass k = canonical_class(n);
    Moments m;
    m.S = DivClass(n);
    auto take = [&](const DivClass& value, const Int& multiplicity) {
        m.S += multiplicity * value;
        m.Q += multiplicity * intersect(value, value);
        m.KS += multiplicity * intersect(k, value);
    };
    Int coset_rest = d.uniform() ? pow2(static_cast<unsigned>(d.rank() - 1)) : Int(0);
    for (const auto& [sigma, value] : d.entries()) {
        if (d.uniform() && pairing(d.uniform()->psi, sigma)) {
            take(value + d.uniform()->base, 1);
            --coset_rest;
        } else {
            take(value, 1);
        }
    }
    if (d.uniform()) take(d.uniform()->base, coset_rest);

    if (d.support_size() <= kListableSupport && (!d.uniform() || d.rank() <= rank_cap)) {
        std::vector<DivClass> values;
        for (const auto& s : d.support(rank_cap)) values.push_back(d.at(s));
        for (std::size_t i = 0; i < values.size(); ++i)
            for (std::size_t j = i + 1; j < values.size(); ++j) m.P += intersect(values[i], values[j]);
        m.P_enumerated = true;
    } else {
        m.P = exact_div(intersect(m.S, m.S) - m.Q, 2);
    }
    return m;
}

Int checked_div(const Int& num, const Int& den, const char* what) {
    if (!divides(den, num)) throw ConsistencyError(std::string(what) + " is not an integer");
    return exact_div(num, den);
}

}  // namespace

InvariantReport invariants(const BuildingData& data, int rank_cap) {
    for (const auto& rho : data.residues())
        if (!rho.is_zero()) throw InvalidArgument("building data fail the basis equations");
    const int r = data.rank();
    const std::size_t n = data.D().n();
    const Int g = pow2(static_cast<unsigned>(r));
    const DivClass k = canonical_class(n);
    const Int k2 = intersect(k, k);
    const Moments m = moments(data, rank_cap);

    InvariantReport rep;
    // K_X^2 = g (K + S/2)^2
    const HalfClass kx = HalfClass(k) + HalfClass::from_twice(m.S);
    rep.K2 = checked_div(g * intersect_times4(kx, kx), 4, "K^2");
    // pi^*K.pi^*K + 2 pi^*K.sum R + (sum R)^2 with R.pi^*A = g D.A/2 and R.R' = g D.D'/4
    rep.K2_cross = g * k2 + g * m.KS + checked_div(g * (m.Q + 2 * m.P), 4, "ramification square");

    const bool enumerable = r <= rank_cap && r <= 62;
    if (enumerable) {
        Int sum = 0;
        Int rr = 0;
        data.group().for_each_character(
            [&](const GCharacter& chi) {
                const DivClass l = L_of(data, chi);
                sum += intersect(l, l + k);
                rr += rr_chi(-l);
            },
            rank_cap);
        rep.chi = g + checked_div(sum, 2, "chi");
        rep.chi_route = "exhaustive";
        rep.chi_cross = rr;
        rep.chi_cross_route = "riemann-roch";
    } else {
        // Sum over chi of T_chi is 2^(r-1) S and of T_chi^2 is 2^(r-2)(S^2 + Q).
        const Int s2 = intersect(m.S, m.S);
        rep.chi = checked_div(g * (32 + s2 + m.Q + 4 * m.KS), 32, "chi");
        rep.chi_route = "moments";
    }
    // Noether: 12 chi = K^2 + e, e(X) = g e(Y) - (g/2) sum e(D) + (g/4) #(D.D'), e(D) = -D.(D+K).
    const Int four_e = 4 * g * (4 + static_cast<long long>(n)) + 2 * g * (m.Q + m.KS) + g * m.P;
    const Int noether = checked_div(4 * rep.K2_cross + four_e, 48, "Noether chi");
    if (!enumerable) {
        rep.chi_cross = noether;
        rep.chi_cross_route = "noether";
    }
    rep.consistent = rep.K2 == rep.K2_cross && rep.chi == rep.chi_cross && rep.chi == noether;
    if (!rep.consistent)
        throw ConsistencyError("invariant routes disagree: K2 " + rep.K2.str() + " vs " + rep.K2_cross.str() +
                               ", chi " + rep.chi.str() + " vs " + rep.chi_cross.str() + " vs " + noether.str());
    return rep;
}

// ---------------------------------------------------------------------------
// Vanishing obligations

bool ClassBox::all_comb_ample() const {
    Int bound = 0;
    for (std::size_t i = 0; i < lo.a.size(); ++i) {
        if (lo.a[i] < 2) return false;
        bound += hi.a[i] + 1;
    }
    return lo.r > bound && lo.s > bound;
}

std::vector<CharacterFamily> character_families(const BuildingData& data) {
    const BranchMap& d = data.D();
    const std::size_t n = d.n();
    const std::size_t coords = n + 2;
    const int r = data.rank();
    const auto rho = data.residues();
    std::vector<CharacterFamily> out;

    std::optional<GCharacter> exact;
    if (d.uniform()) {
        exact = d.uniform()->psi;
        const DivClass l = L_of(data, *exact);
        out.push_back({"chi = psi", exact, {l, l}});
    }
    if (d.uniform() && r < 2) return out;

    // 2 L(chi) = T(chi) + sum over the dual expansion of the residues.
    DivClass lo2(n), hi2(n);
    if (d.uniform()) {
        lo2 = pow2(static_cast<unsigned>(r - 2)) * d.uniform()->base;
        hi2 = lo2;
    }
    auto widen = [&](const DivClass& c) {
        for (std::size_t kk = 0; kk < coords; ++kk) {
            const Int& v = coord(c, kk);
            if (v < 0) coord(lo2, kk) += v;
            if (v > 0) coord(hi2, kk) += v;
        }
    };
    for (const auto& [sigma, value] : d.entries()) widen(value);
    for (const auto& rj : rho) widen(rj);
    ClassBox box{DivClass(n), DivClass(n)};
    for (std::size_t kk = 0; kk < coords; ++kk) {
        coord(box.lo, kk) = floor_div(coord(lo2, kk), 2);
        coord(box.hi, kk) = ceil_div(coord(hi2, kk), 2);
    }
    out.push_back({d.uniform() ? "chi != 0, psi" : "chi != 0", std::nullopt, std::move(box)});
    return out;
}

VanishingReport check_vanishing(const BuildingData& data, const VerifyOptions& opts) {
    VanishingReport rep;
    const BranchMap& d = data.D();
    auto record = [&](Obligation ob) {
        ++rep.obligations_checked;
        if (ob.passed) return;
        ++rep.obligations_failed;
        (ob.kind == "L" ? rep.l_ample : rep.l_minus_d_ample) = false;
        if (rep.failures.size() < opts.failure_cap) rep.failures.push_back(std::move(ob));
    };

    if (opts.mode == VerifyMode::exhaustive) {
        rep.mode = VerifyMode::exhaustive;
        const GroupF2 g = data.group();
        g.require_enumerable(opts.rank_cap);
        std::vector<std::pair<GVector, DivClass>> support;
        for (const auto& s : d.support(opts.rank_cap)) support.emplace_back(s, d.at(s));
        g.for_each_character(
            [&](const GCharacter& chi) {
                if (chi.is_zero()) return;
                const DivClass l = L_of(data, chi);
                record({"L", chi, std::nullopt, l, is_comb_ample(l)});
                for (const auto& [sigma, value] : support) {
                    if (pairing(chi, sigma)) continue;
                    DivClass diff = l - value;
                    const bool ok = is_comb_ample(diff);
                    record({"L-D", chi, sigma, std::move(diff), ok});
                }
            },
            opts.rank_cap);
        return rep;
    }

    rep.mode = VerifyMode::bounded;
    std::vector<DivClass> nonzero_values;
    for (const auto& v : d.distinct_values())
        if (!v.is_zero()) nonzero_values.push_back(v);
    for (const auto& fam : character_families(data)) {
        const bool l_ok = fam.box.all_comb_ample();
        const GCharacter tag = fam.exact.value_or(GCharacter(data.rank()));
        record({"L", tag, std::nullopt, fam.box.lo, l_ok});
        std::vector<DivClass> values;
        if (fam.exact) {
            // Only sigma with chi(sigma) = 0 matter; those avoid the uniform coset.
            std::set<DivClass> on_kernel;
            for (const auto& [sigma, value] : d.entries())
                if (!pairing(*fam.exact, sigma)) on_kernel.insert(value);
            values.assign(on_kernel.begin(), on_kernel.end());
        } else {
            values = nonzero_values;
        }
        bool all_ok = true;
        for (const auto& v : values) {
            ClassBox shifted{fam.box.lo - v, fam.box.hi - v};
            const bool ok = shifted.all_comb_ample();
            all_ok = all_ok && ok;
            record({"L-D", tag, std::nullopt, shifted.lo, ok});
        }
        rep.families.push_back(fam.name + ": L box " + fam.box.lo.to_string() + ".." + fam.box.hi.to_string() + ", " +
                               std::to_string(values.size()) + " branch values, " +
                               (l_ok && all_ok ? "pass" : "fail"));
    }
    return rep;
}

}  // namespace tequiv
