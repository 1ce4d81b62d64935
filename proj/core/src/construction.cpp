#include "tequiv/construction.hpp"

#include <algorithm>
#include <set>

#include "tequiv/parallel.hpp"

namespace tequiv {

namespace {

std::string factor_text(const FactorParams& f) {
    return "(" + std::to_string(f.a) + "," + std::to_string(f.b) + "," + std::to_string(f.n) + ")";
}

// Margin of a box of classes: every member is comb ample iff this is >= 0.
Int box_margin(const DivClass& lo, const DivClass& hi) {
    Int sum = 0;
    std::optional<Int> m;
    auto take = [&](const Int& v) {
        if (!m || v < *m) m = v;
    };
    for (std::size_t i = 0; i < lo.a.size(); ++i) {
        take(lo.a[i] - 2);
        sum += hi.a[i] + 1;
    }
    take(lo.r - sum - 1);
    take(lo.s - sum - 1);
    return *m;
}

enum class Role { none, alpha, eps, fibre1, fibre2 };

struct Classified {
    Role role = Role::none;
    std::size_t block = 0;
    int index = 0;
};

// Which prescribed element of G' sigma is, if any.
Classified classify(const GroupLayout& layout, const GVector& sigma) {
    const int w = sigma.weight();
    if (w == 0 || w > 2) return {};
    const int lead = sigma.leading_index();
    for (std::size_t i = 0; i < layout.blocks.size(); ++i) {
        const auto& b = layout.blocks[i];
        if ((w == 1 && (lead == b.alpha1 || lead == b.alpha2)) || (w == 2 && lead == b.alpha1 && sigma.get(b.alpha2)))
            return {Role::alpha, i, 0};
        if (w == 1 && lead >= b.eps_begin && lead < b.eps_begin + b.n) return {Role::eps, i, lead - b.eps_begin};
    }
    if (w == 1 && (lead == layout.tau1 || lead == layout.tau2)) return {Role::fibre1, 0, 0};
    if (w == 1 && (lead == layout.eta1 || lead == layout.eta2)) return {Role::fibre2, 0, 0};
    return {};
}

void note_margin(AmpleCheck& c, const Int& m) {
    if (!c.min_margin || m < *c.min_margin) c.min_margin = m;
}

void note_failure(AmpleCheck& c, std::string what, std::size_t cap) {
    ++c.failed;
    c.passed = false;
    if (c.failures.size() < cap) c.failures.push_back(std::move(what));
}

}  // namespace

// ---------------------------------------------------------------------------
// Input and layout

void validate(const ConstructionInput& in) {
    if (in.k < 1) throw InvalidArgument("k must be at least 1");
    if (static_cast<int>(in.factors.size()) != in.k)
        throw InvalidArgument("expected " + std::to_string(in.k) + " factors, got " +
                              std::to_string(in.factors.size()));
    for (std::size_t i = 0; i < in.factors.size(); ++i) {
        const auto& f = in.factors[i];
        if (f.a < 3 || f.b < 3) throw InvalidArgument("factor " + factor_text(f) + ": a and b must be at least 3");
        if (f.a == f.b) throw InvalidArgument("factor " + factor_text(f) + ": a and b must differ");
        if (f.n < 0 || f.n > 2 * f.a * f.b)
            throw InvalidArgument("factor " + factor_text(f) + ": n must lie in [0, 2ab]");
        if (i > 0 && f.n <= in.factors[i - 1].n) throw InvalidArgument("the n_i must be strictly increasing");
        if (f.bn_split) {
            const auto ok = brill_noether_split(f.a, f.b, f.n);
            if (std::find(ok.begin(), ok.end(), *f.bn_split) == ok.end())
                throw InvalidArgument("factor " + factor_text(f) + ": (l, c) = (" + std::to_string(f.bn_split->l) +
                                      ", " + std::to_string(f.bn_split->c) + ") is not a valid split");
        }
    }
    if (in.multiplier < 1) throw InvalidArgument("the multiplier must be at least 1");
    if (in.multiplier > in.m_cap) throw InvalidArgument("the multiplier exceeds its cap");
    if (in.mode != VerifyMode::exhaustive && in.mode != VerifyMode::bounded)
        throw InvalidArgument("construction mode must be exhaustive or bounded");
}

GVector GroupLayout::alpha(int i, int j) const {
    if (i < 1 || i > static_cast<int>(blocks.size()) || j < 1 || j > 3) throw InvalidArgument("no such alpha");
    const Block& b = blocks[i - 1];
    GVector v(rank);
    if (j != 2) v.set(b.alpha1);
    if (j != 1) v.set(b.alpha2);
    return v;
}

GVector GroupLayout::epsilon(int i, int j) const {
    if (i < 1 || i > static_cast<int>(blocks.size())) throw InvalidArgument("no such factor");
    const Block& b = blocks[i - 1];
    if (j < 1 || j > b.n) throw InvalidArgument("no such epsilon");
    return unit(b.eps_begin + j - 1);
}

GCharacter GroupLayout::psi() const { return GCharacter::unit(rank, zeta); }

GroupLayout build_group(const std::vector<FactorParams>& factors) {
    GroupLayout g;
    int next = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string tag = std::to_string(i + 1);
        GroupLayout::Block b;
        b.alpha1 = next++;
        b.alpha2 = next++;
        g.names.push_back("alpha^" + tag + "_1");
        g.names.push_back("alpha^" + tag + "_2");
        b.eps_begin = next;
        b.n = static_cast<int>(factors[i].n);
        b.exc_begin = g.exceptional_count;
        for (int j = 0; j < b.n; ++j) g.names.push_back("eps^" + tag + "_" + std::to_string(j + 1));
        next += b.n;
        g.exceptional_count += static_cast<std::size_t>(b.n);
        g.blocks.push_back(b);
    }
    g.tau1 = next++;
    g.tau2 = next++;
    g.eta1 = next++;
    g.eta2 = next++;
    g.zeta = next++;
    for (const char* s : {"tau_1", "tau_2", "eta_1", "eta_2", "zeta"}) g.names.emplace_back(s);
    g.rank = next;
    if (g.rank > kMaxRank) throw InvalidArgument("group rank " + std::to_string(g.rank) + " exceeds 256");
    return g;
}

// ---------------------------------------------------------------------------
// Branch divisors

DivClass base_class(std::size_t exceptional_count) {
    const Int side = 4 * Int(static_cast<long long>(exceptional_count)) + 2;
    return DivClass(side, side, std::vector<Int>(exceptional_count, Int(2)));
}

DivClass prescribed_class(const GroupLayout& layout, const std::vector<FactorParams>& factors,
                          const GVector& sigma) {
    if (sigma.rank() != layout.rank) throw InvalidArgument("element of the wrong rank");
    if (!layout.in_g_prime(sigma)) throw InvalidArgument("prescribed classes only cover G'");
    const BlownQuadricLattice lat(layout.exceptional_count);
    const Classified c = classify(layout, sigma);
    switch (c.role) {
        case Role::alpha: {
            const auto& b = layout.blocks[c.block];
            DivClass out = lat.zero();
            out.r = factors.at(c.block).a;
            out.s = factors.at(c.block).b;
            for (int j = 0; j < b.n; ++j) out.a[b.exc_begin + j] = 1;
            return out;
        }
        case Role::eps: return lat.exceptional(layout.blocks[c.block].exc_begin + static_cast<std::size_t>(c.index));
        case Role::fibre1: return lat.fibre1();
        case Role::fibre2: return lat.fibre2();
        case Role::none: break;
    }
    return lat.zero();
}

BranchMap assign_branch_divisors(const GroupLayout& layout, const std::vector<FactorParams>& factors, const Int& m) {
    if (m < 1) throw InvalidArgument("the multiplier must be at least 1");
    if (factors.size() != layout.blocks.size()) throw InvalidArgument("layout and factors disagree");
    const BlownQuadricLattice lat(layout.exceptional_count);
    BranchMap d(layout.rank, layout.exceptional_count);

    for (std::size_t i = 0; i < layout.blocks.size(); ++i) {
        const int fi = static_cast<int>(i) + 1;
        for (int j = 1; j <= 3; ++j) {
            const GVector s = layout.alpha(fi, j);
            d.set(s, prescribed_class(layout, factors, s));
        }
        for (int j = 1; j <= layout.blocks[i].n; ++j) {
            const GVector s = layout.epsilon(fi, j);
            d.set(s, prescribed_class(layout, factors, s));
        }
    }
    for (int t : {layout.tau1, layout.tau2, layout.eta1, layout.eta2})
        d.set(layout.unit(t), prescribed_class(layout, factors, layout.unit(t)));

    d.set_uniform(layout.psi(), m * base_class(layout.exceptional_count));

    // Parity: the odd prescribed classes sit on eps, tau and eta. Each gets a
    // partner at zeta + e with the same parity, chosen to raise ampleness.
    const GVector zeta = layout.unit(layout.zeta);
    for (const auto& b : layout.blocks)
        for (int j = 0; j < b.n; ++j)
            d.set(zeta + layout.unit(b.eps_begin + j), -lat.exceptional(b.exc_begin + static_cast<std::size_t>(j)));
    for (int t : {layout.tau1, layout.tau2}) d.set(zeta + layout.unit(t), lat.fibre1());
    for (int t : {layout.eta1, layout.eta2}) d.set(zeta + layout.unit(t), lat.fibre2());
    // The zeta branch sum now has every exceptional coordinate odd.
    DivClass fix = lat.zero();
    for (auto& x : fix.a) x = 1;
    d.set(zeta, std::move(fix));
    return d;
}

// ---------------------------------------------------------------------------
// Ampleness checks

Int comb_ample_margin(const DivClass& c) { return box_margin(c, c); }

AmpleCheck check_l_minus_d(const BuildingData& data, const VerifyOptions& opts) {
    AmpleCheck rep;
    const int r = data.rank();
    const Int g = pow2(static_cast<unsigned>(r));
    rep.covered = (g - 1) * g;

    if (opts.mode == VerifyMode::exhaustive) {
        rep.mode = VerifyMode::exhaustive;
        const GroupF2 grp = data.group();
        grp.require_enumerable(opts.rank_cap);
        std::set<DivClass> distinct;
        grp.for_each_element([&](const GVector& s) { distinct.insert(data.D().at(s)); }, opts.rank_cap);
        const std::vector<DivClass> values(distinct.begin(), distinct.end());
        const std::uint64_t count = std::uint64_t{1} << r;

        struct Chunk {
            std::optional<Int> min_margin;
            std::uint64_t failed = 0;
            std::vector<std::string> failures;
        };
        std::vector<Chunk> chunks(kDefaultChunks);
        parallel_chunks(count, kDefaultChunks, opts.parallel, [&](std::size_t c, std::size_t b, std::size_t e) {
            auto& out = chunks[c];
            for (std::size_t i = std::max<std::size_t>(b, 1); i < e; ++i) {
                const auto chi = GCharacter::from_index(r, i);
                const DivClass l = L_of(data, chi);
                for (const auto& v : values) {
                    const Int m = comb_ample_margin(l - v);
                    if (!out.min_margin || m < *out.min_margin) out.min_margin = m;
                    if (m < 0) {
                        ++out.failed;
                        if (out.failures.size() < opts.failure_cap)
                            out.failures.push_back("chi " + chi.to_string() + ", D " + v.to_string());
                    }
                }
            }
        });
        rep.classes_checked = Int(count - 1) * Int(static_cast<long long>(values.size()));
        for (auto& c : chunks) {
            if (c.min_margin) note_margin(rep, *c.min_margin);
            rep.failed += c.failed;
            for (auto& f : c.failures)
                if (rep.failures.size() < opts.failure_cap) rep.failures.push_back(std::move(f));
        }
        rep.passed = rep.failed == 0;
        return rep;
    }

    rep.mode = VerifyMode::bounded;
    const auto values = data.D().distinct_values();
    for (const auto& fam : character_families(data)) {
        for (const auto& v : values) {
            ++rep.classes_checked;
            const Int m = box_margin(fam.box.lo - v, fam.box.hi - v);
            note_margin(rep, m);
            if (m < 0) note_failure(rep, fam.name + ", D " + v.to_string(), opts.failure_cap);
        }
    }
    return rep;
}

AmpleCheck check_coset_ample(const BuildingData& data, const GCharacter& psi, const VerifyOptions& opts) {
    AmpleCheck rep;
    const BranchMap& d = data.D();
    const int r = data.rank();
    if (psi.rank() != r) throw InvalidArgument("character of the wrong rank");
    if (psi.is_zero()) throw InvalidArgument("the coset character must be nonzero");
    rep.covered = pow2(static_cast<unsigned>(r - 1));

    auto test = [&](const DivClass& c, const std::string& where) {
        ++rep.classes_checked;
        const Int m = comb_ample_margin(c);
        note_margin(rep, m);
        if (m < 0) note_failure(rep, where + ": " + c.to_string(), opts.failure_cap);
    };

    if (opts.mode == VerifyMode::exhaustive) {
        rep.mode = VerifyMode::exhaustive;
        data.group().for_each_element(
            [&](const GVector& s) {
                if (pairing(psi, s)) test(d.at(s), "sigma " + s.to_string());
            },
            opts.rank_cap);
        return rep;
    }

    rep.mode = VerifyMode::bounded;
    std::set<DivClass> values;
    Int on_coset = 0;
    for (const auto& [sigma, value] : d.entries()) {
        if (!pairing(psi, sigma)) continue;
        ++on_coset;
        values.insert(d.at(sigma));
    }
    if (on_coset < rep.covered) {
        // some coset element carries no explicit entry
        const bool shared = d.uniform() && d.uniform()->psi == psi;
        if (shared || !d.uniform())
            values.insert(shared ? d.uniform()->base : DivClass(d.n()));
        else
            throw InvalidArgument("bounded coset check needs the uniform part on the same coset");
    }
    for (const auto& v : values) test(v, "value");
    return rep;
}

PrescriptionCheck check_prescription(const BuildingData& data, const GroupLayout& layout,
                                     const std::vector<FactorParams>& factors, const VerifyOptions& opts) {
    PrescriptionCheck rep;
    const BranchMap& d = data.D();
    if (d.rank() != layout.rank || d.n() != layout.exceptional_count)
        throw InvalidArgument("data and layout have different shapes");

    auto compare = [&](const GVector& s) {
        ++rep.elements_checked;
        const DivClass want = prescribed_class(layout, factors, s);
        const DivClass got = d.at(s);
        if (want == got) return;
        switch (classify(layout, s).role) {
            case Role::alpha: rep.alpha_ok = false; break;
            case Role::none: rep.zero_elsewhere_ok = false; break;
            default: rep.eps_fibre_ok = false; break;
        }
        if (rep.mismatches.size() < opts.failure_cap)
            rep.mismatches.push_back("sigma " + s.to_string() + ": want " + want.to_string() + ", got " +
                                     got.to_string());
    };

    if (opts.mode == VerifyMode::exhaustive) {
        data.group().for_each_element(
            [&](const GVector& s) {
                if (layout.in_g_prime(s)) compare(s);
            },
            opts.rank_cap);
        return rep;
    }

    // On G' the map is its explicit entries when the uniform part lives off G'.
    if (d.uniform() && d.uniform()->psi != layout.psi() && !d.uniform()->base.is_zero()) {
        rep.zero_elsewhere_ok = false;
        rep.mismatches.push_back("uniform part is not supported on G - G'");
    }
    std::set<GVector> seen;
    for (const auto& [sigma, value] : d.entries())
        if (layout.in_g_prime(sigma)) {
            compare(sigma);
            seen.insert(sigma);
        }
    std::vector<GVector> named;
    for (std::size_t i = 0; i < layout.blocks.size(); ++i) {
        const int fi = static_cast<int>(i) + 1;
        for (int j = 1; j <= 3; ++j) named.push_back(layout.alpha(fi, j));
        for (int j = 1; j <= layout.blocks[i].n; ++j) named.push_back(layout.epsilon(fi, j));
    }
    for (int t : {layout.tau1, layout.tau2, layout.eta1, layout.eta2}) named.push_back(layout.unit(t));
    for (const auto& s : named)
        if (!seen.count(s)) compare(s);
    return rep;
}

// ---------------------------------------------------------------------------
// Moduli bookkeeping

std::vector<BnSplit> brill_noether_split(std::int64_t a, std::int64_t b, std::int64_t n) {
    std::vector<BnSplit> out;
    if (a <= 0 || b % a != 0) return out;
    const std::int64_t l = b / a;
    if (l < 2) return out;
    for (std::int64_t c = 1; 2 * c < a; ++c)
        if (l * a * (2 * a - c) == n) out.push_back({l, c});
    return out;
}

std::int64_t n_of(std::int64_t a, std::int64_t b, std::int64_t c) { return b * (2 * a - c); }

std::int64_t moduli_dim(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t k, std::int64_t n) {
    if (k < 1) throw InvalidArgument("moduli_dim needs k >= 1");
    if (c < 0 || n < 0) throw InvalidArgument("moduli_dim needs c, n >= 0");
    return n + 2 * (a + b) - 1 + (k - 1) * (c + 1);
}

std::int64_t h1_theta(std::int64_t n) {
    if (n < 3) throw InvalidArgument("h1_theta needs n >= 3");
    return 2 * n - 6;
}

std::int64_t h1_theta(std::int64_t n, std::int64_t a, std::int64_t b) {
    if (n <= 2 * std::max(a, b))
        throw InvalidArgument("h1_theta needs n > max(2a, 2b): the points must meet three fibres of each ruling");
    return h1_theta(n);
}

std::int64_t curve_genus(std::int64_t a, std::int64_t b) { return (a - 1) * (b - 1); }

std::int64_t h0_curve(std::int64_t a, std::int64_t b, std::int64_t c) { return b * (a - c) + a + b; }

FactorModuli factor_moduli(const FactorParams& f) {
    FactorModuli m;
    m.params = f;
    m.genus = curve_genus(f.a, f.b);
    if (f.n > 2 * std::max(f.a, f.b)) m.h1_theta = h1_theta(f.n, f.a, f.b);
    if (f.bn_split) {
        m.split = f.bn_split;
    } else {
        const auto s = brill_noether_split(f.a, f.b, f.n);
        if (!s.empty()) m.split = s.front();
    }
    if (m.split) {
        const std::int64_t c = m.split->c, lc = m.split->l * m.split->c;
        // three curves per configuration
        m.families.push_back({f.a - c, f.b, c, moduli_dim(f.a, f.b, c, 3, f.n), h0_curve(f.a, f.b, c)});
        m.families.push_back({f.a, f.b - lc, lc, moduli_dim(f.b, f.a, lc, 3, f.n), h0_curve(f.b, f.a, lc)});
    }
    return m;
}

// ---------------------------------------------------------------------------
// Certification

bool Certificate::passed() const {
    return cover.passed && (!cover_sampled || cover_sampled->passed) && l_minus_d.passed &&
           prescription.passed() && coset_ample.passed && vanishing.passed() && monotone_in_m && invariants.consistent;
}

Certificate certify(const ConstructionInput& in) {
    validate(in);
    Certificate cert;
    cert.input = in;
    cert.layout = build_group(in.factors);
    const GroupLayout& layout = cert.layout;

    VerifyOptions opts;
    opts.mode = in.mode;
    opts.rank_cap = in.rank_cap;
    opts.seed = in.seed;
    opts.parallel = in.parallel;
    opts.failure_cap = 16;
    if (in.mode == VerifyMode::exhaustive) GroupF2(layout.rank).require_enumerable(in.rank_cap);

    const std::vector<GVector> basis = GroupF2(layout.rank).standard_basis();
    Int m = in.multiplier;
    for (;;) {
        ++cert.attempts;
        cert.data = solve(assign_branch_divisors(layout, in.factors, m), basis);
        cert.l_minus_d = check_l_minus_d(cert.data, opts);
        cert.coset_ample = check_coset_ample(cert.data, layout.psi(), opts);
        if (cert.l_minus_d.passed && cert.coset_ample.passed) break;
        m *= 2;
        if (m > in.m_cap)
            throw SearchCapExceeded("ampleness conditions still fail below the multiplier cap " + in.m_cap.str());
    }
    cert.multiplier_used = m;
    const BuildingData& data = cert.data;

    cert.cover = verify_all(data, opts);
    if (in.mode == VerifyMode::bounded) {
        VerifyOptions sampled = opts;
        sampled.mode = VerifyMode::sampled;
        sampled.random_pairs = 256;
        cert.cover_sampled = verify_all(data, sampled);
    }
    cert.prescription = check_prescription(data, layout, in.factors, opts);
    cert.vanishing = check_vanishing(data, opts);
    if (cert.l_minus_d.passed && !cert.vanishing.passed())
        throw ConsistencyError("L - D ampleness holds but the deformation obligations fail");

    // Margins are affine in M: L(chi) carries N(chi)/2 copies of M*A and
    // D(sigma) one copy on the coset, N(chi) = #{psi = chi = 1}.
    const DivClass a = base_class(layout.exceptional_count);
    Int sum_a = 0;
    for (const auto& x : a.a) sum_a += x;
    const bool base_ok = a.r - sum_a >= 0 && a.s - sum_a >= 0 &&
                         std::all_of(a.a.begin(), a.a.end(), [](const Int& x) { return x >= 0; });
    std::optional<Int> min_slope;
    auto slope_for = [&](const GCharacter& chi) {
        const GCharacter phis[] = {chi};
        const Int n_chi = data.D().uniform_count(phis);
        const Int slope = n_chi / 2 - 1;  // worst case: sigma on the coset
        if (!min_slope || slope < *min_slope) min_slope = slope;
    };
    if (in.mode == VerifyMode::exhaustive) {
        data.group().for_each_character(
            [&](const GCharacter& chi) {
                if (!chi.is_zero()) slope_for(chi);
            },
            in.rank_cap);
    } else {
        slope_for(layout.psi());
        if (layout.rank >= 2) {
            GCharacter other = GCharacter::unit(layout.rank, 0);
            slope_for(other);
        }
    }
    cert.min_slope = min_slope.value_or(0);
    cert.monotone_in_m = base_ok && cert.min_slope >= 0;

    cert.invariants = invariants(data, in.rank_cap);

    bool all_split = true;
    for (const auto& f : in.factors) {
        cert.moduli.push_back(factor_moduli(f));
        all_split = all_split && cert.moduli.back().split.has_value();
    }
    if (all_split) cert.component_lower_bound = pow2(static_cast<unsigned>(in.k));
    cert.diffeomorphic_family = cert.passed();
    return cert;
}

}  // namespace tequiv
