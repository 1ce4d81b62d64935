// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sing_oracles.hpp"
#include "tequiv/construction.hpp"
#include "tequiv/io/json_io.hpp"
#include "tequiv/lens_topology.hpp"
#include "tequiv/quotient_sings.hpp"
#include "tequiv/rdp_actions.hpp"

using namespace tequiv;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
class Tally {
public:
    void check(bool cond, const std::string& what) {
        ++checks_;
        if (cond) return;
        ++failed_;
        if (failed_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
    Outcome done(const std::string& summary) const {
        if (failed_ == 0) return {true, summary + ", " + std::to_string(checks_) + " checks"};
        return {false, std::to_string(failed_) + "/" + std::to_string(checks_) + " failed: " + notes_};
    }

private:
    std::size_t checks_ = 0;
    std::size_t failed_ = 0;
    std::string notes_;
};

std::string n_str(std::int64_t n) { return "n=" + std::to_string(n); }

std::int64_t mod(std::int64_t x, std::int64_t m) { return ((x % m) + m) % m; }

// Extended Euclid, kept apart from the library's inverse.
std::int64_t inverse_euclid(std::int64_t q, std::int64_t p) {
    std::int64_t r0 = p, r1 = mod(q, p), s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t t = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - t * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - t * s1);
    }
    return r0 == 1 ? mod(s0, p) : 0;
}

std::int64_t chain_product(const std::vector<std::int64_t>& b, const std::vector<std::int64_t>& z) {
    // Z^2 on a chain with self-intersections -b_i.
    std::int64_t v = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        v -= b[i] * z[i] * z[i];
        if (i + 1 < b.size()) v += 2 * z[i] * z[i + 1];
    }
    return v;
}

// ---------------------------------------------------------------------------

Outcome hj_families() {
    Tally t;
    for (std::int64_t n = 1; n <= 50; ++n) {
        std::vector<std::int64_t> b(n, 2);
        b.back() = 3;
        t.check(hj(CyclicSing(2 * n + 1, 2 * n - 1)).b == b, "B " + n_str(n));

        std::vector<std::int64_t> y;
        if (n == 1) {
            y = {4};
        } else {
            y.assign(n, 2);
            y.front() = y.back() = 3;
        }
        t.check(hj(CyclicSing(4 * n, 2 * n - 1)).b == y, "Y " + n_str(n));
        t.check(oracle::continued_fraction(y) == std::make_pair(4 * n, 2 * n - 1), "Y fraction " + n_str(n));
    }
    return t.done("n <= 50");
}

Outcome fundamental_cycles() {
    Tally t;
    auto run = [&](const std::vector<std::int64_t>& b, std::int64_t want, const std::string& what) {
        const auto z = fundamental_cycle(ResolutionGraph::chain(HJChain{b}));
        t.check(z.self_intersection == want, what + " Z^2 = " + std::to_string(z.self_intersection));
        // Z >= sum E_i always; when the all-ones cycle is already anti-nef it is the minimum.
        const std::vector<std::int64_t> ones(b.size(), 1);
        t.check(z.coefficients == ones, what + " coefficients");
        t.check(chain_product(b, ones) == want, what + " direct product");
    };
    for (std::int64_t n = 1; n <= 50; ++n) {
        run(b_family(n).chain.b, -3, "B " + n_str(n));
        run(y_family_by_type(n).chain.b, -4, "Y " + n_str(n));
    }
    return t.done("n <= 50");
}

Outcome class_t() {
    Tally t;
    std::size_t pairs = 0;
    std::vector<char> mark;
    std::vector<std::int64_t> hit;
    for (std::int64_t p = 2; p <= 10000; ++p) {
        mark.assign(p, 0);
        hit.clear();
        for (std::int64_t n = 1; n * n <= p; ++n) {
            if (p % (n * n)) continue;
            const std::int64_t d = p / (n * n);
            for (std::int64_t a = 1; a <= p; ++a) {
                if (std::gcd(a, n) != 1) continue;
                const std::int64_t q = mod(d * n * a - 1, p);
                if (q != 0 && !mark[q]) {
                    mark[q] = 1;
                    hit.push_back(q);
                }
            }
        }
        for (auto q : hit)
            if (const auto qi = inverse_euclid(q, p)) mark[qi] = 1;
        for (std::int64_t q = 1; q < p; ++q) {
            if (std::gcd(p, q) != 1) continue;
            ++pairs;
            const auto w = class_t_witness(CyclicSing(p, q));
            if (w.has_value() != static_cast<bool>(mark[q])) {
                t.check(false, "witness existence at (" + std::to_string(p) + "," + std::to_string(q) + ")");
                continue;
            }
            if (!w) continue;
            const std::int64_t v = mod(w->d * w->n * w->a - 1, p);
            t.check(w->d * w->n * w->n == p && std::gcd(w->a, w->n) == 1 && (v == q || mod(v * q, p) == 1),
                    "witness validity at (" + std::to_string(p) + "," + std::to_string(q) + ")");
        }
    }
    std::size_t q2 = 0;
    for (std::int64_t d = 1; d <= 50; ++d)
        for (std::int64_t n = 1; n <= 20; ++n)
            for (std::int64_t a = 1; a <= n; ++a) {
                if (std::gcd(a, n) != 1) continue;
                ++q2;
                // direct evaluation with 128-bit arithmetic
                const __int128 m = static_cast<__int128>(d) * n * n;
                const __int128 x = static_cast<__int128>(d) * n * a - 1;
                const bool holds = (x * x) % m == 1 % m;
                t.check(q2_criterion(d, n, a) == (a == 1 && n <= 2) && holds == (a == 1 && n <= 2),
                        "q2 at d=" + std::to_string(d) + " n=" + std::to_string(n) + " a=" + std::to_string(a));
            }
    return t.done(std::to_string(pairs) + " pairs (p <= 10^4), " + std::to_string(q2) + " q2 triples");
}

Outcome embedding_obstructions() {
    Tally t;
    const auto vs = obstruction_verdicts(6);
    std::map<std::string, int> negatives;
    bool control_seen = false;
    for (const auto& v : vs) {
        t.check(v.agrees(), v.obstruction + " " + v.source);
        if (v.obstruction == "control") {
            control_seen = true;
            t.check(v.source == "A1" && v.ambient == AmbientModel::BlowupCxP1TwoPoints && v.result.embeds,
                    "control verdict");
            t.check(v.result.witness.has_value(), "control witness present");
            if (!v.result.witness) continue;
            const auto src = milnor_lattice(MilnorKind::A, 1).gram;
            const auto amb = ambient_gram(v.ambient);
            const auto& w = *v.result.witness;
            for (std::size_t i = 0; i < src.size(); ++i)
                for (std::size_t j = 0; j < src.size(); ++j) {
                    std::int64_t x = 0;
                    for (std::size_t a = 0; a < amb.size(); ++a)
                        for (std::size_t b = 0; b < amb.size(); ++b) x += w[i][a] * amb[a][b] * w[j][b];
                    t.check(x == src[i][j], "control witness Gram entry");
                }
        } else {
            t.check(!v.expected && !v.result.embeds, "negative verdict " + v.source);
            ++negatives[v.obstruction];
            if (v.obstruction == "affine_plane")
                t.check(v.ambient == AmbientModel::PlaneC2 && ambient_gram(v.ambient).empty(), "rank 0 ambient");
        }
    }
    t.check(control_seen, "control present");
    // A1..6, D4..6, E6..8, B1..6 / Y both components n <= 6 / A2..6
    t.check(negatives["one_point_blowup"] == 18, "one-point blow-up count");
    t.check(negatives["affine_plane"] == 12, "affine plane count");
    t.check(negatives["two_point_blowup"] == 5, "two-point blow-up count");
    return t.done(std::to_string(vs.size()) + " verdicts");
}

Outcome cover_algebra() {
    Tally t;
    std::mt19937_64 rng(20261016);
    std::vector<BuildingData> previous(7);
    for (int i = 0; i < 1000; ++i) {
        const int r = 1 + i % 6;
        const std::size_t n = rng() % 4;
        const auto d = oracle::random_branch(r, n, rng);
        const auto basis = GroupF2(r).standard_basis();
        const BuildingData data(d, basis, solve_basis_L(d, basis));
        t.check(verify_all(data).passed, "random data " + std::to_string(i));
        if (r <= 3) {
            const auto table = oracle::tabulate_D(d);
            t.check(oracle::cover_condition(r, table, oracle::extend_L(r, table, data.L_basis())),
                    "tabulated oracle " + std::to_string(i));
        }

        // group law: sums of solutions with the same n
        if (previous[r].rank() == r && previous[r].D().n() == n)
            t.check(verify_all(previous[r] + data).passed, "sum at " + std::to_string(i));
        previous[r] = data;

        // k-fold identity, k <= 5
        for (int k = 1; k <= 5; ++k) {
            std::vector<GCharacter> chis;
            GCharacter total(r);
            DivClass lhs(n);
            for (int j = 0; j < k; ++j) {
                chis.push_back(GCharacter::from_index(r, rng() % (std::uint64_t{1} << r)));
                total += chis.back();
                lhs += L_of(data, chis.back());
            }
            DivClass rhs = L_of(data, total);
            GroupF2(r).for_each_element([&](const GVector& s) {
                int hits = 0;
                for (const auto& c : chis) hits += pairing(c, s);
                rhs += Int(hits / 2) * data.D().at(s);
            });
            t.check(lhs == rhs, "k-fold k=" + std::to_string(k) + " at " + std::to_string(i));
        }
    }
    std::size_t subspaces = 0;
    for (int r = 1; r <= 6; ++r)
        for (const auto& h : oracle::all_subspaces(r)) {
            if (h.dim() == 0) continue;
            ++subspaces;
            t.check(verify_all(elementary_solution(h, DivClass::of(3, -2, {1, 2}))).passed,
                    "elementary solution r=" + std::to_string(r));
        }
    return t.done("1000 random data, " + std::to_string(subspaces) + " subspaces");
}

Outcome ample_extensions() {
    Tally t;
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> val(-6, 6);
    for (int i = 0; i < 100; ++i) {
        const int r = 4 + i % 2;
        const std::size_t n = rng() % 4;
        const GroupF2 g(r);
        // a proper subspace H from random generators, eta outside it
        std::vector<GVector> gens;
        const int want = static_cast<int>(rng() % r);
        for (int j = 0; j < want; ++j) gens.push_back(GVector::from_index(r, rng() % (std::uint64_t{1} << r)));
        const auto h = Subspace::span(r, gens);
        GVector eta(r);
        do eta = GVector::from_index(r, rng() % (std::uint64_t{1} << r));
        while (h.contains(eta));

        BranchMap dh(r, n);
        for (const auto& s : h.elements()) {
            if (s.is_zero() || rng() % 3 == 0) continue;
            DivClass c(n);
            c.r = val(rng);
            c.s = val(rng);
            for (auto& a : c.a) a = val(rng);
            dh.set(s, c);
        }
        DivClass w(n);
        w.r = 1 + rng() % 4;
        w.s = 1 + rng() % 4;
        const auto alpha = LinearFunctional::intersection_with(w);
        DivClass v(n);
        do {
            v.r = val(rng);
            v.s = val(rng);
            for (auto& a : v.a) a = val(rng);
        } while (alpha(v) <= 0);
        const Int bound = rng() % 60;

        const auto res = ample_extension(r, h, dh, eta, v, alpha, bound);
        const std::string tag = " at instance " + std::to_string(i);
        t.check(verify_all(res.data).passed, "cover condition" + tag);
        Int lmin = 0, dmin = 0;
        bool first_l = true, first_d = true;
        g.for_each_character([&](const GCharacter& chi) {
            if (chi.is_zero()) return;
            const DivClass l = L_of(res.data, chi);
            g.for_each_element([&](const GVector& s) {
                const Int x = alpha(l - res.data.D().at(s));
                if (first_l || x < lmin) lmin = x, first_l = false;
            });
        });
        g.for_each_element([&](const GVector& s) {
            if (h.contains(s)) {
                t.check(res.data.D().at(s) == dh.at(s), "D on H kept" + tag);
                return;
            }
            const Int x = alpha(res.data.D().at(s));
            if (first_d || x < dmin) dmin = x, first_d = false;
        });
        t.check(lmin >= bound, "alpha(L - D) >= N" + tag);
        t.check(dmin >= bound, "alpha(D) >= N off H" + tag);
        t.check(lmin == res.min_l_minus_d && dmin == res.min_d_outside, "reported minima" + tag);
    }
    return t.done("100 instances, r in {4,5}");
}

Outcome invariants_dual_path() {
    Tally t;
    std::mt19937_64 rng(18);
    for (int i = 0; i < 200; ++i) {
        const int r = 1 + static_cast<int>(rng() % 5);
        const std::size_t n = rng() % 13;
        const auto d = oracle::random_branch(r, n, rng, 3);
        const auto data = solve(d);
        const auto inv = invariants(data);
        const std::string tag = " at " + std::to_string(i);
        t.check(inv.consistent && inv.K2 == inv.K2_cross && inv.chi == inv.chi_cross, "routes" + tag);
        // moments and Noether when enumeration is switched off
        const auto alt = invariants(data, 0);
        t.check(alt.chi_route == "moments" && alt.chi == inv.chi && alt.K2 == inv.K2, "moment route" + tag);

        // independent tabulated values
        const auto table = oracle::tabulate_D(d);
        const auto L = oracle::extend_L(r, table, data.L_basis());
        DivClass k(n);
        k.r = -2;
        k.s = -2;
        for (auto& a : k.a) a = -1;
        DivClass twice = Int(2) * k;
        for (const auto& x : table) twice += x;
        Int sum = 0;
        for (const auto& l : L) sum += oracle::dot(l, l + k);
        t.check(inv.K2 * 4 == pow2(r) * oracle::dot(twice, twice), "tabulated K^2" + tag);
        t.check(inv.chi * 2 == 2 * pow2(r) + sum, "tabulated chi" + tag);
    }
    // three equal classes (3,3;1^6) on the nonzero elements of (Z/2)^2
    BranchMap d(2, 6);
    const DivClass c = DivClass::of(3, 3, {1, 1, 1, 1, 1, 1});
    for (const char* s : {"10", "01", "11"}) d.set(GVector::parse(s), c);
    const auto data = solve(d);
    t.check(verify_all(data).passed, "example cover condition");
    for (int cap : {kDefaultRankCap, 0}) {
        const auto inv = invariants(data, cap);
        t.check(inv.K2 == 44 && inv.K2_cross == 44, "example K^2 = " + inv.K2.str() + " (" + inv.chi_route + ")");
        t.check(inv.chi == 13 && inv.chi_cross == 13, "example chi = " + inv.chi.str() + " (" + inv.chi_route + ")");
    }
    return t.done("200 random data, example K^2 = 44, chi = 13");
}

Outcome bookkeeping() {
    Tally t;
    t.check(moduli_dim(5, 3, 2, 3, 24) == 45, "moduli_dim(5,3,2,3,24)");
    t.check(h1_theta(24) == 42, "h1_theta(24)");
    for (std::int64_t a = 1; a <= 20; ++a)
        for (std::int64_t b = 1; b <= 20; ++b)
            for (std::int64_t c = 0; c < 2 * a; ++c) t.check(n_of(a, b, c) == b * (2 * a - c), "n_of");
    t.check(brill_noether_split(3, 6, 30) == std::vector<BnSplit>{{2, 1}}, "brill_noether_split(3,6,30)");
    for (long long a = 0; a <= 20; ++a)
        for (long long b = 0; b <= 20; ++b) t.check(rr_chi(DivClass::of(a, b)) == (a + 1) * (b + 1), "rr_chi");
    return t.done("dim 45, h1 42, split [(2,1)]");
}

std::string certificate_text(const ConstructionInput& in) { return io::to_json(certify(in)).dump(2); }

Outcome certification() {
    Tally t;
    ConstructionInput toy;
    toy.k = 1;
    toy.factors = {{3, 4, 2, std::nullopt}};
    toy.mode = VerifyMode::exhaustive;
    toy.rank_cap = 20;
    const auto tc = certify(toy);
    t.check(tc.layout.rank <= 20, "toy rank " + std::to_string(tc.layout.rank));
    t.check(tc.cover.passed && tc.cover.mode == VerifyMode::exhaustive, "toy cover condition");
    t.check(tc.l_minus_d.passed && tc.prescription.passed() && tc.coset_ample.passed, "toy ampleness");
    t.check(tc.vanishing.passed() && tc.monotone_in_m, "toy vanishing and monotonicity");
    t.check(tc.passed(), "toy certificate");

    ConstructionInput split;
    split.k = 2;
    split.factors = {{3, 6, 30, std::nullopt}, {3, 9, 45, std::nullopt}};
    split.mode = VerifyMode::bounded;
    const auto sc = certify(split);
    t.check(sc.component_lower_bound && *sc.component_lower_bound == 4, "component_lower_bound");
    t.check(sc.vanishing.passed(), "split vanishing conditions");
    t.check(sc.passed(), "split certificate");

    const auto toy_a = certificate_text(toy), toy_b = certificate_text(toy);
    const auto split_a = certificate_text(split), split_b = certificate_text(split);
    t.check(toy_a == toy_b, "toy certificate bytes");
    t.check(split_a == split_b, "split certificate bytes");
    return t.done("toy rank " + std::to_string(tc.layout.rank) + ", split rank " + std::to_string(sc.layout.rank) +
                  " bound " + (sc.component_lower_bound ? sc.component_lower_bound->str() : "-"));
}

Outcome action_table() {
    Tally t;
    const auto rep = consistency_check();
    for (const auto& l : rep.lines) t.check(l.passed, "row " + std::to_string(l.row) + " " + l.check);
    t.check(rep.simple_rows == std::vector<int>{1, 6, 7, 8, 13}, "simple rows");
    t.check(rep.non_smoothable_rows == std::vector<int>{2, 4, 9, 10, 11}, "non-smoothable rows");
    for (const auto& r : table())
        if (r.simple) t.check(r.I_x_size == r.r, "simple implies |I_x| = r at row " + std::to_string(r.id));
    t.check(rep.passed(), "report");
    return t.done(std::to_string(rep.lines.size()) + " table checks");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"hj-families", hj_families},
        {"fundamental-cycles", fundamental_cycles},
        {"class-t", class_t},
        {"embedding-obstructions", embedding_obstructions},
        {"cover-algebra", cover_algebra},
        {"ample-extension", ample_extensions},
        {"invariants", invariants_dual_path},
        {"moduli-bookkeeping", bookkeeping},
        {"certification", certification},
        {"action-table", action_table},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << s << " s): "
             << o.detail;
        std::cout << line.str() << std::endl;
        failed += o.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
