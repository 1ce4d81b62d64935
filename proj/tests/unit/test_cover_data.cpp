#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "tequiv/cover_data.hpp"

using namespace tequiv;

namespace {

GVector V(const char* s) { return GVector::parse(s); }
GCharacter C(const char* s) { return GCharacter::parse(s); }

DivClass ones_class(long long a, long long b, std::size_t n) {
    DivClass c(n);
    c.r = a;
    c.s = b;
    for (auto& x : c.a) x = 1;
    return c;
}

// Three equal branch classes on the nonzero elements of (Z/2)^2.
BuildingData triple_cover(long long a, long long b, std::size_t n) {
    BranchMap d(2, n);
    const DivClass c = ones_class(a, b, n);
    d.set(V("10"), c);
    d.set(V("01"), c);
    d.set(V("11"), c);
    return BuildingData(d, GroupF2(2).standard_basis(), {c, c});
}

std::vector<GVector> random_basis(int r, std::mt19937_64& rng) {
    std::vector<GVector> basis;
    while (static_cast<int>(basis.size()) < r) {
        basis.push_back(GVector::from_index(r, rng() % (std::uint64_t{1} << r)));
        if (!is_independent(basis)) basis.pop_back();
    }
    return basis;
}

}  // namespace

TEST_CASE("L_of examples") {
    auto data = triple_cover(3, 3, 6);
    CHECK(L_of(data, C("00")).is_zero());
    CHECK(L_of(data, C("10")) == data.L_basis()[0]);
    CHECK(L_of(data, C("11")) == ones_class(3, 3, 6));
}

TEST_CASE("verify_pair examples") {
    auto data = triple_cover(3, 3, 6);
    CHECK(verify_pair(data, C("10"), C("00")).is_zero());
    CHECK(verify_pair(data, C("10"), C("01")).is_zero());
    CHECK(verify_all(data).passed);

    BranchMap tampered = data.D();
    tampered.set(V("11"), ones_class(5, 3, 6));
    BuildingData bad(tampered, data.basis(), data.L_basis());
    bool any = false;
    GroupF2(2).for_each_character([&](const GCharacter& x) {
        GroupF2(2).for_each_character([&](const GCharacter& y) { any = any || !verify_pair(bad, x, y).is_zero(); });
    });
    CHECK(any);
    CHECK_FALSE(verify_all(bad).passed);
}

TEST_CASE("verify_all on zero data and rank cap") {
    BuildingData zero(BranchMap(3, 2), GroupF2(3).standard_basis(), std::vector<DivClass>(3, DivClass(2)));
    auto rep = verify_all(zero);
    CHECK(rep.passed);
    CHECK(rep.pairs_checked == 8 * 9 / 2);
    BuildingData big(BranchMap(30, 0), GroupF2(30).standard_basis(), std::vector<DivClass>(30, DivClass(0)));
    CHECK_THROWS_AS(verify_all(big), RankCapExceeded);
    VerifyOptions bounded;
    bounded.mode = VerifyMode::bounded;
    CHECK(verify_all(big, bounded).passed);
}

TEST_CASE("solve_basis_L examples") {
    BranchMap zero(2, 1);
    auto basis = GroupF2(2).standard_basis();
    for (const auto& l : solve_basis_L(zero, basis)) CHECK(l.is_zero());

    BranchMap one(1, 0);
    one.set(V("1"), DivClass::of(2, 2));
    auto b1 = GroupF2(1).standard_basis();
    CHECK(solve_basis_L(one, b1)[0] == DivClass::of(1, 1));

    BranchMap odd(1, 0);
    odd.set(V("1"), DivClass::of(1, 0));
    try {
        solve_basis_L(odd, b1);
        FAIL("expected a parity error");
    } catch (const ParityError& e) {
        CHECK(e.character_index() == 0);
        CHECK(e.character_bits() == "1");
        CHECK(e.odd_coordinates() == std::vector<std::string>{"r"});
    }
    CHECK_THROWS_AS(one.set(V("0"), DivClass::of(1, 1)), InvalidArgument);
}

TEST_CASE("elementary solution examples") {
    std::vector<GVector> g1{V("11")};
    auto e1 = elementary_solution(Subspace::span(2, g1), DivClass::of(1, 1));
    CHECK(e1.D().at(V("11")) == DivClass::of(2, 2));
    CHECK(e1.D().at(V("10")).is_zero());
    CHECK(verify_all(e1).passed);

    const auto v = DivClass::of(1, 2, {3});
    auto e3 = elementary_solution(Subspace::whole(3), v);
    GroupF2(3).for_each_character([&](const GCharacter& chi) {
        if (chi.is_zero())
            CHECK(L_of(e3, chi).is_zero());
        else
            CHECK(L_of(e3, chi) == Int(2) * v);
    });
    GroupF2(3).for_each_element([&](const GVector& s) {
        if (!s.is_zero()) CHECK(e3.D().at(s) == v);
    });
    CHECK(verify_all(e3).passed);
    CHECK(verify_all(e1 + elementary_solution(Subspace::whole(2), DivClass::of(3, 1))).passed);

    std::vector<GVector> none;
    CHECK_THROWS_AS(elementary_solution(Subspace::span(2, none), v), InvalidArgument);
}

TEST_CASE("lift examples") {
    auto data = triple_cover(3, 3, 2);
    auto same = lift(data, 0, data.D());
    CHECK(same == data);

    BranchMap up(2, 3);
    for (const auto& [s, c] : data.D().entries()) {
        DivClass e = c.extended(3);
        e.a[2] = 2;
        up.set(s, e);
    }
    auto lifted = lift(data, 1, up);
    CHECK(lifted.L_basis()[0].truncated(2) == data.L_basis()[0]);
    CHECK(lifted.L_basis()[0].a[2] == 2);
    CHECK(verify_all(lifted).passed);

    BranchMap odd = up;
    DivClass e = up.at(V("10"));
    e.a[2] = 1;
    odd.set(V("10"), e);
    CHECK_THROWS_AS(lift(data, 1, odd), ParityError);

    BranchMap wrong = up;
    DivClass w = up.at(V("10"));
    w.r += 2;
    wrong.set(V("10"), w);
    CHECK_THROWS_AS(lift(data, 1, wrong), InvalidArgument);
}

TEST_CASE("ample extension examples") {
    const auto alpha = LinearFunctional::intersection_with(DivClass::of(1, 1, {0}));
    std::vector<GVector> none;
    auto h0 = Subspace::span(4, none);
    auto res = ample_extension(4, h0, BranchMap(4, 1), V("1000"), DivClass::of(1, 1, {0}), alpha, 10);
    CHECK(res.min_l_minus_d >= 10);
    CHECK(res.min_d_outside >= 10);
    CHECK(verify_all(res.data).passed);

    // N = 0 with an ample v: q = 1 suffices.
    auto res0 = ample_extension(4, h0, BranchMap(4, 1), V("1000"), DivClass::of(3, 3, {1}), alpha, 0);
    CHECK(res0.q == 1);

    std::vector<GVector> gens{V("1000"), V("0100")};
    auto h = Subspace::span(4, gens);
    BranchMap dh(4, 1);
    dh.set(V("1000"), DivClass::of(2, -4, {2}));
    dh.set(V("1100"), DivClass::of(0, 6, {-2}));
    auto res2 = ample_extension(4, h, dh, V("0010"), DivClass::of(1, 1, {0}), alpha, 25);
    CHECK(verify_all(res2.data).passed);
    CHECK(res2.min_l_minus_d >= 25);
    for (const auto& s : h.elements()) CHECK(res2.data.D().at(s) == dh.at(s));

    CHECK_THROWS_AS(ample_extension(3, Subspace::span(3, none), BranchMap(3, 1), V("100"), DivClass::of(1, 1, {0}),
                                    alpha, 1),
                    InvalidArgument);
    CHECK_THROWS_AS(ample_extension(4, h, dh, V("1100"), DivClass::of(1, 1, {0}), alpha, 1), InvalidArgument);
    CHECK_THROWS_AS(ample_extension(4, h, dh, V("0010"), DivClass::of(-1, -1, {0}), alpha, 1), InvalidArgument);
    AmpleExtensionOptions tight;
    tight.q_cap = 2;
    CHECK_THROWS_AS(ample_extension(4, h, dh, V("0010"), DivClass::of(1, 1, {0}), alpha, 100000, tight),
                    SearchCapExceeded);
}

TEST_CASE("ramification profile examples") {
    auto p = ramification_profile(triple_cover(3, 3, 6));
    REQUIRE(p.I.has_value());
    CHECK(p.I->size() == 3);
    CHECK(p.totally_ramified);
    CHECK_FALSE(p.simple);

    BranchMap basis_only(3, 0);
    basis_only.set(V("100"), DivClass::of(2, 0));
    basis_only.set(V("010"), DivClass::of(2, 0));
    basis_only.set(V("001"), DivClass::of(2, 0));
    auto q = ramification_profile(solve(basis_only));
    CHECK(q.simple);
    CHECK(q.totally_ramified);

    auto e = ramification_profile(solve(BranchMap(3, 0)));
    CHECK_FALSE(e.simple);
    CHECK_FALSE(e.totally_ramified);
    CHECK(e.I_size == 0);
}

TEST_CASE("invariants examples") {
    for (int r = 1; r <= 4; ++r) {
        auto data = solve(BranchMap(r, 3));
        auto inv = invariants(data);
        const Int g = pow2(r);
        CHECK(inv.K2 == g * 5);
        CHECK(inv.chi == g);
    }
    auto inv = invariants(triple_cover(3, 3, 6));
    CHECK(inv.K2 == 44);
    CHECK(inv.chi == 13);
    CHECK(inv.K2_cross == 44);
    CHECK(inv.chi_cross == 13);
    // the moment route gives the same numbers
    auto inv_m = invariants(triple_cover(3, 3, 6), 1);
    CHECK(inv_m.chi_route == "moments");
    CHECK(inv_m.chi == 13);
    CHECK(inv_m.chi_cross == 13);

    BuildingData bad(triple_cover(3, 3, 6).D(), GroupF2(2).standard_basis(), {DivClass(6), DivClass(6)});
    CHECK_THROWS_AS(invariants(bad), InvalidArgument);
}

TEST_CASE("vanishing examples") {
    auto small = check_vanishing(triple_cover(3, 3, 6));
    CHECK_FALSE(small.passed());
    CHECK_FALSE(small.l_minus_d_ample);

    auto empty = check_vanishing(solve(BranchMap(2, 0)));
    CHECK_FALSE(empty.l_ample);  // L = 0 is not ample
    CHECK(empty.l_minus_d_ample);        // vacuous

    BranchMap d(2, 1);
    d.set(V("10"), DivClass::of(40, 40, {4}));
    d.set(V("01"), DivClass::of(40, 40, {4}));
    d.set(V("11"), DivClass::of(40, 40, {4}));
    auto ok = check_vanishing(solve(d));
    CHECK(ok.l_ample);
    CHECK_FALSE(ok.l_minus_d_ample);  // L - D = 0 on the kernel element
}

TEST_CASE("property: random solved data agree with the tabulated oracle") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 150; ++t) {
        const int r = 1 + static_cast<int>(rng() % 5);
        const std::size_t n = rng() % 4;
        auto d = oracle::random_branch(r, n, rng);
        auto data = solve(d);
        auto table = oracle::tabulate_D(d);
        auto L = oracle::extend_L(r, table, data.L_basis());
        for (std::uint64_t chi = 0; chi < (std::uint64_t{1} << r); ++chi)
            CHECK(L_of(data, GCharacter::from_index(r, chi)) == L[chi]);
        CHECK(oracle::cover_condition(r, table, L));
        CHECK(verify_all(data).passed);
    }
}

TEST_CASE("property: non-standard bases give the same L on every character") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        const int r = 1 + static_cast<int>(rng() % 5);
        auto d = oracle::random_branch(r, 2, rng);
        auto std_data = solve(d);
        auto other = solve(d, random_basis(r, rng));
        GroupF2(r).for_each_character([&](const GCharacter& chi) { CHECK(L_of(std_data, chi) == L_of(other, chi)); });
        CHECK(verify_all(other).passed);
    }
}

TEST_CASE("property: group law and uniqueness") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 60; ++t) {
        const int r = 1 + static_cast<int>(rng() % 6);
        auto x = solve(oracle::random_branch(r, 2, rng));
        auto y = solve(oracle::random_branch(r, 2, rng));
        CHECK(verify_all(x + y).passed);
        auto again = BuildingData(x.D(), x.basis(), x.L_basis());
        GroupF2(r).for_each_character([&](const GCharacter& chi) { CHECK(L_of(x, chi) == L_of(again, chi)); });
    }
}

TEST_CASE("property: k-fold identity") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 200; ++t) {
        const int r = 1 + static_cast<int>(rng() % 6);
        auto data = solve(oracle::random_branch(r, 2, rng));
        const int k = 1 + static_cast<int>(rng() % 5);
        std::vector<GCharacter> chis;
        GCharacter total(r);
        DivClass lhs(2);
        for (int i = 0; i < k; ++i) {
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
        CHECK(lhs == rhs);
    }
}

TEST_CASE("property: elementary solutions over every subspace, r <= 4") {
    for (int r = 1; r <= 4; ++r)
        for (const auto& h : oracle::all_subspaces(r)) {
            if (h.dim() == 0) continue;
            CHECK(verify_all(elementary_solution(h, DivClass::of(1, -2, {3}))).passed);
        }
}

TEST_CASE("property: bounded mode matches exhaustive and its bounds are tight") {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 80; ++t) {
        const int r = 1 + static_cast<int>(rng() % 4);
        auto good = solve(oracle::random_branch(r, 1, rng));
        std::vector<DivClass> l = good.L_basis();
        if (rng() % 2) l[rng() % r].r += static_cast<long long>(rng() % 5) - 2;
        BuildingData data(good.D(), good.basis(), l);
        VerifyOptions ex;
        VerifyOptions bd;
        bd.mode = VerifyMode::bounded;
        auto e = verify_all(data, ex);
        auto b = verify_all(data, bd);
        CHECK(e.passed == b.passed);
        // exact per-coordinate range of the defect over all pairs
        Int lo = 0, hi = 0;
        GroupF2(r).for_each_character([&](const GCharacter& x) {
            GroupF2(r).for_each_character([&](const GCharacter& y) {
                const Int v = verify_pair(data, x, y).r;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            });
        });
        CHECK(b.bounds[0].coordinate == "r");
        CHECK(b.bounds[0].lo == lo);
        CHECK(b.bounds[0].hi == hi);
    }
}

TEST_CASE("property: sampled mode checks the basis pairs and is seeded") {
    std::mt19937_64 rng(16);
    auto data = solve(oracle::random_branch(5, 2, rng));
    VerifyOptions s;
    s.mode = VerifyMode::sampled;
    s.random_pairs = 50;
    auto rep = verify_all(data, s);
    CHECK(rep.passed);
    CHECK(rep.pairs_checked == 15 + 50);
    std::vector<DivClass> l = data.L_basis();
    l[2].s += 1;
    BuildingData bad(data.D(), data.basis(), l);
    auto r1 = verify_all(bad, s);
    auto r2 = verify_all(bad, s);
    CHECK_FALSE(r1.passed);
    CHECK(r1.failure_count == r2.failure_count);
    REQUIRE(r1.failures.size() == r2.failures.size());
    for (std::size_t i = 0; i < r1.failures.size(); ++i) CHECK(r1.failures[i].chi == r2.failures[i].chi);
}

TEST_CASE("property: uniform branch part agrees with its tabulation") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        const int r = 2 + static_cast<int>(rng() % 4);
        auto d = oracle::random_branch(r, 2, rng);
        GCharacter psi(r);
        while (psi.is_zero()) psi = GCharacter::from_index(r, rng() % (std::uint64_t{1} << r));
        d.set_uniform(psi, DivClass::of(4 * static_cast<long long>(rng() % 5), 2, {6, -2}));
        auto flat = d.materialized();
        auto data = solve(d);
        auto flat_data = solve(flat);
        CHECK(data.L_basis() == flat_data.L_basis());
        GroupF2(r).for_each_character([&](const GCharacter& chi) { CHECK(L_of(data, chi) == L_of(flat_data, chi)); });
        CHECK(d.support_size() == flat.support_size());
        CHECK(d.distinct_values() == flat.distinct_values());
        CHECK(verify_all(data).passed);
        auto a = invariants(data);
        auto b = invariants(flat_data);
        auto c = invariants(data, 1);  // moments and Noether routes
        CHECK(a.K2 == b.K2);
        CHECK(a.chi == b.chi);
        CHECK(c.K2 == a.K2);
        CHECK(c.chi == a.chi);
        CHECK(c.chi_cross_route == "noether");
    }
}

TEST_CASE("property: invariants match an independent tabulated computation") {
    std::mt19937_64 rng(18);
    for (int t = 0; t < 200; ++t) {
        const int r = 1 + static_cast<int>(rng() % 5);
        const std::size_t n = rng() % 13;
        auto d = oracle::random_branch(r, n, rng, 3);
        auto data = solve(d);
        auto table = oracle::tabulate_D(d);
        auto L = oracle::extend_L(r, table, data.L_basis());
        const Int g = pow2(r);
        DivClass k(n);
        k.r = -2;
        k.s = -2;
        for (auto& a : k.a) a = -1;
        DivClass twice = Int(2) * k;
        for (const auto& x : table) twice += x;
        const Int k2_times4 = g * oracle::dot(twice, twice);
        Int sum = 0;
        for (const auto& l : L) sum += oracle::dot(l, l + k);
        auto inv = invariants(data);
        CHECK(inv.K2 * 4 == k2_times4);
        CHECK(inv.chi * 2 == 2 * g + sum);
        CHECK(inv.K2 == inv.K2_cross);
        CHECK(inv.chi == inv.chi_cross);
    }
}

TEST_CASE("property: bounded vanishing never passes what exhaustive fails") {
    std::mt19937_64 rng(19);
    int both_pass = 0;
    for (int t = 0; t < 60; ++t) {
        const int r = 2 + static_cast<int>(rng() % 3);
        BranchMap d(r, 1);
        std::uniform_int_distribution<int> big(0, 3);
        for (std::uint64_t s = 1; s < (std::uint64_t{1} << r); ++s)
            if (rng() % 3 == 0) d.set(GVector::from_index(r, s), DivClass::of(2 * big(rng), 2 * big(rng), {2 * big(rng)}));
        GCharacter psi(r);
        while (psi.is_zero()) psi = GCharacter::from_index(r, rng() % (std::uint64_t{1} << r));
        const long long m = 10 + 10 * (rng() % 4);
        d.set_uniform(psi, DivClass::of(8 * m, 8 * m, {2 * m}));
        auto data = solve(d);
        VerifyOptions ex, bd;
        bd.mode = VerifyMode::bounded;
        auto e = check_vanishing(data, ex);
        auto b = check_vanishing(data, bd);
        if (b.passed()) CHECK(e.passed());
        both_pass += b.passed() && e.passed();
    }
    CHECK(both_pass > 0);
}
