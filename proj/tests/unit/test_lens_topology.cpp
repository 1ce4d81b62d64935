#include <random>

#include "doctest.h"
#include "tequiv/lens_topology.hpp"

using namespace tequiv;

namespace {

// Independent brute force: images over the full ambient coordinates
// (null direction included) inside [-box, box]^dim, with the form
// evaluated from the ambient Gram matrix directly.
bool brute_embeds(const Gram& src, const Gram& amb, int box) {
    const std::size_t dim = amb.size(), k = src.size();
    std::vector<std::vector<std::int64_t>> cands;
    std::vector<std::int64_t> v(dim, -box);
    if (dim == 0) return k == 0;
    while (true) {
        cands.push_back(v);
        std::size_t i = 0;
        while (i < dim && v[i] == box) v[i++] = -box;
        if (i == dim) break;
        ++v[i];
    }
    auto form = [&](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) s += x[i] * amb[i][j] * y[j];
        return s;
    };
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == k) return true;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            bool ok = form(cands[c], cands[c]) == src[i][i];
            for (std::size_t j = 0; ok && j < i; ++j) ok = form(cands[c], cands[pick[j]]) == src[i][j];
            if (!ok) continue;
            pick.push_back(c);
            if (self(self, i + 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    return rec(rec, 0);
}

MilnorLattice lattice_of(Gram g) {
    MilnorLattice m;
    m.name = "custom";
    m.gram = std::move(g);
    m.rank = static_cast<int>(m.gram.size());
    return m;
}

}  // namespace

TEST_CASE("links") {
    CHECK(link_of(CyclicSing(4, 1)) == LensSpace{4, 1});
    CHECK(link_of(Smooth{}).is_sphere());
    CHECK(link_of(Smooth{}).to_string() == "S^3");
    CHECK(same_link(CyclicSing(7, 3), CyclicSing(7, 5)));
    CHECK_FALSE(same_link(CyclicSing(7, 3), CyclicSing(7, 2)));
    CHECK_FALSE(same_link(Smooth{}, CyclicSing(7, 2)));
}

TEST_CASE("mapping class generators") {
    auto r = mcg(LensSpace{4, 1});
    CHECK(r.sigma_defined);
    CHECK(r.sigma_isotopic_to_id);
    CHECK(r.generators == std::vector<std::string>{"tau"});

    r = mcg(LensSpace{8, 3});
    CHECK(r.sigma_defined);
    CHECK_FALSE(r.sigma_isotopic_to_id);
    CHECK_FALSE(r.sigma_tau_isotopic_to_id);
    CHECK(r.generators == std::vector<std::string>{"sigma", "tau"});

    r = mcg(LensSpace{7, 2});
    CHECK_FALSE(r.sigma_defined);
    CHECK(r.generators == std::vector<std::string>{"tau"});

    r = mcg(LensSpace{7, 6});
    CHECK(r.sigma_tau_isotopic_to_id);
    CHECK(r.generators == std::vector<std::string>{"tau"});
}

TEST_CASE("mapping class flags are structurally consistent") {
    for (std::int64_t p = 2; p <= 300; ++p)
        for (std::int64_t q = 1; q < p; ++q) {
            const auto r = mcg(LensSpace{p, q});
            if (r.sigma_isotopic_to_id || r.sigma_tau_isotopic_to_id) CHECK(r.sigma_defined);
            // sigma descends iff the swap intertwines xi with xi^q
            bool intertwines = (q * q - 1) % p == 0;
            CHECK(r.sigma_defined == intertwines);
        }
}

TEST_CASE("milnor lattices") {
    CHECK(milnor_lattice(MilnorKind::A, 1).gram == Gram{{-2}});
    CHECK(milnor_lattice(MilnorKind::B, 2).gram == Gram{{-2, 1}, {1, -3}});
    const auto yq = milnor_lattice(MilnorKind::Y_qgorenstein, 2);
    CHECK(yq.torsion_canonical_two);
    CHECK_FALSE(yq.rank.has_value());
    CHECK(milnor_lattice(MilnorKind::Y_simultaneous, 2).gram == Gram{{-3, 1}, {1, -3}});
    const auto d4 = milnor_lattice(MilnorKind::D, 4);
    CHECK(d4.gram[1] == std::vector<std::int64_t>{1, -2, 1, 1});
    CHECK_THROWS_AS(milnor_lattice(MilnorKind::D, 3), InvalidArgument);
    CHECK_THROWS_AS(milnor_lattice(MilnorKind::E, 5), InvalidArgument);
    // resolution forms of rational singularities are negative definite
    for (int n = 1; n <= 8; ++n) {
        CHECK(is_negative_definite(milnor_lattice(MilnorKind::A, n).gram));
        CHECK(is_negative_definite(milnor_lattice(MilnorKind::B, n).gram));
        CHECK(is_negative_definite(milnor_lattice(MilnorKind::Y_simultaneous, n).gram));
    }
    for (int n = 6; n <= 8; ++n) CHECK(is_negative_definite(milnor_lattice(MilnorKind::E, n).gram));
    CHECK_FALSE(is_negative_definite(Gram{{-2, 2}, {2, -2}}));
}

TEST_CASE("embedding examples") {
    auto r = embeds(milnor_lattice(MilnorKind::A, 1), AmbientModel::BlowupC2);
    CHECK_FALSE(r.embeds);
    CHECK(r.decided_by == "search");
    CHECK(r.box == std::vector<std::int64_t>{1});

    CHECK_FALSE(embeds(milnor_lattice(MilnorKind::A, 2), AmbientModel::BlowupCxP1TwoPoints).embeds);

    r = embeds(milnor_lattice(MilnorKind::A, 1), AmbientModel::BlowupCxP1TwoPoints);
    REQUIRE(r.embeds);
    REQUIRE(r.witness);
    CHECK(*r.witness == std::vector<std::vector<std::int64_t>>{{0, 1, 1}});

    CHECK_FALSE(embeds(milnor_lattice(MilnorKind::D, 4), AmbientModel::BlowupC2).embeds);

    r = embeds(milnor_lattice(MilnorKind::Y_qgorenstein, 3), AmbientModel::PlaneC2);
    CHECK_FALSE(r.embeds);
    CHECK(r.decided_by == "torsion");

    CHECK_FALSE(embeds(milnor_lattice(MilnorKind::Y_simultaneous, 1), AmbientModel::PlaneC2).embeds);
    CHECK(embeds(lattice_of({{-1}}), AmbientModel::BlowupC2).embeds);
    CHECK_THROWS_AS(embeds(lattice_of({{0}}), AmbientModel::BlowupC2), InvalidArgument);
}

TEST_CASE("embedding search budget") {
    EmbedOptions tight;
    tight.node_budget = 3;
    CHECK_THROWS_AS(embeds(milnor_lattice(MilnorKind::A, 3), AmbientModel::BlowupCxP1TwoPoints, tight),
                    SearchCapExceeded);
}

TEST_CASE("embeds agrees with brute force and is monotone in the ambient") {
    std::mt19937_64 rng(11);
    int tested = 0;
    while (tested < 150) {
        const int k = std::uniform_int_distribution<int>(1, 3)(rng);
        Gram g(k, std::vector<std::int64_t>(k, 0));
        for (int i = 0; i < k; ++i) {
            g[i][i] = -std::uniform_int_distribution<int>(1, 4)(rng);
            for (int j = 0; j < i; ++j) g[i][j] = g[j][i] = std::uniform_int_distribution<int>(-1, 1)(rng);
        }
        if (!is_negative_definite(g)) continue;
        ++tested;
        const auto src = lattice_of(g);
        for (auto amb : {AmbientModel::PlaneC2, AmbientModel::BlowupC2, AmbientModel::BlowupCxP1TwoPoints}) {
            const auto r = embeds(src, amb);
            CHECK(r.embeds == brute_embeds(g, ambient_gram(amb), 2));
            if (r.witness) {
                const auto a = ambient_gram(amb);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) {
                        std::int64_t v = 0;
                        for (std::size_t t = 0; t < a.size(); ++t) v += (*r.witness)[i][t] * a[t][t] * (*r.witness)[j][t];
                        CHECK(v == g[i][j]);
                    }
            }
        }
        if (embeds(src, AmbientModel::BlowupC2).embeds) CHECK(embeds(src, AmbientModel::BlowupCxP1TwoPoints).embeds);
        if (embeds(src, AmbientModel::PlaneC2).embeds) CHECK(embeds(src, AmbientModel::BlowupC2).embeds);
    }
}

TEST_CASE("verdicts") {
    const auto vs = obstruction_verdicts(6);
    CHECK(vs.size() == 6 + 3 + 3 + 6 + 12 + 5 + 1);
    for (const auto& v : vs) {
        INFO(v.source);
        CHECK(v.agrees());
    }
    CHECK(vs.back().obstruction == "control");
    CHECK(vs.back().result.embeds);
}
