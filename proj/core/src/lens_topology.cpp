#include "tequiv/lens_topology.hpp"

#include <cmath>

namespace tequiv {

std::string LensSpace::to_string() const {
    if (is_sphere()) return "S^3";
    return "L(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

LensSpace link_of(const Germ& g) {
    if (std::holds_alternative<Smooth>(g)) return LensSpace{};
    const auto& s = std::get<CyclicSing>(g);
    return LensSpace{s.p, s.q};
}

bool same_link(const Germ& x, const Germ& y) {
    const bool sx = std::holds_alternative<Smooth>(x), sy = std::holds_alternative<Smooth>(y);
    if (sx || sy) return sx && sy;
    return is_iso(std::get<CyclicSing>(x), std::get<CyclicSing>(y));
}

MCGReport mcg(const LensSpace& l) {
    MCGReport r;
    r.lens = l;
    r.generators.push_back("tau");
    if (l.is_sphere()) return r;
    const std::int64_t q = l.q % l.p;
    r.sigma_defined = static_cast<__int128>(q) * q % l.p == 1 % l.p;
    r.sigma_isotopic_to_id = q == 1 % l.p;
    r.sigma_tau_isotopic_to_id = q == l.p - 1;
    // sigma tau trivial makes sigma a power of tau, so it is redundant too
    if (r.sigma_defined && !r.sigma_isotopic_to_id && !r.sigma_tau_isotopic_to_id)
        r.generators.insert(r.generators.begin(), "sigma");
    return r;
}

Gram gram_of(const ResolutionGraph& g) { return g.intersection_matrix(); }

namespace {

ResolutionGraph minus_two_tree(int k, std::vector<std::pair<int, int>> edges) {
    return ResolutionGraph{std::vector<std::int64_t>(k, 2), std::move(edges)};
}

ResolutionGraph path_edges(int k) {
    ResolutionGraph g = minus_two_tree(k, {});
    for (int i = 0; i + 1 < k; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

MilnorLattice from_graph(std::string name, const ResolutionGraph& g) {
    MilnorLattice m;
    m.name = std::move(name);
    m.gram = gram_of(g);
    m.rank = static_cast<int>(g.b.size());
    return m;
}

}  // namespace

MilnorLattice milnor_lattice(MilnorKind kind, int n) {
    switch (kind) {
        case MilnorKind::A: {
            if (n < 1) throw InvalidArgument("A(n) needs n >= 1");
            return from_graph("A" + std::to_string(n), path_edges(n));
        }
        case MilnorKind::D: {
            if (n < 4) throw InvalidArgument("D(n) needs n >= 4");
            auto g = path_edges(n - 1);
            g.b.push_back(2);
            g.edges.emplace_back(n - 3, n - 1);
            return from_graph("D" + std::to_string(n), g);
        }
        case MilnorKind::E: {
            if (n < 6 || n > 8) throw InvalidArgument("E(n) needs n in {6,7,8}");
            auto g = path_edges(n - 1);
            g.b.push_back(2);
            g.edges.emplace_back(2, n - 1);
            return from_graph("E" + std::to_string(n), g);
        }
        case MilnorKind::B: {
            if (n < 1) throw InvalidArgument("B(n) needs n >= 1");
            return from_graph("B" + std::to_string(n), ResolutionGraph::chain(b_family(n).chain));
        }
        case MilnorKind::Y_simultaneous: {
            if (n < 1) throw InvalidArgument("Y type needs n >= 1");
            const auto y = y_family_by_type(n);
            return from_graph("Y[" + y.sing.to_string() + "]:simultaneous", ResolutionGraph::chain(y.chain));
        }
        case MilnorKind::Y_qgorenstein: {
            if (n < 1) throw InvalidArgument("Y type needs n >= 1");
            MilnorLattice m;
            m.name = "Y[" + y_family_by_type(n).sing.to_string() + "]:qgorenstein";
            m.torsion_canonical_two = true;
            return m;
        }
    }
    throw InvalidArgument("unknown Milnor lattice kind");
}

std::string to_string(AmbientModel a) {
    switch (a) {
        case AmbientModel::PlaneC2: return "C2";
        case AmbientModel::BlowupC2: return "Bl1(C2)";
        case AmbientModel::BlowupCxP1TwoPoints: return "Bl2(CxP1)";
    }
    return "?";
}

Gram ambient_gram(AmbientModel a) {
    switch (a) {
        case AmbientModel::PlaneC2: return {};
        case AmbientModel::BlowupC2: return {{-1}};
        case AmbientModel::BlowupCxP1TwoPoints: return {{0, 0, 0}, {0, -1, 0}, {0, 0, -1}};
    }
    throw InvalidArgument("unknown ambient");
}

namespace {

// Catalogue ambients are diagonal with entries 0 or -1. A null coordinate
// pairs to zero with everything, so images are searched in the -1 part only
// and get 0 on null coordinates.
class Search {
public:
    Search(const Gram& source, std::vector<int> definite, std::size_t dim, std::uint64_t budget)
        : s_(source), definite_(std::move(definite)), dim_(dim), budget_(budget) {
        for (std::size_t i = 0; i < s_.size(); ++i) {
            auto b = static_cast<std::int64_t>(std::sqrt(static_cast<double>(-s_[i][i])));
            while ((b + 1) * (b + 1) <= -s_[i][i]) ++b;
            while (b * b > -s_[i][i]) --b;
            bounds_.push_back(b);
        }
    }

    bool run() { return place(0); }

    std::vector<std::vector<std::int64_t>> witness() const {
        std::vector<std::vector<std::int64_t>> w;
        for (const auto& v : images_) {
            std::vector<std::int64_t> full(dim_, 0);
            for (std::size_t k = 0; k < definite_.size(); ++k) full[definite_[k]] = v[k];
            w.push_back(full);
        }
        return w;
    }

    const std::vector<std::int64_t>& bounds() const { return bounds_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    static std::int64_t form(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
        std::int64_t v = 0;
        for (std::size_t k = 0; k < x.size(); ++k) v -= x[k] * y[k];
        return v;
    }

    bool place(std::size_t i) {
        if (i == s_.size()) return true;
        const std::int64_t b = bounds_[i];
        std::vector<std::int64_t> c(definite_.size(), b);
        // odometer over [-b, b]^m, each coordinate running from +b down to -b
        while (true) {
            if (++nodes_ > budget_) throw SearchCapExceeded("embedding search exceeded its node budget");
            bool ok = form(c, c) == s_[i][i];
            for (std::size_t j = 0; ok && j < i; ++j) ok = form(c, images_[j]) == s_[i][j];
            if (ok) {
                images_.push_back(c);
                if (place(i + 1)) return true;
                images_.pop_back();
            }
            std::size_t k = c.size();
            while (k > 0 && c[k - 1] == -b) c[--k] = b;
            if (k == 0) return false;
            --c[k - 1];
        }
    }

    const Gram& s_;
    std::vector<int> definite_;
    std::size_t dim_;
    std::uint64_t budget_;
    std::vector<std::int64_t> bounds_;
    std::vector<std::vector<std::int64_t>> images_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

EmbedResult embeds(const MilnorLattice& source, AmbientModel ambient, const EmbedOptions& opts) {
    EmbedResult r;
    // every catalogue ambient has torsion-free H^2 and trivial canonical class
    // on the relevant open part, so a 2-torsion canonical class cannot come from it
    if (source.torsion_canonical_two) {
        r.decided_by = "torsion";
        return r;
    }
    if (!is_negative_definite(source.gram)) throw InvalidArgument(source.name + " is not negative definite");
    const Gram g = ambient_gram(ambient);
    std::vector<int> definite;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g[k][k] == -1)
            definite.push_back(static_cast<int>(k));
        else if (g[k][k] != 0)
            throw InvalidArgument("ambient form must be diagonal with entries 0 or -1");
    }
    Search search(source.gram, definite, g.size(), opts.node_budget);
    r.decided_by = "search";
    r.embeds = search.run();
    r.box = search.bounds();
    r.nodes = search.nodes();
    if (r.embeds) {
        r.witness = search.witness();
        // the witness must reproduce the source form exactly
        const auto& w = *r.witness;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j) {
                std::int64_t v = 0;
                for (std::size_t k = 0; k < g.size(); ++k) v += w[i][k] * g[k][k] * w[j][k];
                if (v != source.gram[i][j]) throw ConsistencyError("embedding witness does not reproduce the form");
            }
    }
    return r;
}

std::vector<Verdict> obstruction_verdicts(int max_n, const EmbedOptions& opts) {
    std::vector<Verdict> out;
    auto add = [&](const char* tag, const MilnorLattice& m, AmbientModel a, bool expected) {
        out.push_back(Verdict{tag, m.name, a, expected, embeds(m, a, opts)});
    };
    for (int n = 1; n <= max_n; ++n) add("one_point_blowup", milnor_lattice(MilnorKind::A, n), AmbientModel::BlowupC2, false);
    for (int n = 4; n <= max_n; ++n) add("one_point_blowup", milnor_lattice(MilnorKind::D, n), AmbientModel::BlowupC2, false);
    for (int n = 6; n <= 8; ++n) add("one_point_blowup", milnor_lattice(MilnorKind::E, n), AmbientModel::BlowupC2, false);
    for (int n = 1; n <= max_n; ++n) add("one_point_blowup", milnor_lattice(MilnorKind::B, n), AmbientModel::BlowupC2, false);
    for (int n = 1; n <= max_n; ++n) {
        add("affine_plane", milnor_lattice(MilnorKind::Y_simultaneous, n), AmbientModel::PlaneC2, false);
        add("affine_plane", milnor_lattice(MilnorKind::Y_qgorenstein, n), AmbientModel::PlaneC2, false);
    }
    for (int n = 2; n <= max_n; ++n)
        add("two_point_blowup", milnor_lattice(MilnorKind::A, n), AmbientModel::BlowupCxP1TwoPoints, false);
    add("control", milnor_lattice(MilnorKind::A, 1), AmbientModel::BlowupCxP1TwoPoints, true);
    return out;
}

}  // namespace tequiv
