#include "tequiv/quotient_sings.hpp"

#include "tequiv/integer.hpp"

#include <numeric>
#include <tuple>

namespace tequiv {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<__int128>(mod(a, m)) * mod(b, m) % m);
}

}  // namespace

CyclicSing::CyclicSing(std::int64_t p_, std::int64_t q_) : p(p_), q(q_) {
    if (p < 2) throw InvalidArgument("cyclic singularity needs p >= 2");
    if (q < 1 || q >= p || std::gcd(p, q) != 1)
        throw InvalidArgument("q must lie in [1, p-1] and be prime to p");
}

std::string CyclicSing::to_string() const {
    return "1/" + std::to_string(p) + "(1," + std::to_string(q) + ")";
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    if (m < 1) throw InvalidArgument("modulus must be positive");
    if (m == 1) return 0;
    std::int64_t r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t k = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - k * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - k * s1};
    }
    if (r0 != 1) throw InvalidArgument("no inverse of " + std::to_string(a) + " mod " + std::to_string(m));
    return mod(s0, m);
}

Germ normalize(std::int64_t p, std::int64_t a, std::int64_t b) {
    if (p < 1) throw InvalidArgument("p must be positive");
    const std::int64_t g = std::gcd(p, std::gcd(a, b));
    const std::int64_t pp = p / g;
    if (pp == 1) return Smooth{};
    const std::int64_t aa = mod(a / g, pp), bb = mod(b / g, pp);
    if (std::gcd(pp, aa) != 1 || std::gcd(pp, bb) != 1)
        throw InvalidArgument("type 1/" + std::to_string(p) + "(" + std::to_string(a) + "," + std::to_string(b) +
                              ") is not an isolated singularity");
    CyclicSing s(pp, mulmod(mod_inverse(aa, pp), bb, pp));
    s.origin = std::array{p, a, b};
    return s;
}

std::string HJChain::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
    return s + "]";
}

HJChain hj(const CyclicSing& s) {
    HJChain c;
    std::int64_t p = s.p, q = s.q;
    while (q > 0) {
        const std::int64_t k = (p + q - 1) / q;
        c.b.push_back(k);
        std::tie(p, q) = std::pair{q, k * q - p};
    }
    return c;
}

Germ from_chain(const HJChain& chain) {
    if (chain.b.empty()) return Smooth{};
    for (auto x : chain.b)
        if (x < 2) throw InvalidArgument("chain entries must be >= 2: " + chain.to_string());
    std::int64_t p = chain.b.back(), q = 1;
    for (auto it = chain.b.rbegin() + 1; it != chain.b.rend(); ++it) std::tie(p, q) = std::pair{*it * p - q, p};
    return CyclicSing(p, q);
}

std::optional<ClassTWitness> class_t_witness(const CyclicSing& s) {
    const std::int64_t qinv = mod_inverse(s.q, s.p);
    for (std::int64_t n = 1; n * n <= s.p; ++n) {
        if (s.p % (n * n) != 0) continue;
        const std::int64_t d = s.p / (n * n);
        for (std::int64_t a = 1; a <= n; ++a) {
            if (std::gcd(a, n) != 1) continue;
            const std::int64_t t = mod(d * n * a - 1, s.p);
            if (t == s.q || t == qinv) return ClassTWitness{d, n, a};
        }
    }
    return std::nullopt;
}

std::string to_string(ClassTKind k) {
    switch (k) {
        case ClassTKind::none: return "none";
        case ClassTKind::smooth: return "smooth";
        case ClassTKind::rdp: return "rdp";
        case ClassTKind::cyclic_t: return "cyclic_t";
    }
    return "?";
}

ClassTKind class_t_kind(const Germ& g) {
    if (std::holds_alternative<Smooth>(g)) return ClassTKind::smooth;
    const auto& s = std::get<CyclicSing>(g);
    if (s.is_rdp()) return ClassTKind::rdp;
    return class_t_witness(s) ? ClassTKind::cyclic_t : ClassTKind::none;
}

bool is_iso(const CyclicSing& x, const CyclicSing& y) {
    return x.p == y.p && (x.q == y.q || mulmod(x.q, y.q, x.p) == 1);
}

FamilyMember b_family(std::int64_t n) {
    if (n < 1) throw InvalidArgument("family index must be >= 1");
    FamilyMember m{CyclicSing(2 * n + 1, 2 * n - 1), HJChain{std::vector<std::int64_t>(n, 2)}};
    m.chain.b.back() = 3;
    if (hj(m.sing) != m.chain) throw ConsistencyError("B-family chain mismatch at n = " + std::to_string(n));
    return m;
}

FamilyMember y_family_by_type(std::int64_t n) {
    if (n < 1) throw InvalidArgument("family index must be >= 1");
    FamilyMember m{CyclicSing(4 * n, 2 * n - 1), HJChain{}};
    if (n == 1) {
        m.chain.b = {4};
    } else {
        m.chain.b.assign(n, 2);
        m.chain.b.front() = 3;
        m.chain.b.back() = 3;
    }
    if (hj(m.sing) != m.chain) throw ConsistencyError("Y-family chain mismatch at n = " + std::to_string(n));
    return m;
}

std::int64_t y_label(std::int64_t type_n, YLabelConvention conv) { return type_n + conv.offset; }

ResolutionGraph ResolutionGraph::chain(const HJChain& c) {
    ResolutionGraph g;
    g.b = c.b;
    for (int i = 0; i + 1 < static_cast<int>(c.b.size()); ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

Gram ResolutionGraph::intersection_matrix() const {
    const std::size_t k = b.size();
    Gram m(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) m[i][i] = -b[i];
    for (auto [i, j] : edges) {
        m[i][j] += 1;
        m[j][i] += 1;
    }
    return m;
}

namespace {

void require_tree(const ResolutionGraph& g) {
    const int k = static_cast<int>(g.b.size());
    if (k == 0) throw InvalidArgument("empty resolution graph");
    for (auto x : g.b)
        if (x < 2) throw InvalidArgument("self-intersections must be <= -2");
    if (static_cast<int>(g.edges.size()) != k - 1) throw InvalidArgument("resolution graph is not a tree");
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [i, j] : g.edges) {
        if (i < 0 || j < 0 || i >= k || j >= k || i == j) throw InvalidArgument("bad edge in resolution graph");
        const int ri = find(i), rj = find(j);
        if (ri == rj) throw InvalidArgument("resolution graph has a cycle");
        parent[ri] = rj;
    }
}

}  // namespace

// Leading principal minors of -M by fraction-free elimination.
bool is_negative_definite(const Gram& m) {
    const std::size_t k = m.size();
    std::vector<std::vector<Int>> a(k, std::vector<Int>(k));
    for (std::size_t i = 0; i < k; ++i) {
        if (m[i].size() != k) throw InvalidArgument("Gram matrix is not square");
        for (std::size_t j = 0; j < k; ++j) a[i][j] = -m[i][j];
    }
    Int prev = 1;
    for (std::size_t c = 0; c < k; ++c) {
        if (a[c][c] <= 0) return false;
        for (std::size_t i = c + 1; i < k; ++i)
            for (std::size_t j = c + 1; j < k; ++j) a[i][j] = exact_div(a[c][c] * a[i][j] - a[i][c] * a[c][j], prev);
        prev = a[c][c];
    }
    return true;
}

FundamentalCycle fundamental_cycle(const ResolutionGraph& g) {
    require_tree(g);
    const auto m = g.intersection_matrix();
    if (!is_negative_definite(m)) throw InvalidArgument("resolution graph is not negative definite");
    const std::size_t k = g.b.size();
    FundamentalCycle fc;
    fc.coefficients.assign(k, 1);
    auto dot_e = [&](std::size_t i) {
        std::int64_t v = 0;
        for (std::size_t j = 0; j < k; ++j) v += m[i][j] * fc.coefficients[j];
        return v;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (dot_e(i) > 0) {
                ++fc.coefficients[i];
                ++fc.steps;
                changed = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) fc.self_intersection += fc.coefficients[i] * dot_e(i);
    return fc;
}

bool q2_criterion(std::int64_t d, std::int64_t n, std::int64_t a) {
    if (d < 1 || n < 1 || a < 1) throw InvalidArgument("d, n, a must be positive");
    if (std::gcd(a, n) != 1) throw InvalidArgument("a and n must be coprime");
    const std::int64_t p = d * n * n;
    const std::int64_t q = mod(d * n * a - 1, p);
    return mulmod(q, q, p) == 1 % p;
}

}  // namespace tequiv
