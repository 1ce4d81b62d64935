#include "tequiv/rdp_actions.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "tequiv/errors.hpp"
#include "tequiv/f2_groups.hpp"
#include "tequiv/quotient_sings.hpp"

namespace tequiv {

namespace detail {
extern const char* const kBundledRdpTable;
}

PolySparse& PolySparse::add(std::int64_t coeff, std::vector<int> exps) {
    if (exps.size() != vars.size()) throw InvalidArgument("exponent vector length mismatch");
    auto& c = terms[exps];
    c += coeff;
    if (c == 0) terms.erase(exps);
    return *this;
}

PolySparse PolySparse::operator-() const {
    PolySparse out = *this;
    for (auto& [e, c] : out.terms) c = -c;
    return out;
}

std::string PolySparse::to_string() const {
    if (terms.empty()) return "0";
    std::string s;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [e, c] = *it;
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            mono += vars[i];
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        std::string coef = std::to_string(c < 0 ? -c : c);
        if (!s.empty()) s += c < 0 ? " - " : " + ";
        else if (c < 0) s += "-";
        if (mono.empty()) s += coef;
        else s += (coef == "1" ? "" : coef) + mono;
    }
    return s;
}

SignedMonomialMap SignedMonomialMap::diagonal(std::string name, std::vector<std::string> vars, std::vector<int> sign) {
    SignedMonomialMap m;
    m.name = std::move(name);
    m.perm.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) m.perm[i] = static_cast<int>(i);
    m.vars = std::move(vars);
    m.sign = std::move(sign);
    return m;
}

SignedMonomialMap SignedMonomialMap::identity(std::vector<std::string> vars) {
    std::vector<int> ones(vars.size(), 1);
    return diagonal("id", std::move(vars), std::move(ones));
}

SignedMonomialMap SignedMonomialMap::compose(const SignedMonomialMap& o) const {
    if (vars != o.vars) throw InvalidArgument("composing maps over different variables");
    SignedMonomialMap m;
    m.name = name + o.name;
    m.vars = vars;
    m.perm.resize(vars.size());
    m.sign.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        m.perm[i] = o.perm[perm[i]];
        m.sign[i] = sign[i] * o.sign[perm[i]];
    }
    return m;
}

SignedMonomialMap SignedMonomialMap::extended(const std::vector<std::string>& extra) const {
    SignedMonomialMap m = *this;
    for (const auto& v : extra) {
        m.perm.push_back(static_cast<int>(m.vars.size()));
        m.vars.push_back(v);
        m.sign.push_back(1);
    }
    return m;
}

bool SignedMonomialMap::is_identity() const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (perm[i] != static_cast<int>(i) || sign[i] != 1) return false;
    return true;
}

bool SignedMonomialMap::is_diagonal() const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (perm[i] != static_cast<int>(i)) return false;
    return true;
}

namespace {

// Cycles of the permutation with the product of signs along each.
std::vector<std::pair<std::vector<int>, int>> cycles(const SignedMonomialMap& m) {
    std::vector<std::pair<std::vector<int>, int>> out;
    std::vector<bool> seen(m.vars.size(), false);
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        int s = 1;
        for (int j = static_cast<int>(i); !seen[j]; j = m.perm[j]) {
            seen[j] = true;
            cyc.push_back(j);
            s *= m.sign[j];
        }
        out.emplace_back(std::move(cyc), s);
    }
    return out;
}

}  // namespace

int SignedMonomialMap::fixed_dimension() const {
    int d = 0;
    for (const auto& [cyc, s] : cycles(*this)) d += s == 1;
    return d;
}

std::optional<std::vector<std::int64_t>> SignedMonomialMap::fixed_line() const {
    if (fixed_dimension() != 1) return std::nullopt;
    std::vector<std::int64_t> p(vars.size(), 0);
    for (const auto& [cyc, s] : cycles(*this)) {
        if (s != 1) continue;
        // p_i = s_i p_{perm(i)} along c0 -> c1 = perm(c0) -> ...
        p[cyc[0]] = 1;
        for (std::size_t k = 0; k + 1 < cyc.size(); ++k) p[cyc[k + 1]] = sign[cyc[k]] * p[cyc[k]];
    }
    return p;
}

std::string to_string(Coords c) { return c == Coords::xyz ? "xyz" : "uvy"; }

std::optional<SignedMonomialMap> involution_form(char form, Coords c) {
    const std::vector<std::string> xyz{"x", "y", "z"}, uvy{"u", "v", "y"};
    const std::string name(1, form);
    auto swap = [&](std::vector<int> sign) {
        SignedMonomialMap m;
        m.name = name;
        m.vars = uvy;
        m.perm = {1, 0, 2};
        m.sign = std::move(sign);
        return m;
    };
    if (c == Coords::xyz) {
        switch (form) {
            case 'a': return SignedMonomialMap::diagonal(name, xyz, {1, -1, 1});
            case 'b': return SignedMonomialMap::diagonal(name, xyz, {1, -1, -1});
            case 'c': return std::nullopt;
            case 'd': return SignedMonomialMap::diagonal(name, xyz, {-1, 1, -1});
            case 'e': return SignedMonomialMap::diagonal(name, xyz, {-1, -1, -1});
            case 'f': return SignedMonomialMap::diagonal(name, xyz, {1, 1, -1});
        }
    } else {
        switch (form) {
            case 'a': return SignedMonomialMap::diagonal(name, uvy, {1, 1, -1});
            case 'b': return swap({-1, -1, -1});
            case 'c': return SignedMonomialMap::diagonal(name, uvy, {-1, 1, -1});
            case 'd': return SignedMonomialMap::diagonal(name, uvy, {-1, -1, 1});
            case 'e': return SignedMonomialMap::diagonal(name, uvy, {-1, -1, -1});
            case 'f': return swap({-1, -1, 1});
        }
    }
    throw InvalidArgument("unknown involution form '" + name + "'");
}

std::optional<PolySparse> rdp_equation(const std::string& type, int index, Coords c) {
    if (c == Coords::uvy) {
        if (type != "A") return std::nullopt;
        if (index < 0) throw InvalidArgument("A_n needs n >= 0");
        PolySparse f({"u", "v", "y"});
        f.add(1, {1, 1, 0}).add(1, {0, 0, index + 1});
        return f;
    }
    PolySparse f({"x", "y", "z"});
    f.add(1, {0, 0, 2});
    if (type == "A") {
        if (index < 0) throw InvalidArgument("A_n needs n >= 0");
        f.add(1, {2, 0, 0}).add(1, {0, index + 1, 0});
    } else if (type == "D") {
        if (index < 3) throw InvalidArgument("D_n needs n >= 3");
        f.add(1, {1, 2, 0}).add(1, {index - 1, 0, 0});
    } else if (type == "E" && index == 6) {
        f.add(1, {3, 0, 0}).add(1, {0, 4, 0});
    } else if (type == "E" && index == 7) {
        f.add(1, {1, 3, 0}).add(1, {3, 0, 0});
    } else if (type == "E" && index == 8) {
        f.add(1, {3, 0, 0}).add(1, {0, 5, 0});
    } else {
        throw InvalidArgument("no equation for " + type + std::to_string(index));
    }
    return f;
}

PolySparse act(const SignedMonomialMap& m, const PolySparse& f) {
    std::vector<int> where(f.vars.size());
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        auto it = std::find(m.vars.begin(), m.vars.end(), f.vars[i]);
        if (it == m.vars.end()) throw InvalidArgument("map does not act on variable " + f.vars[i]);
        where[i] = static_cast<int>(it - m.vars.begin());
    }
    // f's variables must be closed under the permutation
    std::vector<int> back(m.vars.size(), -1);
    for (std::size_t i = 0; i < where.size(); ++i) back[where[i]] = static_cast<int>(i);
    PolySparse out(f.vars);
    for (const auto& [e, c] : f.terms) {
        std::vector<int> e2(e.size(), 0);
        std::int64_t coeff = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            const int mi = where[i];
            const int target = back[m.perm[mi]];
            if (target < 0) throw InvalidArgument("map moves " + f.vars[i] + " outside the polynomial's variables");
            e2[target] += e[i];
            if (m.sign[mi] < 0 && (e[i] & 1)) coeff = -coeff;
        }
        out.add(coeff, std::move(e2));
    }
    return out;
}

std::string to_string(Invariance i) {
    switch (i) {
        case Invariance::invariant: return "invariant";
        case Invariance::anti_invariant: return "anti-invariant";
        case Invariance::neither: return "neither";
    }
    return "?";
}

Invariance is_invariant(const SignedMonomialMap& m, const PolySparse& f) {
    const PolySparse g = act(m, f);
    if (g == f) return Invariance::invariant;
    if (g == -f) return Invariance::anti_invariant;
    return Invariance::neither;
}

Invariance sign_weight_invariance(const SignedMonomialMap& m, const PolySparse& f) {
    if (!m.is_diagonal()) throw InvalidArgument("weight test needs a diagonal map");
    std::vector<std::int64_t> w(f.vars.size(), 0);
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        auto it = std::find(m.vars.begin(), m.vars.end(), f.vars[i]);
        if (it == m.vars.end()) throw InvalidArgument("map does not act on variable " + f.vars[i]);
        w[i] = m.sign[it - m.vars.begin()] < 0 ? 1 : 0;
    }
    bool all_even = true, all_odd = true;
    for (const auto& [e, c] : f.terms) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * w[i];
        (s % 2 == 0 ? all_odd : all_even) = false;
    }
    if (all_even) return Invariance::invariant;
    if (all_odd) return Invariance::anti_invariant;
    return Invariance::neither;
}

bool weights_invariant(const std::vector<std::int64_t>& weights, std::int64_t modulus, const PolySparse& f) {
    if (weights.size() != f.vars.size()) throw InvalidArgument("weight vector length mismatch");
    for (const auto& [e, c] : f.terms) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * weights[i];
        if (((s % modulus) + modulus) % modulus != 0) return false;
    }
    return true;
}

bool has_divisorial_fixed_locus(const SignedMonomialMap& m, const PolySparse& f) {
    if (m.vars != f.vars) throw InvalidArgument("map and equation use different variables");
    const int dim = m.fixed_dimension();
    if (dim >= 2) return true;  // a plane meets the surface in a curve
    if (dim == 0) return false;
    // f(t w) vanishes identically iff every homogeneous part vanishes at w
    const auto w = *m.fixed_line();
    std::map<int, std::int64_t> by_degree;
    for (const auto& [e, c] : f.terms) {
        std::int64_t v = c;
        int deg = 0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (int k = 0; k < e[i]; ++k) v *= w[i];
            deg += e[i];
        }
        by_degree[deg] += v;
    }
    for (const auto& [d, v] : by_degree)
        if (v != 0) return false;
    return true;
}

bool ActionRecord::admits(int n) const {
    if (n < n_min) return false;
    if (constraint && *constraint == "n odd") return n % 2 == 1;
    return true;
}

const std::string& bundled_table_json() {
    static const std::string text = detail::kBundledRdpTable;
    return text;
}

namespace {

FamilyRef parse_family(const nlohmann::json& j) {
    FamilyRef f;
    f.label = j.at("label").get<std::string>();
    f.type = j.at("type").get<std::string>();
    f.mult = j.at("mult").get<int>();
    f.add = j.at("add").get<int>();
    return f;
}

}  // namespace

std::vector<ActionRecord> parse_table(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("table is not valid JSON: ") + e.what());
    }
    if (doc.value("schema_version", 0) != 1) throw InvalidArgument("unsupported table schema version");
    std::vector<ActionRecord> out;
    try {
        for (const auto& row : doc.at("records")) {
            int variant = 0;
            for (const auto& pair : row.at("pairs")) {
                ActionRecord rec;
                rec.id = row.at("id").get<int>();
                rec.variant = variant++;
                rec.r = row.at("r").get<int>();
                rec.X = parse_family(pair.at("X"));
                rec.Y = parse_family(pair.at("Y"));
                rec.n_min = pair.at("n_min").get<int>();
                if (pair.contains("constraint")) rec.constraint = pair.at("constraint").get<std::string>();
                for (const auto& b : row.at("basis")) {
                    const auto s = b.get<std::string>();
                    if (s.size() != 1 || s[0] < 'a' || s[0] > 'f') throw InvalidArgument("bad form name " + s);
                    rec.basis_forms.push_back(s[0]);
                }
                rec.I_x_size = row.at("I_x").get<int>();
                rec.simple = row.at("simple").get<bool>();
                rec.smoothable = row.at("smoothable").get<bool>();
                rec.almost_simple = row.at("almost_simple").get<bool>();
                for (const auto& fl : row.at("flags")) rec.flags.push_back(fl.get<std::string>());
                out.push_back(std::move(rec));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed table: ") + e.what());
    }
    return out;
}

const std::vector<ActionRecord>& table() {
    static const std::vector<ActionRecord> t = parse_table(bundled_table_json());
    return t;
}

bool ConsistencyReport::passed() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.passed; });
}

namespace {

struct Checker {
    ConsistencyReport rep;
    void add(int row, std::string check, bool ok, std::string detail = {}) {
        rep.lines.push_back(CheckLine{row, std::move(check), ok, std::move(detail)});
    }
};

// Concrete X singularities a record applies to at index n.
std::vector<std::pair<std::string, int>> x_instances(const ActionRecord& rec, int n) {
    if (rec.X.type == "all") {
        std::vector<std::pair<std::string, int>> v{{"E", 6}, {"E", 7}, {"E", 8}, {"A", n}};
        if (n >= 3) v.emplace_back("D", n);
        return v;
    }
    return {{rec.X.type, rec.X.index(n)}};
}

// All non-identity elements of the group generated by the basis maps, with
// their coordinate vectors.
std::vector<std::pair<SignedMonomialMap, std::uint64_t>> group_elements(const std::vector<SignedMonomialMap>& basis) {
    std::vector<std::pair<SignedMonomialMap, std::uint64_t>> out;
    const std::uint64_t n = std::uint64_t{1} << basis.size();
    for (std::uint64_t mask = 1; mask < n; ++mask) {
        auto m = SignedMonomialMap::identity(basis[0].vars);
        std::string name;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (mask >> i & 1) {
                m = m.compose(basis[i]);
                name += basis[i].name;
            }
        m.name = name;
        out.emplace_back(m, mask);
    }
    return out;
}

void check_row_equivariance(Checker& ck, const ActionRecord& rec, int span) {
    for (Coords c : {Coords::xyz, Coords::uvy}) {
        std::vector<SignedMonomialMap> basis;
        bool available = true;
        for (char f : rec.basis_forms) {
            auto m = involution_form(f, c);
            if (!m) available = false;
            else basis.push_back(*m);
        }
        if (!available) continue;
        const auto elems = group_elements(basis);

        // the basis generates (Z/2)^r: commuting involutions with distinct products
        bool commute = true;
        for (const auto& x : basis)
            for (const auto& y : basis) commute = commute && x.compose(y) == y.compose(x);
        bool faithful = true;
        for (const auto& [m, mask] : elems) faithful = faithful && !m.is_identity();
        ck.add(rec.id, "group generated in " + to_string(c), commute && faithful);

        for (int n = rec.n_min; n < rec.n_min + span; ++n) {
            if (!rec.admits(n)) continue;
            for (const auto& [type, idx] : x_instances(rec, n)) {
                const auto f = rdp_equation(type, idx, c);
                if (!f) continue;
                const std::string where = type + std::to_string(idx) + " in " + to_string(c);
                bool ok = true;
                std::string bad;
                for (const auto& m : basis) {
                    const Invariance inv = is_invariant(m, *f);
                    if (inv == Invariance::neither) {
                        ok = false;
                        bad += " " + m.name;
                    }
                    if (m.is_diagonal() && sign_weight_invariance(m, *f) != inv) {
                        ok = false;
                        bad += " weights(" + m.name + ")";
                    }
                }
                ck.add(rec.id, "equivariance " + where, ok, bad);

                // I_x from fixed loci, and its independence
                std::vector<GVector> fixed;
                for (const auto& [m, mask] : elems)
                    if (has_divisorial_fixed_locus(m, *f)) fixed.push_back(GVector::from_index(rec.r, mask));
                const int size = static_cast<int>(fixed.size());
                ck.add(rec.id, "|I_x| " + where, size == rec.I_x_size,
                       "computed " + std::to_string(size) + ", table " + std::to_string(rec.I_x_size));
                const bool independent = is_independent(fixed);
                ck.add(rec.id, "almost simple " + where, independent == rec.almost_simple);
            }
        }
    }
}

void check_quotient(Checker& ck, const ActionRecord& rec, int span) {
    if (rec.Y.type != "B" && rec.Y.type != "Y") return;
    for (int n = std::max(rec.n_min, 1); n < rec.n_min + span; ++n) {
        const int k = rec.Y.index(n);
        const auto fam = rec.Y.type == "B" ? b_family(k) : y_family_by_type(k);
        const auto z = fundamental_cycle(ResolutionGraph::chain(fam.chain));
        const std::int64_t want = rec.Y.type == "B" ? -3 : -4;
        ck.add(rec.id, "quotient " + rec.Y.type + std::to_string(k) + " " + fam.sing.to_string() + " " + fam.chain.to_string(),
               hj(fam.sing) == fam.chain && z.self_intersection == want,
               "Z^2 = " + std::to_string(z.self_intersection));
    }
}

}  // namespace

ConsistencyReport consistency_check(const std::vector<ActionRecord>& records, int span) {
    Checker ck;
    for (char f = 'a'; f <= 'f'; ++f)
        for (Coords c : {Coords::xyz, Coords::uvy}) {
            auto m = involution_form(f, c);
            if (!m) continue;
            ck.add(0, std::string("form ") + f + " is an involution in " + to_string(c),
                   m->compose(*m).is_identity() && !m->is_identity());
        }

    std::set<int> simple, non_smoothable;
    for (const auto& rec : records) {
        if (rec.simple) simple.insert(rec.id);
        if (!rec.smoothable) non_smoothable.insert(rec.id);
        ck.add(rec.id, "basis size equals r", static_cast<int>(rec.basis_forms.size()) == rec.r);
        ck.add(rec.id, "simple implies |I_x| = r", !rec.simple || rec.I_x_size == rec.r);
        ck.add(rec.id, "almost simple implies |I_x| <= r", !rec.almost_simple || rec.I_x_size <= rec.r);
        ck.add(rec.id, "simple implies smoothable", !rec.simple || rec.smoothable);
        check_row_equivariance(ck, rec, span);
        check_quotient(ck, rec, span);
    }
    ck.rep.simple_rows.assign(simple.begin(), simple.end());
    ck.rep.non_smoothable_rows.assign(non_smoothable.begin(), non_smoothable.end());

    // smoothing of A_{2n}: the involution c extends with t fixed
    auto c = involution_form('c', Coords::uvy)->extended({"t"});
    for (int n = 1; n <= span; ++n) {
        PolySparse f({"u", "v", "y", "t"});
        f.add(1, {1, 1, 0, 0}).add(1, {0, 0, 2 * n + 1, 0}).add(1, {0, 0, 1, 1});
        const bool anti = is_invariant(c, f) == Invariance::anti_invariant &&
                          sign_weight_invariance(c, f) == Invariance::anti_invariant;
        ck.add(3, "A_{2n} smoothing family under c, n = " + std::to_string(n), anti);
    }

    // class T smoothing family uv - y^{dn} - sum t_k y^{kn} under mu_n
    // acting with weights (1, -1, a) and trivially on the parameters
    for (int d = 1; d <= 4; ++d)
        for (int n = 1; n <= 5; ++n)
            for (int a = 1; a <= n; ++a) {
                if (std::gcd(a, n) != 1) continue;
                std::vector<std::string> vars{"u", "v", "y"};
                for (int k = 0; k < d; ++k) vars.push_back("t" + std::to_string(k));
                PolySparse f(vars);
                std::vector<int> e(vars.size(), 0);
                e[0] = e[1] = 1;
                f.add(1, e);
                e.assign(vars.size(), 0);
                e[2] = d * n;
                f.add(-1, e);
                for (int k = 0; k < d; ++k) {
                    e.assign(vars.size(), 0);
                    e[2] = k * n;
                    e[3 + k] = 1;
                    f.add(-1, e);
                }
                std::vector<std::int64_t> w(vars.size(), 0);
                w[0] = 1, w[1] = -1, w[2] = a;
                // the swap (u,v,y) -> (v,u,y) preserves the family as well
                SignedMonomialMap swap;
                swap.name = "sigma";
                swap.vars = {"u", "v", "y"};
                swap.perm = {1, 0, 2};
                swap.sign = {1, 1, 1};
                std::vector<std::string> params(vars.begin() + 3, vars.end());
                const bool ok = weights_invariant(w, n, f) && is_invariant(swap.extended(params), f) == Invariance::invariant;
                ck.add(0, "class T family weights d=" + std::to_string(d) + " n=" + std::to_string(n) +
                              " a=" + std::to_string(a), ok);
            }
    return ck.rep;
}

}  // namespace tequiv
