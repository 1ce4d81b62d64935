#include "tequiv/io/json_io.hpp"

#include <cstdio>

namespace tequiv::io {

namespace {

template <class Tag>
std::vector<std::string> bit_strings(const std::vector<Bits<Tag>>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& b : v) out.push_back(b.to_string());
    return out;
}

json classes(const std::vector<DivClass>& v) {
    json out = json::array();
    for (const auto& c : v) out.push_back(to_json(c));
    return out;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field: ") + key);
    return j.at(key);
}

template <class Tag>
Bits<Tag> bits_from_json(const json& j, int rank) {
    if (!j.is_string()) throw InvalidArgument("expected a bit string");
    auto b = Bits<Tag>::parse(j.get<std::string>());
    if (b.rank() != rank)
        throw InvalidArgument("bit string " + j.get<std::string>() + " has the wrong length for rank " +
                              std::to_string(rank));
    return b;
}

json opt_int(const std::optional<Int>& v) { return v ? to_json(*v) : json(nullptr); }

}  // namespace

json to_json(const Int& v) {
    if (fits_int64(v)) return json(v.convert_to<std::int64_t>());
    return json(v.str());
}

Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        const auto digits = s.find_first_not_of('-');
        if (s.empty() || digits > 1 || digits == s.size() ||
            s.find_first_not_of("0123456789", digits) != std::string::npos)
            throw InvalidArgument("not an integer: " + s);
        return Int(s);
    }
    throw InvalidArgument("expected an integer, got " + j.dump());
}

json to_json(const DivClass& c) {
    json a = json::array();
    for (const auto& x : c.a) a.push_back(to_json(x));
    return {{"r", to_json(c.r)}, {"s", to_json(c.s)}, {"a", a}};
}

DivClass class_from_json(const json& j, std::size_t n) {
    DivClass c(n);
    c.r = int_from_json(field(j, "r"));
    c.s = int_from_json(field(j, "s"));
    const auto& a = field(j, "a");
    if (!a.is_array() || a.size() != n)
        throw InvalidArgument("class needs exactly " + std::to_string(n) + " exceptional coefficients");
    for (std::size_t i = 0; i < n; ++i) c.a[i] = int_from_json(a[i]);
    return c;
}

json to_json(const BranchMap& d) {
    json entries = json::array();
    for (const auto& [sigma, c] : d.entries()) entries.push_back({{"sigma", sigma.to_string()}, {"class", to_json(c)}});
    json out = {{"rank", d.rank()}, {"n", d.n()}, {"D", entries}};
    if (const auto& u = d.uniform())
        out["D_uniform"] = {{"psi", u->psi.to_string()}, {"base", to_json(u->base)}};
    return out;
}

json to_json(const BuildingData& data) {
    json out = to_json(data.D());
    out["basis"] = bit_strings(data.basis());
    out["L"] = classes(data.L_basis());
    return out;
}

BuildingData building_data_from_json(const json& j) {
    const int rank = field(j, "rank").get<int>();
    const auto n = field(j, "n").get<std::size_t>();
    BranchMap d(rank, n);
    for (const auto& e : field(j, "D")) {
        const auto sigma = bits_from_json<ElementTag>(field(e, "sigma"), rank);
        d.add(sigma, class_from_json(field(e, "class"), n));
    }
    if (j.contains("D_uniform")) {
        const auto& u = j.at("D_uniform");
        d.set_uniform(bits_from_json<CharacterTag>(field(u, "psi"), rank), class_from_json(field(u, "base"), n));
    }
    std::vector<GVector> basis;
    if (j.contains("basis"))
        for (const auto& b : j.at("basis")) basis.push_back(bits_from_json<ElementTag>(b, rank));
    if (!j.contains("L")) return solve(d, basis);
    if (basis.empty()) basis = GroupF2(rank).standard_basis();
    std::vector<DivClass> l;
    for (const auto& c : j.at("L")) l.push_back(class_from_json(c, n));
    if (l.size() != basis.size()) throw InvalidArgument("L needs one class per basis element");
    return BuildingData(d, basis, l);
}

json to_json(const CoverReport& r) {
    json failures = json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"chi", f.chi.to_string()}, {"eta", f.eta.to_string()}, {"defect", to_json(f.defect)}});
    json bounds = json::array();
    for (const auto& b : r.bounds)
        bounds.push_back({{"coordinate", b.coordinate}, {"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}});
    return {{"mode", to_string(r.mode)},
            {"pairs_checked", to_json(r.pairs_checked)},
            {"failure_count", to_json(r.failure_count)},
            {"failures", failures},
            {"bounds", bounds},
            {"passed", r.passed}};
}

json to_json(const VanishingReport& r) {
    json failures = json::array();
    for (const auto& o : r.failures) {
        json f = {{"kind", o.kind}, {"chi", o.chi.to_string()}, {"value", to_json(o.value)}};
        f["sigma"] = o.sigma ? json(o.sigma->to_string()) : json(nullptr);
        failures.push_back(f);
    }
    return {{"mode", to_string(r.mode)},
            {"l_ample", r.l_ample},
            {"l_minus_d_ample", r.l_minus_d_ample},
            {"obligations_checked", to_json(r.obligations_checked)},
            {"obligations_failed", to_json(r.obligations_failed)},
            {"failures", failures},
            {"families", r.families},
            {"passed", r.passed()}};
}

json to_json(const InvariantReport& r) {
    return {{"K2", to_json(r.K2)},
            {"chi", to_json(r.chi)},
            {"K2_cross", to_json(r.K2_cross)},
            {"chi_cross", to_json(r.chi_cross)},
            {"chi_route", r.chi_route},
            {"chi_cross_route", r.chi_cross_route},
            {"consistent", r.consistent}};
}

json to_json(const RamificationProfile& r) {
    json out = {{"I_size", to_json(r.I_size)}, {"totally_ramified", r.totally_ramified}, {"simple", r.simple}};
    out["I"] = r.I ? json(bit_strings(*r.I)) : json(nullptr);
    return out;
}

json to_json(const AmpleCheck& r) {
    return {{"mode", to_string(r.mode)},
            {"covered", to_json(r.covered)},
            {"classes_checked", to_json(r.classes_checked)},
            {"failed", to_json(r.failed)},
            {"failures", r.failures},
            {"min_margin", opt_int(r.min_margin)},
            {"passed", r.passed}};
}

json to_json(const PrescriptionCheck& r) {
    return {{"alpha_ok", r.alpha_ok},
            {"eps_fibre_ok", r.eps_fibre_ok},
            {"zero_elsewhere_ok", r.zero_elsewhere_ok},
            {"elements_checked", to_json(r.elements_checked)},
            {"mismatches", r.mismatches},
            {"passed", r.passed()}};
}

json to_json(const Germ& g) {
    if (std::holds_alternative<Smooth>(g)) return {{"smooth", true}, {"p", 1}, {"q", 0}, {"text", "smooth"}};
    const auto& s = std::get<CyclicSing>(g);
    return {{"smooth", false}, {"p", s.p}, {"q", s.q}, {"text", s.to_string()}};
}

json to_json(const HJChain& c) { return {{"b", c.b}, {"text", c.to_string()}}; }

json to_json(const EmbedResult& r) {
    json out = {{"embeds", r.embeds}, {"decided_by", r.decided_by}, {"box", r.box}, {"nodes", r.nodes}};
    out["witness"] = r.witness ? json(*r.witness) : json(nullptr);
    return out;
}

json to_json(const Verdict& v) {
    return {{"obstruction", v.obstruction},
            {"source", v.source},
            {"ambient", to_string(v.ambient)},
            {"expected", v.expected},
            {"embeds", v.result.embeds},
            {"decided_by", v.result.decided_by},
            {"nodes", v.result.nodes},
            {"agrees", v.agrees()}};
}

json to_json(const ActionRecord& r) {
    json forms = json::array();
    for (char f : r.basis_forms) forms.push_back(std::string(1, f));
    json out = {{"id", r.id},
                {"variant", r.variant},
                {"r", r.r},
                {"X", r.X.label},
                {"Y", r.Y.label},
                {"n_min", r.n_min},
                {"basis_forms", forms},
                {"I_x_size", r.I_x_size},
                {"simple", r.simple},
                {"smoothable", r.smoothable},
                {"almost_simple", r.almost_simple},
                {"flags", r.flags}};
    out["constraint"] = r.constraint ? json(*r.constraint) : json(nullptr);
    return out;
}

json to_json(const ConsistencyReport& r) {
    json lines = json::array();
    for (const auto& l : r.lines)
        lines.push_back({{"row", l.row}, {"check", l.check}, {"passed", l.passed}, {"detail", l.detail}});
    return {{"lines", lines},
            {"simple_rows", r.simple_rows},
            {"non_smoothable_rows", r.non_smoothable_rows},
            {"passed", r.passed()}};
}

json to_json(const FactorModuli& m) {
    json fams = json::array();
    for (const auto& f : m.families)
        fams.push_back({{"L", {f.lr, f.ls}}, {"shift", f.shift}, {"dim", f.dim}, {"h0", f.h0}});
    json out = {{"a", m.params.a}, {"b", m.params.b}, {"n", m.params.n}, {"genus", m.genus}, {"families", fams}};
    out["split"] = m.split ? json{{"l", m.split->l}, {"c", m.split->c}} : json(nullptr);
    out["h1_theta"] = m.h1_theta ? json(*m.h1_theta) : json(nullptr);
    return out;
}

json to_json(const Certificate& c) {
    json factors = json::array();
    for (const auto& f : c.input.factors) {
        json fj = {{"a", f.a}, {"b", f.b}, {"n", f.n}};
        fj["bn_split"] = f.bn_split ? json{{"l", f.bn_split->l}, {"c", f.bn_split->c}} : json(nullptr);
        factors.push_back(fj);
    }
    json moduli = json::array();
    for (const auto& m : c.moduli) moduli.push_back(to_json(m));
    json out = {
        {"input",
         {{"k", c.input.k},
          {"factors", factors},
          {"multiplier", to_json(c.input.multiplier)},
          {"mode", to_string(c.input.mode)},
          {"seed", c.input.seed},
          {"rank_cap", c.input.rank_cap},
          {"m_cap", to_json(c.input.m_cap)}}},
        {"layout",
         {{"rank", c.layout.rank}, {"exceptional_count", c.layout.exceptional_count}, {"names", c.layout.names}}},
        {"multiplier_used", to_json(c.multiplier_used)},
        {"attempts", c.attempts},
        {"data", to_json(c.data)},
        {"cover", to_json(c.cover)},
        {"l_minus_d", to_json(c.l_minus_d)},
        {"prescription", to_json(c.prescription)},
        {"coset_ample", to_json(c.coset_ample)},
        {"vanishing", to_json(c.vanishing)},
        {"monotone_in_m", c.monotone_in_m},
        {"min_slope", to_json(c.min_slope)},
        {"invariants", to_json(c.invariants)},
        {"moduli", moduli},
        {"diffeomorphic_family", c.diffeomorphic_family},
        {"passed", c.passed()}};
    out["cover_sampled"] = c.cover_sampled ? to_json(*c.cover_sampled) : json(nullptr);
    out["component_lower_bound"] = opt_int(c.component_lower_bound);
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json make_report(const std::vector<std::string>& command, const std::string& input_hash, json payload,
                 double timing_ms) {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"input_hash", input_hash},
            {"payload", std::move(payload)},
            {"timing_ms", timing_ms}};
}

}  // namespace tequiv::io
