#include "commands.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "tequiv/construction.hpp"
#include "tequiv/lens_topology.hpp"
#include "tequiv/quotient_sings.hpp"
#include "tequiv/rdp_actions.hpp"

namespace tequiv::cli {

using io::json;
using io::to_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

Int parse_int(const std::string& s, const char* what) {
    try {
        return io::int_from_json(json(s));
    } catch (const InvalidArgument&) {
        throw InvalidArgument(std::string(what) + " must be an integer, got '" + s + "'");
    }
}

VerifyOptions verify_options(const Globals& g, VerifyMode mode) {
    VerifyOptions o;
    o.mode = mode;
    o.rank_cap = g.rank_cap;
    o.seed = g.seed;
    o.parallel = g.parallel;
    return o;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string germ_text(const Germ& g) {
    return std::holds_alternative<Smooth>(g) ? std::string("smooth") : std::get<CyclicSing>(g).to_string();
}

// ---- sing ----------------------------------------------------------------

void add_sing_normalize(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("normalize", "Normal form 1/p(1,q) of 1/p(a,b)");
    auto args = std::make_shared<std::array<std::int64_t, 3>>();
    c->add_option("P", (*args)[0])->required();
    c->add_option("A", (*args)[1])->required();
    c->add_option("B", (*args)[2])->required();
    c->callback([args, &action] {
        action = [args] {
            const auto [p, a, b] = *args;
            const Germ g = normalize(p, a, b);
            json payload = {{"input", {p, a, b}}, {"germ", to_json(g)}};
            return Outcome{payload, germ_text(g) + "\n"};
        };
    });
}

void add_sing_hj(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("hj", "Hirzebruch-Jung chain of 1/p(1,q)");
    auto args = std::make_shared<std::array<std::int64_t, 2>>();
    c->add_option("P", (*args)[0])->required();
    c->add_option("Q", (*args)[1])->required();
    c->callback([args, &action] {
        action = [args] {
            const Germ g = normalize((*args)[0], 1, (*args)[1]);
            const HJChain chain = std::holds_alternative<Smooth>(g) ? HJChain{} : hj(std::get<CyclicSing>(g));
            json payload = {{"germ", to_json(g)}, {"chain", to_json(chain)}};
            return Outcome{payload, germ_text(g) + ": " + chain.to_string() + "\n"};
        };
    });
}

void add_sing_class_t(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("class-t", "Decide class T for 1/p(a,b); exit 1 when it is not");
    auto args = std::make_shared<std::array<std::int64_t, 3>>();
    c->add_option("P", (*args)[0])->required();
    c->add_option("A", (*args)[1])->required();
    c->add_option("B", (*args)[2])->required();
    c->callback([args, &action] {
        action = [args] {
            const auto [p, a, b] = *args;
            const Germ g = normalize(p, a, b);
            const ClassTKind kind = class_t_kind(g);
            json payload = {{"germ", to_json(g)}, {"kind", to_string(kind)}, {"witness", nullptr}};
            std::string text = germ_text(g) + ": " + to_string(kind);
            if (const auto* s = std::get_if<CyclicSing>(&g)) {
                if (const auto w = class_t_witness(*s)) {
                    payload["witness"] = {{"d", w->d}, {"n", w->n}, {"a", w->a}};
                    text += " (d=" + std::to_string(w->d) + ", n=" + std::to_string(w->n) +
                            ", a=" + std::to_string(w->a) + ")";
                }
            }
            return Outcome{payload, text + "\n", kind == ClassTKind::none ? 1 : 0};
        };
    });
}

void add_sing_families(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("families", "The B and Y families with chains and labels");
    auto max_n = std::make_shared<std::int64_t>(6);
    auto offset = std::make_shared<int>(0);
    c->add_option("--max-n", *max_n)->capture_default_str()->check(CLI::Range(1, 100000));
    c->add_option("--y-offset", *offset, "Y subscript convention (0 or 1)")->capture_default_str()->check(
        CLI::Range(0, 1));
    c->callback([max_n, offset, &action] {
        action = [max_n, offset] {
            json rows = json::array();
            std::string text;
            for (std::int64_t n = 1; n <= *max_n; ++n) {
                const auto bm = b_family(n);
                const auto ym = y_family_by_type(n);
                const auto label = y_label(n, YLabelConvention{*offset});
                rows.push_back({{"n", n},
                                {"B", {{"sing", bm.sing.to_string()}, {"chain", bm.chain.b}}},
                                {"Y", {{"label", label}, {"sing", ym.sing.to_string()}, {"chain", ym.chain.b}}}});
                text += "B_" + std::to_string(n) + " = " + bm.sing.to_string() + " " + bm.chain.to_string() +
                        "    Y_" + std::to_string(label) + " = " + ym.sing.to_string() + " " + ym.chain.to_string() +
                        "\n";
            }
            return Outcome{json{{"y_offset", *offset}, {"families", rows}}, text};
        };
    });
}

void add_sing_cycle(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("cycle", "Fundamental cycle of a chain -b1, ..., -bk");
    auto b = std::make_shared<std::vector<std::int64_t>>();
    c->add_option("B", *b)->required();
    c->callback([b, &action] {
        action = [b] {
            const auto g = ResolutionGraph::chain(HJChain{*b});
            const auto z = fundamental_cycle(g);
            json payload = {{"chain", *b},
                            {"coefficients", z.coefficients},
                            {"self_intersection", z.self_intersection},
                            {"steps", z.steps}};
            std::string text = "Z =";
            for (auto x : z.coefficients) text += " " + std::to_string(x);
            text += ", Z^2 = " + std::to_string(z.self_intersection) + "\n";
            return Outcome{payload, text};
        };
    });
}

void add_sing_q2(CLI::App& sing, Action& action) {
    auto* c = sing.add_subcommand("q2", "Check (dna - 1)^2 = 1 mod dn^2; exit 1 when it fails");
    auto args = std::make_shared<std::array<std::int64_t, 3>>();
    c->add_option("D", (*args)[0])->required();
    c->add_option("N", (*args)[1])->required();
    c->add_option("A", (*args)[2])->required();
    c->callback([args, &action] {
        action = [args] {
            const auto [d, n, a] = *args;
            const bool ok = q2_criterion(d, n, a);
            return Outcome{json{{"d", d}, {"n", n}, {"a", a}, {"holds", ok}}, std::string(ok ? "holds" : "fails") + "\n",
                           ok ? 0 : 1};
        };
    });
}

// ---- lens -----------------------------------------------------------------

json mcg_json(const MCGReport& r) {
    return {{"lens", r.lens.to_string()},
            {"sigma_defined", r.sigma_defined},
            {"sigma_isotopic_to_id", r.sigma_isotopic_to_id},
            {"sigma_tau_isotopic_to_id", r.sigma_tau_isotopic_to_id},
            {"generators", r.generators}};
}

// ---- obstruct ---------------------------------------------------------------

MilnorLattice parse_source(const std::string& s) {
    static const std::vector<std::pair<std::string, MilnorKind>> prefixes{
        {"Ysim", MilnorKind::Y_simultaneous}, {"Yqg", MilnorKind::Y_qgorenstein}, {"A", MilnorKind::A},
        {"D", MilnorKind::D},                 {"E", MilnorKind::E},              {"B", MilnorKind::B}};
    for (const auto& [p, kind] : prefixes) {
        if (s.rfind(p, 0) != 0) continue;
        const auto rest = s.substr(p.size());
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 6) break;
        return milnor_lattice(kind, std::stoi(rest));
    }
    throw InvalidArgument("unknown lattice '" + s + "' (use A<n>, D<n>, E<n>, B<n>, Ysim<n> or Yqg<n>)");
}

AmbientModel parse_ambient(const std::string& s) {
    for (auto a : {AmbientModel::PlaneC2, AmbientModel::BlowupC2, AmbientModel::BlowupCxP1TwoPoints})
        if (s == to_string(a)) return a;
    if (s == "Bl1") return AmbientModel::BlowupC2;
    if (s == "Bl2") return AmbientModel::BlowupCxP1TwoPoints;
    throw InvalidArgument("unknown ambient '" + s + "' (use C2, Bl1 or Bl2)");
}

// ---- cover ------------------------------------------------------------------

struct ExtendInput {
    int rank = 0;
    Subspace h;
    BranchMap d_on_h;
    GVector eta;
    DivClass v;
    LinearFunctional alpha;
    Int n_bound = 0;
};

ExtendInput parse_extend(const json& j) {
    ExtendInput in;
    in.rank = j.at("rank").get<int>();
    const auto n = j.at("n").get<std::size_t>();
    std::vector<GVector> gens;
    for (const auto& s : j.at("H")) gens.push_back(GVector::parse(s.get<std::string>()));
    for (const auto& s : gens)
        if (s.rank() != in.rank) throw InvalidArgument("generator " + s.to_string() + " has the wrong rank");
    in.h = Subspace::span(in.rank, gens);
    in.d_on_h = BranchMap(in.rank, n);
    for (const auto& e : j.at("D")) {
        const auto sigma = GVector::parse(e.at("sigma").get<std::string>());
        if (sigma.rank() != in.rank) throw InvalidArgument("element " + sigma.to_string() + " has the wrong rank");
        in.d_on_h.add(sigma, io::class_from_json(e.at("class"), n));
    }
    in.eta = GVector::parse(j.at("eta").get<std::string>());
    in.v = io::class_from_json(j.at("v"), n);
    const auto& a = j.at("alpha");
    if (a.contains("intersection_with")) {
        in.alpha = LinearFunctional::intersection_with(io::class_from_json(a.at("intersection_with"), n));
    } else {
        in.alpha.r = io::int_from_json(a.at("r"));
        in.alpha.s = io::int_from_json(a.at("s"));
        for (const auto& x : a.at("a")) in.alpha.a.push_back(io::int_from_json(x));
        if (in.alpha.a.size() != n) throw InvalidArgument("alpha needs one coefficient per exceptional curve");
    }
    in.n_bound = io::int_from_json(j.at("N"));
    return in;
}

std::string bounds_text(const CoverReport& r) {
    std::string t;
    for (const auto& b : r.bounds)
        t += "  " + b.coordinate + " in [" + b.lo.str() + ", " + b.hi.str() + "]\n";
    return t;
}

// ---- construct --------------------------------------------------------------

FactorParams parse_factor(const std::string& s) {
    std::vector<std::int64_t> v;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos || part.size() > 12)
            throw InvalidArgument("factor must be a,b,n with non-negative integers, got '" + s + "'");
        v.push_back(std::stoll(part));
    }
    if (v.size() != 3) throw InvalidArgument("factor must be a,b,n, got '" + s + "'");
    return FactorParams{v[0], v[1], v[2], std::nullopt};
}

}  // namespace

void add_sing(CLI::App& app, const Globals&, Action& action) {
    auto* sing = app.add_subcommand("sing", "Cyclic quotient singularities");
    sing->require_subcommand(1);
    add_sing_normalize(*sing, action);
    add_sing_hj(*sing, action);
    add_sing_class_t(*sing, action);
    add_sing_families(*sing, action);
    add_sing_cycle(*sing, action);
    add_sing_q2(*sing, action);
}

void add_lens(CLI::App& app, const Globals&, Action& action) {
    auto* lens = app.add_subcommand("lens", "Lens-space links and their mapping classes");
    lens->require_subcommand(1);

    auto* link = lens->add_subcommand("link", "Link of 1/p(1,q) and the sigma/tau classes");
    auto la = std::make_shared<std::array<std::int64_t, 2>>();
    link->add_option("P", (*la)[0])->required();
    link->add_option("Q", (*la)[1])->required();
    link->callback([la, &action] {
        action = [la] {
            const Germ g = normalize((*la)[0], 1, (*la)[1]);
            const auto l = link_of(g);
            const auto r = mcg(l);
            std::string text = germ_text(g) + ": " + l.to_string() + "\n";
            text += "  sigma defined: " + yes_no(r.sigma_defined) + "\n";
            text += "  sigma isotopic to id: " + yes_no(r.sigma_isotopic_to_id) + "\n";
            text += "  sigma*tau isotopic to id: " + yes_no(r.sigma_tau_isotopic_to_id) + "\n";
            text += "  generators:";
            for (const auto& s : r.generators) text += " " + s;
            text += "\n";
            return Outcome{json{{"germ", to_json(g)}, {"mcg", mcg_json(r)}}, text};
        };
    });

    auto* cmp = lens->add_subcommand("compare", "Whether two singularities have the same link; exit 1 if not");
    auto ca = std::make_shared<std::array<std::int64_t, 4>>();
    cmp->add_option("P1", (*ca)[0])->required();
    cmp->add_option("Q1", (*ca)[1])->required();
    cmp->add_option("P2", (*ca)[2])->required();
    cmp->add_option("Q2", (*ca)[3])->required();
    cmp->callback([ca, &action] {
        action = [ca] {
            const Germ x = normalize((*ca)[0], 1, (*ca)[1]);
            const Germ y = normalize((*ca)[2], 1, (*ca)[3]);
            const bool same = same_link(x, y);
            json payload = {{"first", link_of(x).to_string()}, {"second", link_of(y).to_string()}, {"same", same}};
            return Outcome{payload,
                           link_of(x).to_string() + (same ? " = " : " != ") + link_of(y).to_string() + "\n",
                           same ? 0 : 1};
        };
    });
}

void add_obstruct(CLI::App& app, const Globals&, Action& action) {
    auto* ob = app.add_subcommand("obstruct", "Lattice embedding obstructions");
    ob->require_subcommand(1);

    auto* verdicts = ob->add_subcommand("verdicts", "All embedding verdicts up to --max-n; exit 1 on a disagreement");
    auto max_n = std::make_shared<int>(6);
    verdicts->add_option("--max-n", *max_n)->capture_default_str()->check(CLI::Range(1, 64));
    verdicts->callback([max_n, &action] {
        action = [max_n] {
            const auto verdicts = obstruction_verdicts(*max_n);
            json rows = json::array();
            std::string text;
            bool all = true;
            for (const auto& v : verdicts) {
                rows.push_back(to_json(v));
                all = all && v.agrees();
                text += std::string(v.agrees() ? "ok   " : "FAIL ") + v.obstruction + ": " + v.source + " -> " +
                        to_string(v.ambient) + " embeds=" + (v.result.embeds ? "yes" : "no") + " expected=" +
                        (v.expected ? "yes" : "no") + " (" + v.result.decided_by + ")\n";
            }
            return Outcome{json{{"max_n", *max_n}, {"verdicts", rows}, {"all_agree", all}}, text, all ? 0 : 1};
        };
    });

    auto* emb = ob->add_subcommand("embed", "Whether a Milnor lattice embeds in an ambient lattice");
    auto src = std::make_shared<std::string>();
    auto amb = std::make_shared<std::string>();
    emb->add_option("SOURCE", *src, "A<n>, D<n>, E<n>, B<n>, Ysim<n> or Yqg<n>")->required();
    emb->add_option("AMBIENT", *amb, "C2, Bl1 or Bl2")->required();
    emb->callback([src, amb, &action] {
        action = [src, amb] {
            const auto lattice = parse_source(*src);
            const auto ambient = parse_ambient(*amb);
            const auto r = embeds(lattice, ambient);
            json payload = {{"source", lattice.name}, {"ambient", to_string(ambient)}, {"result", to_json(r)}};
            return Outcome{payload, lattice.name + " -> " + to_string(ambient) + ": " +
                                        (r.embeds ? "embeds" : "does not embed") + " (" + r.decided_by + ")\n"};
        };
    });
}

void add_cover(CLI::App& app, const Globals& g, Action& action) {
    auto* cover = app.add_subcommand("cover", "Building data of (Z/2)^r covers");
    cover->require_subcommand(1);

    auto* verify = cover->add_subcommand("verify", "Check the cover condition; exit 1 when it fails");
    auto file = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("exhaustive");
    verify->add_option("FILE", *file, "Building data JSON")->required();
    verify->add_option("--mode", *mode)->capture_default_str()->check(
        CLI::IsMember({"exhaustive", "sampled", "bounded"}));
    verify->callback([file, mode, &g, &action] {
        action = [file, mode, &g] {
            const auto bytes = read_file(*file);
            const auto data = io::building_data_from_json(json::parse(bytes));
            const auto opts = verify_options(g, parse_verify_mode(*mode));
            const auto rep = verify_all(data, opts);
            json payload = {{"rank", data.rank()}, {"n", data.D().n()}, {"cover", to_json(rep)}};
            std::string text = "cover condition (" + *mode + ", " + rep.pairs_checked.str() +
                               " pairs): " + (rep.passed ? "holds" : "FAILS") + "\n" + bounds_text(rep);
            payload["ramification"] = to_json(ramification_profile(data, g.rank_cap));
            payload["invariants"] = nullptr;
            if (rep.passed) {
                try {
                    const auto inv = invariants(data, g.rank_cap);
                    payload["invariants"] = to_json(inv);
                    text += "K^2 = " + inv.K2.str() + ", chi = " + inv.chi.str() + " (" + inv.chi_route + ")\n";
                } catch (const RankCapExceeded&) {
                    text += "invariants skipped: rank above the cap\n";
                }
            }
            const auto cor = check_vanishing(data, opts);
            payload["vanishing"] = to_json(cor);
            text += std::string("vanishing conditions: ") + (cor.passed() ? "hold" : "not shown") + "\n";
            return Outcome{payload, text, rep.passed ? 0 : 1, bytes};
        };
    });

    auto* extend = cover->add_subcommand("extend", "Extend D from a subspace with ample L - D and D outside it");
    auto efile = std::make_shared<std::string>();
    extend->add_option("FILE", *efile, "Extension problem JSON")->required();
    extend->callback([efile, &g, &action] {
        action = [efile, &g] {
            const auto bytes = read_file(*efile);
            const auto in = parse_extend(json::parse(bytes));
            AmpleExtensionOptions o;
            o.q_cap = parse_int(g.q_cap, "--q-cap");
            o.rank_cap = g.rank_cap;
            const auto r = ample_extension(in.rank, in.h, in.d_on_h, in.eta, in.v, in.alpha, in.n_bound, o);
            const auto rep = verify_all(r.data, verify_options(g, VerifyMode::exhaustive));
            const bool ok = rep.passed && r.min_l_minus_d >= in.n_bound && r.min_d_outside >= in.n_bound;
            json payload = {{"q", to_json(r.q)},
                            {"N", to_json(in.n_bound)},
                            {"min_l_minus_d", to_json(r.min_l_minus_d)},
                            {"min_d_outside", to_json(r.min_d_outside)},
                            {"cover", to_json(rep)},
                            {"data", to_json(r.data)}};
            std::string text = "q = " + r.q.str() + ": min alpha(L - D) = " + r.min_l_minus_d.str() +
                               ", min alpha(D) outside H = " + r.min_d_outside.str() + ", cover condition " +
                               (rep.passed ? "holds" : "FAILS") + "\n";
            return Outcome{payload, text, ok ? 0 : 1, bytes};
        };
    });
}

void add_actions(CLI::App& app, const Globals&, Action& action) {
    auto* act = app.add_subcommand("actions", "(Z/2)^r-actions on rational double points");
    act->require_subcommand(1);

    act->add_subcommand("table", "The classification table, one line per pairing")->callback([&action] {
        action = [] {
            json rows = json::array();
            std::string text;
            for (const auto& r : table()) {
                rows.push_back(to_json(r));
                std::string forms;
                for (char f : r.basis_forms) forms += f;
                text += std::to_string(r.id) + "." + std::to_string(r.variant) + "  r=" + std::to_string(r.r) + "  " +
                        r.X.label + " -> " + r.Y.label + "  forms " + forms + "  |I_x|=" + std::to_string(r.I_x_size) +
                        (r.simple ? "  simple" : "") + (r.smoothable ? "" : "  non-smoothable") +
                        (r.constraint ? "  (" + *r.constraint + ")" : "") + "\n";
            }
            return Outcome{json{{"records", rows}}, text};
        };
    });

    auto* check = act->add_subcommand("check", "Validate the table against computation; exit 1 on a failure");
    auto span = std::make_shared<int>(8);
    check->add_option("--span", *span, "Indices checked per row")->capture_default_str()->check(CLI::Range(1, 64));
    check->callback([span, &action] {
        action = [span] {
            const auto rep = consistency_check(table(), *span);
            std::string text;
            std::size_t failed = 0;
            for (const auto& l : rep.lines)
                if (!l.passed) {
                    ++failed;
                    text += "FAIL row " + std::to_string(l.row) + " " + l.check + ": " + l.detail + "\n";
                }
            text += std::to_string(rep.lines.size() - failed) + "/" + std::to_string(rep.lines.size()) +
                    " checks passed\n";
            return Outcome{to_json(rep), text, rep.passed() ? 0 : 1};
        };
    });
}

void add_construct(CLI::App& app, const Globals& g, Action& action) {
    auto* c = app.add_subcommand("construct", "Build and certify the branch data for k curve configurations");
    struct Args {
        int k = 0;
        std::vector<std::string> factors;
        std::string mode = "bounded";
        std::string multiplier = "1";
        std::string out;
    };
    auto args = std::make_shared<Args>();
    c->add_option("--k", args->k, "Number of factors (defaults to the number of --factor)");
    c->add_option("--factor", args->factors, "a,b,n; repeat once per factor")->required();
    c->add_option("--mode", args->mode)->capture_default_str()->check(CLI::IsMember({"exhaustive", "bounded"}));
    c->add_option("--multiplier", args->multiplier, "Starting multiplier M")->capture_default_str();
    c->add_option("--out", args->out, "Write the certificate JSON here");
    c->callback([args, &g, &action] {
        action = [args, &g] {
            ConstructionInput in;
            for (const auto& f : args->factors) in.factors.push_back(parse_factor(f));
            in.k = args->k > 0 ? args->k : static_cast<int>(in.factors.size());
            in.mode = parse_verify_mode(args->mode);
            in.multiplier = parse_int(args->multiplier, "--multiplier");
            in.m_cap = parse_int(g.m_cap, "--m-cap");
            in.seed = g.seed;
            in.rank_cap = g.rank_cap;
            in.parallel = g.parallel;
            const auto cert = certify(in);
            const json cj = to_json(cert);
            if (!args->out.empty()) {
                std::ofstream out(args->out, std::ios::binary);
                if (!out) throw InvalidArgument("cannot write " + args->out);
                out << cj.dump(2) << '\n';
            }
            std::string text = "G = (Z/2)^" + std::to_string(cert.layout.rank) + " on Bl_" +
                               std::to_string(cert.layout.exceptional_count) + "(P1xP1), M = " +
                               cert.multiplier_used.str() + "\n";
            text += std::string("  cover condition: ") + (cert.cover.passed ? "holds" : "FAILS") + " (" +
                    to_string(cert.cover.mode) + ")\n";
            text += std::string("  L - D ample: ") + (cert.l_minus_d.passed ? "yes" : "no") + "\n";
            text += std::string("  prescription: ") + (cert.prescription.passed() ? "yes" : "no") + "\n";
            text += std::string("  D ample off G': ") + (cert.coset_ample.passed ? "yes" : "no") + "\n";
            text += std::string("  vanishing conditions: ") + (cert.vanishing.passed() ? "hold" : "not shown") + "\n";
            text += "  K^2 = " + cert.invariants.K2.str() + ", chi = " + cert.invariants.chi.str() + "\n";
            if (cert.component_lower_bound)
                text += "  components of the moduli space: at least " + cert.component_lower_bound->str() + "\n";
            text += std::string("certificate: ") + (cert.passed() ? "PASS" : "FAIL") + "\n";
            return Outcome{cj, text, cert.passed() ? 0 : 1};
        };
    });
}

}  // namespace tequiv::cli
