#include "qro/bounds.hpp"
#include "qro/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace qro;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open '" + path + "'");
    json j;
    f >> j;
    return j;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_text_file(out_path, content);
}

// parses "a..b" or "a" into an inclusive range
std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const int v = std::stoi(s);
        return {v, v};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

int run_verify_correctness(const json& cfg, std::uint64_t seed, double tol,
                           const std::string& out, const std::string& format) {
    CorrectnessConfig tc;
    if (cfg.contains("Ms")) tc.ms = cfg["Ms"].get<std::vector<std::size_t>>();
    if (cfg.contains("Ns")) tc.ns = cfg["Ns"].get<std::vector<std::size_t>>();
    if (cfg.contains("qs")) tc.qs = cfg["qs"].get<std::vector<std::size_t>>();
    tc.adversaries_per_case = cfg.value("adversaries_per_case", std::size_t{50});
    tc.seed = cfg.value("seed", seed);
    tc.tol = cfg.value("tol", tol);

    {
        std::size_t worst = 0;
        for (auto m : tc.ms)
            for (auto n : tc.ns)
                for (auto q : tc.qs) {
                    std::size_t dim = m * n;
                    for (std::size_t i = 0; i < q; ++i) dim *= (m + 1) * n;
                    worst = std::max(worst, dim);
                }
        std::cerr << "state dimension (largest case): " << worst << " amplitudes\n";
        if (worst > kMaxStateAmplitudes) throw std::invalid_argument("configuration over the state cap");
    }
    const auto sweep = correctness_sweep(tc, &std::cerr);
    std::ostringstream os;
    if (format == "json") {
        json j;
        j["worst_l2"] = fmt12(sweep.worst_l2);
        j["worst_tv"] = fmt12(sweep.worst_tv);
        j["violations"] = sweep.violations;
        j["cases"] = sweep.cases.size();
        os << j.dump(2) << "\n";
    } else {
        os << "M,N,q,dist,group,seed,l2,tv\n";
        for (const auto& c : sweep.cases)
            os << c.m << "," << c.n << "," << c.q << "," << c.dist << "," << c.group << ","
               << c.seed << "," << fmt12(c.l2) << "," << fmt12(c.tv) << "\n";
    }
    emit(out, os.str());
    std::cerr << "correctness sweep: " << sweep.cases.size() << " cases, worst l2 "
              << fmt12(sweep.worst_l2) << ", violations " << sweep.violations << "\n";
    return sweep.violations == 0 ? 0 : 1;
}

int run_find_prob(const json& cfg, const std::string& out, const std::string& format) {
    const std::size_t n = cfg.value("N", std::size_t{4});
    {
        std::size_t dim = n * n;
        for (int i = 0; i < 2; ++i) dim *= (n + 1) * n;
        std::cerr << "state dimension: " << dim << " amplitudes\n";
    }
    std::vector<FindProbCase> cases = {birthday_find_case(n), preimage_find_case(n)};
    std::ostringstream os;
    if (format == "json") {
        json arr = json::array();
        for (const auto& c : cases)
            arr.push_back({{"adversary", c.adversary},
                           {"relation", c.relation},
                           {"N", c.n},
                           {"q", c.q},
                           {"p_find", fmt12(c.p_find)},
                           {"tight_bound", fmt12(c.bound_tight)},
                           {"simple_bound", fmt12(c.bound_simple)},
                           {"within_bounds", c.within_bounds}});
        os << arr.dump(2) << "\n";
    } else {
        os << "adversary,relation,N,q,p_find,tight_bound,simple_bound,within_bounds\n";
        for (const auto& c : cases)
            os << c.adversary << "," << c.relation << "," << c.n << "," << c.q << ","
               << fmt12(c.p_find) << "," << fmt12(c.bound_tight) << "," << fmt12(c.bound_simple) << ","
               << (c.within_bounds ? "true" : "false") << "\n";
    }
    emit(out, os.str());
    bool ok = true;
    for (const auto& c : cases) ok = ok && c.within_bounds;
    return ok ? 0 : 1;
}

int run_o2h(const json& cfg, std::uint64_t seed, double tol, const std::string& out,
            const std::string& format) {
    O2hSweepConfig oc;
    oc.m = cfg.value("M", std::size_t{4});
    oc.n = cfg.value("N", std::size_t{4});
    oc.max_q = cfg.value("max_q", std::size_t{3});
    oc.seeds = cfg.value("seeds", std::size_t{100});
    oc.seed = cfg.value("seed", seed);
    oc.tol = cfg.value("tol", tol);
    {
        std::size_t dim = oc.m * oc.n;
        for (std::size_t i = 0; i < oc.max_q; ++i) dim *= (oc.m + 1) * oc.n * 2;
        std::cerr << "state dimension (largest case, with deferred bits): " << dim
                  << " amplitudes\n";
        if (dim > kMaxStateAmplitudes) throw std::invalid_argument("configuration over the state cap");
    }
    const auto sweep = o2h_sweep(oc, &std::cerr);
    std::ostringstream os;
    if (format == "csv") {
        os << "seed,q,d,r1,r2,p_left,p_right,p_find2,lhs_diff,sqrt_diff,rhs_bound,holds\n";
        for (const auto& r : sweep.rows)
            os << r.seed << "," << r.q << "," << r.d << "," << r.r1 << "," << r.r2 << ","
               << fmt12(r.record.p_left) << "," << fmt12(r.record.p_right) << ","
               << fmt12(r.record.p_find2) << "," << fmt12(r.record.lhs_diff) << ","
               << fmt12(r.record.sqrt_diff) << "," << fmt12(r.record.rhs_bound) << ","
               << (r.record.holds ? "true" : "false") << "\n";
    } else {
        json j;
        j["rows"] = json::array();
        for (const auto& r : sweep.rows)
            j["rows"].push_back({{"seed", r.seed},
                                 {"q", r.q},
                                 {"d", r.d},
                                 {"r1", r.r1},
                                 {"r2", r.r2},
                                 {"p_left", fmt12(r.record.p_left)},
                                 {"p_right", fmt12(r.record.p_right)},
                                 {"p_find2", fmt12(r.record.p_find2)},
                                 {"lhs_diff", fmt12(r.record.lhs_diff)},
                                 {"sqrt_diff", fmt12(r.record.sqrt_diff)},
                                 {"rhs_bound", fmt12(r.record.rhs_bound)},
                                 {"holds", r.record.holds}});
        j["violations"] = sweep.violations;
        os << j.dump(2) << "\n";
    }
    emit(out, os.str());
    return sweep.violations == 0 ? 0 : 1;
}

int run_sponge_classical(const json& cfg, std::uint64_t seed, const std::string& out,
                         const std::string& format) {
    ClassicalSpongeConfig sc;
    sc.params.r = cfg.value("r", std::size_t{1});
    sc.params.c = cfg.value("c", std::size_t{2});
    sc.q = cfg.value("q", std::size_t{4});
    sc.runs = cfg.value("runs", cfg.value("seeds", std::size_t{100000}));
    sc.seed = cfg.value("seed", seed);
    sc.adversary = cfg.value("adversary", std::string("collision-seeker"));
    const auto rep = classical_sponge_experiment(sc);
    const int only_game = cfg.value("game", 0);
    std::ostringstream os;
    if (format == "json") {
        json j;
        j["r"] = sc.params.r;
        j["c"] = sc.params.c;
        j["q"] = sc.q;
        j["runs"] = sc.runs;
        j["adversary"] = sc.adversary;
        j["games"] = json::array();
        for (std::size_t g = 0; g < rep.games.size(); ++g) {
            if (only_game != 0 && static_cast<int>(g + 1) != only_game) continue;
            j["games"].push_back({{"game", g + 1},
                                  {"p_one", fmt12(rep.games[g].p_one)},
                                  {"p_bad", fmt12(rep.games[g].p_bad)}});
        }
        j["sigma"] = fmt12(rep.sigma);
        j["f_coll"] = fmt12(rep.f_coll_bound);
        j["holds"] = rep.holds;
        os << j.dump(2) << "\n";
    } else {
        os << "game,p_one,p_bad,sigma,f_coll,holds\n";
        for (std::size_t g = 0; g < rep.games.size(); ++g) {
            if (only_game != 0 && static_cast<int>(g + 1) != only_game) continue;
            os << (g + 1) << "," << fmt12(rep.games[g].p_one) << "," << fmt12(rep.games[g].p_bad)
               << "," << fmt12(rep.sigma) << "," << fmt12(rep.f_coll_bound) << ","
               << (rep.holds ? "true" : "false") << "\n";
        }
    }
    emit(out, os.str());
    return rep.holds ? 0 : 1;
}

int run_sponge_quantum(const json& cfg, const std::string& out, const std::string& format) {
    SpongeParams p;
    p.r = cfg.value("r", std::size_t{1});
    p.c = cfg.value("c", std::size_t{1});
    const std::size_t q = cfg.value("q", std::size_t{1});
    std::vector<QSpongeScript> scripts;
    if (cfg.contains("script_file")) {
        std::ifstream f(cfg["script_file"].get<std::string>());
        if (!f) throw std::runtime_error("cannot open script file");
        std::stringstream ss;
        ss << f.rdbuf();
        scripts.push_back(QSpongeScript::from_json_text(ss.str(), p));
    } else if (cfg.contains("script")) {
        const auto name = cfg["script"].get<std::string>();
        for (auto& s : builtin_quantum_scripts(p, q))
            if (s.name == name) scripts.push_back(std::move(s));
        if (scripts.empty()) throw std::runtime_error("unknown builtin script '" + name + "'");
    } else {
        scripts = builtin_quantum_scripts(p, q);
    }
    {
        // split database cells dominate the quantum game layouts
        std::size_t dim = p.num_states() * p.num_states();
        for (std::size_t i = 0; i < q; ++i)
            dim *= (p.num_states() + 1) * p.num_outer() * p.num_inner() * 2;
        std::cerr << "state dimension (order of the largest game): " << dim << " amplitudes\n";
    }
    std::ostringstream os;
    bool all_hold = true;
    if (format == "csv")
        os << "script,game,p_one,p_find,adv12,adv23,bound23,adv34,bound34,adv45,bound45,holds\n";
    json jout = json::array();
    for (const auto& script : scripts) {
        const auto sweep = run_quantum_game_sweep(script, p, q);
        all_hold = all_hold && sweep.holds;
        if (format == "csv") {
            for (const auto& g : sweep.games)
                os << script.name << "," << g.game << "," << fmt12(g.p_one) << ","
                   << fmt12(g.p_find) << "," << fmt12(sweep.adv12) << "," << fmt12(sweep.adv23)
                   << "," << fmt12(sweep.bound23) << "," << fmt12(sweep.adv34) << ","
                   << fmt12(sweep.bound34) << "," << fmt12(sweep.adv45) << ","
                   << fmt12(sweep.bound45) << "," << (sweep.holds ? "true" : "false") << "\n";
        } else {
            json js;
            js["script"] = script.name;
            js["games"] = json::array();
            for (const auto& g : sweep.games)
                js["games"].push_back(
                    {{"game", g.game}, {"p_one", fmt12(g.p_one)}, {"p_find", fmt12(g.p_find)}});
            js["adv12"] = fmt12(sweep.adv12);
            js["adv23"] = fmt12(sweep.adv23);
            js["bound23"] = fmt12(sweep.bound23);
            js["adv34"] = fmt12(sweep.adv34);
            js["bound34"] = fmt12(sweep.bound34);
            js["adv45"] = fmt12(sweep.adv45);
            js["bound45"] = fmt12(sweep.bound45);
            js["holds"] = sweep.holds;
            jout.push_back(std::move(js));
        }
    }
    if (format != "csv") os << jout.dump(2) << "\n";
    emit(out, os.str());
    return all_hold ? 0 : 1;
}

int run_bounds(const std::string& q_range, std::size_t n, std::size_t c, const std::string& out) {
    const auto [q_lo, q_hi] = parse_range(q_range);
    std::ostringstream os;
    os << "q,N,c,f_coll,f_coll_q,find_cp,find_cp_simple,coll_only,preim_only,db_preim,db_coll,"
          "classical_eps,quantum_eps\n";
    for (int q = q_lo; q <= q_hi; ++q) {
        const double qd = q;
        const double nd = static_cast<double>(n);
        const double cd = static_cast<double>(c);
        os << q << "," << n << "," << c << "," << fmt12(bounds::f_coll(qd, cd)) << ","
           << fmt12(bounds::f_coll_q(qd, cd)) << ","
           << (qd < nd ? fmt12(bounds::find_coll_preim_bound(qd, nd)) : "n/a") << ","
           << fmt12(bounds::weaker_coll_preim_bound(qd, nd)) << ","
           << (qd < nd ? fmt12(bounds::coll_only_bound(qd, nd)) : "n/a") << ","
           << (nd > 1 ? fmt12(bounds::preim_only_bound(qd, nd)) : "n/a") << ","
           << fmt12(bounds::db_preimage_bound(qd, nd)) << "," << fmt12(bounds::db_collision_bound(qd, nd))
           << "," << fmt12(bounds::classical_indiff_eps(qd, cd)) << ","
           << fmt12(bounds::quantum_indiff_eps(qd, cd)) << "\n";
    }
    emit(out, os.str());
    return 0;
}

int run_cpho_attack(const json& cfg, std::uint64_t seed, const std::string& out,
                    const std::string& format) {
    const std::size_t m = cfg.value("m", std::size_t{2});
    const std::size_t shots = cfg.value("shots", std::size_t{10000});
    const std::uint64_t s = cfg.value("seed", seed);
    const double rate = cpho_attack_distinguish_rate(m, shots, s);
    const double expect = 1.0 - 1.0 / static_cast<double>(std::size_t{1} << m);
    const bool ok = std::abs(rate - expect) <= 0.02;
    std::ostringstream os;
    if (format == "csv") {
        os << "m,shots,rate,expected,ok\n"
           << m << "," << shots << "," << fmt12(rate) << "," << fmt12(expect) << ","
           << (ok ? "true" : "false") << "\n";
    } else {
        json j{{"m", m}, {"shots", shots}, {"rate", fmt12(rate)}, {"expected", fmt12(expect)}, {"ok", ok}};
        os << j.dump(2) << "\n";
    }
    emit(out, os.str());
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact state-vector playground for compressed, punctured and sponge oracles"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format = "csv";
    std::uint64_t seed = 1;
    double tol = 1e-9;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--tol", tol, "comparison tolerance");
    app.add_option("--out", out_path, "output file (stdout when omitted)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* verify = app.add_subcommand("verify-correctness", "compressed-vs-full oracle sweep");
    auto* findp = app.add_subcommand("find-prob", "exact Find probabilities with bound columns");
    auto* o2h = app.add_subcommand("o2h", "one-way-to-hiding inequality sweep");
    auto* scls = app.add_subcommand("sponge-classical", "classical indifferentiability games");
    auto* sqnt = app.add_subcommand("sponge-quantum", "quantum indifferentiability games");
    auto* bnd = app.add_subcommand("bounds", "closed-form bound table");
    auto* attack = app.add_subcommand("regress-cpho-attack", "no-deletion phase-oracle attack");

    std::string q_range = "1..8";
    std::size_t bound_n = 16, bound_c = 8;
    bnd->add_option("--q", q_range, "query range, e.g. 1..8");
    bnd->add_option("--N", bound_n, "range size for the query-bound columns");
    bnd->add_option("--c", bound_c, "capacity bits for the sponge-bound columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(config_path);
        if (verify->parsed()) return run_verify_correctness(cfg, seed, tol, out_path, format);
        if (findp->parsed()) return run_find_prob(cfg, out_path, format);
        if (o2h->parsed()) return run_o2h(cfg, seed, tol, out_path, format);
        if (scls->parsed()) return run_sponge_classical(cfg, seed, out_path, format);
        if (sqnt->parsed()) return run_sponge_quantum(cfg, out_path, format);
        if (bnd->parsed()) return run_bounds(q_range, bound_n, bound_c, out_path);
        if (attack->parsed()) return run_cpho_attack(cfg, seed, out_path, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
