#include "qro/harness.hpp"

#include "qro/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qro {

std::string fmt12(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::size_t guard_dimension(const RegisterLayout& layout, std::ostream* log) {
    const std::size_t dim = layout.total_dim();
    if (log) *log << "state dimension: " << dim << " amplitudes\n";
    if (dim > kMaxStateAmplitudes)
        throw std::invalid_argument("experiment would allocate " + std::to_string(dim) +
                                    " amplitudes, over the cap of " +
                                    std::to_string(kMaxStateAmplitudes));
    return dim;
}

void CompressedHandle::query_layer(QState& state,
                                   std::span<const std::pair<std::string, std::string>> xy_pairs) {
    for (const auto& [x, y] : xy_pairs) oracle->query(state, x, y);
}

void FullHandle::query_layer(QState& state,
                             std::span<const std::pair<std::string, std::string>> xy_pairs) {
    for (const auto& [x, y] : xy_pairs) oracle->query(state, x, y);
}

QState run_vs_compressed(const AdversarySpec& spec, const CompressedOracle& oracle) {
    std::vector<Register> regs = spec.registers;
    for (const auto& r : oracle.layout_registers()) regs.push_back(r);
    RegisterLayout layout(std::move(regs));
    guard_dimension(layout);
    QState state = QState::zero_state(layout);
    oracle.prepare_rest_state(state);
    CompressedHandle handle(oracle);
    run_adversary_steps(spec, state, handle);
    return state;
}

QState run_vs_full(const AdversarySpec& spec, const FullOracle& oracle) {
    std::vector<Register> regs = spec.registers;
    for (const auto& r : oracle.layout_registers()) regs.push_back(r);
    RegisterLayout layout(std::move(regs));
    guard_dimension(layout);
    QState state = QState::zero_state(layout);
    oracle.prepare_initial_state(state);
    FullHandle handle(oracle);
    run_adversary_steps(spec, state, handle);
    return state;
}

CorrectnessCase correctness_compare(const ProductDistribution& dist, GroupOp group, std::size_t q,
                              const AdversarySpec& spec) {
    CompressedOracle cfo(dist, group, q, CompressedPicture::cfo);
    QState cstate = run_vs_compressed(spec, cfo);
    QState decompressed = cfo.decompress(cstate);

    FullOracle fo(dist, group, FullPicture::fourier);
    QState fstate = run_vs_full(spec, fo);

    CorrectnessCase res;
    res.m = dist.domain_size();
    res.n = dist.range_size();
    res.q = q;
    res.dist = dist.kind();
    res.group = group.name();
    res.l2 = l2_distance(decompressed, fstate);
    double tv = 0.0;
    const auto da = adversary_register_distribution(spec, decompressed);
    const auto db = adversary_register_distribution(spec, fstate);
    std::map<Label, double> merged;
    for (const auto& [k, v] : da) merged[k] += v;
    for (const auto& [k, v] : db) merged[k] -= v;
    for (const auto& [k, v] : merged) tv += std::abs(v);
    res.tv = 0.5 * tv;
    return res;
}

CorrectnessSweep correctness_sweep(const CorrectnessConfig& cfg, std::ostream* log) {
    CorrectnessSweep sweep;
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t m : cfg.ms)
        for (std::size_t n : cfg.ns)
            for (std::size_t q : cfg.qs) {
                std::vector<GroupOp> groups = {GroupOp::add()};
                if (is_power_of_two(n)) groups.push_back(GroupOp::xored());
                for (auto group : groups) {
                    std::vector<ProductDistribution> dists = {
                        ProductDistribution::uniform_for(m, n, group)};
                    if (n == 2) dists.push_back(ProductDistribution::bernoulli(m, 0.25));
                    {
                        std::uniform_real_distribution<double> u(0.05, 1.0);
                        std::vector<std::vector<double>> rows;
                        for (std::size_t x = 0; x < m; ++x) {
                            std::vector<double> row(n);
                            double sum = 0;
                            for (auto& pv : row) {
                                pv = u(rng);
                                sum += pv;
                            }
                            for (auto& pv : row) pv /= sum;
                            rows.push_back(row);
                        }
                        dists.push_back(ProductDistribution::from_marginals(rows));
                    }
                    for (const auto& dist : dists) {
                        for (std::size_t rep = 0; rep < cfg.adversaries_per_case; ++rep) {
                            const std::uint64_t advseed = rng();
                            std::mt19937_64 advrng(advseed);
                            auto spec = random_adversary(m, n, q, advrng);
                            auto res = correctness_compare(dist, group, q, spec);
                            res.seed = advseed;
                            sweep.worst_l2 = std::max(sweep.worst_l2, res.l2);
                            sweep.worst_tv = std::max(sweep.worst_tv, res.tv);
                            if (res.l2 > cfg.tol || res.tv > cfg.tol) ++sweep.violations;
                            sweep.cases.push_back(std::move(res));
                        }
                        if (log)
                            *log << "correctness M=" << m << " N=" << n << " q=" << q << " "
                                 << dist.kind() << "/" << group.name() << ": worst l2 so far "
                                 << fmt12(sweep.worst_l2) << "\n";
                    }
                }
            }
    return sweep;
}

AdversarySpec fourier_basis_adversary(std::size_t m, std::size_t n, std::vector<reg_val> xs,
                                      reg_val eta) {
    AdversarySpec spec;
    spec.name = "fourier-basis";
    spec.q = xs.size();
    spec.depth = xs.size();
    spec.registers = {{"X", m}, {"Y", n}};
    // set eta once
    for (reg_val k = 0; k < eta; ++k) {
        AdvStep inc;
        inc.kind = AdvStep::Kind::gate;
        inc.gate = "increment";
        inc.targets = {"Y"};
        spec.steps.push_back(inc);
    }
    reg_val prev = 0;
    for (auto x : xs) {
        if (x != prev) {
            AdvStep set;
            set.kind = AdvStep::Kind::unitary;
            set.targets = {"X"};
            CMat perm(m);
            for (reg_val i = 0; i < m; ++i) {
                reg_val j = i;
                if (i == prev) j = x;
                else if (i == x) j = prev;
                perm(j, i) = 1.0;
            }
            set.matrix = perm;
            spec.steps.push_back(std::move(set));
        }
        AdvStep sq;
        sq.kind = AdvStep::Kind::query_layer;
        sq.query_pairs = {{"X", "Y"}};
        spec.steps.push_back(std::move(sq));
        prev = x;
    }
    AdvStep sm;
    sm.kind = AdvStep::Kind::measure;
    sm.measure_reg = "X";
    sm.measure_value = prev;
    spec.steps.push_back(std::move(sm));
    spec.validate();
    return spec;
}

namespace {

FindProbCase finish_find_case(FindProbCase c) {
    c.bound_tight = c.q < c.n ? bounds::find_coll_preim_bound(static_cast<double>(c.q), static_cast<double>(c.n))
                         : 1e30;
    c.bound_simple = bounds::weaker_coll_preim_bound(static_cast<double>(c.q), static_cast<double>(c.n));
    c.bound_preim = bounds::db_preimage_bound(static_cast<double>(c.q), static_cast<double>(c.n));
    c.bound_coll = bounds::db_collision_bound(static_cast<double>(c.q), static_cast<double>(c.n));
    double cap = std::min({1.0, c.bound_tight, c.bound_simple});
    if (c.relation == "preim") cap = std::min(cap, std::max(c.bound_preim, 0.0));
    if (c.relation == "coll") cap = std::min(cap, c.bound_coll);
    c.within_bounds = c.p_find <= std::min(1.0, cap) + 1e-9;
    return c;
}

} // namespace

FindProbCase birthday_find_case(std::size_t n) {
    FindProbCase c;
    c.adversary = "birthday";
    c.relation = "coll";
    c.m = n;
    c.n = n;
    c.q = 2;
    auto dist = ProductDistribution::uniform_xor(n, n);
    CompressedOracle base(dist, GroupOp::xored(), 2, CompressedPicture::cpho);
    auto spec = fourier_basis_adversary(n, n, {0, 1});
    c.p_find = find_probability(spec, base, {relation_collision()});
    return finish_find_case(std::move(c));
}

FindProbCase preimage_find_case(std::size_t n) {
    FindProbCase c;
    c.adversary = "single-query";
    c.relation = "preim";
    c.m = n;
    c.n = n;
    c.q = 1;
    auto dist = ProductDistribution::uniform_xor(n, n);
    CompressedOracle base(dist, GroupOp::xored(), 1, CompressedPicture::cpho);
    auto spec = fourier_basis_adversary(n, n, {0});
    c.p_find = find_probability(spec, base, {relation_preimage()});
    return finish_find_case(std::move(c));
}

O2hSweep o2h_sweep(const O2hSweepConfig& cfg, std::ostream* log) {
    O2hSweep sweep;
    std::mt19937_64 rng(cfg.seed);
    const std::vector<std::pair<std::string, Relation>> r1s = {
        {"empty", relation_empty()}, {"preim", relation_preimage()}};
    const std::vector<std::pair<std::string, Relation>> r2s = {
        {"coll", relation_collision()},
        {"preim+coll", relation_union(relation_preimage(), relation_collision())}};
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
        const std::uint64_t advseed = rng();
        std::mt19937_64 advrng(advseed);
        const std::size_t q = 1 + advrng() % cfg.max_q;
        auto spec = random_adversary(cfg.m, cfg.n, q, advrng);
        const auto& [n1, rel1] = r1s[i % r1s.size()];
        const auto& [n2, rel2] = r2s[(i / r1s.size()) % r2s.size()];
        auto dist = ProductDistribution::uniform_xor(cfg.m, cfg.n);
        CompressedOracle base(dist, GroupOp::xored(), q, CompressedPicture::csto);
        O2hSweepRow row;
        row.seed = advseed;
        row.q = q;
        row.d = spec.depth;
        row.r1 = n1;
        row.r2 = n2;
        row.record = run_o2h_experiment(spec, base, rel1, rel2, cfg.tol);
        if (!row.record.holds) ++sweep.violations;
        if (log && !row.record.holds)
            *log << "o2h violation at seed " << advseed << " lhs=" << fmt12(row.record.lhs_diff)
                 << " rhs=" << fmt12(row.record.rhs_bound) << "\n";
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

DeferredImmediateSweep deferred_immediate_sweep(const O2hSweepConfig& cfg, std::ostream* log) {
    DeferredImmediateSweep out;
    std::mt19937_64 rng(cfg.seed);
    const std::vector<std::vector<Relation>> rel_sets = {
        {relation_collision()},
        {relation_preimage()},
        {relation_preimage(), relation_collision()}};
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
        const std::uint64_t advseed = rng();
        std::mt19937_64 advrng(advseed);
        const std::size_t q = 1 + advrng() % cfg.max_q;
        auto spec = random_adversary(cfg.m, cfg.n, q, advrng);
        auto dist = ProductDistribution::uniform_xor(cfg.m, cfg.n);
        CompressedOracle base(dist, GroupOp::xored(), q, CompressedPicture::csto);
        const auto& rels = rel_sets[i % rel_sets.size()];
        const auto imm = immediate_joint_distribution(spec, base, rels);
        const auto def = deferred_joint_distribution(spec, base, rels);
        const double tv = total_variation(imm, def);
        out.worst_tv = std::max(out.worst_tv, tv);
        if (tv > 1e-9) {
            ++out.violations;
            if (log) *log << "deferred/immediate mismatch at seed " << advseed << " tv=" << fmt12(tv) << "\n";
        }
        ++out.cases;
    }
    return out;
}

double cpho_attack_distinguish_rate(std::size_t m_bits, std::size_t shots, std::uint64_t seed) {
    const std::size_t m = std::size_t{1} << m_bits;
    auto dist = ProductDistribution::uniform_xor(m, 2);
    CompressedOracle oracle(dist, GroupOp::xored(), 1, CompressedPicture::cpho);
    std::vector<Register> regs = {{"X", m}, {"Y", 2}};
    for (const auto& r : oracle.layout_registers()) regs.push_back(r);
    RegisterLayout layout(std::move(regs));
    QState s = QState::zero_state(layout);
    oracle.prepare_rest_state(s);
    apply_hadamard_transform(s, "X");
    oracle.cpho_query_without_deletion(s, "X", "Y");
    apply_hadamard_transform(s, "X");
    const auto dx = register_distribution(s, "X");
    // sample the measurement outcome; the attack answers "modified oracle"
    // whenever X != 0
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < shots; ++i) {
        double r = u(rng);
        std::size_t outcome = 0;
        for (; outcome + 1 < dx.size(); ++outcome) {
            if (r < dx[outcome]) break;
            r -= dx[outcome];
        }
        if (outcome != 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(shots);
}

// --- classical sponge experiments -------------------------------------------------

ClassicalAdversary make_classical_adversary(const std::string& name, SpongeParams params,
                                            std::size_t q) {
    if (name == "collision-seeker") {
        return [params, q](ClassicalInterfaces& ifc) {
            std::vector<std::uint32_t> inners;
            std::uint32_t s = 0;
            for (std::size_t i = 0; i < q; ++i) {
                const auto t = ifc.pub(s);
                inners.push_back(params.inner(t));
                s = params.make_state(params.outer(t) ^ 1, params.inner(t));
            }
            for (std::size_t i = 0; i < inners.size(); ++i)
                for (std::size_t j = i + 1; j < inners.size(); ++j)
                    if (inners[i] == inners[j]) return 1;
            return 0;
        };
    }
    if (name == "consistency") {
        return [params, q](ClassicalInterfaces& ifc) {
            Bits m = {1};
            const auto z = ifc.priv(m, params.r);
            const auto blocks = pad(m, params.r);
            std::uint32_t s = 0;
            std::size_t used = 0;
            for (auto blk : blocks) {
                if (used++ >= q) break;
                s = ifc.pub(params.make_state(params.outer(s) ^ blk, params.inner(s)));
            }
            std::uint32_t z_int = 0;
            for (auto b : z) z_int = (z_int << 1) | b;
            return z_int == params.outer(s) ? 1 : 0;
        };
    }
    if (name == "prober") {
        return [params, q](ClassicalInterfaces& ifc) {
            // mixes private and public queries, branching on observed bits
            Bits m = {};
            const auto z = ifc.priv(m, params.r);
            std::uint32_t acc = z.empty() ? 0 : z[0];
            std::uint32_t s = 0;
            for (std::size_t i = 0; i + 1 < q; ++i) {
                const auto t = ifc.pub(s);
                acc ^= t;
                s = (acc & 1) ? params.make_state(params.outer(t) ^ 1, params.inner(t)) : t;
            }
            return static_cast<int>(acc & 1);
        };
    }
    throw std::invalid_argument("unknown classical adversary '" + name + "'");
}

ClassicalSpongeReport classical_sponge_experiment(const ClassicalSpongeConfig& cfg) {
    ClassicalSpongeReport rep;
    rep.cfg = cfg;
    const auto adv = make_classical_adversary(cfg.adversary, cfg.params, cfg.q);
    for (int game = 1; game <= 6; ++game)
        rep.games.push_back(run_classical_game(game, cfg.params, adv, cfg.runs,
                                               cfg.seed + static_cast<std::uint64_t>(game)));
    rep.sigma = std::sqrt(0.25 / static_cast<double>(cfg.runs));
    rep.diff12 = std::abs(rep.games[1].p_one - rep.games[0].p_one);
    rep.diff23 = std::abs(rep.games[2].p_one - rep.games[1].p_one);
    // the bound counts fresh internal-function samples, which private queries
    // also consume through the construction
    rep.f_coll_bound = bounds::f_coll(static_cast<double>(rep.games[2].max_samples),
                                      static_cast<double>(cfg.params.c));
    const double four_sigma_pair = 4.0 * 2.0 * rep.sigma;
    rep.holds = rep.diff12 <= four_sigma_pair &&
                rep.diff23 <= rep.games[2].p_bad + four_sigma_pair &&
                rep.games[2].p_bad <= rep.f_coll_bound + 4.0 * rep.sigma;
    return rep;
}

double good_branch_transcript_tv(const std::string& adversary, std::size_t q) {
    SpongeParams params{1, 1};
    const auto adv = make_classical_adversary(adversary, params, q);
    auto e3 = enumerate_classical_game(3, params, adv);
    auto e4 = enumerate_classical_game(4, params, adv);
    double tv = 0.0;
    for (const auto& [k, v] : e3.given_good) {
        const auto it = e4.given_good.find(k);
        tv += std::abs(v - (it == e4.given_good.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : e4.given_good)
        if (!e3.given_good.count(k)) tv += v;
    return 0.5 * tv;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << content;
}

} // namespace qro
