// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.

#include "qro/bounds.hpp"
#include "qro/cfo_detail.hpp"
#include "qro/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

using namespace qro;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    CorrectnessConfig cfg; // defaults: M,N in {2,3,4}, q in {1,2,3}, 50 adversaries
    cfg.seed = 20260809;
    const auto sweep = correctness_sweep(cfg);
    const double secs = elapsed_s(t0);
    report(1, "compressed-vs-full correctness sweep",
           sweep.violations == 0 && sweep.worst_l2 <= 1e-9 && sweep.worst_tv <= 1e-9,
           std::to_string(sweep.cases.size()) + " cases, worst l2 " + fmt12(sweep.worst_l2) +
               ", worst tv " + fmt12(sweep.worst_tv) + ", " + fmt12(secs) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion2() {
    bool pass = true;
    std::string detail;

    // first-query CStO closed form, n = 1 bit
    {
        auto dist = ProductDistribution::uniform_xor(2, 2);
        CompressedOracle o(dist, GroupOp::xored(), 1, CompressedPicture::csto);
        const reg_val x = 1, y = 1;
        std::vector<Register> regs = {{"X", 2}, {"Y", 2}};
        for (const auto& r : o.layout_registers()) regs.push_back(r);
        RegisterLayout layout(std::move(regs));
        QState s = QState::zero_state(layout);
        o.prepare_rest_state(s);
        apply_basis_function(s, [x, y](std::span<reg_val> l) {
            l[0] = x;
            l[1] = y;
        });
        o.csto_query(s, "X", "Y");
        std::vector<cplx> expect(layout.total_dim());
        const double is2 = 1.0 / std::sqrt(2.0);
        auto idx = [&](reg_val yv, reg_val cx, reg_val cy) {
            return layout.flatten(std::vector<reg_val>{x, yv, cx, cy});
        };
        for (reg_val z = 0; z < 2; ++z) {
            expect[idx(y ^ z, x, z)] += is2;
            for (reg_val yp = 0; yp < 2; ++yp) {
                expect[idx(yp, x, z)] += -is2 * 0.5;
                expect[idx(yp, 2, z)] += is2 * 0.5;
            }
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < expect.size(); ++i)
            worst = std::max(worst, std::abs(expect[i] - s.amplitudes()[i]));
        pass = pass && worst <= 1e-10;
        detail += "csto entrywise " + fmt12(worst);
    }
    // first-query CPhO closed form (both branches)
    {
        auto dist = ProductDistribution::uniform_xor(2, 2);
        CompressedOracle o(dist, GroupOp::xored(), 1, CompressedPicture::cpho);
        std::vector<Register> regs = {{"X", 2}, {"Y", 2}};
        for (const auto& r : o.layout_registers()) regs.push_back(r);
        RegisterLayout layout(std::move(regs));
        double worst = 0.0;
        for (reg_val eta : {0u, 1u}) {
            QState s = QState::zero_state(layout);
            o.prepare_rest_state(s);
            apply_basis_function(s, [eta](std::span<reg_val> l) {
                l[0] = 0;
                l[1] = eta;
            });
            o.cpho_query(s, "X", "Y");
            std::vector<cplx> expect(layout.total_dim());
            const double is2 = 1.0 / std::sqrt(2.0);
            for (reg_val z = 0; z < 2; ++z) {
                if (eta == 0)
                    expect[layout.flatten(std::vector<reg_val>{0, 0, 2, z})] += is2;
                else
                    expect[layout.flatten(std::vector<reg_val>{0, 1, 0, z})] +=
                        ((eta & z) ? -1.0 : 1.0) * is2;
            }
            for (std::size_t i = 0; i < expect.size(); ++i)
                worst = std::max(worst, std::abs(expect[i] - s.amplitudes()[i]));
        }
        pass = pass && worst <= 1e-10;
        detail += ", cpho entrywise " + fmt12(worst);
    }
    // the no-deletion attack distinguishes with probability 1 - 2^-m at m = 2
    {
        const double rate = cpho_attack_distinguish_rate(2, 10000, 424242);
        pass = pass && std::abs(rate - 0.75) <= 0.02;
        detail += ", attack rate " + fmt12(rate);
    }
    report(2, "closed-form first-query regression and deletion attack", pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion3() {
    bool pass = true;
    double worst = 0.0;

    // the four closed-form cases, literally
    {
        auto dist = ProductDistribution::uniform_xor(2, 2);
        CompressedOracle o(dist, GroupOp::xored(), 2, CompressedPicture::cfo);
        std::vector<Register> regs = {{"X", 2}, {"Y", 2}};
        for (const auto& r : o.layout_registers()) regs.push_back(r);
        RegisterLayout layout(std::move(regs));
        auto mk = [&](reg_val x, reg_val eta, std::vector<std::pair<reg_val, reg_val>> cells) {
            std::vector<reg_val> l = {x, eta};
            for (std::size_t i = 0; i < 2; ++i) {
                if (i < cells.size()) {
                    l.push_back(cells[i].first);
                    l.push_back(cells[i].second);
                } else {
                    l.push_back(2);
                    l.push_back(0);
                }
            }
            return QState::basis_state(layout, l);
        };
        struct Case {
            QState in, out;
        };
        std::vector<Case> cases;
        cases.push_back({mk(0, 0, {{1, 1}}), mk(0, 0, {{1, 1}})});          // do nothing
        cases.push_back({mk(0, 1, {{1, 1}}), mk(0, 1, {{0, 1}, {1, 1}})});  // insert
        cases.push_back({mk(1, 1, {{1, 1}}), mk(1, 1, {})});                // remove
        {
            auto dist4 = ProductDistribution::uniform_xor(2, 4);
            CompressedOracle o4(dist4, GroupOp::xored(), 2, CompressedPicture::cfo);
            std::vector<Register> regs4 = {{"X", 2}, {"Y", 4}};
            for (const auto& r : o4.layout_registers()) regs4.push_back(r);
            RegisterLayout l4(std::move(regs4));
            auto in = QState::basis_state(l4, std::vector<reg_val>{0, 3, 0, 1, 2, 0});
            auto expect = QState::basis_state(l4, std::vector<reg_val>{0, 3, 0, 2, 2, 0});
            o4.uniform_fast_query(in, "X", "Y");
            worst = std::max(worst, l2_distance(in, expect)); // update case
        }
        for (auto& c : cases) {
            o.uniform_fast_query(c.in, "X", "Y");
            worst = std::max(worst, l2_distance(c.in, c.out));
        }
        pass = pass && worst <= 1e-10;
    }

    // 200 random well-formed states, M = N = 4, q = 3: fast path == generic
    double worst_agree = 0.0;
    {
        auto dist = ProductDistribution::uniform_xor(4, 4);
        CompressedOracle o(dist, GroupOp::xored(), 3, CompressedPicture::cfo);
        std::vector<Register> regs = {{"X", 4}, {"Y", 4}};
        for (const auto& r : o.layout_registers()) regs.push_back(r);
        RegisterLayout layout(std::move(regs));
        std::mt19937_64 rng(37);
        const auto db = o.view(layout);
        std::normal_distribution<double> g;
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<cplx> amps(layout.total_dim());
            Label label(layout.num_registers());
            for (std::size_t i = 0; i < amps.size(); ++i) {
                layout.unflatten(i, label);
                if (!db.well_formed(label)) continue;
                if (db.locate(label, label[0]) == 0 && db.count_nonpadding(label) >= 3)
                    continue; // would overflow
                amps[i] = {g(rng), g(rng)};
            }
            QState s(layout, std::move(amps));
            s.renormalize();
            auto a = s;
            auto b = s;
            o.cfo_query(a, "X", "Y");
            o.uniform_fast_query(b, "X", "Y");
            worst_agree = std::max(worst_agree, l2_distance(a, b));
        }
        pass = pass && worst_agree <= 1e-10;
    }
    report(3, "uniform fast path against the generic query", pass,
           "four cases worst " + fmt12(worst) + ", 200 random states worst " + fmt12(worst_agree));
}

// ---------------------------------------------------------------- criterion 4
void criterion4() {
    const auto birthday = birthday_find_case(4);
    const auto preim = preimage_find_case(4);
    const bool pass = std::abs(birthday.p_find - 0.25) <= 1e-10 &&
                      std::abs(preim.p_find - 0.25) <= 1e-10 && birthday.within_bounds &&
                      preim.within_bounds;
    report(4, "exact Find probabilities (birthday and zero-preimage)", pass,
           "birthday " + fmt12(birthday.p_find) + ", preimage " + fmt12(preim.p_find));
}

// ---------------------------------------------------------------- criterion 5
void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    O2hSweepConfig cfg;
    cfg.seeds = 100;
    cfg.seed = 99;
    const auto sweep = o2h_sweep(cfg);
    report(5, "one-way-to-hiding inequalities on 100 seeded adversaries", sweep.violations == 0,
           std::to_string(sweep.rows.size()) + " rows, violations " +
               std::to_string(sweep.violations) + ", " + fmt12(elapsed_s(t0)) + " s");
}

// ---------------------------------------------------------------- criterion 6
void criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    O2hSweepConfig cfg;
    cfg.seeds = 60;
    cfg.seed = 1234;
    const auto sweep = deferred_immediate_sweep(cfg);
    report(6, "deferred equals immediate puncturing (joint distributions)",
           sweep.violations == 0 && sweep.worst_tv <= 1e-9,
           std::to_string(sweep.cases) + " cases, worst tv " + fmt12(sweep.worst_tv) + ", " +
               fmt12(elapsed_s(t0)) + " s");
}

// ---------------------------------------------------------------- criterion 7
void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::size_t c : {2u, 3u})
        for (std::size_t q : {2u, 4u})
            for (const char* adversary : {"collision-seeker", "consistency"}) {
                ClassicalSpongeConfig cfg;
                cfg.params = {1, c};
                cfg.q = q;
                cfg.runs = 100000;
                cfg.seed = 1000 + c * 10 + q;
                cfg.adversary = adversary;
                const auto rep = classical_sponge_experiment(cfg);
                pass = pass && rep.holds;
                if (q == 4 && std::string(adversary) == "collision-seeker")
                    detail += "c=" + std::to_string(c) + " d12=" + fmt12(rep.diff12) + " d23=" +
                              fmt12(rep.diff23) + " bad=" + fmt12(rep.games[2].p_bad) + "; ";
            }
    {
        const double tv1 = good_branch_transcript_tv("collision-seeker", 2);
        const double tv2 = good_branch_transcript_tv("consistency", 2);
        pass = pass && tv1 <= 1e-9 && tv2 <= 1e-9;
        detail += "good-branch tv " + fmt12(std::max(tv1, tv2));
    }
    report(7, "classical sponge games (monte-carlo + exact enumeration)", pass,
           detail + ", " + fmt12(elapsed_s(t0)) + " s");
}

// ---------------------------------------------------------------- criterion 8
void criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    struct Cfg {
        std::size_t c, q;
    };
    for (const auto& [c, q] : std::vector<Cfg>{{1, 1}, {1, 2}, {2, 1}}) {
        SpongeParams p{1, c};
        for (const auto& script : builtin_quantum_scripts(p, q)) {
            const auto sweep = run_quantum_game_sweep(script, p, q);
            pass = pass && sweep.holds;
            if (!sweep.holds)
                detail += "[" + script.name + " c=" + std::to_string(c) + " q=" +
                          std::to_string(q) + " adv23=" + fmt12(sweep.adv23) + " bound=" +
                          fmt12(sweep.bound23) + " adv34=" + fmt12(sweep.adv34) + " bound=" +
                          fmt12(sweep.bound34) + " adv45=" + fmt12(sweep.adv45) + " bound=" +
                          fmt12(sweep.bound45) + "]";
        }
    }
    report(8, "quantum sponge games (exact per-step bounds)", pass,
           detail.empty() ? "all scripts hold, " + fmt12(elapsed_s(t0)) + " s"
                          : detail + ", " + fmt12(elapsed_s(t0)) + " s");
}

// ---------------------------------------------------------------- criterion 9
void criterion9() {
    using namespace qro::bounds;
    struct Gold {
        const char* name;
        double got, expect;
    };
    const double s15 = std::sqrt(15.0);
    std::vector<Gold> gold = {
        {"f_coll(0,3)", f_coll(0, 3), 0.0},
        {"f_coll(2,3)", f_coll(2, 3), 0.375},
        {"f_coll(1,1)", f_coll(1, 1), 0.5},
        {"f_coll(4,8)", f_coll(4, 8), 20.0 / 512.0},
        {"f_coll_q(0,4)", f_coll_q(0, 4), 0.0},
        {"f_coll_q(1,4)", f_coll_q(1, 4), 0.875},
        {"f_coll_q(2,8)", f_coll_q(2, 8), 42.0 / 256.0},
        {"find_cp(0,16)", find_coll_preim_bound(0, 16), 0.0},
        {"find_cp(1,16)", find_coll_preim_bound(1, 16), 0.25 + 12.0 / (16.0 * s15) + 16.0 / 240.0},
        {"find_cp(2,64)", find_coll_preim_bound(2, 64),
         2.0 * 2 * 3 / 64.0 + 3.0 * 4 * 9 / (64.0 * std::sqrt(62.0)) + 2.0 * 8 * 27 / (64.0 * 62.0)},
        {"weaker(0,16)", weaker_coll_preim_bound(0, 16), 0.0},
        {"weaker(1,16)", weaker_coll_preim_bound(1, 16), 1.0},
        {"weaker(2,1024)", weaker_coll_preim_bound(2, 1024), 4.0 * std::sqrt(32.0 / 1024.0)},
        {"coll_only(0,16)", coll_only_bound(0, 16), 0.0},
        {"coll_only(1,16)", coll_only_bound(1, 16),
         4.0 / 16 + 12.0 / (16 * s15) + 6.0 * 4 * 2 / (4.0 * 16 * 15)},
        {"preim_only(0,16)", preim_only_bound(0, 16), 0.0},
        {"preim_only(1,16)", preim_only_bound(1, 16),
         9.0 / 16 + 30.0 / (16 * s15) + 10.0 * 2 * 3 / (16.0 * 15.0)},
        {"db_preimage_bound(0,16)", db_preimage_bound(0, 16), 0.0},
        {"db_preimage_bound(2,16)", db_preimage_bound(2, 16), 0.25},
        {"db_collision_bound(2,16)", db_collision_bound(2, 16), 1.5},
        {"db_collision_bound(0,16)", db_collision_bound(0, 16), 0.0},
        {"gentle(1,0)", gentle_multi(1, 0.0), 0.0},
        {"gentle(1,0.25)", gentle_multi(1, 0.25), 1.0},
        {"gentle(3,0.01)", gentle_multi(3, 0.01), 0.6},
        {"o2h(2,0)", o2h_bound(2, 0.0), 0.0},
        {"o2h(2,0.25)", o2h_bound(2, 0.25), std::sqrt(0.75)},
        {"o2h(0,1)", o2h_bound(0, 1.0), 1.0},
        {"classical_eps(0,3)", classical_indiff_eps(0, 3), 0.0},
        {"classical_eps(2,3)", classical_indiff_eps(2, 3), 3.0},
        {"quantum_eps(0,4)", quantum_indiff_eps(0, 4), 0.0},
        {"quantum_eps(1,4)", quantum_indiff_eps(1, 4), 56.0 * 2 / 16 + std::sqrt(7.0 * 4 / 16)},
    };
    bool pass = gold.size() >= 30;
    double worst = 0.0;
    for (const auto& g : gold) {
        const double err = std::abs(g.got - g.expect);
        worst = std::max(worst, err);
        if (err > 1e-12) {
            pass = false;
            std::printf("    golden mismatch %s: got %s expect %s\n", g.name, fmt12(g.got).c_str(),
                        fmt12(g.expect).c_str());
        }
    }
    // header form vs proof form across the grid
    double worst_grid = 0.0;
    for (int q = 0; q <= 10; ++q)
        for (int c = 1; c <= 12; ++c)
            worst_grid = std::max(worst_grid, std::abs(quantum_indiff_eps(q, c) -
                                                       quantum_indiff_eps_proof_form(q, c)));
    pass = pass && worst_grid <= 1e-12;
    report(9, "closed-form bound golden values and algebraic agreement", pass,
           std::to_string(gold.size()) + " golden values, worst err " + fmt12(worst) +
               ", grid agreement " + fmt12(worst_grid));
}

// --------------------------------------------------------------- criterion 10
void criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::size_t ops = 0;
    std::string detail;

    // norm preservation / unitarity over randomized primitive operations
    {
        std::mt19937_64 rng(777);
        RegisterLayout layout({{"A", 3}, {"B", 4}, {"C", 2}, {"D", 2}});
        std::normal_distribution<double> g;
        std::vector<cplx> amps(layout.total_dim());
        for (auto& a : amps) a = {g(rng), g(rng)};
        QState s(layout, std::move(amps));
        s.renormalize();
        std::uniform_int_distribution<int> pick(0, 3);
        double worst = 0.0;
        for (int i = 0; i < 4000; ++i, ++ops) {
            switch (pick(rng)) {
                case 0: apply_qft(s, "B", rng() & 1); break;
                case 1: apply_hadamard_transform(s, "C"); break;
                case 2: {
                    LocalUnitary u({"A"}, random_unitary(3, rng));
                    apply_local_unitary(s, u);
                    break;
                }
                case 3:
                    apply_basis_function(s, [](std::span<reg_val> l) { l[3] ^= 1; });
                    break;
            }
            worst = std::max(worst, std::abs(s.norm() - 1.0));
        }
        pass = pass && worst <= 1e-10;
        detail += "norm drift " + fmt12(worst);
    }

    // QFT orthogonality identity for all N <= 16
    {
        double worst = 0.0;
        for (std::size_t n = 1; n <= 16; ++n)
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t xp = 0; xp < n; ++xp, ++ops) {
                    cplx acc{};
                    for (std::size_t xi = 0; xi < n; ++xi)
                        acc += root_of_unity(n, (x * xi) % n) *
                               std::conj(root_of_unity(n, (xp * xi) % n));
                    const double expect = x == xp ? static_cast<double>(n) : 0.0;
                    worst = std::max(worst, std::abs(acc - cplx{expect, 0.0}));
                }
        pass = pass && worst <= 1e-10;
        detail += ", qft identity " + fmt12(worst);
    }

    // well-formedness along randomized query sequences
    {
        std::mt19937_64 rng(31337);
        auto dist = ProductDistribution::from_marginals({{0.4, 0.3, 0.3}, {0.25, 0.5, 0.25}});
        std::size_t bad = 0;
        for (int rep = 0; rep < 1500; ++rep) {
            CompressedOracle o(dist, GroupOp::add(), 2, CompressedPicture::cfo);
            auto spec = random_adversary(2, 3, 2, rng);
            try {
                auto s = run_vs_compressed(spec, o);
                o.check_well_formed_support(s);
                ops += 2;
            } catch (const ill_formed_database&) {
                ++bad;
            }
        }
        pass = pass && bad == 0;
        detail += ", ill-formed runs " + std::to_string(bad);
    }

    // scratch cleanliness of the instrumented query chain
    {
        std::mt19937_64 rng(909);
        double worst = 0.0;
        std::vector<ProductDistribution> dists = {ProductDistribution::uniform_xor(3, 2),
                                                  ProductDistribution::bernoulli(3, 0.25)};
        for (const auto& dist : dists) {
            CompressedOracle o(dist, GroupOp::xored(), 2, CompressedPicture::cfo);
            InstrumentedCfo instr(o);
            std::vector<Register> regs = {{"X", 3}, {"Y", 2}};
            for (const auto& r : o.layout_registers()) regs.push_back(r);
            RegisterLayout layout(std::move(regs));
            for (int rep = 0; rep < 700; ++rep) {
                QState s = QState::zero_state(layout);
                o.prepare_rest_state(s);
                auto spec = random_adversary(3, 2, 1, rng);
                CompressedHandle h(o);
                run_adversary_steps(spec, s, h);
                worst = std::max(worst, instr.query(s, "X", "Y"));
                ops += 2;
            }
        }
        pass = pass && worst <= 1e-10;
        detail += ", scratch residual " + fmt12(worst);
    }

    report(10, "invariant suites on randomized operations", pass,
           std::to_string(ops) + " checked ops, " + detail + ", " + fmt12(elapsed_s(t0)) + " s");
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%s: %d criteria failed, total %.1f s\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures, elapsed_s(t0));
    return g_failures == 0 ? 0 : 1;
}
