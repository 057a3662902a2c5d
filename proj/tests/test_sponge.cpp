#include "qro/sponge.hpp"
#include "qro/bounds.hpp"

#include <doctest.h>

#include <random>

using namespace qro;

TEST_CASE("pad10*1") {
    CHECK(pad({}, 2) == std::vector<std::uint32_t>{3}); // "11"
    CHECK(pad({1}, 2) == std::vector<std::uint32_t>{3, 1}); // "11","01"
    // length is always >= r and a multiple of r; last bit 1
    std::mt19937_64 rng(4);
    for (int len = 0; len <= 8; ++len)
        for (std::size_t r : {1u, 2u, 3u}) {
            Bits m(len);
            for (auto& b : m) b = rng() & 1;
            auto blocks = pad(m, r);
            CHECK(blocks.size() >= 1);
            CHECK((blocks.back() & 1) == 1);
            auto back = unpad(blocks, r);
            REQUIRE(back.has_value());
            CHECK(*back == m);
        }
    CHECK(!unpad({0}, 2).has_value()); // last bit 0
}

TEST_CASE("sponge evaluation") {
    SUBCASE("zero-length output") {
        SpongeParams p{1, 1};
        auto out = sponge_eval([](std::uint32_t s) { return s; }, p, {}, 0);
        CHECK(out.empty());
    }
    SUBCASE("hand-traced 2-bit internal function") {
        SpongeParams p{1, 1};
        // table: 00->11, 01->10, 10->01, 11->00 (state = outer*2 + inner)
        std::vector<std::uint32_t> table = {3, 2, 1, 0};
        auto phi = [&](std::uint32_t s) { return table[s]; };
        // m = empty: pad -> blocks "1","1"; s=(0,0) -> absorb 1 -> (1,0)=2 -> phi -> 1=(0,1)
        //   absorb 1 -> (1,1)=3 -> phi -> 0=(0,0); z = outer = 0
        auto out = sponge_eval(phi, p, {}, 1);
        CHECK(out == Bits{0});
    }
    SUBCASE("identity internal function returns the last absorbed outer part") {
        SpongeParams p{2, 2};
        auto phi = [](std::uint32_t s) { return s; };
        Bits m = {1, 0}; // pad -> blocks "10","11"; outer accumulates xor of blocks
        auto out = sponge_eval(phi, p, m, 2);
        // absorb 10: outer=2 -> phi id; absorb 11: outer = 2^3 = 1
        CHECK(out == Bits{0, 1});
    }
    SUBCASE("two-implementation agreement on random functions") {
        std::mt19937_64 rng(9);
        for (std::size_t r : {1u, 2u})
            for (std::size_t c : {1u, 2u, 3u}) {
                if (r + c > 5) continue;
                SpongeParams p{r, c};
                auto f = InternalFunction::random(p, rng);
                auto phi = [&](std::uint32_t s) { return f(s); };
                for (int len = 0; len <= static_cast<int>(3 * r); ++len) {
                    Bits m(len);
                    for (auto& b : m) b = rng() & 1;
                    for (std::size_t ell : {0u, 1u, 5u}) {
                        // straight-line reference: explicit absorb loop
                        const auto blocks = pad(m, r);
                        std::uint32_t s = 0;
                        for (auto blk : blocks) s = f(p.make_state(p.outer(s) ^ blk, p.inner(s)));
                        Bits ref;
                        std::uint32_t cur = s;
                        while (ref.size() < std::max<std::size_t>(ell, 1)) {
                            for (std::size_t k = r; k-- > 0;) ref.push_back((p.outer(cur) >> k) & 1);
                            if (ref.size() < ell) cur = f(cur);
                        }
                        ref.resize(ell);
                        CHECK(sponge_eval(phi, p, m, ell) == ref);
                    }
                }
            }
    }
}

TEST_CASE("sponge graph sets") {
    SpongeParams p{1, 2};
    SpongeGraph g(p);
    CHECK(g.rooted_set() == std::vector<std::uint32_t>{0});
    CHECK(g.outgoing_set().empty());
    CHECK(!g.is_saturated());

    // edge from supernode 0 roots the target's supernode
    g.add_edge(p.make_state(1, 0), p.make_state(0, 2));
    auto rooted = g.rooted_set();
    CHECK(rooted == std::vector<std::uint32_t>{0, 2});
    CHECK(g.outgoing_set() == std::vector<std::uint32_t>{0});
    CHECK_THROWS_AS(g.add_edge(p.make_state(1, 0), 0), std::logic_error);

    // full graph: every node has an edge, so outgoing covers everything
    SpongeGraph full(p);
    for (std::uint32_t s = 0; s < p.num_states(); ++s) full.add_edge(s, 0);
    CHECK(full.is_saturated());
    CHECK(full.outgoing_set().size() == p.num_inner());
}

TEST_CASE("fun_path") {
    SpongeParams p{2, 2};
    SpongeGraph g(p);
    CHECK(fun_path(p.make_state(0, 0), g).has_value());
    CHECK(fun_path(p.make_state(0, 0), g)->empty());

    // one edge from (a, 0) to s
    const std::uint32_t a = 2;
    const std::uint32_t s = p.make_state(1, 3);
    g.add_edge(p.make_state(a, 0), s);
    auto path = fun_path(s, g);
    REQUIRE(path.has_value());
    CHECK(*path == std::vector<std::uint32_t>{a});

    CHECK(!fun_path(p.make_state(2, 1), g).has_value());

    // path validity: replaying the blocks through the graph re-reaches s
    std::uint32_t cur = 0;
    for (auto blk : *path) {
        const auto v = p.make_state(p.outer(cur) ^ blk, p.inner(cur));
        REQUIRE(g.has_edge(v));
        cur = g.edge_target(v);
    }
    CHECK(cur == s);
}

TEST_CASE("query_path closes with the outer block") {
    SpongeParams p{2, 1};
    SpongeGraph g(p);
    // first query: inner(s)=0 is rooted via the root supernode
    const std::uint32_t s = p.make_state(3, 0);
    auto qp = query_path(s, g);
    REQUIRE(qp.has_value());
    CHECK(*qp == std::vector<std::uint32_t>{3});
    // unrooted inner has no path
    CHECK(!query_path(p.make_state(0, 1), g).has_value());
}

TEST_CASE("random oracle") {
    RandomOracle ro(123);
    Bits x = {1, 0, 1};
    CHECK(ro.query(x, 16) == ro.query(x, 16));
    // prefix property
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Bits y(1 + rng() % 6);
        for (auto& b : y) b = rng() & 1;
        const auto l1 = 1 + rng() % 8;
        const auto l2 = l1 + rng() % 8;
        auto short_bits = ro.query(y, l1);
        auto long_bits = ro.query(y, l2);
        CHECK(Bits(long_bits.begin(), long_bits.begin() + static_cast<std::ptrdiff_t>(l1)) ==
              short_bits);
    }
    // fresh bits unbiased within 4 sigma
    std::size_t ones = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        Bits key;
        for (int k = 0; k < 17; ++k) key.push_back((i >> k) & 1);
        ones += ro.query(key, 1)[0];
    }
    const double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 4 * sigma);
}

TEST_CASE("classical simulator basics") {
    SpongeParams p{1, 2};
    std::mt19937_64 rng(88);
    RandomOracle ro(33);
    ClassicalSim sim(SimVariant::sim2, p, &rng, &ro);
    const auto t = sim.query(2);
    CHECK(sim.query(2) == t); // repeated query returns the stored edge

    // Sim2 marginal roughly uniform over fresh queries
    std::size_t counts[8] = {0};
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        ClassicalSim fresh(SimVariant::sim2, p, &rng, &ro);
        counts[fresh.query(0)]++;
    }
    const double expect = static_cast<double>(n) / p.num_states();
    double chi2 = 0;
    for (auto cnt : counts) chi2 += (cnt - expect) * (cnt - expect) / expect;
    CHECK(chi2 < 40.0); // 7 dof, generous

    // ideal sampler never lands in rooted-or-outgoing
    for (int rep = 0; rep < 200; ++rep) {
        ClassicalSim ideal(SimVariant::ideal6, p, &rng, &ro);
        const auto re_before = [&] {
            std::vector<bool> m(p.num_inner(), false);
            for (auto i : ideal.graph().rooted_set()) m[i] = true;
            for (auto i : ideal.graph().outgoing_set()) m[i] = true;
            return m;
        }();
        const auto out = ideal.query(0);
        CHECK(!re_before[p.inner(out)]);
    }
}

namespace {

// collision-seeking adversary: queries q fresh rooted inputs, outputs 1 when
// two answers share an inner part
ClassicalAdversary collision_seeker(SpongeParams p, std::size_t q) {
    return [p, q](ClassicalInterfaces& ifc) {
        std::vector<std::uint32_t> inners;
        std::uint32_t s = 0;
        for (std::size_t i = 0; i < q; ++i) {
            const auto t = ifc.pub(s);
            inners.push_back(p.inner(t));
            s = p.make_state(p.outer(t) ^ 1, p.inner(t)); // stay on a rooted path
        }
        for (std::size_t i = 0; i < inners.size(); ++i)
            for (std::size_t j = i + 1; j < inners.size(); ++j)
                if (inners[i] == inners[j]) return 1;
        return 0;
    };
}

// consistency adversary: compares a sponge evaluation with its own
// reconstruction from public queries
ClassicalAdversary consistency_checker(SpongeParams p) {
    return [p](ClassicalInterfaces& ifc) {
        Bits m = {1};
        const auto z = ifc.priv(m, p.r);
        const auto blocks = pad(m, p.r);
        std::uint32_t s = 0;
        for (auto blk : blocks) s = ifc.pub(p.make_state(p.outer(s) ^ blk, p.inner(s)));
        std::uint32_t z_int = 0;
        for (auto b : z) z_int = (z_int << 1) | b;
        return z_int == p.outer(s) ? 1 : 0;
    };
}

} // namespace

TEST_CASE("classical games: monte-carlo relations") {
    SpongeParams p{1, 2};
    const std::size_t runs = 20000;
    const auto adv = collision_seeker(p, 3);

    auto g1 = run_classical_game(1, p, adv, runs, 11);
    auto g2 = run_classical_game(2, p, adv, runs, 12);
    auto g3 = run_classical_game(3, p, adv, runs, 13);

    const double sigma = std::sqrt(0.25 / runs);
    CHECK(std::abs(g1.p_one - g2.p_one) < 4 * 2 * sigma);
    CHECK(std::abs(g3.p_one - g2.p_one) <= g3.p_bad + 4 * 2 * sigma);
    CHECK(g3.p_bad <= qro::bounds::f_coll(3, 2) + 4 * sigma);
}

TEST_CASE("game 5 consistency: sponge of sim4 matches the random oracle") {
    SpongeParams p{1, 2};
    const auto adv = consistency_checker(p);
    auto g5 = run_classical_game(5, p, adv, 4000, 21);
    // in game 5 the private interface is H and Sim4 answers consistently with
    // H on rooted valid-padding paths, so the check almost always passes; it
    // can only fail when Bad occurred
    CHECK(g5.p_one >= 1.0 - g5.p_bad - 4 * std::sqrt(0.25 / 4000));
}

TEST_CASE("exact enumeration: game 3 vs game 4 agree conditioned on good") {
    SpongeParams p{1, 1};
    for (int which = 0; which < 2; ++which) {
        const auto adv = which == 0 ? collision_seeker(p, 2) : consistency_checker(p);
        auto e3 = enumerate_classical_game(3, p, adv);
        auto e4 = enumerate_classical_game(4, p, adv);
        // total variation between conditioned transcript distributions
        double tv = 0.0;
        for (const auto& [k, v] : e3.given_good) {
            auto it = e4.given_good.find(k);
            tv += std::abs(v - (it == e4.given_good.end() ? 0.0 : it->second));
        }
        for (const auto& [k, v] : e4.given_good)
            if (!e3.given_good.count(k)) tv += v;
        CHECK(0.5 * tv <= 1e-9);
        // identical-until-bad implies equal bad probabilities
        CHECK(e3.p_bad == doctest::Approx(e4.p_bad).epsilon(1e-9));
    }
}

TEST_CASE("exact enumeration: sim2 equals the lazy uniform function") {
    SpongeParams p{1, 1};
    for (std::size_t q : {2u, 3u}) {
    const auto adv = collision_seeker(p, q);
    auto e1 = enumerate_classical_game(1, p, adv);
    auto e2 = enumerate_classical_game(2, p, adv);
    double tv = 0.0;
    for (const auto& [k, v] : e1.with_bad) {
        auto it = e2.with_bad.find(k);
        tv += std::abs(v - (it == e2.with_bad.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : e2.with_bad)
        if (!e1.with_bad.count(k)) tv += v;
    CHECK(0.5 * tv <= 1e-9);
    }
}
