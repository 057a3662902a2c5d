#include "qro/statevec.hpp"

#include <doctest.h>

#include <random>

using namespace qro;

namespace {

RegisterLayout xy_layout(std::size_t nx, std::size_t ny) {
    return RegisterLayout({{"X", nx}, {"Y", ny}});
}

QState random_state(const RegisterLayout& layout, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> amps(layout.total_dim());
    for (auto& a : amps) a = {g(rng), g(rng)};
    QState s(layout, std::move(amps));
    s.renormalize();
    return s;
}

} // namespace

TEST_CASE("basis states and label linearization") {
    auto layout = xy_layout(2, 2);
    auto s = QState::basis_state(layout, std::vector<reg_val>{0, 0});
    CHECK(s.amplitudes()[0] == cplx{1.0, 0.0});
    CHECK(s.amplitudes()[1] == cplx{});

    RegisterLayout f({{"F", 4}});
    auto s2 = QState::basis_state(f, std::vector<reg_val>{3});
    CHECK(s2.amplitudes()[3] == cplx{1.0, 0.0});

    // first-listed register is most significant
    auto s3 = QState::basis_state(layout, std::vector<reg_val>{1, 0});
    CHECK(s3.amplitudes()[2] == cplx{1.0, 0.0});

    CHECK_THROWS_WITH_AS(QState::basis_state(xy_layout(2, 2), std::vector<reg_val>{2, 0}),
                         doctest::Contains("register 'X'"), std::out_of_range);
}

TEST_CASE("qft on small registers") {
    RegisterLayout layout({{"R", 2}});
    auto s = QState::basis_state(layout, std::vector<reg_val>{0});
    apply_qft(s, "R");
    CHECK(std::abs(s.amplitudes()[0] - cplx{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);
    CHECK(std::abs(s.amplitudes()[1] - cplx{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);

    RegisterLayout l4({{"R", 4}});
    auto t = QState::basis_state(l4, std::vector<reg_val>{1});
    apply_qft(t, "R");
    // N=4, |1> -> (1/2)(|0> + i|1> - |2> - i|3>)
    CHECK(std::abs(t.amplitudes()[0] - cplx{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(t.amplitudes()[1] - cplx{0.0, 0.5}) < 1e-12);
    CHECK(std::abs(t.amplitudes()[2] - cplx{-0.5, 0.0}) < 1e-12);
    CHECK(std::abs(t.amplitudes()[3] - cplx{0.0, -0.5}) < 1e-12);

    CHECK_THROWS(apply_qft(t, "nope"));
}

TEST_CASE("qft round trip and unitarity on random states") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        RegisterLayout layout({{"A", n}, {"B", 3}});
        auto s = random_state(layout, rng);
        auto t = s;
        apply_qft(t, "A");
        CHECK(std::abs(t.norm() - 1.0) < 1e-10);
        apply_qft(t, "A", /*inverse=*/true);
        CHECK(l2_distance(s, t) < 1e-12);
    }
}

TEST_CASE("root of unity orthogonality identity") {
    for (std::size_t n = 1; n <= 16; ++n) {
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t xp = 0; xp < n; ++xp) {
                cplx acc{};
                for (std::size_t xi = 0; xi < n; ++xi)
                    acc += root_of_unity(n, (x * xi) % n) * std::conj(root_of_unity(n, (xp * xi) % n));
                const double expect = x == xp ? static_cast<double>(n) : 0.0;
                CHECK(std::abs(acc - cplx{expect, 0.0}) <= 1e-10);
            }
    }
}

TEST_CASE("hadamard transform") {
    RegisterLayout layout({{"R", 2}});
    auto s = QState::basis_state(layout, std::vector<reg_val>{1});
    apply_hadamard_transform(s, "R");
    CHECK(std::abs(s.amplitudes()[0] - cplx{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);
    CHECK(std::abs(s.amplitudes()[1] + cplx{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);

    RegisterLayout l4({{"R", 4}});
    auto z = QState::basis_state(l4, std::vector<reg_val>{0});
    apply_hadamard_transform(z, "R");
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(z.amplitudes()[i] - cplx{0.5, 0.0}) < 1e-12);

    // self-inverse
    std::mt19937_64 rng(3);
    auto r = random_state(l4, rng);
    auto t = r;
    apply_hadamard_transform(t, "R");
    apply_hadamard_transform(t, "R");
    CHECK(l2_distance(r, t) < 1e-12);

    RegisterLayout l3({{"R", 3}});
    auto bad = QState::zero_state(l3);
    CHECK_THROWS(apply_hadamard_transform(bad, "R"));
}

TEST_CASE("qft equals hadamard for N=2") {
    RegisterLayout layout({{"R", 2}});
    for (reg_val v : {0u, 1u}) {
        auto a = QState::basis_state(layout, std::vector<reg_val>{v});
        auto b = a;
        apply_qft(a, "R");
        apply_hadamard_transform(b, "R");
        CHECK(l2_distance(a, b) < 1e-12);
    }
}

TEST_CASE("local unitary application") {
    auto layout = xy_layout(2, 2);
    std::mt19937_64 rng(11);
    auto s = random_state(layout, rng);

    auto t = s;
    apply_local_unitary(t, LocalUnitary({"Y"}, CMat::identity(2)));
    CHECK(l2_distance(s, t) < 1e-12);

    CMat swap(2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    auto u = QState::basis_state(layout, std::vector<reg_val>{1, 0});
    apply_local_unitary(u, LocalUnitary({"Y"}, swap));
    CHECK(std::abs(u.amplitude(std::vector<reg_val>{1, 1}) - cplx{1.0, 0.0}) < 1e-12);

    CMat bad(2);
    bad(0, 0) = 2.0;
    CHECK_THROWS(LocalUnitary({"Y"}, bad));
}

TEST_CASE("basis function permutation and bijection checking") {
    auto layout = xy_layout(2, 4);
    std::mt19937_64 rng(5);
    auto s = random_state(layout, rng);

    auto t = s;
    apply_basis_function(t, [](std::span<reg_val>) {}, /*verify=*/true);
    CHECK(l2_distance(s, t) < 1e-12);

    // increment Y mod 4 with X fixed: cyclic shift, exactly norm preserving
    apply_basis_function(t, [](std::span<reg_val> l) { l[1] = (l[1] + 1) % 4; }, /*verify=*/true);
    CHECK(std::abs(t.norm() - s.norm()) == 0.0);
    for (reg_val x = 0; x < 2; ++x)
        for (reg_val y = 0; y < 4; ++y) {
            CHECK(std::abs(t.amplitude(std::vector<reg_val>{x, static_cast<reg_val>((y + 1) % 4)}) -
                           s.amplitude(std::vector<reg_val>{x, y})) < 1e-15);
        }

    auto bad = s;
    CHECK_THROWS_AS(apply_basis_function(bad, [](std::span<reg_val> l) { l[1] = 0; }, /*verify=*/true),
                    std::runtime_error);
}

TEST_CASE("projection") {
    auto layout = xy_layout(2, 1);
    std::mt19937_64 rng(23);
    auto s = random_state(layout, rng);

    auto all = project(s, [](std::span<const reg_val>) { return true; });
    CHECK(all.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all.accepted.has_value());
    CHECK(!all.rejected.has_value());

    RegisterLayout l2({{"R", 2}});
    QState uniform(l2, {cplx{1 / std::sqrt(2.0), 0}, cplx{1 / std::sqrt(2.0), 0}});
    auto half = project(uniform, [](std::span<const reg_val> l) { return l[0] == 0; });
    CHECK(half.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(half.accepted->amplitudes()[0] - cplx{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(half.rejected->amplitudes()[1] - cplx{1.0, 0.0}) < 1e-12);

    auto zero = QState::basis_state(l2, std::vector<reg_val>{1});
    auto none = project(zero, [](std::span<const reg_val> l) { return l[0] == 0; });
    CHECK(none.probability == 0.0);
    CHECK(!none.accepted.has_value());
    CHECK(l2_distance(*none.rejected, zero) < 1e-15);
}

TEST_CASE("l2 distance and phase-insensitive comparison") {
    RegisterLayout l2({{"R", 2}});
    auto a = QState::basis_state(l2, std::vector<reg_val>{0});
    auto b = QState::basis_state(l2, std::vector<reg_val>{1});
    CHECK(l2_distance(a, a) == 0.0);
    CHECK(l2_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    QState minus_a(l2, {cplx{-1.0, 0.0}, cplx{}});
    CHECK(l2_distance(a, minus_a) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(phase_insensitive_distance(a, minus_a) < 1e-12);

    RegisterLayout other({{"S", 2}});
    auto c = QState::zero_state(other);
    CHECK_THROWS(l2_distance(a, c));
}

TEST_CASE("append and contract registers") {
    auto layout = xy_layout(2, 2);
    std::mt19937_64 rng(31);
    auto s = random_state(layout, rng);
    auto t = s;
    t.append_register({"W", 3}, 1);
    CHECK(t.layout().num_registers() == 3);
    CHECK(std::abs(t.norm() - 1.0) < 1e-12);
    t.contract_register("W", 1);
    CHECK(l2_distance(s, t) < 1e-12);

    auto u = s;
    u.append_register({"W", 2}, 0);
    apply_hadamard_transform(u, "W");
    CHECK_THROWS(u.contract_register("W", 0, 1e-9));
}

TEST_CASE("register distribution") {
    RegisterLayout layout({{"X", 2}, {"Y", 2}});
    QState s(layout, {cplx{0.6, 0}, cplx{0, 0.8}, cplx{}, cplx{}});
    auto dx = register_distribution(s, "X");
    CHECK(dx[0] == doctest::Approx(1.0));
    auto dy = register_distribution(s, "Y");
    CHECK(dy[0] == doctest::Approx(0.36));
    CHECK(dy[1] == doctest::Approx(0.64));
}

TEST_CASE("norm preservation under randomized primitive ops") {
    std::mt19937_64 rng(417);
    RegisterLayout layout({{"A", 3}, {"B", 4}, {"C", 2}});
    auto s = random_state(layout, rng);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 200; ++i) {
        switch (pick(rng)) {
            case 0: apply_qft(s, "B", rng() & 1); break;
            case 1: apply_hadamard_transform(s, "C"); break;
            case 2:
                apply_basis_function(s, [](std::span<reg_val> l) { l[0] = (l[0] + 1) % 3; });
                break;
            case 3:
                apply_phase_function(s, [](std::span<const reg_val> l) {
                    return root_of_unity(4, l[1]);
                });
                break;
        }
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("prune drops sub-threshold dust and renormalizes") {
    RegisterLayout layout({{"R", 4}});
    QState s(layout, {cplx{1.0, 0}, cplx{1e-16, 0}, cplx{-1e-15, 0}, cplx{0, 1e-16}});
    s.prune(1e-14);
    CHECK(s.amplitudes()[1] == cplx{});
    CHECK(s.amplitudes()[2] == cplx{});
    CHECK(s.amplitudes()[3] == cplx{});
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}
