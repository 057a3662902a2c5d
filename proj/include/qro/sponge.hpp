#pragma once

#include <cstdint>
#include <stdexcept>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qro {

using Bits = std::vector<std::uint8_t>; // one entry per bit, values 0/1

struct SpongeParams {
    std::size_t r = 1; // rate bits
    std::size_t c = 1; // capacity bits

    std::size_t state_bits() const { return r + c; }
    std::uint32_t num_states() const { return 1u << state_bits(); }
    std::uint32_t num_inner() const { return 1u << c; }
    std::uint32_t num_outer() const { return 1u << r; }

    // state value = outer * 2^c + inner
    std::uint32_t outer(std::uint32_t s) const { return s >> c; }
    std::uint32_t inner(std::uint32_t s) const { return s & (num_inner() - 1); }
    std::uint32_t make_state(std::uint32_t out, std::uint32_t in) const {
        return (out << c) | in;
    }
};

// pad10*1: append 1, zero-fill to a block boundary, final bit 1. The padded
// string is at least one block and its last bit is always 1.
std::vector<std::uint32_t> pad(const Bits& message, std::size_t r);
std::optional<Bits> unpad(const std::vector<std::uint32_t>& blocks, std::size_t r);

// Internal function as a full truth table on 2^(r+c) states.
struct InternalFunction {
    SpongeParams params;
    std::vector<std::uint32_t> table;

    static InternalFunction random(SpongeParams p, std::mt19937_64& rng);
    std::uint32_t operator()(std::uint32_t s) const { return table.at(s); }
};

// Absorb/squeeze evaluation of the sponge over any internal function handle.
Bits sponge_eval(const std::function<std::uint32_t(std::uint32_t)>& phi, const SpongeParams& params,
                 const Bits& message, std::size_t ell);

// Partial sponge graph: at most one outgoing edge per node.
class SpongeGraph {
public:
    explicit SpongeGraph(SpongeParams params)
        : params_(params), target_(params.num_states(), kNone) {}

    const SpongeParams& params() const { return params_; }
    bool has_edge(std::uint32_t s) const { return target_[s] != kNone; }
    std::uint32_t edge_target(std::uint32_t s) const { return static_cast<std::uint32_t>(target_[s]); }
    void add_edge(std::uint32_t s, std::uint32_t t);
    std::size_t edge_count() const { return edges_; }

    // Rooted supernodes: inner values reachable from the zero supernode via
    // edges, where any outer value may be set between steps.
    std::vector<std::uint32_t> rooted_set() const;
    // Supernodes containing a node with an outgoing edge.
    std::vector<std::uint32_t> outgoing_set() const;
    bool is_saturated() const;

    static InternalFunction as_function(const SpongeGraph&); // requires total graph

private:
    static constexpr std::int64_t kNone = -1;
    SpongeParams params_;
    std::vector<std::int64_t> target_;
    std::size_t edges_ = 0;
};

// Block sequence forming a sponge path to node s (empty for the zero node),
// or nullopt when s is not an edge target reachable from the root. BFS order,
// blocks ascending, so ties resolve to the lexicographically smallest path.
std::optional<std::vector<std::uint32_t>> fun_path(std::uint32_t s, const SpongeGraph& g);

// Path a simulator uses for a *query input* s: a sponge path to some reached
// node u with the inner part of s, closed by the block that sets the outer
// part to s's outer. Present exactly when inner(s) is rooted.
std::optional<std::vector<std::uint32_t>> query_path(std::uint32_t s, const SpongeGraph& g);

// Lazily sampled random oracle {0,1}* x N -> {0,1}*: per input an extendable
// seeded bit stream (prefix property holds by construction). Stream seeds are
// derived from the master seed and the input via splitmix64; bits come from
// mt19937_64.
class RandomOracle {
public:
    explicit RandomOracle(std::uint64_t seed) : seed_(seed) {}
    Bits query(const Bits& x, std::size_t ell);
    std::uint32_t query_block(const Bits& x, std::size_t r); // first r bits as an integer

private:
    std::uint64_t seed_;
    std::map<Bits, Bits> streams_;
};

// --- classical simulators and games -----------------------------------------

enum class SimVariant { sim2, sim3, sim4, ideal6 };

struct saturation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lazily sampled internal function with the game-dependent boxed lines.
class ClassicalSim {
public:
    ClassicalSim(SimVariant variant, SpongeParams params, std::mt19937_64* rng, RandomOracle* ro);

    std::uint32_t query(std::uint32_t s);
    bool bad() const { return bad_; }
    const SpongeGraph& graph() const { return graph_; }

private:
    SimVariant variant_;
    SpongeParams params_;
    std::mt19937_64* rng_;
    RandomOracle* ro_;
    SpongeGraph graph_;
    bool bad_ = false;
};

// Interfaces handed to a classical adversary: priv is the construction (or
// the random oracle, from game 5 on), pub the internal function.
struct ClassicalInterfaces {
    std::function<Bits(const Bits&, std::size_t)> priv;
    std::function<std::uint32_t(std::uint32_t)> pub;
};

using ClassicalAdversary = std::function<int(ClassicalInterfaces&)>;

struct ClassicalGameResult {
    double p_one = 0.0;          // estimated P[b = 1]
    double p_bad = 0.0;          // estimated P[Bad = 1] (games 3..5)
    std::size_t runs = 0;
    std::size_t max_samples = 0; // most fresh internal-function samples in any run
};

// Monte-Carlo estimate of P[b=1] in game 1..6 for a seeded adversary.
ClassicalGameResult run_classical_game(int game, SpongeParams params, const ClassicalAdversary& adv,
                                       std::size_t runs, std::uint64_t seed);

// Exact transcript distributions by enumerating every uniform draw of the
// simulator and random oracle; adversaries must be deterministic. Returns a
// map transcript -> probability; transcript is the concatenated observation
// string plus the output bit, with the Bad flag appended separately.
struct ExactTranscript {
    std::map<std::string, double> with_bad;    // key "obs|b|bad"
    std::map<std::string, double> given_good;  // conditioned on Bad = 0, key "obs|b"
    double p_bad = 0.0;
};
ExactTranscript enumerate_classical_game(int game, SpongeParams params,
                                         const ClassicalAdversary& adv);

} // namespace qro
