#include "qro/sponge.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace qro {

std::vector<std::uint32_t> pad(const Bits& message, std::size_t r) {
    Bits bits = message;
    bits.push_back(1);
    while (bits.size() % r != r - 1) bits.push_back(0);
    bits.push_back(1);
    std::vector<std::uint32_t> blocks;
    for (std::size_t i = 0; i < bits.size(); i += r) {
        std::uint32_t b = 0;
        for (std::size_t k = 0; k < r; ++k) b = (b << 1) | bits[i + k];
        blocks.push_back(b);
    }
    return blocks;
}

std::optional<Bits> unpad(const std::vector<std::uint32_t>& blocks, std::size_t r) {
    if (blocks.empty()) return std::nullopt;
    Bits bits;
    for (auto b : blocks)
        for (std::size_t k = r; k-- > 0;) bits.push_back((b >> k) & 1);
    if (bits.empty() || bits.back() != 1) return std::nullopt;
    bits.pop_back();
    while (!bits.empty() && bits.back() == 0) bits.pop_back();
    if (bits.empty() || bits.back() != 1) return std::nullopt;
    bits.pop_back();
    // round trip must reproduce the block string exactly
    if (pad(bits, r) != blocks) return std::nullopt;
    return bits;
}

InternalFunction InternalFunction::random(SpongeParams p, std::mt19937_64& rng) {
    InternalFunction f;
    f.params = p;
    std::uniform_int_distribution<std::uint32_t> u(0, p.num_states() - 1);
    f.table.resize(p.num_states());
    for (auto& t : f.table) t = u(rng);
    return f;
}

Bits sponge_eval(const std::function<std::uint32_t(std::uint32_t)>& phi, const SpongeParams& params,
                 const Bits& message, std::size_t ell) {
    const auto blocks = pad(message, params.r);
    std::uint32_t s = 0;
    for (auto b : blocks) {
        s = params.make_state(params.outer(s) ^ b, params.inner(s));
        s = phi(s);
    }
    Bits z;
    auto push_outer = [&] {
        const std::uint32_t out = params.outer(s);
        for (std::size_t k = params.r; k-- > 0;) z.push_back((out >> k) & 1);
    };
    push_outer();
    while (z.size() < ell) {
        s = phi(s);
        push_outer();
    }
    z.resize(ell);
    return z;
}

void SpongeGraph::add_edge(std::uint32_t s, std::uint32_t t) {
    if (target_[s] != kNone)
        throw std::logic_error("sponge graph: node already has an outgoing edge");
    target_[s] = t;
    ++edges_;
}

std::vector<std::uint32_t> SpongeGraph::rooted_set() const {
    std::vector<bool> rooted(params_.num_inner(), false);
    rooted[0] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t s = 0; s < params_.num_states(); ++s) {
            if (target_[s] == kNone) continue;
            if (!rooted[params_.inner(s)]) continue;
            const std::uint32_t ti = params_.inner(static_cast<std::uint32_t>(target_[s]));
            if (!rooted[ti]) {
                rooted[ti] = true;
                changed = true;
            }
        }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < rooted.size(); ++i)
        if (rooted[i]) out.push_back(i);
    return out;
}

std::vector<std::uint32_t> SpongeGraph::outgoing_set() const {
    std::vector<bool> has(params_.num_inner(), false);
    for (std::uint32_t s = 0; s < params_.num_states(); ++s)
        if (target_[s] != kNone) has[params_.inner(s)] = true;
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < has.size(); ++i)
        if (has[i]) out.push_back(i);
    return out;
}

bool SpongeGraph::is_saturated() const {
    std::vector<bool> covered(params_.num_inner(), false);
    for (auto i : rooted_set()) covered[i] = true;
    for (auto i : outgoing_set()) covered[i] = true;
    return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

namespace {

// BFS over reachable nodes with the absorb expansion; visit order is by path
// length, blocks ascending, giving the lexicographically smallest path.
struct PathSearch {
    std::vector<std::uint32_t> order; // visited nodes in BFS order
    std::map<std::uint32_t, std::vector<std::uint32_t>> path;

    explicit PathSearch(const SpongeGraph& g) {
        const auto& p = g.params();
        std::deque<std::uint32_t> queue;
        path[0] = {};
        order.push_back(0);
        queue.push_back(0);
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (std::uint32_t a = 0; a < p.num_outer(); ++a) {
                const std::uint32_t v = p.make_state(p.outer(u) ^ a, p.inner(u));
                if (!g.has_edge(v)) continue;
                const std::uint32_t t = g.edge_target(v);
                if (path.count(t)) continue;
                auto pt = path[u];
                pt.push_back(a);
                path[t] = std::move(pt);
                order.push_back(t);
                queue.push_back(t);
            }
        }
    }
};

} // namespace

std::optional<std::vector<std::uint32_t>> fun_path(std::uint32_t s, const SpongeGraph& g) {
    PathSearch search(g);
    const auto it = search.path.find(s);
    if (it == search.path.end()) return std::nullopt;
    return it->second;
}

std::optional<std::vector<std::uint32_t>> query_path(std::uint32_t s, const SpongeGraph& g) {
    const auto& p = g.params();
    PathSearch search(g);
    for (auto u : search.order) {
        if (p.inner(u) != p.inner(s)) continue;
        auto blocks = search.path[u];
        blocks.push_back(p.outer(u) ^ p.outer(s));
        return blocks;
    }
    return std::nullopt;
}

// --- random oracle -----------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t bits_key(const Bits& x) {
    std::uint64_t h = 0x100000001b3ull;
    h = splitmix64(h ^ x.size());
    for (auto b : x) h = splitmix64(h ^ (0x2d358dccaa6c78a5ull + b));
    return h;
}

} // namespace

Bits RandomOracle::query(const Bits& x, std::size_t ell) {
    Bits& stream = streams_[x];
    if (stream.size() < ell) {
        std::mt19937_64 rng(splitmix64(seed_ ^ bits_key(x)));
        // re-deriving the stream from scratch keeps the prefix property exact
        Bits fresh;
        fresh.reserve(ell);
        while (fresh.size() < std::max(ell, stream.size()))
            fresh.push_back(static_cast<std::uint8_t>(rng() & 1));
        stream = std::move(fresh);
    }
    return Bits(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(ell));
}

std::uint32_t RandomOracle::query_block(const Bits& x, std::size_t r) {
    const Bits bits = query(x, r);
    std::uint32_t v = 0;
    for (auto b : bits) v = (v << 1) | b;
    return v;
}

// --- classical games ----------------------------------------------------------

namespace {

struct UniformSource {
    virtual ~UniformSource() = default;
    virtual std::uint32_t draw(std::uint32_t n) = 0;
};

struct RngSource final : UniformSource {
    std::mt19937_64 rng;
    explicit RngSource(std::uint64_t seed) : rng(seed) {}
    std::uint32_t draw(std::uint32_t n) override {
        std::uniform_int_distribution<std::uint32_t> u(0, n - 1);
        return u(rng);
    }
};

// Enumeration source: replays a forced prefix of choices, then reports the
// first fresh draw so the driver can branch on it.
struct EnumSource final : UniformSource {
    const std::vector<std::uint32_t>* forced = nullptr;
    std::size_t cursor = 0;
    double weight = 1.0;
    std::optional<std::uint32_t> fresh_options;

    std::uint32_t draw(std::uint32_t n) override {
        if (cursor < forced->size()) {
            ++cursor;
            weight /= n;
            return (*forced)[cursor - 1];
        }
        if (!fresh_options) fresh_options = n;
        return 0; // value irrelevant once a fresh draw was seen
    }
};

// Lazily sampled H backed by a uniform source (used by the game harness; the
// standalone RandomOracle uses hashed streams instead).
struct LazyOracle {
    UniformSource* src;
    std::map<Bits, Bits> streams;

    Bits query(const Bits& x, std::size_t ell) {
        Bits& s = streams[x];
        while (s.size() < ell) s.push_back(static_cast<std::uint8_t>(src->draw(2)));
        return Bits(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(ell));
    }
    std::uint32_t query_block(const Bits& x, std::size_t r) {
        const Bits bits = query(x, r);
        std::uint32_t v = 0;
        for (auto b : bits) v = (v << 1) | b;
        return v;
    }
};

struct LazyFunction {
    UniformSource* src;
    std::uint32_t n;
    std::map<std::uint32_t, std::uint32_t> table;

    std::uint32_t query(std::uint32_t s) {
        auto it = table.find(s);
        if (it != table.end()) return it->second;
        const std::uint32_t t = src->draw(n);
        table[s] = t;
        return t;
    }
};

struct SimState {
    SimVariant variant;
    SpongeParams params;
    UniformSource* src;
    LazyOracle* ho;
    SpongeGraph graph;
    bool bad = false;

    SimState(SimVariant v, SpongeParams p, UniformSource* s, LazyOracle* h)
        : variant(v), params(p), src(s), ho(h), graph(p) {}

    std::uint32_t query(std::uint32_t s) {
        if (graph.has_edge(s)) return graph.edge_target(s);
        const auto rooted = graph.rooted_set();
        const auto outgoing = graph.outgoing_set();
        std::vector<bool> in_re(params.num_inner(), false);
        for (auto i : rooted) in_re[i] = true;
        for (auto i : outgoing) in_re[i] = true;
        const bool saturated =
            std::all_of(in_re.begin(), in_re.end(), [](bool b) { return b; });
        const bool s_rooted =
            std::find(rooted.begin(), rooted.end(), params.inner(s)) != rooted.end();

        std::uint32_t t;
        if (s_rooted && !saturated) {
            std::uint32_t t_in;
            if (variant == SimVariant::ideal6) {
                std::vector<std::uint32_t> options;
                for (std::uint32_t i = 0; i < params.num_inner(); ++i)
                    if (!in_re[i]) options.push_back(i);
                if (options.empty())
                    throw saturation_error("ideal simulator cannot sample: graph saturated");
                t_in = options[src->draw(static_cast<std::uint32_t>(options.size()))];
            } else {
                t_in = src->draw(params.num_inner());
                if ((variant == SimVariant::sim3 || variant == SimVariant::sim4) && in_re[t_in])
                    bad = true;
            }
            std::uint32_t t_out;
            const auto p = query_path(s, graph);
            const auto msg = p ? unpad(*p, params.r) : std::nullopt;
            if (msg && (variant == SimVariant::sim4 || variant == SimVariant::ideal6)) {
                t_out = ho->query_block(*msg, params.r);
            } else {
                t_out = src->draw(params.num_outer());
            }
            t = params.make_state(t_out, t_in);
        } else {
            t = src->draw(params.num_states());
        }
        graph.add_edge(s, t);
        return t;
    }
};

struct GameSetup {
    int game;
    SpongeParams params;
    UniformSource* src;
    LazyOracle ho;
    LazyFunction phi;
    std::optional<SimState> sim;

    GameSetup(int g, SpongeParams p, UniformSource* s) : game(g), params(p), src(s) {
        ho.src = s;
        phi.src = s;
        phi.n = p.num_states();
        switch (game) {
            case 1: break;
            case 2: sim.emplace(SimVariant::sim2, p, s, &ho); break;
            case 3: sim.emplace(SimVariant::sim3, p, s, &ho); break;
            case 4:
            case 5: sim.emplace(SimVariant::sim4, p, s, &ho); break;
            case 6: sim.emplace(SimVariant::ideal6, p, s, &ho); break;
            default: throw std::invalid_argument("classical game number must be 1..6");
        }
    }

    ClassicalInterfaces interfaces() {
        ClassicalInterfaces ifc;
        auto pub_fn = [this](std::uint32_t s) {
            return sim ? sim->query(s) : phi.query(s);
        };
        ifc.pub = pub_fn;
        if (game >= 5) {
            ifc.priv = [this](const Bits& m, std::size_t ell) { return ho.query(m, ell); };
        } else {
            ifc.priv = [this, pub_fn](const Bits& m, std::size_t ell) {
                return sponge_eval(pub_fn, params, m, ell);
            };
        }
        return ifc;
    }

    bool bad() const { return sim && sim->bad; }
    std::size_t samples() const { return sim ? sim->graph.edge_count() : phi.table.size(); }
};

} // namespace

ClassicalSim::ClassicalSim(SimVariant variant, SpongeParams params, std::mt19937_64* rng,
                           RandomOracle* ro)
    : variant_(variant), params_(params), rng_(rng), ro_(ro), graph_(params) {}

std::uint32_t ClassicalSim::query(std::uint32_t s) {
    // thin public wrapper over the same logic with rng/hashed-oracle backing
    struct Src final : UniformSource {
        std::mt19937_64* rng;
        std::uint32_t draw(std::uint32_t n) override {
            std::uniform_int_distribution<std::uint32_t> u(0, n - 1);
            return u(*rng);
        }
    } src{};
    src.rng = rng_;

    if (graph_.has_edge(s)) return graph_.edge_target(s);
    const auto rooted = graph_.rooted_set();
    const auto outgoing = graph_.outgoing_set();
    std::vector<bool> in_re(params_.num_inner(), false);
    for (auto i : rooted) in_re[i] = true;
    for (auto i : outgoing) in_re[i] = true;
    const bool saturated = std::all_of(in_re.begin(), in_re.end(), [](bool b) { return b; });
    const bool s_rooted =
        std::find(rooted.begin(), rooted.end(), params_.inner(s)) != rooted.end();

    std::uint32_t t;
    if (s_rooted && !saturated) {
        std::uint32_t t_in;
        if (variant_ == SimVariant::ideal6) {
            std::vector<std::uint32_t> options;
            for (std::uint32_t i = 0; i < params_.num_inner(); ++i)
                if (!in_re[i]) options.push_back(i);
            if (options.empty())
                throw saturation_error("ideal simulator cannot sample: graph saturated");
            t_in = options[src.draw(static_cast<std::uint32_t>(options.size()))];
        } else {
            t_in = src.draw(params_.num_inner());
            if ((variant_ == SimVariant::sim3 || variant_ == SimVariant::sim4) && in_re[t_in])
                bad_ = true;
        }
        std::uint32_t t_out;
        const auto p = query_path(s, graph_);
        const auto msg = p ? unpad(*p, params_.r) : std::nullopt;
        if (msg && (variant_ == SimVariant::sim4 || variant_ == SimVariant::ideal6) && ro_) {
            t_out = ro_->query_block(*msg, params_.r);
        } else {
            t_out = src.draw(params_.num_outer());
        }
        t = params_.make_state(t_out, t_in);
    } else {
        t = src.draw(params_.num_states());
    }
    graph_.add_edge(s, t);
    return t;
}

ClassicalGameResult run_classical_game(int game, SpongeParams params, const ClassicalAdversary& adv,
                                       std::size_t runs, std::uint64_t seed) {
    ClassicalGameResult res;
    res.runs = runs;
    std::size_t ones = 0, bads = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        RngSource src(splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (i + 1))));
        GameSetup setup(game, params, &src);
        auto ifc = setup.interfaces();
        const int b = adv(ifc);
        ones += (b == 1);
        bads += setup.bad() ? 1 : 0;
        res.max_samples = std::max(res.max_samples, setup.samples());
    }
    res.p_one = static_cast<double>(ones) / static_cast<double>(runs);
    res.p_bad = static_cast<double>(bads) / static_cast<double>(runs);
    return res;
}

namespace {

std::string bits_to_string(const Bits& b) {
    std::string s;
    for (auto v : b) s.push_back(v ? '1' : '0');
    return s;
}

} // namespace

ExactTranscript enumerate_classical_game(int game, SpongeParams params,
                                         const ClassicalAdversary& adv) {
    ExactTranscript result;
    std::vector<std::vector<std::uint32_t>> stack = {{}};
    while (!stack.empty()) {
        auto forced = std::move(stack.back());
        stack.pop_back();

        EnumSource src;
        src.forced = &forced;
        GameSetup setup(game, params, &src);
        auto base = setup.interfaces();
        std::string transcript;
        ClassicalInterfaces recorded;
        recorded.priv = [&](const Bits& m, std::size_t ell) {
            auto out = base.priv(m, ell);
            transcript += "P(" + bits_to_string(m) + "," + std::to_string(ell) +
                          ")=" + bits_to_string(out) + ";";
            return out;
        };
        recorded.pub = [&](std::uint32_t s) {
            auto t = base.pub(s);
            transcript += "F(" + std::to_string(s) + ")=" + std::to_string(t) + ";";
            return t;
        };
        const int b = adv(recorded);

        if (src.fresh_options) {
            for (std::uint32_t k = 0; k < *src.fresh_options; ++k) {
                auto next = forced;
                next.push_back(k);
                stack.push_back(std::move(next));
            }
            continue;
        }
        const bool bad = setup.bad();
        const std::string key = transcript + "|" + std::to_string(b);
        result.with_bad[key + "|" + (bad ? "1" : "0")] += src.weight;
        if (!bad) result.given_good[key] += src.weight;
        if (bad) result.p_bad += src.weight;
    }
    double good_mass = 0.0;
    for (auto& [k, v] : result.given_good) good_mass += v;
    if (good_mass > 0)
        for (auto& [k, v] : result.given_good) v /= good_mass;
    return result;
}

} // namespace qro
