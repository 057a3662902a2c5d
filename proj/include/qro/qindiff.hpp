#pragma once

#include "qro/compressed_oracle.hpp"
#include "qro/sponge.hpp"
#include "qro/statevec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qro {

enum class QSimVariant { plain, sim2, sim3, sim4 };

const char* to_string(QSimVariant v);

// Split compressed database for the sponge simulators: q cells sharing one
// x-part over [2^(r+c)] u {bottom}, with separate outer (2^r) and inner (2^c)
// y-parts. Registers: "D{i}x", "D{i}o", "D{i}i". A half is viewed as absent
// from its database when its part reads 0 in the unprepared basis; cells are
// removed when both halves read 0.
struct SplitDbView {
    SpongeParams params;
    std::size_t q = 0;
    std::vector<std::size_t> x_idx, o_idx, i_idx;

    static SplitDbView resolve(const RegisterLayout& layout, SpongeParams params, std::size_t q);

    reg_val bottom() const { return params.num_states(); }
    std::size_t locate(std::span<const reg_val> label, reg_val x) const;
    std::size_t count_nonpadding(std::span<const reg_val> label) const;
    bool shape_ok(std::span<const reg_val> label, reg_val x_exempt) const;
};

// Configuration of one quantum sponge game's oracle stack.
struct QuantumSimConfig {
    SpongeParams params{1, 1};
    std::size_t capacity = 1; // split database cells = internal query budget
    QSimVariant variant = QSimVariant::sim2;
    bool priv_is_oracle = false; // game 5: private interface is H itself

    // Message domain of H: all messages whose paddings fit in `capacity`
    // blocks, plus any extra script messages; fixed canonical order.
    std::vector<Bits> h_domain;
    bool uses_h() const { return variant == QSimVariant::sim4 || priv_is_oracle; }

    static QuantumSimConfig for_game(int game, SpongeParams params, std::size_t capacity,
                                     const std::vector<Bits>& extra_messages = {});
};

// Size guard for the exact game harness.
void check_quantum_game_guard(const QuantumSimConfig& cfg);

// The simulator engine: compressed split database plus the graph-driven
// branch logic of the quantum simulators, with deferred puncturing.
class SpongeSimulator {
public:
    explicit SpongeSimulator(QuantumSimConfig cfg);

    const QuantumSimConfig& config() const { return cfg_; }
    std::vector<Register> oracle_registers() const; // split db + H database
    void prepare_rest(QState& state) const;         // standard-basis rest state

    // One internal-function query: Alg.-7 branch structure. For sim3/sim4 a
    // fresh J register is appended and written (deferred puncturing).
    void sim_query(QState& state, const std::string& xo, const std::string& xi,
                   const std::string& yo, const std::string& yi);

    // Plain joint compressed query (the real internal function).
    void joint_query(QState& state, const std::string& xo, const std::string& xi,
                     const std::string& yo, const std::string& yi) const;

    // H query on a message-index register and an r-bit output register.
    void h_query(QState& state, const std::string& xh, const std::string& y) const;
    std::size_t h_index(const Bits& message) const;

    const std::vector<std::string>& j_registers() const { return j_regs_; }
    double find_probability(const QState& final_state) const;

    // Classical per-label graph reconstruction used by the branch guards:
    // edges from all cells except the one holding `exclude_x`; outer parts of
    // valid-padding edges are re-derived from the H database label when
    // present (path lengths ascending).
    SpongeGraph graph_from_label(const RegisterLayout& layout, std::span<const reg_val> label,
                                 reg_val exclude_x) const;

    // The branch guard: inner(s) rooted and the graph unsaturated.
    bool rooted_guard(const RegisterLayout& layout, std::span<const reg_val> label,
                      reg_val query_x) const;

    // Exposed for tests: (rooted set u outgoing set) of the guard graph.
    std::vector<std::uint32_t> re_set(const RegisterLayout& layout,
                                      std::span<const reg_val> label, reg_val exclude_x) const;

private:
    void convert_cells(QState& state) const; // HT on every cell half (self-inverse)
    void tau_joint(QState& state, std::size_t xo_idx, std::size_t xi_idx) const;
    void half_update(QState& state, std::size_t xo_idx, std::size_t xi_idx, std::size_t eta_idx,
                     bool inner_half) const;
    void inner_core(QState& state, std::size_t xo, std::size_t xi, std::size_t eta) const;
    void outer_core(QState& state, std::size_t xo, std::size_t xi, std::size_t eta) const;
    void capacity_precheck(const QState& state, std::size_t xo_idx, std::size_t xi_idx) const;

    QuantumSimConfig cfg_;
    std::optional<CompressedOracle> h_oracle_;
    std::vector<std::string> j_regs_;
    std::size_t j_counter_ = 0;
};

// --- scripted adversaries for the quantum games ------------------------------

struct QSpongeStep {
    enum class Kind { gate, unitary, pub_query, priv_query, measure };
    Kind kind = Kind::gate;

    std::string gate;
    std::vector<std::string> targets;
    CMat matrix;

    Bits message;        // priv_query: classical message, ell = r
    std::string out_reg; // priv_query: r-bit output register (xor target)

    std::string measure_reg;
    reg_val measure_value = 0;
};

struct QSpongeScript {
    std::string name;
    std::vector<Register> registers; // must include Xo,Xi,Yo,Yi when pub queries appear
    std::vector<QSpongeStep> steps;
    std::size_t internal_queries = 0; // total internal-function queries implied

    static QSpongeScript from_json_text(const std::string& text, const SpongeParams& params);
};

struct QuantumGameRecord {
    int game = 0;
    double p_one = 0.0;
    double p_find = 0.0;
    std::size_t internal_queries = 0;
};

// Runs the script in one game (1..5); exact amplitudes throughout.
QuantumGameRecord run_quantum_game(int game, const QSpongeScript& script, SpongeParams params,
                                   std::size_t capacity);

struct QuantumGameSweep {
    std::vector<QuantumGameRecord> games; // indices 0..4 = games 1..5
    double adv12 = 0.0, adv23 = 0.0, adv34 = 0.0, adv45 = 0.0;
    double bound23 = 0.0, bound34 = 0.0, bound45 = 0.0;
    bool holds = false;
};

// Runs all five games and checks the per-step bounds: |G2-G1| = 0,
// |G3-G2| <= sqrt((q+1) Pf(G3)), |G4-G3| <= 4 Pf(G3), |G5-G4| <= 4 Pf(G4).
QuantumGameSweep run_quantum_game_sweep(const QSpongeScript& script, SpongeParams params,
                                        std::size_t capacity, double tol = 1e-9);

// Built-in scripts used by the harness and acceptance suite.
std::vector<QSpongeScript> builtin_quantum_scripts(SpongeParams params, std::size_t capacity);

} // namespace qro
