#pragma once

#include "qro/complexmat.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qro {

using reg_val = std::uint32_t;
using Label = std::vector<reg_val>;

struct Register {
    std::string name;
    std::size_t card = 0;
};

// Ordered list of named registers. The first-listed register is the most
// significant in the linearization of basis labels; every module relies on
// this ordering.
class RegisterLayout {
public:
    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<Register> regs);

    std::size_t total_dim() const { return total_dim_; }
    std::size_t num_registers() const { return regs_.size(); }
    const Register& reg(std::size_t i) const { return regs_[i]; }
    const std::vector<Register>& registers() const { return regs_; }

    std::size_t index_of(std::string_view name) const; // throws on unknown name
    bool has_register(std::string_view name) const;
    std::size_t card(std::size_t i) const { return regs_[i].card; }
    std::size_t stride(std::size_t i) const { return strides_[i]; }

    std::size_t flatten(std::span<const reg_val> label) const;
    void unflatten(std::size_t idx, std::span<reg_val> out) const;

    // New layout with `r` appended as least-significant register.
    RegisterLayout appended(const Register& r) const;
    // New layout with register `i` removed.
    RegisterLayout removed(std::size_t i) const;

    bool operator==(const RegisterLayout& o) const;

private:
    std::vector<Register> regs_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_ = 1;
};

// Unitary acting on a contiguous-by-name set of registers (tensored with the
// identity elsewhere). Unitarity is checked on construction.
struct LocalUnitary {
    std::vector<std::string> targets;
    CMat matrix;

    LocalUnitary(std::vector<std::string> t, CMat m);
};

class QState {
public:
    QState() = default;
    QState(RegisterLayout layout, std::vector<cplx> amps);

    static QState basis_state(const RegisterLayout& layout, std::span<const reg_val> assignment);
    static QState zero_state(const RegisterLayout& layout); // all registers at 0

    const RegisterLayout& layout() const { return layout_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    cplx amplitude(std::span<const reg_val> label) const;

    double norm() const;
    void renormalize();
    // Drops amplitudes below `eps` in magnitude and renormalizes. Off by
    // default everywhere; exactness is the point at desk scale.
    void prune(double eps = 1e-14);

    // Tensor with |value> on a fresh register (least significant).
    void append_register(const Register& r, reg_val value = 0);
    // Remove register `name`, which must hold |value> exactly (residual weight
    // on other values must be <= tol, and is dropped).
    void contract_register(std::string_view name, reg_val value = 0, double tol = 1e-9);

private:
    RegisterLayout layout_;
    std::vector<cplx> amps_;
};

// --- primitive operations -------------------------------------------------

void apply_qft(QState& state, std::string_view reg, bool inverse = false);
void apply_hadamard_transform(QState& state, std::string_view reg);
void apply_local_unitary(QState& state, const LocalUnitary& u);

// Applies an N x N matrix to register `target`, where the matrix may depend on
// the values of all other registers. `provider` receives the full label (the
// target coordinate is set to 0) and returns a matrix of the target's
// cardinality, or nullptr for identity.
void apply_conditioned_unitary(QState& state, std::size_t target_reg,
                               const std::function<const CMat*(std::span<const reg_val>)>& provider);

// Permutes amplitudes by a bijection on basis labels. `f` mutates the label in
// place. When `verify` is set the bijectivity is checked exhaustively.
void apply_basis_function(QState& state, const std::function<void(std::span<reg_val>)>& f,
                          bool verify = false);

// Multiplies each basis amplitude by a unit-modulus phase.
void apply_phase_function(QState& state, const std::function<cplx(std::span<const reg_val>)>& phase);

struct ProjectionResult {
    double probability = 0.0;
    std::optional<QState> accepted;
    std::optional<QState> rejected;
};

ProjectionResult project(const QState& state, const std::function<bool(std::span<const reg_val>)>& pred);

// Splits the state into (matching, rest) without renormalizing; used for
// quantum-controlled composites (block unitaries), not measurements.
std::pair<QState, QState> split_by_predicate(const QState& state,
                                             const std::function<bool(std::span<const reg_val>)>& pred);
void add_into(QState& dst, const QState& src); // dst += src (same layout)

double l2_distance(const QState& a, const QState& b);
// min over unit phases e^{i phi} of || a - e^{i phi} b ||_2
double phase_insensitive_distance(const QState& a, const QState& b);

// Iterates over the classical support: labels with |amplitude| > threshold.
void for_each_support_label(const QState& state,
                            const std::function<void(std::span<const reg_val>, cplx)>& fn,
                            double threshold = 1e-10);

// Exact marginal distribution of one register.
std::vector<double> register_distribution(const QState& state, std::string_view reg);

} // namespace qro
