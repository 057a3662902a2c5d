#pragma once

#include "qro/statevec.hpp"

#include <random>
#include <string>
#include <vector>

namespace qro {

// Oracle interface the adversary runner queries. A layer is one unit of query
// depth; parallel queries inside a layer are applied sequentially by the
// oracle but punctured oracles measure only once per layer.
struct QueryOracle {
    virtual ~QueryOracle() = default;
    virtual void query_layer(QState& state,
                             std::span<const std::pair<std::string, std::string>> xy_pairs) = 0;
};

struct AdvStep {
    enum class Kind { gate, unitary, query_layer, measure };
    Kind kind = Kind::gate;

    // gate: one of qft, qft_inv, ht, increment, controlled_phase
    std::string gate;
    std::vector<std::string> targets;

    // unitary: explicit matrix on the joint target registers
    CMat matrix;

    // query_layer: (X,Y) register pairs queried in this layer
    std::vector<std::pair<std::string, std::string>> query_pairs;

    // measure: the adversary's binary output is [register == value]
    std::string measure_reg;
    reg_val measure_value = 0;
};

// Scripted adversary: declared query count/depth, named registers, and a step
// list ending in a single measurement step.
struct AdversarySpec {
    std::string name;
    std::size_t q = 0;     // total oracle queries
    std::size_t depth = 0; // number of query layers
    std::vector<std::uint8_t> aux_input; // opaque auxiliary input z
    std::vector<Register> registers;
    std::vector<AdvStep> steps;

    void validate() const;
    bool has_measure() const;

    static AdversarySpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Executes all steps against `oracle`. The state must already contain the
// adversary registers. Gate/unitary steps touch only adversary registers.
void run_adversary_steps(const AdversarySpec& spec, QState& state, QueryOracle& oracle);

// P[measured register == value] on the final state.
double output_probability(const AdversarySpec& spec, const QState& final_state);

// Joint distribution over the adversary's declared registers (exact).
std::vector<std::pair<Label, double>> adversary_register_distribution(const AdversarySpec& spec,
                                                                      const QState& final_state);

// Haar-ish random unitary via Gram-Schmidt on a complex Gaussian matrix.
CMat random_unitary(std::size_t dim, std::mt19937_64& rng);

// Seeded random adversary on registers X (cardinality m) and Y (cardinality
// n): q single-query layers with random interleaved unitaries, final
// measurement of a random register.
AdversarySpec random_adversary(std::size_t m, std::size_t n, std::size_t q, std::mt19937_64& rng,
                               bool allow_joint_unitaries = true);

} // namespace qro
