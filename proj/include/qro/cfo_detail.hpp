#pragma once

#include "qro/compressed_oracle.hpp"

#include <string>
#include <vector>

namespace qro {

// Database permutation of Eq.-style sigma composition: sigma_i, applied when
// mask bit i is set, moves cell i to the back of the database (cells i+1..q-1
// shift forward). The composition runs sigma_1 ... sigma_q in order on the
// evolving tuple. The inverse creates an empty slot: with a one-hot mask at
// position p it moves the back cell to position p.
void pi_permute(std::vector<std::pair<reg_val, reg_val>>& cells, const std::vector<int>& mask);
void pi_permute_inverse(std::vector<std::pair<reg_val, reg_val>>& cells, const std::vector<int>& mask);

// funLarger: strictly-greater comparator on cell x-parts (padding sorts last).
inline bool fun_larger(reg_val u, reg_val v) { return u > v; }

// The fully instrumented compressed-oracle query: the subroutine chain of the
// detailed algorithm with the scratch registers S (entry count), L (location),
// A (added flag) and B (removed flag) materialized in the layout. All four
// return to |0> on well-formed inputs; the instrumented query checks this and
// contracts them away, so callers see the same interface as cfo_query.
//
// The A flag is uncomputed right after the insertion step (from "the located
// cell stores 0") rather than at the end: for non-uniform distributions the
// basis change of the update step mixes the added/present branches, after
// which "was x fresh" is no longer readable from any register.
class InstrumentedCfo {
public:
    explicit InstrumentedCfo(const CompressedOracle& oracle) : oracle_(&oracle) {}

    static constexpr const char* kS = "scratchS";
    static constexpr const char* kL = "scratchL";
    static constexpr const char* kA = "scratchA";
    static constexpr const char* kB = "scratchB";

    // Appends the scratch registers to the state (all |0>).
    void attach_scratch(QState& state) const;
    // Total weight on labels with nonzero scratch.
    double scratch_residual(const QState& state) const;
    // Projects scratch back out; throws if the residual exceeds tol.
    void detach_scratch(QState& state, double tol = 1e-9) const;

    // Individual steps, each a basis permutation or a conditioned unitary on
    // the extended layout. Exposed for unit tests.
    void count_into_s(QState& state, bool uncompute) const;
    void fun_locate(QState& state, std::string_view x_reg, bool uncompute) const;
    void flag_a_if_unlocated(QState& state) const;
    void fun_add(QState& state, std::string_view x_reg) const;
    void fun_clean_a(QState& state, std::string_view x_reg) const;
    void fun_upd(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    void fun_rem(QState& state, std::string_view x_reg) const;
    void uncompute_b(QState& state, std::string_view x_reg) const;

    // Full query on a state that already carries the scratch registers.
    void query_extended(QState& state, std::string_view x_reg, std::string_view y_reg) const;

    // Convenience wrapper: attach, query, verify cleanliness, detach.
    // Returns the scratch residual observed before detaching.
    double query(QState& state, std::string_view x_reg, std::string_view y_reg,
                 double tol = 1e-9) const;

private:
    const CompressedOracle* oracle_;
};

} // namespace qro
