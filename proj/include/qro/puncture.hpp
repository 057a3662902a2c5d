#pragma once

#include "qro/adversary.hpp"
#include "qro/compressed_oracle.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qro {

// Decidable predicate on the ordered non-padding (x, y) entries of a database
// basis label, evaluated in the standard basis.
struct Relation {
    std::string name;
    std::function<bool(std::span<const std::pair<reg_val, reg_val>>)> predicate;
    bool is_empty = false;

    bool operator()(std::span<const std::pair<reg_val, reg_val>> entries) const {
        return predicate(entries);
    }
};

Relation relation_empty();
Relation relation_collision();                       // two entries, distinct x, equal y
Relation relation_preimage(reg_val target = 0);      // some y == target
Relation relation_union(Relation a, Relation b);
Relation relation_y_membership(std::string name, std::vector<reg_val> values); // some y in set

struct MeasureOutcome {
    double p_found = 0.0;
    std::optional<QState> found;
    std::optional<QState> not_found;
};

// Alg.-style relation measurement: count entries, decide membership, measure,
// renormalize branches. The database registers must be in the standard basis.
MeasureOutcome measure_relation(const QState& state, const DatabaseView& db, DbBasis basis_tag,
                                const Relation& rel);

enum class PunctureMode { immediate, deferred };

// Compressed oracle punctured on a list of relations, each measured after
// every query layer. Immediate mode keeps the renormalized not-found branch;
// deferred mode XORs membership bits into fresh persistent J registers that
// are measured at the end of the run. Single-run object (carries the find
// log); clone per run.
class PuncturedOracle : public QueryOracle {
public:
    PuncturedOracle(CompressedOracle base, std::vector<Relation> relations, PunctureMode mode);

    const CompressedOracle& base() const { return base_; }
    PunctureMode mode() const { return mode_; }
    const std::vector<Relation>& relations() const { return relations_; }

    void query_layer(QState& state,
                     std::span<const std::pair<std::string, std::string>> xy_pairs) override;

    // Per-measurement conditional found probabilities (immediate mode).
    const std::vector<double>& find_log() const { return find_log_; }
    double cumulative_find() const { return 1.0 - survival_; }
    bool degenerate() const { return degenerate_; }

    // Deferred J registers allocated so far, in measurement order.
    const std::vector<std::string>& j_registers() const { return j_regs_; }
    // Find probability of one relation (by index in `relations`) from the
    // deferred J registers of a final state.
    double deferred_find_probability(const QState& final_state, std::size_t relation_index) const;
    double deferred_find_probability_any(const QState& final_state) const;

    // Conditional puncturing (membership-bit write controlled on a label
    // predicate) is only sound when deferred; immediate mode throws.
    void set_control(std::function<bool(std::span<const reg_val>)> control);

private:
    CompressedOracle base_;
    std::vector<Relation> relations_;
    PunctureMode mode_;
    std::function<bool(std::span<const reg_val>)> control_;
    std::vector<double> find_log_;
    double survival_ = 1.0;
    bool degenerate_ = false;
    std::vector<std::string> j_regs_;
    std::vector<std::size_t> j_rel_index_;
    std::size_t j_counter_ = 0;
};

struct PuncturedRunResult {
    double p_output_one = 0.0;
    double p_find = 0.0;              // cumulative over all relations
    std::vector<double> p_find_each;  // per relation (deferred) or merged log (immediate)
    std::vector<double> find_log;
    bool degenerate = false;
    QState final_state;
};

// Runs the adversary against `base` punctured on `relations`.
PuncturedRunResult run_punctured(const AdversarySpec& spec, const CompressedOracle& base,
                                 const std::vector<Relation>& relations, PunctureMode mode);

// Exact Find probability via the product formula 1 - prod(1 - p_i); also
// cross-checked inside against the surviving-branch norm.
double find_probability(const AdversarySpec& spec, const CompressedOracle& base,
                        const std::vector<Relation>& relations);

struct O2hRecord {
    double p_left = 0.0;     // P[b=1 : A^{H\R1}]
    double p_right = 0.0;    // P[b=1 : A^{H\R1 u R2}]
    double p_find2 = 0.0;    // P[Find_2] in the right experiment
    double lhs_diff = 0.0;   // |p_left - p_right|
    double sqrt_diff = 0.0;  // |sqrt(p_left) - sqrt(p_right)|
    double rhs_bound = 0.0;  // sqrt((d+1) p_find2)
    bool holds = false;
};

O2hRecord run_o2h_experiment(const AdversarySpec& spec, const CompressedOracle& base,
                             const Relation& r1, const Relation& r2, double tol = 1e-9);

struct AlmostIdenticalRecord {
    double p_left = 0.0, p_right = 0.0;
    double p_find_left = 0.0, p_find_right = 0.0;
    double diff = 0.0;
    double bound = 0.0; // 2 P[Find_1] + 2 P[Find_2]
    bool holds = false;
};

AlmostIdenticalRecord almost_identical_check(const AdversarySpec& spec,
                                             const CompressedOracle& base_left,
                                             const std::vector<Relation>& rels_left,
                                             const CompressedOracle& base_right,
                                             const std::vector<Relation>& rels_right,
                                             double tol = 1e-9);

// Joint distribution over (measurement outcome bits in order, adversary output
// bit): exact, by exploring every outcome branch of the immediate-mode run.
std::map<std::vector<int>, double> immediate_joint_distribution(const AdversarySpec& spec,
                                                                const CompressedOracle& base,
                                                                const std::vector<Relation>& relations);
// Same joint distribution from one deferred-mode run.
std::map<std::vector<int>, double> deferred_joint_distribution(const AdversarySpec& spec,
                                                               const CompressedOracle& base,
                                                               const std::vector<Relation>& relations);

double total_variation(const std::map<std::vector<int>, double>& a,
                       const std::map<std::vector<int>, double>& b);

} // namespace qro
