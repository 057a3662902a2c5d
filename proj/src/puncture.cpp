#include "qro/puncture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qro {

Relation relation_empty() {
    Relation r;
    r.name = "empty";
    r.is_empty = true;
    r.predicate = [](std::span<const std::pair<reg_val, reg_val>>) { return false; };
    return r;
}

Relation relation_collision() {
    Relation r;
    r.name = "coll";
    r.predicate = [](std::span<const std::pair<reg_val, reg_val>> e) {
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j)
                if (e[i].first != e[j].first && e[i].second == e[j].second) return true;
        return false;
    };
    return r;
}

Relation relation_preimage(reg_val target) {
    Relation r;
    r.name = "preim";
    r.predicate = [target](std::span<const std::pair<reg_val, reg_val>> e) {
        for (const auto& p : e)
            if (p.second == target) return true;
        return false;
    };
    return r;
}

Relation relation_union(Relation a, Relation b) {
    Relation r;
    r.name = a.name + "+" + b.name;
    r.is_empty = a.is_empty && b.is_empty;
    r.predicate = [pa = a.predicate, pb = b.predicate](std::span<const std::pair<reg_val, reg_val>> e) {
        return pa(e) || pb(e);
    };
    return r;
}

Relation relation_y_membership(std::string name, std::vector<reg_val> values) {
    Relation r;
    r.name = std::move(name);
    r.predicate = [vals = std::move(values)](std::span<const std::pair<reg_val, reg_val>> e) {
        for (const auto& p : e)
            if (std::find(vals.begin(), vals.end(), p.second) != vals.end()) return true;
        return false;
    };
    return r;
}

MeasureOutcome measure_relation(const QState& state, const DatabaseView& db, DbBasis basis_tag,
                                const Relation& rel) {
    if (basis_tag != DbBasis::standard)
        throw std::logic_error("relation measurement must be performed in the standard basis, got " +
                               std::string(to_string(basis_tag)));
    auto res = project(state, [&](std::span<const reg_val> label) {
        const auto entries = db.entries(label);
        return rel(entries);
    });
    MeasureOutcome out;
    out.p_found = res.probability;
    out.found = std::move(res.accepted);
    out.not_found = std::move(res.rejected);
    return out;
}

PuncturedOracle::PuncturedOracle(CompressedOracle base, std::vector<Relation> relations,
                                 PunctureMode mode)
    : base_(std::move(base)), relations_(std::move(relations)), mode_(mode) {}

void PuncturedOracle::set_control(std::function<bool(std::span<const reg_val>)> control) {
    if (mode_ == PunctureMode::immediate)
        throw std::logic_error("conditional puncturing requires the deferred mode");
    control_ = std::move(control);
}

void PuncturedOracle::query_layer(QState& state,
                                  std::span<const std::pair<std::string, std::string>> xy_pairs) {
    for (const auto& [x, y] : xy_pairs) base_.query(state, x, y);

    const bool convert = base_.rest_basis() != DbBasis::standard;
    if (convert) base_.db_convert(state, base_.rest_basis(), DbBasis::standard);
    const auto db = base_.view(state.layout());

    for (std::size_t k = 0; k < relations_.size(); ++k) {
        const Relation& rel = relations_[k];
        if (mode_ == PunctureMode::immediate) {
            auto out = measure_relation(state, db, DbBasis::standard, rel);
            find_log_.push_back(out.p_found);
            survival_ *= (1.0 - out.p_found);
            if (out.not_found) {
                state = std::move(*out.not_found);
            } else {
                degenerate_ = true;
                state = std::move(*out.found);
            }
        } else {
            const std::string jname = "J" + std::to_string(j_counter_++);
            state.append_register({jname, 2});
            j_regs_.push_back(jname);
            j_rel_index_.push_back(k);
            const auto& layout = state.layout();
            const std::size_t ji = layout.index_of(jname);
            const auto dbj = base_.view(layout);
            const auto& control = control_;
            apply_basis_function(state, [&dbj, ji, &rel, &control](std::span<reg_val> label) {
                if (control && !control(label)) return;
                const auto entries = dbj.entries(label);
                if (rel(entries)) label[ji] ^= 1;
            });
        }
    }
    if (convert) base_.db_convert(state, DbBasis::standard, base_.rest_basis());
}

double PuncturedOracle::deferred_find_probability(const QState& final_state,
                                                  std::size_t relation_index) const {
    const auto& layout = final_state.layout();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < j_regs_.size(); ++i)
        if (j_rel_index_[i] == relation_index) idx.push_back(layout.index_of(j_regs_[i]));
    double p_none = 0.0;
    Label label(layout.num_registers());
    auto amps = final_state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        bool any = false;
        for (auto j : idx)
            if (label[j] != 0) { any = true; break; }
        if (!any) p_none += std::norm(amps[i]);
    }
    return std::clamp(1.0 - p_none, 0.0, 1.0);
}

double PuncturedOracle::deferred_find_probability_any(const QState& final_state) const {
    const auto& layout = final_state.layout();
    std::vector<std::size_t> idx;
    for (const auto& j : j_regs_) idx.push_back(layout.index_of(j));
    double p_none = 0.0;
    Label label(layout.num_registers());
    auto amps = final_state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        bool any = false;
        for (auto j : idx)
            if (label[j] != 0) { any = true; break; }
        if (!any) p_none += std::norm(amps[i]);
    }
    return std::clamp(1.0 - p_none, 0.0, 1.0);
}

namespace {

QState initial_state_for(const AdversarySpec& spec, const CompressedOracle& base) {
    std::vector<Register> regs = spec.registers;
    for (const auto& r : base.layout_registers()) regs.push_back(r);
    RegisterLayout layout(std::move(regs));
    QState state = QState::zero_state(layout);
    base.prepare_rest_state(state);
    return state;
}

} // namespace

PuncturedRunResult run_punctured(const AdversarySpec& spec, const CompressedOracle& base,
                                 const std::vector<Relation>& relations, PunctureMode mode) {
    PuncturedOracle po(base, relations, mode);
    QState state = initial_state_for(spec, base);
    run_adversary_steps(spec, state, po);
    PuncturedRunResult res{.p_output_one = 0.0,
                           .p_find = 0.0,
                           .p_find_each = {},
                           .find_log = po.find_log(),
                           .degenerate = po.degenerate(),
                           .final_state = state};
    if (spec.has_measure()) res.p_output_one = output_probability(spec, state);
    if (mode == PunctureMode::immediate) {
        res.p_find = po.cumulative_find();
    } else {
        res.p_find = po.deferred_find_probability_any(state);
        for (std::size_t k = 0; k < relations.size(); ++k)
            res.p_find_each.push_back(po.deferred_find_probability(state, k));
    }
    return res;
}

double find_probability(const AdversarySpec& spec, const CompressedOracle& base,
                        const std::vector<Relation>& relations) {
    const auto res = run_punctured(spec, base, relations, PunctureMode::immediate);
    return res.p_find;
}

O2hRecord run_o2h_experiment(const AdversarySpec& spec, const CompressedOracle& base,
                             const Relation& r1, const Relation& r2, double tol) {
    O2hRecord rec;
    const auto left = run_punctured(spec, base, {r1}, PunctureMode::deferred);
    const auto right = run_punctured(spec, base, {r1, r2}, PunctureMode::deferred);
    rec.p_left = std::clamp(left.p_output_one, 0.0, 1.0);
    rec.p_right = std::clamp(right.p_output_one, 0.0, 1.0);
    rec.p_find2 = right.p_find_each.at(1);
    rec.lhs_diff = std::abs(rec.p_left - rec.p_right);
    rec.sqrt_diff = std::abs(std::sqrt(rec.p_left) - std::sqrt(rec.p_right));
    rec.rhs_bound = std::sqrt(static_cast<double>(spec.depth + 1) * rec.p_find2);
    rec.holds = rec.lhs_diff <= rec.rhs_bound + tol && rec.sqrt_diff <= rec.rhs_bound + tol;
    return rec;
}

AlmostIdenticalRecord almost_identical_check(const AdversarySpec& spec,
                                             const CompressedOracle& base_left,
                                             const std::vector<Relation>& rels_left,
                                             const CompressedOracle& base_right,
                                             const std::vector<Relation>& rels_right, double tol) {
    AlmostIdenticalRecord rec;
    const auto left = run_punctured(spec, base_left, rels_left, PunctureMode::deferred);
    const auto right = run_punctured(spec, base_right, rels_right, PunctureMode::deferred);
    rec.p_left = left.p_output_one;
    rec.p_right = right.p_output_one;
    rec.p_find_left = left.p_find;
    rec.p_find_right = right.p_find;
    rec.diff = std::abs(rec.p_left - rec.p_right);
    rec.bound = 2.0 * rec.p_find_left + 2.0 * rec.p_find_right;
    rec.holds = rec.diff <= rec.bound + tol;
    return rec;
}

namespace {

struct BranchExplorer {
    const AdversarySpec& spec;
    const CompressedOracle& base;
    const std::vector<Relation>& relations;
    std::map<std::vector<int>, double> out;

    void run_steps(QState state, std::size_t step_idx, std::vector<int>& bits, double weight) {
        if (weight <= 1e-15) return;
        for (std::size_t si = step_idx; si < spec.steps.size(); ++si) {
            const auto& s = spec.steps[si];
            if (s.kind == AdvStep::Kind::query_layer) {
                for (const auto& [x, y] : s.query_pairs) base.query(state, x, y);
                const bool convert = base.rest_basis() != DbBasis::standard;
                if (convert) base.db_convert(state, base.rest_basis(), DbBasis::standard);
                measure_chain(std::move(state), si, 0, bits, weight, convert);
                return;
            }
            // replay non-query steps through a null oracle
            struct Null : QueryOracle {
                void query_layer(QState&, std::span<const std::pair<std::string, std::string>>) override {}
            } null_oracle;
            AdversarySpec one;
            one.registers = spec.registers;
            one.steps = {s};
            if (s.kind != AdvStep::Kind::measure) run_adversary_steps(one, state, null_oracle);
        }
        const double p1 = spec.has_measure() ? output_probability(spec, state) : 0.0;
        bits.push_back(1);
        if (weight * p1 > 0) out[bits] += weight * p1;
        bits.back() = 0;
        if (weight * (1.0 - p1) > 0) out[bits] += weight * (1.0 - p1);
        bits.pop_back();
    }

    void measure_chain(QState state, std::size_t step_idx, std::size_t rel_idx,
                       std::vector<int>& bits, double weight, bool convert) {
        if (rel_idx == relations.size()) {
            if (convert) base.db_convert(state, DbBasis::standard, base.rest_basis());
            run_steps(std::move(state), step_idx + 1, bits, weight);
            return;
        }
        const auto db = base.view(state.layout());
        auto outm = measure_relation(state, db, DbBasis::standard, relations[rel_idx]);
        if (outm.not_found) {
            bits.push_back(0);
            measure_chain(std::move(*outm.not_found), step_idx, rel_idx + 1, bits,
                          weight * (1.0 - outm.p_found), convert);
            bits.pop_back();
        }
        if (outm.found) {
            bits.push_back(1);
            measure_chain(std::move(*outm.found), step_idx, rel_idx + 1, bits, weight * outm.p_found,
                          convert);
            bits.pop_back();
        }
    }
};

} // namespace

std::map<std::vector<int>, double> immediate_joint_distribution(const AdversarySpec& spec,
                                                                const CompressedOracle& base,
                                                                const std::vector<Relation>& relations) {
    BranchExplorer ex{spec, base, relations, {}};
    std::vector<int> bits;
    ex.run_steps(initial_state_for(spec, base), 0, bits, 1.0);
    return ex.out;
}

std::map<std::vector<int>, double> deferred_joint_distribution(const AdversarySpec& spec,
                                                               const CompressedOracle& base,
                                                               const std::vector<Relation>& relations) {
    PuncturedOracle po(base, relations, PunctureMode::deferred);
    QState state = initial_state_for(spec, base);
    run_adversary_steps(spec, state, po);

    const auto& layout = state.layout();
    std::vector<std::size_t> jidx;
    for (const auto& j : po.j_registers()) jidx.push_back(layout.index_of(j));
    std::size_t mi = 0;
    reg_val mval = 0;
    for (const auto& s : spec.steps)
        if (s.kind == AdvStep::Kind::measure) {
            mi = layout.index_of(s.measure_reg);
            mval = s.measure_value;
        }

    std::map<std::vector<int>, double> out;
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        std::vector<int> key;
        key.reserve(jidx.size() + 1);
        for (auto j : jidx) key.push_back(label[j] != 0 ? 1 : 0);
        key.push_back(label[mi] == mval ? 1 : 0);
        out[key] += std::norm(amps[i]);
    }
    return out;
}

double total_variation(const std::map<std::vector<int>, double>& a,
                       const std::map<std::vector<int>, double>& b) {
    double tv = 0.0;
    for (const auto& [k, v] : a) {
        const auto it = b.find(k);
        tv += std::abs(v - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : b)
        if (!a.count(k)) tv += v;
    return 0.5 * tv;
}

} // namespace qro
