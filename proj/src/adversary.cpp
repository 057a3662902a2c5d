#include "qro/adversary.hpp"

#include <json.hpp>

#include <stdexcept>

namespace qro {

void AdversarySpec::validate() const {
    std::size_t queries = 0, layers = 0, measures = 0;
    for (const auto& s : steps) {
        switch (s.kind) {
            case AdvStep::Kind::query_layer:
                if (s.query_pairs.empty()) throw std::invalid_argument("empty query layer");
                queries += s.query_pairs.size();
                ++layers;
                break;
            case AdvStep::Kind::measure: ++measures; break;
            case AdvStep::Kind::unitary:
                if (!s.matrix.is_unitary(kPhysTol))
                    throw std::invalid_argument("adversary step matrix is not unitary");
                break;
            case AdvStep::Kind::gate: break;
        }
    }
    if (queries != q)
        throw std::invalid_argument("adversary declares q=" + std::to_string(q) + " but steps make " +
                                    std::to_string(queries) + " queries");
    if (layers != depth)
        throw std::invalid_argument("adversary declares depth=" + std::to_string(depth) +
                                    " but steps contain " + std::to_string(layers) + " layers");
    if (measures > 1) throw std::invalid_argument("adversary may have at most one measure step");
}

bool AdversarySpec::has_measure() const {
    for (const auto& s : steps)
        if (s.kind == AdvStep::Kind::measure) return true;
    return false;
}

namespace {

void apply_gate(const AdvStep& s, QState& state) {
    if (s.gate == "qft" || s.gate == "qft_inv") {
        for (const auto& t : s.targets) apply_qft(state, t, s.gate == "qft_inv");
    } else if (s.gate == "ht") {
        for (const auto& t : s.targets) apply_hadamard_transform(state, t);
    } else if (s.gate == "increment") {
        const auto& layout = state.layout();
        for (const auto& t : s.targets) {
            const std::size_t ri = layout.index_of(t);
            const std::size_t card = layout.card(ri);
            apply_basis_function(state, [ri, card](std::span<reg_val> label) {
                label[ri] = static_cast<reg_val>((label[ri] + 1) % card);
            });
        }
    } else if (s.gate == "controlled_phase") {
        if (s.targets.size() != 2) throw std::invalid_argument("controlled_phase needs two targets");
        const auto& layout = state.layout();
        const std::size_t a = layout.index_of(s.targets[0]);
        const std::size_t b = layout.index_of(s.targets[1]);
        const std::size_t nb = layout.card(b);
        apply_phase_function(state, [a, b, nb](std::span<const reg_val> label) {
            return root_of_unity(nb, (static_cast<std::size_t>(label[a]) * label[b]) % nb);
        });
    } else {
        throw std::invalid_argument("unknown gate '" + s.gate + "'");
    }
}

} // namespace

void run_adversary_steps(const AdversarySpec& spec, QState& state, QueryOracle& oracle) {
    for (const auto& s : spec.steps) {
        switch (s.kind) {
            case AdvStep::Kind::gate: apply_gate(s, state); break;
            case AdvStep::Kind::unitary: {
                apply_local_unitary(state, LocalUnitary(s.targets, s.matrix));
                break;
            }
            case AdvStep::Kind::query_layer: oracle.query_layer(state, s.query_pairs); break;
            case AdvStep::Kind::measure: break; // handled by output_probability
        }
    }
}

double output_probability(const AdversarySpec& spec, const QState& final_state) {
    for (const auto& s : spec.steps) {
        if (s.kind != AdvStep::Kind::measure) continue;
        const auto dist = register_distribution(final_state, s.measure_reg);
        if (s.measure_value >= dist.size()) throw std::out_of_range("measure value out of range");
        return dist[s.measure_value];
    }
    throw std::logic_error("adversary has no measure step");
}

std::vector<std::pair<Label, double>> adversary_register_distribution(const AdversarySpec& spec,
                                                                      const QState& final_state) {
    const auto& layout = final_state.layout();
    std::vector<std::size_t> idx;
    for (const auto& r : spec.registers) idx.push_back(layout.index_of(r.name));
    std::vector<double> acc;
    std::size_t dim = 1;
    for (const auto& r : spec.registers) dim *= r.card;
    acc.assign(dim, 0.0);
    Label label(layout.num_registers());
    auto amps = final_state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        std::size_t key = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) key = key * spec.registers[k].card + label[idx[k]];
        acc[key] += std::norm(amps[i]);
    }
    std::vector<std::pair<Label, double>> out;
    for (std::size_t key = 0; key < dim; ++key) {
        if (acc[key] == 0.0) continue;
        Label l(spec.registers.size());
        std::size_t rem = key;
        for (std::size_t k = spec.registers.size(); k-- > 0;) {
            l[k] = static_cast<reg_val>(rem % spec.registers[k].card);
            rem /= spec.registers[k].card;
        }
        out.emplace_back(std::move(l), acc[key]);
    }
    return out;
}

CMat random_unitary(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMat m(dim);
    // columns = Gram-Schmidt of Gaussian vectors
    for (std::size_t c = 0; c < dim; ++c) {
        std::vector<cplx> v(dim);
        for (auto& e : v) e = {g(rng), g(rng)};
        for (std::size_t prev = 0; prev < c; ++prev) {
            cplx ip{};
            for (std::size_t r = 0; r < dim; ++r) ip += std::conj(m(r, prev)) * v[r];
            for (std::size_t r = 0; r < dim; ++r) v[r] -= ip * m(r, prev);
        }
        double nrm = 0.0;
        for (const auto& e : v) nrm += std::norm(e);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) { --c; continue; } // resample on degenerate draw
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = v[r] / nrm;
    }
    return m;
}

AdversarySpec random_adversary(std::size_t m, std::size_t n, std::size_t q, std::mt19937_64& rng,
                               bool allow_joint_unitaries) {
    AdversarySpec spec;
    spec.name = "random";
    spec.q = q;
    spec.depth = q;
    spec.registers = {{"X", m}, {"Y", n}};
    std::uniform_int_distribution<int> coin(0, 1);
    auto push_unitaries = [&] {
        if (allow_joint_unitaries && m * n <= 16 && coin(rng)) {
            AdvStep s;
            s.kind = AdvStep::Kind::unitary;
            s.targets = {"X", "Y"};
            s.matrix = random_unitary(m * n, rng);
            spec.steps.push_back(std::move(s));
        } else {
            AdvStep sx;
            sx.kind = AdvStep::Kind::unitary;
            sx.targets = {"X"};
            sx.matrix = random_unitary(m, rng);
            spec.steps.push_back(std::move(sx));
            AdvStep sy;
            sy.kind = AdvStep::Kind::unitary;
            sy.targets = {"Y"};
            sy.matrix = random_unitary(n, rng);
            spec.steps.push_back(std::move(sy));
        }
    };
    for (std::size_t i = 0; i < q; ++i) {
        push_unitaries();
        AdvStep sq;
        sq.kind = AdvStep::Kind::query_layer;
        sq.query_pairs = {{"X", "Y"}};
        spec.steps.push_back(std::move(sq));
    }
    push_unitaries();
    AdvStep sm;
    sm.kind = AdvStep::Kind::measure;
    sm.measure_reg = coin(rng) ? "X" : "Y";
    sm.measure_value = 0;
    spec.steps.push_back(std::move(sm));
    spec.validate();
    return spec;
}

// --- JSON ------------------------------------------------------------------

namespace {

CMat matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<std::array<double, 2>>>>();
    CMat m(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) throw std::invalid_argument("matrix is not square");
        for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = {rows[r][c][0], rows[r][c][1]};
    }
    return m;
}

nlohmann::json matrix_to_json(const CMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.dim(); ++c)
            row.push_back(nlohmann::json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

AdversarySpec AdversarySpec::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    AdversarySpec spec;
    spec.name = j.value("name", "adversary");
    spec.q = j.at("q").get<std::size_t>();
    spec.depth = j.at("depth").get<std::size_t>();
    if (j.contains("aux_input")) spec.aux_input = j["aux_input"].get<std::vector<std::uint8_t>>();
    for (const auto& r : j.at("registers"))
        spec.registers.push_back({r.at("name").get<std::string>(), r.at("card").get<std::size_t>()});
    for (const auto& s : j.at("steps")) {
        AdvStep step;
        const std::string op = s.at("op").get<std::string>();
        if (op == "gate") {
            step.kind = AdvStep::Kind::gate;
            step.gate = s.at("gate").get<std::string>();
            step.targets = s.at("targets").get<std::vector<std::string>>();
        } else if (op == "unitary") {
            step.kind = AdvStep::Kind::unitary;
            step.targets = s.at("targets").get<std::vector<std::string>>();
            step.matrix = matrix_from_json(s.at("matrix"));
        } else if (op == "query") {
            step.kind = AdvStep::Kind::query_layer;
            if (s.contains("pairs")) {
                for (const auto& p : s.at("pairs"))
                    step.query_pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
            } else {
                step.query_pairs = {{s.value("x", "X"), s.value("y", "Y")}};
            }
        } else if (op == "measure") {
            step.kind = AdvStep::Kind::measure;
            step.measure_reg = s.at("register").get<std::string>();
            step.measure_value = s.value("value", 0u);
        } else {
            throw std::invalid_argument("unknown adversary step op '" + op + "'");
        }
        spec.steps.push_back(std::move(step));
    }
    spec.validate();
    return spec;
}

std::string AdversarySpec::to_json_text() const {
    nlohmann::json j;
    j["name"] = name;
    j["q"] = q;
    j["depth"] = depth;
    if (!aux_input.empty()) j["aux_input"] = aux_input;
    j["registers"] = nlohmann::json::array();
    for (const auto& r : registers) j["registers"].push_back({{"name", r.name}, {"card", r.card}});
    j["steps"] = nlohmann::json::array();
    for (const auto& s : steps) {
        nlohmann::json js;
        switch (s.kind) {
            case AdvStep::Kind::gate:
                js["op"] = "gate";
                js["gate"] = s.gate;
                js["targets"] = s.targets;
                break;
            case AdvStep::Kind::unitary:
                js["op"] = "unitary";
                js["targets"] = s.targets;
                js["matrix"] = matrix_to_json(s.matrix);
                break;
            case AdvStep::Kind::query_layer: {
                js["op"] = "query";
                nlohmann::json pairs = nlohmann::json::array();
                for (const auto& p : s.query_pairs)
                    pairs.push_back(nlohmann::json::array({p.first, p.second}));
                js["pairs"] = std::move(pairs);
                break;
            }
            case AdvStep::Kind::measure:
                js["op"] = "measure";
                js["register"] = s.measure_reg;
                js["value"] = s.measure_value;
                break;
        }
        j["steps"].push_back(std::move(js));
    }
    return j.dump(2);
}

} // namespace qro
