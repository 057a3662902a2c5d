#include "qro/qindiff.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace qro {

const char* to_string(QSimVariant v) {
    switch (v) {
        case QSimVariant::plain: return "plain";
        case QSimVariant::sim2: return "Sim2";
        case QSimVariant::sim3: return "Sim3";
        case QSimVariant::sim4: return "Sim4";
    }
    return "?";
}

SplitDbView SplitDbView::resolve(const RegisterLayout& layout, SpongeParams params, std::size_t q) {
    SplitDbView v;
    v.params = params;
    v.q = q;
    for (std::size_t i = 0; i < q; ++i) {
        v.x_idx.push_back(layout.index_of("D" + std::to_string(i) + "x"));
        v.o_idx.push_back(layout.index_of("D" + std::to_string(i) + "o"));
        v.i_idx.push_back(layout.index_of("D" + std::to_string(i) + "i"));
    }
    return v;
}

std::size_t SplitDbView::locate(std::span<const reg_val> label, reg_val x) const {
    for (std::size_t i = 0; i < q; ++i)
        if (label[x_idx[i]] == x) return i + 1;
    return 0;
}

std::size_t SplitDbView::count_nonpadding(std::span<const reg_val> label) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < q; ++i)
        if (label[x_idx[i]] != bottom()) ++s;
    return s;
}

bool SplitDbView::shape_ok(std::span<const reg_val> label, reg_val x_exempt) const {
    bool in_padding = false;
    reg_val prev = 0;
    bool first = true;
    for (std::size_t i = 0; i < q; ++i) {
        const reg_val xp = label[x_idx[i]];
        const reg_val yo = label[o_idx[i]];
        const reg_val yi = label[i_idx[i]];
        if (xp == bottom()) {
            if (yo != 0 || yi != 0) return false;
            in_padding = true;
            continue;
        }
        if (in_padding) return false;
        if (yo == 0 && yi == 0 && xp != x_exempt) return false;
        if (!first && xp <= prev) return false;
        prev = xp;
        first = false;
    }
    return true;
}

QuantumSimConfig QuantumSimConfig::for_game(int game, SpongeParams params, std::size_t capacity,
                                            const std::vector<Bits>& extra_messages) {
    QuantumSimConfig cfg;
    cfg.params = params;
    cfg.capacity = capacity;
    switch (game) {
        case 1: cfg.variant = QSimVariant::plain; break;
        case 2: cfg.variant = QSimVariant::sim2; break;
        case 3: cfg.variant = QSimVariant::sim3; break;
        case 4: cfg.variant = QSimVariant::sim4; break;
        case 5:
            cfg.variant = QSimVariant::sim4;
            cfg.priv_is_oracle = true;
            break;
        default: throw std::invalid_argument("quantum game number must be 1..5");
    }
    if (cfg.uses_h()) {
        // every message whose padding fits in `capacity` blocks
        std::vector<Bits> domain;
        const std::size_t max_bits = capacity * params.r;
        for (std::size_t len = 0; len + 2 <= max_bits + 1; ++len) {
            if (len > 16) break;
            for (std::uint64_t v = 0; v < (1ull << len); ++v) {
                Bits m(len);
                for (std::size_t k = 0; k < len; ++k) m[k] = (v >> (len - 1 - k)) & 1;
                if (pad(m, params.r).size() <= capacity) domain.push_back(m);
            }
        }
        for (const auto& m : extra_messages)
            if (std::find(domain.begin(), domain.end(), m) == domain.end()) domain.push_back(m);
        std::sort(domain.begin(), domain.end(), [](const Bits& a, const Bits& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        cfg.h_domain = std::move(domain);
    }
    return cfg;
}

void check_quantum_game_guard(const QuantumSimConfig& cfg) {
    if (cfg.params.r != 1 || cfg.params.c > 2 || cfg.capacity > 2)
        throw std::invalid_argument("quantum game guard: requires r = 1, c <= 2, q <= 2 (got r=" +
                                    std::to_string(cfg.params.r) + ", c=" +
                                    std::to_string(cfg.params.c) + ", q=" +
                                    std::to_string(cfg.capacity) + ")");
}

SpongeSimulator::SpongeSimulator(QuantumSimConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.uses_h() && !cfg_.h_domain.empty()) {
        const std::size_t domain = cfg_.h_domain.size();
        const std::size_t h_cap = std::min(domain, cfg_.capacity + 2);
        h_oracle_.emplace(ProductDistribution::uniform_xor(domain, cfg_.params.num_outer()),
                          GroupOp::xored(), h_cap, CompressedPicture::csto, "H");
    }
}

std::vector<Register> SpongeSimulator::oracle_registers() const {
    std::vector<Register> regs;
    for (std::size_t i = 0; i < cfg_.capacity; ++i) {
        regs.push_back({"D" + std::to_string(i) + "x", cfg_.params.num_states() + 1});
        regs.push_back({"D" + std::to_string(i) + "o", cfg_.params.num_outer()});
        regs.push_back({"D" + std::to_string(i) + "i", cfg_.params.num_inner()});
    }
    if (h_oracle_)
        for (const auto& r : h_oracle_->layout_registers()) regs.push_back(r);
    return regs;
}

void SpongeSimulator::convert_cells(QState& state) const {
    const auto db = SplitDbView::resolve(state.layout(), cfg_.params, cfg_.capacity);
    const CMat ht_outer = hadamard_matrix(cfg_.params.num_outer());
    const CMat ht_inner = hadamard_matrix(cfg_.params.num_inner());
    for (std::size_t i = 0; i < cfg_.capacity; ++i) {
        apply_conditioned_unitary(state, db.o_idx[i],
                                  [&ht_outer](std::span<const reg_val>) { return &ht_outer; });
        apply_conditioned_unitary(state, db.i_idx[i],
                                  [&ht_inner](std::span<const reg_val>) { return &ht_inner; });
    }
}

void SpongeSimulator::prepare_rest(QState& state) const {
    const auto db = SplitDbView::resolve(state.layout(), cfg_.params, cfg_.capacity);
    apply_basis_function(state, [&db](std::span<reg_val> label) {
        for (std::size_t i = 0; i < db.q; ++i) label[db.x_idx[i]] = db.bottom();
    });
    convert_cells(state);
    if (h_oracle_) h_oracle_->prepare_rest_state(state);
}

void SpongeSimulator::capacity_precheck(const QState& state, std::size_t xo_idx,
                                        std::size_t xi_idx) const {
    const auto db = SplitDbView::resolve(state.layout(), cfg_.params, cfg_.capacity);
    const auto& p = cfg_.params;
    bool overflow = false;
    for_each_support_label(state, [&](std::span<const reg_val> label, cplx) {
        if (overflow) return;
        const reg_val x = static_cast<reg_val>(p.make_state(label[xo_idx], label[xi_idx]));
        if (db.locate(label, x) == 0 && db.count_nonpadding(label) >= db.q) overflow = true;
    });
    if (overflow) throw capacity_error("split database capacity exceeded");
}

namespace {

void split_shift_insert(const SplitDbView& db, std::span<reg_val> label, std::size_t pos,
                        reg_val x) {
    for (std::size_t i = db.q - 1; i > pos; --i) {
        label[db.x_idx[i]] = label[db.x_idx[i - 1]];
        label[db.o_idx[i]] = label[db.o_idx[i - 1]];
        label[db.i_idx[i]] = label[db.i_idx[i - 1]];
    }
    label[db.x_idx[pos]] = x;
    label[db.o_idx[pos]] = 0;
    label[db.i_idx[pos]] = 0;
}

void split_shift_remove(const SplitDbView& db, std::span<reg_val> label, std::size_t pos) {
    for (std::size_t i = pos; i + 1 < db.q; ++i) {
        label[db.x_idx[i]] = label[db.x_idx[i + 1]];
        label[db.o_idx[i]] = label[db.o_idx[i + 1]];
        label[db.i_idx[i]] = label[db.i_idx[i + 1]];
    }
    label[db.x_idx[db.q - 1]] = db.bottom();
    label[db.o_idx[db.q - 1]] = 0;
    label[db.i_idx[db.q - 1]] = 0;
}

} // namespace

void SpongeSimulator::tau_joint(QState& state, std::size_t xo_idx, std::size_t xi_idx) const {
    const auto db = SplitDbView::resolve(state.layout(), cfg_.params, cfg_.capacity);
    const auto& p = cfg_.params;
    apply_basis_function(state, [&db, &p, xo_idx, xi_idx](std::span<reg_val> label) {
        const reg_val x = static_cast<reg_val>(p.make_state(label[xo_idx], label[xi_idx]));
        if (!db.shape_ok(label, x)) return;
        const std::size_t loc = db.locate(label, x);
        if (loc != 0) {
            if (label[db.o_idx[loc - 1]] == 0 && label[db.i_idx[loc - 1]] == 0)
                split_shift_remove(db, label, loc - 1);
            return;
        }
        if (label[db.x_idx[db.q - 1]] != db.bottom()) return;
        std::size_t pos = 0;
        while (pos < db.q && label[db.x_idx[pos]] < x) ++pos;
        split_shift_insert(db, label, pos, x);
    });
}

void SpongeSimulator::half_update(QState& state, std::size_t xo_idx, std::size_t xi_idx,
                                  std::size_t eta_idx, bool inner_half) const {
    const auto db = SplitDbView::resolve(state.layout(), cfg_.params, cfg_.capacity);
    const auto& p = cfg_.params;
    apply_basis_function(state, [&db, &p, xo_idx, xi_idx, eta_idx, inner_half](std::span<reg_val> label) {
        const reg_val x = static_cast<reg_val>(p.make_state(label[xo_idx], label[xi_idx]));
        const std::size_t loc = db.locate(label, x);
        if (loc == 0) return;
        const std::size_t target = inner_half ? db.i_idx[loc - 1] : db.o_idx[loc - 1];
        label[target] = label[target] ^ label[eta_idx];
    });
}

void SpongeSimulator::inner_core(QState& state, std::size_t xo, std::size_t xi,
                                 std::size_t eta) const {
    tau_joint(state, xo, xi);
    half_update(state, xo, xi, eta, /*inner_half=*/true);
    tau_joint(state, xo, xi);
}

void SpongeSimulator::outer_core(QState& state, std::size_t xo, std::size_t xi,
                                 std::size_t eta) const {
    tau_joint(state, xo, xi);
    half_update(state, xo, xi, eta, /*inner_half=*/false);
    tau_joint(state, xo, xi);
}

void SpongeSimulator::joint_query(QState& state, const std::string& xo, const std::string& xi,
                                  const std::string& yo, const std::string& yi) const {
    const auto& layout = state.layout();
    const std::size_t xoi = layout.index_of(xo), xii = layout.index_of(xi);
    const std::size_t yoi = layout.index_of(yo), yii = layout.index_of(yi);
    capacity_precheck(state, xoi, xii);
    QState& s = state;
    apply_hadamard_transform(s, yo);
    apply_hadamard_transform(s, yi);
    convert_cells(s);
    tau_joint(s, xoi, xii);
    half_update(s, xoi, xii, yoi, false);
    half_update(s, xoi, xii, yii, true);
    tau_joint(s, xoi, xii);
    convert_cells(s);
    apply_hadamard_transform(s, yo);
    apply_hadamard_transform(s, yi);
}

namespace {

// Label-level reconstruction of the simulator graph: edges from every cell
// except the one holding `exclude_x`; outer parts of valid-padding edges are
// re-read from the H database (path lengths ascending), others from the
// stored outer half.
struct GuardContext {
    const SpongeParams params;
    const SplitDbView db;
    const bool sim4;
    const std::vector<Bits>* h_domain;
    const std::optional<DatabaseView> h_view;

    SpongeGraph build_graph(std::span<const reg_val> label, reg_val exclude_x) const {
        SpongeGraph g(params);
        struct Cell {
            reg_val x, o, i;
        };
        std::vector<Cell> remaining;
        for (std::size_t k = 0; k < db.q; ++k) {
            const reg_val xp = label[db.x_idx[k]];
            if (xp == db.bottom() || xp == exclude_x) continue;
            remaining.push_back({xp, label[db.o_idx[k]], label[db.i_idx[k]]});
        }
        bool changed = true;
        while (changed && !remaining.empty()) {
            changed = false;
            for (std::size_t k = 0; k < remaining.size(); ++k) {
                const auto cell = remaining[k];
                const auto qp = query_path(cell.x, g);
                if (!qp) continue;
                reg_val outer = cell.o;
                if (sim4) {
                    const auto msg = unpad(*qp, params.r);
                    if (msg) {
                        const auto h = h_value(label, *msg);
                        if (h) outer = *h;
                    }
                }
                g.add_edge(cell.x, params.make_state(outer, cell.i));
                remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
                break;
            }
        }
        // unrooted leftovers cannot lie on any sponge path; keep stored outers
        for (const auto& cell : remaining)
            g.add_edge(cell.x, params.make_state(cell.o, cell.i));
        return g;
    }

    std::optional<reg_val> h_value(std::span<const reg_val> label, const Bits& msg) const {
        if (!h_view || !h_domain) return std::nullopt;
        const auto it = std::find(h_domain->begin(), h_domain->end(), msg);
        if (it == h_domain->end()) return std::nullopt;
        const reg_val idx = static_cast<reg_val>(it - h_domain->begin());
        for (std::size_t k = 0; k < h_view->q; ++k) {
            if (h_view->cell_x(label, k) == idx) return h_view->cell_y(label, k);
        }
        return std::nullopt;
    }

    std::vector<bool> re_mask(std::span<const reg_val> label, reg_val exclude_x) const {
        const auto g = build_graph(label, exclude_x);
        std::vector<bool> mask(params.num_inner(), false);
        for (auto i : g.rooted_set()) mask[i] = true;
        for (auto i : g.outgoing_set()) mask[i] = true;
        return mask;
    }

    bool rooted_unsaturated(std::span<const reg_val> label, reg_val x) const {
        const auto g = build_graph(label, x);
        const auto rooted = g.rooted_set();
        const bool is_rooted =
            std::find(rooted.begin(), rooted.end(), params.inner(x)) != rooted.end();
        if (!is_rooted) return false;
        std::vector<bool> mask(params.num_inner(), false);
        for (auto i : rooted) mask[i] = true;
        for (auto i : g.outgoing_set()) mask[i] = true;
        return !std::all_of(mask.begin(), mask.end(), [](bool b) { return b; });
    }

    // valid-padding message of the query path, if any
    std::optional<Bits> valid_message(std::span<const reg_val> label, reg_val x) const {
        const auto g = build_graph(label, x);
        const auto qp = query_path(x, g);
        if (!qp) return std::nullopt;
        return unpad(*qp, params.r);
    }
};

} // namespace

namespace {

GuardContext make_guard(const QuantumSimConfig& cfg, const std::optional<CompressedOracle>& h,
                        const RegisterLayout& layout, bool use_h) {
    return GuardContext{cfg.params, SplitDbView::resolve(layout, cfg.params, cfg.capacity), use_h,
                        cfg.uses_h() ? &cfg.h_domain : nullptr,
                        h ? std::optional<DatabaseView>(h->view(layout)) : std::nullopt};
}

} // namespace

SpongeGraph SpongeSimulator::graph_from_label(const RegisterLayout& layout,
                                              std::span<const reg_val> label,
                                              reg_val exclude_x) const {
    const bool use_h = cfg_.variant == QSimVariant::sim4 && h_oracle_.has_value();
    return make_guard(cfg_, h_oracle_, layout, use_h).build_graph(label, exclude_x);
}

bool SpongeSimulator::rooted_guard(const RegisterLayout& layout, std::span<const reg_val> label,
                                   reg_val query_x) const {
    const bool use_h = cfg_.variant == QSimVariant::sim4 && h_oracle_.has_value();
    return make_guard(cfg_, h_oracle_, layout, use_h).rooted_unsaturated(label, query_x);
}

std::vector<std::uint32_t> SpongeSimulator::re_set(const RegisterLayout& layout,
                                                   std::span<const reg_val> label,
                                                   reg_val exclude_x) const {
    const bool use_h = cfg_.variant == QSimVariant::sim4 && h_oracle_.has_value();
    const auto mask = make_guard(cfg_, h_oracle_, layout, use_h).re_mask(label, exclude_x);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

void SpongeSimulator::h_query(QState& state, const std::string& xh, const std::string& y) const {
    if (!h_oracle_) throw std::logic_error("this game configuration has no random oracle handle");
    h_oracle_->csto_query(state, xh, y);
}

std::size_t SpongeSimulator::h_index(const Bits& message) const {
    const auto it = std::find(cfg_.h_domain.begin(), cfg_.h_domain.end(), message);
    if (it == cfg_.h_domain.end())
        throw std::invalid_argument("message outside the configured oracle domain");
    return static_cast<std::size_t>(it - cfg_.h_domain.begin());
}

void SpongeSimulator::sim_query(QState& state, const std::string& xo, const std::string& xi,
                                const std::string& yo, const std::string& yi) {
    if (cfg_.variant == QSimVariant::plain) {
        joint_query(state, xo, xi, yo, yi);
        return;
    }
    const auto& p = cfg_.params;
    const bool punctured = cfg_.variant == QSimVariant::sim3 || cfg_.variant == QSimVariant::sim4;
    const bool use_h = cfg_.variant == QSimVariant::sim4 && h_oracle_.has_value();

    // fresh deferred puncturing register
    std::string jname;
    if (punctured) {
        jname = "JQ" + std::to_string(j_counter_++);
        state.append_register({jname, 2});
        j_regs_.push_back(jname);
    }

    const auto& layout = state.layout();
    const std::size_t xoi = layout.index_of(xo), xii = layout.index_of(xi);
    capacity_precheck(state, xoi, xii);

    const GuardContext guard{
        p, SplitDbView::resolve(layout, p, cfg_.capacity), use_h,
        cfg_.uses_h() ? &cfg_.h_domain : nullptr,
        h_oracle_ ? std::optional<DatabaseView>(h_oracle_->view(layout)) : std::nullopt};

    auto query_x = [&, xoi, xii](std::span<const reg_val> label) {
        return static_cast<reg_val>(p.make_state(label[xoi], label[xii]));
    };

    // branch on "inner part rooted and graph unsaturated" (classical control
    // evaluated in the at-rest standard basis; block-unitary split)
    auto [rooted_part, else_part] = split_by_predicate(state, [&](std::span<const reg_val> label) {
        return guard.rooted_unsaturated(label, query_x(label));
    });

    // --- rooted branch -------------------------------------------------------
    {
        QState& s = rooted_part;
        // inner sampling via the compressed oracle on the inner halves
        apply_hadamard_transform(s, yi);
        convert_cells(s);
        inner_core(s, xoi, xii, layout.index_of(yi));
        convert_cells(s);
        apply_hadamard_transform(s, yi);

        if (punctured) {
            // deferred measurement of "fresh inner value lies in R u E"
            const std::size_t ji = s.layout().index_of(jname);
            const auto db = SplitDbView::resolve(s.layout(), p, cfg_.capacity);
            apply_basis_function(s, [&](std::span<reg_val> label) {
                const reg_val x = query_x(label);
                const std::size_t loc = db.locate(label, x);
                if (loc == 0) return;
                const auto mask = guard.re_mask(label, x);
                if (mask[label[db.i_idx[loc - 1]]]) label[ji] ^= 1;
            });
        }

        // branch on "the query path is a valid padding"
        auto [valid_part, invalid_part] = split_by_predicate(s, [&](std::span<const reg_val> label) {
            return guard.valid_message(label, query_x(label)).has_value();
        });

        if (use_h && valid_part.norm() > 0) {
            QState& v = valid_part;
            const std::size_t d = cfg_.h_domain.size();
            v.append_register({"XH", d}, 0);
            const auto write_idx = [&](bool undo) {
                const auto& vl = v.layout();
                const std::size_t xhi = vl.index_of("XH");
                const SplitDbView vdb = SplitDbView::resolve(vl, p, cfg_.capacity);
                const GuardContext vguard{p, vdb, use_h, &cfg_.h_domain,
                                          std::optional<DatabaseView>(h_oracle_->view(vl))};
                apply_basis_function(v, [&](std::span<reg_val> label) {
                    const reg_val x =
                        static_cast<reg_val>(p.make_state(label[vl.index_of(xo)], label[vl.index_of(xi)]));
                    const auto msg = vguard.valid_message(label, x);
                    if (!msg) return; // unreachable on this branch
                    const auto idx = static_cast<reg_val>(
                        std::find(cfg_.h_domain.begin(), cfg_.h_domain.end(), *msg) -
                        cfg_.h_domain.begin());
                    label[xhi] =
                        static_cast<reg_val>(undo ? (label[xhi] + d - idx) % d : (label[xhi] + idx) % d);
                });
            };
            write_idx(false);
            h_oracle_->csto_query(v, "XH", yo);
            write_idx(true);
            v.contract_register("XH", 0, 1e-9);
        } else if (valid_part.norm() > 0) {
            QState& v = valid_part;
            apply_hadamard_transform(v, yo);
            convert_cells(v);
            outer_core(v, xoi, xii, layout.index_of(yo));
            convert_cells(v);
            apply_hadamard_transform(v, yo);
        }
        if (invalid_part.norm() > 0) {
            QState& iv = invalid_part;
            apply_hadamard_transform(iv, yo);
            convert_cells(iv);
            outer_core(iv, xoi, xii, layout.index_of(yo));
            convert_cells(iv);
            apply_hadamard_transform(iv, yo);
        }
        rooted_part = std::move(valid_part);
        add_into(rooted_part, invalid_part);
    }

    // --- else branch: joint sampling ----------------------------------------
    if (else_part.norm() > 0) {
        QState& s = else_part;
        apply_hadamard_transform(s, yo);
        apply_hadamard_transform(s, yi);
        convert_cells(s);
        tau_joint(s, xoi, xii);
        half_update(s, xoi, xii, layout.index_of(yo), false);
        half_update(s, xoi, xii, layout.index_of(yi), true);
        tau_joint(s, xoi, xii);
        convert_cells(s);
        apply_hadamard_transform(s, yo);
        apply_hadamard_transform(s, yi);
    }

    state = std::move(rooted_part);
    add_into(state, else_part);
}

double SpongeSimulator::find_probability(const QState& final_state) const {
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

// --- game harness -------------------------------------------------------------

QuantumGameRecord run_quantum_game(int game, const QSpongeScript& script, SpongeParams params,
                                   std::size_t capacity) {
    std::vector<Bits> extra;
    for (const auto& s : script.steps)
        if (s.kind == QSpongeStep::Kind::priv_query) extra.push_back(s.message);
    QuantumSimConfig cfg = QuantumSimConfig::for_game(game, params, capacity, extra);
    check_quantum_game_guard(cfg);
    SpongeSimulator sim(cfg);

    std::vector<Register> regs = script.registers;
    bool has_priv = false;
    std::size_t priv_id = 0;
    for (const auto& s : script.steps)
        if (s.kind == QSpongeStep::Kind::priv_query) {
            has_priv = true;
            if (!cfg.priv_is_oracle) {
                const auto blocks = pad(s.message, params.r);
                for (std::size_t j = 0; j < blocks.size(); ++j) {
                    regs.push_back({"E" + std::to_string(priv_id) + "o" + std::to_string(j),
                                    params.num_outer()});
                    regs.push_back({"E" + std::to_string(priv_id) + "i" + std::to_string(j),
                                    params.num_inner()});
                }
            }
            ++priv_id;
        }
    if (has_priv && !cfg.priv_is_oracle) {
        regs.push_back({"PXo", params.num_outer()});
        regs.push_back({"PXi", params.num_inner()});
    }
    if (has_priv && cfg.priv_is_oracle) regs.push_back({"XP", std::max<std::size_t>(cfg.h_domain.size(), 1)});
    for (const auto& r : sim.oracle_registers()) regs.push_back(r);

    QState state = QState::zero_state(RegisterLayout(std::move(regs)));
    sim.prepare_rest(state);

    std::string measure_reg;
    reg_val measure_value = 0;
    priv_id = 0;
    std::size_t internal_queries = 0;
    for (const auto& step : script.steps) {
        switch (step.kind) {
            case QSpongeStep::Kind::gate: {
                if (step.gate == "ht")
                    for (const auto& t : step.targets) apply_hadamard_transform(state, t);
                else if (step.gate == "qft")
                    for (const auto& t : step.targets) apply_qft(state, t);
                else if (step.gate == "qft_inv")
                    for (const auto& t : step.targets) apply_qft(state, t, true);
                else
                    throw std::invalid_argument("unknown gate '" + step.gate + "'");
                break;
            }
            case QSpongeStep::Kind::unitary:
                apply_local_unitary(state, LocalUnitary(step.targets, step.matrix));
                break;
            case QSpongeStep::Kind::pub_query:
                sim.sim_query(state, "Xo", "Xi", "Yo", "Yi");
                ++internal_queries;
                break;
            case QSpongeStep::Kind::priv_query: {
                if (cfg.priv_is_oracle) {
                    // W ^= H(m)
                    const auto idx = static_cast<reg_val>(sim.h_index(step.message));
                    const auto& layout = state.layout();
                    const std::size_t xp = layout.index_of("XP");
                    const std::size_t d = layout.card(xp);
                    apply_basis_function(state, [xp, idx, d](std::span<reg_val> label) {
                        label[xp] = static_cast<reg_val>((label[xp] + idx) % d);
                    });
                    sim.h_query(state, "XP", step.out_reg);
                    apply_basis_function(state, [xp, idx, d](std::span<reg_val> label) {
                        label[xp] = static_cast<reg_val>((label[xp] + d - idx) % d);
                    });
                } else {
                    // coherent absorb chain through the simulator
                    const auto blocks = pad(step.message, params.r);
                    const auto& layout = state.layout();
                    const std::size_t pxo = layout.index_of("PXo");
                    const std::size_t pxi = layout.index_of("PXi");
                    std::size_t prev_o = 0, prev_i = 0; // register indices of E_{j-1}
                    for (std::size_t j = 0; j < blocks.size(); ++j) {
                        const std::string eo =
                            "E" + std::to_string(priv_id) + "o" + std::to_string(j);
                        const std::string ei =
                            "E" + std::to_string(priv_id) + "i" + std::to_string(j);
                        const reg_val blk = static_cast<reg_val>(blocks[j]);
                        auto load = [&](bool undo) {
                            apply_basis_function(state, [&, undo](std::span<reg_val> label) {
                                (void)undo;
                                reg_val vo = blk, vi = 0;
                                if (j > 0) {
                                    vo ^= label[prev_o];
                                    vi ^= label[prev_i];
                                }
                                label[pxo] ^= vo;
                                label[pxi] ^= vi;
                            });
                        };
                        load(false);
                        sim.sim_query(state, "PXo", "PXi", eo, ei);
                        ++internal_queries;
                        load(true);
                        prev_o = state.layout().index_of(eo);
                        prev_i = state.layout().index_of(ei);
                    }
                    // W ^= outer of the final state
                    const std::size_t wi = state.layout().index_of(step.out_reg);
                    const std::size_t last_o = prev_o;
                    apply_basis_function(state, [wi, last_o](std::span<reg_val> label) {
                        label[wi] ^= label[last_o];
                    });
                }
                ++priv_id;
                break;
            }
            case QSpongeStep::Kind::measure:
                measure_reg = step.measure_reg;
                measure_value = step.measure_value;
                break;
        }
    }

    QuantumGameRecord rec;
    rec.game = game;
    rec.internal_queries = internal_queries;
    if (!measure_reg.empty()) {
        const auto dist = register_distribution(state, measure_reg);
        rec.p_one = measure_value < dist.size() ? dist[measure_value] : 0.0;
    }
    rec.p_find = sim.find_probability(state);
    return rec;
}

QuantumGameSweep run_quantum_game_sweep(const QSpongeScript& script, SpongeParams params,
                                        std::size_t capacity, double tol) {
    QuantumGameSweep sweep;
    for (int game = 1; game <= 5; ++game)
        sweep.games.push_back(run_quantum_game(game, script, params, capacity));
    const auto& g = sweep.games;
    const double q = static_cast<double>(g[2].internal_queries);
    sweep.adv12 = std::abs(g[1].p_one - g[0].p_one);
    sweep.adv23 = std::abs(g[2].p_one - g[1].p_one);
    sweep.adv34 = std::abs(g[3].p_one - g[2].p_one);
    sweep.adv45 = std::abs(g[4].p_one - g[3].p_one);
    sweep.bound23 = std::sqrt((q + 1.0) * g[2].p_find);
    sweep.bound34 = 4.0 * g[2].p_find;
    sweep.bound45 = 4.0 * g[3].p_find;
    sweep.holds = sweep.adv12 <= tol && sweep.adv23 <= sweep.bound23 + tol &&
                  sweep.adv34 <= sweep.bound34 + tol && sweep.adv45 <= sweep.bound45 + tol;
    return sweep;
}

std::vector<QSpongeScript> builtin_quantum_scripts(SpongeParams params, std::size_t capacity) {
    std::vector<QSpongeScript> scripts;
    const std::size_t no = params.num_outer();
    const std::size_t ni = params.num_inner();
    auto gate = [](std::string g, std::vector<std::string> t) {
        QSpongeStep s;
        s.kind = QSpongeStep::Kind::gate;
        s.gate = std::move(g);
        s.targets = std::move(t);
        return s;
    };
    auto pub = [] {
        QSpongeStep s;
        s.kind = QSpongeStep::Kind::pub_query;
        return s;
    };
    auto measure = [](std::string reg, reg_val value) {
        QSpongeStep s;
        s.kind = QSpongeStep::Kind::measure;
        s.measure_reg = std::move(reg);
        s.measure_value = value;
        return s;
    };

    {
        // superposed input, one public query, interference readout on Yo
        QSpongeScript s;
        s.name = "pub-superposition";
        s.registers = {{"Xo", no}, {"Xi", ni}, {"Yo", no}, {"Yi", ni}};
        s.steps = {gate("ht", {"Xo"}), pub(), gate("ht", {"Xo", "Yo"}), measure("Yo", 0)};
        s.internal_queries = 1;
        scripts.push_back(std::move(s));
    }
    if (capacity >= 2) {
        // two public queries at shifted basis inputs, phase probe on Yi
        QSpongeScript s;
        s.name = "pub-two-basis";
        s.registers = {{"Xo", no}, {"Xi", ni}, {"Yo", no}, {"Yi", ni}};
        QSpongeStep shift;
        shift.kind = QSpongeStep::Kind::unitary;
        shift.targets = {"Xo"};
        CMat perm(no);
        for (std::size_t i = 0; i < no; ++i) perm((i + 1) % no, i) = 1.0;
        shift.matrix = perm;
        s.steps = {gate("ht", {"Yi"}), pub(), shift, pub(), gate("ht", {"Yi"}), measure("Yi", 0)};
        s.internal_queries = 2;
        scripts.push_back(std::move(s));
    }
    {
        // one private evaluation, Hadamard readout of the output block
        const Bits m = {};
        const auto blocks = pad(m, params.r);
        if (blocks.size() <= capacity) {
            QSpongeScript s;
            s.name = "priv-empty-message";
            s.registers = {{"W", no}};
            QSpongeStep p;
            p.kind = QSpongeStep::Kind::priv_query;
            p.message = m;
            p.out_reg = "W";
            s.steps = {p, gate("ht", {"W"}), measure("W", 0)};
            s.internal_queries = blocks.size();
            scripts.push_back(std::move(s));
        }
    }
    {
        // plain private evaluation, direct readout
        const Bits m = {};
        const auto blocks = pad(m, params.r);
        if (blocks.size() <= capacity) {
            QSpongeScript s;
            s.name = "priv-direct";
            s.registers = {{"W", no}};
            QSpongeStep p;
            p.kind = QSpongeStep::Kind::priv_query;
            p.message = m;
            p.out_reg = "W";
            s.steps = {p, measure("W", 0)};
            s.internal_queries = blocks.size();
            scripts.push_back(std::move(s));
        }
    }
    return scripts;
}

QSpongeScript QSpongeScript::from_json_text(const std::string& text, const SpongeParams& params) {
    const auto j = nlohmann::json::parse(text);
    QSpongeScript s;
    s.name = j.value("name", "script");
    for (const auto& r : j.at("registers"))
        s.registers.push_back({r.at("name").get<std::string>(), r.at("card").get<std::size_t>()});
    for (const auto& js : j.at("steps")) {
        QSpongeStep step;
        const std::string op = js.at("op").get<std::string>();
        if (op == "gate") {
            step.kind = QSpongeStep::Kind::gate;
            step.gate = js.at("gate").get<std::string>();
            step.targets = js.at("targets").get<std::vector<std::string>>();
        } else if (op == "unitary") {
            step.kind = QSpongeStep::Kind::unitary;
            step.targets = js.at("targets").get<std::vector<std::string>>();
            const auto rows = js.at("matrix").get<std::vector<std::vector<std::array<double, 2>>>>();
            CMat m(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = {rows[r][c][0], rows[r][c][1]};
            step.matrix = m;
        } else if (op == "pub") {
            step.kind = QSpongeStep::Kind::pub_query;
            s.internal_queries += 1;
        } else if (op == "priv") {
            step.kind = QSpongeStep::Kind::priv_query;
            const std::string bits = js.at("message").get<std::string>();
            for (char ch : bits) step.message.push_back(ch == '1' ? 1 : 0);
            step.out_reg = js.at("out").get<std::string>();
            s.internal_queries += pad(step.message, params.r).size();
        } else if (op == "measure") {
            step.kind = QSpongeStep::Kind::measure;
            step.measure_reg = js.at("register").get<std::string>();
            step.measure_value = js.value("value", 0u);
        } else {
            throw std::invalid_argument("unknown quantum script op '" + op + "'");
        }
        s.steps.push_back(std::move(step));
    }
    return s;
}

} // namespace qro
