#include "qro/cfo_detail.hpp"

#include <stdexcept>

namespace qro {

void pi_permute(std::vector<std::pair<reg_val, reg_val>>& cells, const std::vector<int>& mask) {
    const std::size_t q = cells.size();
    for (std::size_t i = 0; i < q; ++i) {
        if (!mask[i]) continue;
        auto moved = cells[i];
        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(i));
        cells.push_back(moved);
    }
}

void pi_permute_inverse(std::vector<std::pair<reg_val, reg_val>>& cells, const std::vector<int>& mask) {
    const std::size_t q = cells.size();
    for (std::size_t i = q; i-- > 0;) {
        if (!mask[i]) continue;
        auto moved = cells.back();
        cells.pop_back();
        cells.insert(cells.begin() + static_cast<std::ptrdiff_t>(i), moved);
    }
}

namespace {

struct Scratch {
    std::size_t s, l, a, b; // register indices
};

Scratch resolve_scratch(const RegisterLayout& layout) {
    return {layout.index_of(InstrumentedCfo::kS), layout.index_of(InstrumentedCfo::kL),
            layout.index_of(InstrumentedCfo::kA), layout.index_of(InstrumentedCfo::kB)};
}

bool insert_shape_ok(const DatabaseView& db, std::span<const reg_val> label) {
    // strict well-formedness and a free back cell
    return db.well_formed(label) && db.cell_x(label, db.q - 1) == db.bottom();
}

bool remove_shape_ok(const DatabaseView& db, std::span<const reg_val> label, reg_val x) {
    bool in_padding = false;
    reg_val prev = 0;
    bool first = true;
    for (std::size_t i = 0; i < db.q; ++i) {
        const reg_val xp = db.cell_x(label, i);
        const reg_val yp = db.cell_y(label, i);
        if (xp == db.bottom()) {
            if (yp != 0) return false;
            in_padding = true;
            continue;
        }
        if (in_padding) return false;
        if (yp == 0 && xp != x) return false;
        if (!first && xp <= prev) return false;
        prev = xp;
        first = false;
    }
    return true;
}

void shift_insert(const DatabaseView& db, std::span<reg_val> label, std::size_t pos, reg_val x) {
    for (std::size_t i = db.q - 1; i > pos; --i) {
        label[db.x_idx[i]] = label[db.x_idx[i - 1]];
        label[db.y_idx[i]] = label[db.y_idx[i - 1]];
    }
    label[db.x_idx[pos]] = x;
    label[db.y_idx[pos]] = 0;
}

void shift_remove(const DatabaseView& db, std::span<reg_val> label, std::size_t pos) {
    for (std::size_t i = pos; i + 1 < db.q; ++i) {
        label[db.x_idx[i]] = label[db.x_idx[i + 1]];
        label[db.y_idx[i]] = label[db.y_idx[i + 1]];
    }
    label[db.x_idx[db.q - 1]] = db.bottom();
    label[db.y_idx[db.q - 1]] = 0;
}

} // namespace

void InstrumentedCfo::attach_scratch(QState& state) const {
    const std::size_t q = oracle_->capacity();
    state.append_register({kS, q + 2});
    state.append_register({kL, q + 1});
    state.append_register({kA, 2});
    state.append_register({kB, 2});
}

double InstrumentedCfo::scratch_residual(const QState& state) const {
    const auto& layout = state.layout();
    const Scratch sc = resolve_scratch(layout);
    double w = 0.0;
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        if (label[sc.s] != 0 || label[sc.l] != 0 || label[sc.a] != 0 || label[sc.b] != 0)
            w += std::norm(amps[i]);
    }
    return std::sqrt(w);
}

void InstrumentedCfo::detach_scratch(QState& state, double tol) const {
    state.contract_register(kB, 0, tol);
    state.contract_register(kA, 0, tol);
    state.contract_register(kL, 0, tol);
    state.contract_register(kS, 0, tol);
}

void InstrumentedCfo::count_into_s(QState& state, bool uncompute) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t card = layout.card(sc.s);
    apply_basis_function(state, [&, uncompute](std::span<reg_val> label) {
        const std::size_t cnt = db.count_nonpadding(label) % card;
        const std::size_t cur = label[sc.s];
        label[sc.s] =
            static_cast<reg_val>(uncompute ? (cur + card - cnt) % card : (cur + cnt) % card);
    });
}

void InstrumentedCfo::fun_locate(QState& state, std::string_view x_reg, bool uncompute) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t card = layout.card(sc.l);
    apply_basis_function(state, [&, uncompute](std::span<reg_val> label) {
        const std::size_t loc = db.locate(label, label[xi]) % card;
        const std::size_t cur = label[sc.l];
        label[sc.l] =
            static_cast<reg_val>(uncompute ? (cur + card - loc) % card : (cur + loc) % card);
    });
}

void InstrumentedCfo::flag_a_if_unlocated(QState& state) const {
    const auto& layout = state.layout();
    const Scratch sc = resolve_scratch(layout);
    apply_basis_function(state, [sc](std::span<reg_val> label) {
        if (label[sc.l] == 0) label[sc.a] ^= 1;
    });
}

void InstrumentedCfo::fun_add(QState& state, std::string_view x_reg) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t q = db.q;
    apply_basis_function(state, [&, q](std::span<reg_val> label) {
        if (label[sc.a] != 1) return;
        const reg_val x = label[xi];
        const std::size_t loc = db.locate(label, x);
        if (loc == 0 && label[sc.l] == 0 && insert_shape_ok(db, label)) {
            const std::size_t pos = sorted_insert_pos(db, label, x);
            shift_insert(db, label, pos, x);
            label[sc.l] = static_cast<reg_val>(pos + 1);
            label[sc.s] = static_cast<reg_val>((label[sc.s] + 1) % (q + 2));
        } else if (loc != 0 && db.cell_y(label, loc - 1) == 0 && label[sc.l] == loc &&
                   remove_shape_ok(db, label, x)) {
            // paired inverse branch, never reached from well-formed inputs
            shift_remove(db, label, loc - 1);
            label[sc.l] = 0;
            label[sc.s] = static_cast<reg_val>((label[sc.s] + q + 1) % (q + 2));
        }
    });
}

void InstrumentedCfo::fun_clean_a(QState& state, std::string_view x_reg) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const std::size_t xi = layout.index_of(x_reg);
    const Scratch sc = resolve_scratch(layout);
    apply_basis_function(state, [&](std::span<reg_val> label) {
        const std::size_t loc = db.locate(label, label[xi]);
        if (loc != 0 && db.cell_y(label, loc - 1) == 0) label[sc.a] ^= 1;
    });
}

void InstrumentedCfo::fun_upd(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    for (std::size_t i = 0; i < db.q; ++i) {
        apply_conditioned_unitary(state, db.y_idx[i],
                                  [&, i](std::span<const reg_val> label) -> const CMat* {
                                      if (label[sc.l] != i + 1) return nullptr;
                                      return &oracle_->update_matrix(label[xi], label[yi]);
                                  });
    }
}

void InstrumentedCfo::fun_rem(QState& state, std::string_view x_reg) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t q = db.q;
    apply_basis_function(state, [&, q](std::span<reg_val> label) {
        const reg_val x = label[xi];
        const std::size_t loc = db.locate(label, x);
        if (label[sc.b] == 0) {
            if (loc != 0 && db.cell_y(label, loc - 1) == 0 && label[sc.l] == loc &&
                remove_shape_ok(db, label, x)) {
                shift_remove(db, label, loc - 1);
                label[sc.l] = 0;
                label[sc.b] = 1;
                label[sc.s] = static_cast<reg_val>((label[sc.s] + q + 1) % (q + 2));
            }
        } else {
            if (loc == 0 && label[sc.l] == 0 && insert_shape_ok(db, label)) {
                // paired inverse branch, never reached from well-formed inputs
                const std::size_t pos = sorted_insert_pos(db, label, x);
                shift_insert(db, label, pos, x);
                label[sc.l] = static_cast<reg_val>(pos + 1);
                label[sc.b] = 0;
                label[sc.s] = static_cast<reg_val>((label[sc.s] + 1) % (q + 2));
            }
        }
    });
}

void InstrumentedCfo::uncompute_b(QState& state, std::string_view x_reg) const {
    const auto& layout = state.layout();
    const auto db = oracle_->view(layout);
    const Scratch sc = resolve_scratch(layout);
    const std::size_t xi = layout.index_of(x_reg);
    apply_basis_function(state, [&](std::span<reg_val> label) {
        if (db.locate(label, label[xi]) == 0) label[sc.b] ^= 1;
    });
}

void InstrumentedCfo::query_extended(QState& state, std::string_view x_reg,
                                     std::string_view y_reg) const {
    count_into_s(state, /*uncompute=*/false);
    fun_locate(state, x_reg, /*uncompute=*/false);
    flag_a_if_unlocated(state);
    fun_add(state, x_reg);
    fun_clean_a(state, x_reg);
    fun_upd(state, x_reg, y_reg);
    fun_rem(state, x_reg);
    uncompute_b(state, x_reg);
    fun_locate(state, x_reg, /*uncompute=*/true);
    count_into_s(state, /*uncompute=*/true);
}

double InstrumentedCfo::query(QState& state, std::string_view x_reg, std::string_view y_reg,
                              double tol) const {
    const std::size_t xi = state.layout().index_of(x_reg);
    // same capacity contract as the plain query
    {
        const auto db = oracle_->view(state.layout());
        bool overflow = false;
        for_each_support_label(state, [&](std::span<const reg_val> label, cplx) {
            if (overflow) return;
            if (db.locate(label, label[xi]) == 0 && db.count_nonpadding(label) >= db.q)
                overflow = true;
        });
        if (overflow) throw capacity_error("compressed oracle capacity exceeded");
    }
    attach_scratch(state);
    query_extended(state, x_reg, y_reg);
    const double residual = scratch_residual(state);
    detach_scratch(state, tol);
    state.renormalize();
    return residual;
}

} // namespace qro
