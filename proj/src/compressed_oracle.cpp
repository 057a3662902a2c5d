#include "qro/compressed_oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace qro {

const char* to_string(DbBasis b) {
    switch (b) {
        case DbBasis::unprepared: return "unprepared";
        case DbBasis::standard: return "standard";
        case DbBasis::fourier: return "fourier";
    }
    return "?";
}

const char* to_string(CompressedPicture p) {
    switch (p) {
        case CompressedPicture::cfo: return "CFO";
        case CompressedPicture::cpho: return "CPhO";
        case CompressedPicture::csto: return "CStO";
    }
    return "?";
}

DatabaseView DatabaseView::resolve(const RegisterLayout& layout, std::size_t q, std::size_t m,
                                   std::size_t n, const std::string& prefix) {
    DatabaseView v;
    v.q = q;
    v.m = m;
    v.n = n;
    v.prefix = prefix;
    for (std::size_t i = 0; i < q; ++i) {
        v.x_idx.push_back(layout.index_of(x_name(i, prefix)));
        v.y_idx.push_back(layout.index_of(y_name(i, prefix)));
    }
    return v;
}

std::vector<std::pair<reg_val, reg_val>> DatabaseView::entries(std::span<const reg_val> label) const {
    std::vector<std::pair<reg_val, reg_val>> out;
    for (std::size_t i = 0; i < q; ++i) {
        if (cell_x(label, i) != bottom()) out.emplace_back(cell_x(label, i), cell_y(label, i));
    }
    return out;
}

std::size_t DatabaseView::count_nonpadding(std::span<const reg_val> label) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < q; ++i)
        if (cell_x(label, i) != bottom()) ++s;
    return s;
}

std::size_t DatabaseView::locate(std::span<const reg_val> label, reg_val x) const {
    for (std::size_t i = 0; i < q; ++i)
        if (cell_x(label, i) == x) return i + 1;
    return 0;
}

bool DatabaseView::well_formed(std::span<const reg_val> label) const {
    bool in_padding = false;
    reg_val prev = 0;
    bool first = true;
    for (std::size_t i = 0; i < q; ++i) {
        const reg_val xp = cell_x(label, i);
        const reg_val yp = cell_y(label, i);
        if (xp == bottom()) {
            if (yp != 0) return false;
            in_padding = true;
            continue;
        }
        if (in_padding) return false;       // non-padding after padding
        if (yp == 0) return false;          // stored zero
        if (!first && xp <= prev) return false; // not strictly sorted
        prev = xp;
        first = false;
    }
    return true;
}

std::size_t sorted_insert_pos(const DatabaseView& db, std::span<const reg_val> label, reg_val x) {
    std::size_t pos = 0;
    while (pos < db.q && db.cell_x(label, pos) < x) ++pos;
    return pos;
}

CompressedOracle::CompressedOracle(ProductDistribution dist, GroupOp group, std::size_t q,
                                   CompressedPicture picture, std::string register_prefix)
    : dist_(std::move(dist)), group_(group), q_(q), picture_(picture),
      prefix_(std::move(register_prefix)) {
    if (q_ < 1) throw std::invalid_argument("compressed oracle needs capacity q >= 1");
    group_.check_range(dist_.range_size());
    const std::size_t m = dist_.domain_size();
    const std::size_t n = dist_.range_size();
    fourier_ = group_.mode == GroupOp::Mode::bit_xor ? hadamard_matrix(n) : qft_matrix(n);
    update_.reserve(m * n);
    for (std::size_t x = 0; x < m; ++x) {
        const CMat& s = dist_.samp(x);
        const CMat sd = s.adjoint();
        for (std::size_t eta = 0; eta < n; ++eta) {
            CMat phase(n);
            for (std::size_t z = 0; z < n; ++z) phase(z, z) = group_.character(eta, z, n);
            update_.push_back(sd * phase * s);
        }
    }
}

std::vector<Register> CompressedOracle::layout_registers() const {
    std::vector<Register> regs;
    for (std::size_t i = 0; i < q_; ++i) {
        regs.push_back({DatabaseView::x_name(i, prefix_), dist_.domain_size() + 1});
        regs.push_back({DatabaseView::y_name(i, prefix_), dist_.range_size()});
    }
    return regs;
}

DatabaseView CompressedOracle::view(const RegisterLayout& layout) const {
    return DatabaseView::resolve(layout, q_, dist_.domain_size(), dist_.range_size(), prefix_);
}

const CMat& CompressedOracle::update_matrix(std::size_t x, std::size_t eta) const {
    return update_[x * dist_.range_size() + eta];
}

void CompressedOracle::prepare_rest_state(QState& state) const {
    const auto db = view(state.layout());
    // Empty database: every cell reads (bottom, 0) in the unprepared basis.
    apply_basis_function(state, [&db](std::span<reg_val> label) {
        for (std::size_t i = 0; i < db.q; ++i) label[db.x_idx[i]] = db.bottom();
    });
    if (rest_basis() != DbBasis::unprepared) db_convert(state, DbBasis::unprepared, rest_basis());
}

void CompressedOracle::capacity_precheck(const QState& state, std::size_t xi) const {
    const auto db = view(state.layout());
    bool overflow = false;
    for_each_support_label(state, [&](std::span<const reg_val> label, cplx) {
        if (overflow) return;
        const reg_val x = label[xi];
        if (db.locate(label, x) == 0 && db.count_nonpadding(label) >= db.q) overflow = true;
    });
    if (overflow)
        throw capacity_error("compressed oracle capacity exceeded: a support label needs " +
                             std::to_string(q_ + 1) + " entries (q=" + std::to_string(q_) + ")");
}

namespace {

// Shape guards for the insert/remove involution. "OK with exemption at x"
// means: strictly sorted non-padding prefix, padding suffix of (bottom, 0)
// cells, and no stored y == 0 except possibly at the cell holding x.
bool shape_ok(const DatabaseView& db, std::span<const reg_val> label, reg_val x_exempt) {
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
        if (yp == 0 && xp != x_exempt) return false;
        if (!first && xp <= prev) return false;
        prev = xp;
        first = false;
    }
    return true;
}

void shift_insert(const DatabaseView& db, std::span<reg_val> label, std::size_t pos, reg_val x,
                  reg_val y) {
    for (std::size_t i = db.q - 1; i > pos; --i) {
        label[db.x_idx[i]] = label[db.x_idx[i - 1]];
        label[db.y_idx[i]] = label[db.y_idx[i - 1]];
    }
    label[db.x_idx[pos]] = x;
    label[db.y_idx[pos]] = y;
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

// The insert/remove step of the query, as one involution on basis labels:
// a database without x gains a fresh (x, 0) cell at its sorted position, a
// database holding (x, 0) loses that cell; everything else is untouched.
void CompressedOracle::tau_insert_remove(QState& state, std::size_t xi) const {
    const auto db = view(state.layout());
    apply_basis_function(state, [&db, xi](std::span<reg_val> label) {
        const reg_val x = label[xi];
        if (!shape_ok(db, label, x)) return;
        const std::size_t loc = db.locate(label, x);
        if (loc != 0) {
            if (db.cell_y(label, loc - 1) == 0) shift_remove(db, label, loc - 1);
            return;
        }
        if (db.cell_x(label, db.q - 1) != db.bottom()) return; // no free cell
        shift_insert(db, label, sorted_insert_pos(db, label, x), x, 0);
    });
}

void CompressedOracle::cell_update_pass(QState& state, std::size_t xi, std::size_t yi) const {
    const auto db = view(state.layout());
    for (std::size_t i = 0; i < q_; ++i) {
        apply_conditioned_unitary(state, db.y_idx[i],
                                  [&, i](std::span<const reg_val> label) -> const CMat* {
                                      if (label[db.x_idx[i]] != label[xi]) return nullptr;
                                      return &update_matrix(label[xi], label[yi]);
                                  });
    }
}

void CompressedOracle::cfo_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    capacity_precheck(state, xi);
    tau_insert_remove(state, xi);       // add x if absent
    cell_update_pass(state, xi, yi);    // Samp^dag phase Samp on the x-cell
    tau_insert_remove(state, xi);       // remove (x, 0)
}

void CompressedOracle::y_basis_change(QState& state, std::string_view y_reg, bool inverse) const {
    if (group_.mode == GroupOp::Mode::bit_xor)
        apply_hadamard_transform(state, y_reg);
    else
        apply_qft(state, y_reg, inverse);
}

void CompressedOracle::cpho_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    db_convert(state, DbBasis::standard, DbBasis::unprepared);
    cfo_query(state, x_reg, y_reg);
    db_convert(state, DbBasis::unprepared, DbBasis::standard);
}

void CompressedOracle::csto_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    y_basis_change(state, y_reg, /*inverse=*/false);
    cpho_query(state, x_reg, y_reg);
    y_basis_change(state, y_reg, /*inverse=*/true);
}

void CompressedOracle::query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    switch (picture_) {
        case CompressedPicture::cfo: cfo_query(state, x_reg, y_reg); return;
        case CompressedPicture::cpho: cpho_query(state, x_reg, y_reg); return;
        case CompressedPicture::csto: csto_query(state, x_reg, y_reg); return;
    }
}

void CompressedOracle::uniform_fast_query(QState& state, std::string_view x_reg,
                                          std::string_view y_reg) const {
    if (!dist_.is_uniform_xor() || group_.mode != GroupOp::Mode::bit_xor)
        throw std::logic_error(
            "uniform_fast_query requires the xor-convention uniform distribution in xor mode");
    if (picture_ != CompressedPicture::cfo)
        throw std::logic_error("uniform_fast_query operates in the CFO picture");
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    capacity_precheck(state, xi);
    const auto db = view(state.layout());
    apply_basis_function(state, [&db, xi, yi](std::span<reg_val> label) {
        const reg_val x = label[xi];
        const reg_val eta = label[yi];
        if (eta == 0) return;
        if (!shape_ok(db, label, db.bottom())) return; // strict well-formedness here
        const std::size_t loc = db.locate(label, x);
        if (loc == 0) {
            if (db.cell_x(label, db.q - 1) != db.bottom()) return;
            shift_insert(db, label, sorted_insert_pos(db, label, x), x, eta);
            return;
        }
        const reg_val stored = db.cell_y(label, loc - 1);
        if (stored == eta)
            shift_remove(db, label, loc - 1);
        else
            label[db.y_idx[loc - 1]] = stored ^ eta;
    });
}

void CompressedOracle::cpho_query_without_deletion(QState& state, std::string_view x_reg,
                                                   std::string_view y_reg) const {
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    db_convert(state, DbBasis::standard, DbBasis::unprepared);
    capacity_precheck(state, xi);
    // Insert unconditionally (even for eta = 0) and never remove.
    const auto db = view(state.layout());
    apply_basis_function(state, [&db, xi](std::span<reg_val> label) {
        const reg_val x = label[xi];
        if (!shape_ok(db, label, x)) return;
        if (db.locate(label, x) != 0) return;
        if (db.cell_x(label, db.q - 1) != db.bottom()) return;
        shift_insert(db, label, sorted_insert_pos(db, label, x), x, 0);
    });
    cell_update_pass(state, xi, yi);
    db_convert(state, DbBasis::unprepared, DbBasis::standard);
}

void CompressedOracle::db_convert(QState& state, DbBasis from, DbBasis to) const {
    if (from == to) return;
    const auto db = view(state.layout());
    auto rank = [](DbBasis b) {
        return b == DbBasis::unprepared ? 0 : b == DbBasis::standard ? 1 : 2;
    };
    // Stage matrices: unprepared --Samp(x)--> standard --QFT/HT--> fourier.
    std::vector<CMat> samp_adj;
    for (std::size_t x = 0; x < dist_.domain_size(); ++x) samp_adj.push_back(dist_.samp(x).adjoint());
    const CMat fourier_adj = fourier_.adjoint();

    int cur = rank(from);
    const int dst = rank(to);
    auto per_cell = [&](bool samp_stage, bool forward) {
        for (std::size_t i = 0; i < q_; ++i) {
            apply_conditioned_unitary(
                state, db.y_idx[i], [&, i](std::span<const reg_val> label) -> const CMat* {
                    if (samp_stage) {
                        const reg_val xp = label[db.x_idx[i]];
                        const std::size_t x = xp == db.bottom() ? 0 : xp; // dummy Samp for padding
                        return forward ? &dist_.samp(x) : &samp_adj[x];
                    }
                    return forward ? &fourier_ : &fourier_adj;
                });
        }
    };
    while (cur < dst) {
        per_cell(/*samp_stage=*/cur == 0, /*forward=*/true);
        ++cur;
    }
    while (cur > dst) {
        per_cell(/*samp_stage=*/cur == 1, /*forward=*/false);
        --cur;
    }
}

QState CompressedOracle::decompress(const QState& state) const {
    const auto& layout = state.layout();
    const auto db = view(layout);
    const std::size_t m = dist_.domain_size();
    const std::size_t n = dist_.range_size();

    // Output layout: all non-database registers in their original order,
    // followed by the function rows F0..F{M-1}.
    std::vector<bool> is_db(layout.num_registers(), false);
    for (std::size_t i = 0; i < q_; ++i) {
        is_db[db.x_idx[i]] = true;
        is_db[db.y_idx[i]] = true;
    }
    std::vector<Register> out_regs;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < layout.num_registers(); ++i)
        if (!is_db[i]) {
            keep.push_back(i);
            out_regs.push_back(layout.reg(i));
        }
    for (std::size_t x = 0; x < m; ++x) out_regs.push_back({"F" + std::to_string(x), n});
    RegisterLayout out_layout((std::vector<Register>(out_regs)));

    std::vector<cplx> out(out_layout.total_dim());
    Label out_label(out_layout.num_registers());
    for_each_support_label(
        state,
        [&](std::span<const reg_val> label, cplx amp) {
            if (!db.well_formed(label))
                throw ill_formed_database("decompress: ill-formed database label in the support");
            for (std::size_t k = 0; k < keep.size(); ++k) out_label[k] = label[keep[k]];
            for (std::size_t x = 0; x < m; ++x) out_label[keep.size() + x] = 0;
            for (std::size_t i = 0; i < q_; ++i) {
                const reg_val xp = db.cell_x(label, i);
                if (xp == db.bottom()) continue;
                out_label[keep.size() + xp] = db.cell_y(label, i);
            }
            out[out_layout.flatten(out_label)] += amp;
        },
        /*threshold=*/1e-13);

    QState result(out_layout, std::move(out));
    // Prepare every row: QFT/HT after Samp(x).
    for (std::size_t x = 0; x < m; ++x) {
        const CMat prep = fourier_ * dist_.samp(x);
        const std::size_t ri = out_layout.index_of("F" + std::to_string(x));
        apply_conditioned_unitary(result, ri, [&prep](std::span<const reg_val>) { return &prep; });
    }
    return result;
}

void CompressedOracle::check_well_formed_support(const QState& state, double threshold) const {
    const auto db = view(state.layout());
    for_each_support_label(
        state,
        [&](std::span<const reg_val> label, cplx) {
            if (!db.well_formed(label))
                throw ill_formed_database("support contains an ill-formed database label");
        },
        threshold);
}

} // namespace qro
