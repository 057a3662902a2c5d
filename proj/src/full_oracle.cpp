#include "qro/full_oracle.hpp"

#include <stdexcept>

namespace qro {

const char* to_string(FullPicture p) {
    switch (p) {
        case FullPicture::standard: return "standard";
        case FullPicture::phase: return "phase";
        case FullPicture::fourier: return "fourier";
    }
    return "?";
}

FullOracle::FullOracle(ProductDistribution dist, GroupOp group, FullPicture picture)
    : dist_(std::move(dist)), group_(group), picture_(picture) {
    group_.check_range(dist_.range_size());
    f_regs_.reserve(dist_.domain_size());
    for (std::size_t x = 0; x < dist_.domain_size(); ++x) f_regs_.push_back("F" + std::to_string(x));
}

std::vector<Register> FullOracle::layout_registers() const {
    std::vector<Register> regs;
    for (const auto& name : f_regs_) regs.push_back({name, dist_.range_size()});
    return regs;
}

void FullOracle::check_picture(FullPicture expected, const char* op) const {
    if (picture_ != expected)
        throw std::logic_error(std::string(op) + " requires the " + to_string(expected) +
                               " picture, oracle is in " + to_string(picture_));
}

void FullOracle::prepare_initial_state(QState& state) const {
    const CMat fourier = group_.mode == GroupOp::Mode::bit_xor
                             ? hadamard_matrix(dist_.range_size())
                             : qft_matrix(dist_.range_size());
    for (std::size_t x = 0; x < dist_.domain_size(); ++x) {
        const CMat prep = picture_ == FullPicture::fourier ? fourier * dist_.samp(x) : dist_.samp(x);
        const std::size_t ri = state.layout().index_of(f_regs_[x]);
        apply_conditioned_unitary(state, ri, [&prep](std::span<const reg_val>) { return &prep; });
    }
}

void FullOracle::sto_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    check_picture(FullPicture::standard, "sto_query");
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    const std::size_t n = dist_.range_size();
    std::vector<std::size_t> fidx;
    for (const auto& f : f_regs_) fidx.push_back(layout.index_of(f));
    const GroupOp g = group_;
    apply_basis_function(state, [&, n](std::span<reg_val> label) {
        const reg_val fx = label[fidx[label[xi]]];
        label[yi] = static_cast<reg_val>(g.combine(label[yi], fx, n));
    });
}

void FullOracle::pho_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    check_picture(FullPicture::phase, "pho_query");
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    const std::size_t n = dist_.range_size();
    std::vector<std::size_t> fidx;
    for (const auto& f : f_regs_) fidx.push_back(layout.index_of(f));
    const GroupOp g = group_;
    apply_phase_function(state, [&, n](std::span<const reg_val> label) {
        const reg_val fx = label[fidx[label[xi]]];
        return g.character(label[yi], fx, n);
    });
}

void FullOracle::fo_query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    check_picture(FullPicture::fourier, "fo_query");
    const auto& layout = state.layout();
    const std::size_t xi = layout.index_of(x_reg);
    const std::size_t yi = layout.index_of(y_reg);
    const std::size_t n = dist_.range_size();
    std::vector<std::size_t> fidx;
    for (const auto& f : f_regs_) fidx.push_back(layout.index_of(f));
    const GroupOp g = group_;
    apply_basis_function(state, [&, n](std::span<reg_val> label) {
        const std::size_t row = fidx[label[xi]];
        label[row] = static_cast<reg_val>(g.subtract(label[row], label[yi], n));
    });
}

void FullOracle::query(QState& state, std::string_view x_reg, std::string_view y_reg) const {
    switch (picture_) {
        case FullPicture::standard: sto_query(state, x_reg, y_reg); return;
        case FullPicture::phase: pho_query(state, x_reg, y_reg); return;
        case FullPicture::fourier: fo_query(state, x_reg, y_reg); return;
    }
}

void FullOracle::y_basis_change(QState& state, std::string_view y_reg, bool forward) const {
    if (group_.mode == GroupOp::Mode::bit_xor)
        apply_hadamard_transform(state, y_reg);
    else
        apply_qft(state, y_reg, /*inverse=*/!forward);
}

void FullOracle::f_basis_change(QState& state, bool forward) const {
    for (const auto& f : f_regs_) {
        if (group_.mode == GroupOp::Mode::bit_xor)
            apply_hadamard_transform(state, f);
        else
            apply_qft(state, f, /*inverse=*/!forward);
    }
}

void FullOracle::convert_picture(QState& state, std::string_view y_reg, FullPicture target) {
    // Chain: standard <-(Y)-> phase <-(F)-> fourier.
    auto rank = [](FullPicture p) { return p == FullPicture::standard ? 0 : p == FullPicture::phase ? 1 : 2; };
    int cur = rank(picture_);
    const int dst = rank(target);
    while (cur < dst) {
        if (cur == 0)
            y_basis_change(state, y_reg, /*forward=*/true);
        else
            f_basis_change(state, /*forward=*/true);
        ++cur;
    }
    while (cur > dst) {
        if (cur == 1)
            y_basis_change(state, y_reg, /*forward=*/false);
        else
            f_basis_change(state, /*forward=*/false);
        --cur;
    }
    picture_ = target;
}

} // namespace qro
