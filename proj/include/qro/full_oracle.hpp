#pragma once

#include "qro/distributions.hpp"
#include "qro/statevec.hpp"

#include <string>
#include <vector>

namespace qro {

enum class FullPicture { standard, phase, fourier };

const char* to_string(FullPicture p);

// Purified, uncompressed oracle over a product distribution. The function
// register F is materialized as M sub-registers F0..F{M-1}, each of
// cardinality N. The picture tag tracks the basis in which Y and F are
// interpreted; queries check it.
class FullOracle {
public:
    FullOracle(ProductDistribution dist, GroupOp group, FullPicture picture = FullPicture::standard);

    const ProductDistribution& dist() const { return dist_; }
    const GroupOp& group() const { return group_; }
    FullPicture picture() const { return picture_; }
    const std::vector<std::string>& f_registers() const { return f_regs_; }

    // Registers this oracle contributes to a layout.
    std::vector<Register> layout_registers() const;

    // Prepares the purified initial oracle state on |0> F registers, in this
    // oracle's picture: Samp(x) per row (standard/phase pictures), or
    // QFT * Samp(x) per row (fourier picture). Adversary registers untouched.
    void prepare_initial_state(QState& state) const;

    void sto_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    void pho_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    void fo_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    // Dispatches on the current picture.
    void query(QState& state, std::string_view x_reg, std::string_view y_reg) const;

    // Applies the chain StO <-> PhO <-> FO conversions on Y and the F rows,
    // mutating the picture tag. Round trips are exact.
    void convert_picture(QState& state, std::string_view y_reg, FullPicture target);

    // Enforced cap on full-oracle state sizes (amplitude count).
    static constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 24;

private:
    void check_picture(FullPicture expected, const char* op) const;
    void y_basis_change(QState& state, std::string_view y_reg, bool forward) const;
    void f_basis_change(QState& state, bool forward) const;

    ProductDistribution dist_;
    GroupOp group_;
    FullPicture picture_;
    std::vector<std::string> f_regs_;
};

} // namespace qro
