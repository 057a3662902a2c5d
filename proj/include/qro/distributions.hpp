#pragma once

#include "qro/complexmat.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qro {

// Group operation used by oracle queries on [N]: addition mod N, or bitwise
// XOR when N is a power of two.
struct GroupOp {
    enum class Mode { add_mod_n, bit_xor };
    Mode mode = Mode::add_mod_n;

    static GroupOp add() { return {Mode::add_mod_n}; }
    static GroupOp xored() { return {Mode::bit_xor}; }

    void check_range(std::size_t n) const;
    std::size_t combine(std::size_t y, std::size_t f, std::size_t n) const;  // y o f
    std::size_t subtract(std::size_t a, std::size_t b, std::size_t n) const; // a o b^{-1}
    // Character chi_eta(z): exp(2 pi i eta z / N) in add mode, (-1)^(eta.z) in
    // xor mode. These are the phases that diagonalize the group translation.
    cplx character(std::size_t eta, std::size_t z, std::size_t n) const;
    const char* name() const { return mode == Mode::add_mod_n ? "add" : "xor"; }
};

// Distribution over functions f: [M] -> [N] with independent per-input output
// marginals, together with the local preparation unitaries. samp(x) has
// sqrt(p_x) as its first column.
class ProductDistribution {
public:
    // Samp = QFT_N^dag, the Fourier transform of the cyclic group Z_N.
    static ProductDistribution uniform(std::size_t m, std::size_t n);
    // Samp = HT_n, the Fourier transform of (Z_2)^n; pairs with xor mode.
    static ProductDistribution uniform_xor(std::size_t m, std::size_t n);
    // Dispatches between the two uniform conventions.
    static ProductDistribution uniform_for(std::size_t m, std::size_t n, const GroupOp& group);
    static ProductDistribution bernoulli(std::size_t m, double lambda);
    static ProductDistribution from_marginals(std::vector<std::vector<double>> rows);
    static ProductDistribution from_json_text(const std::string& text);

    std::size_t domain_size() const { return m_; }
    std::size_t range_size() const { return n_; }
    bool is_uniform() const { return uniform_; }
    bool is_uniform_xor() const { return uniform_ && kind_ == "uniform-xor"; }
    const std::string& kind() const { return kind_; }

    double marginal(std::size_t x, std::size_t y) const { return marginals_[x][y]; }
    const std::vector<double>& marginal_row(std::size_t x) const { return marginals_[x]; }
    const CMat& samp(std::size_t x) const { return samp_[x]; }
    // Preparation used for padding cells during picture conversions; the paper
    // leaves it unspecified, we fix Samp at input 0.
    const CMat& padding_samp() const { return samp_[0]; }

    // Independent classical sample of a full function table.
    std::vector<std::size_t> sample_function(std::mt19937_64& rng) const;

private:
    ProductDistribution() = default;
    void validate() const;

    std::size_t m_ = 0, n_ = 0;
    bool uniform_ = false;
    std::string kind_;
    std::vector<std::vector<double>> marginals_;
    std::vector<CMat> samp_;
};

} // namespace qro
