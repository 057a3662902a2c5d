#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qro {

using cplx = std::complex<double>;

// Tolerances used across the physics invariants.
inline constexpr double kPhysTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;

// Small dense complex matrix, row-major. All oracle-level unitaries here are
// tiny (dimension <= a few dozen), so no BLAS needed.
class CMat {
public:
    CMat() = default;
    explicit CMat(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    static CMat identity(std::size_t dim) {
        CMat m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }

    const cplx* row(std::size_t r) const { return a_.data() + r * dim_; }

    CMat adjoint() const {
        CMat m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    CMat operator*(const CMat& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("CMat: dimension mismatch in product");
        CMat m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t k = 0; k < dim_; ++k) {
                const cplx v = (*this)(r, k);
                if (v == cplx{}) continue;
                for (std::size_t c = 0; c < dim_; ++c) m(r, c) += v * o(k, c);
            }
        return m;
    }

    // max |(U U^dag - I)_{ij}|
    double unitarity_defect() const {
        double worst = 0.0;
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) {
                cplx s{};
                for (std::size_t k = 0; k < dim_; ++k) s += (*this)(r, k) * std::conj((*this)(c, k));
                if (r == c) s -= 1.0;
                worst = std::max(worst, std::abs(s));
            }
        return worst;
    }

    bool is_unitary(double tol = 1e-10) const { return unitarity_defect() <= tol; }

private:
    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

inline cplx root_of_unity(std::size_t n, std::size_t power) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(power % n) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

// QFT_N |x> = (1/sqrt(N)) sum_xi w^(xi*x) |xi>,  w = exp(2 pi i / N).
inline CMat qft_matrix(std::size_t n, bool inverse = false) {
    if (n == 0) throw std::invalid_argument("qft_matrix: N must be >= 1");
    CMat m(n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            cplx w = root_of_unity(n, (r * c) % n);
            m(r, c) = s * (inverse ? std::conj(w) : w);
        }
    return m;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// HT on n = log2(dim) bits: |x> -> 2^(-n/2) sum_xi (-1)^(xi.x) |xi>. Self-inverse.
inline CMat hadamard_matrix(std::size_t dim) {
    if (!is_power_of_two(dim))
        throw std::invalid_argument("hadamard_matrix: dimension must be a power of two");
    CMat m(dim);
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            const int par = std::popcount(r & c) & 1;
            m(r, c) = par ? -s : s;
        }
    return m;
}

} // namespace qro
