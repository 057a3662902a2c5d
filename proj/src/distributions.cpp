#include "qro/distributions.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace qro {

void GroupOp::check_range(std::size_t n) const {
    if (mode == Mode::bit_xor && !is_power_of_two(n))
        throw std::invalid_argument("xor group mode requires a power-of-two range, got N=" +
                                    std::to_string(n));
}

std::size_t GroupOp::combine(std::size_t y, std::size_t f, std::size_t n) const {
    return mode == Mode::add_mod_n ? (y + f) % n : (y ^ f);
}

std::size_t GroupOp::subtract(std::size_t a, std::size_t b, std::size_t n) const {
    return mode == Mode::add_mod_n ? (a + n - b % n) % n : (a ^ b);
}

cplx GroupOp::character(std::size_t eta, std::size_t z, std::size_t n) const {
    if (mode == Mode::add_mod_n) return root_of_unity(n, (eta * z) % n);
    return (std::popcount(eta & z) & 1) ? cplx{-1.0, 0.0} : cplx{1.0, 0.0};
}

void ProductDistribution::validate() const {
    if (m_ < 1 || n_ < 1) throw std::invalid_argument("product distribution needs M,N >= 1");
    for (std::size_t x = 0; x < m_; ++x) {
        double sum = 0.0;
        for (double p : marginals_[x]) {
            if (p < 0.0) throw std::invalid_argument("negative probability in marginal row");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("marginal row " + std::to_string(x) + " sums to " +
                                        std::to_string(sum));
        if (!samp_[x].is_unitary(kPhysTol))
            throw std::invalid_argument("samp unitary defect too large at x=" + std::to_string(x));
        for (std::size_t y = 0; y < n_; ++y) {
            if (std::abs(samp_[x](y, 0) - cplx{std::sqrt(marginals_[x][y]), 0.0}) > kPhysTol)
                throw std::invalid_argument("samp column 0 does not match sqrt marginals at x=" +
                                            std::to_string(x));
        }
    }
}

ProductDistribution ProductDistribution::uniform(std::size_t m, std::size_t n) {
    ProductDistribution d;
    d.m_ = m;
    d.n_ = n;
    d.uniform_ = true;
    d.kind_ = "uniform";
    d.marginals_.assign(m, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    // Samp for the uniform distribution is the inverse Fourier transform; its
    // first column is the flat positive superposition.
    d.samp_.assign(m, qft_matrix(n, /*inverse=*/true));
    d.validate();
    return d;
}

ProductDistribution ProductDistribution::uniform_xor(std::size_t m, std::size_t n) {
    ProductDistribution d;
    d.m_ = m;
    d.n_ = n;
    d.uniform_ = true;
    d.kind_ = "uniform-xor";
    d.marginals_.assign(m, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    d.samp_.assign(m, hadamard_matrix(n));
    d.validate();
    return d;
}

ProductDistribution ProductDistribution::uniform_for(std::size_t m, std::size_t n,
                                                     const GroupOp& group) {
    return group.mode == GroupOp::Mode::bit_xor ? uniform_xor(m, n) : uniform(m, n);
}

ProductDistribution ProductDistribution::bernoulli(std::size_t m, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("bernoulli lambda outside [0,1]");
    ProductDistribution d;
    d.m_ = m;
    d.n_ = 2;
    d.kind_ = "bernoulli";
    d.marginals_.assign(m, {1.0 - lambda, lambda});
    CMat s(2);
    const double c = std::sqrt(1.0 - lambda), q = std::sqrt(lambda);
    s(0, 0) = c;
    s(0, 1) = q;
    s(1, 0) = q;
    s(1, 1) = -c;
    d.samp_.assign(m, s);
    d.validate();
    return d;
}

ProductDistribution ProductDistribution::from_marginals(std::vector<std::vector<double>> rows) {
    if (rows.empty()) throw std::invalid_argument("from_marginals: no rows");
    ProductDistribution d;
    d.m_ = rows.size();
    d.n_ = rows[0].size();
    d.kind_ = "marginals";
    for (const auto& r : rows)
        if (r.size() != d.n_) throw std::invalid_argument("from_marginals: ragged rows");
    d.marginals_ = std::move(rows);
    d.samp_.reserve(d.m_);
    for (std::size_t x = 0; x < d.m_; ++x) {
        // Householder reflection H = I - 2 w w^T / (w^T w) with w = v - e0 maps
        // e0 to v = sqrt(p); degenerates to the identity when v = e0.
        const std::size_t n = d.n_;
        std::vector<double> v(n);
        for (std::size_t y = 0; y < n; ++y) v[y] = std::sqrt(std::max(0.0, d.marginals_[x][y]));
        std::vector<double> w = v;
        w[0] -= 1.0;
        double ww = 0.0;
        for (double e : w) ww += e * e;
        CMat h = CMat::identity(n);
        if (ww > 1e-30) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) h(r, c) -= 2.0 * w[r] * w[c] / ww;
        }
        d.samp_.push_back(std::move(h));
    }
    d.validate();
    return d;
}

ProductDistribution ProductDistribution::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const std::size_t m = j.at("M").get<std::size_t>();
    const std::size_t n = j.at("N").get<std::size_t>();
    std::vector<std::vector<double>> rows = j.at("rows").get<std::vector<std::vector<double>>>();
    if (rows.size() != m) throw std::invalid_argument("marginal table: row count does not match M");
    for (const auto& r : rows)
        if (r.size() != n) throw std::invalid_argument("marginal table: row width does not match N");
    return from_marginals(std::move(rows));
}

std::vector<std::size_t> ProductDistribution::sample_function(std::mt19937_64& rng) const {
    std::vector<std::size_t> f(m_);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t x = 0; x < m_; ++x) {
        double r = u(rng);
        std::size_t y = 0;
        for (; y + 1 < n_; ++y) {
            if (r < marginals_[x][y]) break;
            r -= marginals_[x][y];
        }
        f[x] = y;
    }
    return f;
}

} // namespace qro
