#include "qro/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qro {

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
    total_dim_ = 1;
    for (const auto& r : regs_) {
        if (r.card < 1) throw std::invalid_argument("register '" + r.name + "' has cardinality 0");
        for (const auto& o : regs_)
            if (&o != &r && o.name == r.name)
                throw std::invalid_argument("duplicate register name '" + r.name + "'");
        total_dim_ *= r.card;
    }
    strides_.assign(regs_.size(), 1);
    for (std::size_t i = regs_.size(); i-- > 0;) {
        if (i + 1 < regs_.size()) strides_[i] = strides_[i + 1] * regs_[i + 1].card;
    }
}

std::size_t RegisterLayout::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
        if (regs_[i].name == name) return i;
    throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

bool RegisterLayout::has_register(std::string_view name) const {
    for (const auto& r : regs_)
        if (r.name == name) return true;
    return false;
}

std::size_t RegisterLayout::flatten(std::span<const reg_val> label) const {
    if (label.size() != regs_.size()) throw std::invalid_argument("label size mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (label[i] >= regs_[i].card)
            throw std::out_of_range("coordinate for register '" + regs_[i].name + "' out of range");
        idx += label[i] * strides_[i];
    }
    return idx;
}

void RegisterLayout::unflatten(std::size_t idx, std::span<reg_val> out) const {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        out[i] = static_cast<reg_val>((idx / strides_[i]) % regs_[i].card);
    }
}

RegisterLayout RegisterLayout::appended(const Register& r) const {
    auto regs = regs_;
    regs.push_back(r);
    return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::removed(std::size_t i) const {
    auto regs = regs_;
    regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(i));
    return RegisterLayout(std::move(regs));
}

bool RegisterLayout::operator==(const RegisterLayout& o) const {
    if (regs_.size() != o.regs_.size()) return false;
    for (std::size_t i = 0; i < regs_.size(); ++i)
        if (regs_[i].name != o.regs_[i].name || regs_[i].card != o.regs_[i].card) return false;
    return true;
}

LocalUnitary::LocalUnitary(std::vector<std::string> t, CMat m) : targets(std::move(t)), matrix(std::move(m)) {
    if (!matrix.is_unitary(kPhysTol))
        throw std::invalid_argument("LocalUnitary: matrix is not unitary within tolerance");
}

QState::QState(RegisterLayout layout, std::vector<cplx> amps)
    : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (amps_.size() != layout_.total_dim())
        throw std::invalid_argument("QState: amplitude vector does not match layout dimension");
}

QState QState::basis_state(const RegisterLayout& layout, std::span<const reg_val> assignment) {
    std::vector<cplx> amps(layout.total_dim());
    amps[layout.flatten(assignment)] = 1.0;
    return QState(layout, std::move(amps));
}

QState QState::zero_state(const RegisterLayout& layout) {
    std::vector<cplx> amps(layout.total_dim());
    amps[0] = 1.0;
    return QState(layout, std::move(amps));
}

cplx QState::amplitude(std::span<const reg_val> label) const { return amps_[layout_.flatten(label)]; }

double QState::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void QState::renormalize() {
    const double n = norm();
    if (n == 0.0) throw std::runtime_error("cannot renormalize the zero vector");
    for (auto& a : amps_) a /= n;
}

void QState::prune(double eps) {
    for (auto& a : amps_)
        if (std::abs(a) < eps) a = 0.0;
    renormalize();
}

void QState::append_register(const Register& r, reg_val value) {
    if (value >= r.card) throw std::out_of_range("append_register: value out of range");
    RegisterLayout nl = layout_.appended(r);
    std::vector<cplx> na(nl.total_dim());
    for (std::size_t i = 0; i < amps_.size(); ++i) na[i * r.card + value] = amps_[i];
    layout_ = std::move(nl);
    amps_ = std::move(na);
}

void QState::contract_register(std::string_view name, reg_val value, double tol) {
    const std::size_t ri = layout_.index_of(name);
    const std::size_t card = layout_.card(ri);
    const std::size_t stride = layout_.stride(ri);
    RegisterLayout nl = layout_.removed(ri);
    std::vector<cplx> na(nl.total_dim());
    double residual = 0.0;
    std::size_t out = 0;
    for (std::size_t base = 0; base < amps_.size(); base += stride * card) {
        for (std::size_t low = 0; low < stride; ++low) {
            for (std::size_t v = 0; v < card; ++v) {
                const cplx a = amps_[base + v * stride + low];
                if (v == value)
                    na[out] = a;
                else
                    residual += std::norm(a);
            }
            ++out;
        }
    }
    if (std::sqrt(residual) > tol)
        throw std::runtime_error("contract_register: register '" + std::string(name) +
                                 "' is not in the expected basis state (residual " +
                                 std::to_string(std::sqrt(residual)) + ")");
    layout_ = std::move(nl);
    amps_ = std::move(na);
}

namespace {

// Applies `mat` (or provider output) on register `ri` for every assignment of
// the other registers.
template <typename Provider>
void apply_on_register(QState& state, std::size_t ri, Provider&& provider) {
    const auto& layout = state.layout();
    const std::size_t card = layout.card(ri);
    const std::size_t stride = layout.stride(ri);
    auto amps = state.amplitudes();
    std::vector<cplx> in(card), out(card);
    Label label(layout.num_registers());
    const std::size_t block = stride * card;
    for (std::size_t base = 0; base < amps.size(); base += block) {
        for (std::size_t low = 0; low < stride; ++low) {
            const std::size_t anchor = base + low;
            const CMat* m;
            layout.unflatten(anchor, label);
            label[ri] = 0;
            m = provider(std::span<const reg_val>(label));
            if (m == nullptr) continue;
            if (m->dim() != card) throw std::invalid_argument("conditioned unitary: dimension mismatch");
            for (std::size_t v = 0; v < card; ++v) in[v] = amps[anchor + v * stride];
            for (std::size_t r = 0; r < card; ++r) {
                cplx s{};
                const cplx* row = m->row(r);
                for (std::size_t c = 0; c < card; ++c) s += row[c] * in[c];
                out[r] = s;
            }
            for (std::size_t v = 0; v < card; ++v) amps[anchor + v * stride] = out[v];
        }
    }
}

} // namespace

void apply_qft(QState& state, std::string_view reg, bool inverse) {
    const std::size_t ri = state.layout().index_of(reg);
    const CMat m = qft_matrix(state.layout().card(ri), inverse);
    apply_on_register(state, ri, [&m](std::span<const reg_val>) { return &m; });
}

void apply_hadamard_transform(QState& state, std::string_view reg) {
    const std::size_t ri = state.layout().index_of(reg);
    const std::size_t card = state.layout().card(ri);
    if (!is_power_of_two(card))
        throw std::invalid_argument("hadamard transform requires a power-of-two register, got '" +
                                    std::string(reg) + "' of cardinality " + std::to_string(card));
    const CMat m = hadamard_matrix(card);
    apply_on_register(state, ri, [&m](std::span<const reg_val>) { return &m; });
}

void apply_local_unitary(QState& state, const LocalUnitary& u) {
    const auto& layout = state.layout();
    if (u.targets.empty()) throw std::invalid_argument("LocalUnitary with no targets");
    std::vector<std::size_t> idx;
    std::size_t dim = 1;
    for (const auto& t : u.targets) {
        idx.push_back(layout.index_of(t));
        dim *= layout.card(idx.back());
    }
    if (dim != u.matrix.dim()) throw std::invalid_argument("LocalUnitary: matrix dimension mismatch");

    // Gather/scatter over the joint target subspace.
    std::vector<std::size_t> offsets(dim, 0);
    for (std::size_t v = 0; v < dim; ++v) {
        std::size_t rem = v, off = 0;
        for (std::size_t k = idx.size(); k-- > 0;) {
            const std::size_t c = layout.card(idx[k]);
            off += (rem % c) * layout.stride(idx[k]);
            rem /= c;
        }
        offsets[v] = off;
    }
    auto amps = state.amplitudes();
    const std::size_t n = amps.size();
    std::vector<bool> done(n, false);
    std::vector<cplx> in(dim), out(dim);
    Label label(layout.num_registers());
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        layout.unflatten(i, label);
        bool anchor = true;
        for (auto r : idx)
            if (label[r] != 0) { anchor = false; break; }
        if (!anchor) continue;
        for (std::size_t v = 0; v < dim; ++v) {
            in[v] = amps[i + offsets[v]];
            done[i + offsets[v]] = true;
        }
        for (std::size_t r = 0; r < dim; ++r) {
            cplx s{};
            const cplx* row = u.matrix.row(r);
            for (std::size_t c = 0; c < dim; ++c) s += row[c] * in[c];
            out[r] = s;
        }
        for (std::size_t v = 0; v < dim; ++v) amps[i + offsets[v]] = out[v];
    }
}

void apply_conditioned_unitary(QState& state, std::size_t target_reg,
                               const std::function<const CMat*(std::span<const reg_val>)>& provider) {
    apply_on_register(state, target_reg, provider);
}

void apply_basis_function(QState& state, const std::function<void(std::span<reg_val>)>& f, bool verify) {
    const auto& layout = state.layout();
    const std::size_t n = layout.total_dim();
    std::vector<cplx> out(n);
    std::vector<bool> hit;
    if (verify) hit.assign(n, false);
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < n; ++i) {
        if (!verify && amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        f(label);
        const std::size_t j = layout.flatten(label);
        if (verify) {
            if (hit[j]) throw std::runtime_error("apply_basis_function: mapping is not a bijection");
            hit[j] = true;
        }
        out[j] += amps[i];
    }
    std::copy(out.begin(), out.end(), state.amplitudes().begin());
}

void apply_phase_function(QState& state, const std::function<cplx(std::span<const reg_val>)>& phase) {
    const auto& layout = state.layout();
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        amps[i] *= phase(label);
    }
}

ProjectionResult project(const QState& state, const std::function<bool(std::span<const reg_val>)>& pred) {
    auto [acc, rej] = split_by_predicate(state, pred);
    ProjectionResult res;
    const double pa = acc.norm();
    res.probability = pa * pa;
    if (pa > 0.0) {
        acc.renormalize();
        res.accepted = std::move(acc);
    }
    const double pr = rej.norm();
    if (pr > 0.0) {
        rej.renormalize();
        res.rejected = std::move(rej);
    }
    return res;
}

std::pair<QState, QState> split_by_predicate(const QState& state,
                                             const std::function<bool(std::span<const reg_val>)>& pred) {
    const auto& layout = state.layout();
    std::vector<cplx> a(layout.total_dim()), b(layout.total_dim());
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        layout.unflatten(i, label);
        (pred(label) ? a : b)[i] = amps[i];
    }
    return {QState(layout, std::move(a)), QState(layout, std::move(b))};
}

void add_into(QState& dst, const QState& src) {
    if (!(dst.layout() == src.layout())) throw std::invalid_argument("add_into: layout mismatch");
    auto d = dst.amplitudes();
    auto s = src.amplitudes();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

double l2_distance(const QState& a, const QState& b) {
    if (!(a.layout() == b.layout())) throw std::invalid_argument("l2_distance: layout mismatch");
    double s = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] - y[i]);
    return std::sqrt(s);
}

double phase_insensitive_distance(const QState& a, const QState& b) {
    if (!(a.layout() == b.layout()))
        throw std::invalid_argument("phase_insensitive_distance: layout mismatch");
    cplx ip{};
    double na = 0.0, nb = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        ip += std::conj(x[i]) * y[i];
        na += std::norm(x[i]);
        nb += std::norm(y[i]);
    }
    const double v = na + nb - 2.0 * std::abs(ip);
    return std::sqrt(std::max(0.0, v));
}

void for_each_support_label(const QState& state,
                            const std::function<void(std::span<const reg_val>, cplx)>& fn,
                            double threshold) {
    const auto& layout = state.layout();
    Label label(layout.num_registers());
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) <= threshold) continue;
        layout.unflatten(i, label);
        fn(label, amps[i]);
    }
}

std::vector<double> register_distribution(const QState& state, std::string_view reg) {
    const auto& layout = state.layout();
    const std::size_t ri = layout.index_of(reg);
    std::vector<double> dist(layout.card(ri), 0.0);
    const std::size_t stride = layout.stride(ri);
    const std::size_t card = layout.card(ri);
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] == cplx{}) continue;
        dist[(i / stride) % card] += std::norm(amps[i]);
    }
    return dist;
}

} // namespace qro
