#pragma once

#include "qro/adversary.hpp"
#include "qro/compressed_oracle.hpp"
#include "qro/puncture.hpp"
#include "qro/qindiff.hpp"
#include "qro/sponge.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qro {

// Formats a double with 12 significant digits (the output contract for all
// emitted files).
std::string fmt12(double v);

// Hard cap on state-vector sizes allocated by experiment drivers.
inline constexpr std::size_t kMaxStateAmplitudes = std::size_t{1} << 24;

// Checks and reports the state dimension an experiment is about to allocate.
std::size_t guard_dimension(const RegisterLayout& layout, std::ostream* log = nullptr);

// Wraps a compressed or full oracle as the query handle for run_adversary.
struct CompressedHandle : QueryOracle {
    const CompressedOracle* oracle;
    explicit CompressedHandle(const CompressedOracle& o) : oracle(&o) {}
    void query_layer(QState& state,
                     std::span<const std::pair<std::string, std::string>> xy_pairs) override;
};
struct FullHandle : QueryOracle {
    const FullOracle* oracle;
    explicit FullHandle(const FullOracle& o) : oracle(&o) {}
    void query_layer(QState& state,
                     std::span<const std::pair<std::string, std::string>> xy_pairs) override;
};

// Runs the adversary against a fresh oracle state; returns the final state.
QState run_vs_compressed(const AdversarySpec& spec, const CompressedOracle& oracle);
QState run_vs_full(const AdversarySpec& spec, const FullOracle& oracle);

struct CorrectnessCase {
    std::size_t m = 0, n = 0, q = 0;
    std::string dist, group;
    std::uint64_t seed = 0;
    double l2 = 0.0; // || decompress(Psi_CFO) - Psi_FO ||
    double tv = 0.0; // total variation on the adversary registers
};

// One correctness comparison: same adversary against CFO + decompression and
// against the Fourier-picture full oracle.
CorrectnessCase correctness_compare(const ProductDistribution& dist, GroupOp group, std::size_t q,
                              const AdversarySpec& spec);

struct CorrectnessConfig {
    std::vector<std::size_t> ms = {2, 3, 4};
    std::vector<std::size_t> ns = {2, 3, 4};
    std::vector<std::size_t> qs = {1, 2, 3};
    std::size_t adversaries_per_case = 50;
    std::uint64_t seed = 1;
    double tol = 1e-9;
};

struct CorrectnessSweep {
    std::vector<CorrectnessCase> cases;
    double worst_l2 = 0.0;
    double worst_tv = 0.0;
    std::size_t violations = 0;
};

CorrectnessSweep correctness_sweep(const CorrectnessConfig& cfg, std::ostream* log = nullptr);

// Birthday-style adversary: basis queries at distinct inputs with the output
// register held at the Fourier-basis mask eta (classical lazy sampling when
// run against the CPhO picture).
AdversarySpec fourier_basis_adversary(std::size_t m, std::size_t n, std::vector<reg_val> xs,
                                      reg_val eta = 1);

struct FindProbCase {
    std::string adversary, relation;
    std::size_t m = 0, n = 0, q = 0;
    double p_find = 0.0;
    double bound_tight = 0.0, bound_simple = 0.0, bound_preim = 0.0, bound_coll = 0.0;
    bool within_bounds = false;
};

FindProbCase birthday_find_case(std::size_t n);       // q=2 distinct queries vs R_coll
FindProbCase preimage_find_case(std::size_t n);       // q=1 query vs R_preim

struct O2hSweepConfig {
    std::size_t m = 4, n = 4;
    std::size_t max_q = 3;
    std::size_t seeds = 100;
    std::uint64_t seed = 7;
    double tol = 1e-9;
};

struct O2hSweepRow {
    std::uint64_t seed = 0;
    std::size_t q = 0, d = 0;
    std::string r1, r2;
    O2hRecord record;
};

struct O2hSweep {
    std::vector<O2hSweepRow> rows;
    std::size_t violations = 0;
};

O2hSweep o2h_sweep(const O2hSweepConfig& cfg, std::ostream* log = nullptr);

// Deferred-vs-immediate joint distribution comparison over the same sweep.
struct DeferredImmediateSweep {
    std::size_t cases = 0;
    double worst_tv = 0.0;
    std::size_t violations = 0;
};
DeferredImmediateSweep deferred_immediate_sweep(const O2hSweepConfig& cfg,
                                                std::ostream* log = nullptr);

// The distinguishing attack against the no-deletion phase oracle: returns the
// empirical distinguishing frequency over `shots` samples of the exact output
// distribution (measurement of X in the Hadamard basis).
double cpho_attack_distinguish_rate(std::size_t m_bits, std::size_t shots, std::uint64_t seed);

// --- classical sponge experiment ------------------------------------------------

struct ClassicalSpongeConfig {
    SpongeParams params{1, 2};
    std::size_t q = 4;
    std::size_t runs = 100000;
    std::uint64_t seed = 5;
    std::string adversary = "collision-seeker"; // or "consistency" / "prober"
};

struct ClassicalSpongeReport {
    ClassicalSpongeConfig cfg;
    std::vector<ClassicalGameResult> games; // games 1..6
    double sigma = 0.0;                     // per-estimate binomial bound
    double diff12 = 0.0, diff23 = 0.0;
    double f_coll_bound = 0.0;
    bool holds = false;
};

ClassicalAdversary make_classical_adversary(const std::string& name, SpongeParams params,
                                            std::size_t q);
ClassicalSpongeReport classical_sponge_experiment(const ClassicalSpongeConfig& cfg);

// Exact identical-until-bad check at r=c=1: game-3 and game-4 transcript
// distributions conditioned on no Bad event; returns the total variation.
double good_branch_transcript_tv(const std::string& adversary, std::size_t q);

// --- output helpers ---------------------------------------------------------------

std::string csv_escape(const std::string& s);
void write_text_file(const std::string& path, const std::string& content);

} // namespace qro
