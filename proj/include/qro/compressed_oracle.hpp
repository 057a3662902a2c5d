#pragma once

#include "qro/distributions.hpp"
#include "qro/full_oracle.hpp"
#include "qro/statevec.hpp"

#include <string>
#include <vector>

namespace qro {

// Basis in which the q-cell database register is interpreted:
//   unprepared (fresh cells read 0) -> standard (Samp applied per cell)
//   -> fourier (QFT/HT applied per cell on top of standard).
enum class DbBasis { unprepared, standard, fourier };

enum class CompressedPicture { cfo, cpho, csto };

const char* to_string(DbBasis b);
const char* to_string(CompressedPicture p);

struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ill_formed_database : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Addressing of the q database cells inside a concrete layout. Cell i is the
// register pair ("D{i}x" of cardinality M+1, "D{i}y" of cardinality N); the
// x-part value M encodes the padding symbol.
struct DatabaseView {
    std::size_t q = 0, m = 0, n = 0;
    std::string prefix = "D";
    std::vector<std::size_t> x_idx, y_idx; // register indices per cell

    static std::string x_name(std::size_t cell, const std::string& prefix = "D") {
        return prefix + std::to_string(cell) + "x";
    }
    static std::string y_name(std::size_t cell, const std::string& prefix = "D") {
        return prefix + std::to_string(cell) + "y";
    }

    static DatabaseView resolve(const RegisterLayout& layout, std::size_t q, std::size_t m,
                                std::size_t n, const std::string& prefix = "D");

    reg_val bottom() const { return static_cast<reg_val>(m); }
    reg_val cell_x(std::span<const reg_val> label, std::size_t i) const { return label[x_idx[i]]; }
    reg_val cell_y(std::span<const reg_val> label, std::size_t i) const { return label[y_idx[i]]; }

    // Non-padding (x,y) pairs in cell order. Does not validate shape.
    std::vector<std::pair<reg_val, reg_val>> entries(std::span<const reg_val> label) const;
    std::size_t count_nonpadding(std::span<const reg_val> label) const;
    // 0 when x is absent, 1+i when cell i holds x.
    std::size_t locate(std::span<const reg_val> label, reg_val x) const;

    // Well-formedness of one basis label: non-padding cells strictly sorted
    // and in front, padding suffix equal to (bottom, 0), no non-padding cell
    // with y == 0.
    bool well_formed(std::span<const reg_val> label) const;
};

// Compressed oracle for a product distribution: a q-cell lazy database plus
// the query unitaries in the three pictures. The database rests in the
// unprepared basis for the CFO picture and in the standard basis for the
// CPhO/CStO pictures.
class CompressedOracle {
public:
    CompressedOracle(ProductDistribution dist, GroupOp group, std::size_t q,
                     CompressedPicture picture = CompressedPicture::cfo,
                     std::string register_prefix = "D");

    const ProductDistribution& dist() const { return dist_; }
    const GroupOp& group() const { return group_; }
    std::size_t capacity() const { return q_; }
    CompressedPicture picture() const { return picture_; }
    DbBasis rest_basis() const {
        return picture_ == CompressedPicture::cfo ? DbBasis::unprepared : DbBasis::standard;
    }

    std::vector<Register> layout_registers() const;
    DatabaseView view(const RegisterLayout& layout) const;

    // Sets the database registers of a zero-initialized state to the empty
    // database in the at-rest basis of this picture.
    void prepare_rest_state(QState& state) const;

    // One query in the oracle's picture on (x_reg, y_reg).
    void query(QState& state, std::string_view x_reg, std::string_view y_reg) const;

    void cfo_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    void cpho_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;
    void csto_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;

    // Closed-form four-case update of the uniform/xor compressed oracle
    // (independent implementation route used as a cross-check). CFO picture.
    void uniform_fast_query(QState& state, std::string_view x_reg, std::string_view y_reg) const;

    // Variant with the zero-entry deletion step omitted; breaks correctness
    // and is kept as the regression target for the distinguishing attack.
    void cpho_query_without_deletion(QState& state, std::string_view x_reg,
                                     std::string_view y_reg) const;

    // Converts the database registers between bases (per-cell Samp and
    // QFT/HT stages; padding cells use Samp at the dummy input 0).
    void db_convert(QState& state, DbBasis from, DbBasis to) const;

    // Replaces the database registers by a full function register F0..F{M-1}
    // in the Fourier picture. Requires the unprepared basis and a well-formed
    // support; throws ill_formed_database otherwise.
    QState decompress(const QState& state) const;
    FullOracle fourier_full_oracle() const {
        return FullOracle(dist_, group_, FullPicture::fourier);
    }

    // Throws if any support label is ill-formed (checked in the at-rest basis
    // of the CFO picture).
    void check_well_formed_support(const QState& state, double threshold = 1e-10) const;

    // Update matrix Samp(x)^dag diag(chi_eta(z)) Samp(x) applied to the
    // y-part of the cell holding x.
    const CMat& update_matrix(std::size_t x, std::size_t eta) const;

private:
    friend class InstrumentedCfo;
    void capacity_precheck(const QState& state, std::size_t xi) const;
    void tau_insert_remove(QState& state, std::size_t xi) const;
    void cell_update_pass(QState& state, std::size_t xi, std::size_t yi) const;
    void y_basis_change(QState& state, std::string_view y_reg, bool inverse) const;

    ProductDistribution dist_;
    GroupOp group_;
    std::size_t q_;
    CompressedPicture picture_;
    std::string prefix_;
    std::vector<CMat> update_; // [x * N + eta]
    CMat fourier_;             // QFT_N or HT_N depending on group mode
};

// Sorted insertion position of x among the cell x-parts (padding sorts last).
std::size_t sorted_insert_pos(const DatabaseView& db, std::span<const reg_val> label, reg_val x);

} // namespace qro
