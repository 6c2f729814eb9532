#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// GF(2) linear algebra: a bit-packed dense matrix for elimination work and a
// support-list sparse matrix for generator matrices, where rows hold a
// handful of ones out of thousands of columns.

namespace ltkit::gf2 {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

class DenseBitMatrix {
public:
    DenseBitMatrix() = default;
    DenseBitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64), bits_(rows * stride_, 0) {}

    static DenseBitMatrix identity(std::size_t n) {
        DenseBitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        check(r, c);
        return (bits_[r * stride_ + (c >> 6)] >> (c & 63)) & 1u;
    }

    void set(std::size_t r, std::size_t c, bool v) {
        check(r, c);
        std::uint64_t& w = bits_[r * stride_ + (c >> 6)];
        const std::uint64_t mask = 1ULL << (c & 63);
        w = v ? (w | mask) : (w & ~mask);
    }

    // dst ^= src, whole rows at a time.
    void xor_rows(std::size_t dst, std::size_t src) {
        if (dst >= rows_ || src >= rows_) throw std::out_of_range("DenseBitMatrix: row out of range");
        std::uint64_t* d = bits_.data() + dst * stride_;
        const std::uint64_t* s = bits_.data() + src * stride_;
        for (std::size_t w = 0; w < stride_; ++w) d[w] ^= s[w];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a >= rows_ || b >= rows_) throw std::out_of_range("DenseBitMatrix: row out of range");
        if (a == b) return;
        std::swap_ranges(bits_.begin() + a * stride_, bits_.begin() + (a + 1) * stride_,
                         bits_.begin() + b * stride_);
    }

    bool row_is_zero(std::size_t r) const {
        if (r >= rows_) throw std::out_of_range("DenseBitMatrix: row out of range");
        const std::uint64_t* p = bits_.data() + r * stride_;
        for (std::size_t w = 0; w < stride_; ++w)
            if (p[w]) return false;
        return true;
    }

    bool operator==(const DenseBitMatrix& o) const = default;

private:
    void check(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("DenseBitMatrix: index (" + std::to_string(r) + ", " +
                                    std::to_string(c) + ") out of range");
    }

    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Matrix-vector product over GF(2); v indexed by column.
inline std::vector<std::uint8_t> multiply(const DenseBitMatrix& m, const std::vector<std::uint8_t>& v) {
    if (v.size() != m.cols()) throw std::invalid_argument("multiply: vector length mismatch");
    std::vector<std::uint8_t> out(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        unsigned acc = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc ^= (m.get(r, c) & (v[c] & 1u));
        out[r] = static_cast<std::uint8_t>(acc);
    }
    return out;
}

namespace detail {

// In-place Gaussian elimination to reduced row echelon form. Pivots are
// chosen deterministically: for each column in order, the first remaining row
// with a one. Returns pivot columns; rows at positions >= pivots.size() end
// up identically zero.
inline std::vector<std::size_t> rref(DenseBitMatrix& a, std::vector<std::uint8_t>* b) {
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t pr = npos;
        for (std::size_t i = r; i < a.rows(); ++i)
            if (a.get(i, c)) { pr = i; break; }
        if (pr == npos) continue;
        a.swap_rows(pr, r);
        if (b) std::swap((*b)[pr], (*b)[r]);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i != r && a.get(i, c)) {
                a.xor_rows(i, r);
                if (b) (*b)[i] ^= (*b)[r];
            }
        }
        pivot_cols.push_back(c);
        ++r;
    }
    return pivot_cols;
}

}  // namespace detail

inline std::size_t rank(const DenseBitMatrix& m) {
    DenseBitMatrix work = m;
    return detail::rref(work, nullptr).size();
}

enum class SolveStatus { Unique, RankDeficient, Inconsistent };

struct DenseSolveResult {
    SolveStatus status = SolveStatus::RankDeficient;
    std::size_t rank = 0;
    std::vector<std::size_t> free_cols;
    std::vector<std::uint8_t> solution;  // one entry per column, only when Unique
};

// Solve a x = b. Inconsistency (an all-zero row equated to 1) takes
// precedence over rank deficiency in the reported status.
inline DenseSolveResult solve_dense(DenseBitMatrix a, std::vector<std::uint8_t> b) {
    if (b.size() != a.rows()) throw std::invalid_argument("solve_dense: rhs length mismatch");
    for (auto& x : b) x &= 1u;

    DenseSolveResult res;
    const std::vector<std::size_t> pivot_cols = detail::rref(a, &b);
    res.rank = pivot_cols.size();

    auto it = pivot_cols.begin();
    for (std::size_t c = 0; c < a.cols(); ++c) {
        if (it != pivot_cols.end() && *it == c) ++it;
        else res.free_cols.push_back(c);
    }

    for (std::size_t r = res.rank; r < a.rows(); ++r) {
        if (b[r]) {
            res.status = SolveStatus::Inconsistent;
            return res;
        }
    }

    if (res.rank == a.cols()) {
        res.status = SolveStatus::Unique;
        res.solution.assign(a.cols(), 0);
        for (std::size_t r = 0; r < res.rank; ++r) res.solution[pivot_cols[r]] = b[r];
    } else {
        res.status = SolveStatus::RankDeficient;
    }
    return res;
}

// Sparse binary matrix stored as sorted column-index lists per row, plus the
// row/column permutations that elimination builds up. perm[logical] is the
// original index.
class SparseBitMatrix {
public:
    SparseBitMatrix() = default;
    SparseBitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), supports_(rows), row_perm_(rows), col_perm_(cols) {
        std::iota(row_perm_.begin(), row_perm_.end(), 0u);
        std::iota(col_perm_.begin(), col_perm_.end(), 0u);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    const std::vector<std::uint32_t>& row(std::size_t r) const {
        if (r >= rows_) throw std::out_of_range("SparseBitMatrix: row out of range");
        return supports_[r];
    }

    // Takes any order, stores sorted; duplicate or out-of-range columns are a
    // caller bug and rejected.
    void set_row(std::size_t r, std::vector<std::uint32_t> support) {
        if (r >= rows_) throw std::out_of_range("SparseBitMatrix: row out of range");
        std::sort(support.begin(), support.end());
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i] >= cols_)
                throw std::invalid_argument("SparseBitMatrix: column index out of range");
            if (i > 0 && support[i] == support[i - 1])
                throw std::invalid_argument("SparseBitMatrix: duplicate column in row support");
        }
        supports_[r] = std::move(support);
    }

    bool get(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseBitMatrix: index out of range");
        const auto& s = supports_[r];
        return std::binary_search(s.begin(), s.end(), static_cast<std::uint32_t>(c));
    }

    std::size_t nnz() const noexcept {
        std::size_t n = 0;
        for (const auto& s : supports_) n += s.size();
        return n;
    }

    const std::vector<std::uint32_t>& row_perm() const noexcept { return row_perm_; }
    const std::vector<std::uint32_t>& col_perm() const noexcept { return col_perm_; }

    void set_row_perm(std::vector<std::uint32_t> p) {
        validate_perm(p, rows_, "row");
        row_perm_ = std::move(p);
    }
    void set_col_perm(std::vector<std::uint32_t> p) {
        validate_perm(p, cols_, "col");
        col_perm_ = std::move(p);
    }

    // Direct support access for elimination; bypasses set_row validation, so
    // the caller must keep the sorted-unique invariant.
    std::vector<std::uint32_t>& mutable_row(std::size_t r) {
        if (r >= rows_) throw std::out_of_range("SparseBitMatrix: row out of range");
        return supports_[r];
    }

private:
    static void validate_perm(const std::vector<std::uint32_t>& p, std::size_t n, const char* what) {
        if (p.size() != n)
            throw std::invalid_argument(std::string("SparseBitMatrix: ") + what + " permutation size mismatch");
        std::vector<std::uint8_t> seen(n, 0);
        for (std::uint32_t v : p) {
            if (v >= n || seen[v])
                throw std::invalid_argument(std::string("SparseBitMatrix: ") + what + " permutation not a bijection");
            seen[v] = 1;
        }
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::vector<std::uint32_t>> supports_;
    std::vector<std::uint32_t> row_perm_;
    std::vector<std::uint32_t> col_perm_;
};

// dst ^= src as sets: the support becomes the symmetric difference.
inline void xor_row(SparseBitMatrix& m, std::size_t src, std::size_t dst) {
    if (src == dst) throw std::invalid_argument("xor_row: src and dst must differ");
    const auto& a = m.row(dst);
    const auto& b = m.row(src);
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    m.mutable_row(dst) = std::move(out);
}

inline DenseBitMatrix to_dense(const SparseBitMatrix& m) {
    DenseBitMatrix d(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::uint32_t c : m.row(r)) d.set(r, c, true);
    return d;
}

// Rank by sparse elimination on copied supports. After column c is processed
// no unprocessed row contains a column <= c, so the pivot test is simply
// front() == c. Pivot choice (lowest row index) mirrors the dense routine.
inline std::size_t rank(const SparseBitMatrix& m) {
    std::vector<std::vector<std::uint32_t>> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));

    std::vector<std::uint8_t> used(rows.size(), 0);
    std::size_t rank = 0;
    std::vector<std::uint32_t> merged;
    for (std::uint32_t c = 0; c < m.cols(); ++c) {
        std::size_t pivot = npos;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!used[r] && !rows[r].empty() && rows[r].front() == c) { pivot = r; break; }
        }
        if (pivot == npos) continue;
        used[pivot] = 1;
        ++rank;
        for (std::size_t r = pivot + 1; r < rows.size(); ++r) {
            if (used[r] || rows[r].empty() || rows[r].front() != c) continue;
            merged.clear();
            std::set_symmetric_difference(rows[r].begin(), rows[r].end(),
                                          rows[pivot].begin(), rows[pivot].end(),
                                          std::back_inserter(merged));
            rows[r] = merged;
        }
    }
    return rank;
}

}  // namespace ltkit::gf2
