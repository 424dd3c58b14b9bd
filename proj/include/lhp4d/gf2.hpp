#pragma once

// Linear algebra over GF(2): packed bit vectors, dense bit-packed matrices,
// sparse adjacency views and row reduction (rank, kernel, solve).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lhp4d {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

    static BitVector from_string(std::string_view bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                v.set(i);
            } else if (bits[i] != '0') {
                throw std::invalid_argument("bit string contains '" + std::string(1, bits[i]) + "' at position " +
                                            std::to_string(i));
            }
        }
        return v;
    }

    static BitVector from_support(std::size_t size, std::span<const std::size_t> support) {
        BitVector v(size);
        for (auto i : support) v.flip(i);
        return v;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    bool operator[](std::size_t i) const { return get(i); }

    void set(std::size_t i, bool value = true) {
        const Word mask = Word{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= mask;
        } else {
            words_[i / kWordBits] &= ~mask;
        }
    }
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

    std::size_t weight() const {
        std::size_t w = 0;
        for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
        return w;
    }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
    }
    bool none() const { return !any(); }

    // Parity of the overlap with another vector of the same length.
    bool dot(const BitVector& other) const {
        require_same_size(other);
        Word acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return (std::popcount(acc) & 1) != 0;
    }

    BitVector& operator^=(const BitVector& other) {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }
    BitVector& operator&=(const BitVector& other) {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    friend BitVector operator+(BitVector a, const BitVector& b) { return a ^= b; }

    bool operator==(const BitVector& other) const = default;

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word word = words_[w];
            while (word != 0) {
                out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
        return out;
    }

    // First set index at or after `from`, or size() when there is none.
    std::size_t find_next(std::size_t from) const {
        if (from >= size_) return size_;
        std::size_t w = from / kWordBits;
        Word word = words_[w] & (~Word{0} << (from % kWordBits));
        while (true) {
            if (word != 0) return std::min(size_, w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
            if (++w == words_.size()) return size_;
            word = words_[w];
        }
    }

    BitVector slice(std::size_t begin, std::size_t end) const {
        BitVector out(end - begin);
        for (auto i = find_next(begin); i < end; i = find_next(i + 1)) out.set(i - begin);
        return out;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

    std::span<const Word> words() const { return words_; }
    std::span<Word> words() { return words_; }

private:
    void require_same_size(const BitVector& other) const {
        if (other.size_ != size_) {
            throw std::invalid_argument("bit vector length mismatch: " + std::to_string(size_) + " vs " +
                                        std::to_string(other.size_));
        }
    }

    std::size_t size_ = 0;
    std::vector<Word> words_;
};

inline BitVector concat(const BitVector& a, const BitVector& b) {
    BitVector out(a.size() + b.size());
    for (auto i : a.support()) out.set(i);
    for (auto i : b.support()) out.set(a.size() + i);
    return out;
}

// Dense GF(2) matrix, one packed BitVector per row. Values are not modified
// after construction; every transformation returns a new matrix.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows, BitVector(cols)) {}

    BinaryMatrix(std::size_t cols, std::vector<BitVector> rows) : rows_(rows.size()), cols_(cols), data_(std::move(rows)) {
        for (std::size_t r = 0; r < data_.size(); ++r) {
            if (data_[r].size() != cols_) {
                throw std::invalid_argument("row " + std::to_string(r) + " has " + std::to_string(data_[r].size()) +
                                            " columns, expected " + std::to_string(cols_));
            }
        }
    }

    static BinaryMatrix identity(std::size_t n) {
        std::vector<BitVector> rows(n, BitVector(n));
        for (std::size_t i = 0; i < n; ++i) rows[i].set(i);
        return {n, std::move(rows)};
    }

    static BinaryMatrix from_dense(const std::vector<std::vector<int>>& entries) {
        const std::size_t cols = entries.empty() ? 0 : entries.front().size();
        std::vector<BitVector> rows;
        rows.reserve(entries.size());
        for (std::size_t r = 0; r < entries.size(); ++r) {
            if (entries[r].size() != cols) throw std::invalid_argument("ragged row " + std::to_string(r));
            BitVector row(cols);
            for (std::size_t c = 0; c < cols; ++c) {
                if (entries[r][c] != 0 && entries[r][c] != 1) {
                    throw std::invalid_argument("entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not 0/1");
                }
                row.set(c, entries[r][c] == 1);
            }
            rows.push_back(std::move(row));
        }
        return {cols, std::move(rows)};
    }

    static BinaryMatrix from_row_supports(std::size_t rows, std::size_t cols,
                                          const std::vector<std::vector<std::size_t>>& supports) {
        if (supports.size() != rows) throw std::invalid_argument("support list does not match row count");
        std::vector<BitVector> data;
        data.reserve(rows);
        for (const auto& s : supports) {
            for (auto c : s) {
                if (c >= cols) throw std::out_of_range("column index " + std::to_string(c) + " out of range");
            }
            data.push_back(BitVector::from_support(cols, s));
        }
        return {cols, std::move(data)};
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
    bool operator()(std::size_t r, std::size_t c) const { return get(r, c); }
    const BitVector& row(std::size_t r) const { return data_[r]; }
    const std::vector<BitVector>& row_data() const { return data_; }

    BitVector column(std::size_t c) const {
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (data_[r].get(c)) out.set(r);
        }
        return out;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const BitVector& r) { return r.none(); });
    }

    std::size_t nnz() const {
        std::size_t total = 0;
        for (const auto& r : data_) total += r.weight();
        return total;
    }

    BinaryMatrix transpose() const {
        std::vector<BitVector> out(cols_, BitVector(rows_));
        for (std::size_t r = 0; r < rows_; ++r) {
            for (auto c : data_[r].support()) out[c].set(r);
        }
        return {rows_, std::move(out)};
    }

    // Matrix-vector product over GF(2).
    BitVector operator*(const BitVector& v) const {
        if (v.size() != cols_) {
            throw std::invalid_argument("matrix-vector dimension mismatch: " + std::to_string(rows_) + "x" +
                                        std::to_string(cols_) + " times length " + std::to_string(v.size()));
        }
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (data_[r].dot(v)) out.set(r);
        }
        return out;
    }

    BinaryMatrix with_flipped(std::size_t r, std::size_t c) const {
        BinaryMatrix out = *this;
        out.data_.at(r).flip(c);
        return out;
    }

    BinaryMatrix column_slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > cols_) throw std::out_of_range("column slice out of range");
        std::vector<BitVector> out;
        out.reserve(rows_);
        for (const auto& r : data_) out.push_back(r.slice(begin, end));
        return {end - begin, std::move(out)};
    }

    BinaryMatrix row_slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > rows_) throw std::out_of_range("row slice out of range");
        return {cols_, std::vector<BitVector>(data_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              data_.begin() + static_cast<std::ptrdiff_t>(end))};
    }

    BinaryMatrix permute_columns(std::span<const std::size_t> order) const {
        if (order.size() != cols_) throw std::invalid_argument("column permutation has wrong length");
        std::vector<BitVector> out(rows_, BitVector(cols_));
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if (data_[r].get(order[j])) out[r].set(j);
            }
        }
        return {cols_, std::move(out)};
    }

    std::vector<std::size_t> row_weights() const {
        std::vector<std::size_t> w;
        w.reserve(rows_);
        for (const auto& r : data_) w.push_back(r.weight());
        return w;
    }

    std::vector<std::size_t> column_weights() const {
        std::vector<std::size_t> w(cols_, 0);
        for (const auto& r : data_) {
            for (auto c : r.support()) ++w[c];
        }
        return w;
    }

    bool operator==(const BinaryMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BitVector> data_;
};

inline BinaryMatrix operator+(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix sum dimension mismatch: " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
    std::vector<BitVector> rows;
    rows.reserve(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) rows.push_back(a.row(r) ^ b.row(r));
    return {a.cols(), std::move(rows)};
}

// Row i of the product is the XOR of the rows of b selected by row i of a.
inline BinaryMatrix matmul(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul dimension mismatch: " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
    std::vector<BitVector> rows(a.rows(), BitVector(b.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (auto k : a.row(i).support()) rows[i] ^= b.row(k);
    }
    return {b.cols(), std::move(rows)};
}

inline BinaryMatrix operator*(const BinaryMatrix& a, const BinaryMatrix& b) { return matmul(a, b); }

inline BinaryMatrix kron(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("kron of an empty matrix");
    const std::size_t cols = a.cols() * b.cols();
    std::vector<BitVector> rows(a.rows() * b.rows(), BitVector(cols));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (auto j : a.row(i).support()) {
            for (std::size_t r = 0; r < b.rows(); ++r) {
                for (auto c : b.row(r).support()) rows[i * b.rows() + r].set(j * b.cols() + c);
            }
        }
    }
    return {cols, std::move(rows)};
}

inline BinaryMatrix hstack(std::span<const BinaryMatrix> blocks) {
    if (blocks.empty()) return {};
    const std::size_t rows = blocks.front().rows();
    std::size_t cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) throw std::invalid_argument("hstack row mismatch");
        cols += b.cols();
    }
    std::vector<BitVector> out(rows, BitVector(cols));
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (auto c : b.row(r).support()) out[r].set(offset + c);
        }
        offset += b.cols();
    }
    return {cols, std::move(out)};
}

inline BinaryMatrix hstack(const BinaryMatrix& a, const BinaryMatrix& b) {
    const BinaryMatrix parts[] = {a, b};
    return hstack(parts);
}

inline BinaryMatrix vstack(std::span<const BinaryMatrix> blocks) {
    if (blocks.empty()) return {};
    const std::size_t cols = blocks.front().cols();
    std::vector<BitVector> out;
    for (const auto& b : blocks) {
        if (b.cols() != cols) throw std::invalid_argument("vstack column mismatch");
        out.insert(out.end(), b.row_data().begin(), b.row_data().end());
    }
    return {cols, std::move(out)};
}

inline BinaryMatrix vstack(const BinaryMatrix& a, const BinaryMatrix& b) {
    const BinaryMatrix parts[] = {a, b};
    return vstack(parts);
}

// Row reduction to reduced echelon form. Columns are scanned left to right and
// the first row with a nonzero entry in the current column is the pivot. When
// `rhs` is given its bits follow the row swaps and row additions.
struct Echelon {
    std::vector<BitVector> rows;
    std::vector<std::size_t> pivot_cols;
    BitVector rhs;
    std::size_t cols = 0;

    std::size_t rank() const { return pivot_cols.size(); }
};

inline Echelon row_reduce(std::vector<BitVector> rows, std::size_t cols, std::optional<BitVector> rhs = std::nullopt,
                          std::size_t max_rank = static_cast<std::size_t>(-1)) {
    Echelon e;
    e.cols = cols;
    BitVector b = rhs.value_or(BitVector(rows.size()));
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size() && r < max_rank; ++c) {
        std::size_t pivot = r;
        while (pivot < rows.size() && !rows[pivot].get(c)) ++pivot;
        if (pivot == rows.size()) continue;
        if (pivot != r) {
            std::swap(rows[pivot], rows[r]);
            const bool tmp = b.get(pivot);
            b.set(pivot, b.get(r));
            b.set(r, tmp);
        }
        const bool rb = b.get(r);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != r && rows[i].get(c)) {
                rows[i] ^= rows[r];
                if (rb) b.flip(i);
            }
        }
        e.pivot_cols.push_back(c);
        ++r;
    }
    e.rows = std::move(rows);
    e.rhs = std::move(b);
    return e;
}

inline Echelon row_reduce(const BinaryMatrix& m, std::optional<BitVector> rhs = std::nullopt) {
    return row_reduce(m.row_data(), m.cols(), std::move(rhs));
}

inline std::size_t rank(const BinaryMatrix& m) { return row_reduce(m).rank(); }

inline std::size_t rank(std::vector<BitVector> rows, std::size_t cols) { return row_reduce(std::move(rows), cols).rank(); }

// Rows span {x : m x = 0}; one basis vector per free column.
inline BinaryMatrix nullspace_basis(const BinaryMatrix& m) {
    const Echelon e = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVector x(m.cols());
        x.set(f);
        for (std::size_t i = 0; i < e.rank(); ++i) {
            if (e.rows[i].get(f)) x.set(e.pivot_cols[i]);
        }
        basis.push_back(std::move(x));
    }
    return {m.cols(), std::move(basis)};
}

// Some x with m x = s, or nullopt when s is outside the column space.
inline std::optional<BitVector> solve(const BinaryMatrix& m, const BitVector& s) {
    if (s.size() != m.rows()) {
        throw std::invalid_argument("solve: syndrome length " + std::to_string(s.size()) + " != rows " +
                                    std::to_string(m.rows()));
    }
    const Echelon e = row_reduce(m, s);
    for (std::size_t i = e.rank(); i < m.rows(); ++i) {
        if (e.rhs.get(i)) return std::nullopt;
    }
    BitVector x(m.cols());
    for (std::size_t i = 0; i < e.rank(); ++i) {
        if (e.rhs.get(i)) x.set(e.pivot_cols[i]);
    }
    return x;
}

// Row and column adjacency lists, used by message passing.
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(const BinaryMatrix& m) : rows_(m.rows()), cols_(m.cols()), row_adj_(m.rows()), col_adj_(m.cols()) {
        for (std::size_t r = 0; r < rows_; ++r) {
            row_adj_[r] = m.row(r).support();
            for (auto c : row_adj_[r]) col_adj_[c].push_back(r);
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<std::size_t>& row(std::size_t r) const { return row_adj_[r]; }
    const std::vector<std::size_t>& col(std::size_t c) const { return col_adj_[c]; }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (const auto& r : row_adj_) n += r.size();
        return n;
    }

    BinaryMatrix to_dense() const { return BinaryMatrix::from_row_supports(rows_, cols_, row_adj_); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::vector<std::size_t>> row_adj_;
    std::vector<std::vector<std::size_t>> col_adj_;
};

// Text format: "rows cols" on the first line, then one line of 0/1 characters per row.
inline void write_matrix(std::ostream& out, const BinaryMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) out << m.row(r).to_string() << '\n';
}

inline std::string to_text(const BinaryMatrix& m) {
    std::ostringstream os;
    write_matrix(os, m);
    return os.str();
}

inline BinaryMatrix read_matrix(std::istream& in) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string header;
    while (header.empty() && std::getline(in, header)) {
    }
    std::istringstream hs(header);
    if (!(hs >> rows >> cols)) throw std::invalid_argument("matrix header must be 'rows cols', got '" + header + "'");
    std::vector<BitVector> data;
    data.reserve(rows);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw std::invalid_argument("matrix truncated at row " + std::to_string(r));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() != cols) {
            throw std::invalid_argument("matrix row " + std::to_string(r) + " has " + std::to_string(line.size()) +
                                        " characters, expected " + std::to_string(cols));
        }
        data.push_back(BitVector::from_string(line));
    }
    return {cols, std::move(data)};
}

inline BinaryMatrix from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    return read_matrix(is);
}

}  // namespace lhp4d
