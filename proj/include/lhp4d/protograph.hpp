#pragma once

// Quasi-cyclic protographs: matrices over the ring of circulants F2[x]/(x^L - 1),
// kept symbolic (integer shifts, L unspecified) until lifted to binary.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gf2.hpp"

namespace lhp4d {

// A sum of cyclic shifts, stored as a sorted set of exponents. Equal exponents
// cancel in pairs; exponents are reduced modulo L only when lifting.
class RingElement {
public:
    RingElement() = default;
    RingElement(std::initializer_list<std::int64_t> shifts) : RingElement(std::vector<std::int64_t>(shifts)) {}
    explicit RingElement(std::vector<std::int64_t> shifts) : shifts_(std::move(shifts)) { canonicalize(); }

    static RingElement zero() { return {}; }
    static RingElement one() { return RingElement{0}; }

    const std::vector<std::int64_t>& shifts() const { return shifts_; }
    bool is_zero() const { return shifts_.empty(); }
    std::size_t term_count() const { return shifts_.size(); }

    RingElement transposed() const {
        std::vector<std::int64_t> neg;
        neg.reserve(shifts_.size());
        for (auto s : shifts_) neg.push_back(-s);
        return RingElement(std::move(neg));
    }

    // Reduce exponents modulo L; distinct exponents may collide and cancel.
    RingElement reduced(std::size_t lift) const {
        std::vector<std::int64_t> r;
        r.reserve(shifts_.size());
        const auto l = static_cast<std::int64_t>(lift);
        for (auto s : shifts_) r.push_back(((s % l) + l) % l);
        return RingElement(std::move(r));
    }

    friend RingElement operator+(const RingElement& x, const RingElement& y) {
        std::vector<std::int64_t> out;
        std::set_symmetric_difference(x.shifts_.begin(), x.shifts_.end(), y.shifts_.begin(), y.shifts_.end(),
                                      std::back_inserter(out));
        RingElement r;
        r.shifts_ = std::move(out);
        return r;
    }

    friend RingElement operator*(const RingElement& x, const RingElement& y) {
        std::vector<std::int64_t> out;
        out.reserve(x.shifts_.size() * y.shifts_.size());
        for (auto a : x.shifts_) {
            for (auto b : y.shifts_) out.push_back(a + b);
        }
        return RingElement(std::move(out));
    }

    bool operator==(const RingElement&) const = default;

    std::string to_string() const {
        std::string s = "\xCE\xBB(";
        for (std::size_t i = 0; i < shifts_.size(); ++i) {
            if (i != 0) s += ',';
            s += std::to_string(shifts_[i]);
        }
        return s + ')';
    }

private:
    void canonicalize() {
        std::sort(shifts_.begin(), shifts_.end());
        std::vector<std::int64_t> kept;
        kept.reserve(shifts_.size());
        for (std::size_t i = 0; i < shifts_.size();) {
            std::size_t j = i;
            while (j < shifts_.size() && shifts_[j] == shifts_[i]) ++j;
            if ((j - i) % 2 == 1) kept.push_back(shifts_[i]);
            i = j;
        }
        shifts_ = std::move(kept);
    }

    std::vector<std::int64_t> shifts_;
};

inline RingElement ring_add(const RingElement& x, const RingElement& y) { return x + y; }
inline RingElement ring_mul(const RingElement& x, const RingElement& y) { return x * y; }

class Protograph {
public:
    Protograph() = default;
    Protograph(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}
    Protograph(std::size_t rows, std::size_t cols, std::vector<RingElement> cells)
        : rows_(rows), cols_(cols), cells_(std::move(cells)) {
        if (cells_.size() != rows_ * cols_) throw std::invalid_argument("protograph cell count does not match shape");
    }

    static Protograph from_rows(const std::vector<std::vector<RingElement>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        std::vector<RingElement> cells;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw std::invalid_argument("ragged protograph row " + std::to_string(r));
            cells.insert(cells.end(), rows[r].begin(), rows[r].end());
        }
        return {rows.size(), cols, std::move(cells)};
    }

    static Protograph identity(std::size_t n) {
        Protograph p(n, n);
        for (std::size_t i = 0; i < n; ++i) p.cells_[i * n + i] = RingElement::one();
        return p;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    const RingElement& at(std::size_t r, std::size_t c) const { return cells_.at(r * cols_ + c); }
    const RingElement& operator()(std::size_t r, std::size_t c) const { return at(r, c); }
    const std::vector<RingElement>& cells() const { return cells_; }

    Protograph transpose() const {
        Protograph t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) t.cells_[c * rows_ + r] = at(r, c).transposed();
        }
        return t;
    }

    Protograph submatrix(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
        if (r0 > r1 || r1 > rows_ || c0 > c1 || c1 > cols_) throw std::out_of_range("protograph submatrix out of range");
        Protograph s(r1 - r0, c1 - c0);
        for (std::size_t r = r0; r < r1; ++r) {
            for (std::size_t c = c0; c < c1; ++c) s.cells_[(r - r0) * s.cols_ + (c - c0)] = at(r, c);
        }
        return s;
    }

    bool is_zero() const {
        return std::all_of(cells_.begin(), cells_.end(), [](const RingElement& e) { return e.is_zero(); });
    }

    bool operator==(const Protograph&) const = default;

private:
    friend Protograph proto_matmul(const Protograph&, const Protograph&);
    friend Protograph proto_kron(const Protograph&, const Protograph&);
    friend Protograph operator+(const Protograph&, const Protograph&);
    friend Protograph proto_hstack(std::span<const Protograph>);
    friend Protograph proto_vstack(std::span<const Protograph>);

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<RingElement> cells_;
};

inline Protograph transpose(const Protograph& p) { return p.transpose(); }

inline Protograph operator+(const Protograph& a, const Protograph& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("protograph sum dimension mismatch");
    Protograph out(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.cells_.size(); ++i) out.cells_[i] = a.cells_[i] + b.cells_[i];
    return out;
}

inline Protograph proto_matmul(const Protograph& a, const Protograph& b) {
    if (a.cols_ != b.rows_) {
        throw std::invalid_argument("protograph product dimension mismatch: " + std::to_string(a.rows_) + "x" +
                                    std::to_string(a.cols_) + " times " + std::to_string(b.rows_) + "x" +
                                    std::to_string(b.cols_));
    }
    Protograph out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t j = 0; j < b.cols_; ++j) {
            RingElement acc;
            for (std::size_t k = 0; k < a.cols_; ++k) acc = acc + a.at(i, k) * b.at(k, j);
            out.cells_[i * b.cols_ + j] = std::move(acc);
        }
    }
    return out;
}

inline Protograph operator*(const Protograph& a, const Protograph& b) { return proto_matmul(a, b); }

// Tensor product over the ring: cell ((i,r),(j,c)) = a(i,j) * b(r,c). Block
// sizes multiply at the protograph level, so the lifted size stays linear in L.
inline Protograph proto_kron(const Protograph& a, const Protograph& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("kron of an empty protograph");
    Protograph out(a.rows_ * b.rows_, a.cols_ * b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t j = 0; j < a.cols_; ++j) {
            const RingElement& x = a.at(i, j);
            if (x.is_zero()) continue;
            for (std::size_t r = 0; r < b.rows_; ++r) {
                for (std::size_t c = 0; c < b.cols_; ++c) {
                    out.cells_[(i * b.rows_ + r) * out.cols_ + (j * b.cols_ + c)] = x * b.at(r, c);
                }
            }
        }
    }
    return out;
}

inline Protograph proto_hstack(std::span<const Protograph> blocks) {
    if (blocks.empty()) return {};
    const std::size_t rows = blocks.front().rows_;
    std::size_t cols = 0;
    for (const auto& b : blocks) {
        if (b.rows_ != rows) throw std::invalid_argument("protograph hstack row mismatch");
        cols += b.cols_;
    }
    Protograph out(rows, cols);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < b.cols_; ++c) out.cells_[r * cols + offset + c] = b.at(r, c);
        }
        offset += b.cols_;
    }
    return out;
}

inline Protograph proto_vstack(std::span<const Protograph> blocks) {
    if (blocks.empty()) return {};
    const std::size_t cols = blocks.front().cols_;
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        if (b.cols_ != cols) throw std::invalid_argument("protograph vstack column mismatch");
        rows += b.rows_;
    }
    Protograph out(rows, cols);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        std::copy(b.cells_.begin(), b.cells_.end(), out.cells_.begin() + static_cast<std::ptrdiff_t>(offset * cols));
        offset += b.rows_;
    }
    return out;
}

// The L x L matrix of a ring element: sum of identities shifted right by each exponent.
inline BinaryMatrix lift(const RingElement& x, std::size_t lift_size) {
    if (lift_size == 0) throw std::invalid_argument("lift size must be at least 1");
    std::vector<BitVector> rows(lift_size, BitVector(lift_size));
    const auto l = static_cast<std::int64_t>(lift_size);
    for (auto s : x.shifts()) {
        const auto shift = static_cast<std::size_t>(((s % l) + l) % l);
        for (std::size_t t = 0; t < lift_size; ++t) rows[t].flip((t + shift) % lift_size);
    }
    return {lift_size, std::move(rows)};
}

inline BinaryMatrix lift(const Protograph& p, std::size_t lift_size) {
    if (lift_size == 0) throw std::invalid_argument("lift size must be at least 1");
    const auto l = static_cast<std::int64_t>(lift_size);
    std::vector<BitVector> rows(p.rows() * lift_size, BitVector(p.cols() * lift_size));
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) {
            for (auto s : p.at(i, j).shifts()) {
                const auto shift = static_cast<std::size_t>(((s % l) + l) % l);
                for (std::size_t t = 0; t < lift_size; ++t) {
                    rows[i * lift_size + t].flip(j * lift_size + (t + shift) % lift_size);
                }
            }
        }
    }
    return {p.cols() * lift_size, std::move(rows)};
}

// Text grammar: rows separated by newlines or ';', cells by whitespace.
// cell := "λ(" int ("," int)* ")" | "λ()" | "0"; "L(...)" is an ASCII alias.
class ProtographParseError : public std::invalid_argument {
public:
    ProtographParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::invalid_argument("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column),
          message_(what) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    // The diagnostic without the location prefix.
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

namespace detail {

class ProtographParser {
public:
    explicit ProtographParser(std::string_view text) : text_(text) {}

    Protograph parse() {
        std::vector<std::vector<RingElement>> rows;
        std::vector<RingElement> current;
        std::size_t row_line = 1;
        auto finish_row = [&] {
            if (current.empty()) return;
            if (!rows.empty() && current.size() != rows.front().size()) {
                throw ProtographParseError(row_line, 1,
                                           "ragged row: " + std::to_string(current.size()) + " cells, expected " +
                                               std::to_string(rows.front().size()));
            }
            rows.push_back(std::move(current));
            current.clear();
        };
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (ch == '\n' || ch == ';') {
                finish_row();
                advance();
                row_line = line_;
                continue;
            }
            if (ch == ' ' || ch == '\t' || ch == '\r' || ch == ',' || ch == '[' || ch == ']') {
                advance();
                continue;
            }
            if (ch == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (current.empty()) row_line = line_;
            current.push_back(parse_cell());
        }
        finish_row();
        if (rows.empty()) throw ProtographParseError(line_, column_, "empty protograph");
        return Protograph::from_rows(rows);
    }

private:
    void advance(std::size_t count = 1) {
        for (std::size_t i = 0; i < count && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
                ++column_;
            }
            ++pos_;
        }
    }

    RingElement parse_cell() {
        const std::size_t cell_line = line_;
        const std::size_t cell_col = column_;
        if (text_.substr(pos_, 2) == "\xCE\xBB") {
            advance(2);
        } else if (text_[pos_] == 'L') {
            advance();
        } else if (text_[pos_] == '0') {
            advance();
            if (pos_ < text_.size() && !is_separator(text_[pos_])) {
                throw ProtographParseError(line_, column_, "unexpected character after 0");
            }
            return RingElement::zero();
        } else {
            throw ProtographParseError(cell_line, cell_col, "expected a cell of the form \xCE\xBB(...) or 0");
        }
        if (pos_ >= text_.size() || text_[pos_] != '(') throw ProtographParseError(line_, column_, "expected '('");
        advance();
        std::vector<std::int64_t> shifts;
        bool expect_value = false;
        while (true) {
            while (pos_ < text_.size() && text_[pos_] == ' ') advance();
            if (pos_ >= text_.size()) throw ProtographParseError(line_, column_, "unterminated cell");
            const char ch = text_[pos_];
            if (ch == ')') {
                if (expect_value) throw ProtographParseError(line_, column_, "trailing comma in cell");
                advance();
                break;
            }
            if (!shifts.empty() && !expect_value) {
                if (ch != ',') throw ProtographParseError(line_, column_, "expected ',' or ')'");
                advance();
                expect_value = true;
                continue;
            }
            shifts.push_back(parse_int());
            expect_value = false;
        }
        if (pos_ < text_.size() && !is_separator(text_[pos_])) {
            throw ProtographParseError(line_, column_, "unexpected character after cell");
        }
        return RingElement(std::move(shifts));
    }

    std::int64_t parse_int() {
        const std::size_t start_col = column_;
        std::string digits;
        if (text_[pos_] == '-' || text_[pos_] == '+') {
            digits += text_[pos_];
            advance();
        }
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            digits += text_[pos_];
            advance();
        }
        if (digits.empty() || digits == "-" || digits == "+") {
            throw ProtographParseError(line_, start_col, "expected an integer shift");
        }
        try {
            return std::stoll(digits);
        } catch (const std::out_of_range&) {
            throw ProtographParseError(line_, start_col, "shift out of range");
        }
    }

    static bool is_separator(char ch) {
        return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == ';' || ch == ',' || ch == ']';
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace detail

inline Protograph parse_protograph(std::string_view text) { return detail::ProtographParser(text).parse(); }

inline std::string render(const Protograph& p) {
    std::string out;
    for (std::size_t r = 0; r < p.rows(); ++r) {
        for (std::size_t c = 0; c < p.cols(); ++c) {
            if (c != 0) out += ' ';
            out += p.at(r, c).to_string();
        }
        out += '\n';
    }
    return out;
}

}  // namespace lhp4d
