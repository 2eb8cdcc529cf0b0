#include "simonlab/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace simonlab {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
}

}  // namespace

BitVector BitVector::from_word(std::uint64_t bits, std::size_t len) {
    if (len > 64) throw std::invalid_argument("from_word: len > 64");
    BitVector v(len);
    if (len > 0) {
        v.words_[0] = len == 64 ? bits : (bits & ((std::uint64_t{1} << len) - 1));
    }
    return v;
}

BitVector BitVector::from_bit_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bad bit char");
        v.set_bit(i, bits[i] == '1');
    }
    return v;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t len) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex length must be even");
    if (hex.size() * 4 < len) throw std::invalid_argument("hex too short for len");
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i) {
        const std::size_t byte = i / 8;
        const int value = hex_digit(hex[2 * byte]) * 16 + hex_digit(hex[2 * byte + 1]);
        v.set_bit(i, (value >> (i % 8)) & 1);
    }
    return v;
}

BitVector BitVector::random(std::size_t len, Rng& rng) {
    BitVector v(len);
    for (std::size_t w = 0; w < v.words_.size(); ++w) v.words_[w] = rng.next();
    v.mask_top();
    return v;
}

bool BitVector::bit(std::size_t i) const {
    if (i >= len_) throw std::out_of_range("BitVector::bit");
    return (words_[i / 64] >> (i % 64)) & 1;
}

void BitVector::set_bit(std::size_t i, bool value) {
    if (i >= len_) throw std::out_of_range("BitVector::set_bit");
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value) {
        words_[i / 64] |= mask;
    } else {
        words_[i / 64] &= ~mask;
    }
}

std::uint64_t BitVector::bits_at(std::size_t pos, unsigned count) const {
    if (count > 64) throw std::invalid_argument("bits_at: count > 64");
    if (pos + count > len_) throw std::out_of_range("bits_at");
    if (count == 0) return 0;
    const std::size_t w = pos / 64;
    const unsigned shift = pos % 64;
    std::uint64_t value = words_[w] >> shift;
    if (shift + count > 64) {
        value |= words_[w + 1] << (64 - shift);
    }
    return count == 64 ? value : (value & ((std::uint64_t{1} << count) - 1));
}

void BitVector::set_bits(std::size_t pos, unsigned count, std::uint64_t value) {
    if (count > 64) throw std::invalid_argument("set_bits: count > 64");
    if (pos + count > len_) throw std::out_of_range("set_bits");
    for (unsigned i = 0; i < count; ++i) {
        set_bit(pos + i, (value >> i) & 1);
    }
}

std::uint64_t BitVector::as_word() const {
    if (len_ > 64) throw std::invalid_argument("as_word: vector wider than 64 bits");
    return len_ == 0 ? 0 : words_[0];
}

std::size_t BitVector::weight() const {
    std::size_t total = 0;
    for (auto w : words_) total += std::popcount(w);
    return total;
}

bool BitVector::is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (len_ != other.len_) throw std::invalid_argument("xor: length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
}

BitVector BitVector::operator^(const BitVector& other) const {
    BitVector result = *this;
    result ^= other;
    return result;
}

bool BitVector::operator==(const BitVector& other) const {
    return len_ == other.len_ && words_ == other.words_;
}

bool BitVector::operator<(const BitVector& other) const {
    if (len_ != other.len_) return len_ < other.len_;
    return words_ < other.words_;
}

BitVector BitVector::concat(const BitVector& tail) const {
    BitVector result(len_ + tail.len_);
    result.words_ = words_;
    result.words_.resize(word_count(result.len_), 0);
    for (std::size_t i = 0; i < tail.len_; ++i) {
        result.set_bit(len_ + i, tail.bit(i));
    }
    return result;
}

BitVector BitVector::slice(std::size_t pos, std::size_t count) const {
    if (pos + count > len_) throw std::out_of_range("slice");
    BitVector result(count);
    std::size_t done = 0;
    while (done < count) {
        const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(64, count - done));
        result.set_bits(done, chunk, bits_at(pos + done, chunk));
        done += chunk;
    }
    return result;
}

std::string BitVector::to_bit_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i) {
        if (bit(i)) s[i] = '1';
    }
    return s;
}

std::string BitVector::to_hex() const {
    static const char* digits = "0123456789abcdef";
    const std::size_t bytes = (len_ + 7) / 8;
    std::string s;
    s.reserve(2 * bytes);
    for (std::size_t byte = 0; byte < bytes; ++byte) {
        int value = 0;
        for (std::size_t i = 0; i < 8 && byte * 8 + i < len_; ++i) {
            value |= bit(byte * 8 + i) << i;
        }
        s.push_back(digits[value >> 4]);
        s.push_back(digits[value & 15]);
    }
    return s;
}

void BitVector::mask_top() {
    if (len_ % 64 != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << (len_ % 64)) - 1;
    }
}

int dot(const BitVector& u, const BitVector& v) {
    if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
    int parity = 0;
    for (std::size_t i = 0; i < (u.size() + 63) / 64; ++i) {
        parity ^= std::popcount(u.bits_at(i * 64, static_cast<unsigned>(std::min<std::size_t>(64, u.size() - i * 64))) &
                                v.bits_at(i * 64, static_cast<unsigned>(std::min<std::size_t>(64, v.size() - i * 64)))) & 1;
    }
    return parity;
}

bool WordSpan::add(std::uint64_t v) {
    for (auto b : basis_) v = std::min(v, v ^ b);
    if (v == 0) return false;
    for (auto& b : basis_) b = std::min(b, b ^ v);
    basis_.push_back(v);
    std::sort(basis_.begin(), basis_.end(), std::greater<>());
    return true;
}

std::vector<std::uint64_t> WordSpan::orthogonal_basis() const {
    if (basis_.empty()) {
        std::vector<std::uint64_t> all;
        for (unsigned i = 0; i < n_; ++i) all.push_back(std::uint64_t{1} << i);
        return all;
    }
    std::vector<BitVector> rows;
    for (auto w : basis_) rows.push_back(BitVector::from_word(w, n_));
    std::vector<std::uint64_t> out;
    for (const auto& v : BitMatrix::from_rows(std::move(rows)).null_space()) {
        out.push_back(v.as_word());
    }
    return out;
}

std::vector<std::uint64_t> word_canonical_basis(const std::vector<std::uint64_t>& rows) {
    WordSpan span(64);
    for (auto r : rows) span.add(r);
    return span.basis();
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), rows_data_(rows, BitVector(cols)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("BitMatrix: empty shape");
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(std::vector<BitVector> rows) {
    if (rows.empty()) throw std::invalid_argument("from_rows: no rows");
    BitMatrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw std::invalid_argument("from_rows: ragged rows");
        m.rows_data_[r] = std::move(rows[r]);
    }
    return m;
}

BitMatrix BitMatrix::from_columns(const std::vector<BitVector>& columns) {
    if (columns.empty()) throw std::invalid_argument("from_columns: no columns");
    BitMatrix m(columns.front().size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != m.rows_) throw std::invalid_argument("from_columns: ragged columns");
        for (std::size_t r = 0; r < m.rows_; ++r) m.set(r, c, columns[c].bit(r));
    }
    return m;
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    for (auto& row : m.rows_data_) row = BitVector::random(cols, rng);
    return m;
}

BitMatrix BitMatrix::random_invertible(std::size_t n, Rng& rng) {
    for (;;) {
        BitMatrix m = random(n, n, rng);
        if (m.invertible()) return m;
    }
}

BitVector BitMatrix::mul(const BitVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("mul: shape mismatch");
    BitVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out.set_bit(r, dot(rows_data_[r], v));
    }
    return out;
}

BitMatrix BitMatrix::mul(const BitMatrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("mul: shape mismatch");
    BitMatrix out(rows_, other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        BitVector acc(other.cols_);
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(r, k)) acc ^= other.rows_data_[k];
        }
        out.rows_data_[r] = std::move(acc);
    }
    return out;
}

BitMatrix BitMatrix::pow(std::uint64_t exponent) const {
    if (rows_ != cols_) throw std::invalid_argument("pow: matrix not square");
    BitMatrix result = identity(rows_);
    BitMatrix base = *this;
    while (exponent > 0) {
        if (exponent & 1) result = result.mul(base);
        exponent >>= 1;
        if (exponent > 0) base = base.mul(base);
    }
    return result;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (at(r, c)) out.set(c, r, true);
        }
    }
    return out;
}

BitMatrix BitMatrix::operator^(const BitMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("xor: shape mismatch");
    }
    BitMatrix out = *this;
    for (std::size_t r = 0; r < rows_; ++r) out.rows_data_[r] ^= other.rows_data_[r];
    return out;
}

bool BitMatrix::operator==(const BitMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && rows_data_ == other.rows_data_;
}

namespace {

// Reduced row echelon form with deterministic leftmost pivots.
struct Rref {
    std::vector<BitVector> rows;
    std::vector<std::size_t> pivot_cols;
};

Rref reduce(std::vector<BitVector> rows, std::size_t cols) {
    Rref result;
    std::size_t next_row = 0;
    for (std::size_t col = 0; col < cols && next_row < rows.size(); ++col) {
        std::size_t pivot = next_row;
        while (pivot < rows.size() && !rows[pivot].bit(col)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[next_row], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != next_row && rows[r].bit(col)) rows[r] ^= rows[next_row];
        }
        result.pivot_cols.push_back(col);
        ++next_row;
    }
    rows.resize(next_row, BitVector(cols));
    result.rows = std::move(rows);
    return result;
}

}  // namespace

std::size_t BitMatrix::rank() const {
    return reduce(rows_data_, cols_).pivot_cols.size();
}

std::vector<BitVector> BitMatrix::null_space() const {
    const Rref rref = reduce(rows_data_, cols_);
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : rref.pivot_cols) is_pivot[c] = true;

    std::vector<BitVector> basis;
    for (std::size_t free_col = 0; free_col < cols_; ++free_col) {
        if (is_pivot[free_col]) continue;
        BitVector v(cols_);
        v.set_bit(free_col, true);
        for (std::size_t r = 0; r < rref.pivot_cols.size(); ++r) {
            if (rref.rows[r].bit(free_col)) v.set_bit(rref.pivot_cols[r], true);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitMatrix::SolutionSet> BitMatrix::solve_affine(const BitVector& b) const {
    if (b.size() != rows_) throw std::invalid_argument("solve_affine: rhs length mismatch");

    // Eliminate on the augmented system [M | b].
    std::vector<BitVector> aug;
    aug.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        BitVector row = rows_data_[r].concat(BitVector::from_word(b.bit(r), 1));
        aug.push_back(std::move(row));
    }
    const Rref rref = reduce(std::move(aug), cols_ + 1);
    std::vector<std::size_t> pivots;
    for (auto c : rref.pivot_cols) {
        if (c == cols_) return std::nullopt;  // pivot in the rhs column: inconsistent
        pivots.push_back(c);
    }

    SolutionSet solution;
    solution.rank = pivots.size();
    solution.particular = BitVector(cols_);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        solution.particular.set_bit(pivots[r], rref.rows[r].bit(cols_));
    }
    solution.null_basis = null_space();
    return solution;
}

BitMatrix BitMatrix::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("inverse: matrix not square");
    std::vector<BitVector> aug;
    aug.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        BitVector ident(cols_);
        ident.set_bit(r, true);
        aug.push_back(rows_data_[r].concat(ident));
    }
    const Rref rref = reduce(std::move(aug), 2 * cols_);
    if (rref.pivot_cols.size() < cols_ || rref.pivot_cols[cols_ - 1] != cols_ - 1) {
        throw std::invalid_argument("inverse: matrix is singular");
    }
    BitMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out.rows_data_[r] = rref.rows[r].slice(cols_, cols_);
    }
    return out;
}

BitMatrix BitMatrix::stacked(const BitMatrix& other) const {
    if (cols_ != other.cols_) throw std::invalid_argument("stacked: column mismatch");
    std::vector<BitVector> rows = rows_data_;
    rows.insert(rows.end(), other.rows_data_.begin(), other.rows_data_.end());
    return from_rows(std::move(rows));
}

}  // namespace simonlab
