#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simonlab/rng.hpp"

namespace simonlab {

// A bit string over GF(2), packed into 64-bit words. Bit i of the string is
// bit (i % 64) of word (i / 64). Doubles as a GF(2) column vector and as the
// byte-free "bitstring" type used all over the Farfalle layer, so zero-length
// values are allowed (empty key, empty plaintext).
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

    static BitVector from_word(std::uint64_t bits, std::size_t len);
    // "1011": character k is bit k of the vector.
    static BitVector from_bit_string(std::string_view bits);
    // Hex encodes the bitstring byte-wise, bit i living in byte i/8 at
    // position i%8; len trims the trailing bits of the last byte.
    static BitVector from_hex(std::string_view hex, std::size_t len);
    static BitVector random(std::size_t len, Rng& rng);

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool bit(std::size_t i) const;
    void set_bit(std::size_t i, bool value);

    // Extracts count (<= 64) bits starting at pos as a word, LSB = bit pos.
    std::uint64_t bits_at(std::size_t pos, unsigned count) const;
    void set_bits(std::size_t pos, unsigned count, std::uint64_t value);
    // Whole vector as a word; requires size() <= 64.
    std::uint64_t as_word() const;

    std::size_t weight() const;
    bool is_zero() const;

    BitVector& operator^=(const BitVector& other);
    BitVector operator^(const BitVector& other) const;
    bool operator==(const BitVector& other) const;
    bool operator!=(const BitVector& other) const { return !(*this == other); }
    // Lexicographic on (length, words); for use as map keys.
    bool operator<(const BitVector& other) const;

    BitVector concat(const BitVector& tail) const;
    BitVector slice(std::size_t pos, std::size_t count) const;

    std::string to_bit_string() const;
    std::string to_hex() const;

private:
    static std::size_t word_count(std::size_t len) { return (len + 63) / 64; }
    void mask_top();

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

// Inner product over GF(2); lengths must match.
int dot(const BitVector& u, const BitVector& v);

// Incremental GF(2) row span of word-sized vectors (n <= 64). Used for the
// Simon sample span, where vectors are tiny and throughput matters.
class WordSpan {
public:
    explicit WordSpan(unsigned n) : n_(n) {}
    // Returns true when the vector increased the rank.
    bool add(std::uint64_t v);
    std::size_t rank() const { return basis_.size(); }
    unsigned dimension() const { return n_; }
    const std::vector<std::uint64_t>& basis() const { return basis_; }
    // Basis of {s : y.s = 0 for every y in the span}.
    std::vector<std::uint64_t> orthogonal_basis() const;

private:
    unsigned n_;
    std::vector<std::uint64_t> basis_;  // echelon form, descending leading bits
};

// Canonical (RREF, descending leading-bit order) basis of the span of rows.
std::vector<std::uint64_t> word_canonical_basis(const std::vector<std::uint64_t>& rows);

class BitMatrix {
public:
    BitMatrix(std::size_t rows, std::size_t cols);
    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(std::vector<BitVector> rows);
    // Column j of the result is columns[j].
    static BitMatrix from_columns(const std::vector<BitVector>& columns);
    static BitMatrix random(std::size_t rows, std::size_t cols, Rng& rng);
    static BitMatrix random_invertible(std::size_t n, Rng& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool at(std::size_t r, std::size_t c) const { return rows_data_[r].bit(c); }
    void set(std::size_t r, std::size_t c, bool v) { rows_data_[r].set_bit(c, v); }
    const BitVector& row(std::size_t r) const { return rows_data_[r]; }

    BitVector mul(const BitVector& v) const;
    BitMatrix mul(const BitMatrix& other) const;
    // M^e over GF(2); M must be square, M^0 = identity.
    BitMatrix pow(std::uint64_t exponent) const;
    BitMatrix transposed() const;
    BitMatrix operator^(const BitMatrix& other) const;
    bool operator==(const BitMatrix& other) const;

    std::size_t rank() const;
    bool invertible() const { return rows_ == cols_ && rank() == cols_; }
    BitMatrix inverse() const;

    // Basis of {v : Mv = 0} in the canonical order induced by the reduced
    // row echelon form (one vector per free column, ascending).
    std::vector<BitVector> null_space() const;

    struct SolutionSet {
        BitVector particular;
        std::vector<BitVector> null_basis;
        std::size_t rank = 0;
    };
    // Full affine solution set of Mx = b, or nullopt when inconsistent.
    std::optional<SolutionSet> solve_affine(const BitVector& b) const;

    // Stacks other's rows below this matrix (same column count).
    BitMatrix stacked(const BitMatrix& other) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BitVector> rows_data_;
};

}  // namespace simonlab
