#include "simonlab/farfalle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "simonlab/gf2e.hpp"

namespace simonlab {

Permutation Permutation::random(unsigned bits, Rng& rng) {
    if (bits == 0 || bits > 20) throw std::invalid_argument("Permutation: bits out of range");
    std::vector<std::uint32_t> table(std::size_t{1} << bits);
    for (std::uint32_t i = 0; i < table.size(); ++i) table[i] = i;
    shuffle(table, rng);
    return from_table(bits, std::move(table));
}

Permutation Permutation::from_table(unsigned bits, std::vector<std::uint32_t> table) {
    Permutation p;
    p.bits_ = bits;
    p.fwd_ = std::move(table);
    if (p.fwd_.size() != (std::size_t{1} << bits)) {
        throw std::invalid_argument("Permutation: table size mismatch");
    }
    p.inv_.assign(p.fwd_.size(), 0);
    std::vector<bool> seen(p.fwd_.size(), false);
    for (std::uint32_t x = 0; x < p.fwd_.size(); ++x) {
        const std::uint32_t y = p.fwd_[x];
        if (y >= p.fwd_.size() || seen[y]) throw std::invalid_argument("Permutation: not a bijection");
        seen[y] = true;
        p.inv_[y] = x;
    }
    return p;
}

std::uint64_t primitive_polynomial(unsigned degree) {
    return gf2poly::least_primitive(degree);
}

RollFunction RollFunction::lfsr(unsigned bits) {
    const std::uint64_t poly = primitive_polynomial(bits);
    RollFunction roll(Kind::Linear, bits);
    roll.columns_.resize(bits);
    roll.matrix_cols_.reserve(bits);
    for (unsigned j = 0; j < bits; ++j) {
        // Multiplication by x modulo the primitive polynomial: the defining
        // matrix is the companion matrix of the polynomial.
        std::uint64_t image = std::uint64_t{1} << (j + 1);
        if (j + 1 == bits) image = poly ^ (std::uint64_t{1} << bits);
        roll.columns_[j] = image;
        roll.matrix_cols_.push_back(BitVector::from_word(image, bits));
    }
    return roll;
}

RollFunction RollFunction::linear(const BitMatrix& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() > 24) {
        throw std::invalid_argument("RollFunction: matrix must be square");
    }
    if (!matrix.invertible()) throw std::invalid_argument("RollFunction: matrix must be invertible");
    const unsigned bits = static_cast<unsigned>(matrix.rows());
    RollFunction roll(Kind::Linear, bits);
    roll.columns_.resize(bits);
    roll.matrix_cols_.reserve(bits);
    for (unsigned j = 0; j < bits; ++j) {
        std::uint64_t column = 0;
        for (unsigned i = 0; i < bits; ++i) {
            if (matrix.at(i, j)) column |= std::uint64_t{1} << i;
        }
        roll.columns_[j] = column;
        roll.matrix_cols_.push_back(BitVector::from_word(column, bits));
    }
    return roll;
}

RollFunction RollFunction::table(Permutation perm) {
    RollFunction roll(Kind::Table, perm.bits());
    roll.perm_ = std::move(perm);
    return roll;
}

BitMatrix RollFunction::matrix() const {
    if (kind_ != Kind::Linear || bits_ == 0) {
        throw std::logic_error("RollFunction::matrix: not a linear roll");
    }
    return BitMatrix::from_columns(matrix_cols_);
}

std::uint64_t RollFunction::apply(std::uint64_t x) const {
    if (bits_ == 0) throw std::logic_error("RollFunction: uninitialized");
    if (kind_ == Kind::Table) return perm_(x);
    std::uint64_t y = 0;
    std::uint64_t v = x;
    while (v != 0) {
        const int j = std::countr_zero(v);
        y ^= columns_[j];
        v &= v - 1;
    }
    return y;
}

std::uint64_t RollFunction::iterate(std::uint64_t x, unsigned count) const {
    for (unsigned i = 0; i < count; ++i) x = apply(x);
    return x;
}

FarfalleParams FarfalleParams::seeded(unsigned b, std::uint64_t seed, RollKind roll,
                                      bool blank_index_mode) {
    if (b < kMinBlockBits || b > kMaxBlockBits) {
        throw std::invalid_argument("FarfalleParams: block size out of range");
    }
    std::uint64_t state = seed;
    FarfalleParams params;
    params.b = b;
    for (Permutation* p : {&params.p_b, &params.p_c, &params.p_d, &params.p_e}) {
        Rng rng(splitmix64(state));
        *p = Permutation::random(b, rng);
    }
    if (roll == RollKind::Linear) {
        params.roll_c = RollFunction::lfsr(b);
        params.roll_e = RollFunction::lfsr(b);
    } else {
        Rng rc(splitmix64(state));
        Rng re(splitmix64(state));
        params.roll_c = RollFunction::table(Permutation::random(b, rc));
        params.roll_e = RollFunction::table(Permutation::random(b, re));
    }
    params.blank_index_mode = blank_index_mode;
    return params;
}

FarfalleKeyState FarfalleKeyState::derive(const FarfalleParams& params, BitVector key) {
    if (key.size() > params.b - 1) {
        throw std::invalid_argument("FarfalleKeyState: |K| must be at most b-1");
    }
    const BitVector padded = pad10star(key, params.b);
    FarfalleKeyState state;
    state.key = std::move(key);
    state.mask = params.p_b(padded.as_word());
    return state;
}

BitVector recover_key_from_mask(const FarfalleParams& params, std::uint64_t mask) {
    const BitVector padded = BitVector::from_word(params.p_b.inverse(mask), params.b);
    return strip_pad10star(padded);
}

BitVector pad10star(const BitVector& s, unsigned block_bits) {
    if (block_bits == 0) throw std::invalid_argument("pad10star: zero block size");
    const std::size_t padded_len = ((s.size() + 1 + block_bits - 1) / block_bits) * block_bits;
    BitVector out(padded_len);
    for (std::size_t i = 0; i < s.size(); ++i) out.set_bit(i, s.bit(i));
    out.set_bit(s.size(), true);
    return out;
}

BitVector strip_pad10star(const BitVector& padded) {
    std::size_t i = padded.size();
    while (i > 0 && !padded.bit(i - 1)) --i;
    if (i == 0) throw std::invalid_argument("strip_pad10star: no padding marker");
    return padded.slice(0, i - 1);
}

namespace {

struct Compressed {
    std::uint64_t accumulator = 0;
    std::uint64_t rolled_mask = 0;  // roll_c^I(k) after all blocks
};

Compressed compress(const FarfalleParams& params, const FarfalleKeyState& key,
                    const MessageSequence& message) {
    if (message.empty()) throw std::invalid_argument("farfalle: empty string sequence");
    const unsigned b = params.b;
    Compressed result;
    result.rolled_mask = key.mask;
    for (const auto& s : message) {
        const BitVector padded = pad10star(s, b);
        const std::size_t blocks = padded.size() / b;
        for (std::size_t i = 0; i < blocks; ++i) {
            const std::uint64_t block = padded.bits_at(i * b, b);
            result.accumulator ^= params.p_c(block ^ result.rolled_mask);
            result.rolled_mask = params.roll_c.apply(result.rolled_mask);
        }
        if (params.blank_index_mode) {
            // Skip the blank index between strings.
            result.rolled_mask = params.roll_c.apply(result.rolled_mask);
        }
    }
    return result;
}

}  // namespace

std::uint64_t farfalle_accumulator(const FarfalleParams& params, const FarfalleKeyState& key,
                                   const MessageSequence& message) {
    return compress(params, key, message).accumulator;
}

BitVector farfalle(const FarfalleParams& params, const FarfalleKeyState& key,
                   const MessageSequence& message, std::size_t out_bits, std::size_t offset) {
    if (out_bits == 0) throw std::invalid_argument("farfalle: output length must be positive");
    const Compressed compressed = compress(params, key, message);
    const unsigned b = params.b;
    std::uint64_t y = params.p_d(compressed.accumulator);
    const std::size_t total = offset + out_bits;
    const std::size_t blocks = (total + b - 1) / b;
    BitVector stream(blocks * b);
    for (std::size_t j = 0; j < blocks; ++j) {
        stream.set_bits(j * b, b, params.p_e(y) ^ compressed.rolled_mask);
        y = params.roll_e.apply(y);
    }
    return stream.slice(offset, out_bits);
}

SaeSession::SaeSession(const FarfallePrf& prf, const BitVector& nonce, unsigned tag_bits,
                       unsigned align_unit)
    : prf_(&prf), tag_bits_(tag_bits) {
    if (tag_bits == 0 || align_unit == 0) {
        throw std::invalid_argument("SaeSession: tag and alignment unit must be positive");
    }
    offset_ = align_unit * ((tag_bits + align_unit - 1) / align_unit);
    history_.push_back(nonce);
    init_tag_ = tag_over(history_);
}

BitVector SaeSession::tag_over(const MessageSequence& history) const {
    return (*prf_)(history, tag_bits_, 0);
}

std::pair<BitVector, BitVector> SaeSession::wrap(const BitVector& meta,
                                                 const BitVector& plaintext) {
    BitVector ciphertext = plaintext;
    if (!plaintext.empty()) {
        ciphertext ^= (*prf_)(history_, plaintext.size(), offset_);
    }
    const BitVector zero_bit = BitVector::from_word(0, 1);
    const BitVector one_bit = BitVector::from_word(1, 1);
    if (!meta.empty() || plaintext.empty()) {
        history_.push_back(meta.concat(zero_bit));
    }
    if (!plaintext.empty()) {
        history_.push_back(ciphertext.concat(one_bit));
    }
    return {ciphertext, tag_over(history_)};
}

std::optional<BitVector> SaeSession::unwrap(const BitVector& meta, const BitVector& ciphertext,
                                            const BitVector& tag) {
    BitVector plaintext = ciphertext;
    if (!ciphertext.empty()) {
        plaintext ^= (*prf_)(history_, ciphertext.size(), offset_);
    }
    MessageSequence updated = history_;
    const BitVector zero_bit = BitVector::from_word(0, 1);
    const BitVector one_bit = BitVector::from_word(1, 1);
    if (!meta.empty() || plaintext.empty()) {
        updated.push_back(meta.concat(zero_bit));
    }
    if (!ciphertext.empty()) {
        updated.push_back(ciphertext.concat(one_bit));
    }
    if (tag.size() != tag_bits_ || tag_over(updated) != tag) return std::nullopt;
    history_ = std::move(updated);
    return plaintext;
}

std::pair<BitVector, BitVector> siv_wrap(const FarfallePrf& prf, const BitVector& meta,
                                         const BitVector& plaintext, unsigned tag_bits) {
    // T = F(P o A): the metadata is compressed first.
    const BitVector tag = prf({meta, plaintext}, tag_bits, 0);
    BitVector ciphertext = plaintext;
    if (!plaintext.empty()) {
        ciphertext ^= prf({meta, tag}, plaintext.size(), 0);
    }
    return {ciphertext, tag};
}

std::optional<BitVector> siv_unwrap(const FarfallePrf& prf, const BitVector& meta,
                                    const BitVector& ciphertext, const BitVector& tag,
                                    unsigned tag_bits) {
    if (tag.size() != tag_bits) return std::nullopt;
    BitVector plaintext = ciphertext;
    if (!ciphertext.empty()) {
        plaintext ^= prf({meta, tag}, ciphertext.size(), 0);
    }
    if (prf({meta, plaintext}, tag_bits, 0) != tag) return std::nullopt;
    return plaintext;
}

namespace {

struct WbcBranches {
    BitVector left, right;
};

WbcBranches wbc_split(const FarfallePrf& prf, const BitVector& text, unsigned ell) {
    const unsigned b = prf.params().b;
    if (ell == 0) ell = b;
    if (text.size() < 2 * b) throw std::invalid_argument("wbc: input below minimum length");
    const std::size_t split = ell * ((text.size() + 2 * ell - 1) / (2 * ell));
    if (split == 0 || split >= text.size()) {
        throw std::invalid_argument("wbc: split leaves an empty branch");
    }
    return {text.slice(0, split), text.slice(split, text.size() - split)};
}

void xor_prefix(BitVector& branch, const BitVector& addend) {
    for (std::size_t i = 0; i < addend.size(); ++i) {
        branch.set_bit(i, branch.bit(i) ^ addend.bit(i));
    }
}

}  // namespace

BitVector wbc_encipher(const FarfallePrf& prf, const BitVector& tweak,
                       const BitVector& plaintext, unsigned ell) {
    const unsigned b = prf.params().b;
    auto [left, right] = wbc_split(prf, plaintext, ell);
    const BitVector zero_bit = BitVector::from_word(0, 1);
    const BitVector one_bit = BitVector::from_word(1, 1);

    const auto h = [&](const BitVector& x, std::size_t bits) { return prf({x}, bits); };
    const auto g = [&](const BitVector& x, std::size_t bits) { return prf({tweak, x}, bits); };

    xor_prefix(right, h(left.concat(zero_bit), std::min<std::size_t>(b, right.size())));
    left ^= g(right.concat(one_bit), left.size());
    right ^= g(left.concat(zero_bit), right.size());
    xor_prefix(left, h(right.concat(one_bit), std::min<std::size_t>(b, left.size())));
    return left.concat(right);
}

BitVector wbc_decipher(const FarfallePrf& prf, const BitVector& tweak,
                       const BitVector& ciphertext, unsigned ell) {
    const unsigned b = prf.params().b;
    auto [left, right] = wbc_split(prf, ciphertext, ell);
    const BitVector zero_bit = BitVector::from_word(0, 1);
    const BitVector one_bit = BitVector::from_word(1, 1);

    const auto h = [&](const BitVector& x, std::size_t bits) { return prf({x}, bits); };
    const auto g = [&](const BitVector& x, std::size_t bits) { return prf({tweak, x}, bits); };

    xor_prefix(left, h(right.concat(one_bit), std::min<std::size_t>(b, left.size())));
    right ^= g(left.concat(zero_bit), right.size());
    left ^= g(right.concat(one_bit), left.size());
    xor_prefix(right, h(left.concat(zero_bit), std::min<std::size_t>(b, right.size())));
    return left.concat(right);
}

}  // namespace simonlab
