#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "simonlab/bitvec.hpp"
#include "simonlab/rng.hpp"

namespace simonlab {

// Bijection on F_2^bits held as forward/inverse lookup tables.
class Permutation {
public:
    Permutation() = default;
    static Permutation random(unsigned bits, Rng& rng);
    static Permutation from_table(unsigned bits, std::vector<std::uint32_t> table);

    unsigned bits() const { return bits_; }
    std::uint64_t operator()(std::uint64_t x) const { return fwd_[x]; }
    std::uint64_t inverse(std::uint64_t y) const { return inv_[y]; }

private:
    unsigned bits_ = 0;
    std::vector<std::uint32_t> fwd_, inv_;
};

// Smallest primitive polynomial of the given degree, as a coefficient mask
// including the x^degree bit.
std::uint64_t primitive_polynomial(unsigned degree);

// State-rolling permutation roll^i. Either a linear map (b x b invertible
// matrix; the default is multiplication by x modulo a primitive polynomial,
// i.e. an LFSR step, whose defining matrix is the companion matrix) or an
// arbitrary table permutation for the nonlinear regime.
class RollFunction {
public:
    enum class Kind { Linear, Table };

    RollFunction() = default;  // empty; any use before assignment throws
    static RollFunction lfsr(unsigned bits);
    static RollFunction linear(const BitMatrix& matrix);
    static RollFunction table(Permutation perm);

    Kind kind() const { return kind_; }
    unsigned bits() const { return bits_; }
    bool is_linear() const { return kind_ == Kind::Linear; }
    BitMatrix matrix() const;  // defining matrix; Linear only

    std::uint64_t apply(std::uint64_t x) const;
    std::uint64_t iterate(std::uint64_t x, unsigned count) const;

private:
    RollFunction(Kind kind, unsigned bits) : kind_(kind), bits_(bits) {}

    Kind kind_ = Kind::Linear;
    unsigned bits_ = 0;
    std::vector<std::uint64_t> columns_;  // linear: column j as a mask
    std::vector<BitVector> matrix_cols_;
    Permutation perm_;
};

enum class RollKind { Linear, Table };

struct FarfalleParams {
    unsigned b = 8;
    Permutation p_b, p_c, p_d, p_e;
    RollFunction roll_c, roll_e;
    bool blank_index_mode = false;

    static FarfalleParams seeded(unsigned b, std::uint64_t seed,
                                 RollKind roll = RollKind::Linear,
                                 bool blank_index_mode = false);
    static constexpr unsigned kMinBlockBits = 4;
    static constexpr unsigned kMaxBlockBits = 16;
};

// K plus the derived b-bit mask k = p_b(pad10*(K)).
struct FarfalleKeyState {
    BitVector key;            // |K| <= b-1
    std::uint64_t mask = 0;   // k

    static FarfalleKeyState derive(const FarfalleParams& params, BitVector key);
};

// unpad(p_b^{-1}(mask)); inverse of the mask derivation.
BitVector recover_key_from_mask(const FarfalleParams& params, std::uint64_t mask);

// Ordered string sequence fed to the compression layer; strings[0] is
// compressed first (lowest block indices). In the usual right-to-left
// sequence notation X o Y, Y sits at strings[0].
using MessageSequence = std::vector<BitVector>;

// Appends 1 then the minimum number of 0s to reach a multiple of block_bits;
// always appends at least one bit.
BitVector pad10star(const BitVector& s, unsigned block_bits);
BitVector strip_pad10star(const BitVector& padded);

// Compression-layer accumulator x = sum p_c(m_i + roll_c^i(k)) over all
// padded blocks of the sequence (blank index skipped between strings when
// blank_index_mode is set).
std::uint64_t farfalle_accumulator(const FarfalleParams& params, const FarfalleKeyState& key,
                                   const MessageSequence& message);

// Full PRF: out_bits bits of z_0 || z_1 || ... starting at bit `offset`,
// where z_j = p_e(roll_e^j(p_d(x))) + roll_c^I(k).
BitVector farfalle(const FarfalleParams& params, const FarfalleKeyState& key,
                   const MessageSequence& message, std::size_t out_bits,
                   std::size_t offset = 0);

// Keyed oracle wrapper; counts classical evaluations performed through it.
class FarfallePrf {
public:
    FarfallePrf(const FarfalleParams& params, FarfalleKeyState key)
        : params_(&params), key_(std::move(key)) {}

    BitVector operator()(const MessageSequence& message, std::size_t out_bits,
                         std::size_t offset = 0) const {
        evaluations_.fetch_add(1, std::memory_order_relaxed);
        return farfalle(*params_, key_, message, out_bits, offset);
    }

    const FarfalleParams& params() const { return *params_; }
    const FarfalleKeyState& key_state() const { return key_; }
    std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }

private:
    const FarfalleParams* params_;
    FarfalleKeyState key_;
    mutable std::atomic<std::uint64_t> evaluations_{0};
};

// Session-supporting AE. History is a growing string sequence; each wrap
// derives the keystream from the pre-update history shifted past the tag
// bits, then appends A||0 (when |A| > 0 or |P| = 0) and C||1 (when |P| > 0).
class SaeSession {
public:
    SaeSession(const FarfallePrf& prf, const BitVector& nonce, unsigned tag_bits,
               unsigned align_unit);

    const BitVector& init_tag() const { return init_tag_; }
    unsigned offset() const { return offset_; }

    std::pair<BitVector, BitVector> wrap(const BitVector& meta, const BitVector& plaintext);
    // Returns the plaintext and commits the session state on tag match;
    // leaves the session untouched otherwise.
    std::optional<BitVector> unwrap(const BitVector& meta, const BitVector& ciphertext,
                                    const BitVector& tag);

private:
    BitVector tag_over(const MessageSequence& history) const;

    const FarfallePrf* prf_;
    MessageSequence history_;
    unsigned tag_bits_;
    unsigned offset_;
    BitVector init_tag_;
};

// Synthetic-IV AE: T = F(P o A) truncated to tag_bits, C = P + F(T o A).
std::pair<BitVector, BitVector> siv_wrap(const FarfallePrf& prf, const BitVector& meta,
                                         const BitVector& plaintext, unsigned tag_bits);
std::optional<BitVector> siv_unwrap(const FarfallePrf& prf, const BitVector& meta,
                                    const BitVector& ciphertext, const BitVector& tag,
                                    unsigned tag_bits);

// Wide block cipher: 4-round Feistel over L || R with H/G instantiated by
// the same keyed Farfalle PRF, tweak W fed as an extra sequence string.
// split(|P|) = ell * ceil(|P| / (2 ell)); ell = 0 selects ell = b.
BitVector wbc_encipher(const FarfallePrf& prf, const BitVector& tweak,
                       const BitVector& plaintext, unsigned ell = 0);
BitVector wbc_decipher(const FarfallePrf& prf, const BitVector& tweak,
                       const BitVector& ciphertext, unsigned ell = 0);

}  // namespace simonlab
