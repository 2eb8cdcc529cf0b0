#include "simonlab/farfalle.hpp"

#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "simonlab/rng.hpp"

using namespace simonlab;

namespace {

// Independent straight-line reimplementation on bool vectors; the dual
// oracle for golden vectors. Shares only the seeded parameters, not the
// evaluation path.
std::vector<bool> naive_pad(std::vector<bool> s, unsigned b) {
    s.push_back(true);
    while (s.size() % b != 0) s.push_back(false);
    return s;
}

std::uint64_t naive_word(const std::vector<bool>& bits, std::size_t pos, unsigned count) {
    std::uint64_t w = 0;
    for (unsigned i = 0; i < count; ++i) {
        if (bits[pos + i]) w |= std::uint64_t{1} << i;
    }
    return w;
}

std::uint64_t naive_roll(const RollFunction& roll, std::uint64_t x, unsigned times) {
    for (unsigned t = 0; t < times; ++t) x = roll.apply(x);
    return x;
}

std::vector<bool> naive_farfalle(const FarfalleParams& p, const std::vector<bool>& key,
                                 const std::vector<std::vector<bool>>& strings, std::size_t n,
                                 std::size_t q) {
    const unsigned b = p.b;
    const std::uint64_t k = p.p_b(naive_word(naive_pad(key, b), 0, b));
    std::uint64_t x = 0;
    unsigned index = 0;
    for (const auto& s : strings) {
        const std::vector<bool> padded = naive_pad(s, b);
        for (std::size_t i = 0; i * b < padded.size(); ++i) {
            x ^= p.p_c(naive_word(padded, i * b, b) ^
                       naive_roll(p.roll_c, k, index + static_cast<unsigned>(i)));
        }
        index += static_cast<unsigned>(padded.size() / b);
        if (p.blank_index_mode) ++index;
    }
    const std::uint64_t k_prime = naive_roll(p.roll_c, k, index);
    const std::uint64_t y = p.p_d(x);
    std::vector<bool> stream;
    for (std::size_t j = 0; j * b < q + n; ++j) {
        const std::uint64_t z = p.p_e(naive_roll(p.roll_e, y, static_cast<unsigned>(j))) ^ k_prime;
        for (unsigned i = 0; i < b; ++i) stream.push_back((z >> i) & 1);
    }
    return {stream.begin() + q, stream.begin() + q + n};
}

std::vector<bool> to_bools(const BitVector& v) {
    std::vector<bool> bits(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v.bit(i);
    return bits;
}

}  // namespace

TEST_CASE("pad10star") {
    const BitVector empty;
    const BitVector padded = pad10star(empty, 8);
    CHECK(padded.size() == 8);
    CHECK(padded.as_word() == 0x01);  // 10000000 as a bit string

    Rng rng(139);
    const BitVector seven = BitVector::random(7, rng);
    const BitVector p7 = pad10star(seven, 8);
    CHECK(p7.size() == 8);
    CHECK(p7.slice(0, 7) == seven);
    CHECK(p7.bit(7));

    // Aligned input still gains a full block.
    const BitVector eight = BitVector::random(8, rng);
    const BitVector p8 = pad10star(eight, 8);
    CHECK(p8.size() == 16);
    CHECK(p8.slice(0, 8) == eight);
    CHECK(p8.bits_at(8, 8) == 0x01);

    for (int trial = 0; trial < 50; ++trial) {
        const BitVector s = BitVector::random(rng.below(40), rng);
        CHECK(strip_pad10star(pad10star(s, 8)) == s);
    }
    CHECK_THROWS_AS(strip_pad10star(BitVector(8)), std::invalid_argument);
}

TEST_CASE("lfsr roll functions") {
    CHECK(primitive_polynomial(4) == 0x13);
    const RollFunction roll = RollFunction::lfsr(8);
    const BitMatrix m = roll.matrix();
    CHECK(m.invertible());
    Rng rng(149);
    for (int trial = 0; trial < 30; ++trial) {
        const std::uint64_t x = rng.bits(8);
        CHECK(roll.apply(x) == m.mul(BitVector::from_word(x, 8)).as_word());
    }
    // Multiplication by x has full order on nonzero states.
    std::uint64_t state = 1;
    std::size_t steps = 0;
    do {
        state = roll.apply(state);
        ++steps;
    } while (state != 1 && steps < 256);
    CHECK(steps == 255);

    const RollFunction table = RollFunction::table(Permutation::random(6, rng));
    CHECK_FALSE(table.is_linear());
    CHECK_THROWS_AS(table.matrix(), std::logic_error);

    BitMatrix singular(3, 3);
    singular.set(0, 0, true);
    CHECK_THROWS_AS(RollFunction::linear(singular), std::invalid_argument);
}

TEST_CASE("mask derivation round trip") {
    Rng rng(151);
    for (int trial = 0; trial < 40; ++trial) {
        const unsigned b = 4 + rng.below(13);
        const FarfalleParams params = FarfalleParams::seeded(b, rng.next());
        const BitVector key = BitVector::random(rng.below(b), rng);
        const FarfalleKeyState state = FarfalleKeyState::derive(params, key);
        CHECK(recover_key_from_mask(params, state.mask) == key);
    }
    const FarfalleParams params = FarfalleParams::seeded(8, 1);
    CHECK_THROWS_AS(FarfalleKeyState::derive(params, BitVector(8)), std::invalid_argument);
}

TEST_CASE("golden vectors against the straight-line reimplementation") {
    // Frozen from the first correct implementation and cross-checked by the
    // naive path below: b=8, seed 42, K = 0x2A (6 bits), M = {0x11}, n=8.
    const FarfalleParams params = FarfalleParams::seeded(8, 42, RollKind::Linear, false);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x2a, 6));
    const BitVector z = farfalle(params, key, {BitVector::from_word(0x11, 8)}, 8, 0);
    CHECK(z.as_word() == 0xfd);

    Rng rng(157);
    for (int trial = 0; trial < 60; ++trial) {
        const unsigned b = 4 + rng.below(13);
        const bool blank = rng.flip();
        const FarfalleParams p = FarfalleParams::seeded(
            b, rng.next(), rng.flip() ? RollKind::Linear : RollKind::Table, blank);
        const BitVector k = BitVector::random(rng.below(b), rng);
        const FarfalleKeyState ks = FarfalleKeyState::derive(p, k);

        MessageSequence message;
        std::vector<std::vector<bool>> naive_message;
        const std::size_t strings = 1 + rng.below(3);
        for (std::size_t i = 0; i < strings; ++i) {
            const BitVector s = BitVector::random(rng.below(5 * b), rng);
            message.push_back(s);
            naive_message.push_back(to_bools(s));
        }
        // Wide enough that messages and output streams cross word borders.
        const std::size_t q = rng.below(4 * b);
        const std::size_t n = 1 + rng.below(5 * b);
        const BitVector lib = farfalle(p, ks, message, n, q);
        CHECK(to_bools(lib) == naive_farfalle(p, to_bools(k), naive_message, n, q));
    }
}

TEST_CASE("accumulator structure") {
    const FarfalleParams params = FarfalleParams::seeded(8, 163);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x15, 5));
    const auto roll = [&](unsigned i) { return params.roll_c.iterate(key.mask, i); };

    // Manual recomputation of the compression sum for M = m || m.
    Rng rng(164);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t m = rng.bits(8);
        BitVector msg(16);
        msg.set_bits(0, 8, m);
        msg.set_bits(8, 8, m);
        const std::uint64_t expected = params.p_c(m ^ roll(0)) ^ params.p_c(m ^ roll(1)) ^
                                       params.p_c(0x01 ^ roll(2));  // pad block 10*
        CHECK(farfalle_accumulator(params, key, {msg}) == expected);
    }

    // Equal-index contributions cancel pairwise: the compression sums of the
    // shifted pair of sequences coincide, which is the weakness every attack
    // rides on.
    const std::uint64_t s01 = roll(0) ^ roll(1);
    const std::uint64_t s34 = roll(3) ^ roll(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t a = rng.bits(8), m = rng.bits(8);
        BitVector meta(16), plain(16), meta_shift(16), plain_shift(16);
        meta.set_bits(0, 8, a);
        meta.set_bits(8, 8, a);
        meta_shift.set_bits(0, 8, a ^ s01);
        meta_shift.set_bits(8, 8, a ^ s01);
        plain.set_bits(0, 8, m);
        plain.set_bits(8, 8, m);
        plain_shift.set_bits(0, 8, m ^ s34);
        plain_shift.set_bits(8, 8, m ^ s34);
        CHECK(farfalle_accumulator(params, key, {meta, plain}) ==
              farfalle_accumulator(params, key, {meta_shift, plain_shift}));
    }
}

TEST_CASE("swapping strings moves blocks to different indices") {
    const FarfalleParams params = FarfalleParams::seeded(8, 167);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x3, 4));
    const BitVector s1 = BitVector::from_word(0xab, 8);
    const BitVector s2 = BitVector::from_word(0xcd, 8);
    // Same string twice is trivially symmetric under swapping.
    CHECK(farfalle(params, key, {s1, s1}, 8, 0) == farfalle(params, key, {s1, s1}, 8, 0));
    // Distinct strings of equal length land on the same indices but with
    // different values, so the accumulator differs.
    CHECK(farfalle(params, key, {s1, s2}, 8, 0) != farfalle(params, key, {s2, s1}, 8, 0));
}

TEST_CASE("output blocks are periodic in a duplicated variable block") {
    Rng rng(173);
    for (int instance = 0; instance < 6; ++instance) {
        const unsigned b = 6 + 2 * (instance % 3);
        const RollKind kind = instance % 2 == 0 ? RollKind::Linear : RollKind::Table;
        const FarfalleParams params = FarfalleParams::seeded(b, rng.next(), kind);
        const BitVector k = BitVector::random(rng.below(b), rng);
        const FarfalleKeyState key = FarfalleKeyState::derive(params, k);
        const std::uint64_t s = params.roll_c.iterate(key.mask, 0) ^
                                params.roll_c.iterate(key.mask, 1);
        for (unsigned j = 0; j < 2; ++j) {
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << b); ++m) {
                BitVector msg(2 * b), shifted(2 * b);
                msg.set_bits(0, b, m);
                msg.set_bits(b, b, m);
                shifted.set_bits(0, b, m ^ s);
                shifted.set_bits(b, b, m ^ s);
                CHECK(farfalle(params, key, {msg}, b, j * b) ==
                      farfalle(params, key, {shifted}, b, j * b));
            }
        }
    }
}

TEST_CASE("SAE sessions") {
    const FarfalleParams params = FarfalleParams::seeded(8, 179);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x2a, 6));
    const FarfallePrf prf(params, key);
    const unsigned t = 16;
    const BitVector nonce = BitVector::from_word(0x47, 8);

    SUBCASE("offset is the smallest multiple of ell not below t") {
        SaeSession session(prf, nonce, 12, 8);
        CHECK(session.offset() == 16);
        SaeSession aligned(prf, nonce, 16, 8);
        CHECK(aligned.offset() == 16);
    }

    SUBCASE("deterministic wrap") {
        Rng rng(180);
        const BitVector meta = BitVector::random(11, rng);
        const BitVector plain = BitVector::random(19, rng);
        SaeSession s1(prf, nonce, t, 8);
        SaeSession s2(prf, nonce, t, 8);
        CHECK(s1.init_tag() == s2.init_tag());
        CHECK(s1.wrap(meta, plain) == s2.wrap(meta, plain));
    }

    SUBCASE("history updates follow the A||0 / C||1 branches") {
        const BitVector zero_bit = BitVector::from_word(0, 1);
        const BitVector one_bit = BitVector::from_word(1, 1);

        // |A| = 0, |P| = 0: only the metadata branch fires.
        SaeSession session(prf, nonce, t, 8);
        const auto [c0, t0] = session.wrap(BitVector(), BitVector());
        CHECK(c0.empty());
        CHECK(t0 == prf({nonce, BitVector().concat(zero_bit)}, t, 0));

        // |A| = 0, |P| > 0: only the ciphertext branch fires.
        SaeSession session2(prf, nonce, t, 8);
        const BitVector plain = BitVector::from_word(0xbeef, 16);
        const auto [c1, t1] = session2.wrap(BitVector(), plain);
        CHECK(c1 == (plain ^ prf({nonce}, 16, session2.offset())));
        CHECK(t1 == prf({nonce, c1.concat(one_bit)}, t, 0));

        // |A| > 0 and |P| > 0: both branches, metadata first.
        SaeSession session3(prf, nonce, t, 8);
        const BitVector meta = BitVector::from_word(0x5, 3);
        const auto [c2, t2] = session3.wrap(meta, plain);
        CHECK(t2 == prf({nonce, meta.concat(zero_bit), c2.concat(one_bit)}, t, 0));
    }

    SUBCASE("unwrap round trip and rejection") {
        Rng rng(181);
        const BitVector meta = BitVector::random(9, rng);
        const BitVector plain = BitVector::random(24, rng);
        SaeSession enc(prf, nonce, t, 8);
        SaeSession dec(prf, nonce, t, 8);
        const auto [cipher, tag] = enc.wrap(meta, plain);
        const auto unwrapped = dec.unwrap(meta, cipher, tag);
        REQUIRE(unwrapped.has_value());
        CHECK(*unwrapped == plain);

        // Sessions advanced in lockstep: a second wrap still verifies.
        const auto [cipher2, tag2] = enc.wrap(BitVector(), plain);
        const auto unwrapped2 = dec.unwrap(BitVector(), cipher2, tag2);
        REQUIRE(unwrapped2.has_value());
        CHECK(*unwrapped2 == plain);

        // Tampering is rejected and leaves the verifier state intact.
        SaeSession enc3(prf, nonce, t, 8);
        SaeSession dec3(prf, nonce, t, 8);
        const auto [cipher3, tag3] = enc3.wrap(meta, plain);
        BitVector tampered = cipher3;
        tampered.set_bit(0, !tampered.bit(0));
        CHECK_FALSE(dec3.unwrap(meta, tampered, tag3).has_value());
        CHECK(dec3.unwrap(meta, cipher3, tag3).has_value());
    }

    SUBCASE("tag is periodic in a, independently of the nonce value") {
        // A = a||a with |P| = 0; the variable blocks sit right after the
        // nonce blocks, so the period is roll^i0 ^ roll^{i0+1} of the mask.
        const unsigned i0 = static_cast<unsigned>(pad10star(nonce, 8).size() / 8);
        const std::uint64_t s = params.roll_c.iterate(key.mask, i0) ^
                                params.roll_c.iterate(key.mask, i0 + 1);
        Rng rng(182);
        for (int trial = 0; trial < 4; ++trial) {
            const BitVector fresh_nonce = BitVector::random(8, rng);
            SaeSession base(prf, fresh_nonce, t, 8);
            for (std::uint64_t a = 0; a < 256; ++a) {
                SaeSession lhs = base;
                SaeSession rhs = base;
                const BitVector block = BitVector::from_word(a, 8);
                const BitVector shifted = BitVector::from_word(a ^ s, 8);
                CHECK(lhs.wrap(block.concat(block), BitVector()).second ==
                      rhs.wrap(shifted.concat(shifted), BitVector()).second);
            }
        }
    }
}

TEST_CASE("SIV mode") {
    const FarfalleParams params = FarfalleParams::seeded(8, 191);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x19, 7));
    const FarfallePrf prf(params, key);
    const unsigned t = 16;
    Rng rng(192);

    SUBCASE("wrap-unwrap round trip") {
        for (int trial = 0; trial < 20; ++trial) {
            const BitVector meta = BitVector::random(rng.below(30), rng);
            const BitVector plain = BitVector::random(rng.below(40), rng);
            const auto [cipher, tag] = siv_wrap(prf, meta, plain, t);
            CHECK(cipher.size() == plain.size());
            const auto unwrapped = siv_unwrap(prf, meta, cipher, tag, t);
            REQUIRE(unwrapped.has_value());
            CHECK(*unwrapped == plain);
        }
    }

    SUBCASE("tampered ciphertext is rejected") {
        const BitVector meta = BitVector::random(16, rng);
        const BitVector plain = BitVector::random(16, rng);
        const auto [cipher, tag] = siv_wrap(prf, meta, plain, t);
        BitVector tampered = cipher;
        tampered.set_bit(3, !tampered.bit(3));
        CHECK_FALSE(siv_unwrap(prf, meta, tampered, tag, t).has_value());
        BitVector bad_tag = tag;
        bad_tag.set_bit(0, !bad_tag.bit(0));
        CHECK_FALSE(siv_unwrap(prf, meta, cipher, bad_tag, t).has_value());
    }

    SUBCASE("shifted pairs share the tag") {
        // P1 = m||m, A1 = a||a against the shifted pair: the metadata pair
        // occupies the first two block indices, the plaintext pair the two
        // right after the padded metadata.
        const auto roll = [&](unsigned i) { return params.roll_c.iterate(key.mask, i); };
        const unsigned meta_blocks = static_cast<unsigned>(pad10star(BitVector(16), 8).size() / 8);
        const std::uint64_t s_meta = roll(0) ^ roll(1);
        const std::uint64_t s_plain = roll(meta_blocks) ^ roll(meta_blocks + 1);
        for (int trial = 0; trial < 30; ++trial) {
            const std::uint64_t m = rng.bits(8), a = rng.bits(8);
            const auto pair = [&](std::uint64_t v) {
                const BitVector block = BitVector::from_word(v, 8);
                return block.concat(block);
            };
            const auto [c1, t1] = siv_wrap(prf, pair(a), pair(m), t);
            const auto [c2, t2] = siv_wrap(prf, pair(a ^ s_meta), pair(m ^ s_plain), t);
            CHECK(t1 == t2);
        }
    }
}

TEST_CASE("WBC mode") {
    const FarfalleParams params = FarfalleParams::seeded(6, 193);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x9, 5));
    const FarfallePrf prf(params, key);
    Rng rng(194);
    const BitVector tweak = BitVector::random(6, rng);

    SUBCASE("encipherment is a permutation at |P| = 2b") {
        std::unordered_set<std::uint64_t> images;
        for (std::uint64_t p = 0; p < (1u << 12); ++p) {
            const BitVector plain = BitVector::from_word(p, 12);
            const BitVector cipher = wbc_encipher(prf, tweak, plain);
            CHECK(images.insert(cipher.as_word()).second);
            CHECK(wbc_decipher(prf, tweak, cipher) == plain);
        }
    }

    SUBCASE("round trip at |P| = 4b and odd sizes") {
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t bits = 12 + rng.below(20);
            const BitVector plain = BitVector::random(bits, rng);
            const BitVector cipher = wbc_encipher(prf, tweak, plain);
            CHECK(cipher.size() == bits);
            CHECK(wbc_decipher(prf, tweak, cipher) == plain);
        }
        CHECK_THROWS_AS(wbc_encipher(prf, tweak, BitVector::random(8, rng)),
                        std::invalid_argument);
    }

    SUBCASE("deterministic") {
        const BitVector plain = BitVector::random(24, rng);
        CHECK(wbc_encipher(prf, tweak, plain) == wbc_encipher(prf, tweak, plain));
    }
}

TEST_CASE("blank index mode shifts the rolled masks between strings") {
    const FarfalleParams params = FarfalleParams::seeded(8, 197, RollKind::Linear, true);
    const FarfalleKeyState key = FarfalleKeyState::derive(params, BitVector::from_word(0x1, 3));
    const auto roll = [&](unsigned i) { return params.roll_c.iterate(key.mask, i); };
    Rng rng(198);
    const std::uint64_t a = rng.bits(8), m = rng.bits(8);
    const BitVector first = BitVector::from_word(a, 8);
    const BitVector second = BitVector::from_word(m, 8);
    // first: blocks at 0,1 (content + pad); blank index 2; second: 3,4.
    const std::uint64_t expected = params.p_c(a ^ roll(0)) ^ params.p_c(0x01 ^ roll(1)) ^
                                   params.p_c(m ^ roll(3)) ^ params.p_c(0x01 ^ roll(4));
    CHECK(farfalle_accumulator(params, key, {first, second}) == expected);
}
