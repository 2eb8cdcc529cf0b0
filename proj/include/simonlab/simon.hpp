#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "simonlab/bitvec.hpp"
#include "simonlab/boolfun.hpp"
#include "simonlab/rng.hpp"

namespace simonlab {

// Stop sampling once the span rank has been unchanged for `extra`
// consecutive measurements. "Sufficiently many" made concrete.
struct StabilizationPolicy {
    unsigned extra = 8;
    std::size_t max_queries = 1u << 16;
};

struct SimonSample {
    std::uint64_t y = 0;         // measured first register
    std::uint64_t source_a = 0;  // output observed in the second register
};

// A subspace of F_2^n given by a canonical basis, plus whether every basis
// vector has been checked against the oracle exhaustively.
struct PeriodSpace {
    unsigned n = 0;
    std::vector<std::uint64_t> basis;  // canonical (RREF) order
    bool verified = false;

    std::size_t dimension() const { return basis.size(); }
    bool trivial() const { return basis.empty(); }
    bool contains(std::uint64_t v) const;
    // All 2^dim elements (dimension capped at 20).
    std::vector<std::uint64_t> elements() const;
    std::vector<BitVector> basis_vectors() const;
    bool operator==(const PeriodSpace& other) const {
        return n == other.n && basis == other.basis;
    }
};

struct SimonRunReport {
    std::vector<SimonSample> samples;
    std::size_t span_rank = 0;
    std::size_t candidate_dimension = 0;  // dim of the unverified null space
    PeriodSpace recovered;
    std::uint64_t superposition_queries = 0;
    bool verified = false;
};

// One pass of steps 1-5: x uniform, a = f(x), y drawn from the exact
// post-Hadamard measurement distribution of Omega_a.
SimonSample sample_measurement(const VectorialFunction& f, Rng& rng);

// Full run of steps 1-6 with rank-stabilization stopping, null-space
// candidate extraction and mandatory exhaustive verification. The returned
// space is exactly the set of true periods contained in the candidate space.
SimonRunReport recover_period_space(const VectorialFunction& f,
                                    const StabilizationPolicy& stop, Rng& rng);

// Variant where every superposition query may see a fresh instantiation of
// the oracle (e.g. a fresh nonce/session); all instantiations must share the
// same period space. Verification runs against one fresh instantiation.
using OracleSource = std::function<std::shared_ptr<const VectorialFunction>(std::size_t)>;
SimonRunReport recover_period_space(const OracleSource& source,
                                    const StabilizationPolicy& stop, Rng& rng);

// f(b, x) = g(x) for b = 0, h(x) for b = 1, on 1 + n input bits (selector is
// the top bit). If h(x ^ s) == g(x) for all x then (1, s) is a period.
VectorialFunction concat_functions(const VectorialFunction& g, const VectorialFunction& h);

struct DemoOracle {
    VectorialFunction oracle;
    std::vector<std::uint64_t> planted_basis;  // known-by-construction periods
};

// f(x) = E_{k1,k2}(x) ^ P(x) with E = P(x ^ k1) ^ k2; period k1.
DemoOracle make_even_mansour_oracle(unsigned n, std::uint64_t seed);
// f(x) = E_k(x^d(t0)) ^ d(t0) ^ E_k(x^d(t1)) ^ d(t1); period d(t0) ^ d(t1).
DemoOracle make_lrw_oracle(unsigned n, std::uint64_t seed, std::uint64_t tweak0,
                           std::uint64_t tweak1);
// Random coset structure: period space is an exact planted subspace of the
// requested dimension.
DemoOracle make_planted_subspace_oracle(unsigned n, unsigned dimension, std::uint64_t seed);

}  // namespace simonlab
