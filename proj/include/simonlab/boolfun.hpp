#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "simonlab/bitvec.hpp"
#include "simonlab/rng.hpp"

namespace simonlab {

// Explicit truth table of f: F_2^n -> F_2^tau. The universal oracle object:
// everything that gets attacked ends up in this form. Inputs and outputs are
// words with bit i corresponding to coordinate i.
class VectorialFunction {
public:
    static constexpr unsigned kDefaultCap = 16;
    static constexpr unsigned kHardCap = 24;

    VectorialFunction(unsigned n, unsigned tau, std::vector<std::uint64_t> table,
                      unsigned cap = kDefaultCap);
    static VectorialFunction from_fn(unsigned n, unsigned tau,
                                     const std::function<std::uint64_t(std::uint64_t)>& fn,
                                     unsigned cap = kDefaultCap);
    static VectorialFunction random(unsigned n, unsigned tau, Rng& rng);
    static VectorialFunction random_permutation(unsigned n, Rng& rng);

    unsigned input_bits() const { return n_; }
    unsigned output_bits() const { return tau_; }
    std::size_t domain_size() const { return std::size_t{1} << n_; }
    std::uint64_t operator()(std::uint64_t x) const { return table_[x]; }
    const std::vector<std::uint64_t>& table() const { return table_; }

    VectorialFunction derivative(const BitVector& direction) const;
    // x -> dot(lambda, f(x)) as a tau=1 function.
    VectorialFunction component(const BitVector& lambda) const;

    // True iff f(x ^ s) == f(x) for all x.
    bool has_period(std::uint64_t s) const;
    // Canonical basis of {s : f(x^s) = f(x) for all x}, by exhaustive search.
    // This is the ground-truth oracle every Simon result is checked against.
    std::vector<BitVector> period_space_bruteforce() const;

    bool operator==(const VectorialFunction& other) const {
        return n_ == other.n_ && tau_ == other.tau_ && table_ == other.table_;
    }

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static VectorialFunction load(std::istream& in, unsigned cap = kDefaultCap);
    static VectorialFunction load_file(const std::string& path, unsigned cap = kDefaultCap);

private:
    unsigned n_, tau_;
    std::vector<std::uint64_t> table_;
};

// Algebraic normal form coefficients: coeffs[u] holds the tau-bit vector of
// per-coordinate lambda_u values. Moebius transform of the truth table,
// self-inverse.
struct AnfTable {
    unsigned n = 0, tau = 0;
    std::vector<std::uint64_t> coeffs;
    unsigned degree() const;  // max wt(u) with coeffs[u] != 0; 0 for constants
};

AnfTable mobius_transform(const VectorialFunction& f);
VectorialFunction mobius_inverse(const AnfTable& anf);
unsigned anf_degree(const VectorialFunction& f);

// C(m, k) mod 2 by Lucas: 1 iff k's bits are a submask of m's.
int binomial_parity(std::uint64_t m, std::uint64_t k);
// parity of sum_{i=0..limit} C(m, i)
int binomial_sum_parity(std::uint64_t m, std::uint64_t limit);

// |S_t| = sum_{j=0..t} C(n, j); throws on uint64 overflow.
std::uint64_t s_set_size(unsigned n, unsigned t);

// Known values of f on the low-weight set S_d = {y : wt(y) <= d}.
struct LowWeightSamples {
    unsigned n = 0, tau = 0, d = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // (input, output)

    static LowWeightSamples collect(unsigned n, unsigned tau, unsigned d,
                                    const std::function<std::uint64_t(std::uint64_t)>& fn);
    bool complete() const;
};

// Reconstructs the unique degree-<= d extension of the samples over all of
// F_2^n. Throws if the samples do not cover S_d or if any reconstructed
// coordinate comes out with degree > d (inconsistent samples / wrong bound).
VectorialFunction recover_from_low_weight(const LowWeightSamples& samples);

// The exact measurement distribution of the first register after Simon
// steps 1-5 conditioned on observing output a: probability of y equals
// (sum_{x in Omega_a} (-1)^{x.y})^2 / (|Omega_a| * 2^n). Kept as exact
// integer numerators over a common denominator.
struct PreimageSpectrum {
    unsigned n = 0;
    std::uint64_t denominator = 0;
    std::vector<std::uint64_t> numerators;

    double probability(std::uint64_t y) const {
        return static_cast<double>(numerators[y]) / static_cast<double>(denominator);
    }
    std::uint64_t sample(Rng& rng) const;
};

// Requires a in Im(f).
PreimageSpectrum preimage_spectrum(const VectorialFunction& f, std::uint64_t a);

}  // namespace simonlab
