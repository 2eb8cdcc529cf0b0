#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "simonlab/bitvec.hpp"
#include "simonlab/boolfun.hpp"
#include "simonlab/farfalle.hpp"
#include "simonlab/gf2e.hpp"
#include "simonlab/rng.hpp"
#include "simonlab/simon.hpp"

namespace simonlab {

// Seeded toy Farfalle with a random key. Instances are screened so the
// derived mask k is nonzero; a zero mask voids the rolling-function design
// criteria the constructions rely on (all mask differences collapse).
struct FarfalleInstance {
    FarfalleParams params;
    FarfalleKeyState key;

    static FarfalleInstance seeded(unsigned b, std::uint64_t seed,
                                   RollKind roll = RollKind::Linear,
                                   bool blank_index_mode = false);
};

// ---------------------------------------------------------------------------
// Periodic-function constructions over the keyed Farfalle oracle.

struct ConstructionSpec {
    enum class Variant { C1a, C1b, C2i, C2ii };

    Variant variant = Variant::C1a;
    unsigned output_block = 0;                // which z_j to observe
    std::uint64_t alpha = 0, beta = 0;        // C1b block offsets
    std::vector<std::uint64_t> constants;     // C2i constant blocks, in order
    unsigned var_index_i = 0, var_index_j = 1;  // C2i variable placement i < j
    std::uint64_t alpha0 = 0, alpha1 = 0;     // C2ii pairwise offsets

    static ConstructionSpec c1a(unsigned output_block = 0);
    static ConstructionSpec c1b(std::uint64_t alpha, std::uint64_t beta,
                                unsigned output_block = 0);
    static ConstructionSpec c2i(std::vector<std::uint64_t> constants, unsigned var_i,
                                unsigned var_j, unsigned output_block = 0);
    static ConstructionSpec c2ii(std::uint64_t alpha0, std::uint64_t alpha1,
                                 unsigned output_block = 0);
};

// Truth-table oracle of z_j as a function of the variable block(s); one
// Farfalle evaluation per input point (the Q2 superposition-query model).
VectorialFunction build_construction(const ConstructionSpec& spec, const FarfallePrf& prf);

// The periods the construction is designed to plant, computed from the key
// state (fixture/test side; the attacker never calls this).
std::vector<std::uint64_t> construction_asserted_periods(const ConstructionSpec& spec,
                                                         const FarfalleParams& params,
                                                         const FarfalleKeyState& key);

// ---------------------------------------------------------------------------
// Secret-key extraction from periods of a linear rolling function.

struct PeriodEquation {
    unsigned index_i = 0, index_j = 1;
    BitVector period;  // s_{i,j} = roll^i(k) ^ roll^j(k)
};

struct ExtractionReport {
    std::vector<PeriodEquation> periods_used;
    std::size_t system_rank = 0;
    // Affine solution set for k; nullopt when the system is inconsistent
    // (corrupted period input).
    std::optional<BitMatrix::SolutionSet> candidates;
    std::optional<std::uint64_t> recovered_mask;  // k, when rank is full
    std::optional<BitVector> recovered_key;       // K = unpad(p_b^{-1}(k))
    std::uint64_t superposition_queries = 0;
};

// Stacks one block of b equations (M^i ^ M^j) k = s_{i,j} per period and
// solves. Strictly subsumes summing the periods into a single block.
ExtractionReport extract_k_linear_roll(const std::vector<PeriodEquation>& periods,
                                       const BitMatrix& roll_matrix,
                                       const FarfalleParams* params_for_unpad);

// Full pipeline: learns s_{i,j} for each index pair with Simon over a C2i
// construction, then extracts. Constant blocks are drawn from the seed.
struct KeyExtractionRun {
    ExtractionReport report;
    std::uint64_t superposition_queries = 0;
    std::uint64_t classical_evaluations = 0;
};
KeyExtractionRun run_key_extraction(const FarfalleInstance& instance,
                                    const std::vector<std::pair<unsigned, unsigned>>& index_pairs,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Forgeries against the AE modes.

struct ForgeryResult {
    unsigned n_bits = 0;
    std::vector<std::uint64_t> learned_periods;  // recovered basis
    bool accepted = false;
    bool fresh = false;  // forged input never classically queried
    std::uint64_t superposition_queries = 0;
    std::uint64_t classical_evaluations = 0;
    std::uint64_t tag_queries = 0;
    std::uint64_t verify_queries = 0;
    std::string queried_input;  // hex description of the one classical query
    std::string forged_input;   // hex description of the claim
    std::string forged_tag;     // hex of the tag presented with the claim
};

// |P| = 0 path: learns the metadata period from the tag function with a
// fresh nonce per superposition query, then claims the shifted metadata with
// the observed tag against a verifier session sharing the nonce.
// align_unit = 0 selects the block size.
ForgeryResult forge_sae(const FarfalleInstance& instance, unsigned tag_bits,
                        std::uint64_t seed, unsigned align_unit = 0);

// Variant I: P = m||m, A = a||a, learns the product period space and shifts
// both. Variant II: arbitrary two-block P, learns the metadata period only.
ForgeryResult forge_siv_variant_i(const FarfalleInstance& instance, unsigned tag_bits,
                                  std::uint64_t seed);
ForgeryResult forge_siv_variant_ii(const FarfalleInstance& instance, unsigned tag_bits,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Wide-block-cipher distinguisher.

// Injective map sampled lazily; stands in for a random permutation on wide
// domains where a full table is out of reach.
class LazyRandomPermutation {
public:
    LazyRandomPermutation(unsigned domain_bits, std::uint64_t seed);
    std::uint64_t operator()(std::uint64_t x);

private:
    unsigned bits_;
    Rng rng_;
    std::unordered_map<std::uint64_t, std::uint64_t> map_;
    std::unordered_set<std::uint64_t> used_;
};

enum class WbcVerdict { Real, Random };

struct WbcDistinguishResult {
    WbcVerdict verdict = WbcVerdict::Random;
    std::uint64_t period = 0;  // verified period of f for the Real verdict
    unsigned alpha_attempts = 0;
    std::uint64_t superposition_queries = 0;
};

// Black-box distinguisher over an encipher oracle on 4b-bit blocks. Builds
// f(m) = P_2 ^ C_2(alpha, m||m) and looks for a verified nontrivial period;
// retries a few alpha values before declaring Random, since a real oracle
// can hide behind a degenerate alpha.
WbcDistinguishResult wbc_distinguish(const std::function<BitVector(const BitVector&)>& encipher,
                                     unsigned b, std::uint64_t seed,
                                     unsigned max_alpha_attempts = 3);

// Fixture-side expected period of the distinguisher function for a real
// oracle: H(alpha||0) ^ roll^i0(k) ^ roll^{i0+1}(k) with i0 determined by
// the tweak's padded block count.
std::uint64_t wbc_expected_distinguisher_period(const FarfallePrf& prf, const BitVector& tweak,
                                                const BitVector& alpha);

// ---------------------------------------------------------------------------
// Generalized Feistel networks and round-key extraction.

struct GfnSpec {
    unsigned branch_bits;
    unsigned rounds;
    VectorialFunction inner;  // public F; round r uses F(z ^ round_keys[r])
    std::vector<std::uint64_t> round_keys;

    std::uint64_t round_function(unsigned round, std::uint64_t z) const {
        return inner(z ^ round_keys[round]);
    }
    // Balanced Feistel: (L, R) -> (R, L ^ F_r(R)) per round.
    std::pair<std::uint64_t, std::uint64_t> encrypt(std::uint64_t left,
                                                    std::uint64_t right) const;

    static GfnSpec feistel3(VectorialFunction inner, const std::array<std::uint64_t, 3>& keys);
};

// The concatenated oracle with period (1, F_1(alpha) ^ F_1(beta)); built
// from encryption queries only.
VectorialFunction feistel3_distinguisher_oracle(const GfnSpec& gfn, std::uint64_t alpha,
                                                std::uint64_t beta);

// One call = one complete Simon attack on the 3-round distinguisher with
// (alpha, beta) = (x, x ^ sigma); returns the verified period value s(x).
class GfnPeriodSampler {
public:
    GfnPeriodSampler(const GfnSpec& gfn, std::uint64_t sigma, std::uint64_t seed);
    std::uint64_t operator()(std::uint64_t x);

    std::uint64_t calls() const { return calls_; }
    std::uint64_t superposition_queries() const { return superposition_queries_; }

private:
    const GfnSpec* gfn_;
    std::uint64_t sigma_;
    Rng rng_;
    std::uint64_t calls_ = 0;
    std::uint64_t superposition_queries_ = 0;
};

using PeriodValueSampler = std::function<std::uint64_t(std::uint64_t)>;

struct RoundKeyExtraction {
    std::vector<std::uint64_t> survivors;  // candidates passing the filter
    std::uint64_t period_samples = 0;      // s(x) values consumed
    std::uint64_t delta_superposition_queries = 0;
    std::uint64_t lambda = 0;  // ANF route only
    unsigned degree = 0;       // d actually used
    bool determined = false;   // proper nonempty survivor set
    // ANF route: the full lambda.s truth table rebuilt from S_{d-1}.
    std::vector<std::uint64_t> reconstructed_component;
    // Lagrange route: coefficients of the interpolated period polynomial.
    std::vector<std::uint64_t> interpolated_period_coeffs;
};

// Lagrange route: interpolates s(x) from exactly deg(F) samples (plus
// optional oversampling for cross-validation), builds
// Delta(x) = s(x) ^ F(x) ^ F(x ^ sigma), runs Simon on it and filters the
// candidate periods kappa with the constant-residual test
// x -> s(x) ^ F(x^kappa) ^ F(x^sigma^kappa), which absorbs any constant C.
//
// Isolation of {k, k ^ sigma} requires the sigma-derivative of F to be
// non-affine. Every exponent of a univariate polynomial of degree <= 6 has
// Hamming weight <= 2, which makes that derivative a linearized polynomial
// plus a constant: the residual is then constant in every direction, all
// candidates survive, and the run comes back undetermined. The first
// exponent that can break the degeneracy is x^7.
RoundKeyExtraction extract_round_key_lagrange(const FieldPolynomial& public_f,
                                              std::uint64_t sigma,
                                              const PeriodValueSampler& sampler,
                                              std::uint64_t seed, unsigned oversample = 0);

// Public-data check of the isolation hypothesis above: true iff the only
// linear structures of x -> F(x) ^ F(x ^ sigma) are 0 and sigma itself, so
// the survivor set of a planted instance is exactly {k, k ^ sigma}.
bool lagrange_instance_isolates(const VectorialFunction& public_f, std::uint64_t sigma);

// ANF route: picks lambda minimizing deg(lambda . F), reconstructs
// lambda . s from its values on S_{d-1} with the low-weight formula, then
// proceeds as above on the scalar Delta.
RoundKeyExtraction extract_round_key_anf(const VectorialFunction& public_f,
                                         std::uint64_t sigma,
                                         const PeriodValueSampler& sampler,
                                         std::uint64_t seed);

// Brute-force search over nonzero lambda for the minimal algebraic degree of
// the component lambda . f; ties break toward the smallest lambda.
std::pair<std::uint64_t, unsigned> min_degree_lambda(const VectorialFunction& f);

// Disambiguates the {k, k ^ sigma} survivor pair with period samples taken
// under a second shift sigma2 (one extra attack run per candidate check).
std::vector<std::uint64_t> filter_candidates_with_second_sigma(
    const VectorialFunction& public_f, std::uint64_t sigma2,
    const PeriodValueSampler& sampler_sigma2, const std::vector<std::uint64_t>& candidates,
    unsigned checks = 2);

}  // namespace simonlab
