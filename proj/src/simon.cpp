#include "simonlab/simon.hpp"

#include <memory>
#include <stdexcept>

namespace simonlab {

bool PeriodSpace::contains(std::uint64_t v) const {
    for (auto b : basis) v = std::min(v, v ^ b);
    return v == 0;
}

std::vector<std::uint64_t> PeriodSpace::elements() const {
    if (basis.size() > 20) throw std::runtime_error("PeriodSpace::elements: space too large");
    std::vector<std::uint64_t> out(std::size_t{1} << basis.size(), 0);
    for (std::size_t mask = 0; mask < out.size(); ++mask) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (mask & (std::size_t{1} << i)) v ^= basis[i];
        }
        out[mask] = v;
    }
    return out;
}

std::vector<BitVector> PeriodSpace::basis_vectors() const {
    std::vector<BitVector> out;
    for (auto b : basis) out.push_back(BitVector::from_word(b, n));
    return out;
}

SimonSample sample_measurement(const VectorialFunction& f, Rng& rng) {
    const std::uint64_t x = rng.below(f.domain_size());
    const std::uint64_t a = f(x);
    const PreimageSpectrum spectrum = preimage_spectrum(f, a);
    return SimonSample{spectrum.sample(rng), a};
}

namespace {

// Shrinks the candidate space to the subspace of true periods of `oracle`.
// True periods form a group, so if every basis vector verifies the whole
// space does; otherwise enumerate (candidate spaces are desk-sized here).
PeriodSpace verify_candidates(const std::vector<std::uint64_t>& candidate_basis,
                              const VectorialFunction& oracle) {
    PeriodSpace space;
    space.n = oracle.input_bits();

    bool basis_ok = true;
    for (auto b : candidate_basis) {
        if (!oracle.has_period(b)) {
            basis_ok = false;
            break;
        }
    }
    if (basis_ok) {
        space.basis = word_canonical_basis(candidate_basis);
        space.verified = true;
        return space;
    }

    if (candidate_basis.size() > 20) {
        throw std::runtime_error("verify_candidates: candidate space too large to enumerate");
    }
    std::vector<std::uint64_t> verified;
    PeriodSpace candidates;
    candidates.n = space.n;
    candidates.basis = candidate_basis;
    for (auto v : candidates.elements()) {
        if (v != 0 && oracle.has_period(v)) verified.push_back(v);
    }
    space.basis = word_canonical_basis(verified);
    space.verified = true;
    return space;
}

SimonRunReport run(const OracleSource& source, const StabilizationPolicy& stop, Rng& rng) {
    if (stop.max_queries == 0) throw std::invalid_argument("recover_period_space: zero budget");
    SimonRunReport report;
    std::size_t queries = 0;
    unsigned n = 0;
    std::unique_ptr<WordSpan> span;

    unsigned stable = 0;
    while (queries < stop.max_queries) {
        const std::shared_ptr<const VectorialFunction> oracle = source(queries);
        if (!span) {
            n = oracle->input_bits();
            span = std::make_unique<WordSpan>(n);
        }
        const SimonSample sample = sample_measurement(*oracle, rng);
        ++queries;
        report.samples.push_back(sample);
        if (span->add(sample.y)) {
            stable = 0;
        } else {
            ++stable;
        }
        // Rank n leaves only the trivial candidate, no need to keep going.
        if (span->rank() == n || stable >= stop.extra) break;
    }

    report.span_rank = span->rank();
    report.superposition_queries = queries;

    const std::vector<std::uint64_t> candidates = span->orthogonal_basis();
    report.candidate_dimension = candidates.size();
    report.recovered = verify_candidates(candidates, *source(queries));
    report.verified = report.recovered.verified;
    return report;
}

}  // namespace

SimonRunReport recover_period_space(const VectorialFunction& f,
                                    const StabilizationPolicy& stop, Rng& rng) {
    const std::shared_ptr<const VectorialFunction> alias(&f, [](const VectorialFunction*) {});
    const OracleSource fixed = [alias](std::size_t) { return alias; };
    return run(fixed, stop, rng);
}

SimonRunReport recover_period_space(const OracleSource& source,
                                    const StabilizationPolicy& stop, Rng& rng) {
    return run(source, stop, rng);
}

VectorialFunction concat_functions(const VectorialFunction& g, const VectorialFunction& h) {
    if (g.input_bits() != h.input_bits() || g.output_bits() != h.output_bits()) {
        throw std::invalid_argument("concat_functions: shape mismatch");
    }
    const unsigned n = g.input_bits();
    std::vector<std::uint64_t> table(std::size_t{1} << (n + 1));
    for (std::uint64_t x = 0; x < g.domain_size(); ++x) {
        table[x] = g(x);
        table[x | (std::uint64_t{1} << n)] = h(x);
    }
    return VectorialFunction(n + 1, g.output_bits(), std::move(table),
                             VectorialFunction::kHardCap);
}

DemoOracle make_even_mansour_oracle(unsigned n, std::uint64_t seed) {
    Rng rng(seed);
    const VectorialFunction public_perm = VectorialFunction::random_permutation(n, rng);
    const std::uint64_t k1 = rng.bits(n);
    const std::uint64_t k2 = rng.bits(n);
    auto oracle = VectorialFunction::from_fn(n, n, [&](std::uint64_t x) {
        return public_perm(x ^ k1) ^ k2 ^ public_perm(x);
    });
    return DemoOracle{std::move(oracle), {k1}};
}

DemoOracle make_lrw_oracle(unsigned n, std::uint64_t seed, std::uint64_t tweak0,
                           std::uint64_t tweak1) {
    Rng rng(seed);
    const VectorialFunction block_cipher = VectorialFunction::random_permutation(n, rng);
    const VectorialFunction hash = VectorialFunction::random(n, n, rng);
    const std::uint64_t d0 = hash(tweak0 & (block_cipher.domain_size() - 1));
    const std::uint64_t d1 = hash(tweak1 & (block_cipher.domain_size() - 1));
    auto oracle = VectorialFunction::from_fn(n, n, [&](std::uint64_t x) {
        return block_cipher(x ^ d0) ^ d0 ^ block_cipher(x ^ d1) ^ d1;
    });
    return DemoOracle{std::move(oracle), {d0 ^ d1}};
}

DemoOracle make_planted_subspace_oracle(unsigned n, unsigned dimension, std::uint64_t seed) {
    if (dimension >= n) throw std::invalid_argument("planted subspace: dimension >= n");
    Rng rng(seed);

    // Random basis of an r-dimensional subspace V.
    WordSpan span(n);
    std::vector<std::uint64_t> basis;
    while (basis.size() < dimension) {
        const std::uint64_t v = rng.bits(n);
        if (v != 0 && span.add(v)) basis.push_back(v);
    }

    // f(x) = h(coset of x mod V) with h injective, so the period space is
    // exactly V. Coset representative: reduce x by the echelon basis.
    const auto representative = [&](std::uint64_t x) {
        for (auto b : span.basis()) x = std::min(x, x ^ b);
        return x;
    };
    std::vector<std::uint64_t> label(std::size_t{1} << n, ~std::uint64_t{0});
    std::vector<std::uint64_t> outputs(std::size_t{1} << (n - dimension));
    for (std::uint64_t i = 0; i < outputs.size(); ++i) outputs[i] = i;
    shuffle(outputs, rng);
    std::uint64_t next = 0;
    auto oracle = VectorialFunction::from_fn(n, n, [&](std::uint64_t x) {
        const std::uint64_t rep = representative(x);
        if (label[rep] == ~std::uint64_t{0}) label[rep] = outputs[next++];
        return label[rep];
    });
    return DemoOracle{std::move(oracle), word_canonical_basis(basis)};
}

}  // namespace simonlab
