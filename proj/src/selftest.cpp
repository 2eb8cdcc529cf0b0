#include "simonlab/selftest.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "simonlab/attacks.hpp"
#include "simonlab/bitvec.hpp"
#include "simonlab/boolfun.hpp"
#include "simonlab/farfalle.hpp"
#include "simonlab/gf2e.hpp"
#include "simonlab/rng.hpp"
#include "simonlab/simon.hpp"

namespace simonlab::selftest {

namespace {

struct Battery {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool passed, const std::string& detail = "") {
        results.push_back({name, passed, detail});
    }
};

std::string count_detail(std::size_t good, std::size_t total) {
    std::ostringstream out;
    out << good << "/" << total;
    return out.str();
}

void bitlinalg_checks(Battery& battery, Rng& rng) {
    std::size_t rank_ok = 0, span_ok = 0, pow_ok = 0;
    const std::size_t trials = 25;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t rows = 1 + rng.below(10);
        const std::size_t cols = 1 + rng.below(12);
        const BitMatrix m = BitMatrix::random(rows, cols, rng);
        const auto basis = m.null_space();

        std::size_t kernel = 0;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << cols); ++v) {
            if (m.mul(BitVector::from_word(v, cols)).is_zero()) ++kernel;
        }
        if (m.rank() + basis.size() == cols && kernel == (std::size_t{1} << basis.size())) {
            ++rank_ok;
        }

        const BitVector x0 = BitVector::random(cols, rng);
        const BitVector rhs = m.mul(x0);
        const auto solution = m.solve_affine(rhs);
        bool all_solve = solution.has_value();
        if (solution) {
            for (std::uint64_t mask = 0;
                 mask < (std::uint64_t{1} << solution->null_basis.size()) && all_solve; ++mask) {
                BitVector v = solution->particular;
                for (std::size_t i = 0; i < solution->null_basis.size(); ++i) {
                    if (mask & (std::uint64_t{1} << i)) v ^= solution->null_basis[i];
                }
                all_solve = m.mul(v) == rhs;
            }
        }
        if (all_solve) ++span_ok;

        const BitMatrix a = BitMatrix::random(5, 5, rng);
        const std::uint64_t i = rng.below(17), j = rng.below(17);
        if (a.pow(i + j) == a.pow(i).mul(a.pow(j))) ++pow_ok;
    }
    battery.check("bitlinalg.rank_nullity", rank_ok == trials, count_detail(rank_ok, trials));
    battery.check("bitlinalg.affine_span", span_ok == trials, count_detail(span_ok, trials));
    battery.check("bitlinalg.matpow_additivity", pow_ok == trials, count_detail(pow_ok, trials));
}

void finitefield_checks(Battery& battery, Rng& rng) {
    std::size_t axiom_ok = 0, axiom_total = 0;
    std::size_t frobenius_ok = 0, frobenius_total = 0;
    for (unsigned n : {4u, 8u, 12u}) {
        const FieldSpec spec = FieldSpec::standard(n);
        for (int t = 0; t < 30; ++t) {
            const std::uint64_t a = rng.bits(n), b = rng.bits(n), c = rng.bits(n);
            ++axiom_total;
            if (spec.mul(a, b) == spec.mul(b, a) &&
                spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c)) &&
                spec.mul(a, b ^ c) == (spec.mul(a, b) ^ spec.mul(a, c))) {
                ++axiom_ok;
            }
            ++frobenius_total;
            if (spec.mul(a ^ b, a ^ b) == (spec.mul(a, a) ^ spec.mul(b, b))) ++frobenius_ok;
        }
    }
    battery.check("finitefield.axioms", axiom_ok == axiom_total,
                  count_detail(axiom_ok, axiom_total));
    battery.check("finitefield.frobenius", frobenius_ok == frobenius_total,
                  count_detail(frobenius_ok, frobenius_total));

    std::size_t interp_ok = 0;
    const std::size_t interp_total = 24;
    for (std::size_t t = 0; t < interp_total; ++t) {
        const unsigned n = 4 + rng.below(9);
        const FieldSpec spec = FieldSpec::standard(n);
        const int degree = static_cast<int>(rng.below(9));
        const FieldPolynomial planted = FieldPolynomial::random(spec, degree, rng);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
        std::uint64_t x = rng.bits(n);
        while (points.size() < static_cast<std::size_t>(degree) + 1) {
            points.emplace_back(x, planted.eval(x));
            x = (x + 1) & ((std::uint64_t{1} << n) - 1);
        }
        if (lagrange_interpolate(spec, points) == planted) ++interp_ok;
    }
    battery.check("finitefield.interpolation_roundtrip", interp_ok == interp_total,
                  count_detail(interp_ok, interp_total));
}

void boolfunc_checks(Battery& battery, Rng& rng) {
    std::size_t mass_ok = 0, orth_ok = 0, total = 0;
    for (int t = 0; t < 8; ++t) {
        const VectorialFunction inner = VectorialFunction::random(4, 3, rng);
        const VectorialFunction f =
            VectorialFunction::from_fn(6, 3, [&](std::uint64_t x) { return inner(x & 0xf); });
        const auto periods = f.period_space_bruteforce();
        for (std::uint64_t probe = 0; probe < f.domain_size(); probe += 5) {
            ++total;
            const PreimageSpectrum spectrum = preimage_spectrum(f, f(probe));
            std::uint64_t mass = 0;
            bool orthogonal = true;
            for (std::uint64_t y = 0; y < spectrum.numerators.size(); ++y) {
                mass += spectrum.numerators[y];
                if (spectrum.numerators[y] != 0) {
                    for (const auto& p : periods) {
                        orthogonal &= (std::popcount(y & p.as_word()) & 1) == 0;
                    }
                }
            }
            if (mass == spectrum.denominator) ++mass_ok;
            if (orthogonal) ++orth_ok;
        }
    }
    battery.check("boolfunc.spectrum_total_mass", mass_ok == total, count_detail(mass_ok, total));
    battery.check("boolfunc.spectrum_orthogonality", orth_ok == total,
                  count_detail(orth_ok, total));

    // Exhaustive n = 4, d <= 2: reconstruction is the identity on every
    // function of degree <= 2 (and the sampled planted cases beyond).
    std::size_t recover_ok = 0, recover_total = 0;
    for (std::uint32_t table_bits = 0; table_bits < (1u << 16); ++table_bits) {
        std::vector<std::uint64_t> table(16);
        for (unsigned x = 0; x < 16; ++x) table[x] = (table_bits >> x) & 1;
        const VectorialFunction f(4, 1, std::move(table));
        if (anf_degree(f) > 2) continue;
        ++recover_total;
        const auto samples =
            LowWeightSamples::collect(4, 1, 2, [&](std::uint64_t x) { return f(x); });
        if (recover_from_low_weight(samples) == f) ++recover_ok;
    }
    battery.check("boolfunc.recover_identity",
                  recover_ok == recover_total && recover_total == 2048,
                  count_detail(recover_ok, recover_total));

    bool lucas_ok = true;
    std::vector<std::vector<std::uint64_t>> pascal(65);
    for (unsigned m = 0; m <= 64; ++m) {
        pascal[m].assign(m + 1, 1);
        for (unsigned k = 1; k < m; ++k) pascal[m][k] = pascal[m - 1][k - 1] + pascal[m - 1][k];
        for (unsigned k = 0; k <= 64; ++k) {
            const int expected = k <= m ? static_cast<int>(pascal[m][k] % 2) : 0;
            lucas_ok &= binomial_parity(m, k) == expected;
        }
    }
    battery.check("boolfunc.lucas", lucas_ok);
}

void simon_checks(Battery& battery, Rng& rng) {
    std::size_t violations = 0;
    const DemoOracle demo = make_planted_subspace_oracle(9, 1, rng.next());
    for (int i = 0; i < 10000; ++i) {
        const SimonSample sample = sample_measurement(demo.oracle, rng);
        if (std::popcount(sample.y & demo.planted_basis[0]) & 1) ++violations;
    }
    battery.check("simon.sample_orthogonality", violations == 0,
                  count_detail(10000 - violations, 10000));

    std::size_t recover_ok = 0;
    std::uint64_t queries = 0;
    const std::size_t runs = 60;
    const StabilizationPolicy stop{};
    for (std::size_t run = 0; run < runs; ++run) {
        const unsigned n = 6 + run % 6;
        const unsigned dim = 1 + run % 2;
        const DemoOracle oracle = make_planted_subspace_oracle(n, dim, rng.next());
        const SimonRunReport report = recover_period_space(oracle.oracle, stop, rng);
        queries += report.superposition_queries;
        if (report.verified && report.recovered.basis == oracle.planted_basis) ++recover_ok;
    }
    battery.check("simon.exact_recovery", recover_ok == runs, count_detail(recover_ok, runs));
    battery.check("simon.query_budget",
                  queries <= runs * (11 + stop.extra + 4),  // mean bound at n <= 11
                  count_detail(queries / runs, 11 + stop.extra + 4));
}

void farfalle_checks(Battery& battery, Rng& rng) {
    std::size_t mask_ok = 0;
    const std::size_t mask_total = 32;
    for (std::size_t t = 0; t < mask_total; ++t) {
        const unsigned b = 4 + rng.below(13);
        const FarfalleParams params = FarfalleParams::seeded(b, rng.next());
        const BitVector key = BitVector::random(rng.below(b), rng);
        const FarfalleKeyState state = FarfalleKeyState::derive(params, key);
        if (recover_key_from_mask(params, state.mask) == key) ++mask_ok;
    }
    battery.check("farfalle.mask_roundtrip", mask_ok == mask_total,
                  count_detail(mask_ok, mask_total));

    // Output blocks are periodic in a duplicated variable block, for both
    // roll kinds, and the brute-force space matches the asserted period.
    std::size_t period_ok = 0;
    const std::size_t period_total = 20;
    for (std::size_t t = 0; t < period_total; ++t) {
        const unsigned b = 6 + 2 * (t % 3);
        const RollKind kind = t % 2 == 0 ? RollKind::Linear : RollKind::Table;
        const FarfalleInstance inst = FarfalleInstance::seeded(b, rng.next(), kind);
        const FarfallePrf prf(inst.params, inst.key);
        const auto spec = ConstructionSpec::c1a(t % 2);
        const VectorialFunction oracle = build_construction(spec, prf);
        const auto asserted = construction_asserted_periods(spec, inst.params, inst.key);
        const auto brute = oracle.period_space_bruteforce();
        if (brute.size() == 1 && brute[0].as_word() == asserted[0]) ++period_ok;
    }
    battery.check("farfalle.construction_periods", period_ok == period_total,
                  count_detail(period_ok, period_total));

    std::size_t wbc_ok = 0;
    const std::size_t wbc_total = 6;
    for (std::size_t t = 0; t < wbc_total; ++t) {
        const unsigned b = 4 + rng.below(5);
        const FarfalleInstance inst = FarfalleInstance::seeded(b, rng.next());
        const FarfallePrf prf(inst.params, inst.key);
        const BitVector tweak = BitVector::random(b, rng);
        bool all_ok = true;
        for (int i = 0; i < 32 && all_ok; ++i) {
            const BitVector plain = BitVector::random(2 * b + rng.below(3 * b), rng);
            all_ok = wbc_decipher(prf, tweak, wbc_encipher(prf, tweak, plain)) == plain;
        }
        if (all_ok) ++wbc_ok;
    }
    battery.check("farfalle.wbc_invertible", wbc_ok == wbc_total,
                  count_detail(wbc_ok, wbc_total));
}

void attack_checks(Battery& battery, Rng& rng) {
    // Simon recovers exactly the brute-force period space on construction
    // oracles, all four variants.
    std::size_t construction_ok = 0;
    const std::size_t construction_total = 8;
    for (std::size_t t = 0; t < construction_total; ++t) {
        const FarfalleInstance inst = FarfalleInstance::seeded(
            8, rng.next(), t % 2 == 0 ? RollKind::Linear : RollKind::Table);
        const FarfallePrf prf(inst.params, inst.key);
        ConstructionSpec spec;
        switch (t % 4) {
            case 0: spec = ConstructionSpec::c1a(); break;
            case 1: spec = ConstructionSpec::c1b(rng.bits(8), rng.bits(8)); break;
            case 2: spec = ConstructionSpec::c2i({rng.bits(8)}, 0, 2); break;
            default: spec = ConstructionSpec::c2ii(rng.bits(8), rng.bits(8)); break;
        }
        const VectorialFunction oracle = build_construction(spec, prf);
        const SimonRunReport report = recover_period_space(oracle, {}, rng);
        PeriodSpace expected;
        expected.n = oracle.input_bits();
        expected.basis =
            word_canonical_basis(construction_asserted_periods(spec, inst.params, inst.key));
        if (report.verified && report.recovered == expected) ++construction_ok;
    }
    battery.check("attacks.construction_vs_asserted", construction_ok == construction_total,
                  count_detail(construction_ok, construction_total));

    std::size_t extract_ok = 0;
    const std::size_t extract_total = 4;
    for (std::size_t t = 0; t < extract_total; ++t) {
        const FarfalleInstance inst = FarfalleInstance::seeded(12, rng.next(), RollKind::Linear);
        const KeyExtractionRun run = run_key_extraction(inst, {{0, 1}}, rng.next());
        if (run.report.recovered_key && *run.report.recovered_key == inst.key.key) ++extract_ok;
    }
    battery.check("attacks.extraction_exact", extract_ok == extract_total,
                  count_detail(extract_ok, extract_total));

    std::size_t forgery_ok = 0;
    const std::size_t forgery_total = 6;
    for (std::size_t t = 0; t < forgery_total; ++t) {
        const FarfalleInstance inst = FarfalleInstance::seeded(8, rng.next());
        ForgeryResult result;
        switch (t % 3) {
            case 0: result = forge_sae(inst, 16, rng.next()); break;
            case 1: result = forge_siv_variant_i(inst, 16, rng.next()); break;
            default: result = forge_siv_variant_ii(inst, 16, rng.next()); break;
        }
        if (result.accepted && result.fresh) ++forgery_ok;
    }
    battery.check("attacks.forgery_freshness", forgery_ok == forgery_total,
                  count_detail(forgery_ok, forgery_total));

    // Candidate-filter soundness on a generic public function.
    const VectorialFunction public_f = VectorialFunction::random(8, 8, rng);
    const std::uint64_t k = 1 + rng.below(254);
    std::uint64_t sigma = 1 + rng.below(255);
    if (sigma == k) sigma ^= 0x80;
    const std::uint64_t c = rng.bits(8);
    std::vector<std::uint64_t> s_table(256);
    for (std::uint64_t x = 0; x < 256; ++x) {
        s_table[x] = public_f(x ^ k) ^ public_f(x ^ sigma ^ k) ^ c;
    }
    const auto residual_constant = [&](std::uint64_t kappa) {
        const std::uint64_t head = s_table[0] ^ public_f(kappa) ^ public_f(sigma ^ kappa);
        for (std::uint64_t x = 1; x < 256; ++x) {
            if ((s_table[x] ^ public_f(x ^ kappa) ^ public_f(x ^ sigma ^ kappa)) != head) {
                return false;
            }
        }
        return true;
    };
    bool filter_ok = residual_constant(k) && residual_constant(k ^ sigma);
    for (int t = 0; t < 64 && filter_ok; ++t) {
        std::uint64_t kappa = rng.bits(8);
        if (kappa == 0 || kappa == k || kappa == (k ^ sigma)) continue;
        filter_ok = !residual_constant(kappa);
    }
    battery.check("attacks.filter_soundness", filter_ok);

    // Lagrange pipeline on an isolating degree-8 instance.
    {
        const FieldSpec spec = FieldSpec::standard(8);
        std::uint64_t key = 1 + rng.below(254);
        const std::uint64_t shift = 1 + rng.below(255);
        if (key == shift) key ^= 0x11;
        FieldPolynomial poly(spec);
        for (;;) {
            poly = FieldPolynomial::random(spec, 8, rng);
            if (poly.coeff(7) == 0) continue;
            const VectorialFunction table = VectorialFunction::from_fn(
                8, 8, [&](std::uint64_t x) { return poly.eval(x); });
            if (lagrange_instance_isolates(table, shift)) break;
        }
        const auto sampler = [&](std::uint64_t x) {
            return poly.eval(x ^ key) ^ poly.eval(x ^ shift ^ key);
        };
        const RoundKeyExtraction result =
            extract_round_key_lagrange(poly, shift, sampler, rng.next());
        const std::vector<std::uint64_t> expected{std::min(key, key ^ shift),
                                                  std::max(key, key ^ shift)};
        battery.check("attacks.lagrange_pipeline",
                      result.determined && result.survivors == expected &&
                          result.period_samples == 8);
    }

    // ANF pipeline: reconstruction equals brute force and k survives.
    {
        AnfTable anf{8, 8, std::vector<std::uint64_t>(256, 0)};
        for (std::uint64_t u = 0; u < 256; ++u) {
            if (static_cast<unsigned>(std::popcount(u)) <= 3) anf.coeffs[u] = rng.bits(8);
        }
        const VectorialFunction cubic = mobius_inverse(anf);
        std::uint64_t key = 1 + rng.below(254);
        const std::uint64_t shift = 1 + rng.below(255);
        if (key == shift) key ^= 0x23;
        const auto sampler = [&](std::uint64_t x) {
            return cubic(x ^ key) ^ cubic(x ^ shift ^ key);
        };
        const RoundKeyExtraction result = extract_round_key_anf(cubic, shift, sampler, rng.next());
        bool anf_ok = std::find(result.survivors.begin(), result.survivors.end(), key) !=
                      result.survivors.end();
        anf_ok &= result.period_samples == s_set_size(8, result.degree - 1);
        const std::uint64_t lambda = result.lambda;
        for (std::uint64_t x = 0; x < 256 && anf_ok; ++x) {
            anf_ok = result.reconstructed_component[x] ==
                     static_cast<std::uint64_t>(std::popcount(lambda & sampler(x)) & 1);
        }
        battery.check("attacks.anf_pipeline", anf_ok);
    }
}

}  // namespace

std::vector<CheckResult> run_all(std::uint64_t seed) {
    Battery battery;
    Rng rng(seed);
    bitlinalg_checks(battery, rng);
    finitefield_checks(battery, rng);
    boolfunc_checks(battery, rng);
    simon_checks(battery, rng);
    farfalle_checks(battery, rng);
    attack_checks(battery, rng);
    return battery.results;
}

}  // namespace simonlab::selftest
