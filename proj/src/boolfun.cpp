#include "simonlab/boolfun.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>

namespace simonlab {

namespace {

std::uint64_t output_mask(unsigned tau) {
    return tau >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << tau) - 1;
}

}  // namespace

VectorialFunction::VectorialFunction(unsigned n, unsigned tau, std::vector<std::uint64_t> table,
                                     unsigned cap)
    : n_(n), tau_(tau), table_(std::move(table)) {
    if (cap > kHardCap) cap = kHardCap;
    if (n == 0 || n > cap) throw std::invalid_argument("VectorialFunction: n out of range");
    if (tau == 0 || tau > 64) throw std::invalid_argument("VectorialFunction: tau out of range");
    if (table_.size() != (std::size_t{1} << n)) {
        throw std::invalid_argument("VectorialFunction: table size mismatch");
    }
    const std::uint64_t mask = output_mask(tau);
    for (auto v : table_) {
        if ((v & ~mask) != 0) throw std::invalid_argument("VectorialFunction: output exceeds tau bits");
    }
}

VectorialFunction VectorialFunction::from_fn(unsigned n, unsigned tau,
                                             const std::function<std::uint64_t(std::uint64_t)>& fn,
                                             unsigned cap) {
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < table.size(); ++x) table[x] = fn(x);
    return VectorialFunction(n, tau, std::move(table), cap);
}

VectorialFunction VectorialFunction::random(unsigned n, unsigned tau, Rng& rng) {
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    for (auto& v : table) v = rng.bits(tau);
    return VectorialFunction(n, tau, std::move(table));
}

VectorialFunction VectorialFunction::random_permutation(unsigned n, Rng& rng) {
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < table.size(); ++x) table[x] = x;
    shuffle(table, rng);
    return VectorialFunction(n, n, std::move(table));
}

VectorialFunction VectorialFunction::derivative(const BitVector& direction) const {
    if (direction.size() != n_) throw std::invalid_argument("derivative: length mismatch");
    const std::uint64_t a = direction.as_word();
    std::vector<std::uint64_t> table(table_.size());
    for (std::uint64_t x = 0; x < table_.size(); ++x) table[x] = table_[x] ^ table_[x ^ a];
    return VectorialFunction(n_, tau_, std::move(table), kHardCap);
}

VectorialFunction VectorialFunction::component(const BitVector& lambda) const {
    if (lambda.size() != tau_) throw std::invalid_argument("component: length mismatch");
    const std::uint64_t mask = lambda.as_word();
    std::vector<std::uint64_t> table(table_.size());
    for (std::uint64_t x = 0; x < table_.size(); ++x) {
        table[x] = std::popcount(table_[x] & mask) & 1;
    }
    return VectorialFunction(n_, 1, std::move(table), kHardCap);
}

bool VectorialFunction::has_period(std::uint64_t s) const {
    for (std::uint64_t x = 0; x < table_.size(); ++x) {
        if (table_[x] != table_[x ^ s]) return false;
    }
    return true;
}

std::vector<BitVector> VectorialFunction::period_space_bruteforce() const {
    // Any period must map 0 into the preimage class of f(0); scan those
    // candidates and keep the ones that survive the full check.
    std::vector<std::uint64_t> periods;
    const std::uint64_t anchor = table_[0];
    for (std::uint64_t s = 1; s < table_.size(); ++s) {
        if (table_[s] == anchor && has_period(s)) periods.push_back(s);
    }
    std::vector<BitVector> basis;
    for (auto w : word_canonical_basis(periods)) basis.push_back(BitVector::from_word(w, n_));
    return basis;
}

void VectorialFunction::save(std::ostream& out) const {
    const auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put32(n_);
    put32(tau_);
    for (auto v : table_) {
        for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void VectorialFunction::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    save(out);
}

VectorialFunction VectorialFunction::load(std::istream& in, unsigned cap) {
    const auto get32 = [&]() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const int c = in.get();
            if (c < 0) throw std::runtime_error("truncated truth table");
            v |= static_cast<std::uint32_t>(c) << (8 * i);
        }
        return v;
    };
    const std::uint32_t n = get32();
    const std::uint32_t tau = get32();
    if (n == 0 || n > kHardCap) throw std::runtime_error("truth table header: bad n");
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    for (auto& v : table) {
        v = 0;
        for (int i = 0; i < 8; ++i) {
            const int c = in.get();
            if (c < 0) throw std::runtime_error("truncated truth table");
            v |= static_cast<std::uint64_t>(c) << (8 * i);
        }
    }
    return VectorialFunction(n, tau, std::move(table), cap);
}

VectorialFunction VectorialFunction::load_file(const std::string& path, unsigned cap) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in, cap);
}

unsigned AnfTable::degree() const {
    unsigned deg = 0;
    for (std::uint64_t u = 0; u < coeffs.size(); ++u) {
        if (coeffs[u] != 0) deg = std::max<unsigned>(deg, std::popcount(u));
    }
    return deg;
}

namespace {

void mobius_butterfly(std::vector<std::uint64_t>& table, unsigned n) {
    for (unsigned bit = 0; bit < n; ++bit) {
        const std::uint64_t step = std::uint64_t{1} << bit;
        for (std::uint64_t x = 0; x < table.size(); ++x) {
            if (x & step) table[x] ^= table[x ^ step];
        }
    }
}

}  // namespace

AnfTable mobius_transform(const VectorialFunction& f) {
    AnfTable anf{f.input_bits(), f.output_bits(), f.table()};
    mobius_butterfly(anf.coeffs, anf.n);
    return anf;
}

VectorialFunction mobius_inverse(const AnfTable& anf) {
    std::vector<std::uint64_t> table = anf.coeffs;
    mobius_butterfly(table, anf.n);
    return VectorialFunction(anf.n, anf.tau, std::move(table), VectorialFunction::kHardCap);
}

unsigned anf_degree(const VectorialFunction& f) {
    return mobius_transform(f).degree();
}

int binomial_parity(std::uint64_t m, std::uint64_t k) {
    return (m & k) == k ? 1 : 0;
}

int binomial_sum_parity(std::uint64_t m, std::uint64_t limit) {
    int parity = 0;
    for (std::uint64_t i = 0; i <= limit; ++i) parity ^= binomial_parity(m, i);
    return parity;
}

std::uint64_t s_set_size(unsigned n, unsigned t) {
    if (t > n) throw std::invalid_argument("s_set_size: t > n");
    unsigned __int128 total = 0;
    unsigned __int128 binom = 1;  // C(n, 0)
    for (unsigned j = 0; j <= t; ++j) {
        if (j > 0) {
            binom = binom * (n - j + 1) / j;
        }
        total += binom;
    }
    if (total > ~std::uint64_t{0}) throw std::overflow_error("s_set_size: overflow");
    return static_cast<std::uint64_t>(total);
}

LowWeightSamples LowWeightSamples::collect(unsigned n, unsigned tau, unsigned d,
                                           const std::function<std::uint64_t(std::uint64_t)>& fn) {
    LowWeightSamples samples{n, tau, d, {}};
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        if (static_cast<unsigned>(std::popcount(x)) <= d) {
            samples.pairs.emplace_back(x, fn(x));
        }
    }
    return samples;
}

bool LowWeightSamples::complete() const {
    std::vector<bool> seen(std::size_t{1} << n, false);
    std::size_t count = 0;
    for (const auto& [x, y] : pairs) {
        (void)y;
        if (x >= seen.size() || static_cast<unsigned>(std::popcount(x)) > d || seen[x]) return false;
        seen[x] = true;
        ++count;
    }
    return count == s_set_size(n, d);
}

VectorialFunction recover_from_low_weight(const LowWeightSamples& samples) {
    if (!samples.complete()) {
        throw std::invalid_argument("recover_from_low_weight: samples do not cover S_d");
    }
    const unsigned n = samples.n;
    const unsigned d = samples.d;
    const std::size_t size = std::size_t{1} << n;

    std::vector<std::uint64_t> known(size, 0);
    for (const auto& [x, y] : samples.pairs) known[x] = y;

    // Coefficient in the reconstruction formula depends only on the weights:
    // parity of sum_{i=0..d-wt(y)} C(wt(x)-wt(y), i).
    std::vector<std::vector<int>> coeff(n + 1, std::vector<int>(std::min(d, n) + 1, 0));
    for (unsigned wx = 0; wx <= n; ++wx) {
        for (unsigned wy = 0; wy <= std::min(d, wx); ++wy) {
            coeff[wx][wy] = binomial_sum_parity(wx - wy, d - wy);
        }
    }

    std::vector<std::uint64_t> table(size, 0);
    for (std::uint64_t x = 0; x < size; ++x) {
        const unsigned wx = std::popcount(x);
        if (wx <= d) {
            table[x] = known[x];
            continue;
        }
        std::uint64_t acc = 0;
        // Enumerate submasks y of x with wt(y) <= d.
        std::uint64_t y = x;
        for (;;) {
            const unsigned wy = std::popcount(y);
            if (wy <= d && coeff[wx][wy]) acc ^= known[y];
            if (y == 0) break;
            y = (y - 1) & x;
        }
        table[x] = acc;
    }

    VectorialFunction result(n, samples.tau, std::move(table), VectorialFunction::kHardCap);
    if (anf_degree(result) > d) {
        throw std::runtime_error("recover_from_low_weight: reconstruction exceeds degree bound");
    }
    return result;
}

std::uint64_t PreimageSpectrum::sample(Rng& rng) const {
    std::uint64_t r = rng.below(denominator);
    for (std::uint64_t y = 0; y < numerators.size(); ++y) {
        if (r < numerators[y]) return y;
        r -= numerators[y];
    }
    throw std::logic_error("spectrum sample: mass mismatch");
}

PreimageSpectrum preimage_spectrum(const VectorialFunction& f, std::uint64_t a) {
    const std::size_t size = f.domain_size();
    std::vector<std::int64_t> wht(size, 0);
    std::uint64_t preimages = 0;
    for (std::uint64_t x = 0; x < size; ++x) {
        if (f(x) == a) {
            wht[x] = 1;
            ++preimages;
        }
    }
    if (preimages == 0) throw std::invalid_argument("preimage_spectrum: a not in image");

    // Walsh-Hadamard transform of the indicator of Omega_a, unnormalized.
    for (std::size_t half = 1; half < size; half <<= 1) {
        for (std::size_t x = 0; x < size; ++x) {
            if (x & half) continue;
            const std::int64_t u = wht[x];
            const std::int64_t v = wht[x | half];
            wht[x] = u + v;
            wht[x | half] = u - v;
        }
    }

    PreimageSpectrum spectrum;
    spectrum.n = f.input_bits();
    spectrum.denominator = preimages << f.input_bits();
    spectrum.numerators.resize(size);
    for (std::size_t y = 0; y < size; ++y) {
        spectrum.numerators[y] = static_cast<std::uint64_t>(wht[y] * wht[y]);
    }
    return spectrum;
}

}  // namespace simonlab
