#include "simonlab/gf2e.hpp"

#include <bit>
#include <map>
#include <stdexcept>

namespace simonlab {

namespace gf2poly {

int degree(std::uint64_t poly) {
    return poly == 0 ? -1 : 63 - std::countl_zero(poly);
}

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t acc = 0;
    while (b != 0) {
        if (b & 1) acc ^= a;
        a <<= 1;
        b >>= 1;
    }
    return acc;
}

std::uint64_t mod(std::uint64_t a, std::uint64_t modulus) {
    const int md = degree(modulus);
    if (md < 0) throw std::invalid_argument("mod: zero modulus");
    int d = degree(a);
    while (d >= md) {
        a ^= modulus << (d - md);
        d = degree(a);
    }
    return a;
}

bool is_irreducible(std::uint64_t poly) {
    const int d = degree(poly);
    if (d <= 0) return false;
    if ((poly & 1) == 0) return d == 1;  // divisible by x unless poly == x
    // Trial division by every polynomial of degree 1 .. d/2.
    for (int dd = 1; 2 * dd <= d; ++dd) {
        const std::uint64_t lo = std::uint64_t{1} << dd;
        for (std::uint64_t div = lo; div < (lo << 1); ++div) {
            if (mod(poly, div) == 0) return false;
        }
    }
    return true;
}

std::uint64_t least_irreducible(unsigned degree) {
    if (degree == 0 || degree > FieldSpec::kMaxDegree) {
        throw std::invalid_argument("least_irreducible: unsupported degree");
    }
    const std::uint64_t lo = std::uint64_t{1} << degree;
    for (std::uint64_t poly = lo; poly < (lo << 1); ++poly) {
        if (is_irreducible(poly)) return poly;
    }
    throw std::logic_error("no irreducible polynomial found");
}

namespace {

std::uint64_t powmod_x(std::uint64_t exponent, std::uint64_t modulus) {
    // x^exponent mod modulus by square and multiply.
    std::uint64_t result = 1;
    std::uint64_t base = mod(2, modulus);
    while (exponent > 0) {
        if (exponent & 1) result = mod(mul(result, base), modulus);
        exponent >>= 1;
        if (exponent > 0) base = mod(mul(base, base), modulus);
    }
    return result;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t value) {
    std::vector<std::uint64_t> factors;
    for (std::uint64_t p = 2; p * p <= value; ++p) {
        if (value % p == 0) {
            factors.push_back(p);
            while (value % p == 0) value /= p;
        }
    }
    if (value > 1) factors.push_back(value);
    return factors;
}

}  // namespace

std::uint64_t least_primitive(unsigned degree) {
    if (degree == 0 || degree > FieldSpec::kMaxDegree) {
        throw std::invalid_argument("least_primitive: unsupported degree");
    }
    const std::uint64_t group_order = (std::uint64_t{1} << degree) - 1;
    const auto factors = prime_factors(group_order);
    const std::uint64_t lo = std::uint64_t{1} << degree;
    for (std::uint64_t poly = lo; poly < (lo << 1); ++poly) {
        if (!is_irreducible(poly)) continue;
        bool primitive = true;
        for (auto p : factors) {
            if (powmod_x(group_order / p, poly) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return poly;
    }
    throw std::logic_error("no primitive polynomial found");
}

}  // namespace gf2poly

FieldSpec::FieldSpec(unsigned degree, std::uint64_t modulus) : n_(degree), modulus_(modulus) {
    if (degree == 0 || degree > kMaxDegree) {
        throw std::invalid_argument("FieldSpec: degree out of range");
    }
    if (gf2poly::degree(modulus) != static_cast<int>(degree)) {
        throw std::invalid_argument("FieldSpec: modulus degree mismatch");
    }
    if (!gf2poly::is_irreducible(modulus)) {
        throw std::invalid_argument("FieldSpec: modulus is reducible");
    }
}

FieldSpec FieldSpec::standard(unsigned degree) {
    return FieldSpec(degree, gf2poly::least_irreducible(degree));
}

std::uint64_t FieldSpec::mul(std::uint64_t a, std::uint64_t b) const {
    return gf2poly::mod(gf2poly::mul(a, b), modulus_);
}

std::uint64_t FieldSpec::inv(std::uint64_t a) const {
    if (a == 0) throw std::invalid_argument("inv: zero has no inverse");
    // Extended Euclid over GF(2)[x].
    std::uint64_t r0 = modulus_, r1 = a;
    std::uint64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const int shift_limit = gf2poly::degree(r0) - gf2poly::degree(r1);
        if (shift_limit < 0) {
            std::swap(r0, r1);
            std::swap(t0, t1);
            continue;
        }
        r0 ^= r1 << shift_limit;
        t0 ^= t1 << shift_limit;
    }
    // r0 is now gcd == 1 (modulus irreducible, a nonzero).
    return gf2poly::mod(t0, modulus_);
}

std::uint64_t FieldSpec::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t result = 1;
    std::uint64_t base = a;
    while (e > 0) {
        if (e & 1) result = mul(result, base);
        e >>= 1;
        if (e > 0) base = mul(base, base);
    }
    return result;
}

FieldElement::FieldElement(FieldSpec spec, std::uint64_t value) : spec_(spec), value_(value) {
    if (value_ >> spec_.degree() != 0) {
        throw std::invalid_argument("FieldElement: value out of range");
    }
}

FieldElement FieldElement::from_bits(const FieldSpec& spec, const BitVector& v) {
    if (v.size() != spec.degree()) {
        throw std::invalid_argument("from_bits: length mismatch");
    }
    return {spec, v.as_word()};
}

BitVector FieldElement::to_bits() const {
    return BitVector::from_word(value_, spec_.degree());
}

FieldElement FieldElement::operator+(const FieldElement& other) const {
    if (spec_ != other.spec_) throw std::invalid_argument("field add: spec mismatch");
    return {spec_, value_ ^ other.value_};
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
    if (spec_ != other.spec_) throw std::invalid_argument("field mul: spec mismatch");
    return {spec_, spec_.mul(value_, other.value_)};
}

FieldElement FieldElement::inverse() const {
    return {spec_, spec_.inv(value_)};
}

FieldPolynomial::FieldPolynomial(FieldSpec spec, std::vector<std::uint64_t> coeffs)
    : spec_(spec), coeffs_(std::move(coeffs)) {
    for (auto c : coeffs_) {
        if (c >> spec_.degree() != 0) {
            throw std::invalid_argument("FieldPolynomial: coefficient out of range");
        }
    }
    normalize();
}

FieldPolynomial FieldPolynomial::constant(const FieldSpec& spec, std::uint64_t c) {
    return FieldPolynomial(spec, {c});
}

FieldPolynomial FieldPolynomial::random(const FieldSpec& spec, int degree, Rng& rng) {
    if (degree < 0) return FieldPolynomial(spec);
    std::vector<std::uint64_t> coeffs(degree + 1);
    for (auto& c : coeffs) c = rng.bits(spec.degree());
    while (coeffs.back() == 0) coeffs.back() = rng.bits(spec.degree());
    return FieldPolynomial(spec, std::move(coeffs));
}

std::uint64_t FieldPolynomial::eval(std::uint64_t x) const {
    std::uint64_t acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        acc = spec_.mul(acc, x) ^ coeffs_[i];
    }
    return acc;
}

FieldPolynomial FieldPolynomial::operator+(const FieldPolynomial& other) const {
    if (spec_ != other.spec_) throw std::invalid_argument("poly add: spec mismatch");
    std::vector<std::uint64_t> coeffs(std::max(coeffs_.size(), other.coeffs_.size()), 0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = coeff(i) ^ other.coeff(i);
    }
    return FieldPolynomial(spec_, std::move(coeffs));
}

FieldPolynomial FieldPolynomial::operator*(const FieldPolynomial& other) const {
    if (spec_ != other.spec_) throw std::invalid_argument("poly mul: spec mismatch");
    if (is_zero() || other.is_zero()) return FieldPolynomial(spec_);
    std::vector<std::uint64_t> coeffs(coeffs_.size() + other.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < other.coeffs_.size(); ++j) {
            coeffs[i + j] ^= spec_.mul(coeffs_[i], other.coeffs_[j]);
        }
    }
    return FieldPolynomial(spec_, std::move(coeffs));
}

FieldPolynomial FieldPolynomial::scaled(std::uint64_t c) const {
    std::vector<std::uint64_t> coeffs = coeffs_;
    for (auto& v : coeffs) v = spec_.mul(v, c);
    return FieldPolynomial(spec_, std::move(coeffs));
}

void FieldPolynomial::normalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

FieldPolynomial lagrange_interpolate(const FieldSpec& spec,
                                     const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) {
    if (points.empty()) throw std::invalid_argument("interpolate: no points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (points[i].first == points[j].first) {
                throw std::invalid_argument("interpolate: duplicate abscissa");
            }
        }
    }

    FieldPolynomial acc(spec);
    for (std::size_t i = 0; i < points.size(); ++i) {
        // l_i(x) = prod_{j != i} (x - x_j) / (x_i - x_j), char 2 so - is +.
        FieldPolynomial basis = FieldPolynomial::constant(spec, 1);
        std::uint64_t denom = 1;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            basis = basis * FieldPolynomial(spec, {points[j].first, 1});
            denom = spec.mul(denom, points[i].first ^ points[j].first);
        }
        acc = acc + basis.scaled(spec.mul(points[i].second, spec.inv(denom)));
    }
    return acc;
}

}  // namespace simonlab
