#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "simonlab/bitvec.hpp"
#include "simonlab/rng.hpp"

namespace simonlab {

// GF(2)[x] on coefficient masks (bit i = coefficient of x^i).
namespace gf2poly {
int degree(std::uint64_t poly);  // -1 for the zero polynomial
std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t mod(std::uint64_t a, std::uint64_t modulus);
bool is_irreducible(std::uint64_t poly);
// Smallest irreducible polynomial of the given degree when masks are
// compared as integers.
std::uint64_t least_irreducible(unsigned degree);
// Smallest primitive polynomial of the given degree (x generates the full
// multiplicative group).
std::uint64_t least_primitive(unsigned degree);
}  // namespace gf2poly

// GF(2^n) under a configurable irreducible modulus, n <= 24. Field elements
// are identified with F_2^n by bit i <-> coefficient of x^i.
class FieldSpec {
public:
    FieldSpec(unsigned degree, std::uint64_t modulus);
    // Lexicographically least irreducible modulus for the degree.
    static FieldSpec standard(unsigned degree);

    unsigned degree() const { return n_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t order() const { return std::uint64_t{1} << n_; }
    bool operator==(const FieldSpec& other) const {
        return n_ == other.n_ && modulus_ == other.modulus_;
    }
    bool operator!=(const FieldSpec& other) const { return !(*this == other); }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return a ^ b; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t inv(std::uint64_t a) const;  // throws on zero
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

    static constexpr unsigned kMaxDegree = 24;

private:
    unsigned n_;
    std::uint64_t modulus_;
};

class FieldElement {
public:
    FieldElement(FieldSpec spec, std::uint64_t value);
    static FieldElement zero(const FieldSpec& spec) { return {spec, 0}; }
    static FieldElement one(const FieldSpec& spec) { return {spec, 1}; }
    static FieldElement from_bits(const FieldSpec& spec, const BitVector& v);

    const FieldSpec& spec() const { return spec_; }
    std::uint64_t value() const { return value_; }
    BitVector to_bits() const;
    bool is_zero() const { return value_ == 0; }

    FieldElement operator+(const FieldElement& other) const;
    FieldElement operator*(const FieldElement& other) const;
    FieldElement inverse() const;
    bool operator==(const FieldElement& other) const {
        return spec_ == other.spec_ && value_ == other.value_;
    }
    bool operator!=(const FieldElement& other) const { return !(*this == other); }

private:
    FieldSpec spec_;
    std::uint64_t value_;
};

// Univariate polynomial over GF(2^n); coeffs[i] is the coefficient of x^i,
// the top stored coefficient is nonzero unless the polynomial is zero.
class FieldPolynomial {
public:
    explicit FieldPolynomial(FieldSpec spec) : spec_(spec) {}
    FieldPolynomial(FieldSpec spec, std::vector<std::uint64_t> coeffs);
    static FieldPolynomial constant(const FieldSpec& spec, std::uint64_t c);
    static FieldPolynomial random(const FieldSpec& spec, int degree, Rng& rng);

    const FieldSpec& spec() const { return spec_; }
    const std::vector<std::uint64_t>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::uint64_t coeff(std::size_t exponent) const {
        return exponent < coeffs_.size() ? coeffs_[exponent] : 0;
    }
    bool is_zero() const { return coeffs_.empty(); }

    std::uint64_t eval(std::uint64_t x) const;  // Horner
    FieldPolynomial operator+(const FieldPolynomial& other) const;
    FieldPolynomial operator*(const FieldPolynomial& other) const;
    FieldPolynomial scaled(std::uint64_t c) const;
    bool operator==(const FieldPolynomial& other) const {
        return spec_ == other.spec_ && coeffs_ == other.coeffs_;
    }

private:
    void normalize();

    FieldSpec spec_;
    std::vector<std::uint64_t> coeffs_;
};

// Unique polynomial of degree <= points.size()-1 through the given
// (x, y) pairs; abscissae must be pairwise distinct.
FieldPolynomial lagrange_interpolate(const FieldSpec& spec,
                                     const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points);

}  // namespace simonlab
