#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bmt/field.hpp"

namespace bmt {

// Dense polynomial over Fr, coefficients lowest-degree first.
struct Poly {
    std::vector<Fr> c;

    static Poly zero() { return {}; }
    static Poly constant(const Fr& v) { return {{v}}; }

    // index of the highest nonzero coefficient; -1 for the zero polynomial
    int degree() const {
        for (std::size_t i = c.size(); i-- > 0;)
            if (!c[i].is_zero()) return (int)i;
        return -1;
    }

    bool is_zero() const { return degree() < 0; }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    Fr eval(const Fr& x) const {
        Fr acc = Fr::zero();
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    bool operator==(const Poly& o) const;
};

// Synthetic division by (x - a): returns {quotient, remainder}.
std::pair<Poly, Fr> divide_linear(const Poly& p, const Fr& a);

// prod (x - m) over the given points
Poly vanishing_poly(std::span<const Fr> points);

// Lagrange interpolation; throws on duplicate x values.
Poly interpolate(std::span<const std::pair<Fr, Fr>> points);

}  // namespace bmt
