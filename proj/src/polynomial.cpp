#include "bmt/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmt {

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), Fr::zero());
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), Fr::zero());
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] -= o.c[i];
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return zero();
    Poly r;
    r.c.resize(c.size() + o.c.size() - 1, Fr::zero());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_zero()) continue;
        for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    std::size_t n = std::max(c.size(), o.c.size());
    for (std::size_t i = 0; i < n; ++i) {
        Fr a = i < c.size() ? c[i] : Fr::zero();
        Fr b = i < o.c.size() ? o.c[i] : Fr::zero();
        if (a != b) return false;
    }
    return true;
}

std::pair<Poly, Fr> divide_linear(const Poly& p, const Fr& a) {
    if (p.c.empty()) return {Poly::zero(), Fr::zero()};
    Poly q;
    q.c.resize(p.c.size() - 1, Fr::zero());
    Fr rem = p.c.back();
    for (std::size_t i = p.c.size() - 1; i-- > 0;) {
        q.c[i] = rem;
        rem = p.c[i] + rem * a;
    }
    return {std::move(q), rem};
}

Poly vanishing_poly(std::span<const Fr> points) {
    Poly z{{Fr::one()}};
    for (const Fr& m : points) {
        Poly next;
        next.c.resize(z.c.size() + 1, Fr::zero());
        for (std::size_t i = 0; i < z.c.size(); ++i) {
            next.c[i + 1] += z.c[i];
            next.c[i] -= z.c[i] * m;
        }
        z = std::move(next);
    }
    return z;
}

Poly interpolate(std::span<const std::pair<Fr, Fr>> points) {
    std::size_t n = points.size();
    if (n == 0) return Poly::zero();

    std::vector<Fr> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = points[i].first;
    {
        std::vector<Limbs<4>> sorted(n);
        for (std::size_t i = 0; i < n; ++i) sorted[i] = xs[i].repr();
        std::sort(sorted.begin(), sorted.end(),
                  [](const Limbs<4>& a, const Limbs<4>& b) { return limb::cmp(a, b) < 0; });
        for (std::size_t i = 1; i < n; ++i)
            if (sorted[i] == sorted[i - 1])
                throw std::invalid_argument("interpolate: duplicate x value");
    }

    Poly z = vanishing_poly(xs);

    // numerators N_i = Z/(x - x_i); denominators d_i = N_i(x_i)
    std::vector<Poly> nums(n);
    std::vector<Fr> dens(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [q, rem] = divide_linear(z, xs[i]);
        if (!rem.is_zero()) throw std::logic_error("interpolate: vanishing division remainder");
        dens[i] = q.eval(xs[i]);
        nums[i] = std::move(q);
    }
    batch_inverse(dens);

    Poly result;
    result.c.resize(n, Fr::zero());
    for (std::size_t i = 0; i < n; ++i) {
        Fr scale = points[i].second * dens[i];
        for (std::size_t j = 0; j < nums[i].c.size(); ++j) result.c[j] += nums[i].c[j] * scale;
    }
    result.trim();
    return result;
}

}  // namespace bmt
