#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cyclospec/errors.hpp"

namespace cyclospec {

// Chebyshev expansion sum_k c_k T_k(t) on a domain [lo, hi], t = 2(x-lo)/(hi-lo) - 1.
// Coefficients may be complex; evaluation points are real.
class Cheb {
public:
    Cheb() = default;
    Cheb(double lo, double hi, std::vector<cplx> coeffs)
        : lo_(lo), hi_(hi), c_(std::move(coeffs)) {
        if (!(hi_ > lo_)) throw DomainError("Cheb: empty domain");
        if (c_.empty()) c_.push_back(0.0);
    }

    static Cheb zero(double lo, double hi) { return Cheb(lo, hi, {cplx(0.0)}); }

    static Cheb constant(double lo, double hi, cplx v) { return Cheb(lo, hi, {v}); }

    // Interpolation through Chebyshev-Lobatto nodes; exact for polynomials of degree <= deg.
    static Cheb fit(const std::function<cplx(double)>& f, double lo, double hi, int deg) {
        if (deg < 0) throw DomainError("Cheb::fit: negative degree");
        const int n = deg;
        std::vector<cplx> fv(n + 1);
        for (int j = 0; j <= n; ++j) {
            double t = (n == 0) ? 0.0 : std::cos(M_PI * j / n);
            fv[j] = f(lo + 0.5 * (hi - lo) * (t + 1.0));
        }
        std::vector<cplx> c(n + 1, cplx(0.0));
        if (n == 0) {
            c[0] = fv[0];
        } else {
            for (int k = 0; k <= n; ++k) {
                cplx acc = 0.0;
                for (int j = 0; j <= n; ++j) {
                    double w = (j == 0 || j == n) ? 0.5 : 1.0;
                    acc += w * fv[j] * std::cos(M_PI * j * k / n);
                }
                c[k] = acc * (2.0 / n);
            }
            c[0] *= 0.5;
            c[n] *= 0.5;
        }
        return Cheb(lo, hi, std::move(c));
    }

    cplx operator()(double x) const {
        double t = 2.0 * (x - lo_) / (hi_ - lo_) - 1.0;
        // Clenshaw
        cplx b1 = 0.0, b2 = 0.0;
        for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k) {
            cplx b0 = c_[k] + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return c_[0] + t * b1 - b2;
    }

    Cheb derivative() const {
        const int n = static_cast<int>(c_.size()) - 1;
        std::vector<cplx> d(std::max(n, 1), cplx(0.0));
        if (n > 0) {
            std::vector<cplx> w(n + 2, cplx(0.0));
            for (int k = n; k >= 1; --k) w[k - 1] = w[k + 1] + 2.0 * double(k) * c_[k];
            w[0] *= 0.5;
            double scl = 2.0 / (hi_ - lo_);
            for (int k = 0; k < n; ++k) d[k] = w[k] * scl;
        }
        return Cheb(lo_, hi_, std::move(d));
    }

    // Definite integral over the full domain.
    cplx integrate() const {
        // int_{-1}^{1} T_k = 0 (k odd), 2/(1-k^2) (k even)
        cplx acc = 0.0;
        for (size_t k = 0; k < c_.size(); k += 2)
            acc += c_[k] * (2.0 / (1.0 - double(k) * double(k)));
        return acc * 0.5 * (hi_ - lo_);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }

    double maxImagCoeff() const {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    bool isZero(double tol = 0.0) const {
        for (const auto& v : c_)
            if (std::abs(v) > tol) return false;
        return true;
    }

private:
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<cplx> c_{cplx(0.0)};
};

} // namespace cyclospec
