#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cyclospec/errors.hpp"

namespace cyclospec {

// value = v * exp(lg); keeps |v| in a safe range so products of exponentially
// large/small factors never overflow.
struct ScaledC {
    cplx v{1.0, 0.0};
    double lg = 0.0;

    static ScaledC of(cplx z) { return ScaledC{z, 0.0}.normalized(); }
    static ScaledC one() { return ScaledC{1.0, 0.0}; }

    ScaledC normalized() const {
        ScaledC r = *this;
        double a = std::abs(r.v);
        if (a > 0.0 && std::isfinite(a)) {
            r.lg += std::log(a);
            r.v /= a;
        }
        return r;
    }
    cplx value() const { return v * std::exp(lg); }
    double logAbs() const { return std::abs(v) > 0.0 ? lg + std::log(std::abs(v)) : -1e300; }
    bool zero() const { return v == cplx(0.0); }

    ScaledC operator*(const ScaledC& o) const { return ScaledC{v * o.v, lg + o.lg}.normalized(); }
    ScaledC operator/(const ScaledC& o) const { return ScaledC{v / o.v, lg - o.lg}.normalized(); }
    ScaledC operator-() const { return ScaledC{-v, lg}; }
};

// Determinant with row equilibration, returned in scaled form.
inline ScaledC scaledDet(Eigen::MatrixXcd A) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return ScaledC::one();
    double lg = 0.0;
    for (int r = 0; r < n; ++r) {
        double s = A.row(r).cwiseAbs().maxCoeff();
        if (s > 0.0 && std::isfinite(s)) {
            A.row(r) /= s;
            lg += std::log(s);
        } else if (s == 0.0) {
            return ScaledC{0.0, 0.0};
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    ScaledC out{cplx(double(lu.permutationP().determinant()), 0.0), lg};
    for (int i = 0; i < n; ++i) out = out * ScaledC::of(lu.matrixLU()(i, i));
    return out;
}

// 1-norm condition estimate (Hager-style power iteration on the inverse).
inline double cond1Estimate(const Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    double anorm = 0.0;
    for (int c = 0; c < n; ++c) anorm = std::max(anorm, A.col(c).cwiseAbs().sum());

    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, cplx(1.0 / n, 0.0));
    double est = 0.0;
    for (int it = 0; it < 5; ++it) {
        Eigen::VectorXcd y = lu.solve(x);
        est = y.cwiseAbs().sum();
        Eigen::VectorXcd xi(n);
        for (int i = 0; i < n; ++i) {
            double a = std::abs(y(i));
            xi(i) = (a > 0.0) ? y(i) / a : cplx(1.0, 0.0);
        }
        Eigen::VectorXcd z = lu.adjoint().solve(xi);
        int jmax = 0;
        double zmax = 0.0;
        for (int i = 0; i < n; ++i)
            if (std::abs(z(i)) > zmax) { zmax = std::abs(z(i)); jmax = i; }
        if (zmax <= std::abs(z.dot(x))) break;
        x.setZero();
        x(jmax) = 1.0;
    }
    return anorm * est;
}

} // namespace cyclospec
