#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cyclospec/graph.hpp"

namespace cyclospec {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double rescaleThreshold = 50.0;   // rescale when |lambda|^(1/n) * x exceeds this
    bool lambdaDerivative = false;
    bool trackFlowDet = false;
    long maxSteps = 4000000;
};

// Fundamental system of y^(n) + sum_mu q_mu y^(mu) = -lambda y on one edge,
// integrated as the n x n matrix ODE Y' = A(x) Y from Y(0) = I.
// Columns are the solutions C_k (unit-coordinate initial data), rows are derivative
// orders 0..n-1. In the rescaled regime the stored matrix is Y * exp(-logScale).
struct EdgeSolution {
    Eigen::MatrixXcd Y;
    Eigen::MatrixXcd Ydot;        // d/dlambda of the true matrix, same scaling
    double logScale = 0.0;
    double flowDetResidual = 0.0; // |prod_steps det(step map) / exp(int tr) - 1|
    long steps = 0;
};

namespace detail {

// Growth rate of the dominant characteristic exponent: max Re w over w^n = -lambda.
inline double dominantGrowthRate(cplx lambda, int n) {
    double r = std::pow(std::abs(lambda), 1.0 / n);
    if (r == 0.0) return 0.0;
    double th = std::arg(-lambda);
    double best = -1e300;
    for (int k = 0; k < n; ++k)
        best = std::max(best, std::cos((th + 2.0 * M_PI * k) / n));
    return r * best;
}

// Applies the (rescaled) companion matrix B = A(x) - kappa I to M in place of R:
// R = B * M.  Last row: y^(n) = -lambda y - sum q_mu y^(mu).
struct CompanionOp {
    const std::vector<const Cheb*>* qs;  // q_0..q_{n-2}
    cplx lambda;
    double kappa;

    void apply(double x, const Eigen::MatrixXcd& M, Eigen::MatrixXcd& R) const {
        const int n = static_cast<int>(M.rows());
        for (int i = 0; i + 1 < n; ++i) R.row(i) = M.row(i + 1);
        R.row(n - 1) = (-lambda) * M.row(0);
        for (int mu = 0; mu + 1 < n; ++mu) {
            cplx qv = (*(*qs)[mu])(x);
            if (qv != cplx(0.0)) R.row(n - 1) -= qv * M.row(mu);
        }
        if (kappa != 0.0) R -= kappa * M;
    }
};

} // namespace detail

inline EdgeSolution integrateEdge(const GraphSpec& g, const Potential& q, int j, cplx lambda,
                                  double xEnd, const OdeOptions& opt = {}) {
    if (j < 0 || j > g.m) throw DomainError("integrateEdge: edge index out of range");
    const int n = g.orders[j];
    if (xEnd < 0.0 || xEnd > g.lengths[j] + 1e-12)
        throw DomainError("integrateEdge: x outside [0, T_j]");

    std::vector<const Cheb*> qs(n - 1);
    for (int mu = 0; mu + 1 < n; ++mu) qs[mu] = &q.at(j, mu);

    double kappa = 0.0;
    if (std::pow(std::abs(lambda), 1.0 / n) * xEnd > opt.rescaleThreshold)
        kappa = detail::dominantGrowthRate(lambda, n);

    detail::CompanionOp op{&qs, lambda, kappa};

    EdgeSolution out;
    out.Y = Eigen::MatrixXcd::Identity(n, n);
    if (opt.lambdaDerivative) out.Ydot = Eigen::MatrixXcd::Zero(n, n);

    if (xEnd == 0.0) return out;

    // Dormand-Prince 5(4)
    static const double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                -2187.0 / 6784, 11.0 / 84, 0.0};
    static const double e[7] = {35.0 / 384 - 5179.0 / 57600, 0.0,
                                500.0 / 1113 - 7571.0 / 16695, 125.0 / 192 - 393.0 / 640,
                                -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
                                -1.0 / 40};

    const bool aug = opt.lambdaDerivative;
    std::vector<Eigen::MatrixXcd> K(7, Eigen::MatrixXcd(n, n));
    std::vector<Eigen::MatrixXcd> L;
    if (aug) L.assign(7, Eigen::MatrixXcd(n, n));
    Eigen::MatrixXcd S(n, n), SD(n, n), M(n, n), D(n, n), E(n, n);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);

    double x = 0.0;
    double rho = std::pow(std::abs(lambda), 1.0 / n);
    double h = std::min({xEnd, 0.25, 1.0 / (1.0 + rho)});
    cplx flowAcc = 1.0;
    long steps = 0;

    while (x < xEnd) {
        if (++steps > opt.maxSteps)
            throw NumericalError("integrateEdge: step budget exhausted", lambda, j);
        if (h < 1e-14 * std::max(1.0, xEnd))
            throw NumericalError("integrateEdge: step underflow", lambda, j);
        if (x + h > xEnd) h = xEnd - x;

        for (int i = 0; i < 7; ++i) {
            S = I;
            for (int l = 0; l < i; ++l)
                if (a[i][l] != 0.0) S += (h * a[i][l]) * K[l];
            op.apply(x + c[i] * h, S, K[i]);
            if (aug) {
                SD.setZero();
                for (int l = 0; l < i; ++l)
                    if (a[i][l] != 0.0) SD += (h * a[i][l]) * L[l];
                op.apply(x + c[i] * h, SD, L[i]);
                // d/dlambda of the companion last row is -y(0,:)
                L[i].row(n - 1) -= S.row(0);
            }
        }

        M = I;
        E.setZero();
        for (int i = 0; i < 7; ++i) {
            if (b[i] != 0.0) M += (h * b[i]) * K[i];
            if (e[i] != 0.0) E += (h * e[i]) * K[i];
        }

        double err = 0.0;
        for (int r = 0; r < n; ++r)
            for (int cidx = 0; cidx < n; ++cidx) {
                double w = opt.atol + opt.rtol * std::max(1.0, std::abs(M(r, cidx)));
                err = std::max(err, std::abs(E(r, cidx)) / w);
            }

        if (err <= 1.0) {
            if (aug) {
                D.setZero();
                for (int i = 0; i < 7; ++i)
                    if (b[i] != 0.0) D += (h * b[i]) * L[i];
                out.Ydot = M * out.Ydot + D * out.Y;
            }
            if (opt.trackFlowDet)
                flowAcc *= M.determinant() * std::exp(double(n) * kappa * h);
            out.Y = M * out.Y;
            out.logScale += kappa * h;
            x += h;
        }
        double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
    }

    out.steps = steps;
    out.flowDetResidual = std::abs(flowAcc - 1.0);
    return out;
}

// Spec-facing view of the fundamental system: values(k, nu) = C_{k+1}^{(nu)}(x, lambda),
// scaled by exp(-logScale) in the rescaled regime.
struct FundamentalMatrix {
    int edge = 0;
    cplx lambda;
    double x = 0.0;
    Eigen::MatrixXcd values;
    double logScale = 0.0;
    double flowDetResidual = 0.0;

    Eigen::MatrixXcd trueValues() const { return values * std::exp(logScale); }
    cplx det() const {
        return values.determinant() * std::exp(double(values.rows()) * logScale);
    }
};

inline FundamentalMatrix fundamentalAt(const GraphSpec& g, const Potential& q, int j,
                                       cplx lambda, double x, const OdeOptions& opt = {}) {
    EdgeSolution s = integrateEdge(g, q, j, lambda, x, opt);
    FundamentalMatrix fm;
    fm.edge = j;
    fm.lambda = lambda;
    fm.x = x;
    fm.values = s.Y.transpose();
    fm.logScale = s.logScale;
    fm.flowDetResidual = s.flowDetResidual;
    return fm;
}

// Cycle end data at x_0 = T_0. h = S_0(T_0), H = C_0 - S_0', d = C_0 + S_0'.
struct CycleEndData {
    cplx lambda;
    cplx h, H, d;
    cplx hDot;                    // dh/dlambda via the variational system
    cplx C0, S0, C0p, S0p;        // scaled end values
    cplx dC0, dS0, dC0p, dS0p;    // scaled lambda-derivatives
    double logScale = 0.0;
};

inline CycleEndData cycleEnd(const GraphSpec& g, const Potential& q, cplx lambda,
                             OdeOptions opt = {}) {
    opt.lambdaDerivative = true;
    EdgeSolution s = integrateEdge(g, q, 0, lambda, g.lengths[0], opt);
    CycleEndData r;
    r.lambda = lambda;
    r.logScale = s.logScale;
    // columns: 0 -> C_0 (value 1 at 0), 1 -> S_0 (slope 1 at 0)
    r.C0 = s.Y(0, 0);
    r.S0 = s.Y(0, 1);
    r.C0p = s.Y(1, 0);
    r.S0p = s.Y(1, 1);
    r.dC0 = s.Ydot(0, 0);
    r.dS0 = s.Ydot(0, 1);
    r.dC0p = s.Ydot(1, 0);
    r.dS0p = s.Ydot(1, 1);
    double sc = std::exp(r.logScale);
    r.h = r.S0 * sc;
    r.H = (r.C0 - r.S0p) * sc;
    r.d = (r.C0 + r.S0p) * sc;
    r.hDot = r.dS0 * sc;
    return r;
}

inline cplx hDotAt(const GraphSpec& g, const Potential& q, cplx lambda,
                   const OdeOptions& opt = {}) {
    return cycleEnd(g, q, lambda, opt).hDot;
}

} // namespace cyclospec
