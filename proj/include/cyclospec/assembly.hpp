#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cyclospec/linalg.hpp"
#include "cyclospec/ode.hpp"

namespace cyclospec {

// End data of one pendant edge at x_j = T_j. V(nu, mu-1) = C_mu^{(nu)}(T_j) scaled by
// exp(-logScale); UF = Gamma_j * V gives the linear forms U_{j nu}(C_mu).
struct EdgeBlock {
    Eigen::MatrixXcd V;
    Eigen::MatrixXcd Vdot;    // lambda-derivative (same scaling); empty unless requested
    Eigen::MatrixXcd UF;
    Eigen::MatrixXcd UFdot;
    double logScale = 0.0;
};

struct GraphEndData {
    cplx lambda;
    std::vector<EdgeBlock> edge;   // [0..m-1] <-> pendant edges 1..m
    CycleEndData cyc;
};

inline GraphEndData endData(const GraphSpec& g, const Potential& q, cplx lambda,
                            bool withDerivative = false, OdeOptions opt = {}) {
    GraphEndData d;
    d.lambda = lambda;
    d.cyc = cycleEnd(g, q, lambda, opt);
    opt.lambdaDerivative = withDerivative;
    for (int j = 1; j <= g.m; ++j) {
        EdgeSolution s = integrateEdge(g, q, j, lambda, g.lengths[j], opt);
        EdgeBlock b;
        b.V = s.Y;
        b.UF = g.gammaFor(j) * b.V;
        if (withDerivative) {
            b.Vdot = s.Ydot;
            b.UFdot = g.gammaFor(j) * b.Vdot;
        }
        b.logScale = s.logScale;
        d.edge.push_back(std::move(b));
    }
    return d;
}

// Linear form U_{j nu}(y) = sum_{mu<=nu} gamma_{j nu mu} y^(mu)(T_j) applied to a vector
// of derivative values at T_j. For the cycle edge it is y^(nu)(T_0), nu in {0, 1}.
inline cplx applyForm(const GraphSpec& g, const Eigen::VectorXcd& derivs, int j, int nu) {
    if (j == 0) {
        if (nu < 0 || nu > 1) throw DomainError("applyForm: cycle form order must be 0 or 1");
        return derivs(nu);
    }
    if (j < 1 || j > g.m || nu < 0 || nu >= g.orders[j])
        throw DomainError("applyForm: index out of range");
    const auto& G = g.gammaFor(j);
    cplx acc = 0.0;
    for (int mu = 0; mu <= nu; ++mu) acc += G(nu, mu) * derivs(mu);
    return acc;
}

// The linear system E_sk over the unpinned expansion coefficients of the Weyl-type
// solution Psi_sk: cycle coefficients (M_0^1, M_0^2) first, then pendant edges by
// index with ascending mu. Row order follows the worked example: cycle closure,
// per-edge continuity blocks for j = 1..m-1, Kirchhoff rows, edge m value row.
// Equations read A * M + c = 0; columns and c are stored scaled (colLog / cLog).
struct AssembledSystem {
    int s = 0, k = 0;
    cplx lambda;
    Eigen::MatrixXcd A;
    Eigen::VectorXcd c;
    std::vector<double> colLog;
    double cLog = 0.0;
    std::vector<std::pair<int, int>> unknowns;  // (edge j, mu); cycle = (0,1),(0,2)
    int rowClosure = -1;
    int rowKirch1 = -1;
    std::vector<std::pair<int, int>> rowsNu0;   // (edge j, row index), j = 1..m

    int columnOf(int j, int mu) const {
        for (size_t i = 0; i < unknowns.size(); ++i)
            if (unknowns[i].first == j && unknowns[i].second == mu) return static_cast<int>(i);
        throw DomainError("AssembledSystem: unknown (j,mu) not present");
    }
};

inline std::vector<int> unpinnedMus(const GraphSpec& g, int s, int k, int j) {
    std::vector<int> mus;
    int nj = g.orders[j];
    if (j == s)
        for (int mu = k + 1; mu <= nj; ++mu) mus.push_back(mu);
    else if (nj > k)
        for (int mu = nj - k + 1; mu <= nj; ++mu) mus.push_back(mu);
    else
        for (int mu = 2; mu <= nj; ++mu) mus.push_back(mu);
    return mus;
}

inline AssembledSystem assembleSystem(const GraphSpec& g, const GraphEndData& d, int s, int k) {
    const int m = g.m;
    if (s < 1 || s > m) throw DomainError("assembleSystem: s out of range");
    const int ns = g.orders[s];
    if (k < 1 || k > ns - 1) throw DomainError("assembleSystem: k out of range");

    AssembledSystem sys;
    sys.s = s;
    sys.k = k;
    sys.lambda = d.lambda;

    sys.unknowns.push_back({0, 1});
    sys.unknowns.push_back({0, 2});
    sys.colLog.assign(2, d.cyc.logScale);
    for (int j = 1; j <= m; ++j)
        for (int mu : unpinnedMus(g, s, k, j)) {
            sys.unknowns.push_back({j, mu});
            sys.colLog.push_back(d.edge[j - 1].logScale);
        }
    const int N = static_cast<int>(sys.unknowns.size());

    int rows = 2;                                     // closure + edge-m value row
    for (int j = 1; j < m; ++j) {
        rows += 1;                                    // nu = 0
        for (int nu = 1; nu <= k - 1; ++nu)
            if (nu <= g.orders[j] - 2) rows += 1;
    }
    rows += ns - k;                                   // Kirchhoff rows
    if (rows != N)
        throw DomainError("assembleSystem: condition count does not match unknowns");

    sys.A = Eigen::MatrixXcd::Zero(N, N);
    sys.c = Eigen::VectorXcd::Zero(N);
    sys.cLog = d.edge[s - 1].logScale;

    const double invCycScale = std::exp(-d.cyc.logScale);
    auto UF = [&](int j, int nu, int mu) { return d.edge[j - 1].UF(nu, mu - 1); };

    // Adds edge j's unknown coefficients (and the pinned C_ks term when j == s)
    // to row r with the given sign.
    auto addEdgeTerms = [&](int r, int j, int nu, double sign) {
        for (int mu : unpinnedMus(g, s, k, j))
            sys.A(r, sys.columnOf(j, mu)) += sign * UF(j, nu, mu);
        if (j == s) sys.c(r) += sign * UF(s, nu, k);
    };

    int r = 0;
    sys.rowClosure = r;
    sys.A(r, 0) = d.cyc.C0 - invCycScale;
    sys.A(r, 1) = d.cyc.S0;
    ++r;

    for (int j = 1; j < m; ++j) {
        sys.rowsNu0.push_back({j, r});
        sys.A(r, 0) = -invCycScale;
        addEdgeTerms(r, j, 0, +1.0);
        ++r;
        for (int nu = 1; nu <= k - 1; ++nu) {
            if (nu > g.orders[j] - 2) continue;
            addEdgeTerms(r, m, nu, +1.0);
            addEdgeTerms(r, j, nu, -1.0);
            ++r;
        }
    }

    for (int nu = k; nu <= ns - 1; ++nu) {
        if (nu == 1) {
            sys.rowKirch1 = r;
            sys.A(r, 0) += d.cyc.C0p;
            sys.A(r, 1) += d.cyc.S0p - invCycScale;   // -y_0'(0) on the right of Kirch(1)
        }
        for (int j = 1; j <= m; ++j)
            if (nu < g.orders[j]) addEdgeTerms(r, j, nu, +1.0);
        ++r;
    }

    sys.rowsNu0.push_back({m, r});
    sys.A(r, 0) = -invCycScale;
    addEdgeTerms(r, m, 0, +1.0);
    ++r;

    return sys;
}

// Characteristic function of L_{s k mu} as a scaled determinant. For mu = k this is
// det E_sk; for mu > k the column of M_s^mu is replaced by the inhomogeneity.
inline ScaledC charDeterminantScaled(const GraphSpec& g, const GraphEndData& d, int s, int k,
                                     int mu) {
    if (mu < k || mu > g.orders[s]) throw DomainError("charDeterminant: mu out of range");
    AssembledSystem sys = assembleSystem(g, d, s, k);
    Eigen::MatrixXcd A = sys.A;
    if (mu > k) A.col(sys.columnOf(s, mu)) = sys.c;
    ScaledC det = scaledDet(A);
    for (double lgc : sys.colLog) det.lg += lgc;
    return det.normalized();
}

inline cplx charDeterminant(const GraphSpec& g, const Potential& q, int s, int k, int mu,
                            cplx lambda, const OdeOptions& opt = {}) {
    return charDeterminantScaled(g, endData(g, q, lambda, false, opt), s, k, mu).value();
}

struct WeylMatrix {
    int s = 0;
    cplx lambda;
    Eigen::MatrixXcd entries;   // n_s x n_s, entries(k-1, mu-1) = M_{s k mu}
};

enum class WeylPath { Ratio, Solve };

// Floor under which det E_sk counts as a pole of the Weyl entries:
// |Delta_skk| < 1e-10 * max row norm of E_sk, both in true units.
inline bool nearPole(const AssembledSystem& sys, const ScaledC& det, double tol = 1e-10) {
    double logRowMax = -1e300;
    for (int r = 0; r < sys.A.rows(); ++r)
        for (int c = 0; c < sys.A.cols(); ++c) {
            double a = std::abs(sys.A(r, c));
            if (a > 0.0) logRowMax = std::max(logRowMax, std::log(a) + sys.colLog[c]);
        }
    double logDetTrue = det.logAbs();
    for (double lgc : sys.colLog) logDetTrue += lgc;
    return logDetTrue < logRowMax + std::log(tol);
}

inline WeylMatrix weylMatrixFrom(const GraphSpec& g, const GraphEndData& d, int s,
                                 WeylPath path = WeylPath::Ratio) {
    const int ns = g.orders[s];
    WeylMatrix W;
    W.s = s;
    W.lambda = d.lambda;
    W.entries = Eigen::MatrixXcd::Zero(ns, ns);
    for (int k = 1; k <= ns; ++k) W.entries(k - 1, k - 1) = 1.0;

    for (int k = 1; k <= ns - 1; ++k) {
        AssembledSystem sys = assembleSystem(g, d, s, k);
        ScaledC det0 = scaledDet(sys.A);
        if (nearPole(sys, det0))
            throw PoleError("weylMatrix: lambda is at a zero of Delta_skk", k);
        if (path == WeylPath::Ratio) {
            for (int mu = k + 1; mu <= ns; ++mu) {
                Eigen::MatrixXcd A = sys.A;
                A.col(sys.columnOf(s, mu)) = sys.c;
                W.entries(k - 1, mu - 1) = -(scaledDet(A) / det0).value();
            }
        } else {
            Eigen::VectorXcd y = sys.A.partialPivLu().solve(-sys.c);
            for (int mu = k + 1; mu <= ns; ++mu)
                W.entries(k - 1, mu - 1) = y(sys.columnOf(s, mu));
        }
    }
    return W;
}

inline WeylMatrix weylMatrix(const GraphSpec& g, const Potential& q, int s, cplx lambda,
                             WeylPath path = WeylPath::Ratio, const OdeOptions& opt = {}) {
    return weylMatrixFrom(g, endData(g, q, lambda, false, opt), s, path);
}

// Structural decomposition of Delta_{s k mu} through the cycle columns:
//   k = 1:  Delta = (d - 2) F + h G
//   k > 1:  Delta = h G
// F, G come out of the generalized Laplace expansion along the two cycle columns;
// only pairs containing the closure row survive (it vanishes off the cycle block).
struct DeltaDecomposition {
    int s = 0, k = 0, mu = 0;
    cplx lambda;
    bool hasF = false;
    cplx F{0.0}, G{0.0};
    cplx delta{0.0};      // direct determinant
    cplx residual{0.0};   // delta - ((d-2)F + hG)  resp.  delta - hG
};

namespace detail {

// Complementary minor: drop rows {r0, r1} and the cycle columns, keep column scales.
inline ScaledC complementaryMinor(const AssembledSystem& sys, int r0, int r1) {
    const int N = static_cast<int>(sys.A.rows());
    Eigen::MatrixXcd B(N - 2, N - 2);
    int br = 0;
    for (int r = 0; r < N; ++r) {
        if (r == r0 || r == r1) continue;
        for (int c = 2; c < N; ++c) B(br, c - 2) = sys.A(r, c);
        ++br;
    }
    ScaledC det = scaledDet(B);
    for (size_t c = 2; c < sys.colLog.size(); ++c) det.lg += sys.colLog[c];
    return det;
}

inline double laplaceSign(int r0, int r1) {
    // rows r0 < r1 (0-based), columns {1,2} (1-based): (-1)^{(r0+1)+(r1+1)+3}
    return ((r0 + r1 + 5) % 2 == 0) ? 1.0 : -1.0;
}

} // namespace detail

inline DeltaDecomposition deltaDecomposeAt(const GraphSpec& g, const GraphEndData& d, int s,
                                           int k, int mu) {
    if (mu < k || mu > g.orders[s]) throw DomainError("deltaDecompose: mu out of range");
    AssembledSystem sys = assembleSystem(g, d, s, k);
    if (mu > k) sys.A.col(sys.columnOf(s, mu)) = sys.c;

    DeltaDecomposition out;
    out.s = s;
    out.k = k;
    out.mu = mu;
    out.lambda = d.lambda;

    const double cs = std::exp(d.cyc.logScale);
    const cplx hval = d.cyc.S0 * cs;
    const cplx dval = (d.cyc.C0 + d.cyc.S0p) * cs;

    ScaledC Facc{0.0, 0.0}, Gacc{0.0, 0.0};
    bool haveF = false, haveG = false;
    auto accumulate = [&](ScaledC& acc, bool& have, ScaledC term) {
        if (!have) {
            acc = term;
            have = true;
        } else {
            // align scales before adding
            double lg = std::max(acc.lg, term.lg);
            acc = ScaledC{acc.v * std::exp(acc.lg - lg) + term.v * std::exp(term.lg - lg), lg}
                      .normalized();
        }
    };

    if (sys.rowKirch1 >= 0) {
        // minor over (closure, Kirch(1)) rows of the cycle columns equals 2 - d
        ScaledC comp = detail::complementaryMinor(sys, sys.rowClosure, sys.rowKirch1);
        double sgn = detail::laplaceSign(sys.rowClosure, sys.rowKirch1);
        accumulate(Facc, haveF, ScaledC{-sgn * comp.v, comp.lg});
        out.hasF = true;
    }
    for (const auto& [j, rj] : sys.rowsNu0) {
        (void)j;
        // minor over (closure, nu=0 row) equals h
        ScaledC comp = detail::complementaryMinor(sys, sys.rowClosure, rj);
        double sgn = detail::laplaceSign(sys.rowClosure, rj);
        accumulate(Gacc, haveG, ScaledC{sgn * comp.v, comp.lg});
    }
    if (!haveG || (Gacc.zero() && (!out.hasF || Facc.zero())))
        throw Error("deltaDecompose: degenerate cofactor structure");

    out.F = out.hasF ? Facc.value() : cplx(0.0);
    out.G = Gacc.value();

    ScaledC det = scaledDet(sys.A);
    for (double lgc : sys.colLog) det.lg += lgc;
    out.delta = det.value();
    out.residual = out.delta - ((out.hasF ? (dval - 2.0) * out.F : cplx(0.0)) + hval * out.G);
    return out;
}

inline DeltaDecomposition deltaDecompose(const GraphSpec& g, const Potential& q, int s, int k,
                                         int mu, cplx lambda, const OdeOptions& opt = {}) {
    return deltaDecomposeAt(g, endData(g, q, lambda, false, opt), s, k, mu);
}

// Weyl-type solution on edge s through relation (psi = C_k + sum_{mu>k} M_kmu C_mu):
// returns (psi, psi', ..., psi^(n-1)) at interior x. Scaled by exp(-logScale) of the
// edge integration at x.
struct WeylSolutionValues {
    Eigen::VectorXcd derivs;
    double logScale = 0.0;
};

inline WeylSolutionValues weylSolutionAt(const GraphSpec& g, const Potential& q, int s, int k,
                                         double x, cplx lambda, const WeylMatrix& M,
                                         const OdeOptions& opt = {}) {
    EdgeSolution sol = integrateEdge(g, q, s, lambda, x, opt);
    const int ns = g.orders[s];
    Eigen::VectorXcd psi = sol.Y.col(k - 1);
    for (int mu = k + 1; mu <= ns; ++mu) psi += M.entries(k - 1, mu - 1) * sol.Y.col(mu - 1);
    return {psi, sol.logScale};
}

// Residuals of the formal matching conditions Cont(nu) / Kirch(nu) for the solved
// Weyl coefficient vector; independent recombination of the assembled equations.
inline double matchingResiduals(const GraphSpec& g, const GraphEndData& d, int s, int k) {
    AssembledSystem sys = assembleSystem(g, d, s, k);
    Eigen::VectorXcd y = sys.A.partialPivLu().solve(-sys.c);

    const int m = g.m;
    // true end values of each psi_j and cycle boundary data
    auto coeff = [&](int j, int mu) -> cplx {
        if (j == s && mu == k) return std::exp(sys.cLog - d.edge[j - 1].logScale);
        for (size_t i = 0; i < sys.unknowns.size(); ++i)
            if (sys.unknowns[i] == std::make_pair(j, mu)) return y(i);
        return 0.0;
    };
    // Everything below is in common units of exp(cLog); the overall factor cancels
    // in the relative residual.
    std::vector<Eigen::VectorXcd> U(m + 1);   // U[j](nu) = U_{j nu}(psi_j)
    for (int j = 1; j <= m; ++j) {
        int nj = g.orders[j];
        U[j] = Eigen::VectorXcd::Zero(nj);
        for (int nu = 0; nu < nj; ++nu) {
            cplx acc = 0.0;
            for (int mu = 1; mu <= nj; ++mu) acc += coeff(j, mu) * d.edge[j - 1].UF(nu, mu - 1);
            U[j](nu) = acc;
        }
    }
    double cycUnits = std::exp(-d.cyc.logScale);
    cplx psi0T = y(0) * d.cyc.C0 + y(1) * d.cyc.S0;
    cplx psi0Tp = y(0) * d.cyc.C0p + y(1) * d.cyc.S0p;
    cplx psi00 = y(0) * cycUnits;    // psi_0(0)  (C_0(0) = 1, S_0(0) = 0)
    cplx psi00p = y(1) * cycUnits;   // psi_0'(0)

    double scale = 1.0;
    for (int j = 1; j <= m; ++j) scale = std::max(scale, U[j].cwiseAbs().maxCoeff());
    scale = std::max({scale, std::abs(psi0T), std::abs(psi0Tp)});

    double worst = 0.0;
    auto track = [&](cplx r) { worst = std::max(worst, std::abs(r) / scale); };

    for (int nu = 0; nu <= k - 1; ++nu) {
        for (int j = 0; j < m; ++j) {
            if (nu >= g.orders[j] - 1 && !(j == 0 && nu == 0)) continue;
            if (j == 0) {
                if (nu == 0) track(U[m](0) - psi0T);
            } else {
                track(U[m](nu) - U[j](nu));
            }
        }
        if (nu == 0) track(psi00 - psi0T);
    }
    for (int nu = k; nu <= g.orders[s] - 1; ++nu) {
        cplx acc = 0.0;
        if (nu < 2) acc += (nu == 0) ? psi0T : psi0Tp;
        for (int j = 1; j <= m; ++j)
            if (nu < g.orders[j]) acc += U[j](nu);
        if (nu == 1) acc -= psi00p;
        if (nu == 0) acc -= 0.0;
        track(acc);
    }
    (void)psi00;
    return worst;
}

} // namespace cyclospec
