#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cyclospec/assembly.hpp"

namespace cyclospec {

// Ordered frame of the n-th roots of unity for one sector of the rho-plane:
// Re(rho R_1) < Re(rho R_2) < ... < Re(rho R_n) along the test direction.
struct SectorFrame {
    int order = 0;
    std::vector<cplx> roots;    // R_1..R_n
    std::vector<cplx> omegas;   // omega_k = Omega_{k-1} / Omega_k (leading Vandermonde ratio)
};

inline SectorFrame sectorFrameForRay(int n, double argRho) {
    SectorFrame f;
    f.order = n;
    for (int k = 0; k < n; ++k)
        f.roots.push_back(std::exp(cplx(0.0, 2.0 * M_PI * k / n)));
    cplx dir = std::exp(cplx(0.0, argRho));
    std::sort(f.roots.begin(), f.roots.end(), [&](cplx a, cplx b) {
        return (dir * a).real() < (dir * b).real();
    });
    for (int k = 0; k + 1 < n; ++k)
        if ((dir * f.roots[k + 1]).real() - (dir * f.roots[k]).real() < 1e-12)
            throw DomainError("sectorFrame: test ray lies on a sector boundary");

    // Omega_k = Vandermonde determinant of R_1..R_k; omega_k = Omega_{k-1}/Omega_k
    std::vector<cplx> Omega(n + 1, cplx(1.0));
    for (int k = 1; k <= n; ++k) {
        cplx prod = 1.0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) prod *= f.roots[b] - f.roots[a];
        Omega[k] = prod;
    }
    for (int k = 1; k <= n; ++k) f.omegas.push_back(Omega[k - 1] / Omega[k]);
    return f;
}

// Sector nu in {0..2n-1} of angle pi/n, test ray through its midpoint.
inline SectorFrame sectorFrame(int n, int nu) {
    if (n < 2 || nu < 0 || nu >= 2 * n) throw DomainError("sectorFrame: bad indices");
    return sectorFrameForRay(n, (nu + 0.5) * M_PI / n);
}

// Characteristic exponents of y^(n) = -lambda y are rho R with R^n = 1 and
// rho = (-lambda)^(1/n) on the principal branch.
struct CharFrame {
    cplx rho;
    SectorFrame frame;
};

inline CharFrame charFrame(int n, cplx lambda) {
    cplx mu = -lambda;
    double r = std::pow(std::abs(mu), 1.0 / n);
    double th = std::arg(mu) / n;
    CharFrame cf;
    cf.rho = r * std::exp(cplx(0.0, th));
    cf.frame = sectorFrameForRay(n, th);
    return cf;
}

// Leading exponent sum P_sk(lambda) of the determinant asymptotics: dominant
// exponentials of the Weyl-type solution on every edge, including the cycle term.
inline cplx exponentSum(const GraphSpec& g, int s, int k, cplx lambda) {
    double th = std::arg(lambda);
    if (std::abs(th) < 1e-12 || std::abs(std::abs(th) - M_PI) < 1e-12)
        throw DomainError("exponentSum: arg lambda must avoid 0 and pi");
    cplx P = 0.0;
    {
        CharFrame cf = charFrame(g.orders[s], lambda);
        cplx sum = 0.0;
        for (int mu = k + 1; mu <= g.orders[s]; ++mu) sum += cf.frame.roots[mu - 1];
        P += cf.rho * sum * g.lengths[s];
    }
    for (int j = 1; j <= g.m; ++j) {
        if (j == s || g.orders[j] <= k) continue;
        CharFrame cf = charFrame(g.orders[j], lambda);
        cplx sum = 0.0;
        int lo = std::max(g.orders[j] - k, 1) + 1;
        for (int mu = lo; mu <= g.orders[j]; ++mu) sum += cf.frame.roots[mu - 1];
        P += cf.rho * sum * g.lengths[j];
    }
    {
        CharFrame cf = charFrame(2, lambda);
        P += cf.rho * cf.frame.roots[1] * g.lengths[0];
    }
    return P;
}

enum class RegularityStatus { Regular, NonRegular, Inconclusive };

struct RegularityEntry {
    int s = 0, k = 0;
    double nuFit = 0.0;                 // fitted rational power of lambda
    double d0Abs = 0.0;                 // extrapolated |d_sk^0|
    std::vector<double> ladder;         // |d0| estimates along the ray
    RegularityStatus status = RegularityStatus::Inconclusive;
};

struct RegularityReport {
    std::vector<RegularityEntry> perSK;
    bool regular = false;
    bool inconclusive = false;
};

struct RegularityOptions {
    double rayAngle = M_PI / 2;
    double magLo = 1e2, magHi = 1e4;
    int points = 6;
    double stabilizationFactor = 3.0;
    double floorFraction = 1e-6;        // nonzero test relative to the ladder's peak
    OdeOptions ode;
};

// Estimates the leading constants d_sk^0 of det E_sk along a ray and classifies the
// matching conditions as regular when every limit stabilizes away from zero.
inline RegularityReport regularityTest(const GraphSpec& g, const Potential& q,
                                       RegularityOptions opt = {}) {
    RegularityReport rep;
    rep.regular = true;

    std::vector<double> mags(opt.points);
    for (int t = 0; t < opt.points; ++t)
        mags[t] = opt.magLo * std::pow(opt.magHi / opt.magLo, double(t) / (opt.points - 1));

    std::vector<GraphEndData> data;
    for (double mag : mags)
        data.push_back(endData(g, q, mag * std::exp(cplx(0.0, opt.rayAngle)), false, opt.ode));

    for (int s = 1; s <= g.m; ++s) {
        for (int k = 1; k <= g.orders[s] - 1; ++k) {
            RegularityEntry e;
            e.s = s;
            e.k = k;
            std::vector<double> gvals(opt.points), lgs(opt.points);
            for (int t = 0; t < opt.points; ++t) {
                ScaledC det = charDeterminantScaled(g, data[t], s, k, k);
                cplx lam = mags[t] * std::exp(cplx(0.0, opt.rayAngle));
                gvals[t] = det.logAbs() - exponentSum(g, s, k, lam).real();
                lgs[t] = std::log(mags[t]);
            }
            // least-squares line g = log|d0| + nu log|lambda|
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int t = 0; t < opt.points; ++t) {
                sx += lgs[t];
                sy += gvals[t];
                sxx += lgs[t] * lgs[t];
                sxy += lgs[t] * gvals[t];
            }
            double n = opt.points;
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            e.nuFit = slope;
            for (int t = 0; t < opt.points; ++t)
                e.ladder.push_back(std::exp(gvals[t] - slope * lgs[t]));
            e.d0Abs = e.ladder.back();

            double peak = *std::max_element(e.ladder.begin(), e.ladder.end());
            int L = opt.points;
            double lastMax = std::max({e.ladder[L - 1], e.ladder[L - 2], e.ladder[L - 3]});
            double lastMin = std::min({e.ladder[L - 1], e.ladder[L - 2], e.ladder[L - 3]});
            bool stable = lastMax <= opt.stabilizationFactor * lastMin;
            bool nonzero = e.d0Abs > opt.floorFraction * peak;

            if (stable && nonzero)
                e.status = RegularityStatus::Regular;
            else if (e.d0Abs <= opt.floorFraction * peak)
                e.status = RegularityStatus::NonRegular;
            else
                e.status = RegularityStatus::Inconclusive;

            if (e.status != RegularityStatus::Regular) rep.regular = false;
            if (e.status == RegularityStatus::Inconclusive) rep.inconclusive = true;
            rep.perSK.push_back(std::move(e));
        }
    }
    return rep;
}

struct DecayPoint {
    double absLambda = 0.0;
    double absRho = 0.0;
    std::vector<double> deviation;   // per derivative order nu = 0..n_s-1
};

struct DecayReport {
    int s = 0, k = 0;
    double x = 0.0;
    std::vector<DecayPoint> points;
    std::vector<double> slopes;      // log-log slope of deviation vs |rho| per nu
};

// Ratio of the Weyl-type solution to its leading asymptotic form
// (omega_ks / rho^(k-1)) (rho R_ks)^nu exp(rho R_ks x); deviation = |ratio - 1|.
inline DecayReport verifyWeylAsymptotics(const GraphSpec& g, const Potential& q, int s, int k,
                                         double x, double rayAngle,
                                         const std::vector<double>& magnitudes,
                                         const OdeOptions& ode = {}) {
    const int ns = g.orders[s];
    if (x <= 0.0 || x >= g.lengths[s])
        throw DomainError("verifyWeylAsymptotics: x must be interior");
    DecayReport rep;
    rep.s = s;
    rep.k = k;
    rep.x = x;

    for (double mag : magnitudes) {
        cplx lam = mag * std::exp(cplx(0.0, rayAngle));
        CharFrame cf = charFrame(ns, lam);
        WeylMatrix W = weylMatrix(g, q, s, lam, WeylPath::Ratio, ode);
        WeylSolutionValues psi = weylSolutionAt(g, q, s, k, x, lam, W, ode);

        DecayPoint pt;
        pt.absLambda = mag;
        pt.absRho = std::abs(cf.rho);
        cplx Rk = cf.frame.roots[k - 1];
        cplx omega = cf.frame.omegas[k - 1];
        cplx arg = cf.rho * Rk * x;
        for (int nu = 0; nu < ns; ++nu) {
            ScaledC pred = ScaledC::of(omega * std::pow(cf.rho, double(nu - k + 1)) *
                                       std::pow(Rk, double(nu)) *
                                       std::exp(cplx(0.0, arg.imag())));
            pred.lg += arg.real();
            ScaledC got{psi.derivs(nu), psi.logScale};
            pt.deviation.push_back(std::abs((got / pred).value() - 1.0));
        }
        rep.points.push_back(std::move(pt));
    }

    for (int nu = 0; nu < ns; ++nu) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& pt : rep.points) {
            if (!(pt.deviation[nu] > 0.0)) continue;
            double lx = std::log(pt.absRho), ly = std::log(pt.deviation[nu]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        rep.slopes.push_back(n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0);
    }
    return rep;
}

} // namespace cyclospec
