#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cyclospec/chebyshev.hpp"
#include "cyclospec/errors.hpp"

namespace cyclospec {

// Compact graph: one cycle e_0 attached at the internal vertex v_0, plus m pendant
// edges e_j = [v_j, v_0]. Pendant parametrization: x_j = 0 at v_j, x_j = T_j at v_0.
// The cycle has both ends at v_0 and carries order n_0 = 2.
struct GraphSpec {
    int m = 0;
    std::vector<int> orders;       // n_0..n_m, n_0 = 2, nondecreasing
    std::vector<double> lengths;   // T_0..T_m
    // gamma[j-1](nu, mu) = matching-form coefficient for pendant edge j; lower triangle used.
    // Identity (delta_{nu mu}) corresponds to the plain forms U_{j nu}(y) = y^(nu)(T_j).
    std::vector<Eigen::MatrixXcd> gamma;

    int order(int j) const { return orders.at(j); }
    double length(int j) const { return lengths.at(j); }

    const Eigen::MatrixXcd& gammaFor(int j) const {
        if (j < 1 || j > m) throw DomainError("gammaFor: pendant index out of range");
        return gamma[j - 1];
    }

    static GraphSpec withIdentityForms(std::vector<int> orders_, std::vector<double> lengths_) {
        GraphSpec g;
        g.m = static_cast<int>(orders_.size()) - 1;
        g.orders = std::move(orders_);
        g.lengths = std::move(lengths_);
        for (int j = 1; j <= g.m; ++j)
            g.gamma.push_back(Eigen::MatrixXcd::Identity(g.orders[j], g.orders[j]));
        return g;
    }
};

// Per-edge coefficient functions q_{mu j}, mu = 0..n_j-2, stored as Chebyshev expansions.
struct Potential {
    std::vector<std::vector<Cheb>> coeffs;   // coeffs[j][mu]
    bool realCycle = true;                   // asserts q_{00} real-valued

    static Potential zero(const GraphSpec& g, int deg = 0) {
        Potential q;
        q.coeffs.resize(g.m + 1);
        for (int j = 0; j <= g.m; ++j)
            for (int mu = 0; mu + 2 <= g.orders[j]; ++mu)
                q.coeffs[j].push_back(Cheb::zero(0.0, g.lengths[j]));
        (void)deg;
        return q;
    }

    const Cheb& at(int j, int mu) const { return coeffs.at(j).at(mu); }
    Cheb& at(int j, int mu) { return coeffs.at(j).at(mu); }
};

// omega_n = sign H(nu_n) in {-1, 0, +1}
struct SignSequence {
    std::vector<int> omegas;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Structural admissibility of (spec, q). Diagnostics returned, never thrown.
inline ValidationReport validate(const GraphSpec& g, const Potential& q) {
    ValidationReport r;
    auto flag = [&](const std::string& s) { r.violations.push_back(s); };

    if (g.m < 1) flag("m must be >= 1");
    if (static_cast<int>(g.orders.size()) != g.m + 1) flag("orders length != m+1");
    if (static_cast<int>(g.lengths.size()) != g.m + 1) flag("lengths length != m+1");
    if (!g.orders.empty() && g.orders[0] != 2) flag("cycle order n_0 != 2");
    for (size_t j = 0; j + 1 < g.orders.size(); ++j)
        if (g.orders[j] > g.orders[j + 1]) { flag("orders not nondecreasing"); break; }
    for (size_t j = 0; j < g.lengths.size(); ++j)
        if (!(g.lengths[j] > 0.0)) flag("edge length T_" + std::to_string(j) + " not positive");

    if (static_cast<int>(g.gamma.size()) != g.m) {
        flag("gamma blocks count != m");
    } else {
        for (int j = 1; j <= g.m; ++j) {
            const auto& G = g.gamma[j - 1];
            int n = g.orders[j];
            if (G.rows() != n || G.cols() != n) {
                flag("gamma block for edge " + std::to_string(j) + " has wrong shape");
                continue;
            }
            for (int nu = 0; nu < n; ++nu)
                if (std::abs(G(nu, nu)) == 0.0)
                    flag("diagonal matching coefficient zero: gamma_" + std::to_string(j) +
                         "," + std::to_string(nu) + "," + std::to_string(nu));
        }
    }

    if (static_cast<int>(q.coeffs.size()) != g.m + 1) {
        flag("potential edge count != m+1");
    } else {
        for (int j = 0; j <= g.m; ++j) {
            int want = g.orders[j] - 1;   // mu = 0..n_j-2
            if (static_cast<int>(q.coeffs[j].size()) != want)
                flag("potential entries missing on edge " + std::to_string(j));
        }
        if (q.realCycle && !q.coeffs.empty() && !q.coeffs[0].empty() &&
            q.coeffs[0][0].maxImagCoeff() > 0.0)
            flag("q_00 has nonzero imaginary part but realCycleFlag is set");
    }
    return r;
}

inline cplx evaluatePotential(const GraphSpec& g, const Potential& q, int j, int mu, double x) {
    if (j < 0 || j > g.m) throw DomainError("evaluatePotential: edge index out of range");
    if (mu < 0 || mu > g.orders[j] - 2) throw DomainError("evaluatePotential: mu out of range");
    if (x < -1e-12 || x > g.lengths[j] + 1e-12)
        throw DomainError("evaluatePotential: x outside [0, T_j]");
    return q.at(j, mu)(x);
}

} // namespace cyclospec
