#pragma once

#include <string>
#include <vector>

#include "hermitia/metric.hpp"

namespace hermitia {

enum class ConnectionKind { LeviCivita, Induced, Chern, Bismut };

std::string to_string(ConnectionKind k);

// Index convention: A in [0, 2n), A < n is z^A, A >= n is zbar^(A-n).
//
// LeviCivita: entry(A, B, C) = Gamma_{AB}^C of the complexified connection, all (2n)^3.
// Chern / Bismut / Induced: entry(A, alpha, beta) = theta_{A alpha}^beta, the coefficient
// of the connection on T^{1,0}M: nabla_{d/dz^A} d/dz^alpha = theta_{A alpha}^beta d/dz^beta.
struct ChristoffelTable {
    ConnectionKind kind = ConnectionKind::LeviCivita;
    int n = 0;
    int order = 0;
    int d1 = 0, d2 = 0, d3 = 0;
    std::vector<Jet> e;

    const Jet& operator()(int a, int b, int c) const { return e[(static_cast<size_t>(a) * d2 + b) * d3 + c]; }
    Jet& operator()(int a, int b, int c) { return e[(static_cast<size_t>(a) * d2 + b) * d3 + c]; }
    double max_abs() const;
};

ChristoffelTable levi_civita(const MetricJet& mj);
ChristoffelTable chern(const MetricJet& mj);
ChristoffelTable bismut(const MetricJet& mj);
// Restriction of the Levi-Civita table to T^{1,0}M (the induced connection).
ChristoffelTable induced(const ChristoffelTable& lc);

// Lowered coefficient sum_beta theta_{A alpha}^beta h_{beta gammabar} at the point.
cplx lowered(const ChristoffelTable& t, const MetricJet& mj, int a, int alpha, int gamma);

// A connection on a trivialized rank-r bundle over the chart, with a fiber metric.
// theta[A](beta, alpha) = theta_{A alpha}^beta so that (nabla_A s) = d_A s + theta[A] s.
// metric(alpha, beta) = <e_alpha, e_beta> = H_{alpha betabar}.
struct ConnectionJet {
    int n = 0;
    int rank = 0;
    std::vector<JetMat> theta;  // 2n entries
    JetMat metric;

    static ConnectionJet trivial(int n, int rank, int order);
    static ConnectionJet from_table(const ChristoffelTable& t, const MetricJet& mj);
    int order() const;
};

// Largest violation of d_A H = theta_A^T H + H conj(theta_{Abar}) over all A and entries.
struct CompatibilityReport {
    double max_violation = 0.0;
    int direction = -1, alpha = -1, beta = -1;
};
CompatibilityReport metric_compatibility(const ConnectionJet& c);

// R_{i jbar alpha}^beta at the point, stored [((i*n + j)*r + beta)*r + alpha]:
// R_{i jbar} = d_i theta_{jbar} - d_{jbar} theta_i + [theta_i, theta_{jbar}].
std::vector<cplx> connection_curvature(const ConnectionJet& c);

}  // namespace hermitia
