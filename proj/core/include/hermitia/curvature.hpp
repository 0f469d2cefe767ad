#pragma once

#include <string>
#include <vector>

#include "hermitia/connection.hpp"

namespace hermitia {

using CurvatureKind = ConnectionKind;

// Components T_{i jbar k lbar} at a point, stored in the order (i, jbar, k, lbar).
struct CurvatureTensor {
    CurvatureKind kind = CurvatureKind::LeviCivita;
    int n = 0;
    Point point;
    std::vector<cplx> c;
    // Levi-Civita only: R_{k i jbar lbar}, stored (k, i, jbar, lbar); feeds the complexified Ricci.
    std::vector<cplx> mixed;

    cplx operator()(int i, int j, int k, int l) const { return c[((i * n + j) * n + k) * n + l]; }
    cplx& operator()(int i, int j, int k, int l) { return c[((i * n + j) * n + k) * n + l]; }
    cplx mixed_at(int k, int i, int j, int l) const { return mixed[((k * n + i) * n + j) * n + l]; }
};

CurvatureTensor curvature_lc(const MetricJet& mj);
CurvatureTensor curvature_induced(const MetricJet& mj);
CurvatureTensor curvature_chern(const MetricJet& mj);
CurvatureTensor curvature_bismut(const MetricJet& mj);
CurvatureTensor curvature(const MetricJet& mj, CurvatureKind kind);

// All lowered components R_{ABCD} of the complexified Levi-Civita curvature, (2n)^4.
std::vector<cplx> lc_curvature_full(const MetricJet& mj);

// Lowered curvature R_{i jbar alpha betabar} of a bundle connection (rank r, fiber metric at the point).
std::vector<cplx> lowered_curvature(const ConnectionJet& c);
// Rank-n connections on T^{1,0}M as a tensor of the given kind.
CurvatureTensor curvature_from_connection(const ConnectionJet& c, CurvatureKind kind, const Point& p);

enum class RicciFlavor { HermitianRicci, ComplexifiedRicci, First, Second };
std::string to_string(RicciFlavor f);

struct RicciMatrix {
    RicciFlavor flavor = RicciFlavor::First;
    CurvatureKind kind = CurvatureKind::Chern;
    CMatrix m;
    Point point;
};

// First: T_{i jbar k lbar} h^{k lbar} (indices i, j). Second: h^{i jbar} T_{i jbar k lbar} (indices k, l).
// HermitianRicci equals Second on the Levi-Civita tensor; ComplexifiedRicci uses the mixed block.
RicciMatrix ricci(const CurvatureTensor& t, const MetricJet& mj, RicciFlavor flavor);
// h^{i jbar}(2 R_{k jbar i lbar} - R_{k lbar i jbar}), the route through the first Bianchi identity.
CMatrix complexified_ricci_bianchi(const CurvatureTensor& t, const MetricJet& mj);
// -d_i d_{jbar} log det h
RicciMatrix ricci_first_chern_logdet(const MetricJet& mj);

struct ScalarReport {
    Point point;
    cplx s_h;   // complexified scalar
    cplx S;     // Hermitian scalar
    cplx S_lc;  // induced connection
    cplx S_ch;  // Chern
    cplx S_bm;  // Bismut
    double max_imag() const;
};

ScalarReport scalars(const MetricJet& mj);

// The eight Ricci variants in a fixed order, for cross-checks and reports.
struct RicciFamily {
    CMatrix theta1, theta2, induced1, induced2, bismut1, bismut2, hermitian, complexified;
};
RicciFamily ricci_family(const MetricJet& mj);

}  // namespace hermitia
