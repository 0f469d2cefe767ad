#pragma once

#include <string>
#include <vector>

#include "hermitia/curvature.hpp"

namespace hermitia {

inline constexpr double kClassifyTol = 1e-9;

// f_{i jbar k} = d_k h_{i jbar} - d_i h_{k jbar}, stored (i, j, k).
struct KahlerDefect {
    int n = 0;
    double max = 0.0;
    std::vector<cplx> f;
    cplx operator()(int i, int j, int k) const { return f[(i * n + j) * n + k]; }
};

KahlerDefect kahler_defect(const MetricJet& mj);

// eta_l = sum_j Gamma_{l jbar}^{jbar}
std::vector<cplx> balanced_torsion(const MetricJet& mj);
// Same trace with the lower slots swapped, sum_j Gamma_{jbar l}^{jbar}.
std::vector<cplx> balanced_torsion_swapped(const MetricJet& mj);

// Coordinate residual of the pluriclosed trace condition:
// sum_k (d_k d_kbar h_{i jbar} + d_i d_jbar h_{k kbar} - d_k d_jbar h_{i kbar} - d_i d_kbar h_{k jbar}).
CMatrix skt_defect(const MetricJet& mj);
// The same bracket contracted with h^{k lbar}; this is the invariant used for classification.
CMatrix skt_defect_traced(const MetricJet& mj);

struct LaplacianValues {
    cplx dbar;       // Delta_dbar f
    cplx d;          // Delta_d f
    cplx canonical;  // -h^{i jbar} d_i d_jbar f
};
LaplacianValues laplacian_compare(const MetricJet& mj, const Jet& f);

struct Prop38Result {
    bool skipped = false;
    std::string reason;
    double norm = 0.0;  // (1/4)|f|^2 of the Kahler-defect tensor
    bool holds = false;
};
Prop38Result prop38_check(const MetricJet& mj, double tol = kClassifyTol);

// (1/4) |f|^2 with all three slots contracted with the inverse metric.
double torsion_norm(const MetricJet& mj);

struct StructureReport {
    Point point;
    double kahler_defect = 0.0;
    double balanced_defect = 0.0;
    double skt_defect = 0.0;         // raw coordinate residual
    double skt_traced_defect = 0.0;  // metric-traced residual
    bool kahler = false, balanced = false, skt = false;
};

StructureReport classify(const MetricJet& mj, double tol = kClassifyTol);

}  // namespace hermitia
