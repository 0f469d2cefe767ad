#pragma once

#include <string>
#include <vector>

#include "hermitia/curvature.hpp"

namespace hermitia {

// Closed forms for the metric h = 4 delta / |z|^2 on C^n \ {0}.
struct HopfPoint {
    int n = 2;
    Point z;

    HopfPoint() = default;
    HopfPoint(int n, Point z);  // DomainError for z = 0 or n < 2
    double r2() const;          // |z|^2
};

enum class HopfQuantity {
    Metric,          // h(k,l), n x n
    Dh,              // d_i h_{k lbar}, (i,k,l)
    DbarH,           // d_{jbar} h_{k lbar}, (j,k,l)
    D2h,             // d_i d_{jbar} h_{k lbar}, (i,j,k,l)
    LeviCivita,      // Gamma_{AB}^C, (2n)^3 in the connection table layout
    ChernTensor,     // Theta_{i jbar k lbar}
    ChernFirst,      // n x n
    ChernSecond,     // n x n
    ChernFirstSpectrum,  // ascending eigenvalues of ChernFirst
    LcTensor,        // R_{i jbar k lbar}
    LcMixed,         // R_{i jbar k}^l
    HermitianRicci,  // R_{k lbar}
    BismutMixed,     // B_{i jbar k}^l
    BismutFirst,
    BismutSecond,
};
std::string to_string(HopfQuantity q);
const std::vector<HopfQuantity>& all_hopf_quantities();

// Two candidate closed forms for the Bismut Ricci matrices:
// Quartic:         (2-n)(delta |z|^2 - zbar^i z^j) / |z|^4
// QuarterQuadratic: (2-n)(delta |z|^2 - zbar^i z^j) / (4 |z|^2)
enum class BismutRicciForm { Quartic, QuarterQuadratic };
std::string to_string(BismutRicciForm f);

std::vector<cplx> oracle(const HopfPoint& p, HopfQuantity q, BismutRicciForm form = BismutRicciForm::Quartic);
// The same quantity from the jet pipeline, in the same layout.
std::vector<cplx> pipeline(const HopfPoint& p, HopfQuantity q);

struct QuantityResidual {
    HopfQuantity quantity;
    double residual = 0.0;
};

struct OracleReport {
    HopfPoint point;
    std::vector<QuantityResidual> residuals;  // every quantity except the Bismut Ricci pair
    double bismut_residual_quartic = 0.0;
    double bismut_residual_quarter = 0.0;
    // The candidate used for the Bismut Ricci rows: the requested one, or with auto
    // selection the form with the smaller residual.
    BismutRicciForm bismut_form = BismutRicciForm::Quartic;
    double max_residual() const;  // includes the chosen Bismut form
};

OracleReport oracle_vs_pipeline(const HopfPoint& p);
OracleReport oracle_vs_pipeline(const HopfPoint& p, BismutRicciForm forced);

}  // namespace hermitia
