#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hermitia/curvature.hpp"

namespace hermitia {

// Closed-form curvature expressions at a normal point (h = I, holomorphic Christoffels
// zero), written in metric derivatives only, checked against the connection pipeline.

// Derivatives of h at the point:
//   dz(i,j,k)    = d h_{i jbar} / d z^k
//   dzb(i,j,k)   = d h_{i jbar} / d zbar^k
//   d2(i,j,k,l)  = d^2 h_{i jbar} / d z^k d zbar^l
struct NormalPointData {
    int n = 0;
    std::vector<cplx> first_z, first_zb, second;
    cplx dz(int i, int j, int k) const { return first_z[(i * n + j) * n + k]; }
    cplx dzb(int i, int j, int k) const { return first_zb[(i * n + j) * n + k]; }
    cplx d2(int i, int j, int k, int l) const { return second[((i * n + j) * n + k) * n + l]; }
};

// Throws PreconditionError unless h = I and the holomorphic Christoffels vanish to tol.
NormalPointData normal_point_data(const MetricJet& mj, double tol = 1e-12);

enum class FormulaFamily { General, Balanced, Pluriclosed };
std::string to_string(FormulaFamily f);

struct FormulaRow {
    std::string name;
    FormulaFamily family = FormulaFamily::General;
    // Alternative rows: a corrected coefficient pattern or another reading of an
    // ambiguous symbol, reported next to the reference row of the same name.
    bool alternative = false;
    double residual = 0.0;
};

std::vector<FormulaRow> general_formulas(const MetricJet& mj);
// Requires the balanced condition at the point (torsion trace and its derivative zero).
std::vector<FormulaRow> balanced_formulas(const MetricJet& mj);
// Requires the pluriclosed trace condition at the point.
std::vector<FormulaRow> pluriclosed_formulas(const MetricJet& mj);

struct NormalPointReport {
    int n = 0;
    int metrics = 0;
    std::uint64_t seed = 0;
    std::vector<FormulaRow> rows;  // worst residual per (family, name, alternative)
    double max_reference() const;
    double max_alternative() const;
    std::vector<std::string> failing(double tol, bool alternative = false) const;
};

// `metrics` random normal-form metrics per family (general, balanced, pluriclosed).
NormalPointReport normal_point_suite(int n, int metrics, std::uint64_t seed);

}  // namespace hermitia
