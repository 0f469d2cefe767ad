#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hermitia/connection.hpp"
#include "hermitia/curvature.hpp"

namespace hermitia {

inline constexpr double kPositivityTol = 1e-10;

enum class Verdict { Positive, Nonnegative, Indefinite, Nonpositive, Negative };
std::string to_string(Verdict v);

struct PositivityReport {
    std::vector<double> eigenvalues;  // ascending
    std::vector<Verdict> p_verdicts;  // index p-1
    double tol = kPositivityTol;

    bool p_positive(int p) const;
    bool p_nonnegative(int p) const;
    bool p_negative(int p) const;
    bool p_nonpositive(int p) const;
};

// Verdict for each p from the sums of the p smallest and the p largest eigenvalues.
// Throws StructuralError when m is not Hermitian to 1e-12.
PositivityReport p_positivity(const CMatrix& m, double tol = kPositivityTol);
// Minimum over all p-subsets of eigenvalue sums; the exhaustive route for small matrices.
double subset_min_sum(const std::vector<double>& eigenvalues, int p);
double subset_max_sum(const std::vector<double>& eigenvalues, int p);

struct GriffithsResult {
    double minimum = 0.0;
    std::vector<cplx> u, v;  // witness of the minimum
    double maximum = 0.0;
    Verdict verdict = Verdict::Nonnegative;
    std::uint64_t seed = 0;
    int trials = 0;
};
GriffithsResult griffiths_sample(const CurvatureTensor& t, int trials, std::uint64_t seed,
                                 double tol = 1e-12);
cplx griffiths_form(const CurvatureTensor& t, const std::vector<cplx>& u, const std::vector<cplx>& v);

// Which curvature contraction is sign-checked, and in which direction.
enum class HypothesisTensor { ChernSecond, ChernFirst, BismutFirst, BismutSecond, HermitianRicci };
enum class HypothesisSign { Positive, Negative };
std::string to_string(HypothesisTensor t);

// Sign side: p-nonnegative at every sample and p-positive at one of them (or the
// mirror statement for Negative).
struct HypothesisReport {
    HypothesisTensor tensor = HypothesisTensor::ChernSecond;
    HypothesisSign sign = HypothesisSign::Positive;
    int p = 1;
    int samples = 0;
    bool everywhere = true;
    bool somewhere_strict = false;
    bool holds = false;
    std::vector<Point> failures;  // samples breaking the weak inequality
    Point strict_witness;         // a sample with the strict inequality, if any
    std::string statement;
};

// Tr_omega R^E = h^{i jbar} R_{i jbar alpha betabar} for a bundle connection.
CMatrix second_ricci_of(const ConnectionJet& c, const MetricJet& mj);

// Only the curvature hypotheses are checked, at the supplied samples; the statement
// field says so and never asserts any cohomological conclusion.
HypothesisReport vanishing_hypothesis_report(const MetricField& field, const std::vector<Point>& samples,
                                             HypothesisTensor tensor, HypothesisSign sign, int p = 1,
                                             double tol = kPositivityTol);
// Same check for Tr_omega R^E of an arbitrary connection, given per sample.
HypothesisReport vanishing_hypothesis_report(const std::vector<CMatrix>& traces, const std::vector<Point>& samples,
                                             HypothesisSign sign, int p = 1, double tol = kPositivityTol);

}  // namespace hermitia
