#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hermitia/metric.hpp"

namespace hermitia {

using Rng = std::mt19937_64;

cplx random_complex(Rng& rng, double scale = 1.0);
std::vector<cplx> random_vector(Rng& rng, int n, double scale = 1.0);
CMatrix random_unitary(Rng& rng, int n);

// Normal-form coefficients with Gaussian entries, projected to the admissible family.
NormalFormCoeffs random_normal_form(int n, Rng& rng, double torsion_scale = 0.3, double second_scale = 0.3);

// Torsion part projected so that the balanced torsion vanishes at 0, and the second-order
// part solved (minimum-norm change) so that its first derivatives vanish there too.
NormalFormCoeffs balanced_normal_form(int n, Rng& rng, double torsion_scale = 0.3, double second_scale = 0.3);
// Second-order part solved so that the pluriclosed trace residual vanishes at 0.
NormalFormCoeffs skt_normal_form(int n, Rng& rng, double torsion_scale = 0.3, double second_scale = 0.3);

// The balanced torsion at 0 and its 2n first derivatives, as a real vector.
std::vector<double> balanced_constraint(const NormalFormCoeffs& c, bool with_derivatives);

// h = I + d dbar phi for a real trigonometric potential phi.
MetricField kahler_torus(int n, Rng& rng, int frequencies = 3, double amplitude = 0.4);
std::vector<FourierTerm> kahler_torus_terms(int n, Rng& rng, int frequencies = 3, double amplitude = 0.4);
// Hermitian Fourier metric with generic (non-closed) Kahler form.
MetricField random_torus(int n, Rng& rng, int frequencies = 3, double amplitude = 0.2);
std::vector<FourierTerm> random_torus_terms(int n, Rng& rng, int frequencies = 3, double amplitude = 0.2);

// Points in the field's natural sampling domain: torus cell, Hopf annulus 1 <= |z| <= 2,
// and a small ball around 0 for the flat and normal-form kinds.
std::vector<Point> sample_points(const MetricField& f, int count, std::uint64_t seed);
std::vector<Point> halton_points(const MetricField& f, int count);
Point hopf_point(Rng& rng, int n, double rmin = 1.0, double rmax = 2.0);

}  // namespace hermitia
