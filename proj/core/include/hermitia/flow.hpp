#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hermitia/metric.hpp"

namespace hermitia {

// dh/dt = -Theta2(h) + mu h on the torus [0,1)^{2n} with N points per axis.

struct FlowConfig {
    double dt = 0.0;      // 0: 0.1 dx^2 min-eig(h), recomputed every step
    double cfl = 0.1;
    int cadence = 1;      // diagnostics every `cadence` steps (and at the end)
    int threads = 0;      // 0: hardware concurrency, always capped by HERMITIA_THREADS
};

// Number of worker threads for `requested` (0 = hardware), capped by HERMITIA_THREADS.
int worker_threads(int requested = 0);

struct FlowState {
    int n = 0;
    int N = 0;
    double t = 0.0;
    double mu = 0.0;
    FlowConfig config;
    std::vector<cplx> h;  // site-major, n*n row-major per site

    static FlowState sample(const MetricField& field, int N, double mu, FlowConfig config = {});

    int sites() const;
    double dx() const { return 1.0 / N; }
    CMatrix at(int site) const;
    void set(int site, const CMatrix& m);
    // Axis coordinates of a site; axis a is x^a (a < n real part of z^a).
    std::vector<int> coords(int site) const;
    int site(const std::vector<int>& coords) const;  // periodic wrap
};

// Matrix-valued function sampled around a base point at real offsets (units of dx).
using StencilSampler = std::function<CMatrix(const std::vector<int>& offset)>;

// Theta2_{k lbar} = -h^{i jbar} d_i d_jbar h_{k lbar} + h^{i jbar} h^{p qbar} d_i h_{k qbar} d_jbar h_{p lbar}
// with 4th-order central differences; symmetrized.
CMatrix theta2_stencil(int n, const StencilSampler& f, double dx);
CMatrix theta2_discrete(const FlowState& s, int site);
std::vector<CMatrix> theta2_field(const FlowState& s);
// Non-periodic version: the field sampled at z + dx * offset.
CMatrix theta2_sampled(const MetricField& field, const Point& z, double dx);

// max_{site} |f_{i jbar k}|, f_{i jbar k} = d_i h_{k jbar} - d_k h_{i jbar}
double kahler_defect(const FlowState& s);
double kahler_defect_at(const FlowState& s, int site);

class FlowHalt : public DomainError {
public:
    FlowHalt(const std::string& what, int site, double t) : DomainError(what), site(site), t(t) {}
    int site;
    double t;
};

double auto_dt(const FlowState& s);
// One RK4 step of size dt (auto when <= 0). Throws FlowHalt on NaN or loss of positivity.
FlowState step(const FlowState& s, double dt = 0.0);

struct FlowSnapshot {
    int step = 0;
    double t = 0.0;
    double kahler_defect = 0.0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    double einstein_residual = 0.0;  // max |Theta2 - mu h|
    double wall_seconds = 0.0;
};

FlowSnapshot diagnose(const FlowState& s, int step, double wall_seconds);

struct FlowResult {
    std::vector<FlowSnapshot> series;
    FlowState final_state;
    bool halted = false;
    std::string halt_reason;
    int halt_site = -1;
    int steps = 0;
};

FlowResult run(const MetricField& initial, int N, double mu, double T, FlowConfig config = {});
FlowResult run(FlowState state, double T);

std::string diagnostics_csv(const std::vector<FlowSnapshot>& series);
// Header lines start with '#'; body `site_index,i,j,re,im`.
std::string grid_dump_csv(const FlowState& s);
FlowState read_grid_dump_csv(const std::string& text);
// Discrete Fourier fit with frequencies in [-max_freq, max_freq]^{2n}; tiny terms dropped.
std::vector<FourierTerm> fit_torus_terms(const FlowState& s, int max_freq, double drop_below = 1e-14);

// Family h = c(t) (4/|z|^2) delta: dc/dt = mu c - (n-1)/4.
double hopf_self_similar(int n, double c0, double mu, double t);
// First t > 0 with c(t) = 0, +inf when c stays positive.
double hopf_extinction_time(int n, double c0, double mu);

struct ConvergenceStudy {
    std::vector<int> grids;
    std::vector<double> errors;  // max |Theta2_discrete - oracle| over the samples
    std::vector<double> orders;  // observed order between consecutive grids
};

// Discrete Theta2 of the Hopf metric sampled with spacing 1/N around annulus points,
// against the closed form (n-1) delta / |z|^2.
ConvergenceStudy hopf_theta2_convergence(int n, const std::vector<int>& grids, int points, std::uint64_t seed);

}  // namespace hermitia
