#include "hermitia/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "hermitia/samples.hpp"

namespace hermitia {

int worker_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(n, 1);
    if (const char* env = std::getenv("HERMITIA_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

namespace {

template <class Fn>
void parallel_for(int count, int threads, Fn fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int lo = w * chunk, hi = std::min(count, lo + chunk);
        pool.emplace_back([lo, hi, &fn, &err = errors[w]] {
            try {
                for (int k = lo; k < hi; ++k) fn(k);
            } catch (...) {
                err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

constexpr int kD1Off[4] = {-2, -1, 1, 2};
constexpr double kD1W[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
constexpr double kD2W[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

struct Derivatives {
    CMatrix h0;
    std::vector<CMatrix> first;                // 2n real axes
    std::vector<std::vector<CMatrix>> second;  // 2n x 2n
};

Derivatives differentiate(int n, const StencilSampler& f, double dx, bool with_second) {
    const int m = 2 * n;
    Derivatives D;
    std::vector<int> off(m, 0);
    D.h0 = f(off);
    D.first.assign(m, CMatrix::Zero(n, n));
    for (int a = 0; a < m; ++a) {
        for (int s = 0; s < 4; ++s) {
            off[a] = kD1Off[s];
            D.first[a] += kD1W[s] * f(off);
        }
        off[a] = 0;
        D.first[a] /= dx;
    }
    if (!with_second) return D;
    D.second.assign(m, std::vector<CMatrix>(m, CMatrix::Zero(n, n)));
    for (int a = 0; a < m; ++a) {
        for (int s = -2; s <= 2; ++s) {
            off[a] = s;
            D.second[a][a] += kD2W[s + 2] * (s == 0 ? D.h0 : f(off));
        }
        off[a] = 0;
        D.second[a][a] /= dx * dx;
        for (int b = a + 1; b < m; ++b) {
            CMatrix acc = CMatrix::Zero(n, n);
            for (int s = 0; s < 4; ++s)
                for (int t = 0; t < 4; ++t) {
                    off[a] = kD1Off[s];
                    off[b] = kD1Off[t];
                    acc += (kD1W[s] * kD1W[t]) * f(off);
                }
            off[a] = off[b] = 0;
            D.second[a][b] = acc / (dx * dx);
            D.second[b][a] = D.second[a][b];
        }
    }
    return D;
}

const cplx kI(0.0, 1.0);

}  // namespace

CMatrix theta2_stencil(int n, const StencilSampler& f, double dx) {
    const auto D = differentiate(n, f, dx, true);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(D.h0, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0)) throw DomainError("theta2: metric not positive definite at site");
    const CMatrix hinv = D.h0.inverse();
    std::vector<CMatrix> dz(n), dzb(n);
    for (int i = 0; i < n; ++i) {
        dz[i] = 0.5 * (D.first[i] - kI * D.first[n + i]);
        dzb[i] = 0.5 * (D.first[i] + kI * D.first[n + i]);
    }
    CMatrix out = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const CMatrix ddb = 0.25 * (D.second[i][j] + kI * D.second[i][n + j] - kI * D.second[n + i][j] +
                                        D.second[n + i][n + j]);
            out += hinv(j, i) * (dz[i] * hinv * dzb[j] - ddb);
        }
    return 0.5 * (out + out.adjoint());
}

int FlowState::sites() const {
    int s = 1;
    for (int a = 0; a < 2 * n; ++a) s *= N;
    return s;
}

CMatrix FlowState::at(int site) const {
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        h.data() + static_cast<size_t>(site) * n * n, n, n);
}

void FlowState::set(int site, const CMatrix& m) {
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        h.data() + static_cast<size_t>(site) * n * n, n, n) = m;
}

std::vector<int> FlowState::coords(int site) const {
    std::vector<int> c(2 * n);
    for (int a = 0; a < 2 * n; ++a) {
        c[a] = site % N;
        site /= N;
    }
    return c;
}

int FlowState::site(const std::vector<int>& c) const {
    int s = 0;
    for (int a = 2 * n - 1; a >= 0; --a) s = s * N + ((c[a] % N) + N) % N;
    return s;
}

FlowState FlowState::sample(const MetricField& field, int N, double mu, FlowConfig config) {
    if (N < 8) throw DomainError("flow grid needs N >= 8 for the stencil");
    FlowState s;
    s.n = field.n();
    s.N = N;
    s.mu = mu;
    s.config = config;
    s.h.resize(static_cast<size_t>(s.sites()) * s.n * s.n);
    for (int k = 0; k < s.sites(); ++k) {
        const auto c = s.coords(k);
        std::vector<double> x(c.begin(), c.end());
        for (auto& v : x) v /= N;
        s.set(k, field.evaluate(torus_point(x)));
    }
    return s;
}

namespace {

StencilSampler grid_sampler(const FlowState& s, int site) {
    const auto base = s.coords(site);
    return [&s, base](const std::vector<int>& off) {
        std::vector<int> c(base);
        for (size_t a = 0; a < c.size(); ++a) c[a] += off[a];
        return s.at(s.site(c));
    };
}

}  // namespace

CMatrix theta2_discrete(const FlowState& s, int site) {
    if (s.N < 8) throw DomainError("theta2_discrete: N >= 8 required");
    return theta2_stencil(s.n, grid_sampler(s, site), s.dx());
}

std::vector<CMatrix> theta2_field(const FlowState& s) {
    std::vector<CMatrix> out(s.sites());
    parallel_for(s.sites(), worker_threads(s.config.threads), [&](int k) { out[k] = theta2_discrete(s, k); });
    return out;
}

CMatrix theta2_sampled(const MetricField& field, const Point& z, double dx) {
    const int n = field.n();
    auto f = [&](const std::vector<int>& off) {
        Point w(z);
        for (int j = 0; j < n; ++j) w[j] += cplx(off[j] * dx, off[n + j] * dx);
        return field.evaluate(w);
    };
    return theta2_stencil(n, f, dx);
}

double kahler_defect_at(const FlowState& s, int site) {
    const int n = s.n;
    const auto D = differentiate(n, grid_sampler(s, site), s.dx(), false);
    std::vector<CMatrix> dz(n);
    for (int i = 0; i < n; ++i) dz[i] = 0.5 * (D.first[i] - kI * D.first[n + i]);
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) m = std::max(m, std::abs(dz[i](k, j) - dz[k](i, j)));
    return m;
}

double kahler_defect(const FlowState& s) {
    std::vector<double> v(s.sites());
    parallel_for(s.sites(), worker_threads(s.config.threads), [&](int k) { v[k] = kahler_defect_at(s, k); });
    return *std::max_element(v.begin(), v.end());
}

double auto_dt(const FlowState& s) {
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.sites(); ++k) lo = std::min(lo, min_eigenvalue(s.at(k)));
    return s.config.cfl * s.dx() * s.dx() * lo;
}

namespace {

// rate = -Theta2 + mu h, flat storage
std::vector<cplx> rate(const FlowState& s) {
    std::vector<cplx> out(s.h.size());
    const int nn = s.n * s.n;
    parallel_for(s.sites(), worker_threads(s.config.threads), [&](int k) {
        CMatrix th;
        try {
            th = theta2_discrete(s, k);
        } catch (const DomainError& e) {
            throw FlowHalt(std::string("Runge-Kutta stage: ") + e.what() + " " + std::to_string(k), k, s.t);
        }
        const CMatrix r = s.mu * s.at(k) - th;
        for (int i = 0; i < s.n; ++i)
            for (int j = 0; j < s.n; ++j) out[static_cast<size_t>(k) * nn + i * s.n + j] = r(i, j);
    });
    return out;
}

FlowState shifted(const FlowState& s, const std::vector<cplx>& k, double f) {
    FlowState o = s;
    for (size_t x = 0; x < o.h.size(); ++x) o.h[x] += f * k[x];
    return o;
}

}  // namespace

FlowState step(const FlowState& s, double dt) {
    if (dt <= 0.0) dt = s.config.dt > 0.0 ? s.config.dt : auto_dt(s);
    const auto k1 = rate(s);
    const auto k2 = rate(shifted(s, k1, dt / 2));
    const auto k3 = rate(shifted(s, k2, dt / 2));
    const auto k4 = rate(shifted(s, k3, dt));
    FlowState o = s;
    for (size_t x = 0; x < o.h.size(); ++x) o.h[x] += dt / 6 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
    o.t = s.t + dt;
    for (int k = 0; k < o.sites(); ++k) {
        CMatrix m = o.at(k);
        if (!m.allFinite()) throw FlowHalt("non-finite metric at site " + std::to_string(k), k, o.t);
        m = (0.5 * (m + m.adjoint())).eval();
        o.set(k, m);
        if (!(min_eigenvalue(m) > 0.0)) throw FlowHalt("metric lost positivity at site " + std::to_string(k), k, o.t);
    }
    return o;
}

FlowSnapshot diagnose(const FlowState& s, int step_count, double wall_seconds) {
    FlowSnapshot d;
    d.step = step_count;
    d.t = s.t;
    d.wall_seconds = wall_seconds;
    d.kahler_defect = kahler_defect(s);
    const auto th = theta2_field(s);
    d.min_eig = std::numeric_limits<double>::infinity();
    d.max_eig = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.sites(); ++k) {
        const CMatrix h = s.at(k);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        d.min_eig = std::min(d.min_eig, es.eigenvalues()(0));
        d.max_eig = std::max(d.max_eig, es.eigenvalues()(s.n - 1));
        d.einstein_residual = std::max(d.einstein_residual, (th[k] - s.mu * h).cwiseAbs().maxCoeff());
    }
    return d;
}

FlowResult run(const MetricField& initial, int N, double mu, double T, FlowConfig config) {
    return run(FlowState::sample(initial, N, mu, config), T);
}

FlowResult run(FlowState state, double T) {
    if (T < 0.0) throw DomainError("flow horizon must be nonnegative");
    const auto start = std::chrono::steady_clock::now();
    auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    const int cadence = std::max(1, state.config.cadence);
    FlowResult r;
    r.series.push_back(diagnose(state, 0, wall()));
    const double t_end = state.t + T;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (state.t < t_end - eps) {
        double dt = state.config.dt > 0.0 ? state.config.dt : auto_dt(state);
        dt = std::min(dt, t_end - state.t);
        try {
            state = step(state, dt);
        } catch (const FlowHalt& h) {
            r.halted = true;
            r.halt_reason = h.what();
            r.halt_site = h.site;
            break;
        }
        ++r.steps;
        const bool last = state.t >= t_end - eps;
        if (r.steps % cadence == 0 || last) r.series.push_back(diagnose(state, r.steps, wall()));
    }
    if (r.halted && r.series.back().step != r.steps) r.series.push_back(diagnose(state, r.steps, wall()));
    r.final_state = std::move(state);
    return r;
}

std::string diagnostics_csv(const std::vector<FlowSnapshot>& series) {
    std::ostringstream os;
    os.precision(17);
    os << "step,t,kahler_defect,min_eig,max_eig,einstein_residual,wall_seconds\n";
    for (const auto& d : series)
        os << d.step << ',' << d.t << ',' << d.kahler_defect << ',' << d.min_eig << ',' << d.max_eig << ','
           << d.einstein_residual << ',' << d.wall_seconds << '\n';
    return os.str();
}

std::string grid_dump_csv(const FlowState& s) {
    std::ostringstream os;
    os.precision(17);
    os << "# hermitia grid dump\n# dim " << s.n << "\n# N " << s.N << "\n# t " << s.t << "\n# mu " << s.mu << "\n";
    os << "site_index,i,j,re,im\n";
    for (int k = 0; k < s.sites(); ++k) {
        const CMatrix m = s.at(k);
        for (int i = 0; i < s.n; ++i)
            for (int j = 0; j < s.n; ++j) os << k << ',' << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
    }
    return os.str();
}

FlowState read_grid_dump_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    FlowState s;
    bool body = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "dim") hs >> s.n;
            else if (key == "N") hs >> s.N;
            else if (key == "t") hs >> s.t;
            else if (key == "mu") hs >> s.mu;
            continue;
        }
        if (!body) {
            if (line != "site_index,i,j,re,im") throw ParseError("grid dump line " + std::to_string(lineno) + ": bad column header");
            if (s.n < 1 || s.N < 1) throw ParseError("grid dump: missing dim or N header");
            s.h.assign(static_cast<size_t>(s.sites()) * s.n * s.n, 0.0);
            body = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long k;
        int i, j;
        double re, im;
        if (!(ls >> k >> i >> j >> re >> im) || k < 0 || k >= s.sites() || i < 0 || i >= s.n || j < 0 || j >= s.n)
            throw ParseError("grid dump line " + std::to_string(lineno) + ": bad record");
        s.h[static_cast<size_t>(k) * s.n * s.n + i * s.n + j] = cplx(re, im);
    }
    if (!body) throw ParseError("grid dump: no data");
    return s;
}

std::vector<FourierTerm> fit_torus_terms(const FlowState& s, int max_freq, double drop_below) {
    const int m = 2 * s.n, width = 2 * max_freq + 1;
    int total = 1;
    for (int a = 0; a < m; ++a) total *= width;
    std::vector<FourierTerm> terms;
    for (int idx = 0; idx < total; ++idx) {
        std::vector<int> freq(m);
        int r = idx;
        for (int a = 0; a < m; ++a) {
            freq[a] = r % width - max_freq;
            r /= width;
        }
        CMatrix amp = CMatrix::Zero(s.n, s.n);
        for (int k = 0; k < s.sites(); ++k) {
            const auto c = s.coords(k);
            double phase = 0.0;
            for (int a = 0; a < m; ++a) phase += freq[a] * static_cast<double>(c[a]) / s.N;
            amp += s.at(k) * std::exp(cplx(0.0, -2.0 * std::numbers::pi * phase));
        }
        amp /= static_cast<double>(s.sites());
        if (amp.cwiseAbs().maxCoeff() > drop_below) terms.push_back({freq, amp});
    }
    return terms;
}

double hopf_self_similar(int n, double c0, double mu, double t) {
    if (n < 1) throw DomainError("hopf_self_similar: n >= 1 required");
    if (!(c0 > 0.0)) throw DomainError("hopf_self_similar: c0 > 0 required");
    const double k = (n - 1) / 4.0;
    if (mu == 0.0) return c0 - k * t;
    const double a = k / mu;
    return (c0 - a) * std::exp(mu * t) + a;
}

double hopf_extinction_time(int n, double c0, double mu) {
    if (n < 1) throw DomainError("hopf_extinction_time: n >= 1 required");
    if (!(c0 > 0.0)) throw DomainError("hopf_extinction_time: c0 > 0 required");
    const double inf = std::numeric_limits<double>::infinity();
    const double k = (n - 1) / 4.0;
    if (k == 0.0) return inf;
    if (mu == 0.0) return c0 / k;
    const double a = k / mu;
    // (c0 - a) e^{mu t} = -a
    const double ratio = a / (a - c0);
    if (!(ratio > 0.0)) return inf;
    const double t = std::log(ratio) / mu;
    return t > 0.0 ? t : inf;
}

ConvergenceStudy hopf_theta2_convergence(int n, const std::vector<int>& grids, int points, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> zs;
    for (int k = 0; k < points; ++k) zs.push_back(hopf_point(rng, n, 1.0, 2.0));
    const auto field = MetricField::hopf(n);
    ConvergenceStudy st;
    st.grids = grids;
    for (int N : grids) {
        double e = 0.0;
        for (const auto& z : zs) {
            double r2 = 0.0;
            for (auto v : z) r2 += std::norm(v);
            const CMatrix oracle = CMatrix::Identity(n, n) * ((n - 1) / r2);
            e = std::max(e, (theta2_sampled(field, z, 1.0 / N) - oracle).cwiseAbs().maxCoeff());
        }
        st.errors.push_back(e);
    }
    for (size_t k = 0; k + 1 < grids.size(); ++k)
        st.orders.push_back(std::log(st.errors[k] / st.errors[k + 1]) /
                            std::log(static_cast<double>(grids[k + 1]) / grids[k]));
    return st;
}

}  // namespace hermitia
