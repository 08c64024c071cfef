#include "beckmann/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "beckmann/errors.hpp"
#include "beckmann/parallel.hpp"

namespace beckmann {

namespace {

double extrapolate(double a, double b, double c) { return (15.0 * a - 10.0 * b + 3.0 * c) / 8.0; }

// Pads node data with wall values: (n+2)^dim entries, wall planes first and
// last along every axis. zero_axis selects a component whose wall value along
// that axis is zero. positive_floor keeps extrapolated values above half
// their neighbor (densities).
std::vector<double> extend(std::span<const double> v, int n, int dim, int zero_axis, bool positive_floor)
{
    const std::size_t m = static_cast<std::size_t>(n) + 2;
    auto wall = [&](double a, double b, double c) {
        const double e = extrapolate(a, b, c);
        return positive_floor ? std::max(e, 0.5 * a) : e;
    };
    if (dim == 1) {
        std::vector<double> e(m);
        for (int i = 0; i < n; ++i)
            e[static_cast<std::size_t>(i) + 1] = v[static_cast<std::size_t>(i)];
        e[0] = zero_axis == 0 ? 0.0 : wall(v[0], v[1], v[2]);
        e[m - 1] = zero_axis == 0 ? 0.0 : wall(v[static_cast<std::size_t>(n - 1)], v[static_cast<std::size_t>(n - 2)],
                                               v[static_cast<std::size_t>(n - 3)]);
        return e;
    }
    std::vector<double> e(m * m);
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t j = 0; j < nn; ++j) {
        const double* row = v.data() + j * nn;
        double* out = e.data() + (j + 1) * m;
        for (std::size_t i = 0; i < nn; ++i)
            out[i + 1] = row[i];
        out[0] = wall(row[0], row[1], row[2]);
        out[m - 1] = wall(row[nn - 1], row[nn - 2], row[nn - 3]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        auto at = [&](std::size_t j) { return e[j * m + i]; };
        e[i] = wall(at(1), at(2), at(3));
        e[(m - 1) * m + i] = wall(at(m - 2), at(m - 3), at(m - 4));
    }
    if (zero_axis == 0)
        for (std::size_t j = 0; j < m; ++j)
            e[j * m] = e[j * m + m - 1] = 0.0;
    if (zero_axis == 1)
        for (std::size_t i = 0; i < m; ++i)
            e[i] = e[(m - 1) * m + i] = 0.0;
    return e;
}

std::pair<std::size_t, double> locate_time(const std::vector<double>& ts, double t)
{
    if (ts.size() == 1)
        return {0, 0.0};
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    j = std::min(j, ts.size() - 2);
    return {j, (t - ts[j]) / (ts[j + 1] - ts[j])};
}

bool project_into_box(Point& x, int dim)
{
    bool moved = false;
    for (int a = 0; a < dim; ++a) {
        double& c = x[static_cast<std::size_t>(a)];
        if (c < 0.0) {
            c = 0.0;
            moved = true;
        } else if (c > 1.0) {
            c = 1.0;
            moved = true;
        }
    }
    return moved;
}

// Weights 1 / (r^2 + softening) with r in units of h.
constexpr double kScatterSoftening = 0.25;
// Smallest weighted variance of the particle offsets, in units of h^2.
constexpr double kScatterMinSpread = 0.02;

}  // namespace

double determinant(const Matrix& m, int dim) { return dim == 1 ? m[0] : m[0] * m[3] - m[1] * m[2]; }

VelocitySampler::VelocitySampler(const TransportField& tf)
    : dim_(tf.grid().dim()), n_(tf.grid().n()), h_(tf.grid().h())
{
    const std::size_t d = static_cast<std::size_t>(dim_);
    auto make_flux = [&](const VectorField& w) {
        Slice s;
        for (int a = 0; a < dim_; ++a) {
            s.w.push_back(extend(w[a].values(), n_, dim_, a, false));
            s.dw.resize(d * d);
            for (int b = 0; b < dim_; ++b)
                s.dw[static_cast<std::size_t>(a) * d + static_cast<std::size_t>(b)] =
                    extend(partial(w[a], b).values(), n_, dim_, -1, false);
        }
        return s;
    };
    auto make_rho = [&](const ScalarField& rho) {
        RhoSlice s;
        s.rho = extend(rho.values(), n_, dim_, -1, true);
        for (int b = 0; b < dim_; ++b)
            s.drho.push_back(extend(partial(rho, b).values(), n_, dim_, -1, false));
        return s;
    };
    if (tf.constant_flux) {
        flux_times_ = {0.0};
        flux_.push_back(make_flux(tf.fluxes.front()));
    } else {
        flux_times_ = tf.t_nodes;
        for (const auto& w : tf.fluxes)
            flux_.push_back(make_flux(w));
    }
    if (tf.path.kind() == PathKind::Linear) {
        // rho_t is affine in t, so its two ends are exact.
        rho_times_ = {0.0, 1.0};
        rho_.push_back(make_rho(tf.path.rho_nu().field()));
        rho_.push_back(make_rho(tf.path.rho_mu().field()));
    } else {
        rho_times_ = tf.t_nodes;
        for (const auto& r : tf.densities)
            rho_.push_back(make_rho(r));
    }
}

VelocitySampler::Stencil VelocitySampler::stencil(const Point& x) const
{
    const std::size_t m = static_cast<std::size_t>(n_) + 2;
    std::array<std::size_t, 2> k{};
    std::array<double, 2> lam{};
    for (int a = 0; a < dim_; ++a) {
        const double c = std::clamp(x[static_cast<std::size_t>(a)], 0.0, 1.0);
        std::size_t kk;
        double l;
        if (c <= 0.5 * h_) {
            kk = 0;
            l = c / (0.5 * h_);
        } else if (c >= 1.0 - 0.5 * h_) {
            kk = static_cast<std::size_t>(n_);
            l = (c - (1.0 - 0.5 * h_)) / (0.5 * h_);
        } else {
            const double s = (c - 0.5 * h_) / h_;
            kk = std::clamp<std::size_t>(static_cast<std::size_t>(s) + 1, 1, static_cast<std::size_t>(n_) - 1);
            l = (c - (static_cast<double>(kk) - 0.5) * h_) / h_;
        }
        k[static_cast<std::size_t>(a)] = kk;
        lam[static_cast<std::size_t>(a)] = l;
    }
    Stencil st;
    if (dim_ == 1) {
        st.count = 2;
        st.idx = {k[0], k[0] + 1, 0, 0};
        st.wt = {1.0 - lam[0], lam[0], 0.0, 0.0};
    } else {
        st.count = 4;
        const std::size_t base = k[1] * m + k[0];
        st.idx = {base, base + 1, base + m, base + m + 1};
        st.wt = {(1 - lam[0]) * (1 - lam[1]), lam[0] * (1 - lam[1]), (1 - lam[0]) * lam[1], lam[0] * lam[1]};
    }
    return st;
}

void VelocitySampler::evaluate(double t, const Point& x, bool with_jacobian, Point& xi, Matrix& dxi) const
{
    const Stencil st = stencil(x);
    auto interp = [&](const std::vector<double>& arr) {
        double s = 0.0;
        for (int q = 0; q < st.count; ++q)
            s += st.wt[static_cast<std::size_t>(q)] * arr[st.idx[static_cast<std::size_t>(q)]];
        return s;
    };
    const auto [jf, lf] = locate_time(flux_times_, t);
    const auto [jr, lr] = locate_time(rho_times_, t);
    auto in_time = [](double lam, double a, auto&& b) { return lam == 0.0 ? a : (1.0 - lam) * a + lam * b(); };

    const RhoSlice& r0 = rho_[jr];
    const double rho = in_time(lr, interp(r0.rho), [&] { return interp(rho_[jr + 1].rho); });
    const std::size_t d = static_cast<std::size_t>(dim_);
    std::array<double, 2> w{};
    for (std::size_t a = 0; a < d; ++a) {
        w[a] = in_time(lf, interp(flux_[jf].w[a]), [&] { return interp(flux_[jf + 1].w[a]); });
        xi[a] = -w[a] / rho;
    }
    if (!with_jacobian)
        return;
    std::array<double, 2> drho{};
    for (std::size_t b = 0; b < d; ++b)
        drho[b] = in_time(lr, interp(r0.drho[b]), [&] { return interp(rho_[jr + 1].drho[b]); });
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            const double dw = in_time(lf, interp(flux_[jf].dw[a * d + b]), [&] { return interp(flux_[jf + 1].dw[a * d + b]); });
            dxi[a * d + b] = -(dw * rho - w[a] * drho[b]) / (rho * rho);
        }
}

Point VelocitySampler::velocity(double t, const Point& x) const
{
    Point xi{};
    Matrix unused{};
    evaluate(t, x, false, xi, unused);
    return xi;
}

void VelocitySampler::velocity_and_jacobian(double t, const Point& x, Point& xi, Matrix& dxi) const
{
    xi = {};
    dxi = {};
    evaluate(t, x, true, xi, dxi);
}

std::size_t FlowMap::time_index(double t) const
{
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) < 1e-12)
            return k;
    throw std::invalid_argument("FlowMap: no output at the requested time");
}

std::vector<Point> grid_particles(const Grid& grid)
{
    std::vector<Point> p(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        p[k] = grid.node(k);
    return p;
}

namespace {

struct Schedule {
    long total = 0;
    double dt = 0.0;
    std::vector<long> output_steps;
};

Schedule make_schedule(const FlowOptions& o, std::vector<double>& times)
{
    if (o.steps < 8)
        throw std::invalid_argument("integrate_flow: steps must be >= 8");
    if (!(o.t_start >= 0.0 && o.t_end <= 1.0 && o.t_end > o.t_start))
        throw std::invalid_argument("integrate_flow: need 0 <= t_start < t_end <= 1");
    Schedule s;
    s.dt = 1.0 / o.steps;
    const double span = (o.t_end - o.t_start) * o.steps;
    s.total = std::lround(span);
    if (std::abs(span - static_cast<double>(s.total)) > 1e-9)
        throw std::invalid_argument("integrate_flow: t_end - t_start is not a multiple of 1/steps");
    times = o.output_times.empty() ? std::vector<double>{o.t_end} : o.output_times;
    for (double t : times) {
        const double k = (t - o.t_start) * o.steps;
        const long kk = std::lround(k);
        if (std::abs(k - static_cast<double>(kk)) > 1e-9 || kk < 0 || kk > s.total)
            throw std::invalid_argument("integrate_flow: output time off the step lattice or outside the interval");
        s.output_steps.push_back(kk);
    }
    return s;
}

// Integrates one particle; J is advanced only when jac is non-null.
long advance(const VelocitySampler& field, int dim, Point x, const Schedule& s, double t0,
             std::vector<Point>& pos_out, std::vector<Matrix>* jac_out, double* min_det)
{
    long events = 0;
    const Point start = x;
    const std::size_t d = static_cast<std::size_t>(dim);
    Matrix J{};
    for (std::size_t a = 0; a < d; ++a)
        J[a * d + a] = 1.0;
    auto record = [&](long step) {
        for (std::size_t o = 0; o < s.output_steps.size(); ++o)
            if (s.output_steps[o] == step) {
                pos_out[o] = x;
                if (jac_out)
                    (*jac_out)[o] = J;
            }
    };
    auto stage = [&](double t, const Point& y, Point& k, const Matrix& Jy, Matrix& kJ) {
        if (!jac_out) {
            k = field.velocity(t, y);
            return;
        }
        Matrix g{};
        field.velocity_and_jacobian(t, y, k, g);
        kJ = {};
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                for (std::size_t c = 0; c < d; ++c)
                    kJ[a * d + b] += g[a * d + c] * Jy[c * d + b];
    };
    auto offset = [&](const Point& base, const Point& k, double c) {
        Point y = base;
        for (std::size_t a = 0; a < d; ++a)
            y[a] += c * k[a];
        if (project_into_box(y, dim))
            ++events;
        return y;
    };
    auto offset_m = [&](const Matrix& base, const Matrix& k, double c) {
        Matrix y = base;
        for (std::size_t q = 0; q < d * d; ++q)
            y[q] += c * k[q];
        return y;
    };

    record(0);
    const double dt = s.dt;
    for (long step = 0; step < s.total; ++step) {
        const double t = t0 + static_cast<double>(step) * dt;
        Point k1, k2, k3, k4;
        Matrix j1{}, j2{}, j3{}, j4{};
        stage(t, x, k1, J, j1);
        const Point y2 = offset(x, k1, 0.5 * dt);
        stage(t + 0.5 * dt, y2, k2, offset_m(J, j1, 0.5 * dt), j2);
        const Point y3 = offset(x, k2, 0.5 * dt);
        stage(t + 0.5 * dt, y3, k3, offset_m(J, j2, 0.5 * dt), j3);
        const Point y4 = offset(x, k3, dt);
        stage(t + dt, y4, k4, offset_m(J, j3, dt), j4);
        for (std::size_t a = 0; a < d; ++a)
            x[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        if (project_into_box(x, dim))
            ++events;
        if (jac_out) {
            for (std::size_t q = 0; q < d * d; ++q)
                J[q] += dt / 6.0 * (j1[q] + 2.0 * j2[q] + 2.0 * j3[q] + j4[q]);
            const double det = determinant(J, dim);
            *min_det = std::min(*min_det, det);
            if (det <= kSingularDeterminant) {
                std::ostringstream os;
                os << "det = " << det << " at t = " << t + dt << " for the particle starting at (" << start[0];
                if (dim == 2)
                    os << ", " << start[1];
                os << ")";
                throw SingularJacobian(os.str());
            }
        }
        record(step + 1);
    }
    return events;
}

FlowMap run(const TransportField& tf, std::vector<Point> starts, const FlowOptions& options, bool with_jacobians)
{
    FlowMap fm;
    fm.dim = tf.grid().dim();
    fm.steps = options.steps;
    fm.t_start = options.t_start;
    fm.t_end = options.t_end;
    const Schedule s = make_schedule(options, fm.times);
    for (auto& p : starts)
        for (int a = 0; a < fm.dim; ++a)
            if (!(p[static_cast<std::size_t>(a)] >= 0.0 && p[static_cast<std::size_t>(a)] <= 1.0))
                throw std::invalid_argument("integrate_flow: start point outside the box");
    fm.particles = std::move(starts);
    const std::size_t P = fm.particles.size();
    const std::size_t O = fm.times.size();

    const VelocitySampler field(tf);
    std::vector<std::vector<Point>> pos(P, std::vector<Point>(O));
    std::vector<std::vector<Matrix>> jac(with_jacobians ? P : 0, std::vector<Matrix>(O));
    std::vector<long> events(P, 0);
    std::vector<double> dets(P, 1.0);
    parallel_for(P, [&](std::size_t p) {
        events[p] = advance(field, fm.dim, fm.particles[p], s, options.t_start, pos[p],
                            with_jacobians ? &jac[p] : nullptr, &dets[p]);
    });

    fm.positions_at.assign(O, std::vector<Point>(P));
    for (std::size_t p = 0; p < P; ++p) {
        fm.projection_events += events[p];
        for (std::size_t o = 0; o < O; ++o)
            fm.positions_at[o][p] = pos[p][o];
    }
    if (with_jacobians) {
        fm.jacobians_at.assign(O, std::vector<Matrix>(P));
        fm.min_det = 1.0;
        for (std::size_t p = 0; p < P; ++p) {
            fm.min_det = std::min(fm.min_det, dets[p]);
            for (std::size_t o = 0; o < O; ++o)
                fm.jacobians_at[o][p] = jac[p][o];
        }
    }
    return fm;
}

}  // namespace

FlowMap integrate_flow(const TransportField& tf, std::vector<Point> starts, const FlowOptions& options)
{
    return run(tf, std::move(starts), options, false);
}

FlowMap integrate_jacobians(const FlowMap& fm, const TransportField& tf)
{
    FlowOptions o;
    o.steps = fm.steps;
    o.t_start = fm.t_start;
    o.t_end = fm.t_end;
    o.output_times = fm.times;
    return run(tf, fm.particles, o, true);
}

Pushforward pushforward_density(const FlowMap& fm, std::size_t time_index, const Density& rho_nu)
{
    const Grid& g = rho_nu.grid();
    if (!fm.has_jacobians())
        throw std::invalid_argument("pushforward_density: jacobians not integrated");
    if (fm.particles.size() != g.size() || fm.dim != g.dim())
        throw std::invalid_argument("pushforward_density: particles must be seeded on the grid nodes");
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        if (x[0] != fm.particles[k][0] || x[1] != fm.particles[k][1])
            throw std::invalid_argument("pushforward_density: particles must be seeded on the grid nodes");
    }
    if (time_index >= fm.times.size())
        throw std::invalid_argument("pushforward_density: time index out of range");

    const int dim = g.dim();
    const int n = g.n();
    const double h = g.h();
    const std::size_t N = g.size();
    const int unknowns = dim + 1;
    const auto& pos = fm.positions_at[time_index];
    const auto& jac = fm.jacobians_at[time_index];

    // Bucket particles by the node cell that contains them; cell c along an
    // axis spans [x_c, x_{c+1}] with c = -1 and c = n-1 the wall half cells.
    const int cells = n + 1;
    const std::size_t buckets = dim == 1 ? static_cast<std::size_t>(cells) : static_cast<std::size_t>(cells) * cells;
    std::vector<std::vector<std::size_t>> bucket(buckets);
    std::vector<double> value(N);
    for (std::size_t p = 0; p < N; ++p) {
        value[p] = rho_nu[p] / determinant(jac[p], dim);
        std::array<int, 2> c{0, 0};
        for (int a = 0; a < dim; ++a) {
            const double s = std::floor((pos[p][static_cast<std::size_t>(a)] - 0.5 * h) / h);
            c[static_cast<std::size_t>(a)] = std::clamp(static_cast<int>(s), -1, n - 1) + 1;
        }
        bucket[static_cast<std::size_t>(c[0]) + static_cast<std::size_t>(cells) * static_cast<std::size_t>(c[1])].push_back(p);
    }

    std::vector<double> out(N, 0.0);
    std::size_t widened = 0;
    std::vector<std::size_t> near;
    for (std::size_t k = 0; k < N; ++k) {
        const auto mi = g.multi_index(k);
        const Point node = g.node(k);
        bool done = false;
        for (int ring = 0; !done; ++ring) {
            if (ring > n)
                throw std::runtime_error("pushforward_density: no particle reached the grid");
            // Cells touching the node, widened by `ring` cells on every side.
            near.clear();
            const int lo0 = std::max(mi[0] - ring, 0), hi0 = std::min(mi[0] + 1 + ring, cells - 1);
            const int lo1 = dim == 1 ? 0 : std::max(mi[1] - ring, 0);
            const int hi1 = dim == 1 ? 0 : std::min(mi[1] + 1 + ring, cells - 1);
            for (int c1 = lo1; c1 <= hi1; ++c1)
                for (int c0 = lo0; c0 <= hi0; ++c0) {
                    const auto& b = bucket[static_cast<std::size_t>(c0) + static_cast<std::size_t>(cells) * static_cast<std::size_t>(c1)];
                    near.insert(near.end(), b.begin(), b.end());
                }
            if (static_cast<int>(near.size()) < unknowns)
                continue;
            // Inverse-distance weighted fit value ~ c0 + c . (y - node) / h.
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(unknowns, unknowns);
            Eigen::VectorXd R = Eigen::VectorXd::Zero(unknowns);
            double num = 0.0, den = 0.0;
            for (std::size_t p : near) {
                Eigen::VectorXd phi(unknowns);
                phi[0] = 1.0;
                double r2 = 0.0;
                for (int a = 0; a < dim; ++a) {
                    const double dx = (pos[p][static_cast<std::size_t>(a)] - node[static_cast<std::size_t>(a)]) / h;
                    phi[a + 1] = dx;
                    r2 += dx * dx;
                }
                if (r2 * h * h < 1e-24) {
                    out[k] = value[p];
                    done = true;
                    break;
                }
                const double wgt = 1.0 / (r2 + kScatterSoftening);
                M += wgt * phi * phi.transpose();
                R += wgt * value[p] * phi;
                num += wgt * value[p];
                den += wgt;
            }
            if (done)
                break;
            // The cloud must spread in every direction, otherwise the slope
            // terms are noise and the fit extrapolates badly.
            const Eigen::VectorXd mean = M.col(0).tail(dim) / den;
            const Eigen::MatrixXd cov = M.bottomRightCorner(dim, dim) / den - mean * mean.transpose();
            if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().minCoeff() < kScatterMinSpread)
                continue;
            const Eigen::VectorXd c = M.ldlt().solve(R);
            out[k] = std::isfinite(c[0]) && c[0] > 0.0 ? c[0] : num / den;
            if (ring > 0)
                ++widened;
            done = true;
        }
    }

    ScalarField field(g, std::move(out));
    const double mass = integrate(field);
    Pushforward res{field, std::abs(mass - 1.0), widened};
    res.density *= 1.0 / mass;
    return res;
}

TransportError transport_error(const ScalarField& pushed, const ScalarField& target)
{
    if (!(pushed.grid() == target.grid()))
        throw std::invalid_argument("transport_error: grid mismatch");
    ScalarField diff = pushed - target;
    ScalarField absdiff = diff;
    for (double& v : absdiff.mutable_values())
        v = std::abs(v);
    return {integrate(absdiff), diff.max_abs()};
}

}  // namespace beckmann
