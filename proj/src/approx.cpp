#include "beckmann/approx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "beckmann/grid.hpp"
#include "beckmann/parallel.hpp"

namespace beckmann {

std::size_t SampledField::points() const
{
    std::size_t p = 1;
    for (const auto& ax : axes)
        p *= ax.size();
    return p;
}

namespace {

// Clamped uniform knot vector: degree + 1 zeros, interior i / K, degree + 1 ones.
std::vector<double> knot_vector(int K, int p)
{
    std::vector<double> U;
    for (int i = 0; i <= p; ++i)
        U.push_back(0.0);
    for (int i = 1; i < K; ++i)
        U.push_back(static_cast<double>(i) / K);
    for (int i = 0; i <= p; ++i)
        U.push_back(1.0);
    return U;
}

// All K + p basis values (ell = 0) or derivatives (ell = 1) at x, by the
// Cox-de Boor recursion with 0/0 read as 0.
std::vector<double> basis_row(const std::vector<double>& U, int K, int p, double x, int ell)
{
    const int cnt0 = K + 2 * p;  // degree-0 functions
    std::vector<double> N(static_cast<std::size_t>(cnt0), 0.0);
    const int j = p + std::min(static_cast<int>(std::floor(x * K)), K - 1);
    N[static_cast<std::size_t>(j)] = 1.0;
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    const int top = p - ell;
    for (int q = 1; q <= top; ++q) {
        std::vector<double> next(static_cast<std::size_t>(cnt0 - q), 0.0);
        for (int i = 0; i < cnt0 - q; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            next[ui] = ratio(x - U[ui], U[ui + static_cast<std::size_t>(q)] - U[ui]) * N[ui] +
                       ratio(U[ui + static_cast<std::size_t>(q) + 1] - x, U[ui + static_cast<std::size_t>(q) + 1] - U[ui + 1]) *
                           N[ui + 1];
        }
        N = std::move(next);
    }
    if (ell == 0)
        return N;
    std::vector<double> d(static_cast<std::size_t>(K + p), 0.0);
    for (int i = 0; i < K + p; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        d[ui] = p * (ratio(N[ui], U[ui + static_cast<std::size_t>(p)] - U[ui]) -
                     ratio(N[ui + 1], U[ui + static_cast<std::size_t>(p) + 1] - U[ui + 1]));
    }
    return d;
}

Eigen::MatrixXd basis_matrix(const std::vector<double>& U, int K, int p, const std::vector<double>& xs, int ell)
{
    Eigen::MatrixXd B(static_cast<Eigen::Index>(xs.size()), K + p);
    for (std::size_t r = 0; r < xs.size(); ++r) {
        const auto row = basis_row(U, K, p, xs[r], ell);
        for (int c = 0; c < K + p; ++c)
            B(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    return B;
}

// Applies A (M x shape[a]) along axis a of a tensor stored axis 0 fastest.
std::vector<double> mode_product(const std::vector<double>& T, std::vector<int>& shape, int a, const Eigen::MatrixXd& A)
{
    std::size_t inner = 1, outer = 1;
    for (int b = 0; b < a; ++b)
        inner *= static_cast<std::size_t>(shape[static_cast<std::size_t>(b)]);
    for (std::size_t b = static_cast<std::size_t>(a) + 1; b < shape.size(); ++b)
        outer *= static_cast<std::size_t>(shape[b]);
    const std::size_t n = static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
    const std::size_t m = static_cast<std::size_t>(A.rows());
    std::vector<double> out(inner * m * outer, 0.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) {
            for (std::size_t k = 0; k < n; ++k)
                v[static_cast<Eigen::Index>(k)] = T[i + inner * (k + n * o)];
            const Eigen::VectorXd r = A * v;
            for (std::size_t k = 0; k < m; ++k)
                out[i + inner * (k + m * o)] = r[static_cast<Eigen::Index>(k)];
        }
    shape[static_cast<std::size_t>(a)] = static_cast<int>(m);
    return out;
}

std::vector<double> component(const std::vector<double>& values, int dim_out, int c)
{
    std::vector<double> v(values.size() / static_cast<std::size_t>(dim_out));
    for (std::size_t p = 0; p < v.size(); ++p)
        v[p] = values[p * static_cast<std::size_t>(dim_out) + static_cast<std::size_t>(c)];
    return v;
}

void check_axes(const std::vector<std::vector<double>>& axes)
{
    if (axes.empty() || axes.size() > 3)
        throw std::invalid_argument("spline: input dimension must be 1, 2 or 3");
    for (const auto& ax : axes)
        for (double x : ax)
            if (!(x >= 0.0 && x <= 1.0))
                throw std::invalid_argument("spline: sample coordinate outside [0,1]");
}

void check_spline(const SplineApproximant& s, int ell)
{
    if (ell != 0 && ell != 1)
        throw std::invalid_argument("eval_spline: derivative order must be 0 or 1");
    if (ell >= s.degree)
        throw std::invalid_argument("eval_spline: derivative order must be below the degree");
}

double loglog_slope(const std::vector<int>& k, const std::vector<double>& e)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double x = std::log(static_cast<double>(k[i])), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void check_knots(const std::vector<int>& knots)
{
    if (knots.size() < 4)
        throw std::invalid_argument("rate_study: need at least 4 knot counts");
}

}  // namespace

SplineApproximant fit_spline(const SampledField& target, int knots, int degree)
{
    check_axes(target.axes);
    if (knots < 2)
        throw std::invalid_argument("fit_spline: need K >= 2");
    if (degree < 1)
        throw std::invalid_argument("fit_spline: degree must be >= 1");
    if (target.dim_out < 1 || target.values.size() != target.points() * static_cast<std::size_t>(target.dim_out))
        throw std::invalid_argument("fit_spline: value count does not match the sample grid");
    const int nb = knots + degree;
    const auto U = knot_vector(knots, degree);
    std::vector<Eigen::MatrixXd> pinv, colloc;
    for (const auto& ax : target.axes) {
        if (static_cast<int>(ax.size()) < 2 * nb)
            throw std::invalid_argument("fit_spline: need at least " + std::to_string(2 * nb) +
                                        " samples per axis, got " + std::to_string(ax.size()));
        colloc.push_back(basis_matrix(U, knots, degree, ax, 0));
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(colloc.back());
        if (qr.rank() < nb)
            throw std::invalid_argument("fit_spline: rank-deficient collocation matrix");
        pinv.push_back(qr.solve(Eigen::MatrixXd::Identity(colloc.back().rows(), colloc.back().rows())));
    }

    SplineApproximant s{degree, knots, target.dim_in(), target.dim_out, {}, 0.0};
    for (int c = 0; c < target.dim_out; ++c) {
        // The tensor design matrix is a Kronecker product, so its
        // pseudo-inverse is the Kronecker product of the per-axis ones.
        std::vector<int> shape;
        for (const auto& ax : target.axes)
            shape.push_back(static_cast<int>(ax.size()));
        auto coef = component(target.values, target.dim_out, c);
        for (int a = 0; a < s.dim_in; ++a)
            coef = mode_product(coef, shape, a, pinv[static_cast<std::size_t>(a)]);
        auto back = coef;
        for (int a = 0; a < s.dim_in; ++a)
            back = mode_product(back, shape, a, colloc[static_cast<std::size_t>(a)]);
        s.residual = std::max(s.residual, max_abs_diff(back, component(target.values, target.dim_out, c)));
        s.coefficients.insert(s.coefficients.end(), coef.begin(), coef.end());
    }
    return s;
}

std::vector<double> eval_spline(const SplineApproximant& s, std::span<const double> point, int ell)
{
    check_spline(s, ell);
    if (static_cast<int>(point.size()) != s.dim_in)
        throw std::invalid_argument("eval_spline: point dimension mismatch");
    for (double x : point)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("eval_spline: point outside [0,1]^m");
    const auto U = knot_vector(s.knots, s.degree);
    const std::size_t nb = static_cast<std::size_t>(s.basis_per_axis());
    std::vector<std::vector<double>> val, der;
    for (double x : point) {
        val.push_back(basis_row(U, s.knots, s.degree, x, 0));
        if (ell == 1)
            der.push_back(basis_row(U, s.knots, s.degree, x, 1));
    }
    std::size_t block = 1;
    for (int a = 0; a < s.dim_in; ++a)
        block *= nb;
    // Weight of coefficient idx, with axis `d_axis` differentiated (-1: none).
    auto weight = [&](std::size_t idx, int d_axis) {
        double w = 1.0;
        for (int a = 0; a < s.dim_in; ++a) {
            const std::size_t k = idx % nb;
            idx /= nb;
            w *= (a == d_axis ? der : val)[static_cast<std::size_t>(a)][k];
            if (w == 0.0)
                break;
        }
        return w;
    };
    const int cols = ell == 0 ? 1 : s.dim_in;
    std::vector<double> out(static_cast<std::size_t>(s.dim_out * cols), 0.0);
    for (int c = 0; c < s.dim_out; ++c)
        for (int col = 0; col < cols; ++col) {
            double sum = 0.0;
            for (std::size_t idx = 0; idx < block; ++idx)
                sum += s.coefficients[static_cast<std::size_t>(c) * block + idx] * weight(idx, ell == 0 ? -1 : col);
            out[static_cast<std::size_t>(c * cols + col)] = sum;
        }
    return out;
}

SampledField eval_spline_grid(const SplineApproximant& s, const std::vector<std::vector<double>>& axes, int ell, int axis)
{
    check_spline(s, ell);
    check_axes(axes);
    if (static_cast<int>(axes.size()) != s.dim_in)
        throw std::invalid_argument("eval_spline_grid: axis count mismatch");
    if (axis < 0 || axis >= s.dim_in)
        throw std::invalid_argument("eval_spline_grid: derivative axis out of range");
    const auto U = knot_vector(s.knots, s.degree);
    std::vector<Eigen::MatrixXd> mats;
    for (int a = 0; a < s.dim_in; ++a)
        mats.push_back(basis_matrix(U, s.knots, s.degree, axes[static_cast<std::size_t>(a)], ell == 1 && a == axis ? 1 : 0));
    SampledField out{axes, s.dim_out, {}};
    out.values.assign(out.points() * static_cast<std::size_t>(s.dim_out), 0.0);
    const std::size_t block = s.coefficients.size() / static_cast<std::size_t>(s.dim_out);
    for (int c = 0; c < s.dim_out; ++c) {
        std::vector<int> shape(static_cast<std::size_t>(s.dim_in), s.basis_per_axis());
        std::vector<double> t(s.coefficients.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * block),
                              s.coefficients.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c + 1) * block));
        for (int a = 0; a < s.dim_in; ++a)
            t = mode_product(t, shape, a, mats[static_cast<std::size_t>(a)]);
        for (std::size_t p = 0; p < t.size(); ++p)
            out.values[p * static_cast<std::size_t>(s.dim_out) + static_cast<std::size_t>(c)] = t[p];
    }
    return out;
}

std::vector<double> equispaced(int m)
{
    if (m < 1)
        throw std::invalid_argument("equispaced: need m >= 1");
    std::vector<double> x(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i)
        x[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
    return x;
}

SampledField sample(const AnalyticTarget& f, const std::vector<std::vector<double>>& axes)
{
    check_axes(axes);
    if (static_cast<int>(axes.size()) != f.dim_in)
        throw std::invalid_argument("sample: axis count mismatch");
    SampledField out{axes, f.dim_out, {}};
    const std::size_t P = out.points();
    out.values.resize(P * static_cast<std::size_t>(f.dim_out));
    std::vector<double> x(static_cast<std::size_t>(f.dim_in)), jac(static_cast<std::size_t>(f.dim_in * f.dim_out));
    for (std::size_t p = 0; p < P; ++p) {
        std::size_t r = p;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            x[a] = axes[a][r % axes[a].size()];
            r /= axes[a].size();
        }
        f.eval(x, std::span<double>(out.values).subspan(p * static_cast<std::size_t>(f.dim_out), static_cast<std::size_t>(f.dim_out)), jac);
    }
    return out;
}

RateStudy rate_study(const AnalyticTarget& f, const std::vector<int>& knots, int ell, int degree)
{
    check_knots(knots);
    const int kmax = *std::max_element(knots.begin(), knots.end());
    const int m = std::min(512, 16 * kmax);
    const std::vector<std::vector<double>> dense(static_cast<std::size_t>(f.dim_in), equispaced(m));
    const auto ref = sample(f, dense);
    // Reference derivatives along each axis, laid out like ref.values.
    std::vector<std::vector<double>> dref(static_cast<std::size_t>(f.dim_in));
    if (ell == 1) {
        const std::size_t P = ref.points();
        for (auto& d : dref)
            d.resize(P * static_cast<std::size_t>(f.dim_out));
        std::vector<double> x(static_cast<std::size_t>(f.dim_in)), val(static_cast<std::size_t>(f.dim_out)),
            jac(static_cast<std::size_t>(f.dim_in * f.dim_out));
        for (std::size_t p = 0; p < P; ++p) {
            std::size_t r = p;
            for (std::size_t a = 0; a < dense.size(); ++a) {
                x[a] = dense[a][r % dense[a].size()];
                r /= dense[a].size();
            }
            f.eval(x, val, jac);
            for (int a = 0; a < f.dim_in; ++a)
                for (int c = 0; c < f.dim_out; ++c)
                    dref[static_cast<std::size_t>(a)][p * static_cast<std::size_t>(f.dim_out) + static_cast<std::size_t>(c)] =
                        jac[static_cast<std::size_t>(c * f.dim_in + a)];
        }
    }

    RateStudy rs{ell, knots, std::vector<double>(knots.size()), std::vector<double>(knots.size()), 0.0};
    parallel_for(knots.size(), [&](std::size_t i) {
        const int K = knots[i];
        const std::vector<std::vector<double>> axes(static_cast<std::size_t>(f.dim_in), equispaced(4 * (K + degree) - 1));
        const auto s = fit_spline(sample(f, axes), K, degree);
        double e = max_abs_diff(eval_spline_grid(s, dense, 0).values, ref.values);
        if (ell == 1)
            for (int a = 0; a < f.dim_in; ++a)
                e = std::max(e, max_abs_diff(eval_spline_grid(s, dense, 1, a).values, dref[static_cast<std::size_t>(a)]));
        rs.errors[i] = e;
        rs.residuals[i] = s.residual;
    });
    rs.slope = loglog_slope(rs.knots, rs.errors);
    return rs;
}

RateStudy rate_study(const SampledField& data, const std::vector<int>& knots, int ell, int degree)
{
    check_knots(knots);
    check_axes(data.axes);
    std::vector<std::vector<double>> dref(static_cast<std::size_t>(data.dim_in()));
    if (ell == 1) {
        std::vector<int> shape;
        for (const auto& ax : data.axes)
            shape.push_back(static_cast<int>(ax.size()));
        for (int a = 0; a < data.dim_in(); ++a) {
            const auto& ax = data.axes[static_cast<std::size_t>(a)];
            auto& d = dref[static_cast<std::size_t>(a)];
            d.resize(data.values.size());
            for (int c = 0; c < data.dim_out; ++c) {
                const auto v = component(data.values, data.dim_out, c);
                std::vector<double> dv(v.size());
                differentiate_axis(v, shape, ax[1] - ax[0], a, dv);
                for (std::size_t p = 0; p < dv.size(); ++p)
                    d[p * static_cast<std::size_t>(data.dim_out) + static_cast<std::size_t>(c)] = dv[p];
            }
        }
    }
    RateStudy rs{ell, knots, std::vector<double>(knots.size()), std::vector<double>(knots.size()), 0.0};
    parallel_for(knots.size(), [&](std::size_t i) {
        const auto s = fit_spline(data, knots[i], degree);
        double e = s.residual;
        if (ell == 1)
            for (int a = 0; a < data.dim_in(); ++a)
                e = std::max(e, max_abs_diff(eval_spline_grid(s, data.axes, 1, a).values, dref[static_cast<std::size_t>(a)]));
        rs.errors[i] = e;
        rs.residuals[i] = s.residual;
    });
    rs.slope = loglog_slope(rs.knots, rs.errors);
    return rs;
}

}  // namespace beckmann
