#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"
#include "spectrum.hpp"

namespace qgrad {

/// Finite Fourier series a0 + sum_l a_l cos(w_l x) + b_l sin(w_l x).
struct TrigPoly {
    double a0 = 0.0;
    std::vector<double> frequencies;  // positive
    std::vector<double> a;
    std::vector<double> b;

    double eval(double x) const {
        double v = a0;
        for (std::size_t l = 0; l < frequencies.size(); ++l)
            v += a[l] * std::cos(frequencies[l] * x) + b[l] * std::sin(frequencies[l] * x);
        return v;
    }
};

/// Termwise analytic derivative of any order (order 0 returns the value).
inline double trigpoly_derivative(const TrigPoly &p, int order, double x) {
    if (order < 0) fail(ErrorCode::InvalidKind, "derivative order must be >= 0");
    if (order == 0) return p.eval(x);
    double v = 0.0;
    const double rot = 0.5 * pi * order;
    for (std::size_t l = 0; l < p.frequencies.size(); ++l) {
        const double w = p.frequencies[l];
        const double wp = std::pow(w, order);
        v += p.a[l] * wp * std::cos(w * x + rot) + p.b[l] * wp * std::sin(w * x + rot);
    }
    return v;
}

enum class KernelKind { dirichlet, modified, odd_mu, even_mu, nonequidistant_mu };

inline KernelKind kernel_kind_from_name(const std::string &name) {
    if (name == "dirichlet") return KernelKind::dirichlet;
    if (name == "modified") return KernelKind::modified;
    if (name == "odd_mu") return KernelKind::odd_mu;
    if (name == "even_mu") return KernelKind::even_mu;
    if (name == "nonequidistant_mu") return KernelKind::nonequidistant_mu;
    fail(ErrorCode::InvalidKind, "unknown kernel kind '" + name + "'");
}

namespace detail {

// Removable singularities sit at multiples of 2*pi; the exact limit is
// substituted when the argument is within 1e-8 of one.
inline double dirichlet_value(int r, double x) {
    const double y = std::remainder(x, 2.0 * pi);
    if (std::abs(y) < 1e-8) return 1.0;
    return std::sin((2.0 * r + 1.0) * 0.5 * y) / ((2.0 * r + 1.0) * std::sin(0.5 * y));
}

inline double modified_dirichlet_value(int r, double x) {
    const double y = std::remainder(x, 2.0 * pi);
    if (std::abs(y) < 1e-8) return 1.0;
    return std::sin(r * y) * std::cos(0.5 * y) / (2.0 * r * std::sin(0.5 * y));
}

/// Trigonometric Lagrange kernel on arbitrary nodes: 1 at nodes[mu], 0 at the
/// rest. Product form has constant denominators, so no singular handling.
inline double lagrange_trig_kernel(const std::vector<double> &nodes, std::size_t mu, double x) {
    double v = 1.0;
    for (std::size_t nu = 0; nu < nodes.size(); ++nu) {
        if (nu == mu) continue;
        v *= std::sin(0.5 * (x - nodes[nu])) / std::sin(0.5 * (nodes[mu] - nodes[nu]));
    }
    return v;
}

}  // namespace detail

/// Interpolation kernels. Node grids: odd_mu uses x_mu = (2mu-1)pi/(2R),
/// mu in [1,R]; even_mu uses x_mu = mu*pi/R, mu in [0,R]; nonequidistant_mu
/// uses the full-reconstruction grid x_nu = 2*pi*nu/(2R+1), nu in [0,2R],
/// and vanishes at the origin node by construction.
inline double kernel(KernelKind kind, int r, int mu, double x) {
    if (r < 1) fail(ErrorCode::InvalidR, "kernel needs R >= 1");
    switch (kind) {
    case KernelKind::dirichlet:
        if (mu != 0) fail(ErrorCode::IndexOutOfRange, "dirichlet kernel is centered; mu must be 0");
        return detail::dirichlet_value(r, x);
    case KernelKind::modified:
        if (mu != 0) fail(ErrorCode::IndexOutOfRange, "modified kernel is centered; mu must be 0");
        return detail::modified_dirichlet_value(r, x);
    case KernelKind::odd_mu: {
        if (mu < 1 || mu > r) fail(ErrorCode::IndexOutOfRange, "odd kernel needs mu in [1,R]");
        const double xm = (2.0 * mu - 1.0) * pi / (2.0 * r);
        return detail::modified_dirichlet_value(r, x - xm) - detail::modified_dirichlet_value(r, x + xm);
    }
    case KernelKind::even_mu: {
        if (mu < 0 || mu > r) fail(ErrorCode::IndexOutOfRange, "even kernel needs mu in [0,R]");
        if (mu == 0) return detail::modified_dirichlet_value(r, x);
        if (mu == r) return detail::modified_dirichlet_value(r, x - pi);
        const double xm = mu * pi / r;
        return detail::modified_dirichlet_value(r, x - xm) + detail::modified_dirichlet_value(r, x + xm);
    }
    case KernelKind::nonequidistant_mu: {
        if (mu < 0 || mu > 2 * r) fail(ErrorCode::IndexOutOfRange, "kernel index outside [0,2R]");
        std::vector<double> nodes(2 * r + 1);
        for (int nu = 0; nu <= 2 * r; ++nu) nodes[nu] = 2.0 * pi * nu / (2.0 * r + 1.0);
        return detail::lagrange_trig_kernel(nodes, static_cast<std::size_t>(mu), x);
    }
    }
    fail(ErrorCode::InvalidKind, "unknown kernel kind");
}

/// Analytic kernel derivatives through the cosine-sum representations.
inline double kernel_derivative(KernelKind kind, int r, int mu, double x, int order) {
    if (r < 1) fail(ErrorCode::InvalidR, "kernel needs R >= 1");
    if (order < 0) fail(ErrorCode::InvalidKind, "derivative order must be >= 0");
    auto modified_sum = [r](double y, int ord) {
        // D*(y) = 1/(2R) + cos(R y)/(2R) + (1/R) sum_{l<R} cos(l y)
        double v = (ord == 0) ? 1.0 / (2.0 * r) : 0.0;
        const double rot = 0.5 * pi * ord;
        v += std::pow(r, ord) * std::cos(r * y + rot) / (2.0 * r);
        for (int l = 1; l < r; ++l) v += std::pow(l, ord) * std::cos(l * y + rot) / r;
        return v;
    };
    auto dirichlet_sum = [r](double y, int ord) {
        double v = (ord == 0) ? 1.0 / (2.0 * r + 1.0) : 0.0;
        const double rot = 0.5 * pi * ord;
        for (int l = 1; l <= r; ++l)
            v += 2.0 * std::pow(l, ord) * std::cos(l * y + rot) / (2.0 * r + 1.0);
        return v;
    };
    switch (kind) {
    case KernelKind::dirichlet: return dirichlet_sum(x, order);
    case KernelKind::modified: return modified_sum(x, order);
    case KernelKind::odd_mu: {
        if (mu < 1 || mu > r) fail(ErrorCode::IndexOutOfRange, "odd kernel needs mu in [1,R]");
        const double xm = (2.0 * mu - 1.0) * pi / (2.0 * r);
        return modified_sum(x - xm, order) - modified_sum(x + xm, order);
    }
    case KernelKind::even_mu: {
        if (mu < 0 || mu > r) fail(ErrorCode::IndexOutOfRange, "even kernel needs mu in [0,R]");
        if (mu == 0) return modified_sum(x, order);
        if (mu == r) return modified_sum(x - pi, order);
        const double xm = mu * pi / r;
        return modified_sum(x - xm, order) + modified_sum(x + xm, order);
    }
    case KernelKind::nonequidistant_mu: {
        // Shifted Dirichlet kernel on the uniform grid.
        if (mu < 0 || mu > 2 * r) fail(ErrorCode::IndexOutOfRange, "kernel index outside [0,2R]");
        const double xm = 2.0 * pi * mu / (2.0 * r + 1.0);
        return dirichlet_sum(x - xm, order);
    }
    }
    fail(ErrorCode::InvalidKind, "unknown kernel kind");
}

/// Full trigonometric interpolation for integer frequencies <= R, from
/// exactly 2R+1 evaluations at x_mu = 2*pi*mu/(2R+1), mu = -R..R.
/// With verify=true, 20 probe points check the residual (costs evaluations).
inline TrigPoly full_reconstruct_equidistant(const std::function<double(double)> &e, int r,
                                             bool verify = false) {
    if (r < 0) fail(ErrorCode::InvalidR, "R must be >= 0");
    TrigPoly p;
    if (r == 0) {
        p.a0 = e(0.0);
        return p;
    }
    const int n = 2 * r + 1;
    std::vector<double> xs(n), vals(n);
    for (int mu = -r; mu <= r; ++mu) {
        xs[mu + r] = 2.0 * pi * mu / n;
        vals[mu + r] = e(xs[mu + r]);
    }
    p.a0 = 0.0;
    for (int i = 0; i < n; ++i) p.a0 += vals[i];
    p.a0 /= n;
    p.frequencies.resize(r);
    p.a.resize(r);
    p.b.resize(r);
    for (int l = 1; l <= r; ++l) {
        double ca = 0.0, cb = 0.0;
        for (int i = 0; i < n; ++i) {
            ca += vals[i] * std::cos(l * xs[i]);
            cb += vals[i] * std::sin(l * xs[i]);
        }
        p.frequencies[l - 1] = l;
        p.a[l - 1] = 2.0 * ca / n;
        p.b[l - 1] = 2.0 * cb / n;
    }
    if (verify) {
        for (int i = 0; i < 20; ++i) {
            const double x = -pi + (2.0 * pi) * (i + 0.5) / 20.0;
            if (std::abs(p.eval(x) - e(x)) > 1e-6)
                fail(ErrorCode::InvalidR, "probe residual suggests an understated R");
        }
    }
    return p;
}

/// Odd-part coefficients {b_l} from 2R evaluations at the +-(2mu-1)pi/(2R) pairs.
inline std::vector<double> reconstruct_odd(const std::function<double(double)> &e, int r) {
    if (r < 1) fail(ErrorCode::InvalidR, "R must be >= 1");
    std::vector<double> odd_vals(r), xs(r);
    for (int mu = 1; mu <= r; ++mu) {
        xs[mu - 1] = (2.0 * mu - 1.0) * pi / (2.0 * r);
        odd_vals[mu - 1] = 0.5 * (e(xs[mu - 1]) - e(-xs[mu - 1]));
    }
    std::vector<double> b(r);
    for (int l = 1; l <= r; ++l) {
        const double c = (l < r) ? 2.0 : 1.0;
        double acc = 0.0;
        for (int mu = 0; mu < r; ++mu) acc += odd_vals[mu] * std::sin(l * xs[mu]);
        b[l - 1] = c * acc / r;
    }
    return b;
}

/// Even-part coefficients (a0, {a_l}) from 2R evaluations: E(0), E(pi) via
/// periodicity, and the +-mu*pi/R pairs for mu in [R-1].
inline std::pair<double, std::vector<double>> reconstruct_even(
    const std::function<double(double)> &e, int r) {
    if (r < 1) fail(ErrorCode::InvalidR, "R must be >= 1");
    std::vector<double> xs(r + 1), even_vals(r + 1);
    xs[0] = 0.0;
    even_vals[0] = e(0.0);
    for (int mu = 1; mu < r; ++mu) {
        xs[mu] = mu * pi / r;
        even_vals[mu] = 0.5 * (e(xs[mu]) + e(-xs[mu]));
    }
    xs[r] = pi;
    even_vals[r] = e(pi);
    ComplexMatrix m(r + 1, r + 1);
    for (int mu = 0; mu <= r; ++mu)
        for (int l = 0; l <= r; ++l) m.at(mu, l) = std::cos(l * xs[mu]);
    const LinearSolution sol = solve_linear_real(m, even_vals);
    std::vector<double> a(r);
    for (int l = 1; l <= r; ++l) a[l - 1] = sol.x[l].real();
    return {sol.x[0].real(), std::move(a)};
}

/// Nonuniform DFT: solve for (a0, {a_l}, {b_l}) on arbitrary frequencies from
/// 2R+1 shifted evaluations. Default shifts are equidistant in [-pi, pi)
/// scaled by 1/max-frequency.
inline TrigPoly reconstruct_nonuniform(const std::function<double(double)> &e,
                                       const std::vector<double> &freqs,
                                       std::vector<double> shifts = {}) {
    const int r = static_cast<int>(freqs.size());
    if (r < 1) fail(ErrorCode::EmptySpectrum, "no frequencies");
    const double wmax = *std::max_element(freqs.begin(), freqs.end());
    if (shifts.empty()) {
        for (int j = -r; j <= r; ++j) shifts.push_back(2.0 * pi * j / ((2.0 * r + 1.0) * wmax));
    }
    if (static_cast<int>(shifts.size()) != 2 * r + 1)
        fail(ErrorCode::ShiftCountMismatch, "need 2R+1 shifts for R frequencies");
    for (std::size_t i = 0; i < shifts.size(); ++i)
        for (std::size_t j = i + 1; j < shifts.size(); ++j)
            if (std::abs(shifts[i] - shifts[j]) < 1e-12)
                fail(ErrorCode::Singular, "duplicate shifts make the system rank-deficient");

    const int n = 2 * r + 1;
    ComplexMatrix m(n, n);
    std::vector<double> rhs(n);
    for (int row = 0; row < n; ++row) {
        const double s = shifts[row];
        m.at(row, 0) = 1.0;
        for (int l = 0; l < r; ++l) {
            m.at(row, 1 + l) = std::cos(freqs[l] * s);
            m.at(row, 1 + r + l) = std::sin(freqs[l] * s);
        }
        rhs[row] = e(s);
    }
    const LinearSolution sol = solve_linear_real(m, rhs);
    if (sol.ill_conditioned)
        fail(ErrorCode::IllConditioned,
             "interpolation matrix condition exceeds 1e10; place shifts further apart");
    TrigPoly p;
    p.a0 = sol.x[0].real();
    p.frequencies = freqs;
    p.a.resize(r);
    p.b.resize(r);
    for (int l = 0; l < r; ++l) {
        p.a[l] = sol.x[1 + l].real();
        p.b[l] = sol.x[1 + r + l].real();
    }
    double scale = 0.0;
    for (double v : rhs) scale = std::max(scale, std::abs(v));
    for (int row = 0; row < n; ++row)
        if (std::abs(p.eval(shifts[row]) - rhs[row]) > 1e-9 * std::max(1.0, scale))
            fail(ErrorCode::IllConditioned, "reconstruction residual exceeds 1e-9 at input shifts");
    return p;
}

/// Spectrum-aware reconstruction: closed-form grid for equidistant ladders
/// (rescaled to integer frequencies), nonuniform solve otherwise.
inline TrigPoly reconstruct_univariate(const std::function<double(double)> &e, const Spectrum &s,
                                       bool verify = false) {
    if (s.r_count == 0) {
        TrigPoly p;
        p.a0 = e(0.0);
        return p;
    }
    if (s.equidistant) {
        const double w = s.scale;
        TrigPoly p = full_reconstruct_equidistant([&](double u) { return e(u / w); }, s.r_count, verify);
        for (auto &f : p.frequencies) f *= w;
        return p;
    }
    return reconstruct_nonuniform(e, s.frequencies);
}

}  // namespace qgrad
