#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "numerics.hpp"
#include "reconstruction.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

namespace qgrad {

/// Parameter-shift rule: derivative = center*E(x0) + sum_mu coeff_mu * E(x0 + shift_mu).
struct ShiftRule {
    int order = 1;  // 1 or 2
    std::vector<std::pair<double, double>> terms;  // (shift, coeff)
    std::optional<double> center_coeff;            // order-2 rules only
};

/// General first-order rule for integer frequencies 1..R: 2R terms at
/// (2mu-1)pi/(2R) with coefficients (-1)^(mu-1) / (4R sin^2((2mu-1)pi/(4R))).
inline ShiftRule first_order_rule(int r) {
    if (r < 1) fail(ErrorCode::InvalidR, "first_order_rule needs R >= 1");
    ShiftRule rule;
    rule.order = 1;
    for (int mu = 1; mu <= 2 * r; ++mu) {
        const double shift = (2.0 * mu - 1.0) * pi / (2.0 * r);
        const double s = std::sin((2.0 * mu - 1.0) * pi / (4.0 * r));
        const double coeff = ((mu % 2) ? 1.0 : -1.0) / (4.0 * r * s * s);
        rule.terms.emplace_back(shift, coeff);
    }
    return rule;
}

/// General second-order rule: E''(0) = -(2R^2+1)/6 * E(0)
/// + sum_{mu=1}^{2R-1} E(mu*pi/R) * (-1)^(mu-1) / (2 sin^2(mu*pi/(2R))).
inline ShiftRule second_order_rule(int r) {
    if (r < 1) fail(ErrorCode::InvalidR, "second_order_rule needs R >= 1");
    ShiftRule rule;
    rule.order = 2;
    rule.center_coeff = -(2.0 * r * r + 1.0) / 6.0;
    for (int mu = 1; mu <= 2 * r - 1; ++mu) {
        const double shift = mu * pi / r;
        const double s = std::sin(mu * pi / (2.0 * r));
        const double coeff = ((mu % 2) ? 1.0 : -1.0) / (2.0 * s * s);
        rule.terms.emplace_back(shift, coeff);
    }
    return rule;
}

/// Rescale a rule built for integer frequencies so it differentiates a
/// function whose frequencies are (scale * 1, ..., scale * R).
inline ShiftRule rescale_rule(ShiftRule rule, double scale) {
    const double gain = (rule.order == 1) ? scale : scale * scale;
    for (auto &[shift, coeff] : rule.terms) {
        shift /= scale;
        coeff *= gain;
    }
    if (rule.center_coeff.has_value()) *rule.center_coeff *= gain;
    return rule;
}

/// Shift rule for arbitrary positive frequencies by solving the sine (order 1)
/// or cosine (order 2) interpolation system. `shifts`, when given, are the R
/// positive shift magnitudes; defaults are equidistant scaled by the largest
/// frequency.
inline ShiftRule arbitrary_rule(const std::vector<double> &freqs, int order,
                                std::vector<double> shifts = {}) {
    const int r = static_cast<int>(freqs.size());
    if (r < 1) fail(ErrorCode::EmptySpectrum, "no frequencies");
    if (order != 1 && order != 2) fail(ErrorCode::InvalidKind, "rule order must be 1 or 2");
    const double wmax = *std::max_element(freqs.begin(), freqs.end());
    if (shifts.empty()) {
        for (int mu = 1; mu <= r; ++mu)
            shifts.push_back(order == 1 ? (2.0 * mu - 1.0) * pi / (2.0 * wmax) : mu * pi / wmax);
    }
    if (static_cast<int>(shifts.size()) != r)
        fail(ErrorCode::ShiftCountMismatch, "need R positive shifts for R frequencies");

    ShiftRule rule;
    rule.order = order;
    if (order == 1) {
        ComplexMatrix m(r, r);
        std::vector<double> rhs(r);
        for (int row = 0; row < r; ++row) {
            for (int col = 0; col < r; ++col) m.at(row, col) = 2.0 * std::sin(freqs[row] * shifts[col]);
            rhs[row] = freqs[row];
        }
        const LinearSolution sol = solve_linear_real(m, rhs);
        if (sol.ill_conditioned)
            fail(ErrorCode::IllConditioned, "shift-rule system condition exceeds 1e10");
        for (int mu = 0; mu < r; ++mu) {
            rule.terms.emplace_back(shifts[mu], sol.x[mu].real());
            rule.terms.emplace_back(-shifts[mu], -sol.x[mu].real());
        }
    } else {
        ComplexMatrix m(r + 1, r + 1);
        std::vector<double> rhs(r + 1);
        m.at(0, 0) = 1.0;
        for (int col = 0; col < r; ++col) m.at(0, 1 + col) = 2.0;
        rhs[0] = 0.0;
        for (int row = 0; row < r; ++row) {
            m.at(1 + row, 0) = 1.0;
            for (int col = 0; col < r; ++col)
                m.at(1 + row, 1 + col) = 2.0 * std::cos(freqs[row] * shifts[col]);
            rhs[1 + row] = -freqs[row] * freqs[row];
        }
        const LinearSolution sol = solve_linear_real(m, rhs);
        if (sol.ill_conditioned)
            fail(ErrorCode::IllConditioned, "shift-rule system condition exceeds 1e10");
        rule.center_coeff = sol.x[0].real();
        for (int mu = 0; mu < r; ++mu) {
            rule.terms.emplace_back(shifts[mu], sol.x[1 + mu].real());
            rule.terms.emplace_back(-shifts[mu], sol.x[1 + mu].real());
        }
    }
    return rule;
}

/// Rule appropriate for a parameter's spectrum: closed-form (rescaled) for
/// equidistant ladders, linear-solve rule otherwise. R = 0 gives the empty
/// rule (constant dependence).
inline ShiftRule rule_for_spectrum(const Spectrum &s, int order) {
    if (s.r_count == 0) {
        ShiftRule rule;
        rule.order = order;
        if (order == 2) rule.center_coeff = 0.0;
        return rule;
    }
    if (s.equidistant)
        return rescale_rule(order == 1 ? first_order_rule(s.r_count) : second_order_rule(s.r_count),
                            s.scale);
    return arbitrary_rule(s.frequencies, order);
}

inline double apply_rule(const ShiftRule &rule, const std::function<double(double)> &e, double x0) {
    double v = 0.0;
    if (rule.center_coeff.has_value()) v += *rule.center_coeff * e(x0);
    for (const auto &[shift, coeff] : rule.terms) v += coeff * e(x0 + shift);
    return v;
}

/// Evaluations a rule application performs: one per term, plus the center.
inline long long rule_evaluations(const ShiftRule &rule) {
    return static_cast<long long>(rule.terms.size()) + (rule.center_coeff.has_value() ? 1 : 0);
}

namespace detail {

/// Gauss-Legendre nodes/weights on [0, 1].
inline void gauss_legendre_01(int n, std::vector<double> &x, std::vector<double> &w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace detail

struct StochasticConfig {
    enum class Kind { gauss_legendre, monte_carlo };
    Kind kind = Kind::gauss_legendre;
    int nodes = 64;             // gauss_legendre
    long long samples = 10000;  // monte_carlo
    std::uint64_t seed = 0;     // mandatory for monte_carlo
    bool seed_set = false;

    static StochasticConfig quadrature(int nodes = 64) {
        StochasticConfig c;
        c.kind = Kind::gauss_legendre;
        c.nodes = nodes;
        return c;
    }
    static StochasticConfig monte_carlo(long long samples, std::uint64_t seed) {
        StochasticConfig c;
        c.kind = Kind::monte_carlo;
        c.samples = samples;
        c.seed = seed;
        c.seed_set = true;
        return c;
    }
};

struct StochasticResult {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic quadrature
    long long evaluations = 0;
};

/// Derivative of E with respect to parameter k when the gate(s) holding k have
/// the form exp(i(x*prefactor*G + F)): the gate is split at fraction t, the
/// plain shift-rule gate for G is interleaved, and the result is integrated
/// over t in [0, 1].
inline StochasticResult stochastic_derivative(const Circuit &c, int k,
                                              const std::vector<double> &params,
                                              const Observable &obs,
                                              const StochasticConfig &cfg) {
    const std::vector<std::size_t> positions = c.gates_for_param(k);
    if (positions.empty()) fail(ErrorCode::UnusedParameter, "parameter drives no gate");
    for (std::size_t pos : positions)
        if (!c.gates()[pos].f_term.has_value())
            fail(ErrorCode::MissingFTerm, "gate has no f_term; use the plain shift rule");
    if (cfg.kind == StochasticConfig::Kind::monte_carlo && !cfg.seed_set)
        fail(ErrorCode::MissingField, "monte_carlo integration requires a seed");

    struct GatePlan {
        std::size_t pos;
        double prefactor;
        EigenDecomposition eig_g;  // of G alone
        EigenDecomposition eig_m;  // of prefactor*x0*G + F
        ShiftRule rule;            // first-order rule for exp(i*prefactor*x*G)
    };
    std::vector<GatePlan> plans;
    for (std::size_t pos : positions) {
        const Gate &g = c.gates()[pos];
        GatePlan plan;
        plan.pos = pos;
        plan.prefactor = g.prefactor;
        const ComplexMatrix &gd = c.param_gate_g_dense(pos);
        const ComplexMatrix &fd = c.param_gate_f_dense(pos);
        plan.eig_g = hermitian_eig(gd, 1e-9);
        std::vector<double> evs = plan.eig_g.eigenvalues;
        for (double &e : evs) e *= g.prefactor;
        plan.rule = rule_for_spectrum(spectrum_from_eigenvalues(std::move(evs)), 1);
        ComplexMatrix m = fd;
        const double theta0 = g.prefactor * params[k];
        for (std::size_t idx = 0; idx < m.data.size(); ++idx) m.data[idx] += theta0 * gd.data[idx];
        plan.eig_m = hermitian_eig(m, 1e-9);
        plans.push_back(std::move(plan));
    }

    long long evals = 0;
    auto integrand = [&](double t) {
        double acc = 0.0;
        for (const auto &plan : plans) {
            for (const auto &[shift, coeff] : plan.rule.terms) {
                const GateReplacement repl = [&](std::vector<cplx> &psi, std::vector<cplx> &) {
                    psi = expm_i_apply(plan.eig_m, 1.0 - t, psi);
                    psi = expm_i_apply(plan.eig_g, plan.prefactor * shift, psi);
                    psi = expm_i_apply(plan.eig_m, t, psi);
                };
                acc += coeff *
                       state_expectation(obs, simulate_with_replacement(c, params, plan.pos, repl));
                ++evals;
            }
        }
        return acc;
    };

    StochasticResult out;
    if (cfg.kind == StochasticConfig::Kind::gauss_legendre) {
        std::vector<double> xs, ws;
        detail::gauss_legendre_01(cfg.nodes, xs, ws);
        double v = 0.0;
        for (int i = 0; i < cfg.nodes; ++i) v += ws[i] * integrand(xs[i]);
        out.value = v;
        out.std_error = 0.0;
    } else {
        // Sample values are indexed, so partitioning across workers cannot
        // change the stream.
        double sum = 0.0, sumsq = 0.0;
        for (long long i = 0; i < cfg.samples; ++i) {
            const double t = SplitMix64(cfg.seed, static_cast<std::uint64_t>(i)).next_double();
            const double v = integrand(t);
            sum += v;
            sumsq += v * v;
        }
        const double n = static_cast<double>(cfg.samples);
        out.value = sum / n;
        const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    out.evaluations = evals;
    return out;
}

}  // namespace qgrad
