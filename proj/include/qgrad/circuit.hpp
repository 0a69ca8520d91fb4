#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace qgrad {

/// One weighted Pauli word, e.g. 0.5 * "ZZI".
struct PauliTerm {
    double coeff = 0.0;
    std::string word;  // over {I,X,Y,Z}, length = qubit count
};

/// Hermitian generator, either a Pauli sum or an explicit dense matrix.
struct Generator {
    std::vector<PauliTerm> terms;
    std::optional<ComplexMatrix> dense;

    bool is_dense() const { return dense.has_value(); }

    static Generator pauli(std::vector<PauliTerm> t) {
        Generator g;
        g.terms = std::move(t);
        return g;
    }
    static Generator from_dense(ComplexMatrix m) {
        Generator g;
        g.dense = std::move(m);
        return g;
    }
};

struct Observable {
    std::vector<PauliTerm> terms;
    std::optional<ComplexMatrix> dense;

    static Observable pauli(std::vector<PauliTerm> t) {
        Observable o;
        o.terms = std::move(t);
        return o;
    }
    static Observable from_dense(ComplexMatrix m) {
        Observable o;
        o.dense = std::move(m);
        return o;
    }
};

struct Gate {
    enum class Kind { fixed, param };
    Kind kind = Kind::fixed;
    ComplexMatrix unitary;  // fixed only
    int param_index = -1;   // param only
    double prefactor = 1.0;
    Generator generator;
    std::optional<Generator> f_term;  // marks the gate stochastic-only

    static Gate make_fixed(ComplexMatrix u) {
        Gate g;
        g.kind = Kind::fixed;
        g.unitary = std::move(u);
        return g;
    }
    static Gate make_param(int index, double prefactor, Generator gen,
                           std::optional<Generator> f = std::nullopt) {
        Gate g;
        g.kind = Kind::param;
        g.param_index = index;
        g.prefactor = prefactor;
        g.generator = std::move(gen);
        g.f_term = std::move(f);
        return g;
    }
};

namespace pauli {

struct WordMasks {
    std::uint64_t xy = 0;  // bits flipped (X or Y)
    std::uint64_t zy = 0;  // bits contributing a (-1)^bit phase (Z or Y)
    int n_y = 0;
};

/// Qubit q maps to bit (n_qubits - 1 - q) of the basis index.
inline WordMasks masks(const std::string &word) {
    WordMasks m;
    const std::size_t n = word.size();
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t bit = 1ULL << (n - 1 - q);
        switch (word[q]) {
        case 'I': break;
        case 'X': m.xy |= bit; break;
        case 'Y':
            m.xy |= bit;
            m.zy |= bit;
            ++m.n_y;
            break;
        case 'Z': m.zy |= bit; break;
        default: fail(ErrorCode::ParseError, "Pauli word letter must be one of I,X,Y,Z");
        }
    }
    return m;
}

inline cplx i_power(int n) {
    switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

/// out = P * in
inline void apply_word(const WordMasks &m, const std::vector<cplx> &in, std::vector<cplx> &out) {
    const cplx front = i_power(m.n_y);
    out.assign(in.size(), cplx(0.0, 0.0));
    for (std::size_t j = 0; j < in.size(); ++j) {
        const int sign = (std::popcount(j & m.zy) & 1) ? -1 : 1;
        out[j ^ m.xy] = front * static_cast<double>(sign) * in[j];
    }
}

/// psi <- exp(i*alpha*P) psi, valid since P^2 = I (identity words included).
inline void apply_word_exp(const WordMasks &m, double alpha, std::vector<cplx> &psi,
                           std::vector<cplx> &scratch) {
    apply_word(m, psi, scratch);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const cplx isa(0.0, sa);
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] = ca * psi[j] + isa * scratch[j];
}

/// <psi|P|psi>
inline cplx word_expectation(const WordMasks &m, const std::vector<cplx> &psi) {
    const cplx front = i_power(m.n_y);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const int sign = (std::popcount(j & m.zy) & 1) ? -1 : 1;
        acc += std::conj(psi[j ^ m.xy]) * front * static_cast<double>(sign) * psi[j];
    }
    return acc;
}

/// Two Pauli words commute iff they differ on an even number of non-identity positions.
inline bool words_commute(const std::string &a, const std::string &b) {
    int anti = 0;
    for (std::size_t q = 0; q < a.size(); ++q)
        if (a[q] != 'I' && b[q] != 'I' && a[q] != b[q]) ++anti;
    return (anti % 2) == 0;
}

inline bool all_words_commute(const std::vector<PauliTerm> &terms) {
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (!words_commute(terms[i].word, terms[j].word)) return false;
    return true;
}

}  // namespace pauli

/// Dense matrix of a Pauli sum on n_qubits.
inline ComplexMatrix pauli_sum_dense(const std::vector<PauliTerm> &terms, int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    ComplexMatrix out(dim, dim);
    for (const auto &t : terms) {
        if (static_cast<int>(t.word.size()) != n_qubits)
            fail(ErrorCode::DimensionMismatch, "Pauli word length differs from qubit count");
        const pauli::WordMasks m = pauli::masks(t.word);
        const cplx front = pauli::i_power(m.n_y) * t.coeff;
        for (std::size_t j = 0; j < dim; ++j) {
            const int sign = (std::popcount(j & m.zy) & 1) ? -1 : 1;
            out.at(j ^ m.xy, j) += front * static_cast<double>(sign);
        }
    }
    return out;
}

inline ComplexMatrix generator_dense(const Generator &g, int n_qubits) {
    if (g.is_dense()) {
        const std::size_t dim = std::size_t{1} << n_qubits;
        if (g.dense->rows != dim || g.dense->cols != dim)
            fail(ErrorCode::DimensionMismatch, "dense generator dimension differs from 2^n_qubits");
        return *g.dense;
    }
    if (g.terms.empty()) fail(ErrorCode::EmptySpectrum, "pauli_sum generator has no terms");
    return pauli_sum_dense(g.terms, n_qubits);
}

inline ComplexMatrix observable_dense(const Observable &o, int n_qubits) {
    if (o.dense.has_value()) return *o.dense;
    return pauli_sum_dense(o.terms, n_qubits);
}

/// Parametrized circuit on a dense statevector. Immutable after construction;
/// per-gate application strategies are compiled once here.
class Circuit {
  public:
    Circuit(int n_qubits, std::vector<Gate> gates, int n_params)
        : n_qubits_(n_qubits), gates_(std::move(gates)), n_params_(n_params) {
        if (n_qubits_ < 1) fail(ErrorCode::DimensionMismatch, "circuit needs at least one qubit");
        const std::size_t dim = std::size_t{1} << n_qubits_;
        applier_.resize(gates_.size());
        for (std::size_t i = 0; i < gates_.size(); ++i) {
            Gate &g = gates_[i];
            if (g.kind == Gate::Kind::fixed) {
                if (g.unitary.rows != dim || g.unitary.cols != dim)
                    fail(ErrorCode::DimensionMismatch, "fixed gate dimension differs from 2^n_qubits");
                continue;
            }
            if (g.param_index < 0 || g.param_index >= n_params_)
                fail(ErrorCode::IndexOutOfRange, "gate parameter index out of range");
            if (g.prefactor == 0.0) fail(ErrorCode::DimensionMismatch, "gate prefactor must be nonzero");
            if (g.generator.is_dense() && hermiticity_defect(*g.generator.dense) > 1e-12)
                fail(ErrorCode::NonHermitian, "dense generator fails the Hermitian check");
            if (g.f_term.has_value()) {
                CompiledParam cp;
                cp.mode = CompiledParam::Mode::dense_with_f;
                cp.g_dense = generator_dense(g.generator, n_qubits_);
                cp.f_dense = generator_dense(*g.f_term, n_qubits_);
                if (hermiticity_defect(*cp.f_dense) > 1e-12)
                    fail(ErrorCode::NonHermitian, "f_term fails the Hermitian check");
                applier_[i] = std::move(cp);
            } else if (!g.generator.is_dense() && pauli::all_words_commute(g.generator.terms)) {
                CompiledParam cp;
                cp.mode = CompiledParam::Mode::commuting_sum;
                for (const auto &t : g.generator.terms) {
                    if (static_cast<int>(t.word.size()) != n_qubits_)
                        fail(ErrorCode::DimensionMismatch, "Pauli word length differs from qubit count");
                    cp.word_masks.push_back(pauli::masks(t.word));
                    cp.word_coeffs.push_back(t.coeff);
                }
                applier_[i] = std::move(cp);
            } else {
                CompiledParam cp;
                cp.mode = CompiledParam::Mode::dense_eig;
                cp.eig = hermitian_eig(generator_dense(g.generator, n_qubits_), 1e-10);
                applier_[i] = std::move(cp);
            }
        }
    }

    int n_qubits() const { return n_qubits_; }
    int n_params() const { return n_params_; }
    const std::vector<Gate> &gates() const { return gates_; }
    std::size_t dim() const { return std::size_t{1} << n_qubits_; }

    /// Gate positions holding parameter k (in circuit order).
    std::vector<std::size_t> gates_for_param(int k) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < gates_.size(); ++i)
            if (gates_[i].kind == Gate::Kind::param && gates_[i].param_index == k) out.push_back(i);
        return out;
    }

    void apply_gate(std::size_t gate_pos, double angle, std::vector<cplx> &psi,
                    std::vector<cplx> &scratch) const {
        const Gate &g = gates_[gate_pos];
        if (g.kind == Gate::Kind::fixed) {
            psi = matvec(g.unitary, psi);
            return;
        }
        const CompiledParam &cp = applier_[gate_pos];
        const double theta = g.prefactor * angle;
        switch (cp.mode) {
        case CompiledParam::Mode::commuting_sum:
            for (std::size_t t = 0; t < cp.word_masks.size(); ++t)
                pauli::apply_word_exp(cp.word_masks[t], theta * cp.word_coeffs[t], psi, scratch);
            break;
        case CompiledParam::Mode::dense_eig:
            psi = expm_i_apply(*cp.eig, theta, psi);
            break;
        case CompiledParam::Mode::dense_with_f: {
            ComplexMatrix m = *cp.f_dense;
            for (std::size_t idx = 0; idx < m.data.size(); ++idx)
                m.data[idx] += theta * cp.g_dense->data[idx];
            psi = expm_i_apply(hermitian_eig(m, 1e-9), 1.0, psi);
            break;
        }
        }
    }

    const ComplexMatrix &param_gate_g_dense(std::size_t gate_pos) const {
        return *applier_[gate_pos].g_dense;
    }
    const ComplexMatrix &param_gate_f_dense(std::size_t gate_pos) const {
        return *applier_[gate_pos].f_dense;
    }

  private:
    struct CompiledParam {
        enum class Mode { commuting_sum, dense_eig, dense_with_f };
        Mode mode = Mode::commuting_sum;
        std::vector<pauli::WordMasks> word_masks;
        std::vector<double> word_coeffs;
        std::optional<EigenDecomposition> eig;
        std::optional<ComplexMatrix> g_dense, f_dense;
    };

    int n_qubits_;
    std::vector<Gate> gates_;
    int n_params_;
    std::vector<CompiledParam> applier_;
};

/// Hook to replace one gate's application (used by the stochastic rule to
/// split a gate). Empty function = apply normally.
using GateReplacement = std::function<void(std::vector<cplx> &, std::vector<cplx> &)>;

inline std::vector<cplx> simulate_impl(const Circuit &c, const std::vector<double> &params,
                                       const std::vector<double> *gate_offsets,
                                       std::size_t replaced_gate, const GateReplacement &repl) {
    if (static_cast<int>(params.size()) != c.n_params())
        fail(ErrorCode::DimensionMismatch, "parameter vector length differs from n_params");
    std::vector<cplx> psi(c.dim(), cplx(0.0, 0.0));
    psi[0] = 1.0;
    std::vector<cplx> scratch(c.dim());
    for (std::size_t i = 0; i < c.gates().size(); ++i) {
        if (repl && i == replaced_gate) {
            repl(psi, scratch);
            continue;
        }
        const Gate &g = c.gates()[i];
        double angle = 0.0;
        if (g.kind == Gate::Kind::param) {
            angle = params[g.param_index];
            if (gate_offsets) angle += (*gate_offsets)[i];
        }
        c.apply_gate(i, angle, psi, scratch);
    }
    return psi;
}

inline std::vector<cplx> simulate(const Circuit &c, const std::vector<double> &params) {
    return simulate_impl(c, params, nullptr, static_cast<std::size_t>(-1), {});
}

/// Per-gate angle offsets on top of the shared parameter values (used by the
/// decomposition-based rules, which shift one elementary gate at a time).
inline std::vector<cplx> simulate_with_gate_offsets(const Circuit &c,
                                                    const std::vector<double> &params,
                                                    const std::vector<double> &gate_offsets) {
    return simulate_impl(c, params, &gate_offsets, static_cast<std::size_t>(-1), {});
}

inline std::vector<cplx> simulate_with_replacement(const Circuit &c,
                                                   const std::vector<double> &params,
                                                   std::size_t gate_pos,
                                                   const GateReplacement &repl) {
    return simulate_impl(c, params, nullptr, gate_pos, repl);
}

inline double state_expectation(const Observable &obs, const std::vector<cplx> &psi) {
    cplx acc(0.0, 0.0);
    if (obs.dense.has_value()) {
        const std::vector<cplx> bp = matvec(*obs.dense, psi);
        for (std::size_t j = 0; j < psi.size(); ++j) acc += std::conj(psi[j]) * bp[j];
    } else {
        for (const auto &t : obs.terms) acc += t.coeff * pauli::word_expectation(pauli::masks(t.word), psi);
    }
    // B is Hermitian; the imaginary residue is numerical noise and is dropped.
    return acc.real();
}

inline double expectation(const Circuit &c, const std::vector<double> &params,
                          const Observable &obs) {
    return state_expectation(obs, simulate(c, params));
}

inline double expectation_with_gate_offsets(const Circuit &c, const std::vector<double> &params,
                                            const std::vector<double> &gate_offsets,
                                            const Observable &obs) {
    return state_expectation(obs, simulate_with_gate_offsets(c, params, gate_offsets));
}

/// |<psi(a)|psi(b)>|^2, clamped to [0, 1].
inline double overlap_sq(const Circuit &c, const std::vector<double> &params_a,
                         const std::vector<double> &params_b) {
    const std::vector<cplx> a = simulate(c, params_a);
    const std::vector<cplx> b = simulate(c, params_b);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) acc += std::conj(a[j]) * b[j];
    const double v = std::norm(acc);
    return std::min(1.0, std::max(0.0, v));
}

/// Univariate restriction x -> E(params + x*e_k) with a call counter for
/// resource audits. Copies share the counter; increments are atomic.
class UnivariateEval {
  public:
    explicit UnivariateEval(std::function<double(double)> f)
        : f_(std::move(f)), calls_(std::make_shared<std::atomic<long long>>(0)) {}

    double operator()(double x) const {
        calls_->fetch_add(1, std::memory_order_relaxed);
        return f_(x);
    }
    long long calls() const { return calls_->load(std::memory_order_relaxed); }

  private:
    std::function<double(double)> f_;
    std::shared_ptr<std::atomic<long long>> calls_;
};

inline UnivariateEval restrict_eval(const Circuit &c, const std::vector<double> &params,
                                    Observable obs, int k) {
    if (k < 0 || k >= c.n_params()) fail(ErrorCode::IndexOutOfRange, "parameter index out of range");
    return UnivariateEval([&c, params, obs = std::move(obs), k](double x) {
        std::vector<double> p = params;
        p[k] += x;
        return expectation(c, p, obs);
    });
}

}  // namespace qgrad
