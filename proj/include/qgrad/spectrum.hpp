#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "numerics.hpp"

namespace qgrad {

/// Frequency content of E(x) with respect to one parameter: the unique
/// positive differences of the effective generator eigenvalues.
struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> frequencies;  // positive, ascending, deduplicated
    int r_count = 0;
    bool equidistant = false;
    double scale = 1.0;  // spacing if equidistant, else 1
    bool heuristic = false;  // set by the noncommuting shared-parameter fallback
};

/// true iff freqs = {s, 2s, ..., Rs} within tol; returns the spacing s.
inline std::pair<bool, double> detect_equidistant(const std::vector<double> &freqs,
                                                  double tol = 1e-9) {
    if (freqs.empty()) fail(ErrorCode::EmptySpectrum, "no frequencies");
    const double s = freqs.front();
    if (s <= 0.0) fail(ErrorCode::EmptySpectrum, "frequencies must be positive");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double target = s * static_cast<double>(i + 1);
        if (std::abs(freqs[i] - target) > tol * std::max(1.0, std::abs(freqs[i])))
            return {false, 1.0};
    }
    return {true, s};
}

namespace detail {

/// Merge near-duplicates: values closer than tol*max(1,|v|) collapse to one.
inline std::vector<double> dedup_sorted(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || std::abs(x - out.back()) > tol * std::max(1.0, std::abs(x)))
            out.push_back(x);
    }
    return out;
}

}  // namespace detail

inline Spectrum spectrum_from_eigenvalues(std::vector<double> evs, double tol = 1e-9) {
    std::sort(evs.begin(), evs.end());
    const std::vector<double> unique_evs = detail::dedup_sorted(evs, tol);
    std::vector<double> diffs;
    for (std::size_t j = 0; j < unique_evs.size(); ++j)
        for (std::size_t k = j + 1; k < unique_evs.size(); ++k)
            diffs.push_back(unique_evs[k] - unique_evs[j]);
    Spectrum s;
    s.eigenvalues = std::move(evs);
    s.frequencies = detail::dedup_sorted(std::move(diffs), tol);
    s.r_count = static_cast<int>(s.frequencies.size());
    if (!s.frequencies.empty()) {
        const auto [eq, sc] = detect_equidistant(s.frequencies, tol);
        s.equidistant = eq;
        s.scale = eq ? sc : 1.0;
    } else {
        s.equidistant = true;  // constant dependence
        s.scale = 1.0;
    }
    return s;
}

/// {scale, 2*scale, ..., R*scale}; used when only a frequency bound is known.
inline Spectrum ladder_spectrum(int r, double scale = 1.0) {
    if (r < 0) fail(ErrorCode::InvalidR, "negative frequency count");
    Spectrum s;
    for (int i = 1; i <= r; ++i) s.frequencies.push_back(scale * i);
    s.r_count = r;
    s.equidistant = true;
    s.scale = r > 0 ? scale : 1.0;
    return s;
}

namespace detail {

inline bool word_is_identity(const std::string &w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return c == 'I'; });
}

inline bool word_is_diagonal(const std::string &w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return c == 'I' || c == 'Z'; });
}

inline int word_weight(const std::string &w) {
    return static_cast<int>(std::count_if(w.begin(), w.end(), [](char c) { return c != 'I'; }));
}

/// Eigenvalues without densifying where the structure allows it.
inline std::vector<double> pauli_sum_eigenvalues(const std::vector<PauliTerm> &terms,
                                                 int n_qubits) {
    double id_offset = 0.0;
    std::vector<PauliTerm> rest;
    for (const auto &t : terms) {
        if (word_is_identity(t.word))
            id_offset += t.coeff;
        else
            rest.push_back(t);
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (rest.empty()) return std::vector<double>(dim, id_offset);

    const bool all_diagonal =
        std::all_of(rest.begin(), rest.end(), [](const PauliTerm &t) { return word_is_diagonal(t.word); });
    if (all_diagonal) {
        std::vector<double> evs(dim, id_offset);
        for (const auto &t : rest) {
            const pauli::WordMasks m = pauli::masks(t.word);
            for (std::size_t j = 0; j < dim; ++j)
                evs[j] += (std::popcount(j & m.zy) & 1) ? -t.coeff : t.coeff;
        }
        return evs;
    }

    // Single-qubit letters on distinct qubits: each term contributes +-coeff
    // independently (the terms act on disjoint tensor factors).
    bool disjoint_single = rest.size() <= 20;
    std::uint64_t used = 0;
    if (disjoint_single) {
        for (const auto &t : rest) {
            if (word_weight(t.word) != 1) {
                disjoint_single = false;
                break;
            }
            const pauli::WordMasks m = pauli::masks(t.word);
            const std::uint64_t bit = m.xy | m.zy;
            if (used & bit) {
                disjoint_single = false;
                break;
            }
            used |= bit;
        }
    }
    if (disjoint_single) {
        std::vector<double> evs;
        const std::size_t combos = std::size_t{1} << rest.size();
        evs.reserve(combos);
        for (std::size_t mask = 0; mask < combos; ++mask) {
            double v = id_offset;
            for (std::size_t t = 0; t < rest.size(); ++t)
                v += (mask >> t & 1) ? -rest[t].coeff : rest[t].coeff;
            evs.push_back(v);
        }
        // Every sign combination occurs with multiplicity dim / combos.
        return evs;
    }

    return hermitian_eig(pauli_sum_dense(terms, n_qubits), 1e-10).eigenvalues;
}

inline std::vector<double> generator_eigenvalues(const Generator &g, int n_qubits) {
    if (g.is_dense()) {
        if (hermiticity_defect(*g.dense) > 1e-10)
            fail(ErrorCode::NonHermitian, "generator fails the Hermitian check");
        return hermitian_eig(*g.dense, 1e-10).eigenvalues;
    }
    if (g.terms.empty()) fail(ErrorCode::EmptySpectrum, "pauli_sum generator has no terms");
    return pauli_sum_eigenvalues(g.terms, n_qubits);
}

/// Eigenphases of a (normal) unitary via simultaneous diagonalization of its
/// Hermitian and anti-Hermitian parts.
inline std::vector<double> unitary_eigenphases(const ComplexMatrix &u) {
    const std::size_t n = u.rows;
    ComplexMatrix a(n, n), b(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const cplx z = u.at(r, c), w = std::conj(u.at(c, r));
            a.at(r, c) = 0.5 * (z + w);
            b.at(r, c) = cplx(0.0, -0.5) * (z - w);
        }
    EigenDecomposition ea = hermitian_eig(a, 1e-8);
    ComplexMatrix v = ea.eigenvectors;
    // Rotate inside degenerate blocks of A so that B becomes diagonal as well.
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && std::abs(ea.eigenvalues[end] - ea.eigenvalues[start]) < 1e-9) ++end;
        if (end - start > 1) {
            const std::size_t m = end - start;
            ComplexMatrix sub(m, m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    cplx acc(0.0, 0.0);
                    for (std::size_t r = 0; r < n; ++r) {
                        cplx bv(0.0, 0.0);
                        for (std::size_t c = 0; c < n; ++c) bv += b.at(r, c) * v.at(c, start + j);
                        acc += std::conj(v.at(r, start + i)) * bv;
                    }
                    sub.at(i, j) = acc;
                }
            const EigenDecomposition eb = hermitian_eig(sub, 1e-7);
            ComplexMatrix rotated(n, m);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t j = 0; j < m; ++j) {
                    cplx acc(0.0, 0.0);
                    for (std::size_t i = 0; i < m; ++i)
                        acc += v.at(r, start + i) * eb.eigenvectors.at(i, j);
                    rotated.at(r, j) = acc;
                }
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t j = 0; j < m; ++j) v.at(r, start + j) = rotated.at(r, j);
        }
        start = end;
    }
    std::vector<double> phases(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc(0.0, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            cplx uv(0.0, 0.0);
            for (std::size_t c = 0; c < n; ++c) uv += u.at(r, c) * v.at(c, j);
            acc += std::conj(v.at(r, j)) * uv;
        }
        phases[j] = std::arg(acc);
    }
    return phases;
}

}  // namespace detail

inline Spectrum generator_spectrum(const Generator &g, int n_qubits, double tol = 1e-9) {
    if (tol <= 0.0) fail(ErrorCode::InvalidKind, "tolerance must be positive");
    return spectrum_from_eigenvalues(detail::generator_eigenvalues(g, n_qubits), tol);
}

/// Spectrum governing restrict_eval(c, ., k). Gates sharing the parameter are
/// summed when their (prefactor-weighted) generators commute; otherwise the
/// spectrum is estimated from -i*log of the combined unitary at a probe angle
/// and flagged heuristic.
inline Spectrum param_spectrum(const Circuit &c, int k, double tol = 1e-9) {
    const std::vector<std::size_t> positions = c.gates_for_param(k);
    if (positions.empty()) fail(ErrorCode::UnusedParameter, "parameter drives no gate");

    if (positions.size() == 1) {
        const Gate &g = c.gates()[positions[0]];
        std::vector<double> evs = detail::generator_eigenvalues(g.generator, c.n_qubits());
        for (double &e : evs) e *= g.prefactor;
        return spectrum_from_eigenvalues(std::move(evs), tol);
    }

    // Shared parameter: try the commuting sum first.
    std::vector<ComplexMatrix> mats;
    for (std::size_t pos : positions) {
        ComplexMatrix m = generator_dense(c.gates()[pos].generator, c.n_qubits());
        const double p = c.gates()[pos].prefactor;
        for (auto &z : m.data) z *= p;
        mats.push_back(std::move(m));
    }
    bool commuting = true;
    for (std::size_t i = 0; i < mats.size() && commuting; ++i)
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            const ComplexMatrix ab = matmul(mats[i], mats[j]);
            const ComplexMatrix ba = matmul(mats[j], mats[i]);
            if (max_abs_diff(ab, ba) > 1e-10 * std::max(1.0, max_abs(ab))) {
                commuting = false;
                break;
            }
        }
    if (commuting) {
        ComplexMatrix sum = mats[0];
        for (std::size_t i = 1; i < mats.size(); ++i)
            for (std::size_t idx = 0; idx < sum.data.size(); ++idx) sum.data[idx] += mats[i].data[idx];
        return spectrum_from_eigenvalues(hermitian_eig(sum, 1e-9).eigenvalues, tol);
    }

    for (std::size_t pos : positions)
        if (c.gates()[pos].f_term.has_value())
            fail(ErrorCode::NoncommutingRepeatedGates,
                 "noncommuting gates with an f_term share one parameter");

    // Heuristic fallback: eigenphases of the combined evolution at a probe
    // angle, branch-corrected by keeping the probe small.
    double norm_bound = 0.0;
    for (const auto &m : mats) norm_bound += frobenius_norm(m);
    const double probe = std::min(0.1, pi / (4.0 * std::max(norm_bound, 1e-12)));
    ComplexMatrix u = identity_matrix(c.dim());
    for (const auto &m : mats) u = matmul(expm_i(probe, m, 1e-9), u);
    std::vector<double> phases = detail::unitary_eigenphases(u);
    for (double &ph : phases) ph /= probe;
    Spectrum s = spectrum_from_eigenvalues(std::move(phases), std::max(tol, 1e-6));
    s.heuristic = true;
    return s;
}

}  // namespace qgrad
