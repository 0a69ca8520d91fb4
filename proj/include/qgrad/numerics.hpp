#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qgrad {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

enum class ErrorCode {
    NonHermitian,
    NonSquare,
    Singular,
    IllConditioned,
    DimensionMismatch,
    IndexOutOfRange,
    EmptySpectrum,
    UnusedParameter,
    NoncommutingRepeatedGates,
    MissingFTerm,
    InvalidKind,
    InvalidR,
    ShiftCountMismatch,
    MissingField,
    Unsupported,
    NoncommutingBlock,
    VariantRequiresSingleFrequency,
    EmptyGraph,
    ParseError,
};

inline const char *error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::UnusedParameter: return "UnusedParameter";
    case ErrorCode::NoncommutingRepeatedGates: return "NoncommutingRepeatedGates";
    case ErrorCode::MissingFTerm: return "MissingFTerm";
    case ErrorCode::InvalidKind: return "InvalidKind";
    case ErrorCode::InvalidR: return "InvalidR";
    case ErrorCode::ShiftCountMismatch: return "ShiftCountMismatch";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NoncommutingBlock: return "NoncommutingBlock";
    case ErrorCode::VariantRequiresSingleFrequency: return "VariantRequiresSingleFrequency";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &msg) { throw Error(code, msg); }

/// Dense complex matrix, row-major.
struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> data;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, cplx(0.0, 0.0)) {}

    cplx &at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const cplx &at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool square() const { return rows == cols; }
};

inline ComplexMatrix identity_matrix(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

inline ComplexMatrix adjoint(const ComplexMatrix &m) {
    ComplexMatrix out(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out.at(c, r) = std::conj(m.at(r, c));
    return out;
}

inline ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols != b.rows) fail(ErrorCode::DimensionMismatch, "matmul shape mismatch");
    ComplexMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

inline std::vector<cplx> matvec(const ComplexMatrix &a, const std::vector<cplx> &v) {
    if (a.cols != v.size()) fail(ErrorCode::DimensionMismatch, "matvec shape mismatch");
    std::vector<cplx> out(a.rows, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows; ++i) {
        cplx acc(0.0, 0.0);
        const cplx *row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) {
            const cplx f = a.at(i, j);
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows; ++k)
                for (std::size_t l = 0; l < b.cols; ++l)
                    out.at(i * b.rows + k, j * b.cols + l) = f * b.at(k, l);
        }
    return out;
}

inline double frobenius_norm(const ComplexMatrix &m) {
    double s = 0.0;
    for (const auto &z : m.data) s += std::norm(z);
    return std::sqrt(s);
}

inline double max_abs(const ComplexMatrix &m) {
    double s = 0.0;
    for (const auto &z : m.data) s = std::max(s, std::abs(z));
    return s;
}

/// max |M - M^dagger| entrywise.
inline double hermiticity_defect(const ComplexMatrix &m) {
    if (!m.square()) fail(ErrorCode::NonSquare, "hermiticity check on non-square matrix");
    double d = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            d = std::max(d, std::abs(m.at(r, c) - std::conj(m.at(c, r))));
    return d;
}

inline bool is_hermitian(const ComplexMatrix &m, double tol = 1e-12) {
    return m.square() && hermiticity_defect(m) <= tol;
}

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows != b.rows || a.cols != b.cols)
        fail(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) d = std::max(d, std::abs(a.data[i] - b.data[i]));
    return d;
}

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns, orthonormal
};

namespace detail {

// One cyclic Jacobi pass over all (p, q) pairs; returns accumulated off-diagonal mass.
inline void jacobi_rotate(ComplexMatrix &a, ComplexMatrix &v, std::size_t p, std::size_t q) {
    const cplx apq = a.at(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const cplx phase = apq / r;  // e^{i phi}
    const double app = a.at(p, p).real();
    const double aqq = a.at(q, q).real();
    const double tau = (aqq - app) / (2.0 * r);
    double t;
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const std::size_t n = a.rows;
    const cplx ephi = phase;
    // A <- J^dag A J with J restricted to the (p,q) plane:
    // col_p' = c*col_p - s*conj(ephi)*col_q ; col_q' = s*col_p + c*conj(ephi)*col_q
    for (std::size_t i = 0; i < n; ++i) {
        const cplx aip = a.at(i, p), aiq = a.at(i, q);
        a.at(i, p) = c * aip - s * std::conj(ephi) * aiq;
        a.at(i, q) = s * aip + c * std::conj(ephi) * aiq;
    }
    // row_p' = c*row_p - s*ephi*row_q ; row_q' = s*row_p + c*ephi*row_q
    for (std::size_t j = 0; j < n; ++j) {
        const cplx apj = a.at(p, j), aqj = a.at(q, j);
        a.at(p, j) = c * apj - s * ephi * aqj;
        a.at(q, j) = s * apj + c * ephi * aqj;
    }
    a.at(p, q) = cplx(0.0, 0.0);
    a.at(q, p) = cplx(0.0, 0.0);
    a.at(p, p) = cplx(a.at(p, p).real(), 0.0);
    a.at(q, q) = cplx(a.at(q, q).real(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx vip = v.at(i, p), viq = v.at(i, q);
        v.at(i, p) = c * vip - s * std::conj(ephi) * viq;
        v.at(i, q) = s * vip + c * std::conj(ephi) * viq;
    }
}

inline double offdiag_norm(const ComplexMatrix &a) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows; ++p)
        for (std::size_t q = 0; q < a.cols; ++q)
            if (p != q) s += std::norm(a.at(p, q));
    return std::sqrt(s);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; degenerate blocks keep orthonormal columns; each
/// eigenvector's first component above 1e-8 is made positive-real for
/// reproducibility.
inline EigenDecomposition hermitian_eig(const ComplexMatrix &m, double herm_tol = 1e-10) {
    if (!m.square()) fail(ErrorCode::NonSquare, "hermitian_eig requires a square matrix");
    if (hermiticity_defect(m) > herm_tol)
        fail(ErrorCode::NonHermitian, "hermitian_eig input fails the symmetry check");
    const std::size_t n = m.rows;
    ComplexMatrix a = m;
    // Symmetrize away the tolerated defect so Jacobi sees an exactly Hermitian input.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) {
            const cplx avg = 0.5 * (a.at(r, c) + std::conj(a.at(c, r)));
            a.at(r, c) = avg;
            a.at(c, r) = std::conj(avg);
        }
    ComplexMatrix v = identity_matrix(n);
    const double scale = std::max(frobenius_norm(a), 1e-300);
    const int max_sweeps = 128;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_norm(a) <= 1e-13 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(a.at(p, q)) > 1e-300) detail::jacobi_rotate(a, v, p, q);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a.at(x, x).real() < a.at(y, y).real(); });
    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.eigenvalues[j] = a.at(src, src).real();
        cplx fix(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx z = v.at(i, src);
            if (std::abs(z) > 1e-8) {
                fix = std::conj(z) / std::abs(z);
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors.at(i, j) = fix * v.at(i, src);
    }
    return out;
}

/// exp(i*theta*m) for Hermitian m.
inline ComplexMatrix expm_i(double theta, const ComplexMatrix &m, double herm_tol = 1e-10) {
    const EigenDecomposition eig = hermitian_eig(m, herm_tol);
    const std::size_t n = m.rows;
    const ComplexMatrix &v = eig.eigenvectors;
    ComplexMatrix out(n, n);
    // V diag(e^{i theta w}) V^dag
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ph = std::exp(cplx(0.0, theta * eig.eigenvalues[k]));
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = v.at(i, k) * ph;
            if (vik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += vik * std::conj(v.at(j, k));
        }
    }
    return out;
}

/// Apply exp(i*theta*m) to a vector through a cached eigendecomposition.
inline std::vector<cplx> expm_i_apply(const EigenDecomposition &eig, double theta,
                                      const std::vector<cplx> &vec) {
    const ComplexMatrix &v = eig.eigenvectors;
    const std::size_t n = v.rows;
    std::vector<cplx> coeff(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(v.at(i, k)) * vec[i];
        coeff[k] = acc * std::exp(cplx(0.0, theta * eig.eigenvalues[k]));
    }
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ck = coeff[k];
        if (ck == cplx(0.0, 0.0)) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] += v.at(i, k) * ck;
    }
    return out;
}

struct LinearSolution {
    std::vector<cplx> x;
    double condition = 0.0;      // ||A||_1 * ||A^-1||_1
    bool ill_conditioned = false;  // condition above 1e10
};

namespace detail {

struct LuFactors {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;
};

inline LuFactors lu_decompose(const ComplexMatrix &a) {
    if (!a.square()) fail(ErrorCode::NonSquare, "linear solve requires a square matrix");
    const std::size_t n = a.rows;
    LuFactors f{a, std::vector<std::size_t>(n)};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    double scale = 0.0;
    for (const auto &z : a.data) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) fail(ErrorCode::Singular, "zero matrix");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(f.lu.at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = std::abs(f.lu.at(i, k));
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best <= 1e-12 * scale) fail(ErrorCode::Singular, "rank-deficient at tolerance 1e-12");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu.at(k, j), f.lu.at(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx m = f.lu.at(i, k) / f.lu.at(k, k);
            f.lu.at(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) f.lu.at(i, j) -= m * f.lu.at(k, j);
        }
    }
    return f;
}

inline std::vector<cplx> lu_solve(const LuFactors &f, const std::vector<cplx> &b) {
    const std::size_t n = f.perm.size();
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= f.lu.at(i, j) * y[j];
        y[i] = acc;
    }
    std::vector<cplx> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cplx acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= f.lu.at(ii, j) * x[j];
        x[ii] = acc / f.lu.at(ii, ii);
    }
    return x;
}

inline double one_norm(const ComplexMatrix &a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += std::abs(a.at(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace detail

/// Solve a*x = b with partial-pivot LU. Reports a 1-norm condition estimate;
/// ill_conditioned is set above 1e10 (a warning, not an error).
inline LinearSolution solve_linear(const ComplexMatrix &a, const std::vector<cplx> &b) {
    if (a.rows != b.size()) fail(ErrorCode::DimensionMismatch, "rhs length mismatch");
    const detail::LuFactors f = detail::lu_decompose(a);
    LinearSolution sol;
    sol.x = detail::lu_solve(f, b);
    const std::size_t n = a.rows;
    ComplexMatrix inv(n, n);
    std::vector<cplx> e(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<cplx> col = detail::lu_solve(f, e);
        for (std::size_t i = 0; i < n; ++i) inv.at(i, j) = col[i];
        e[j] = 0.0;
    }
    sol.condition = detail::one_norm(a) * detail::one_norm(inv);
    sol.ill_conditioned = sol.condition > 1e10;
    return sol;
}

inline LinearSolution solve_linear_real(const ComplexMatrix &a, const std::vector<double> &b) {
    std::vector<cplx> bc(b.begin(), b.end());
    return solve_linear(a, bc);
}

}  // namespace qgrad
