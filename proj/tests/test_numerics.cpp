#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qgrad/numerics.hpp"

using namespace qgrad;

namespace {

ComplexMatrix pauli_z2() {
    ComplexMatrix m(2, 2);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = -1.0;
    return m;
}

ComplexMatrix pauli_x2() {
    ComplexMatrix m(2, 2);
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("hermitian_eig on Pauli matrices") {
    const EigenDecomposition ez = hermitian_eig(pauli_z2());
    REQUIRE(ez.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(ez.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));

    const EigenDecomposition ex = hermitian_eig(pauli_x2());
    REQUIRE(ex.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(ex.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // (|0> - |1>)/sqrt2 with the leading component fixed positive-real.
    REQUIRE(std::abs(ex.eigenvectors.at(0, 0) - cplx(inv_sqrt2, 0.0)) < 1e-10);
    REQUIRE(std::abs(ex.eigenvectors.at(1, 0) - cplx(-inv_sqrt2, 0.0)) < 1e-10);
    REQUIRE(std::abs(ex.eigenvectors.at(0, 1) - cplx(inv_sqrt2, 0.0)) < 1e-10);
    REQUIRE(std::abs(ex.eigenvectors.at(1, 1) - cplx(inv_sqrt2, 0.0)) < 1e-10);
}

TEST_CASE("hermitian_eig reconstructs random matrices") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const ComplexMatrix m = testing::random_hermitian(8, seed);
        const EigenDecomposition eig = hermitian_eig(m);
        for (std::size_t i = 1; i < 8; ++i) REQUIRE(eig.eigenvalues[i] >= eig.eigenvalues[i - 1]);
        // V^dag V = I
        const ComplexMatrix vtv = matmul(adjoint(eig.eigenvectors), eig.eigenvectors);
        REQUIRE(max_abs_diff(vtv, identity_matrix(8)) < 1e-10);
        // V diag(w) V^dag = M
        ComplexMatrix rec(8, 8);
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t j = 0; j < 8; ++j)
                    rec.at(i, j) += eig.eigenvectors.at(i, k) * eig.eigenvalues[k] *
                                    std::conj(eig.eigenvectors.at(j, k));
        REQUIRE(max_abs_diff(rec, m) < 1e-10);
    }
}

TEST_CASE("hermitian_eig eigenvalues invariant under unitary conjugation") {
    const ComplexMatrix m = testing::random_hermitian(6, 21);
    const ComplexMatrix u = testing::random_unitary(6, 22);
    const ComplexMatrix conj = matmul(adjoint(u), matmul(m, u));
    const auto e1 = hermitian_eig(m).eigenvalues;
    const auto e2 = hermitian_eig(conj).eigenvalues;
    for (std::size_t i = 0; i < 6; ++i) REQUIRE(e1[i] == Catch::Approx(e2[i]).margin(1e-10));
}

TEST_CASE("hermitian_eig rejects bad input") {
    ComplexMatrix rect(2, 3);
    REQUIRE_THROWS_MATCHES(hermitian_eig(rect), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::NonSquare;
                           }));
    ComplexMatrix nonherm(2, 2);
    nonherm.at(0, 1) = 1.0;  // missing conjugate partner
    REQUIRE_THROWS_MATCHES(hermitian_eig(nonherm), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::NonHermitian;
                           }));
}

TEST_CASE("expm_i basics") {
    REQUIRE(max_abs_diff(expm_i(0.0, pauli_x2()), identity_matrix(2)) < 1e-12);

    const ComplexMatrix mz = expm_i(pi, pauli_z2());
    ComplexMatrix minus_i2 = identity_matrix(2);
    minus_i2.at(0, 0) = -1.0;
    minus_i2.at(1, 1) = -1.0;
    REQUIRE(max_abs_diff(mz, minus_i2) < 1e-12);

    const ComplexMatrix got = expm_i(0.3, pauli_x2());
    const ComplexMatrix want = testing::taylor_expm_i(0.3, pauli_x2(), 16);
    REQUIRE(max_abs_diff(got, want) < 1e-12);
}

TEST_CASE("expm_i is unitary and inverts under negated angle") {
    for (std::uint64_t seed : {31u, 32u}) {
        const ComplexMatrix m = testing::random_hermitian(8, seed);
        SplitMix64 rng(seed + 100);
        const double theta = rng.uniform(-2.0, 2.0);
        const ComplexMatrix u = expm_i(theta, m);
        const ComplexMatrix uinv = expm_i(-theta, m);
        REQUIRE(max_abs_diff(matmul(u, uinv), identity_matrix(8)) < 1e-10);
        REQUIRE(max_abs_diff(matmul(u, adjoint(u)), identity_matrix(8)) < 1e-10);
    }
}

TEST_CASE("solve_linear basics") {
    const ComplexMatrix id = identity_matrix(3);
    const std::vector<cplx> b{1.0, 2.0, 3.0};
    const LinearSolution s1 = solve_linear(id, b);
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(s1.x[i] - b[i]) < 1e-14);

    ComplexMatrix d(2, 2);
    d.at(0, 0) = 2.0;
    d.at(1, 1) = 4.0;
    const LinearSolution s2 = solve_linear(d, {2.0, 8.0});
    REQUIRE(std::abs(s2.x[0] - cplx(1.0, 0.0)) < 1e-14);
    REQUIRE(std::abs(s2.x[1] - cplx(2.0, 0.0)) < 1e-14);

    // random well-conditioned system: residual check
    SplitMix64 rng(7);
    ComplexMatrix a(9, 9);
    for (auto &z : a.data) z = cplx(testing::gaussian(rng), testing::gaussian(rng));
    for (int i = 0; i < 9; ++i) a.at(i, i) += 10.0;
    std::vector<cplx> rhs(9);
    for (auto &z : rhs) z = cplx(testing::gaussian(rng), testing::gaussian(rng));
    const LinearSolution s3 = solve_linear(a, rhs);
    double resid = 0.0, bn = 0.0;
    const std::vector<cplx> ax = matvec(a, s3.x);
    for (int i = 0; i < 9; ++i) {
        resid += std::norm(ax[i] - rhs[i]);
        bn += std::norm(rhs[i]);
    }
    REQUIRE(std::sqrt(resid) < 1e-10 * std::sqrt(bn));
    REQUIRE_FALSE(s3.ill_conditioned);
}

TEST_CASE("solve_linear flags rank deficiency and conditioning") {
    ComplexMatrix sing(2, 2);
    sing.at(0, 0) = 1.0;
    sing.at(0, 1) = 1.0;
    sing.at(1, 0) = 1.0;
    sing.at(1, 1) = 1.0;
    REQUIRE_THROWS_MATCHES(solve_linear(sing, {1.0, 1.0}), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::Singular;
                           }));

    ComplexMatrix nearsing(2, 2);
    nearsing.at(0, 0) = 1.0;
    nearsing.at(0, 1) = 1.0;
    nearsing.at(1, 0) = 1.0;
    nearsing.at(1, 1) = 1.0 + 1e-12;
    const LinearSolution s = solve_linear(nearsing, {1.0, 1.0});
    REQUIRE(s.ill_conditioned);
}
