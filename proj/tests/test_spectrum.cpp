#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qgrad/reconstruction.hpp"
#include "qgrad/spectrum.hpp"

using namespace qgrad;

TEST_CASE("generator_spectrum on standard generators") {
    const Spectrum half_z = generator_spectrum(Generator::pauli({{0.5, "Z"}}), 1);
    REQUIRE(half_z.r_count == 1);
    REQUIRE(half_z.frequencies[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(half_z.equidistant);

    const Spectrum two_z = generator_spectrum(Generator::pauli({{0.5, "ZI"}, {0.5, "IZ"}}), 2);
    REQUIRE(two_z.r_count == 2);
    REQUIRE(two_z.frequencies[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(two_z.frequencies[1] == Catch::Approx(2.0).margin(1e-12));

    // Sum of P independent commuting Pauli words with +-1 coefficients:
    // R = P frequencies forming the ladder [P] at spacing 2.
    const Spectrum comm = generator_spectrum(
        Generator::pauli({{1.0, "ZII"}, {-1.0, "IXI"}, {1.0, "IIZ"}}), 3);
    REQUIRE(comm.r_count == 3);
    REQUIRE(comm.equidistant);
    REQUIRE(comm.scale == Catch::Approx(2.0).margin(1e-12));
    for (int l = 0; l < 3; ++l)
        REQUIRE(comm.frequencies[l] == Catch::Approx(2.0 * (l + 1.0)).margin(1e-12));
}

TEST_CASE("frequency count bound R <= r(r-1)/2") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ComplexMatrix m = testing::random_hermitian(8, seed);
        const Spectrum s = generator_spectrum(Generator::from_dense(m), 3);
        std::vector<double> evs = s.eigenvalues;
        std::sort(evs.begin(), evs.end());
        int r_unique = 1;
        for (std::size_t i = 1; i < evs.size(); ++i)
            if (std::abs(evs[i] - evs[i - 1]) > 1e-9 * std::max(1.0, std::abs(evs[i]))) ++r_unique;
        REQUIRE(s.r_count <= r_unique * (r_unique - 1) / 2);
    }
}

TEST_CASE("detect_equidistant") {
    auto [e1, s1] = detect_equidistant({1.0, 2.0, 3.0});
    REQUIRE(e1);
    REQUIRE(s1 == Catch::Approx(1.0));
    auto [e2, s2] = detect_equidistant({2.0, 4.0, 6.0});
    REQUIRE(e2);
    REQUIRE(s2 == Catch::Approx(2.0));
    auto [e3, s3] = detect_equidistant({1.0, std::sqrt(2.0)});
    REQUIRE_FALSE(e3);
    REQUIRE(s3 == Catch::Approx(1.0));
    REQUIRE_THROWS_MATCHES(detect_equidistant({}), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::EmptySpectrum;
                           }));
}

TEST_CASE("param_spectrum basics") {
    std::vector<Gate> gates;
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{-0.5, "X"}})));
    const Circuit rx(1, std::move(gates), 1);
    const Spectrum s = param_spectrum(rx, 0);
    REQUIRE(s.r_count == 1);
    REQUIRE(s.frequencies[0] == Catch::Approx(1.0).margin(1e-12));

    // Mixer sum_k X_k on N=3: frequencies {2, 4, 6}.
    std::vector<Gate> mixer_gates;
    mixer_gates.push_back(Gate::make_param(
        0, -1.0, Generator::pauli({{1.0, "XII"}, {1.0, "IXI"}, {1.0, "IIX"}})));
    const Circuit mixer(3, std::move(mixer_gates), 1);
    const Spectrum sm = param_spectrum(mixer, 0);
    REQUIRE(sm.r_count == 3);
    REQUIRE(sm.equidistant);
    REQUIRE(sm.scale == Catch::Approx(2.0).margin(1e-12));
    for (int l = 0; l < 3; ++l)
        REQUIRE(sm.frequencies[l] == Catch::Approx(2.0 * (l + 1)).margin(1e-12));

    REQUIRE_THROWS_MATCHES(param_spectrum(rx, 0 + 1), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::IndexOutOfRange ||
                                      e.code() == ErrorCode::UnusedParameter;
                           }));
}

TEST_CASE("unused parameter is reported") {
    std::vector<Gate> gates;
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{0.5, "Z"}})));
    const Circuit c(1, std::move(gates), 2);
    REQUIRE_THROWS_MATCHES(param_spectrum(c, 1), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::UnusedParameter;
                           }));
}

TEST_CASE("prefactor rescaling scales frequencies") {
    for (double s : {0.5, 2.0, -3.0}) {
        std::vector<Gate> gates;
        gates.push_back(Gate::make_param(0, s, Generator::pauli({{0.5, "ZI"}, {0.5, "IZ"}})));
        const Circuit c(2, std::move(gates), 1);
        const Spectrum sp = param_spectrum(c, 0);
        REQUIRE(sp.r_count == 2);
        REQUIRE(sp.frequencies[0] == Catch::Approx(std::abs(s)).margin(1e-12));
        REQUIRE(sp.frequencies[1] == Catch::Approx(2.0 * std::abs(s)).margin(1e-12));
    }
}

TEST_CASE("shared commuting gates sum their generators") {
    std::vector<Gate> gates;
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{0.5, "ZI"}})));
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{0.5, "IZ"}})));
    const Circuit c(2, std::move(gates), 1);
    const Spectrum s = param_spectrum(c, 0);
    REQUIRE(s.r_count == 2);
    REQUIRE(s.frequencies[0] == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(s.frequencies[1] == Catch::Approx(2.0).margin(1e-10));
    REQUIRE_FALSE(s.heuristic);
}

TEST_CASE("noncommuting shared gates fall back to the flagged heuristic") {
    std::vector<Gate> gates;
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{1.0, "Z"}})));
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{1.0, "X"}})));
    const Circuit c(1, std::move(gates), 1);
    const Spectrum s = param_spectrum(c, 0);
    REQUIRE(s.heuristic);
    REQUIRE(s.r_count >= 1);
    for (double f : s.frequencies) REQUIRE(f > 0.0);
}

TEST_CASE("noncommuting shared gates with an f_term are rejected") {
    const ComplexMatrix f = pauli_sum_dense({{0.3, "Y"}}, 1);
    std::vector<Gate> gates;
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{1.0, "Z"}}),
                                     Generator::from_dense(f)));
    gates.push_back(Gate::make_param(0, 1.0, Generator::pauli({{1.0, "X"}}),
                                     Generator::from_dense(f)));
    const Circuit c(1, std::move(gates), 1);
    REQUIRE_THROWS_MATCHES(param_spectrum(c, 0), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e) {
                               return e.code() == ErrorCode::NoncommutingRepeatedGates;
                           }));
}

TEST_CASE("nonuniform DFT over param_spectrum frequencies reproduces E") {
    // The anti-drift invariant: for every parameter of a random circuit, the
    // reconstruction over the reported frequencies matches E everywhere.
    const auto fx = testing::make_random_circuit(3, {2, 1, 3}, 808);
    for (int k = 0; k < 3; ++k) {
        const Spectrum s = param_spectrum(fx.circuit, k);
        const UnivariateEval e = restrict_eval(fx.circuit, fx.params, fx.observable, k);
        const TrigPoly p = reconstruct_univariate([&](double x) { return e(x); }, s);
        SplitMix64 rng(900 + k);
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(-pi, pi);
            REQUIRE(p.eval(x) == Catch::Approx(e(x)).margin(1e-7));
        }
    }
}
