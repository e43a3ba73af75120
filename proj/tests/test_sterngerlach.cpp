#include <doctest.h>

#include <cmath>

#include "qsr/rng.hpp"
#include "qsr/sterngerlach.hpp"

using namespace qsr;
using namespace qsr::sterngerlach;
using qsr::reduction::NoReductionError;

namespace {

SGConfig small_config(std::uint64_t seed = 7) {
    SGConfig c;
    c.ancilla_levels = 5;
    c.detector_grains = 2;
    c.grain_levels = 2;
    c.packet_center = 1.5;
    c.packet_width = 0.25;
    c.threshold = 0.5;
    c.seed = seed;
    return c;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("coupling is an exact permutation unitary") {
    auto sc = build_sg_scenario(small_config(), Complex(kInvSqrt2, 0),
                                Complex(kInvSqrt2, 0));
    CHECK(sc.coupling.unitarity_defect() < 1e-12);

    // every column holds exactly one unit entry
    const Matrix& u = sc.coupling.entries();
    for (Index j = 0; j < u.cols(); ++j) {
        int nonzero = 0;
        for (Index i = 0; i < u.rows(); ++i) {
            if (std::abs(u(i, j)) == 0.0) continue;
            CHECK(u(i, j) == Complex(1, 0));
            ++nonzero;
        }
        CHECK(nonzero == 1);
    }
}

TEST_CASE("threshold above the packet energy freezes the detector") {
    auto cfg = small_config();
    cfg.threshold = 10.0;  // packet energy is ~1.16
    auto sc = build_sg_scenario(cfg, Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0));

    auto expansion = reduction::expand_bilinear(sc);
    CHECK_FALSE(reduction::reduction_triggered(expansion, sc.signal_projectors));
    CHECK_THROWS_AS(reduction::reduce(sc, expansion), NoReductionError);

    auto tally = run_batch(cfg, Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0), 10);
    CHECK_FALSE(tally.registered);
    CHECK(tally.records.empty());
}

TEST_CASE("definite spin lands in its own strip") {
    auto cfg = small_config();
    auto sc = build_sg_scenario(cfg, Complex(1, 0), Complex(0, 0));
    for (auto j : {Spin::plus, Spin::minus}) {
        auto state = evolve_definite_spin(cfg, j);
        CHECK(std::abs(state.trace() - 1.0) < 1e-12);
        auto occ = reduction::sector_occupancies(state, sc.signal_projectors);
        CHECK(occ[static_cast<std::size_t>(wired_strip(j))] ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(occ[static_cast<std::size_t>(1 - wired_strip(j))] ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("run_superposition: diagonal terms equal the definite-spin runs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto cfg = small_config(seed);
        cfg.ancilla_levels = 3 + 2 * static_cast<int>(seed % 2);
        auto run = run_superposition(cfg, Complex(0.6, 0.0), Complex(0.0, 0.8));
        for (std::size_t k = 0; k < 2; ++k) {
            auto direct = evolve_definite_spin(cfg, static_cast<Spin>(k));
            CHECK(trace_distance(run.expansion.diagonal(k), direct) < 1e-10);
        }
    }
}

TEST_CASE("run_superposition: Born weights and the pure-channel limit") {
    auto cfg = small_config();

    auto one = run_superposition(cfg, Complex(1, 0), Complex(0, 0));
    REQUIRE(one.mixture.size() == 1);
    CHECK(one.mixture.weight(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_distance(one.mixture.state(0),
                         evolve_definite_spin(cfg, Spin::plus)) < 1e-10);

    auto equal = run_superposition(cfg, Complex(kInvSqrt2, 0),
                                   Complex(0, kInvSqrt2));
    REQUIRE(equal.mixture.size() == 2);
    CHECK(equal.mixture.weight(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(equal.mixture.weight(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("run_superposition: weights match block traces of the end state") {
    for (std::uint64_t seed = 11; seed <= 14; ++seed) {
        rng::Stream s(seed);
        Complex cp = s.complex_normal();
        Complex cm = s.complex_normal();
        double n = std::sqrt(std::norm(cp) + std::norm(cm));
        cp /= n;
        cm /= n;

        auto cfg = small_config(seed);
        auto sc = build_sg_scenario(cfg, cp, cm);
        auto run = run_superposition(cfg, cp, cm);

        auto full = reduction::unitary_end_state(sc);
        auto blocks = reduction::sector_occupancies(full, sc.signal_projectors);
        for (std::size_t m = 0; m < run.mixture.size(); ++m) {
            std::size_t channel = run.component_channels[m];
            CHECK(std::abs(run.mixture.weight(m) - blocks[channel]) < 1e-10);
        }
    }
}

TEST_CASE("quadratic form is sesquilinear: a global phase changes nothing") {
    auto cfg = small_config();
    Complex cp(0.6, 0.0), cm(0.0, 0.8);

    auto base = run_superposition(cfg, cp, cm);

    // multiplication by i and -1 is exact in IEEE arithmetic: bit equality
    for (Complex phase : {Complex(0, 1), Complex(-1, 0)}) {
        auto rotated = run_superposition(cfg, phase * cp, phase * cm);
        REQUIRE(base.mixture.size() == rotated.mixture.size());
        for (std::size_t m = 0; m < base.mixture.size(); ++m) {
            CHECK(base.mixture.weight(m) == rotated.mixture.weight(m));
            CHECK((base.mixture.state(m).entries() -
                   rotated.mixture.state(m).entries())
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
        }
    }

    // generic phases: equal up to one rounding of the coefficient products
    auto rotated = run_superposition(cfg, std::polar(1.0, 1.234) * cp,
                                     std::polar(1.0, 1.234) * cm);
    for (std::size_t m = 0; m < base.mixture.size(); ++m) {
        CHECK(std::abs(base.mixture.weight(m) - rotated.mixture.weight(m)) < 1e-15);
        CHECK((base.mixture.state(m).entries() - rotated.mixture.state(m).entries())
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
}

TEST_CASE("run_batch: single trial fires exactly one strip") {
    auto tally = run_batch(small_config(), Complex(kInvSqrt2, 0),
                           Complex(kInvSqrt2, 0), 1);
    CHECK(tally.registered);
    CHECK(tally.strip_counts[0] + tally.strip_counts[1] == 1);
    REQUIRE(tally.records.size() == 1);
    CHECK(tally.records[0].strip == wired_strip(tally.records[0].j));
}

TEST_CASE("run_batch: deterministic and wiring-correct on every trial") {
    auto cfg = small_config(21);
    auto a = run_batch(cfg, Complex(0.6, 0.0), Complex(0.0, 0.8), 500);
    auto b = run_batch(cfg, Complex(0.6, 0.0), Complex(0.0, 0.8), 500);
    CHECK(a.strip_counts == b.strip_counts);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].seed == b.records[i].seed);
        CHECK(a.records[i].strip == b.records[i].strip);
        CHECK(a.records[i].strip == wired_strip(a.records[i].j));
        CHECK(a.records[i].grain == target_grain(cfg, a.records[i].strip));
    }
    CHECK(a.strip_counts[0] + a.strip_counts[1] == 500);
}

TEST_CASE("run_batch: frequencies approach the Born weights") {
    const long long n = 100000;
    auto cfg = small_config(33);

    auto equal = run_batch(cfg, Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0), n);
    double freq = static_cast<double>(equal.strip_counts[0]) / n;
    double sigma = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(freq - 0.5) < 3 * sigma);

    auto skewed = run_batch(cfg, Complex(0.6, 0.0), Complex(0.8, 0.0), n);
    double f0 = static_cast<double>(skewed.strip_counts[0]) / n;
    double s0 = std::sqrt(0.36 * 0.64 / static_cast<double>(n));
    CHECK(std::abs(f0 - 0.36) < 3 * s0);
}

TEST_CASE("covariance_check: identity, rotation, pure phase") {
    auto cfg = small_config();

    CHECK(covariance_check(cfg, OperatorMatrix::identity(2)) < 1e-12);

    Matrix h(2, 2);
    h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    CHECK(covariance_check(cfg, OperatorMatrix(h)) < 1e-8);

    Matrix phase = Matrix::Identity(2, 2);
    phase(1, 1) = std::polar(1.0, 0.77);
    CHECK(covariance_check(cfg, OperatorMatrix(phase)) < 1e-8);

    // pure phase rotations leave the weights exactly alone
    auto sc = build_sg_scenario(cfg, Complex(0.6, 0.0), Complex(0.0, 0.8));
    auto v_atom = tensor(OperatorMatrix(phase),
                         OperatorMatrix::identity(cfg.cells()));
    auto conj = reduction::conjugate_scenario(sc, v_atom);
    auto mix = reduction::reduce(sc, reduction::expand_bilinear(sc));
    auto mix_c = reduction::reduce(conj, reduction::expand_bilinear(conj));
    REQUIRE(mix.size() == mix_c.size());
    for (std::size_t k = 0; k < mix.size(); ++k)
        CHECK(mix.weight(k) == mix_c.weight(k));
}

TEST_CASE("identical-particle toy reproduces the plain strip statistics") {
    auto plain = small_config(44);
    plain.ancilla_levels = 3;

    auto toy = plain;
    toy.symmetrize = true;
    toy.bound_cells = 1;

    for (auto j : {Spin::plus, Spin::minus}) {
        auto state_plain = evolve_definite_spin(plain, j);
        auto state_toy = evolve_definite_spin(toy, j);

        // strip statistics agree exactly when beam and bound modes are orthogonal
        auto sc_plain = build_sg_scenario(plain, Complex(1, 0), Complex(0, 0));
        auto sc_toy = build_sg_scenario(toy, Complex(1, 0), Complex(0, 0));
        auto occ_plain =
            reduction::sector_occupancies(state_plain, sc_plain.signal_projectors);
        auto occ_toy =
            reduction::sector_occupancies(state_toy, sc_toy.signal_projectors);
        CHECK(occ_plain[0] == doctest::Approx(occ_toy[0]).epsilon(1e-12));
        CHECK(occ_plain[1] == doctest::Approx(occ_toy[1]).epsilon(1e-12));

        // the grain marginals coincide as matrices
        std::vector<std::size_t> keep_plain, keep_toy;
        for (int g = 0; g < plain.detector_grains; ++g) {
            keep_plain.push_back(1 + static_cast<std::size_t>(g));
            keep_toy.push_back(2 + static_cast<std::size_t>(g));
        }
        auto grains_plain = partial_trace(
            state_plain, sc_plain.layout, keep_plain);
        auto grains_toy = partial_trace(state_toy, sc_toy.layout, keep_toy);
        CHECK((grains_plain.entries() - grains_toy.entries())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    cfg.ancilla_levels = 2;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);

    cfg = small_config();
    cfg.detector_grains = 1;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);

    cfg = small_config();
    cfg.grain_levels = 12;
    cfg.detector_grains = 4;  // 2*5*12^4 blows the dimension budget
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}
