#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "paircover/qa.hpp"
#include "paircover/reduce.hpp"

using namespace paircover;
using testutil::worked_instance;

namespace {

IsingModel small_model() {
    IsingModel model(3);
    model.add_field(0, Rational(1, 2));
    model.add_field(1, Rational(-1, 4));
    model.add_field(2, Rational(3, 4));
    model.add_coupling(0, 1, Rational(-1, 2));
    model.add_coupling(1, 2, Rational(1, 4));
    return model;
}

} // namespace

TEST_CASE("apply_hamiltonian acts diagonally at s=1", "[qa]") {
    const IsingModel model = small_model();
    for (std::uint32_t b = 0; b < 8; ++b) {
        const WaveState basis = WaveState::basis(3, b);
        const WaveState out = apply_hamiltonian(model, {1, 1, 1}, 1.0, basis);
        const double expected = to_double(model.energy_packed(b));
        for (std::uint32_t c = 0; c < 8; ++c) {
            const double want = (c == b) ? expected : 0.0;
            CHECK(std::abs(out.amplitudes[c] - want) < 1e-14);
        }
    }
}

TEST_CASE("apply_hamiltonian flips the spin at s=0", "[qa]") {
    IsingModel model(1);
    model.add_field(0, Rational(3)); // irrelevant at s=0
    const WaveState out = apply_hamiltonian(model, {1.0}, 0.0, WaveState::basis(1, 0));
    CHECK(std::abs(out.amplitudes[0]) < 1e-15);
    CHECK(std::abs(out.amplitudes[1] - 1.0) < 1e-15);
}

TEST_CASE("apply_hamiltonian matches the dense matrix", "[qa]") {
    IsingModel model(2);
    model.add_field(0, Rational(1, 3));
    model.add_field(1, Rational(-2, 5));
    model.add_coupling(0, 1, Rational(7, 11));
    model.add_offset(Rational(1, 7));
    const std::vector<double> delta{0.8, -1.3};
    const double s = 0.37;

    WaveState psi;
    psi.spin_count = 2;
    psi.amplitudes = {{0.1, 0.2}, {-0.3, 0.5}, {0.7, -0.1}, {0.2, 0.4}};
    double norm = psi.norm();
    for (auto& a : psi.amplitudes) a /= norm;

    const auto hx = testutil::dense_transverse(2, delta);
    const auto hz = testutil::dense_diagonal(model);
    const auto dense = testutil::matvec(testutil::combine(hx, 1.0 - s, hz, s), psi.amplitudes);
    const WaveState fast = apply_hamiltonian(model, delta, s, psi);
    for (std::size_t b = 0; b < 4; ++b) {
        CHECK(std::abs(fast.amplitudes[b] - dense[b]) < 1e-12);
    }

    CHECK_THROWS_AS(apply_hamiltonian(model, {1.0}, s, psi), InvalidArgument);
    WaveState wrong = psi;
    wrong.spin_count = 1;
    CHECK_THROWS_AS(apply_hamiltonian(model, delta, s, wrong), InvalidArgument);
}

TEST_CASE("energy expectation agrees between routes at s=1", "[qa]") {
    const IsingModel model = small_model();
    auto rng = seeded_engine(5);
    WaveState psi;
    psi.spin_count = 3;
    psi.amplitudes.resize(8);
    for (auto& a : psi.amplitudes) a = {rand_unit(rng) - 0.5, rand_unit(rng) - 0.5};
    const double norm = psi.norm();
    for (auto& a : psi.amplitudes) a /= norm;

    double table_route = 0.0;
    for (std::uint32_t b = 0; b < 8; ++b) {
        table_route += std::norm(psi.amplitudes[b]) * to_double(model.energy_packed(b));
    }
    const WaveState h_psi = apply_hamiltonian(model, {1, 1, 1}, 1.0, psi);
    double matrix_free_route = 0.0;
    for (std::uint32_t b = 0; b < 8; ++b) {
        matrix_free_route += (std::conj(psi.amplitudes[b]) * h_psi.amplitudes[b]).real();
    }
    CHECK(std::abs(table_route - matrix_free_route) < 1e-10);
}

TEST_CASE("evolve keeps the norm and reaches the driver target", "[qa]") {
    IsingModel model(1);
    model.add_field(0, Rational(1));
    const WaveState psi = evolve(model, AnnealSchedule::for_model(model, 64));
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-6);
    CHECK(std::norm(psi.amplitudes[1]) > 0.9); // ground state is s = 1

    const auto reference = testutil::evolve_dense(model, {-1.0}, 64, 1e-3);
    CHECK(testutil::fidelity(reference, psi.amplitudes) >= 1.0 - 1e-6);

    CHECK_THROWS_AS(evolve(model, AnnealSchedule{0, {-1.0}}), InvalidArgument);
    CHECK_THROWS_AS(evolve(model, AnnealSchedule{4, {1.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(evolve(IsingModel(21), AnnealSchedule::for_model(IsingModel(21), 1)),
                    CapacityError);
}

TEST_CASE("evolve matches dense matrix-exponential stepping", "[qa][oracle]") {
    const IsingModel model = small_model();
    for (const std::int64_t total : {1, 8}) {
        const AnnealSchedule sched = AnnealSchedule::for_model(model, total);
        const WaveState psi = evolve(model, sched);
        const auto reference = testutil::evolve_dense(model, sched.delta, total, 1e-3);
        CHECK(testutil::fidelity(reference, psi.amplitudes) >= 1.0 - 1e-6);
        CHECK(std::abs(psi.norm() - 1.0) <= 1e-6);
    }
}

TEST_CASE("adiabatic limit concentrates on the unique ground state", "[qa][slow]") {
    // n=1, m=2 reduction: M=3 with the unique minimizer 111.
    auto [model, layout] = reduce(ScpInstance(1, 2, {{1, 1}, {2, 1}}));
    const WaveState psi = evolve(model, AnnealSchedule::for_model(model, 512));
    CHECK(std::norm(psi.amplitudes[0b111]) >= 0.9);
}

TEST_CASE("success_probability sums the projected weight", "[qa]") {
    const ScpInstance inst = worked_instance();
    auto [model, layout] = reduce(inst);
    const SuccessSpec spec = SuccessSpec::for_instance(inst, layout);
    REQUIRE(spec.patterns == std::vector<std::uint32_t>{0b1001});

    SECTION("a supported basis state has probability one") {
        const WaveState basis = WaveState::basis(14, 0b1001u | (0b101u << 4));
        CHECK(success_probability(basis, spec) == 1.0);
    }
    SECTION("uniform superposition weighs support / 2^M") {
        const WaveState uniform = WaveState::uniform(14);
        CHECK(std::abs(success_probability(uniform, spec) - 1.0 / 16.0) < 1e-12);
        SuccessSpec plain = spec;
        plain.convention = ProbabilityConvention::PlainNorm;
        CHECK(std::abs(success_probability(uniform, plain) - 0.25) < 1e-12);
    }
    SECTION("empty support is an error") {
        SuccessSpec empty = spec;
        empty.patterns.clear();
        const WaveState uniform = WaveState::uniform(14);
        CHECK_THROWS_AS(success_probability(uniform, empty), InfeasibleError);
    }
    SECTION("dimension mismatch is an error") {
        CHECK_THROWS_AS(success_probability(WaveState::uniform(3), spec), InvalidArgument);
    }
}

TEST_CASE("find_min_anneal_time searches the probe path", "[qa]") {
    SECTION("already above target at T=1") {
        const AnnealTimeResult res =
            find_min_anneal_time([](std::int64_t) { return 0.9; }, 0.25, 128);
        CHECK(res.found);
        CHECK(res.t_star == 1);
    }
    SECTION("matches a linear scan on synthetic monotone curves") {
        for (const double rate : {0.002, 0.011, 0.09}) {
            const auto p_of_t = [rate](std::int64_t t) {
                return 1.0 - std::exp(-rate * static_cast<double>(t));
            };
            const AnnealTimeResult res = find_min_anneal_time(p_of_t, 0.25, 4096);
            std::int64_t scan = 1;
            while (p_of_t(scan) < 0.25) ++scan;
            REQUIRE(res.found);
            CHECK(res.t_star == scan);
            CHECK(res.p_at_t_star >= 0.25);
        }
    }
    SECTION("reports the best probe when the target is unreachable") {
        const AnnealTimeResult res =
            find_min_anneal_time([](std::int64_t t) { return t == 8 ? 0.2 : 0.1; }, 0.5, 64);
        CHECK_FALSE(res.found);
        CHECK(res.best_t == 8);
        CHECK(res.best_p == 0.2);
    }
    SECTION("argument validation") {
        const auto p = [](std::int64_t) { return 0.5; };
        CHECK_THROWS_AS(find_min_anneal_time(p, 0.0, 16), InvalidArgument);
        CHECK_THROWS_AS(find_min_anneal_time(p, 1.0, 16), InvalidArgument);
        CHECK_THROWS_AS(find_min_anneal_time(p, 0.25, 0), InvalidArgument);
    }
}

TEST_CASE("anneal-time search on a tiny instance", "[qa][slow]") {
    const ScpInstance inst(1, 2, {{1, 1}, {2, 1}});
    auto [model, layout] = reduce(inst);
    const SuccessSpec spec = SuccessSpec::for_instance(inst, layout);
    const AnnealTimeResult res = find_min_anneal_time(model, spec, 0.25, 256, 1e-8);
    REQUIRE(res.found);
    CHECK(res.p_at_t_star >= 0.25);
    // p(T* - 1) < target along the probed path
    if (res.t_star > 1) {
        bool saw_below = false;
        for (const auto& [t, p] : res.probes) {
            if (t == res.t_star - 1) saw_below = p < 0.25;
        }
        CHECK(saw_below);
    }
}
