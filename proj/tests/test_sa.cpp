#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "paircover/reduce.hpp"
#include "paircover/sa.hpp"

using namespace paircover;
using testutil::worked_instance;

TEST_CASE("greedy limit never raises the energy", "[sa]") {
    auto [model, layout] = reduce(worked_instance());
    auto rng = seeded_engine(11);
    std::vector<int> s(14, 0);
    for (int i = 0; i < 14; ++i) s[static_cast<std::size_t>(i)] = rand_coin(rng) ? 1 : 0;
    Rational energy = model.energy(s);
    for (int round = 0; round < 50; ++round) {
        s = sweep(model, s, 1e18, rng);
        const Rational next = model.energy(s);
        CHECK(next <= energy);
        energy = next;
    }
}

TEST_CASE("infinite temperature accepts every proposal", "[sa]") {
    IsingModel model(1);
    model.add_field(0, Rational(1));
    auto rng = seeded_engine(3);
    std::vector<int> s{0};
    int ones = 0;
    const int sweeps = 10'000;
    for (int i = 0; i < sweeps; ++i) {
        s = sweep(model, s, 0.0, rng);
        ones += s[0];
    }
    // every proposal accepted: the single spin alternates deterministically
    CHECK(ones == sweeps / 2);
}

TEST_CASE("incremental flip energies match full evaluation exactly", "[sa]") {
    auto [model, layout] = reduce(worked_instance());
    const detail::ScaledModel scaled(model);
    auto rng = seeded_engine(17);
    std::vector<int> s(14, 0);
    std::vector<std::int8_t> parity(14, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const int spin = static_cast<int>(rand_below(rng, 14));
        const Rational before = model.energy(s);
        const std::int64_t delta = scaled.flip_delta(parity, spin);
        s[static_cast<std::size_t>(spin)] ^= 1;
        parity[static_cast<std::size_t>(spin)] =
            static_cast<std::int8_t>(-parity[static_cast<std::size_t>(spin)]);
        const Rational after = model.energy(s);
        CHECK(after - before == Rational(delta, scaled.scale));
    }
}

TEST_CASE("anneal finds the worked-instance optimum", "[sa]") {
    auto [model, layout] = reduce(worked_instance());
    SaConfig cfg;
    cfg.sweeps = 200;
    cfg.repetitions = 20;
    cfg.seed = 7;
    const AnnealOutcome outcome = anneal(model, cfg);
    CHECK(outcome.energy == Rational(1, 2));
    CHECK(decode(layout, outcome.assignment).chosen == std::vector<int>{1, 4});
}

TEST_CASE("anneal solves tiny models", "[sa]") {
    SECTION("ferromagnetic pair") {
        IsingModel model(2);
        model.add_coupling(0, 1, Rational(-1));
        SaConfig cfg;
        cfg.sweeps = 50;
        cfg.repetitions = 4;
        cfg.seed = 5;
        CHECK(anneal(model, cfg).energy == Rational(-1));
    }
    SECTION("one greedy sweep suffices on a single spin") {
        IsingModel model(1);
        model.add_field(0, Rational(1));
        SaConfig cfg;
        cfg.sweeps = 1;
        cfg.repetitions = 1;
        cfg.beta_initial = 1e18;
        cfg.beta_final = 1e18;
        cfg.seed = 9;
        const AnnealOutcome outcome = anneal(model, cfg);
        CHECK(outcome.assignment == std::vector<int>{1});
        CHECK(outcome.energy == Rational(-1));
    }
    SECTION("config validation") {
        SaConfig bad;
        bad.sweeps = 0;
        CHECK_THROWS_AS(anneal(IsingModel(1), bad), InvalidArgument);
        SaConfig decreasing;
        decreasing.beta_initial = 2.0;
        decreasing.beta_final = 1.0;
        CHECK_THROWS_AS(anneal(IsingModel(1), decreasing), InvalidArgument);
    }
}

TEST_CASE("estimate_success is deterministic and self-consistent", "[sa]") {
    auto [model, layout] = reduce(worked_instance());
    const Rational optimum(1, 2);
    const SaStats a = estimate_success(model, 100, 400, optimum, 21);
    const SaStats b = estimate_success(model, 100, 400, optimum, 21);
    CHECK(a.success_fraction == b.success_fraction);
    CHECK(a.run_energies == b.run_energies);
    CHECK(a.ci_low <= a.success_fraction);
    CHECK(a.success_fraction <= a.ci_high);
    CHECK(a.best_energy == optimum);

    // an independent estimate lands inside (or overlapping) the first interval
    const SaStats c = estimate_success(model, 100, 400, optimum, 99);
    CHECK(c.ci_low <= a.ci_high);
    CHECK(a.ci_low <= c.ci_high);

    CHECK_THROWS_AS(estimate_success(model, 100, 0, optimum, 1), InvalidArgument);
}

TEST_CASE("near-certain success on an easy model", "[sa]") {
    IsingModel model(2);
    model.add_field(0, Rational(2));
    model.add_field(1, Rational(2));
    const SaStats stats = estimate_success(model, 200, 200, Rational(-4), 3);
    CHECK(stats.success_fraction > 0.95);
}

TEST_CASE("total_time implements the repetition formula", "[sa]") {
    SECTION("w = target gives one repetition") {
        const TotalTime t = total_time(100, 0.25, 0.25);
        CHECK(t.repetitions == 1);
        CHECK(t.time_units == 100);
    }
    SECTION("published arithmetic example") {
        const TotalTime t = total_time(100, 0.1, 0.25);
        CHECK(t.repetitions == 3);
        CHECK(t.time_units == 300);
    }
    SECTION("certain success") {
        const TotalTime t = total_time(64, 1.0, 0.25);
        CHECK(t.repetitions == 1);
        CHECK(t.time_units == 64);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(total_time(100, 0.0, 0.25), UnreachableTargetError);
        CHECK_THROWS_AS(total_time(100, 0.5, 0.0), InvalidArgument);
        CHECK_THROWS_AS(total_time(100, 0.5, 1.0), InvalidArgument);
        CHECK_THROWS_AS(total_time(100, 1.5, 0.25), InvalidArgument);
        CHECK_THROWS_AS(total_time(0, 0.5, 0.25), InvalidArgument);
    }
    SECTION("monotone decreasing in w") {
        long long last = total_time(100, 0.05, 0.25).time_units;
        for (const double w : {0.1, 0.2, 0.4, 0.8, 1.0}) {
            const long long now = total_time(100, w, 0.25).time_units;
            CHECK(now <= last);
            last = now;
        }
    }
}

TEST_CASE("optimize_sweeps scans the grid", "[sa]") {
    SECTION("synthetic closed-form curve") {
        const auto fake = [](int sweeps) {
            SaStats stats;
            stats.success_fraction = std::min(1.0, static_cast<double>(sweeps) / 1000.0);
            return stats;
        };
        const std::vector<int> grid{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
        const SweepScan scan = optimize_sweeps_curve(fake, grid, 0.25);
        // independent scan of T(S) = ceil(log .75 / log(1 - S/1000)) * S
        long long best = -1;
        int best_sweeps = 0;
        for (const int sweeps : grid) {
            const double w = std::min(1.0, sweeps / 1000.0);
            const TotalTime t = total_time(sweeps, w, 0.25);
            if (best < 0 || t.time_units < best) {
                best = t.time_units;
                best_sweeps = sweeps;
            }
        }
        CHECK(scan.best_total == best);
        CHECK(scan.best_sweeps == best_sweeps);
        CHECK(scan.curve.size() == grid.size());
    }
    SECTION("single-point grid returns that point") {
        const auto fake = [](int) {
            SaStats stats;
            stats.success_fraction = 0.5;
            return stats;
        };
        const std::vector<int> grid{40};
        const SweepScan scan = optimize_sweeps_curve(fake, grid, 0.25);
        CHECK(scan.best_sweeps == 40);
    }
    SECTION("unreachable grid") {
        const auto fake = [](int) { return SaStats{}; };
        const std::vector<int> grid{10, 20};
        CHECK_THROWS_AS(optimize_sweeps_curve(fake, grid, 0.25), UnreachableTargetError);
        CHECK_THROWS_AS(optimize_sweeps_curve(fake, std::vector<int>{}, 0.25), InvalidArgument);
    }
    SECTION("worked model: T* is the grid minimum") {
        auto [model, layout] = reduce(worked_instance());
        const std::vector<int> grid{10, 50, 100, 250, 500};
        const SweepScan scan = optimize_sweeps(model, grid, 200, Rational(1, 2), 13);
        for (const SweepPoint& point : scan.curve) {
            if (point.reachable) CHECK(scan.best_total <= point.total_time);
        }
    }
}

TEST_CASE("fixed-temperature sweeps sample the Gibbs distribution", "[sa][slow]") {
    IsingModel model(2);
    model.add_field(0, Rational(3, 10));
    model.add_field(1, Rational(-1, 5));
    model.add_coupling(0, 1, Rational(1, 2));
    const double beta = 1.0;

    std::array<double, 4> gibbs{};
    double z = 0.0;
    for (std::uint32_t b = 0; b < 4; ++b) {
        gibbs[b] = std::exp(-beta * to_double(model.energy_packed(b)));
        z += gibbs[b];
    }
    for (auto& g : gibbs) g /= z;

    auto rng = seeded_engine(31);
    std::vector<int> s{0, 0};
    std::array<long long, 4> counts{};
    const int burn_in = 2000;
    const int samples = 100'000;
    for (int i = 0; i < burn_in; ++i) s = sweep(model, s, beta, rng);
    for (int i = 0; i < samples; ++i) {
        s = sweep(model, s, beta, rng);
        counts[static_cast<std::size_t>(s[0] | (s[1] << 1))]++;
    }
    for (std::uint32_t b = 0; b < 4; ++b) {
        const double freq = static_cast<double>(counts[b]) / samples;
        // 3 sigma with an autocorrelation allowance (samples are one sweep apart)
        const double sigma = std::sqrt(gibbs[b] * (1.0 - gibbs[b]) / samples);
        CHECK(std::abs(freq - gibbs[b]) < 3.0 * sigma * 2.5);
    }
}
