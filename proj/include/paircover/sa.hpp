#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/ising.hpp"
#include "paircover/rng.hpp"
#include "paircover/stats.hpp"

namespace paircover {

struct SaConfig {
    int sweeps = 100;      // S
    int repetitions = 1;   // R
    double beta_initial = 0.1;
    double beta_final = 3.0;
    std::uint64_t seed = 0;
    std::function<double(int step, int total)> tau; // optional custom beta schedule

    /// Inverse temperature for sweep `step` (0-based); linear in beta by default.
    double beta_at(int step) const {
        if (tau) return tau(step, sweeps);
        if (sweeps <= 1) return beta_final;
        return beta_initial +
               (beta_final - beta_initial) * static_cast<double>(step) / static_cast<double>(sweeps - 1);
    }

    void validate() const {
        if (sweeps < 1) throw InvalidArgument("SaConfig: sweeps >= 1 required");
        if (repetitions < 1) throw InvalidArgument("SaConfig: repetitions >= 1 required");
        if (!tau && beta_final < beta_initial) {
            throw InvalidArgument("SaConfig: beta schedule must be non-decreasing");
        }
    }
};

/// Metropolis machinery over the integer-rescaled model. Energies stay exact
/// (int64); doubles appear only inside the acceptance exponential.
class SaRunner {
public:
    explicit SaRunner(const IsingModel& model) : scaled_(model) {}

    int spin_count() const { return scaled_.spin_count(); }
    std::int64_t scale() const { return scaled_.scale; }

    std::int64_t scaled_energy(const std::vector<std::int8_t>& parity) const {
        return scaled_.energy_of(parity);
    }

    Rational energy_of(std::int64_t scaled_energy) const {
        return Rational(scaled_energy, scaled_.scale);
    }

    /// One sweep: spin_count uniformly random single-spin proposals; a flip is
    /// accepted when dE <= 0, else with probability exp(-beta dE). dE comes
    /// from the spin's adjacency, never a full energy recomputation.
    void sweep(std::vector<std::int8_t>& parity, std::int64_t& energy, double beta,
               std::mt19937_64& rng) const {
        const double inv_scale = 1.0 / static_cast<double>(scaled_.scale);
        const int m = spin_count();
        for (int step = 0; step < m; ++step) {
            const int i = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(m)));
            const std::int64_t delta = scaled_.flip_delta(parity, i);
            bool accept = delta <= 0;
            if (!accept) {
                accept = rand_unit(rng) < std::exp(-beta * static_cast<double>(delta) * inv_scale);
            }
            if (accept) {
                parity[static_cast<std::size_t>(i)] =
                    static_cast<std::int8_t>(-parity[static_cast<std::size_t>(i)]);
                energy += delta;
            }
        }
    }

    std::vector<std::int8_t> random_parity(std::mt19937_64& rng) const {
        std::vector<std::int8_t> parity(static_cast<std::size_t>(spin_count()));
        for (auto& p : parity) p = rand_coin(rng) ? std::int8_t{-1} : std::int8_t{1};
        return parity;
    }

private:
    detail::ScaledModel scaled_;
};

namespace detail {

inline std::vector<std::int8_t> bits_to_parity(const std::vector<int>& s) {
    std::vector<std::int8_t> parity(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) parity[i] = static_cast<std::int8_t>(1 - 2 * s[i]);
    return parity;
}

inline std::vector<int> parity_to_bits(const std::vector<std::int8_t>& parity) {
    std::vector<int> s(parity.size());
    for (std::size_t i = 0; i < parity.size(); ++i) s[i] = parity[i] < 0 ? 1 : 0;
    return s;
}

} // namespace detail

/// One Metropolis sweep on assignment `s` at inverse temperature beta.
inline std::vector<int> sweep(const IsingModel& model, std::vector<int> s, double beta,
                              std::mt19937_64& rng) {
    if (static_cast<int>(s.size()) != model.spin_count()) {
        throw InvalidArgument("sweep: assignment length != spin count");
    }
    const SaRunner runner(model);
    auto parity = detail::bits_to_parity(s);
    std::int64_t energy = runner.scaled_energy(parity);
    runner.sweep(parity, energy, beta, rng);
    return detail::parity_to_bits(parity);
}

struct AnnealOutcome {
    std::vector<int> assignment;
    Rational energy{0};
};

/// Best of cfg.repetitions independent runs, each cfg.sweeps sweeps from a
/// uniformly random start. Deterministic given cfg.seed (run r draws from the
/// derived stream r, so repetitions are order-independent).
inline AnnealOutcome anneal(const IsingModel& model, const SaConfig& cfg) {
    cfg.validate();
    const SaRunner runner(model);
    bool have_best = false;
    std::int64_t best_energy = 0;
    std::vector<std::int8_t> best_parity;
    for (int run = 0; run < cfg.repetitions; ++run) {
        auto rng = seeded_engine(cfg.seed, static_cast<std::uint64_t>(run));
        auto parity = runner.random_parity(rng);
        std::int64_t energy = runner.scaled_energy(parity);
        for (int step = 0; step < cfg.sweeps; ++step) {
            runner.sweep(parity, energy, cfg.beta_at(step), rng);
        }
        if (!have_best || energy < best_energy) {
            have_best = true;
            best_energy = energy;
            best_parity = parity;
        }
    }
    return {detail::parity_to_bits(best_parity), runner.energy_of(best_energy)};
}

struct SaStats {
    double success_fraction = 0.0; // w
    double ci_low = 0.0;           // Wilson 95%
    double ci_high = 0.0;
    Rational best_energy{0};
    std::vector<Rational> run_energies;
};

/// Fraction of independent runs whose final assignment satisfies `satisfactory`.
inline SaStats estimate_success(const IsingModel& model, int sweeps, int runs,
                                const std::function<bool(const std::vector<int>&, const Rational&)>& satisfactory,
                                std::uint64_t seed, double beta_initial = 0.1,
                                double beta_final = 3.0) {
    if (runs < 1) throw InvalidArgument("estimate_success: runs >= 1 required");
    SaConfig cfg;
    cfg.sweeps = sweeps;
    cfg.beta_initial = beta_initial;
    cfg.beta_final = beta_final;
    cfg.validate();
    const SaRunner runner(model);
    SaStats stats;
    stats.run_energies.reserve(static_cast<std::size_t>(runs));
    long long successes = 0;
    bool have_best = false;
    for (int run = 0; run < runs; ++run) {
        auto rng = seeded_engine(seed, static_cast<std::uint64_t>(run));
        auto parity = runner.random_parity(rng);
        std::int64_t energy = runner.scaled_energy(parity);
        for (int step = 0; step < sweeps; ++step) {
            runner.sweep(parity, energy, cfg.beta_at(step), rng);
        }
        const Rational exact = runner.energy_of(energy);
        stats.run_energies.push_back(exact);
        if (!have_best || exact < stats.best_energy) {
            have_best = true;
            stats.best_energy = exact;
        }
        if (satisfactory(detail::parity_to_bits(parity), exact)) ++successes;
    }
    stats.success_fraction = static_cast<double>(successes) / static_cast<double>(runs);
    const WilsonInterval ci = wilson_interval(successes, runs);
    stats.ci_low = ci.low;
    stats.ci_high = ci.high;
    return stats;
}

/// Strict criterion: a run succeeds when it ends exactly at the oracle-optimal
/// energy.
inline SaStats estimate_success(const IsingModel& model, int sweeps, int runs,
                                const Rational& optimal_energy, std::uint64_t seed,
                                double beta_initial = 0.1, double beta_final = 3.0) {
    return estimate_success(
        model, sweeps, runs,
        [&optimal_energy](const std::vector<int>&, const Rational& e) { return e == optimal_energy; },
        seed, beta_initial, beta_final);
}

struct TotalTime {
    long long repetitions = 0; // R
    long long time_units = 0;  // T = R * S
};

/// R = ceil(log(1-p) / log(1-w)) repetitions (R = 1 when w = 1), T = R * S.
inline TotalTime total_time(long long sweeps, double w, double target_p = 0.25) {
    if (sweeps < 1) throw InvalidArgument("total_time: sweeps >= 1 required");
    if (!(target_p > 0.0 && target_p < 1.0)) {
        throw InvalidArgument("total_time: target probability must be in (0,1)");
    }
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("total_time: w must be in [0,1]");
    if (w == 0.0) throw UnreachableTargetError("total_time: success probability w = 0");
    long long repetitions = 1;
    if (w < 1.0) {
        const double ratio = std::log1p(-target_p) / std::log1p(-w);
        repetitions = std::max<long long>(1, static_cast<long long>(std::ceil(ratio - 1e-12)));
    }
    return {repetitions, repetitions * sweeps};
}

struct SweepPoint {
    int sweeps = 0;
    double w = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool reachable = false;     // w > 0
    long long repetitions = 0;  // valid when reachable
    long long total_time = 0;
};

struct SweepScan {
    int best_sweeps = 0;       // S*
    long long best_total = 0;  // T*
    std::vector<SweepPoint> curve;
};

/// Scans the grid, estimating w(S) via `estimate`, and returns the argmin of
/// T(S) (ties resolved toward the earlier grid point) plus the full curve.
inline SweepScan optimize_sweeps_curve(const std::function<SaStats(int)>& estimate,
                                       std::span<const int> grid, double target_p = 0.25) {
    if (grid.empty()) throw InvalidArgument("optimize_sweeps: empty grid");
    SweepScan scan;
    bool have_best = false;
    for (int sweeps : grid) {
        const SaStats stats = estimate(sweeps);
        SweepPoint point;
        point.sweeps = sweeps;
        point.w = stats.success_fraction;
        point.ci_low = stats.ci_low;
        point.ci_high = stats.ci_high;
        point.reachable = stats.success_fraction > 0.0;
        if (point.reachable) {
            const TotalTime t = total_time(sweeps, stats.success_fraction, target_p);
            point.repetitions = t.repetitions;
            point.total_time = t.time_units;
            if (!have_best || point.total_time < scan.best_total) {
                have_best = true;
                scan.best_sweeps = sweeps;
                scan.best_total = point.total_time;
            }
        }
        scan.curve.push_back(point);
    }
    if (!have_best) {
        throw UnreachableTargetError("optimize_sweeps: w(S) = 0 on the whole grid");
    }
    return scan;
}

inline SweepScan optimize_sweeps(const IsingModel& model, std::span<const int> grid, int runs,
                                 const Rational& optimal_energy, std::uint64_t seed,
                                 double target_p = 0.25, double beta_initial = 0.1,
                                 double beta_final = 3.0) {
    return optimize_sweeps_curve(
        [&](int sweeps) {
            return estimate_success(model, sweeps, runs, optimal_energy,
                                    splitmix64(seed ^ static_cast<std::uint64_t>(sweeps)),
                                    beta_initial, beta_final);
        },
        grid, target_p);
}

} // namespace paircover
