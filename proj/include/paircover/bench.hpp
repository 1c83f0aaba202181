#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/qa.hpp"
#include "paircover/reduce.hpp"
#include "paircover/rng.hpp"
#include "paircover/sa.hpp"
#include "paircover/scp.hpp"
#include "paircover/stats.hpp"

namespace paircover {

/// Runs fn over tasks on a bounded pool; results land in task order no matter
/// which worker finishes first.
template <typename Task, typename Fn>
auto run_pool(const std::vector<Task>& tasks, Fn fn, int workers)
    -> std::vector<std::invoke_result_t<Fn, const Task&>> {
    using Result = std::invoke_result_t<Fn, const Task&>;
    std::vector<Result> results(tasks.size());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(tasks.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = fn(tasks[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
                results[i] = fn(tasks[i]);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

struct BenchInstance {
    int ground_count = 0;      // n
    int cover_count = 0;       // m
    std::uint64_t seed = 0;    // gen_random_dummy_free seed that reproduces it
    int spins = 0;             // M of the reduction
    int instance_id = 0;       // index within its M bucket
    std::vector<std::pair<int, int>> edges;

    ScpInstance instance() const { return ScpInstance(ground_count, cover_count, edges); }
};

/// Draws dummy-free instances over the (n, m) grid with derived seeds,
/// keeping feasible ones bucketed by reduction size M until every bucket in
/// [spins_min, spins_max] holds per_size instances (or the draw budget runs
/// out). Deterministic given seed. With `unique_optimum` set, only instances
/// with a single minimum cover are kept (non-degenerate anneal targets).
inline std::vector<BenchInstance> sample_instance_buckets(std::span<const int> n_list,
                                                          std::span<const int> m_list, int spins_min,
                                                          int spins_max, int per_size,
                                                          std::uint64_t seed,
                                                          bool unique_optimum = false,
                                                          long long max_draws = 2'000'000) {
    if (n_list.empty() || m_list.empty()) throw InvalidArgument("bench: empty n/m grid");
    if (spins_min > spins_max || per_size < 1) throw InvalidArgument("bench: bad bucket bounds");
    std::map<int, std::vector<BenchInstance>> buckets;
    long long want = 0;
    for (int s = spins_min; s <= spins_max; ++s) {
        buckets[s] = {};
        want += per_size;
    }
    long long have = 0;
    for (long long draw = 0; draw < max_draws && have < want; ++draw) {
        const int n = n_list[static_cast<std::size_t>(draw) % n_list.size()];
        const int m = m_list[(static_cast<std::size_t>(draw) / n_list.size()) % m_list.size()];
        const std::uint64_t inst_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(draw)));
        const ScpInstance inst = gen_random_dummy_free(n, m, inst_seed);
        const PairCoverMap map = pair_cover_map(inst);
        int spins = m;
        bool feasible = true;
        for (int k = 1; k <= n; ++k) {
            const int r = map.r(k);
            if (r == 0) {
                feasible = false;
                break;
            }
            spins += r + std::max(r - 1, 0);
        }
        if (!feasible) continue;
        const auto it = buckets.find(spins);
        if (it == buckets.end() || static_cast<int>(it->second.size()) >= per_size) continue;
        if (unique_optimum && all_minimum_covers(inst).size() != 1) continue;
        BenchInstance entry;
        entry.ground_count = n;
        entry.cover_count = m;
        entry.seed = inst_seed;
        entry.spins = spins;
        entry.instance_id = static_cast<int>(it->second.size());
        entry.edges = inst.edges();
        it->second.push_back(std::move(entry));
        ++have;
    }
    std::vector<BenchInstance> out;
    for (auto& [spins, list] : buckets) {
        for (auto& entry : list) out.push_back(std::move(entry));
    }
    return out;
}

struct BenchRow {
    std::string backend;
    int spins = 0;
    int instance_id = 0;
    bool ok = false;
    bool censored = false; // target unreachable within t_max: T* > t_max
    long long t_star = 0;
    double p_or_w = 0.0;   // p(T*) for qa, w(S*) for sa
    int s_star = 0;        // sa only
    std::string note;      // skip/censor reason when !ok
};

struct QaBenchConfig {
    double target = 0.25;
    std::int64_t t_max = 4096;
    double tol = 1e-8;
    ProbabilityConvention convention = ProbabilityConvention::PlainNorm;
    int max_spins = 20;
};

struct SaBenchConfig {
    std::vector<int> grid{8, 16, 32, 64, 128, 256, 512, 1024};
    int runs = 200;
    double target = 0.25;
    double beta_initial = 0.1;
    double beta_final = 3.0;
    int max_spins = 24;
};

inline BenchRow bench_one_qa(const BenchInstance& entry, const QaBenchConfig& cfg) {
    BenchRow row{"qa", entry.spins, entry.instance_id};
    if (entry.spins > cfg.max_spins) {
        row.note = "capacity: M > " + std::to_string(cfg.max_spins);
        return row;
    }
    const ScpInstance inst = entry.instance();
    auto [model, layout] = reduce(inst);
    const SuccessSpec spec = SuccessSpec::for_instance(inst, layout, cfg.convention);
    const AnnealTimeResult res = find_min_anneal_time(model, spec, cfg.target, cfg.t_max, cfg.tol);
    if (!res.found) {
        row.censored = true;
        row.note = "target not reached by t_max; best p=" + std::to_string(res.best_p) + " at T=" +
                   std::to_string(res.best_t);
        return row;
    }
    row.ok = true;
    row.t_star = res.t_star;
    row.p_or_w = res.p_at_t_star;
    return row;
}

inline BenchRow bench_one_sa(const BenchInstance& entry, const SaBenchConfig& cfg) {
    BenchRow row{"sa", entry.spins, entry.instance_id};
    if (entry.spins > cfg.max_spins) {
        row.note = "capacity: M > " + std::to_string(cfg.max_spins);
        return row;
    }
    const ScpInstance inst = entry.instance();
    auto [model, layout] = reduce(inst);
    const GroundStates oracle = ground_states_exhaustive(model);
    try {
        const SweepScan scan =
            optimize_sweeps(model, cfg.grid, cfg.runs, oracle.min_energy, entry.seed, cfg.target,
                            cfg.beta_initial, cfg.beta_final);
        row.ok = true;
        row.t_star = scan.best_total;
        row.s_star = scan.best_sweeps;
        for (const auto& point : scan.curve) {
            if (point.sweeps == scan.best_sweeps) row.p_or_w = point.w;
        }
    } catch (const UnreachableTargetError&) {
        row.note = "w = 0 on the whole sweep grid";
    }
    return row;
}

struct ScalingPoint {
    int spins = 0;
    int count = 0;    // solved + censored rows entering the median
    int censored = 0; // right-censored rows (T* > t_max), counted as +infinity
    double median_t_star = 0.0;
};

/// Per-M medians of T* for one backend. Right-censored rows participate as
/// +infinity: the median stays exact as long as fewer than half of a bucket
/// is censored, and turns infinite (point unusable for the fit) otherwise.
inline std::vector<ScalingPoint> scaling_medians(std::span<const BenchRow> rows,
                                                 const std::string& backend) {
    std::map<int, std::pair<std::vector<double>, int>> by_spins;
    for (const auto& row : rows) {
        if (row.backend != backend) continue;
        if (row.ok) {
            by_spins[row.spins].first.push_back(static_cast<double>(row.t_star));
        } else if (row.censored) {
            auto& bucket = by_spins[row.spins];
            bucket.first.push_back(std::numeric_limits<double>::infinity());
            bucket.second += 1;
        }
    }
    std::vector<ScalingPoint> points;
    for (auto& [spins, bucket] : by_spins) {
        points.push_back({spins, static_cast<int>(bucket.first.size()), bucket.second,
                          median(bucket.first)});
    }
    return points;
}

/// Least-squares slope of log2(median T*) against M: T* = O(2^(slope M)).
inline LinearFit fit_scaling_exponent(std::span<const ScalingPoint> points) {
    std::vector<double> x, y;
    for (const auto& point : points) {
        if (point.median_t_star > 0 && std::isfinite(point.median_t_star)) {
            x.push_back(static_cast<double>(point.spins));
            y.push_back(std::log2(point.median_t_star));
        }
    }
    return fit_line(x, y);
}

} // namespace paircover
