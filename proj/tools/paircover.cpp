#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paircover/bench.hpp"
#include "paircover/chimera.hpp"
#include "paircover/io.hpp"
#include "paircover/qa.hpp"
#include "paircover/reduce.hpp"
#include "paircover/sa.hpp"
#include "paircover/scp.hpp"

namespace {

namespace fs = std::filesystem;
using namespace paircover;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitVerification = 5;

// Relative output paths land in $PAIRCOVER_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
    const char* dir = std::getenv("PAIRCOVER_OUT_DIR");
    if (!dir || *dir == '\0' || path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(dir) / path).string();
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Every command that writes files also writes <primary>.manifest.json with
/// the full config snapshot, so the outputs can be reproduced from it.
struct Manifest {
    json body;
    Stopwatch clock;

    Manifest(const std::string& command, const std::vector<std::string>& argv) {
        body["command"] = command;
        body["argv"] = argv;
        body["inputs"] = json::array();
        body["outputs"] = json::array();
        body["config"] = json::object();
    }

    void input(const std::string& path) { body["inputs"].push_back(path); }
    void output(const std::string& path) { body["outputs"].push_back(path); }

    void write(const std::string& primary_output) {
        body["wall_seconds"] = clock.seconds();
        write_text_file(primary_output + ".manifest.json", body.dump(2) + "\n");
    }
};

std::vector<std::string> collect_argv(int argc, char** argv) {
    return std::vector<std::string>(argv, argv + argc);
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw InvalidArgument(std::string(what) + ": bad integer '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
    return out;
}

ProbabilityConvention parse_convention(const std::string& name) {
    if (name == "squared") return ProbabilityConvention::SquaredNorm;
    if (name == "plain") return ProbabilityConvention::PlainNorm;
    throw InvalidArgument("convention must be 'squared' or 'plain'");
}

int cmd_gen(const std::vector<std::string>& argv, int n, int m, int count, std::uint64_t seed,
            const std::string& out_prefix) {
    Manifest manifest("gen", argv);
    manifest.body["config"] = {{"n", n}, {"m", m}, {"count", count}, {"seed", seed}};
    const std::string prefix = resolve_out(out_prefix);
    for (int idx = 0; idx < count; ++idx) {
        const std::uint64_t inst_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(idx)));
        const ScpInstance inst = gen_random_dummy_free(n, m, inst_seed);
        char name[32];
        std::snprintf(name, sizeof(name), "_%03d.json", idx);
        const std::string path = prefix + name;
        write_text_file(path, instance_to_json(inst).dump(2) + "\n");
        manifest.output(path);
        std::cout << path << "\n";
    }
    manifest.write(prefix);
    return kExitOk;
}

int cmd_reduce(const std::vector<std::string>& argv, const std::string& instance_path,
               const std::string& alpha_text, bool no_top, const std::string& out_path) {
    const ScpInstance inst = instance_from_json(load_json_file(instance_path));
    ReductionConfig cfg;
    cfg.alpha = parse_rational(alpha_text);
    cfg.enforce_top = !no_top;
    auto [model, layout] = reduce(inst, cfg);
    json out = ising_to_json(model);
    json labels = json::array();
    for (const auto& label : layout.labels()) labels.push_back(label.to_string());
    out["labels"] = labels;
    std::cerr << "M = " << model.spin_count() << " spins, " << model.couplings().size()
              << " couplings\n";
    if (out_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        Manifest manifest("reduce", argv);
        manifest.input(instance_path);
        manifest.body["config"] = {{"alpha", alpha_text}, {"enforce_top", cfg.enforce_top}};
        const std::string path = resolve_out(out_path);
        write_text_file(path, out.dump(2) + "\n");
        manifest.output(path);
        manifest.write(path);
        std::cout << path << "\n";
    }
    return kExitOk;
}

json oracle_cross_check(const ScpInstance& inst, const IsingModel& model,
                        const VariableLayout& layout, const CoverSolution& cover) {
    const CoverSolution best = solve_exact(inst);
    const GroundStates gs = ground_states_exhaustive(model);
    return json{{"optimal_size", best.size()},
                {"ground_energy", to_string(gs.min_energy)},
                {"matches_optimal_size", cover.size() == best.size()}};
}

int cmd_solve(const std::vector<std::string>& argv, const std::string& instance_path,
              const std::string& backend, const std::string& alpha_text, std::uint64_t seed,
              double target_p, std::int64_t t_max, double tol, const std::string& grid_text,
              int runs, const std::string& convention_name, const std::string& out_path) {
    const ScpInstance inst = instance_from_json(load_json_file(instance_path));
    ReductionConfig rcfg;
    rcfg.alpha = parse_rational(alpha_text);
    auto [model, layout] = reduce(inst, rcfg);
    const int spins = model.spin_count();

    json record;
    record["instance"] = instance_path;
    record["M"] = spins;
    record["backend"] = backend;
    record["seed"] = seed;
    record["alpha"] = alpha_text;

    CoverSolution cover;
    if (backend == "oracle") {
        if (spins > 24) throw CapacityError("oracle backend: M > 24");
        const GroundStates gs = ground_states_exhaustive(model);
        cover = decode_packed(layout, gs.assignments.front());
        record["ground_energy"] = to_string(gs.min_energy);
        record["ground_state_count"] = gs.assignments.size();
    } else if (backend == "sa") {
        const std::vector<int> grid = parse_int_list(grid_text, "--sweeps-grid");
        SaConfig cfg;
        cfg.seed = seed;
        if (spins <= 24) {
            const GroundStates gs = ground_states_exhaustive(model);
            const SweepScan scan = optimize_sweeps(model, grid, runs, gs.min_energy, seed, target_p);
            record["S_star"] = scan.best_sweeps;
            record["T_star"] = scan.best_total;
            for (const auto& point : scan.curve) {
                if (point.sweeps == scan.best_sweeps) {
                    record["w"] = point.w;
                    record["R"] = point.repetitions;
                }
            }
            if (!out_path.empty()) {
                std::ostringstream csv;
                csv << "S,w,w_ci_low,w_ci_high,R,T\n";
                for (const auto& point : scan.curve) {
                    csv << point.sweeps << "," << fmt_double(point.w) << "," << fmt_double(point.ci_low)
                        << "," << fmt_double(point.ci_high) << ","
                        << (point.reachable ? std::to_string(point.repetitions) : "") << ","
                        << (point.reachable ? std::to_string(point.total_time) : "") << "\n";
                }
                write_text_file(resolve_out(out_path) + ".curve.csv", csv.str());
            }
            // R belongs to the reported time model; the emitted answer is the
            // best of all `runs` repetitions at S*.
            cfg.sweeps = scan.best_sweeps;
            cfg.repetitions = runs;
        } else {
            cfg.sweeps = grid.back();
            cfg.repetitions = runs;
            record["note"] = "M > 24: no oracle optimum, plain best-of-R anneal";
        }
        const AnnealOutcome outcome = anneal(model, cfg);
        cover = decode(layout, outcome.assignment);
        record["energy"] = to_string(outcome.energy);
        record["sweeps"] = cfg.sweeps;
        record["repetitions"] = cfg.repetitions;
    } else if (backend == "qa") {
        if (spins > 20) throw CapacityError("qa backend: M > 20");
        const SuccessSpec spec =
            SuccessSpec::for_instance(inst, layout, parse_convention(convention_name));
        const AnnealTimeResult res = find_min_anneal_time(model, spec, target_p, t_max, tol);
        json probes = json::array();
        for (const auto& [t, p] : res.probes) probes.push_back({{"T", t}, {"p", p}});
        record["probes"] = probes;
        record["convention"] = convention_name;
        record["target_p"] = target_p;
        record["tol"] = tol;
        if (!res.found) {
            record["found"] = false;
            record["best_T"] = res.best_t;
            record["best_p"] = res.best_p;
            std::cout << record.dump(2) << "\n";
            std::cerr << "target probability not reached by t_max\n";
            return kExitVerification;
        }
        record["found"] = true;
        record["T"] = res.t_star;
        record["p"] = res.p_at_t_star;
        const WaveState psi =
            evolve(model, AnnealSchedule::for_model(model, res.t_star), tol);
        std::uint32_t best_state = 0;
        double best_weight = -1.0;
        for (std::size_t b = 0; b < psi.amplitudes.size(); ++b) {
            const double w = std::norm(psi.amplitudes[b]);
            if (w > best_weight) {
                best_weight = w;
                best_state = static_cast<std::uint32_t>(b);
            }
        }
        cover = decode_packed(layout, best_state);
    } else {
        throw InvalidArgument("backend must be oracle, sa or qa");
    }

    record["cover"] = cover.chosen;
    record["cover_size"] = cover.size();
    record["cover_valid"] = verify_cover(inst, cover);
    if (spins <= 24) record["oracle"] = oracle_cross_check(inst, model, layout, cover);

    if (out_path.empty()) {
        std::cout << record.dump(2) << "\n";
    } else {
        Manifest manifest("solve", argv);
        manifest.input(instance_path);
        manifest.body["config"] = {{"backend", backend},   {"alpha", alpha_text}, {"seed", seed},
                                   {"target_p", target_p}, {"t_max", t_max},      {"tol", tol},
                                   {"sweeps_grid", grid_text}, {"runs", runs},
                                   {"convention", convention_name}};
        const std::string path = resolve_out(out_path);
        write_text_file(path, record.dump(2) + "\n");
        manifest.output(path);
        manifest.write(path);
        std::cout << path << "\n";
    }
    return record["cover_valid"].get<bool>() ? kExitOk : kExitVerification;
}

int cmd_embed(const std::vector<std::string>& argv, const std::string& instance_path,
              const std::string& out_prefix) {
    const ScpInstance inst = instance_from_json(load_json_file(instance_path));
    const InstanceEmbedding emb = embed_instance(inst);
    const VerifyResult verdict = verify_minor_embedding(emb.logical, emb.target, emb.embedding);
    std::cout << "f1 = " << emb.band_rows << ", f2 = " << emb.grid_cols << ", target F("
              << emb.band_rows << "," << emb.grid_cols << ",4)\n";
    std::cout << "qubits used = " << emb.embedding.vertices_used() << " of "
              << emb.target.vertex_count() << "\n";
    std::cout << "verify: " << verdict.message << "\n";
    if (!out_prefix.empty()) {
        Manifest manifest("embed", argv);
        manifest.input(instance_path);
        const std::string prefix = resolve_out(out_prefix);
        json out = embedding_to_json(emb.logical, emb.embedding);
        out["f1"] = emb.band_rows;
        out["f2"] = emb.grid_cols;
        out["shore"] = 4;
        out["qubits_used"] = emb.embedding.vertices_used();
        write_text_file(prefix + ".json", out.dump(2) + "\n");
        write_text_file(prefix + ".dot", embedding_to_dot(emb.logical, emb.target, emb.embedding));
        manifest.output(prefix + ".json");
        manifest.output(prefix + ".dot");
        manifest.write(prefix + ".json");
    }
    return verdict.ok ? kExitOk : kExitVerification;
}

int cmd_bench(const std::vector<std::string>& argv, const std::string& backends_text,
              const std::string& n_list_text, const std::string& m_list_text, int spins_min,
              int spins_max, int per_size, std::uint64_t seed, double target_p, std::int64_t t_max,
              double tol, const std::string& grid_text, int runs,
              const std::string& convention_name, bool unique_optimum, int workers,
              const std::string& out_path) {
    Manifest manifest("bench", argv);
    const std::vector<int> n_list = parse_int_list(n_list_text, "--n-list");
    const std::vector<int> m_list = parse_int_list(m_list_text, "--m-list");
    const std::vector<BenchInstance> instances =
        sample_instance_buckets(n_list, m_list, spins_min, spins_max, per_size, seed, unique_optimum);

    std::vector<std::string> backends;
    for (std::stringstream stream(backends_text); std::getline(stream, backends.emplace_back(), ',');) {
    }
    if (!backends.empty() && backends.back().empty()) backends.pop_back();
    if (backends.empty()) throw InvalidArgument("--backends: empty list");

    QaBenchConfig qa_cfg;
    qa_cfg.target = target_p;
    qa_cfg.t_max = t_max;
    qa_cfg.tol = tol;
    qa_cfg.convention = parse_convention(convention_name);
    SaBenchConfig sa_cfg;
    sa_cfg.grid = parse_int_list(grid_text, "--sweeps-grid");
    sa_cfg.runs = runs;
    sa_cfg.target = target_p;

    struct Task {
        const BenchInstance* instance;
        std::string backend;
    };
    std::vector<Task> tasks;
    for (const std::string& backend : backends) {
        if (backend != "qa" && backend != "sa") {
            throw InvalidArgument("--backends entries must be qa or sa");
        }
        for (const BenchInstance& inst : instances) tasks.push_back({&inst, backend});
    }
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    const std::vector<BenchRow> rows = run_pool(
        tasks,
        [&](const Task& task) {
            return task.backend == "qa" ? bench_one_qa(*task.instance, qa_cfg)
                                        : bench_one_sa(*task.instance, sa_cfg);
        },
        workers);

    json inst_json = json::array();
    for (const BenchInstance& inst : instances) {
        inst_json.push_back({{"n", inst.ground_count},
                             {"m", inst.cover_count},
                             {"seed", inst.seed},
                             {"M", inst.spins},
                             {"instance_id", inst.instance_id}});
    }
    manifest.body["config"] = {{"backends", backends_text}, {"n_list", n_list_text},
                               {"m_list", m_list_text},     {"m_min", spins_min},
                               {"m_max", spins_max},        {"per_size", per_size},
                               {"seed", seed},              {"target_p", target_p},
                               {"t_max", t_max},            {"tol", tol},
                               {"sweeps_grid", grid_text},  {"runs", runs},
                               {"convention", convention_name},
                               {"unique_optimum", unique_optimum}};
    manifest.body["instances"] = inst_json;
    json skipped = json::array();
    for (const BenchRow& row : rows) {
        if (!row.ok) {
            skipped.push_back({{"backend", row.backend},
                               {"M", row.spins},
                               {"instance_id", row.instance_id},
                               {"reason", row.note}});
        }
    }
    manifest.body["skipped"] = skipped;

    const std::string path = resolve_out(out_path);
    for (const std::string& backend : backends) {
        std::ostringstream raw;
        raw << (backend == "qa" ? "M,instance_id,T_star,p_at_T_star\n"
                                : "M,instance_id,S_star,T_star,w\n");
        for (const BenchRow& row : rows) {
            if (!row.ok || row.backend != backend) continue;
            if (backend == "qa") {
                raw << row.spins << "," << row.instance_id << "," << row.t_star << ","
                    << fmt_double(row.p_or_w) << "\n";
            } else {
                raw << row.spins << "," << row.instance_id << "," << row.s_star << "," << row.t_star
                    << "," << fmt_double(row.p_or_w) << "\n";
            }
        }
        const std::string raw_path = path + "." + backend + "_raw.csv";
        write_text_file(raw_path, raw.str());
        manifest.output(raw_path);
    }
    std::ostringstream csv;
    csv << "backend,M,count,median_T_star\n";
    json fits = json::object();
    for (const std::string& backend : backends) {
        const std::vector<ScalingPoint> points = scaling_medians(rows, backend);
        for (const ScalingPoint& point : points) {
            csv << backend << "," << point.spins << "," << point.count << ","
                << fmt_double(point.median_t_star) << "\n";
        }
        if (points.size() >= 2) {
            const LinearFit fit = fit_scaling_exponent(points);
            fits[backend] = {{"exponent", fit.slope}, {"intercept", fit.intercept}};
            std::cout << backend << ": median T* = O(2^(" << fmt_double(fit.slope)
                      << " M)) over M in [" << points.front().spins << "," << points.back().spins
                      << "]\n";
        }
    }
    write_text_file(path, csv.str());
    manifest.output(path);
    manifest.body["fits"] = fits;
    manifest.write(path);
    std::cout << path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set Cover with Pairs: Ising reduction, annealing solvers, Chimera embedding"};
    app.require_subcommand(1);
    const std::vector<std::string> full_argv = collect_argv(argc, argv);

    // gen
    auto* gen = app.add_subcommand("gen", "generate random dummy-free instances");
    int gen_n = 2, gen_m = 2, gen_count = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "instance";
    gen->add_option("--n", gen_n, "ground set size");
    gen->add_option("--m", gen_m, "cover set size");
    gen->add_option("--count", gen_count, "number of instances");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output file prefix");

    // reduce
    auto* red = app.add_subcommand("reduce", "reduce an instance to an Ising model");
    std::string red_instance, red_alpha = "1/4", red_out;
    bool red_no_top = false;
    red->add_option("instance", red_instance, "instance JSON path")->required();
    red->add_option("--alpha", red_alpha, "target term weight (rational p/q)");
    red->add_flag("--no-top", red_no_top, "omit the top-of-chain |0><0| penalty");
    red->add_option("-o,--out", red_out, "output path (stdout when omitted)");

    // solve
    auto* sol = app.add_subcommand("solve", "reduce, solve, decode and verify");
    std::string sol_instance, sol_backend = "oracle", sol_alpha = "1/4", sol_out;
    std::string sol_grid = "8,16,32,64,128,256,512";
    std::string sol_convention = "squared";
    std::uint64_t sol_seed = 0;
    double sol_target = 0.25, sol_tol = 1e-8;
    std::int64_t sol_tmax = 4096;
    int sol_runs = 200;
    sol->add_option("instance", sol_instance, "instance JSON path")->required();
    sol->add_option("--backend", sol_backend, "oracle | sa | qa");
    sol->add_option("--alpha", sol_alpha, "target term weight (rational p/q)");
    sol->add_option("--seed", sol_seed, "rng seed");
    sol->add_option("--target-p", sol_target, "success probability target");
    sol->add_option("--t-max", sol_tmax, "anneal time search bound");
    sol->add_option("--tol", sol_tol, "integrator tolerance");
    sol->add_option("--sweeps-grid", sol_grid, "comma-separated sweep counts");
    sol->add_option("--runs", sol_runs, "runs per sweep-grid point");
    sol->add_option("--convention", sol_convention, "squared | plain success probability");
    sol->add_option("-o,--out", sol_out, "record output path (stdout when omitted)");

    // embed
    auto* emb = app.add_subcommand("embed", "minor-embed an instance onto a Chimera graph");
    std::string emb_instance, emb_out;
    emb->add_option("instance", emb_instance, "instance JSON path")->required();
    emb->add_option("-o,--out", emb_out, "output prefix for .json and .dot");

    // bench
    auto* ben = app.add_subcommand("bench", "scaling benchmark with exponent fit");
    std::string ben_backends = "qa,sa", ben_nlist = "1,2,3,4", ben_mlist = "2,3,4";
    std::string ben_grid = "8,16,32,64,128,256,512,1024", ben_convention = "squared";
    std::string ben_out = "scaling.csv";
    bool ben_unique = false;
    int ben_min = 3, ben_max = 15, ben_per = 10, ben_runs = 200, ben_workers = 0;
    std::uint64_t ben_seed = 1;
    double ben_target = 0.25, ben_tol = 1e-8;
    std::int64_t ben_tmax = 4096;
    ben->add_option("--backends", ben_backends, "comma list of qa,sa");
    ben->add_option("--n-list", ben_nlist, "ground sizes to draw from");
    ben->add_option("--m-list", ben_mlist, "cover sizes to draw from");
    ben->add_option("--m-min", ben_min, "smallest spin count M");
    ben->add_option("--m-max", ben_max, "largest spin count M");
    ben->add_option("--per-size", ben_per, "instances per M");
    ben->add_option("--seed", ben_seed, "rng seed");
    ben->add_option("--target-p", ben_target, "success probability target");
    ben->add_option("--t-max", ben_tmax, "anneal time search bound");
    ben->add_option("--tol", ben_tol, "integrator tolerance");
    ben->add_option("--sweeps-grid", ben_grid, "sa sweep grid");
    ben->add_option("--runs", ben_runs, "sa runs per grid point");
    ben->add_option("--convention", ben_convention, "squared | plain success probability");
    ben->add_flag("--unique-optimum", ben_unique, "keep only instances with a single minimum cover");
    ben->add_option("--workers", ben_workers, "worker pool size (0 = hardware)");
    ben->add_option("-o,--out", ben_out, "scaling CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (gen->parsed()) return cmd_gen(full_argv, gen_n, gen_m, gen_count, gen_seed, gen_out);
        if (red->parsed()) return cmd_reduce(full_argv, red_instance, red_alpha, red_no_top, red_out);
        if (sol->parsed()) {
            return cmd_solve(full_argv, sol_instance, sol_backend, sol_alpha, sol_seed, sol_target,
                             sol_tmax, sol_tol, sol_grid, sol_runs, sol_convention, sol_out);
        }
        if (emb->parsed()) return cmd_embed(full_argv, emb_instance, emb_out);
        if (ben->parsed()) {
            return cmd_bench(full_argv, ben_backends, ben_nlist, ben_mlist, ben_min, ben_max, ben_per,
                             ben_seed, ben_target, ben_tmax, ben_tol, ben_grid, ben_runs,
                             ben_convention, ben_unique, ben_workers, ben_out);
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
