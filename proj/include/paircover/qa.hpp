#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/ising.hpp"
#include "paircover/reduce.hpp"
#include "paircover/scp.hpp"

namespace paircover {

struct WaveState {
    int spin_count = 0;
    std::vector<std::complex<double>> amplitudes; // length 2^spin_count, basis bit i = spin i

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amplitudes) sum += std::norm(a);
        return std::sqrt(sum);
    }

    static WaveState uniform(int spin_count) {
        WaveState psi;
        psi.spin_count = spin_count;
        const std::size_t dim = std::size_t{1} << spin_count;
        psi.amplitudes.assign(dim, std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
        return psi;
    }

    static WaveState basis(int spin_count, std::uint32_t state) {
        WaveState psi;
        psi.spin_count = spin_count;
        psi.amplitudes.assign(std::size_t{1} << spin_count, {});
        psi.amplitudes.at(state) = 1.0;
        return psi;
    }
};

/// Linear anneal H(s(t)) = (1 - t/T) * sum_i delta_i sigma^x_i + (t/T) * H_model.
/// The evolution starts in the uniform superposition, which has to be the
/// driver's ground state for the anneal to target minima of H_model; hence the
/// default transverse weight is -1 per spin.
struct AnnealSchedule {
    std::int64_t total_time = 1;
    std::vector<double> delta;

    static AnnealSchedule for_model(const IsingModel& model, std::int64_t total_time,
                                    double weight = -1.0) {
        return {total_time, std::vector<double>(static_cast<std::size_t>(model.spin_count()), weight)};
    }
};

namespace detail {

/// Basis-state energy table of a model, as doubles (exact int64 fixed point
/// divided once by the common denominator).
inline std::vector<double> basis_energy_table(const IsingModel& model) {
    const int m = model.spin_count();
    const ScaledModel scaled(model);
    const std::size_t dim = std::size_t{1} << m;
    std::vector<double> table(dim);
    std::vector<std::int8_t> p(static_cast<std::size_t>(m), 1);
    std::int64_t energy = scaled.energy_of(p);
    const double inv = 1.0 / static_cast<double>(scaled.scale);
    table[0] = static_cast<double>(energy) * inv;
    std::uint64_t state = 0;
    for (std::uint64_t v = 1; v < dim; ++v) {
        const int bit = std::countr_zero(v);
        energy += scaled.flip_delta(p, bit);
        p[static_cast<std::size_t>(bit)] = static_cast<std::int8_t>(-p[static_cast<std::size_t>(bit)]);
        state ^= std::uint64_t{1} << bit;
        table[state] = static_cast<double>(energy) * inv;
    }
    return table;
}

/// Matrix-free action of H(s); no 2^M x 2^M matrix is ever materialized.
/// With `center` set, the diagonal is shifted to the middle of its range;
/// that changes the propagated state only by a global phase but roughly
/// halves the spectral radius the integrator has to resolve.
class Propagator {
public:
    Propagator(const IsingModel& model, std::vector<double> delta, bool center = false)
        : spin_count_(model.spin_count()),
          dim_(std::size_t{1} << model.spin_count()),
          delta_(std::move(delta)),
          energy_(basis_energy_table(model)) {
        if (static_cast<int>(delta_.size()) != spin_count_) {
            throw InvalidArgument("Propagator: delta length != spin count");
        }
        if (center) {
            const auto [lo, hi] = std::minmax_element(energy_.begin(), energy_.end());
            const double mid = 0.5 * (*lo + *hi);
            for (double& e : energy_) e -= mid;
        }
    }

    int spin_count() const { return spin_count_; }
    std::size_t dimension() const { return dim_; }
    const std::vector<double>& energies() const { return energy_; }

    /// out = H(s) psi.
    void apply(double s, const std::vector<std::complex<double>>& psi,
               std::vector<std::complex<double>>& out) const {
        accumulate_transverse(1.0 - s, psi, out);
        const double* p = reinterpret_cast<const double*>(psi.data());
        double* o = reinterpret_cast<double*>(out.data());
        for (std::size_t b = 0; b < dim_; ++b) {
            const double e = s * energy_[b];
            o[2 * b] += e * p[2 * b];
            o[2 * b + 1] += e * p[2 * b + 1];
        }
    }

    /// out = -i H(s) psi (the Schrodinger right-hand side).
    void derivative(double s, const std::vector<std::complex<double>>& psi,
                    std::vector<std::complex<double>>& out) const {
        accumulate_transverse(1.0 - s, psi, out);
        const double* p = reinterpret_cast<const double*>(psi.data());
        double* o = reinterpret_cast<double*>(out.data());
        for (std::size_t b = 0; b < dim_; ++b) {
            const double e = s * energy_[b];
            const double re = o[2 * b] + e * p[2 * b];
            const double im = o[2 * b + 1] + e * p[2 * b + 1];
            o[2 * b] = im;
            o[2 * b + 1] = -re;
        }
    }

private:
    // Flip-gather over flat doubles: the re/im pair of amplitude b sits at
    // 2b, 2b+1, so the partner of double index d under spin i is d ^ 2^(i+1).
    void accumulate_transverse(double field_scale, const std::vector<std::complex<double>>& psi,
                               std::vector<std::complex<double>>& out) const {
        const double* p = reinterpret_cast<const double*>(psi.data());
        double* o = reinterpret_cast<double*>(out.data());
        const std::size_t n2 = 2 * dim_;
        std::fill(o, o + n2, 0.0);
        for (int i = 0; i < spin_count_; ++i) {
            const double c = field_scale * delta_[static_cast<std::size_t>(i)];
            if (c == 0.0) continue;
            const std::size_t block = std::size_t{2} << i;
            for (std::size_t base = 0; base < n2; base += 2 * block) {
                for (std::size_t lo = base; lo < base + block; ++lo) {
                    const std::size_t hi = lo + block;
                    o[lo] += c * p[hi];
                    o[hi] += c * p[lo];
                }
            }
        }
    }

    int spin_count_;
    std::size_t dim_;
    std::vector<double> delta_;
    std::vector<double> energy_;
};

/// Embedded Dormand-Prince 5(4) pair. The controller rejects on two counts:
/// the usual scaled truncation error, and the per-step norm defect measured
/// against a whole-anneal budget. RK steps are slightly dissipative on
/// oscillatory systems and the defect accumulates one-sidedly, so without the
/// second criterion long anneals drift past the 1e-6 unitarity gate.
class Dopri5 {
public:
    static constexpr double norm_budget = 1e-6; // |norm^2 - 1| allowed over the whole anneal

    Dopri5(const Propagator& prop, double t_scale, double rtol)
        : prop_(prop), t_scale_(t_scale), rtol_(rtol), atol_(1e-12),
          radial_rate_(norm_budget / t_scale),
          // measuring norm^2 over 2*dim doubles has a rounding floor; below
          // it the radial criterion would reject steps forever
          radial_floor_(32.0 * 2.3e-16 * std::sqrt(static_cast<double>(prop.dimension()))) {
        const std::size_t dim = prop.dimension();
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_}) v->resize(dim);
        step_ = 0.05;
        fresh_ = true;
    }

    /// Advances psi from absolute time t0 to t1 (schedule point s = t / t_scale).
    void advance(std::vector<std::complex<double>>& y, double t0, double t1) {
        double t = t0;
        if (fresh_) {
            rhs(t, y, k1_);
            fresh_ = false;
        }
        long steps = 0;
        while (t < t1) {
            const double h = std::min(step_, t1 - t);
            const auto [err, radial] = try_step(t, h, y);
            const double radial_err = radial / (radial_rate_ * h + radial_floor_);
            if (err <= 1.0 && radial_err <= 1.0) {
                t += h;
                y.swap(ynew_);
                k1_.swap(k7_); // first-same-as-last
                step_ = h * std::min(factor(err), radial_factor(radial_err));
            } else {
                step_ = h * std::max(std::min(factor(err), radial_factor(radial_err)), 0.2);
                if (step_ < 1e-12) {
                    throw IntegrationError("evolve: step size underflow at t=" + std::to_string(t) +
                                           " err=" + std::to_string(err) +
                                           " radial_err=" + std::to_string(radial_err));
                }
            }
            if (++steps > 200'000'000L) throw IntegrationError("evolve: step limit exceeded");
        }
    }

private:
    static double factor(double err) {
        if (err < 1e-10) return 5.0;
        return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    }

    // The norm defect of one step scales like h^6, so h^5 against the rate.
    static double radial_factor(double radial_err) {
        if (radial_err < 1e-10) return 5.0;
        return std::clamp(0.9 * std::pow(radial_err, -0.2), 0.2, 5.0);
    }

    void rhs(double t, const std::vector<std::complex<double>>& y,
             std::vector<std::complex<double>>& out) const {
        prop_.derivative(t / t_scale_, y, out);
    }

    // One trial step of size h from t; fills ynew_ and k2_..k7_, returns the
    // scaled error estimate (per real component, as for a 2*dim real system)
    // and the norm^2 defect.
    std::pair<double, double> try_step(double t, double h, const std::vector<std::complex<double>>& y) {
        const std::size_t n2 = 2 * y.size();
        const double* yd = reinterpret_cast<const double*>(y.data());
        const auto dp = [](std::vector<std::complex<double>>& v) {
            return reinterpret_cast<double*>(v.data());
        };
        double* k1 = dp(k1_);
        double* k3 = dp(k3_);
        double* k4 = dp(k4_);
        double* k5 = dp(k5_);
        double* k6 = dp(k6_);
        double* k7 = dp(k7_);
        double* tm = dp(tmp_);
        double* yn = dp(ynew_);
        {
            const double w1 = h / 5.0;
            for (std::size_t d = 0; d < n2; ++d) tm[d] = yd[d] + w1 * k1[d];
            rhs(t + h / 5.0, tmp_, k2_);
        }
        {
            const double* k2 = dp(k2_);
            const double w1 = h * (3.0 / 40), w2 = h * (9.0 / 40);
            for (std::size_t d = 0; d < n2; ++d) tm[d] = yd[d] + w1 * k1[d] + w2 * k2[d];
            rhs(t + h * (3.0 / 10), tmp_, k3_);
        }
        {
            const double* k2 = dp(k2_);
            const double w1 = h * (44.0 / 45), w2 = h * (-56.0 / 15), w3 = h * (32.0 / 9);
            for (std::size_t d = 0; d < n2; ++d) tm[d] = yd[d] + w1 * k1[d] + w2 * k2[d] + w3 * k3[d];
            rhs(t + h * (4.0 / 5), tmp_, k4_);
        }
        {
            const double* k2 = dp(k2_);
            const double w1 = h * (19372.0 / 6561), w2 = h * (-25360.0 / 2187),
                         w3 = h * (64448.0 / 6561), w4 = h * (-212.0 / 729);
            for (std::size_t d = 0; d < n2; ++d) {
                tm[d] = yd[d] + w1 * k1[d] + w2 * k2[d] + w3 * k3[d] + w4 * k4[d];
            }
            rhs(t + h * (8.0 / 9), tmp_, k5_);
        }
        {
            const double* k2 = dp(k2_);
            const double w1 = h * (9017.0 / 3168), w2 = h * (-355.0 / 33), w3 = h * (46732.0 / 5247),
                         w4 = h * (49.0 / 176), w5 = h * (-5103.0 / 18656);
            for (std::size_t d = 0; d < n2; ++d) {
                tm[d] = yd[d] + w1 * k1[d] + w2 * k2[d] + w3 * k3[d] + w4 * k4[d] + w5 * k5[d];
            }
            rhs(t + h, tmp_, k6_);
        }
        {
            const double b1 = h * (35.0 / 384), b3 = h * (500.0 / 1113), b4 = h * (125.0 / 192),
                         b5 = h * (-2187.0 / 6784), b6 = h * (11.0 / 84);
            for (std::size_t d = 0; d < n2; ++d) {
                yn[d] = yd[d] + b1 * k1[d] + b3 * k3[d] + b4 * k4[d] + b5 * k5[d] + b6 * k6[d];
            }
            rhs(t + h, ynew_, k7_);
        }
        constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                         e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                         e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
        double err_sum = 0.0;
        double norm_old = 0.0;
        double norm_new = 0.0;
        for (std::size_t d = 0; d < n2; ++d) {
            const double e =
                h * (e1 * k1[d] + e3 * k3[d] + e4 * k4[d] + e5 * k5[d] + e6 * k6[d] + e7 * k7[d]);
            const double sc = atol_ + rtol_ * std::max(std::abs(yd[d]), std::abs(yn[d]));
            err_sum += (e / sc) * (e / sc);
            norm_old += yd[d] * yd[d];
            norm_new += yn[d] * yn[d];
        }
        return {std::sqrt(err_sum / static_cast<double>(n2)), std::abs(norm_new - norm_old)};
    }

    const Propagator& prop_;
    double t_scale_;
    double rtol_;
    double atol_;
    double radial_rate_;
    double radial_floor_;
    double step_;
    bool fresh_;
    std::vector<std::complex<double>> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
};

} // namespace detail

/// H(s) psi, matrix-free: diagonal part from a precomputed basis-energy table,
/// transverse part by single-bit-flip gathering.
inline WaveState apply_hamiltonian(const IsingModel& model, const std::vector<double>& delta,
                                   double s, const WaveState& psi) {
    if (psi.spin_count != model.spin_count() ||
        psi.amplitudes.size() != (std::size_t{1} << model.spin_count())) {
        throw InvalidArgument("apply_hamiltonian: state dimension mismatch");
    }
    const detail::Propagator prop(model, delta);
    WaveState out;
    out.spin_count = psi.spin_count;
    out.amplitudes.resize(psi.amplitudes.size());
    prop.apply(s, psi.amplitudes, out.amplitudes);
    return out;
}

/// Integrates i d/dt psi = H(s(t)) psi from the uniform superposition over
/// t in [0, T], in unit-time segments with an adaptive RK45 inside each
/// segment. Norm drift beyond 1e-6 at a segment boundary raises
/// IntegrationError rather than being renormalized away.
inline WaveState evolve(const IsingModel& model, const AnnealSchedule& sched, double tol = 1e-8) {
    if (model.spin_count() > 20) throw CapacityError("evolve: M > 20");
    if (sched.total_time < 1) throw InvalidArgument("evolve: T >= 1 required");
    if (static_cast<int>(sched.delta.size()) != model.spin_count()) {
        throw InvalidArgument("evolve: delta length != spin count");
    }
    if (!(tol > 0)) throw InvalidArgument("evolve: tolerance must be positive");
    const detail::Propagator prop(model, sched.delta, /*center=*/true);
    detail::Dopri5 integrator(prop, static_cast<double>(sched.total_time), tol);
    WaveState psi = WaveState::uniform(model.spin_count());
    for (std::int64_t seg = 0; seg < sched.total_time; ++seg) {
        integrator.advance(psi.amplitudes, static_cast<double>(seg), static_cast<double>(seg + 1));
        const double drift = std::abs(psi.norm() - 1.0);
        if (drift > 1e-6) {
            throw IntegrationError("evolve: norm drift " + std::to_string(drift) + " at t=" +
                                   std::to_string(seg + 1));
        }
    }
    return psi;
}

enum class ProbabilityConvention { SquaredNorm, PlainNorm };

/// Success projector: basis states whose chooser bits form a minimum-size
/// valid pair cover, auxiliary bits unconstrained.
struct SuccessSpec {
    int spin_count = 0;
    int chooser_count = 0;
    std::vector<std::uint32_t> patterns; // sorted optimal chooser-bit patterns
    ProbabilityConvention convention = ProbabilityConvention::SquaredNorm;

    static SuccessSpec for_instance(const ScpInstance& inst, const VariableLayout& layout,
                                    ProbabilityConvention convention = ProbabilityConvention::SquaredNorm) {
        SuccessSpec spec;
        spec.spin_count = layout.spin_count();
        spec.chooser_count = layout.cover_count();
        spec.convention = convention;
        for (const CoverSolution& cover : all_minimum_covers(inst)) {
            std::uint32_t bits = 0;
            for (int i : cover.chosen) bits |= 1u << (i - 1);
            spec.patterns.push_back(bits);
        }
        std::sort(spec.patterns.begin(), spec.patterns.end());
        return spec;
    }
};

inline double success_probability(const WaveState& psi, const SuccessSpec& spec) {
    if (spec.patterns.empty()) {
        throw InfeasibleError("success_probability: empty projector support");
    }
    if (psi.spin_count != spec.spin_count) {
        throw InvalidArgument("success_probability: state/spec dimension mismatch");
    }
    const int aux_bits = spec.spin_count - spec.chooser_count;
    double sum = 0.0;
    for (std::uint32_t pattern : spec.patterns) {
        for (std::uint64_t aux = 0; aux < (std::uint64_t{1} << aux_bits); ++aux) {
            const std::uint64_t b = pattern | (aux << spec.chooser_count);
            sum += std::norm(psi.amplitudes[b]);
        }
    }
    return spec.convention == ProbabilityConvention::SquaredNorm ? sum : std::sqrt(sum);
}

struct AnnealTimeResult {
    bool found = false;
    std::int64_t t_star = 0;
    double p_at_t_star = 0.0;
    std::int64_t best_t = 0; // highest-p probe, reported when the target is unreachable
    double best_p = 0.0;
    std::vector<std::pair<std::int64_t, double>> probes; // (T, p) in search order
};

/// Exponential bracketing T = 1, 2, 4, ... capped at t_max, then integer
/// binary search. Guarantees p(T*) >= target and p(T*-1) < target along the
/// probe path (p is not assumed monotone).
inline AnnealTimeResult find_min_anneal_time(const std::function<double(std::int64_t)>& p_of_t,
                                             double target, std::int64_t t_max) {
    if (!(target > 0.0 && target < 1.0)) {
        throw InvalidArgument("find_min_anneal_time: target must be in (0,1)");
    }
    if (t_max < 1) throw InvalidArgument("find_min_anneal_time: t_max >= 1 required");
    AnnealTimeResult result;
    const auto probe = [&](std::int64_t t) {
        const double p = p_of_t(t);
        if (result.probes.empty() || p > result.best_p) {
            result.best_p = p;
            result.best_t = t;
        }
        result.probes.emplace_back(t, p);
        return p;
    };
    std::int64_t lo = 0; // probed with p < target (0 = virtual "T=0" probe)
    std::int64_t hi = 1;
    double p_hi = probe(hi);
    while (p_hi < target) {
        if (hi >= t_max) return result; // not found; best seen is in the result
        lo = hi;
        hi = std::min(hi * 2, t_max);
        p_hi = probe(hi);
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (probe(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.found = true;
    result.t_star = hi;
    for (auto it = result.probes.rbegin(); it != result.probes.rend(); ++it) {
        if (it->first == hi) {
            result.p_at_t_star = it->second;
            break;
        }
    }
    return result;
}

inline AnnealTimeResult find_min_anneal_time(const IsingModel& model, const SuccessSpec& spec,
                                             double target = 0.25, std::int64_t t_max = 4096,
                                             double tol = 1e-8) {
    return find_min_anneal_time(
        [&](std::int64_t t) {
            return success_probability(evolve(model, AnnealSchedule::for_model(model, t), tol), spec);
        },
        target, t_max);
}

} // namespace paircover
