#pragma once

// Test-only oracles, kept independent of the library's fast paths: dense
// Hamiltonians assembled from Pauli actions and a midpoint matrix-exponential
// stepper for reference evolutions.

#include <complex>
#include <vector>

#include "paircover/ising.hpp"
#include "paircover/qa.hpp"
#include "paircover/scp.hpp"

namespace testutil {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<cplx>>;

/// The Fig. 2 instance: U = {c1, c2}, S = {f1..f4}, optimum {f1, f4}.
inline paircover::ScpInstance worked_instance() {
    return paircover::ScpInstance(2, 4, {{1, 1}, {2, 1}, {4, 1}, {1, 2}, {3, 2}, {4, 2}});
}

inline Matrix zeros(std::size_t dim) { return Matrix(dim, std::vector<cplx>(dim)); }

/// Dense transverse part sum_i delta_i X_i (X_i flips bit i).
inline Matrix dense_transverse(int spins, const std::vector<double>& delta) {
    const std::size_t dim = std::size_t{1} << spins;
    Matrix h = zeros(dim);
    for (int i = 0; i < spins; ++i) {
        for (std::size_t b = 0; b < dim; ++b) {
            h[b ^ (std::size_t{1} << i)][b] += delta[static_cast<std::size_t>(i)];
        }
    }
    return h;
}

/// Dense diagonal part sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j (Z_i has
/// eigenvalue 1 - 2 bit_i).
inline Matrix dense_diagonal(const paircover::IsingModel& model) {
    const std::size_t dim = std::size_t{1} << model.spin_count();
    const auto z = [](std::size_t b, int i) { return 1.0 - 2.0 * ((b >> i) & 1u); };
    Matrix h = zeros(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        double e = paircover::to_double(model.offset());
        for (int i = 0; i < model.spin_count(); ++i) {
            e += paircover::to_double(model.field(i)) * z(b, i);
        }
        for (const auto& [key, j] : model.couplings()) {
            e += paircover::to_double(j) * z(b, key.first) * z(b, key.second);
        }
        h[b][b] = e;
    }
    return h;
}

inline Matrix combine(const Matrix& a, double wa, const Matrix& b, double wb) {
    Matrix out = zeros(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a.size(); ++c) out[r][c] = wa * a[r][c] + wb * b[r][c];
    }
    return out;
}

inline std::vector<cplx> matvec(const Matrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
        cplx acc{};
        for (std::size_t c = 0; c < v.size(); ++c) acc += m[r][c] * v[c];
        out[r] = acc;
    }
    return out;
}

/// exp(-i H dt) v by the Taylor series, iterated until the term underflows.
inline std::vector<cplx> expm_apply(const Matrix& h, std::vector<cplx> v, double dt) {
    std::vector<cplx> term = v;
    for (int k = 1; k <= 40; ++k) {
        term = matvec(h, term);
        const cplx factor = cplx(0.0, -dt) / static_cast<double>(k);
        double magnitude = 0.0;
        for (auto& t : term) {
            t *= factor;
            magnitude += std::norm(t);
        }
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += term[i];
        if (magnitude < 1e-34) break;
    }
    return v;
}

/// Reference anneal: midpoint matrix-exponential stepping at fixed dt from
/// the uniform superposition.
inline std::vector<cplx> evolve_dense(const paircover::IsingModel& model,
                                      const std::vector<double>& delta, long long total_time,
                                      double dt = 1e-3) {
    const std::size_t dim = std::size_t{1} << model.spin_count();
    const Matrix hx = dense_transverse(model.spin_count(), delta);
    const Matrix hz = dense_diagonal(model);
    std::vector<cplx> psi(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    const long long steps = std::llround(static_cast<double>(total_time) / dt);
    for (long long step = 0; step < steps; ++step) {
        const double s = (static_cast<double>(step) + 0.5) * dt / static_cast<double>(total_time);
        psi = expm_apply(combine(hx, 1.0 - s, hz, s), std::move(psi), dt);
    }
    return psi;
}

/// |<a|b>|^2; global phases drop out.
inline double fidelity(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx inner{};
    for (std::size_t i = 0; i < a.size(); ++i) inner += std::conj(a[i]) * b[i];
    return std::norm(inner);
}

} // namespace testutil
