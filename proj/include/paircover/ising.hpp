#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/rational.hpp"

namespace paircover {

/// Diagonal Ising Hamiltonian with exact rational coefficients. The operator
/// energy of a 0/1 assignment s is
///
///     E(s) = sum_i h_i p_i + sum_{i<j} J_ij p_i p_j + offset,   p = 1 - 2s,
///
/// which matches the h^T p + p^T J p convention where the dense matrix J holds
/// J_ij / 2 in both triangles. The offset carries identity terms dropped from
/// the penalty operators so satisfied gadgets evaluate to exactly zero.
class IsingModel {
public:
    explicit IsingModel(int spin_count = 0) : h_(static_cast<std::size_t>(spin_count)) {
        if (spin_count < 0) throw InvalidArgument("IsingModel: negative spin count");
    }

    int spin_count() const { return static_cast<int>(h_.size()); }
    const std::vector<Rational>& fields() const { return h_; }
    const std::map<std::pair<int, int>, Rational>& couplings() const { return j_; }
    Rational offset() const { return offset_; }

    Rational field(int i) const { return h_.at(static_cast<std::size_t>(i)); }

    Rational coupling(int i, int j) const {
        const auto it = j_.find(ordered(i, j));
        return it == j_.end() ? Rational(0) : it->second;
    }

    void add_field(int i, const Rational& value) {
        h_.at(static_cast<std::size_t>(i)) += value;
    }

    void add_coupling(int i, int j, const Rational& value) {
        if (i == j) throw InvalidArgument("IsingModel: diagonal coupling");
        check_spin(i);
        check_spin(j);
        const auto key = ordered(i, j);
        const Rational sum = j_[key] + value;
        if (sum == Rational(0)) {
            j_.erase(key);
        } else {
            j_[key] = sum;
        }
    }

    void add_offset(const Rational& value) { offset_ += value; }

    void scale(const Rational& lambda) {
        for (auto& h : h_) h *= lambda;
        for (auto& [key, j] : j_) j *= lambda;
        offset_ *= lambda;
    }

    /// Exact operator energy; |s| must equal the spin count.
    Rational energy(const std::vector<int>& s) const {
        if (static_cast<int>(s.size()) != spin_count()) {
            throw InvalidArgument("energy: assignment length != spin count");
        }
        Rational e = offset_;
        for (int i = 0; i < spin_count(); ++i) {
            e += h_[static_cast<std::size_t>(i)] * parity(s[static_cast<std::size_t>(i)]);
        }
        for (const auto& [key, j] : j_) {
            e += j * (parity(s[static_cast<std::size_t>(key.first)]) *
                      parity(s[static_cast<std::size_t>(key.second)]));
        }
        return e;
    }

    /// Energy of a bit-packed assignment (bit i = spin i); spin count <= 32.
    Rational energy_packed(std::uint32_t bits) const {
        std::vector<int> s(static_cast<std::size_t>(spin_count()));
        for (int i = 0; i < spin_count(); ++i) s[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        return energy(s);
    }

private:
    static std::pair<int, int> ordered(int i, int j) {
        return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
    }

    static int parity(int bit) { return 1 - 2 * bit; }

    void check_spin(int i) const {
        if (i < 0 || i >= spin_count()) throw InvalidArgument("IsingModel: spin index out of range");
    }

    std::vector<Rational> h_;
    std::map<std::pair<int, int>, Rational> j_; // keys (i, j) with i < j, values nonzero
    Rational offset_{0};
};

namespace detail {

/// Integer rescaling of a model: energies become exact int64 values
/// scaled_energy = energy * scale. Powers the exhaustive oracle, the SA inner
/// loop and the simulator's basis-energy table.
struct ScaledModel {
    std::int64_t scale = 1;
    std::int64_t offset = 0;
    std::vector<std::int64_t> h;
    std::vector<std::vector<std::pair<int, std::int64_t>>> adj; // per spin: (other, J*scale)

    explicit ScaledModel(const IsingModel& model) {
        std::int64_t lcm = model.offset().denominator();
        for (const auto& h : model.fields()) lcm = lcm_denominator(lcm, h);
        for (const auto& [key, j] : model.couplings()) lcm = lcm_denominator(lcm, j);
        scale = lcm;
        const auto scaled = [lcm](const Rational& r) {
            return r.numerator() * (lcm / r.denominator());
        };
        offset = scaled(model.offset());
        h.reserve(static_cast<std::size_t>(model.spin_count()));
        for (const auto& field : model.fields()) h.push_back(scaled(field));
        adj.assign(static_cast<std::size_t>(model.spin_count()), {});
        for (const auto& [key, j] : model.couplings()) {
            const std::int64_t value = scaled(j);
            adj[static_cast<std::size_t>(key.first)].emplace_back(key.second, value);
            adj[static_cast<std::size_t>(key.second)].emplace_back(key.first, value);
        }
    }

    int spin_count() const { return static_cast<int>(h.size()); }

    std::int64_t energy_of(const std::vector<std::int8_t>& p) const {
        std::int64_t e = offset;
        for (int i = 0; i < spin_count(); ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            e += h[ui] * p[ui];
            for (const auto& [other, j] : adj[ui]) {
                if (other > i) e += j * p[ui] * p[static_cast<std::size_t>(other)];
            }
        }
        return e;
    }

    /// Energy change of flipping spin i, given the current parity vector.
    std::int64_t flip_delta(const std::vector<std::int8_t>& p, int i) const {
        const std::size_t ui = static_cast<std::size_t>(i);
        std::int64_t local = h[ui];
        for (const auto& [other, j] : adj[ui]) {
            local += j * p[static_cast<std::size_t>(other)];
        }
        return -2 * p[ui] * local;
    }
};

} // namespace detail

struct GroundStates {
    Rational min_energy;
    std::vector<std::uint32_t> assignments; // ascending bit-packed minimizers
};

/// Exact minimum energy and every achieving assignment, by Gray-code
/// enumeration of all 2^M states with incremental integer energy updates.
inline GroundStates ground_states_exhaustive(const IsingModel& model) {
    const int m = model.spin_count();
    if (m > 24) throw CapacityError("ground_states_exhaustive: M > 24");
    const detail::ScaledModel scaled(model);
    if (m == 0) {
        return GroundStates{model.offset(), {0}};
    }
    std::vector<std::int8_t> p(static_cast<std::size_t>(m), 1);
    std::int64_t energy = scaled.energy_of(p);
    std::int64_t best = energy;
    std::uint32_t state = 0;
    std::vector<std::uint32_t> minimizers{0};
    const std::uint64_t total = 1ull << m;
    for (std::uint64_t v = 1; v < total; ++v) {
        const int bit = std::countr_zero(v);
        energy += scaled.flip_delta(p, bit);
        p[static_cast<std::size_t>(bit)] = static_cast<std::int8_t>(-p[static_cast<std::size_t>(bit)]);
        state ^= 1u << bit;
        if (energy < best) {
            best = energy;
            minimizers.assign(1, state);
        } else if (energy == best) {
            minimizers.push_back(state);
        }
    }
    std::sort(minimizers.begin(), minimizers.end());
    return GroundStates{Rational(best, scaled.scale), std::move(minimizers)};
}

} // namespace paircover
