#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/ising.hpp"
#include "paircover/rational.hpp"
#include "paircover/scp.hpp"

namespace paircover {

/// Identity of one spin in the reduction: a chooser s_i, a pair indicator
/// t_ij^(k), or an OR-chain auxiliary x_j^(k).
struct SpinLabel {
    enum class Kind { Chooser, PairIndicator, OrAux };

    Kind kind = Kind::Chooser;
    int i = 0;      // chooser index, or first pair member
    int j = 0;      // second pair member (PairIndicator) / aux position (OrAux)
    int ground = 0; // k for PairIndicator and OrAux

    std::string to_string() const {
        switch (kind) {
        case Kind::Chooser:
            return "s" + std::to_string(i);
        case Kind::PairIndicator:
            return "t" + std::to_string(i) + "-" + std::to_string(j) + "^" + std::to_string(ground);
        case Kind::OrAux:
            return "x" + std::to_string(j) + "^" + std::to_string(ground);
        }
        return {};
    }

    friend bool operator==(const SpinLabel&, const SpinLabel&) = default;
};

/// Bijection between spin indices and reduction variables. Spins are laid out
/// as s_1..s_m, then the t blocks per ground element (pairs in lexicographic
/// order), then the x blocks per ground element.
class VariableLayout {
public:
    VariableLayout() = default;
    VariableLayout(int cover_count, const PairCoverMap& map) : m_(cover_count) {
        const int n = static_cast<int>(map.pairs_by_ground.size());
        for (int i = 1; i <= m_; ++i) {
            labels_.push_back({SpinLabel::Kind::Chooser, i, 0, 0});
        }
        t_base_.assign(static_cast<std::size_t>(n), 0);
        for (int k = 1; k <= n; ++k) {
            t_base_[static_cast<std::size_t>(k - 1)] = static_cast<int>(labels_.size());
            for (const auto& [a, b] : map.pairs_by_ground[static_cast<std::size_t>(k - 1)]) {
                labels_.push_back({SpinLabel::Kind::PairIndicator, a, b, k});
            }
        }
        x_base_.assign(static_cast<std::size_t>(n), 0);
        for (int k = 1; k <= n; ++k) {
            x_base_[static_cast<std::size_t>(k - 1)] = static_cast<int>(labels_.size());
            const int aux = std::max(map.r(k) - 1, 0);
            for (int j = 1; j <= aux; ++j) {
                labels_.push_back({SpinLabel::Kind::OrAux, 0, j, k});
            }
        }
    }

    int spin_count() const { return static_cast<int>(labels_.size()); }
    int cover_count() const { return m_; }
    const SpinLabel& label(int spin) const { return labels_.at(static_cast<std::size_t>(spin)); }
    const std::vector<SpinLabel>& labels() const { return labels_; }

    int chooser_spin(int i) const { return i - 1; }

    /// Spin of the `index`-th covering pair (1-based) of ground element k.
    int pair_spin(int k, int index) const {
        return t_base_.at(static_cast<std::size_t>(k - 1)) + index - 1;
    }

    /// Spin of x_j^(k).
    int aux_spin(int k, int j) const {
        return x_base_.at(static_cast<std::size_t>(k - 1)) + j - 1;
    }

private:
    int m_ = 0;
    std::vector<SpinLabel> labels_;
    std::vector<int> t_base_;
    std::vector<int> x_base_;
};

struct ReductionConfig {
    Rational alpha{1, 4};   // weight of the target term
    bool enforce_top = true; // include the x_{N_k-1} = 1 penalty

    void validate() const {
        if (!(alpha > Rational(0) && alpha < Rational(1))) {
            throw InvalidArgument("ReductionConfig: alpha must be in (0, 1)");
        }
    }
};

/// One diagonal penalty operator, written out as exact field/coupling/constant
/// contributions over named spins.
struct GadgetTerms {
    std::vector<std::pair<int, Rational>> fields;
    std::vector<std::tuple<int, int, Rational>> couplings;
    Rational constant{0};

    void add_to(IsingModel& model) const {
        for (const auto& [spin, value] : fields) model.add_field(spin, value);
        for (const auto& [a, b, value] : couplings) model.add_coupling(a, b, value);
        model.add_offset(constant);
    }

    /// Exact energy on an assignment addressed by spin index.
    Rational energy(std::span<const int> s) const {
        const auto parity = [&s](int spin) {
            return Rational(1 - 2 * s[static_cast<std::size_t>(spin)]);
        };
        Rational e = constant;
        for (const auto& [spin, value] : fields) e += value * parity(spin);
        for (const auto& [a, b, value] : couplings) e += value * parity(a) * parity(b);
        return e;
    }
};

namespace detail {

inline void require_distinct(std::initializer_list<int> spins) {
    for (auto a = spins.begin(); a != spins.end(); ++a) {
        for (auto b = a + 1; b != spins.end(); ++b) {
            if (*a == *b) throw InvalidArgument("gadget: repeated spin index");
        }
    }
}

} // namespace detail

/// H_or: zero exactly on assignments with a | b == out, at least 1 otherwise.
///   (1/4) (3 - z_a - z_b + 2 z_out + z_a z_b - 2 z_a z_out - 2 z_b z_out)
inline GadgetTerms gadget_or(int a, int b, int out) {
    detail::require_distinct({a, b, out});
    GadgetTerms g;
    g.constant = Rational(3, 4);
    g.fields = {{a, Rational(-1, 4)}, {b, Rational(-1, 4)}, {out, Rational(1, 2)}};
    g.couplings = {{a, b, Rational(1, 4)}, {a, out, Rational(-1, 2)}, {b, out, Rational(-1, 2)}};
    return g;
}

/// H_and: zero exactly on assignments with a & b == out.
///   (1/4) (4 + z_a + z_b - 2 z_out + 2 z_a z_b - 3 z_a z_out - 3 z_b z_out)
inline GadgetTerms gadget_and(int a, int b, int out) {
    detail::require_distinct({a, b, out});
    GadgetTerms g;
    g.constant = Rational(1);
    g.fields = {{a, Rational(1, 4)}, {b, Rational(1, 4)}, {out, Rational(-1, 2)}};
    g.couplings = {{a, b, Rational(1, 2)}, {a, out, Rational(-3, 4)}, {b, out, Rational(-3, 4)}};
    return g;
}

/// H_leq = |10><10|: energy 1 on (a,b) = (1,0), zero elsewhere.
///   (1/4) (1 - z_a + z_b - z_a z_b)
inline GadgetTerms gadget_leq(int a, int b) {
    detail::require_distinct({a, b});
    GadgetTerms g;
    g.constant = Rational(1, 4);
    g.fields = {{a, Rational(-1, 4)}, {b, Rational(1, 4)}};
    g.couplings = {{a, b, Rational(-1, 4)}};
    return g;
}

/// |0><0|: energy 1 when the spin is 0. Enforces "this variable must be 1".
inline GadgetTerms penalty_zero(int spin) {
    GadgetTerms g;
    g.constant = Rational(1, 2);
    g.fields = {{spin, Rational(1, 2)}};
    return g;
}

/// |1><1|: energy 1 when the spin is 1. Building block of the target term.
inline GadgetTerms penalty_one(int spin) {
    GadgetTerms g;
    g.constant = Rational(1, 2);
    g.fields = {{spin, Rational(-1, 2)}};
    return g;
}

/// Assembles H_scp = alpha * sum_i |1><1|_{s_i}  +  sum_k H_k  +  sum H_leq pairs.
///
/// Per ground element k with covering pairs t_1..t_N (canonical order):
///   H_k = H_or(t_1, t_2, x_1) + sum_{j=2}^{N-1} H_or(x_{j-1}, t_{j+1}, x_j)
///         + |0><0| on x_{N-1},
/// the last term only when cfg.enforce_top. The degenerate N = 1 places the
/// |0><0| penalty directly on the lone t variable (the chain's N = 1 limit).
/// Every t_ij^(k) also gets H_leq(t, s_i) + H_leq(t, s_j).
inline std::pair<IsingModel, VariableLayout> reduce(const ScpInstance& inst,
                                                    const ReductionConfig& cfg = {}) {
    cfg.validate();
    const PairCoverMap map = pair_cover_map(inst);
    for (int k = 1; k <= inst.ground_count(); ++k) {
        if (map.r(k) == 0) {
            throw InfeasibleError("reduce: ground element c" + std::to_string(k) +
                                  " has no covering pair");
        }
    }
    VariableLayout layout(inst.cover_count(), map);
    IsingModel model(layout.spin_count());

    for (int i = 1; i <= inst.cover_count(); ++i) {
        GadgetTerms target = penalty_one(layout.chooser_spin(i));
        for (auto& [spin, value] : target.fields) value *= cfg.alpha;
        target.constant *= cfg.alpha;
        target.add_to(model);
    }

    for (int k = 1; k <= inst.ground_count(); ++k) {
        const auto& pairs = map.pairs_by_ground[static_cast<std::size_t>(k - 1)];
        const int count = static_cast<int>(pairs.size());
        for (int index = 1; index <= count; ++index) {
            const auto& [a, b] = pairs[static_cast<std::size_t>(index - 1)];
            const int t = layout.pair_spin(k, index);
            gadget_leq(t, layout.chooser_spin(a)).add_to(model);
            gadget_leq(t, layout.chooser_spin(b)).add_to(model);
        }
        if (count == 1) {
            if (cfg.enforce_top) penalty_zero(layout.pair_spin(k, 1)).add_to(model);
            continue;
        }
        gadget_or(layout.pair_spin(k, 1), layout.pair_spin(k, 2), layout.aux_spin(k, 1))
            .add_to(model);
        for (int j = 2; j <= count - 1; ++j) {
            gadget_or(layout.aux_spin(k, j - 1), layout.pair_spin(k, j + 1), layout.aux_spin(k, j))
                .add_to(model);
        }
        if (cfg.enforce_top) penalty_zero(layout.aux_spin(k, count - 1)).add_to(model);
    }
    return {std::move(model), std::move(layout)};
}

/// Reads the chosen cover off the chooser bits.
inline CoverSolution decode(const VariableLayout& layout, const std::vector<int>& s) {
    if (static_cast<int>(s.size()) != layout.spin_count()) {
        throw InvalidArgument("decode: assignment length != spin count");
    }
    CoverSolution cover;
    for (int i = 1; i <= layout.cover_count(); ++i) {
        if (s[static_cast<std::size_t>(layout.chooser_spin(i))]) cover.chosen.push_back(i);
    }
    return cover;
}

inline CoverSolution decode_packed(const VariableLayout& layout, std::uint32_t bits) {
    std::vector<int> s(static_cast<std::size_t>(layout.spin_count()));
    for (int i = 0; i < layout.spin_count(); ++i) s[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    return decode(layout, s);
}

} // namespace paircover
