#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/rng.hpp"

namespace paircover {

/// Set-Cover-with-Pairs instance: a bipartite graph between ground elements
/// c_1..c_n and cover elements f_1..f_m. Edges are 1-based (cover, ground)
/// pairs, deduplicated and kept sorted by (cover, ground).
class ScpInstance {
public:
    ScpInstance(int ground_count, int cover_count, std::vector<std::pair<int, int>> edges)
        : n_(ground_count), m_(cover_count), edges_(std::move(edges)) {
        if (n_ < 0 || m_ < 0) {
            throw InvalidArgument("ScpInstance: negative set size");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        ground_adj_.assign(static_cast<std::size_t>(n_) + 1, {});
        cover_adj_.assign(static_cast<std::size_t>(m_) + 1, {});
        for (const auto& [cover, ground] : edges_) {
            if (cover < 1 || cover > m_ || ground < 1 || ground > n_) {
                throw InvalidArgument("ScpInstance: edge (" + std::to_string(cover) + "," +
                                      std::to_string(ground) + ") out of range");
            }
            ground_adj_[static_cast<std::size_t>(ground)].push_back(cover);
            cover_adj_[static_cast<std::size_t>(cover)].push_back(ground);
        }
    }

    int ground_count() const { return n_; }
    int cover_count() const { return m_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Cover elements adjacent to ground element k (ascending).
    const std::vector<int>& neighbors_of_ground(int k) const {
        if (k < 1 || k > n_) throw InvalidArgument("ground index out of range");
        return ground_adj_[static_cast<std::size_t>(k)];
    }

    /// Ground elements adjacent to cover element i (ascending).
    const std::vector<int>& neighbors_of_cover(int i) const {
        if (i < 1 || i > m_) throw InvalidArgument("cover index out of range");
        return cover_adj_[static_cast<std::size_t>(i)];
    }

    bool has_edge(int cover, int ground) const {
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(cover, ground));
    }

    /// True when every cover element touches at least one ground element.
    bool dummy_free() const {
        for (int i = 1; i <= m_; ++i) {
            if (cover_adj_[static_cast<std::size_t>(i)].empty()) return false;
        }
        return true;
    }

private:
    int n_;
    int m_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> ground_adj_;
    std::vector<std::vector<int>> cover_adj_;
};

struct CoverSolution {
    std::vector<int> chosen; // ascending cover indices
    int size() const { return static_cast<int>(chosen.size()); }
};

/// For each ground element k, the covering pairs {i,j} (i<j, lexicographic) and
/// their count r_k; and for each pair, the set Q_ij of ground elements it covers.
struct PairCoverMap {
    std::vector<std::vector<std::pair<int, int>>> pairs_by_ground; // index k-1
    std::map<std::pair<int, int>, std::vector<int>> q;             // {i,j} -> sorted grounds

    int r(int ground_k) const {
        return static_cast<int>(pairs_by_ground.at(static_cast<std::size_t>(ground_k - 1)).size());
    }
};

inline PairCoverMap pair_cover_map(const ScpInstance& inst) {
    PairCoverMap map;
    map.pairs_by_ground.resize(static_cast<std::size_t>(inst.ground_count()));
    for (int k = 1; k <= inst.ground_count(); ++k) {
        const auto& covers = inst.neighbors_of_ground(k);
        auto& pairs = map.pairs_by_ground[static_cast<std::size_t>(k - 1)];
        for (std::size_t a = 0; a < covers.size(); ++a) {
            for (std::size_t b = a + 1; b < covers.size(); ++b) {
                pairs.emplace_back(covers[a], covers[b]);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        for (const auto& pair : pairs) {
            map.q[pair].push_back(k);
        }
    }
    return map;
}

/// True iff every ground element has two distinct members of `cover` adjacent to it.
inline bool verify_cover(const ScpInstance& inst, const CoverSolution& cover) {
    std::vector<char> in_cover(static_cast<std::size_t>(inst.cover_count()) + 1, 0);
    for (int i : cover.chosen) {
        if (i < 1 || i > inst.cover_count()) {
            throw InvalidArgument("verify_cover: cover index " + std::to_string(i) + " out of range");
        }
        in_cover[static_cast<std::size_t>(i)] = 1;
    }
    for (int k = 1; k <= inst.ground_count(); ++k) {
        int adjacent_chosen = 0;
        for (int i : inst.neighbors_of_ground(k)) {
            if (in_cover[static_cast<std::size_t>(i)] && ++adjacent_chosen == 2) break;
        }
        if (adjacent_chosen < 2) return false;
    }
    return true;
}

namespace detail {

// Per-ground bitmask over cover indices (bit i-1 = f_i); needs m <= 24.
inline std::vector<std::uint32_t> ground_cover_masks(const ScpInstance& inst) {
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(inst.ground_count()), 0);
    for (int k = 1; k <= inst.ground_count(); ++k) {
        for (int i : inst.neighbors_of_ground(k)) {
            masks[static_cast<std::size_t>(k - 1)] |= 1u << (i - 1);
        }
    }
    return masks;
}

inline bool subset_covers(std::uint32_t subset, const std::vector<std::uint32_t>& masks) {
    for (std::uint32_t mask : masks) {
        if (std::popcount(subset & mask) < 2) return false;
    }
    return true;
}

inline std::vector<int> subset_to_indices(std::uint32_t subset) {
    std::vector<int> indices;
    for (int i = 0; subset != 0; ++i, subset >>= 1) {
        if (subset & 1u) indices.push_back(i + 1);
    }
    return indices;
}

// All size-r index subsets of 1..m in lexicographic order of their sorted
// index lists, invoking fn(mask) for each; fn returns false to keep going.
template <typename Fn>
inline void for_each_combination(int m, int r, Fn&& fn) {
    std::vector<int> combo(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) combo[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        std::uint32_t mask = 0;
        for (int i : combo) mask |= 1u << (i - 1);
        if (fn(mask)) return;
        int pos = r - 1;
        while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == m - (r - 1 - pos)) --pos;
        if (pos < 0) return;
        ++combo[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < r; ++i) {
            combo[static_cast<std::size_t>(i)] = combo[static_cast<std::size_t>(i - 1)] + 1;
        }
    }
}

} // namespace detail

/// Exhaustive minimum pair cover; ties broken toward the lexicographically
/// smallest index list. Throws InfeasibleError when no subset covers U and
/// CapacityError for m > 24.
inline CoverSolution solve_exact(const ScpInstance& inst) {
    if (inst.cover_count() > 24) {
        throw CapacityError("solve_exact: m > 24");
    }
    if (inst.ground_count() == 0) {
        return CoverSolution{};
    }
    const auto masks = detail::ground_cover_masks(inst);
    for (int size = 0; size <= inst.cover_count(); ++size) {
        std::uint32_t found = 0;
        bool any = false;
        detail::for_each_combination(inst.cover_count(), size, [&](std::uint32_t subset) {
            if (detail::subset_covers(subset, masks)) {
                found = subset;
                any = true;
                return true;
            }
            return false;
        });
        if (any) {
            return CoverSolution{detail::subset_to_indices(found)};
        }
    }
    throw InfeasibleError("solve_exact: no pair cover exists");
}

/// Every minimum-size cover, in lexicographic order. Same bounds as solve_exact.
inline std::vector<CoverSolution> all_minimum_covers(const ScpInstance& inst) {
    const CoverSolution best = solve_exact(inst);
    if (inst.ground_count() == 0) {
        return {best};
    }
    const auto masks = detail::ground_cover_masks(inst);
    std::vector<CoverSolution> covers;
    detail::for_each_combination(inst.cover_count(), best.size(), [&](std::uint32_t subset) {
        if (detail::subset_covers(subset, masks)) {
            covers.push_back(CoverSolution{detail::subset_to_indices(subset)});
        }
        return false;
    });
    return covers;
}

/// Uniform sample over the (2^n - 1)^m dummy-free bipartite graphs: each cover
/// element redraws its own row of n fair coins until nonempty.
inline ScpInstance gen_random_dummy_free(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 1) {
        throw InvalidArgument("gen_random_dummy_free: need n >= 1 and m >= 1");
    }
    auto rng = seeded_engine(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= m; ++i) {
        std::vector<int> row;
        do {
            row.clear();
            for (int k = 1; k <= n; ++k) {
                if (rand_coin(rng)) row.push_back(k);
            }
        } while (row.empty());
        for (int k : row) edges.emplace_back(i, k);
    }
    return ScpInstance(n, m, std::move(edges));
}

} // namespace paircover
