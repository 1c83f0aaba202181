#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "paircover/errors.hpp"
#include "paircover/ising.hpp"
#include "paircover/reduce.hpp"
#include "paircover/scp.hpp"

namespace paircover {

/// One hardware qubit v_k^(row,col), all 1-based. k <= shore is the "vertical"
/// half of the cell (coupled to the cells above/below); k > shore is the
/// "horizontal" half (coupled to the cells left/right).
struct HwVertex {
    int row = 0;
    int col = 0;
    int k = 0;

    auto operator<=>(const HwVertex&) const = default;

    std::string to_string() const {
        return "(" + std::to_string(row) + "," + std::to_string(col) + "," + std::to_string(k) + ")";
    }
};

/// Chimera graph F(p, q, c): a p x q grid of K_{c,c} cells with shore-aligned
/// inter-cell couplers.
class ChimeraGraph {
public:
    ChimeraGraph(int rows, int cols, int shore) : rows_(rows), cols_(cols), shore_(shore) {
        if (rows < 1 || cols < 1 || shore < 1) {
            throw InvalidArgument("ChimeraGraph: dimensions must be >= 1");
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int shore() const { return shore_; }

    long long vertex_count() const { return 2LL * shore_ * rows_ * cols_; }

    long long edge_count() const {
        return static_cast<long long>(rows_) * cols_ * shore_ * shore_ +
               static_cast<long long>(shore_) * cols_ * (rows_ - 1) +
               static_cast<long long>(shore_) * rows_ * (cols_ - 1);
    }

    bool contains(const HwVertex& v) const {
        return v.row >= 1 && v.row <= rows_ && v.col >= 1 && v.col <= cols_ && v.k >= 1 &&
               v.k <= 2 * shore_;
    }

    bool adjacent(const HwVertex& u, const HwVertex& v) const {
        if (!contains(u) || !contains(v) || u == v) return false;
        if (u.row == v.row && u.col == v.col) {
            return (u.k <= shore_) != (v.k <= shore_); // in-cell complete bipartite
        }
        if (u.k != v.k) return false;
        if (u.k <= shore_) {
            return u.col == v.col && std::abs(u.row - v.row) == 1; // vertical coupler
        }
        return u.row == v.row && std::abs(u.col - v.col) == 1; // horizontal coupler
    }

    /// Neighbors in a fixed order: in-cell partners by ascending k, then the
    /// inter-cell coupler toward lower, then higher, row/column.
    std::vector<HwVertex> neighbors(const HwVertex& v) const {
        std::vector<HwVertex> out;
        if (!contains(v)) return out;
        if (v.k <= shore_) {
            for (int k = shore_ + 1; k <= 2 * shore_; ++k) out.push_back({v.row, v.col, k});
            if (v.row > 1) out.push_back({v.row - 1, v.col, v.k});
            if (v.row < rows_) out.push_back({v.row + 1, v.col, v.k});
        } else {
            for (int k = 1; k <= shore_; ++k) out.push_back({v.row, v.col, k});
            if (v.col > 1) out.push_back({v.row, v.col - 1, v.k});
            if (v.col < cols_) out.push_back({v.row, v.col + 1, v.k});
        }
        return out;
    }

    long long index(const HwVertex& v) const {
        return (static_cast<long long>(v.row - 1) * cols_ + (v.col - 1)) * 2 * shore_ + (v.k - 1);
    }

    std::vector<std::pair<HwVertex, HwVertex>> edges() const {
        std::vector<std::pair<HwVertex, HwVertex>> out;
        for (int row = 1; row <= rows_; ++row) {
            for (int col = 1; col <= cols_; ++col) {
                for (int a = 1; a <= shore_; ++a) {
                    for (int b = shore_ + 1; b <= 2 * shore_; ++b) {
                        out.push_back({{row, col, a}, {row, col, b}});
                    }
                    if (row < rows_) out.push_back({{row, col, a}, {row + 1, col, a}});
                }
                if (col < cols_) {
                    for (int b = shore_ + 1; b <= 2 * shore_; ++b) {
                        out.push_back({{row, col, b}, {row, col + 1, b}});
                    }
                }
            }
        }
        return out;
    }

private:
    int rows_;
    int cols_;
    int shore_;
};

inline ChimeraGraph chimera(int p, int q, int c) { return ChimeraGraph(p, q, c); }

struct LogicalGraph {
    std::vector<std::string> labels;
    std::set<std::pair<int, int>> edges; // (u, v) with u < v

    int vertex_count() const { return static_cast<int>(labels.size()); }

    void add_edge(int u, int v) {
        if (u == v) throw InvalidArgument("LogicalGraph: self loop");
        if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) {
            throw InvalidArgument("LogicalGraph: vertex out of range");
        }
        edges.insert(std::minmax(u, v));
    }
};

struct Embedding {
    std::vector<std::vector<HwVertex>> chains; // indexed by logical vertex
    std::map<std::pair<int, int>, std::pair<HwVertex, HwVertex>> realized;

    long long vertices_used() const {
        long long total = 0;
        for (const auto& chain : chains) total += static_cast<long long>(chain.size());
        return total;
    }
};

struct EmbeddingResult {
    LogicalGraph logical;
    ChimeraGraph target;
    Embedding embedding;
};

/// One vertex per spin, an edge per nonzero coupling.
inline LogicalGraph interaction_graph(const IsingModel& model) {
    LogicalGraph g;
    for (int i = 1; i <= model.spin_count(); ++i) g.labels.push_back("z" + std::to_string(i));
    for (const auto& [key, value] : model.couplings()) g.add_edge(key.first, key.second);
    return g;
}

inline LogicalGraph interaction_graph(const IsingModel& model, const VariableLayout& layout) {
    LogicalGraph g = interaction_graph(model);
    for (int i = 0; i < layout.spin_count(); ++i) {
        g.labels[static_cast<std::size_t>(i)] = layout.label(i).to_string();
    }
    return g;
}

struct VerifyResult {
    bool ok = false;
    std::string message; // names the first violated condition

    explicit operator bool() const { return ok; }
};

namespace detail {

/// First hardware coupler between two chains, scanning chain `a` in vertex
/// order so the choice is deterministic.
inline std::optional<std::pair<HwVertex, HwVertex>> find_coupler(const ChimeraGraph& hw,
                                                                 const std::vector<HwVertex>& a,
                                                                 const std::vector<HwVertex>& b) {
    const std::set<HwVertex> b_set(b.begin(), b.end());
    std::vector<HwVertex> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (const HwVertex& u : sorted) {
        for (const HwVertex& v : hw.neighbors(u)) {
            if (b_set.count(v)) return std::make_pair(u, v);
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Checks chain disjointness, per-chain connectivity inside the hardware
/// graph, and the existence of a hardware edge between the chains of every
/// logical edge. Violations come back as results, not exceptions.
inline VerifyResult verify_minor_embedding(const LogicalGraph& logical, const ChimeraGraph& hw,
                                           const Embedding& emb) {
    const auto label = [&](int v) {
        return v < logical.vertex_count() ? logical.labels[static_cast<std::size_t>(v)]
                                          : std::to_string(v);
    };
    if (static_cast<int>(emb.chains.size()) != logical.vertex_count()) {
        return {false, "chain-count: " + std::to_string(emb.chains.size()) + " chains for " +
                           std::to_string(logical.vertex_count()) + " vertices"};
    }
    std::map<HwVertex, int> owner;
    for (int v = 0; v < logical.vertex_count(); ++v) {
        const auto& chain = emb.chains[static_cast<std::size_t>(v)];
        if (chain.empty()) {
            return {false, "empty-chain: " + label(v)};
        }
        for (const HwVertex& u : chain) {
            if (!hw.contains(u)) {
                return {false, "invalid-vertex: " + label(v) + " at " + u.to_string()};
            }
            const auto [it, inserted] = owner.emplace(u, v);
            if (!inserted) {
                return {false, "chain-overlap: " + label(it->second) + " and " + label(v) + " at " +
                                   u.to_string()};
            }
        }
    }
    for (int v = 0; v < logical.vertex_count(); ++v) {
        const auto& chain = emb.chains[static_cast<std::size_t>(v)];
        const std::set<HwVertex> members(chain.begin(), chain.end());
        std::set<HwVertex> seen{*members.begin()};
        std::vector<HwVertex> frontier{*members.begin()};
        while (!frontier.empty()) {
            const HwVertex u = frontier.back();
            frontier.pop_back();
            for (const HwVertex& w : hw.neighbors(u)) {
                if (members.count(w) && !seen.count(w)) {
                    seen.insert(w);
                    frontier.push_back(w);
                }
            }
        }
        if (seen.size() != members.size()) {
            return {false, "chain-connectivity: " + label(v)};
        }
    }
    for (const auto& [u, v] : logical.edges) {
        if (!detail::find_coupler(hw, emb.chains[static_cast<std::size_t>(u)],
                                  emb.chains[static_cast<std::size_t>(v)])) {
            return {false, "missing-edge: " + label(u) + "--" + label(v)};
        }
    }
    for (const auto& [edge, coupler] : emb.realized) {
        const auto& [u, v] = edge;
        if (!logical.edges.count(edge)) {
            return {false, "realized-nonedge: " + label(u) + "--" + label(v)};
        }
        const auto& cu = emb.chains[static_cast<std::size_t>(u)];
        const auto& cv = emb.chains[static_cast<std::size_t>(v)];
        const bool endpoints_ok =
            std::find(cu.begin(), cu.end(), coupler.first) != cu.end() &&
            std::find(cv.begin(), cv.end(), coupler.second) != cv.end();
        if (!endpoints_ok || !hw.adjacent(coupler.first, coupler.second)) {
            return {false, "realized-edge: " + label(u) + "--" + label(v)};
        }
    }
    return {true, "ok"};
}

namespace detail {

inline int wrap(int x, int c) {
    int r = (x - 1) % c;
    if (r < 0) r += c;
    return r + 1;
}

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

inline void realize_all_edges(const LogicalGraph& logical, const ChimeraGraph& target,
                              Embedding& embedding) {
    for (const auto& edge : logical.edges) {
        const auto coupler = find_coupler(target, embedding.chains[static_cast<std::size_t>(edge.first)],
                                          embedding.chains[static_cast<std::size_t>(edge.second)]);
        if (!coupler) {
            throw Error("embedding construction left edge unrealized: " +
                        logical.labels[static_cast<std::size_t>(edge.first)] + "--" +
                        logical.labels[static_cast<std::size_t>(edge.second)]);
        }
        embedding.realized.emplace(edge, *coupler);
    }
}

// L_n chain map (Lemma-2 mu), in band-local coordinates: column 1 holds the
// doubled ladder, column 2 the extensions. t_i sits at in-cell position
// 2i - 1, x_i at 2i.

inline std::vector<HwVertex> mu_t_chain(int i, int c) {
    const int pos = 2 * i - 1;
    const int row = ceil_div(pos, c);
    const int k = wrap(pos, c);
    std::vector<HwVertex> chain{{row, 1, k}, {row, 1, c + k}};
    if (i >= 3) chain.push_back({row, 2, c + k});
    return chain;
}

// The column-2 extension of x_i bridges to the next cell row. It is needed
// exactly when some neighbor t_{i+1} / t_{i+2} of x_i lives in a different
// row (the printed cutoff "2i+4 < 2n-1" deactivates it too early at the end
// of the ladder, leaving those edges unrealizable).
inline bool xi_x_active(int i, int n, int c) {
    const int row_x = ceil_div(2 * i, c);
    for (const int j : {i + 1, i + 2}) {
        if (j <= n && ceil_div(2 * j - 1, c) != row_x) return true;
    }
    return false;
}

inline std::vector<HwVertex> mu_x_chain(int i, int n, int c) {
    const int pos = 2 * i;
    const int row = ceil_div(pos, c);
    const int k = wrap(pos, c);
    std::vector<HwVertex> chain{{row, 1, k}, {row, 1, c + k}, {row, 2, c + k}};
    if (xi_x_active(i, n, c)) {
        const int ext_k = (ceil_div(i, 2) % 2 == 1) ? k : wrap(k - 1, c);
        chain.push_back({row, 2, ext_k});
        chain.push_back({row + 1, 2, ext_k});
    }
    return chain;
}

/// L_n: vertices t_1..t_n then x_1..x_{n-1}, with the cascaded-OR edge set.
inline LogicalGraph chain_or_graph(int n) {
    LogicalGraph g;
    for (int i = 1; i <= n; ++i) g.labels.push_back("t" + std::to_string(i));
    for (int i = 1; i <= n - 1; ++i) g.labels.push_back("x" + std::to_string(i));
    const auto t = [](int i) { return i - 1; };
    const auto x = [n](int i) { return n + i - 1; };
    if (n >= 2) {
        g.add_edge(t(1), t(2));
        g.add_edge(t(1), x(1));
        g.add_edge(t(2), x(1));
        for (int i = 2; i <= n - 1; ++i) {
            g.add_edge(x(i - 1), x(i));
            g.add_edge(x(i - 1), t(i + 1));
            g.add_edge(x(i), t(i + 1));
        }
    }
    return g;
}

inline std::vector<HwVertex> shifted(std::vector<HwVertex> chain, int row_offset, int col_offset) {
    for (HwVertex& v : chain) {
        v.row += row_offset;
        v.col += col_offset;
    }
    return chain;
}

} // namespace detail

/// Lemma-1 embedding K_{p,q} -> F(ceil(q/c), ceil(p/c), c): left vertex i is a
/// vertical chain at column ceil(i/c), right vertex j a horizontal chain at
/// row ceil(j/c); each edge is realized inside the unique crossing cell.
inline EmbeddingResult embed_complete_bipartite(int left, int right, int c) {
    if (left < 1 || right < 1 || c < 1) {
        throw InvalidArgument("embed_complete_bipartite: sizes must be >= 1");
    }
    const int rows = detail::ceil_div(right, c);
    const int cols = detail::ceil_div(left, c);
    EmbeddingResult result{LogicalGraph{}, ChimeraGraph(rows, cols, c), Embedding{}};
    for (int i = 1; i <= left; ++i) result.logical.labels.push_back("u" + std::to_string(i));
    for (int j = 1; j <= right; ++j) result.logical.labels.push_back("v" + std::to_string(j));
    for (int i = 1; i <= left; ++i) {
        std::vector<HwVertex> chain;
        for (int t = 1; t <= rows; ++t) chain.push_back({t, detail::ceil_div(i, c), detail::wrap(i, c)});
        result.embedding.chains.push_back(std::move(chain));
    }
    for (int j = 1; j <= right; ++j) {
        std::vector<HwVertex> chain;
        for (int t = 1; t <= cols; ++t) {
            chain.push_back({detail::ceil_div(j, c), t, c + detail::wrap(j, c)});
        }
        result.embedding.chains.push_back(std::move(chain));
    }
    for (int i = 1; i <= left; ++i) {
        for (int j = 1; j <= right; ++j) {
            result.logical.add_edge(i - 1, left + j - 1);
        }
    }
    detail::realize_all_edges(result.logical, result.target, result.embedding);
    return result;
}

/// Lemma-2 embedding L_n -> F(ceil(2n/c), 2, c), proven for shore c = 4 only.
inline EmbeddingResult embed_chain_or(int n_t, int c = 4) {
    if (c != 4) throw UnsupportedParameterError("embed_chain_or: only c = 4 is supported");
    if (n_t < 2) throw InvalidArgument("embed_chain_or: need at least two chain variables");
    const int rows = detail::ceil_div(2 * n_t, c);
    EmbeddingResult result{detail::chain_or_graph(n_t), ChimeraGraph(rows, 2, c), Embedding{}};
    for (int i = 1; i <= n_t; ++i) {
        result.embedding.chains.push_back(detail::mu_t_chain(i, c));
    }
    for (int i = 1; i <= n_t - 1; ++i) {
        result.embedding.chains.push_back(detail::mu_x_chain(i, n_t, c));
    }
    detail::realize_all_edges(result.logical, result.target, result.embedding);
    return result;
}

struct InstanceEmbedding {
    LogicalGraph logical;
    ChimeraGraph target;
    Embedding embedding;
    VariableLayout layout;
    int band_rows = 0;   // f1
    int grid_cols = 0;   // f2
};

/// Theorem-2 embedding of the interaction graph of reduce(inst) onto
/// F(f1, f2, c) with f1 = sum_k ceil(2 r_k / c) and f2 = ceil(2m/c) + 2.
/// Ground element k owns the band of rows (d_k, d_k + ceil(2 r_k / c)]:
/// chooser chains run down their spaced column through every band, pair
/// chains pair a spaced row (theta) with an L_{r_k} cell (mu) in the two
/// rightmost columns, auxiliary chains are pure mu.
inline InstanceEmbedding embed_instance(const ScpInstance& inst, int c = 4) {
    if (c != 4) throw UnsupportedParameterError("embed_instance: only c = 4 is supported");
    auto [model, layout] = reduce(inst);
    const PairCoverMap map = pair_cover_map(inst);
    const int m = inst.cover_count();
    const int n = inst.ground_count();
    const int mu_col = detail::ceil_div(2 * m, c); // theta part spans columns 1..mu_col
    int f1 = 0;
    std::vector<int> band_start(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 1; k <= n; ++k) {
        band_start[static_cast<std::size_t>(k - 1)] = f1;
        f1 += detail::ceil_div(2 * map.r(k), c);
    }
    band_start[static_cast<std::size_t>(n)] = f1;
    const int f2 = mu_col + 2;

    InstanceEmbedding result{interaction_graph(model, layout), ChimeraGraph(f1, f2, c), Embedding{},
                             layout, f1, f2};
    result.embedding.chains.resize(static_cast<std::size_t>(layout.spin_count()));

    for (int i = 1; i <= m; ++i) {
        std::vector<HwVertex> chain;
        const int col = detail::ceil_div(2 * i - 1, c);
        const int k = detail::wrap(2 * i - 1, c);
        for (int row = 1; row <= f1; ++row) chain.push_back({row, col, k});
        result.embedding.chains[static_cast<std::size_t>(layout.chooser_spin(i))] = std::move(chain);
    }
    for (int k = 1; k <= n; ++k) {
        const int d = band_start[static_cast<std::size_t>(k - 1)];
        const int r = map.r(k);
        for (int i = 1; i <= r; ++i) {
            std::vector<HwVertex> chain = detail::shifted(detail::mu_t_chain(i, c), d, mu_col);
            const int row = d + detail::ceil_div(2 * i - 1, c);
            const int shore_k = c + detail::wrap(2 * i - 1, c);
            for (int col = 1; col <= mu_col; ++col) chain.push_back({row, col, shore_k});
            result.embedding.chains[static_cast<std::size_t>(layout.pair_spin(k, i))] = std::move(chain);
        }
        for (int i = 1; i <= r - 1; ++i) {
            result.embedding.chains[static_cast<std::size_t>(layout.aux_spin(k, i))] =
                detail::shifted(detail::mu_x_chain(i, r, c), d, mu_col);
        }
    }
    detail::realize_all_edges(result.logical, result.target, result.embedding);
    return result;
}

} // namespace paircover
