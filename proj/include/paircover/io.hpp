#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "paircover/chimera.hpp"
#include "paircover/errors.hpp"
#include "paircover/ising.hpp"
#include "paircover/rational.hpp"
#include "paircover/scp.hpp"

namespace paircover {

using nlohmann::json;

// Instance JSON: {"n": int, "m": int, "edges": [[i,k], ...]}, 1-based,
// edges sorted by (i,k).

inline json instance_to_json(const ScpInstance& inst) {
    json edges = json::array();
    for (const auto& [cover, ground] : inst.edges()) {
        edges.push_back({cover, ground});
    }
    return json{{"n", inst.ground_count()}, {"m", inst.cover_count()}, {"edges", edges}};
}

inline ScpInstance instance_from_json(const json& j) {
    try {
        std::vector<std::pair<int, int>> edges;
        for (const auto& edge : j.at("edges")) {
            edges.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
        }
        return ScpInstance(j.at("n").get<int>(), j.at("m").get<int>(), std::move(edges));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("instance JSON: ") + e.what());
    }
}

// Ising JSON: {"M": int, "h": ["p/q", ...], "J": [[i, j, "p/q"], ...],
// "offset": "p/q"}, spins 1-based, J sorted by (i, j).

inline json ising_to_json(const IsingModel& model) {
    json h = json::array();
    for (const auto& field : model.fields()) h.push_back(to_string(field));
    json couplings = json::array();
    for (const auto& [key, value] : model.couplings()) {
        couplings.push_back({key.first + 1, key.second + 1, to_string(value)});
    }
    return json{{"M", model.spin_count()},
                {"h", h},
                {"J", couplings},
                {"offset", to_string(model.offset())}};
}

inline IsingModel ising_from_json(const json& j) {
    try {
        IsingModel model(j.at("M").get<int>());
        const auto& h = j.at("h");
        if (static_cast<int>(h.size()) != model.spin_count()) {
            throw InvalidArgument("ising JSON: h length != M");
        }
        for (int i = 0; i < model.spin_count(); ++i) {
            model.add_field(i, parse_rational(h.at(static_cast<std::size_t>(i)).get<std::string>()));
        }
        for (const auto& entry : j.at("J")) {
            model.add_coupling(entry.at(0).get<int>() - 1, entry.at(1).get<int>() - 1,
                               parse_rational(entry.at(2).get<std::string>()));
        }
        model.add_offset(parse_rational(j.at("offset").get<std::string>()));
        return model;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("ising JSON: ") + e.what());
    }
}

// Embedding JSON: {"chains": {"label": [[a,b,k], ...]},
//                  "edges": {"u--v": [[a,b,k], [a,b,k]]}}.

inline json embedding_to_json(const LogicalGraph& logical, const Embedding& emb) {
    json chains = json::object();
    for (int v = 0; v < logical.vertex_count(); ++v) {
        json chain = json::array();
        for (const HwVertex& u : emb.chains[static_cast<std::size_t>(v)]) {
            chain.push_back({u.row, u.col, u.k});
        }
        chains[logical.labels[static_cast<std::size_t>(v)]] = chain;
    }
    json edges = json::object();
    for (const auto& [edge, coupler] : emb.realized) {
        const std::string key = logical.labels[static_cast<std::size_t>(edge.first)] + "--" +
                                logical.labels[static_cast<std::size_t>(edge.second)];
        edges[key] = {{coupler.first.row, coupler.first.col, coupler.first.k},
                      {coupler.second.row, coupler.second.col, coupler.second.k}};
    }
    return json{{"chains", chains}, {"edges", edges}};
}

/// DOT rendering of the hardware graph with one color class per chain.
inline std::string embedding_to_dot(const LogicalGraph& logical, const ChimeraGraph& hw,
                                    const Embedding& emb) {
    static const char* palette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080",
                                    "#9a6324", "#800000", "#808000", "#000075", "#ffd8b1"};
    constexpr std::size_t palette_size = sizeof(palette) / sizeof(palette[0]);
    std::map<HwVertex, int> chain_of;
    for (int v = 0; v < static_cast<int>(emb.chains.size()); ++v) {
        for (const HwVertex& u : emb.chains[static_cast<std::size_t>(v)]) chain_of[u] = v;
    }
    std::ostringstream out;
    out << "graph chimera {\n  node [shape=circle, style=filled, fontsize=8];\n";
    const auto name = [](const HwVertex& v) {
        return "q_" + std::to_string(v.row) + "_" + std::to_string(v.col) + "_" + std::to_string(v.k);
    };
    for (int row = 1; row <= hw.rows(); ++row) {
        for (int col = 1; col <= hw.cols(); ++col) {
            for (int k = 1; k <= 2 * hw.shore(); ++k) {
                const HwVertex v{row, col, k};
                out << "  " << name(v);
                const auto it = chain_of.find(v);
                if (it != chain_of.end()) {
                    out << " [fillcolor=\"" << palette[static_cast<std::size_t>(it->second) % palette_size]
                        << "\", label=\"" << logical.labels[static_cast<std::size_t>(it->second)] << "\"]";
                } else {
                    out << " [fillcolor=\"#eeeeee\", label=\"\"]";
                }
                out << ";\n";
            }
        }
    }
    for (const auto& [u, v] : hw.edges()) {
        out << "  " << name(u) << " -- " << name(v);
        const auto iu = chain_of.find(u);
        const auto iv = chain_of.find(v);
        if (iu != chain_of.end() && iv != chain_of.end() && iu->second == iv->second) {
            out << " [penwidth=3, color=\""
                << palette[static_cast<std::size_t>(iu->second) % palette_size] << "\"]";
        } else {
            out << " [color=\"#cccccc\"]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("parse error in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

} // namespace paircover
