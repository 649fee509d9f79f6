#pragma once

// Reader/writer for the TUDataset text layout:
//   DS_A.txt                 "u, v" per line, 1-based global node ids
//   DS_graph_indicator.txt   graph id (1-based) of node i on line i
//   DS_graph_labels.txt      one integer class label per graph
//   DS_node_labels.txt       optional, one integer per node
//   DS_node_attributes.txt   optional, comma-separated floats per node
// plus a JSON-lines export and the DS_soft_labels.txt sidecar for mixed labels.

#include "fgwmixup/augment.hpp"
#include "fgwmixup/graph.hpp"
#include "fgwmixup/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fgw {

enum class FeatureKind { node_attributes, node_labels_onehot, degree_onehot };

inline std::string_view to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::node_attributes: return "node_attributes";
        case FeatureKind::node_labels_onehot: return "node_labels_onehot";
        case FeatureKind::degree_onehot: return "degree_onehot";
    }
    return "node_attributes";
}

/// Which node features to build. `automatic` prefers attributes, then node labels,
/// then degree one-hot.
enum class FeatureSource { automatic, attributes, node_labels, degree };

struct LoadOptions {
    FeatureSource features = FeatureSource::automatic;
    int max_degree = 64;
    bool remove_isolated = true;
};

struct Dataset {
    std::vector<Graph> graphs;
    std::string name;
    int class_count = 0;
    FeatureKind feature_kind = FeatureKind::node_attributes;
    std::vector<long> raw_labels;  // raw_labels[c] is the file label mapped to class c
    std::size_t dropped_graphs = 0;  // graphs left empty after isolated-node removal
};

enum class SaveFormat { tud, jsonl };

inline SaveFormat parse_save_format(std::string_view s) {
    if (s == "tud") return SaveFormat::tud;
    if (s == "jsonl") return SaveFormat::jsonl;
    throw DataError("unknown output format '" + std::string(s) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, const std::string& where) {
    T value{};
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || token.empty())
        throw DataError(where + ": cannot parse '" + std::string(token) + "'");
    return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

inline std::vector<long> read_integers(const std::filesystem::path& path) {
    std::vector<long> out;
    const auto lines = read_lines(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i)
        out.push_back(parse_number<long>(trim(lines[i]), path.filename().string() + ":" + std::to_string(i + 1)));
    return out;
}

inline std::filesystem::path ds_file(const std::filesystem::path& dir, const std::string& name,
                                     const std::string& suffix) {
    return dir / (name + "_" + suffix + ".txt");
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline Dataset load_tudataset(const std::filesystem::path& dir, const std::string& name,
                              const LoadOptions& opts = {}) {
    using detail::ds_file;
    const auto indicator = detail::read_integers(ds_file(dir, name, "graph_indicator"));
    const auto graph_labels = detail::read_integers(ds_file(dir, name, "graph_labels"));
    const auto edge_lines = detail::read_lines(ds_file(dir, name, "A"));
    const auto n_nodes = indicator.size();
    const auto n_graphs = graph_labels.size();
    if (n_nodes == 0 || n_graphs == 0) throw DataError("dataset " + name + " is empty");

    // node -> (graph, local index)
    std::vector<std::size_t> graph_of(n_nodes);
    std::vector<Eigen::Index> local_of(n_nodes);
    std::vector<Eigen::Index> sizes(n_graphs, 0);
    for (std::size_t v = 0; v < n_nodes; ++v) {
        const long gid = indicator[v];
        if (gid < 1 || static_cast<std::size_t>(gid) > n_graphs)
            throw DataError("graph_indicator line " + std::to_string(v + 1) + " refers to graph " +
                            std::to_string(gid) + " of " + std::to_string(n_graphs));
        graph_of[v] = static_cast<std::size_t>(gid - 1);
        local_of[v] = sizes[graph_of[v]]++;
    }

    std::vector<Matrix> structures(n_graphs);
    for (std::size_t g = 0; g < n_graphs; ++g) structures[g] = Matrix::Zero(sizes[g], sizes[g]);
    for (std::size_t e = 0; e < edge_lines.size(); ++e) {
        const std::string where = name + "_A.txt:" + std::to_string(e + 1);
        const auto fields = detail::split_commas(edge_lines[e]);
        if (fields.size() != 2) throw DataError(where + ": expected 'u, v'");
        const long u = detail::parse_number<long>(fields[0], where);
        const long v = detail::parse_number<long>(fields[1], where);
        if (u < 1 || v < 1 || static_cast<std::size_t>(u) > n_nodes || static_cast<std::size_t>(v) > n_nodes)
            throw DataError(where + ": node id out of range");
        const auto gu = graph_of[static_cast<std::size_t>(u - 1)];
        if (gu != graph_of[static_cast<std::size_t>(v - 1)]) throw DataError(where + ": edge joins two graphs");
        const auto iu = local_of[static_cast<std::size_t>(u - 1)];
        const auto iv = local_of[static_cast<std::size_t>(v - 1)];
        structures[gu](iu, iv) = 1.0;
        structures[gu](iv, iu) = 1.0;
    }

    // features
    const auto attr_path = ds_file(dir, name, "node_attributes");
    const auto nlab_path = ds_file(dir, name, "node_labels");
    FeatureSource source = opts.features;
    if (source == FeatureSource::automatic) {
        if (std::filesystem::exists(attr_path)) {
            source = FeatureSource::attributes;
        } else if (std::filesystem::exists(nlab_path)) {
            source = FeatureSource::node_labels;
        } else {
            source = FeatureSource::degree;
        }
    }

    Matrix node_features;  // n_nodes x d, global order
    FeatureKind kind = FeatureKind::degree_onehot;
    if (source == FeatureSource::attributes) {
        kind = FeatureKind::node_attributes;
        const auto lines = detail::read_lines(attr_path);
        if (lines.size() != n_nodes)
            throw DataError(attr_path.filename().string() + " has " + std::to_string(lines.size()) +
                            " rows for " + std::to_string(n_nodes) + " nodes");
        std::size_t width = 0;
        for (std::size_t v = 0; v < n_nodes; ++v) {
            const std::string where = attr_path.filename().string() + ":" + std::to_string(v + 1);
            const auto fields = detail::split_commas(lines[v]);
            if (v == 0) {
                width = fields.size();
                node_features.resize(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(width));
            } else if (fields.size() != width) {
                throw DataError(where + ": ragged attribute row");
            }
            for (std::size_t c = 0; c < width; ++c)
                node_features(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c)) =
                    detail::parse_number<double>(fields[c], where);
        }
    } else if (source == FeatureSource::node_labels) {
        kind = FeatureKind::node_labels_onehot;
        const auto labels = detail::read_integers(nlab_path);
        if (labels.size() != n_nodes) throw DataError("node_labels length differs from node count");
        std::map<long, Eigen::Index> column;
        for (long l : labels) column.emplace(l, 0);
        Eigen::Index next = 0;
        for (auto& [l, c] : column) c = next++;
        node_features = Matrix::Zero(static_cast<Eigen::Index>(n_nodes), next);
        for (std::size_t v = 0; v < n_nodes; ++v)
            node_features(static_cast<Eigen::Index>(v), column.at(labels[v])) = 1.0;
    }

    // graph labels -> 0..C-1 in sorted order of raw values
    std::map<long, int> class_of;
    for (long l : graph_labels) class_of.emplace(l, 0);
    Dataset ds;
    ds.name = name;
    ds.feature_kind = kind;
    for (auto& [raw, c] : class_of) {
        c = static_cast<int>(ds.raw_labels.size());
        ds.raw_labels.push_back(raw);
    }
    ds.class_count = static_cast<int>(class_of.size());

    std::vector<Matrix> features(n_graphs);
    for (std::size_t g = 0; g < n_graphs; ++g)
        features[g] = Matrix::Zero(sizes[g], kind == FeatureKind::degree_onehot ? 0 : node_features.cols());
    if (kind != FeatureKind::degree_onehot)
        for (std::size_t v = 0; v < n_nodes; ++v)
            features[graph_of[v]].row(local_of[v]) = node_features.row(static_cast<Eigen::Index>(v));

    ds.graphs.reserve(n_graphs);
    for (std::size_t g = 0; g < n_graphs; ++g) {
        if (sizes[g] == 0) {
            ++ds.dropped_graphs;
            logger().warn("{}: graph {} has no nodes and is dropped", name, g + 1);
            continue;
        }
        Graph graph = make_uniform_graph(std::move(features[g]), std::move(structures[g]),
                                         class_of.at(graph_labels[g]));
        if (opts.remove_isolated) {
            try {
                graph = remove_isolated_nodes(graph);
            } catch (const DataError&) {
                ++ds.dropped_graphs;
                logger().warn("{}: graph {} has no edges and is dropped", name, g + 1);
                continue;
            }
        }
        if (kind == FeatureKind::degree_onehot) graph = degree_feature_augmentation(graph, opts.max_degree, true);
        ds.graphs.push_back(std::move(graph));
    }
    return ds;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

inline void write_tud(const std::vector<SoftLabeledGraph>& graphs, const std::filesystem::path& dir,
                      const std::string& name) {
    auto edges = open_out(ds_file(dir, name, "A"));
    auto indicator = open_out(ds_file(dir, name, "graph_indicator"));
    auto labels = open_out(ds_file(dir, name, "graph_labels"));
    auto soft = open_out(ds_file(dir, name, "soft_labels"));
    const bool has_features = !graphs.empty() && graphs.front().graph.feature_dim() > 0;
    std::ofstream attrs;
    if (has_features) attrs = open_out(ds_file(dir, name, "node_attributes"));

    long offset = 0;
    for (std::size_t g = 0; g < graphs.size(); ++g) {
        const Graph& graph = graphs[g].graph;
        const Matrix& a = graph.structure();
        for (Eigen::Index i = 0; i < graph.size(); ++i) {
            indicator << (g + 1) << '\n';
            for (Eigen::Index j = 0; j < graph.size(); ++j)
                if (i != j && a(i, j) != 0.0) edges << (offset + i + 1) << ", " << (offset + j + 1) << '\n';
            if (has_features) {
                for (Eigen::Index c = 0; c < graph.feature_dim(); ++c)
                    attrs << (c ? ", " : "") << format_double(graph.features()(i, c));
                attrs << '\n';
            }
        }
        offset += graph.size();
        labels << argmax_label(graphs[g].label_distribution) << '\n';
        const Vector& dist = graphs[g].label_distribution;
        for (Eigen::Index c = 0; c < dist.size(); ++c) soft << (c ? "," : "") << format_double(dist(c));
        soft << '\n';
    }
}

inline void write_jsonl(const std::vector<SoftLabeledGraph>& graphs, const std::filesystem::path& dir,
                        const std::string& name) {
    auto out = open_out(dir / (name + ".jsonl"));
    for (const auto& item : graphs) {
        const Graph& g = item.graph;
        nlohmann::ordered_json obj;
        obj["mu"] = std::vector<double>(g.mu().data(), g.mu().data() + g.size());
        auto edges = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < g.size(); ++i)
            for (Eigen::Index j = i + 1; j < g.size(); ++j)
                if (g.structure()(i, j) != 0.0) edges.push_back({i, j});
        obj["edges"] = std::move(edges);
        auto feats = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < g.feature_dim(); ++c) row.push_back(g.features()(i, c));
            feats.push_back(std::move(row));
        }
        obj["features"] = std::move(feats);
        const Vector& dist = item.label_distribution;
        obj["label_distribution"] = std::vector<double>(dist.data(), dist.data() + dist.size());
        out << obj.dump() << '\n';
    }
}

}  // namespace detail

/// Writes `graphs` under `dir` with file prefix `name`. Soft labels are flattened to their
/// argmax in graph_labels (ties to the lower class) and kept in full in DS_soft_labels.txt.
inline void save_dataset(const std::vector<SoftLabeledGraph>& graphs, const std::filesystem::path& dir,
                         const std::string& name, SaveFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    if (format == SaveFormat::tud) {
        detail::write_tud(graphs, dir, name);
    } else {
        detail::write_jsonl(graphs, dir, name);
    }
}

/// Wraps hard-labeled dataset graphs as one-hot soft-labeled samples.
inline std::vector<SoftLabeledGraph> as_soft_labeled(const Dataset& ds) {
    std::vector<SoftLabeledGraph> out;
    out.reserve(ds.graphs.size());
    for (const auto& g : ds.graphs) out.push_back({g, one_hot(g.label().value_or(0), std::max(1, ds.class_count)), std::nullopt});
    return out;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir, SaveFormat format) {
    save_dataset(as_soft_labeled(ds), dir, ds.name, format);
}

}  // namespace fgw
