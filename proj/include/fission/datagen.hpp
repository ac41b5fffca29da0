#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fission/error.hpp"
#include "fission/io.hpp"
#include "fission/metric_space.hpp"
#include "fission/random.hpp"

namespace fission {

// ============================================================================
// Generator specifications
// ============================================================================

/// Isotropic Gaussian blobs. Centers lie on a square grid in the first two
/// coordinates, `separation` apart; other coordinates are centred at 0.
struct BlobsParams {
    std::size_t k = 5;
    std::size_t dims = 2;
    std::size_t count = 100; ///< points per blob
    double spread = 1.0;     ///< standard deviation
    double separation = 20.0;
};

/// A compact dense cluster next to a wide sparse one.
struct ImbalanceParams {
    std::size_t dense_count = 31;
    double dense_spread = 0.5;
    std::size_t sparse_count = 70;
    double sparse_spread = 4.0;
    double offset = 40.0; ///< sparse center sits at (offset, offset)
};

/// A uniform annulus around the origin with three Gaussian blobs inside it,
/// at angles 90, 210 and 330 degrees.
struct AnnulusBlobsParams {
    std::size_t annulus_count = 1900;
    double inner_radius = 8.0;
    double outer_radius = 10.0;
    std::size_t blob_count = 187; ///< points per blob
    double blob_spread = 1.0;
    double blob_radius = 3.5; ///< distance of blob centers from the origin
};

/// Deterministic groups of evenly spaced points on the x axis. Group g+1
/// starts `gap` after the last point of group g.
struct GridLineParams {
    std::vector<std::size_t> group_sizes{2, 2};
    double spacing = 1.0;
    double gap = 9.0;
};

/// Five families: dense A and D, medium B and F, and a sparse bridge E
/// joining B to F, plus uniform background noise.
/// Classes: A=0, B=1, D=2, F=3, E=4, noise=5.
struct FamiliesParams {
    std::size_t dense_count = 150;
    double dense_spread = 0.6;
    std::size_t medium_count = 150;
    double medium_spread = 1.2;
    std::size_t bridge_count = 60;
    double bridge_jitter = 0.3;
    std::size_t noise_count = 500;
};

enum class GenKind { blobs, imbalance, annulus_blobs, grid_line, families };

inline std::string to_string(GenKind kind) {
    switch (kind) {
    case GenKind::blobs: return "blobs";
    case GenKind::imbalance: return "imbalance";
    case GenKind::annulus_blobs: return "annulus_blobs";
    case GenKind::grid_line: return "grid_line";
    case GenKind::families: return "families";
    }
    return "unknown";
}

inline GenKind parse_gen_kind(std::string_view text) {
    for (GenKind k : {GenKind::blobs, GenKind::imbalance, GenKind::annulus_blobs, GenKind::grid_line, GenKind::families})
        if (text == to_string(k)) return k;
    throw ValidationError("unknown generator kind '" + std::string(text) + "'");
}

struct GenSpec {
    std::uint64_t seed = 0;
    std::variant<BlobsParams, ImbalanceParams, AnnulusBlobsParams, GridLineParams, FamiliesParams> params;

    GenKind kind() const { return static_cast<GenKind>(params.index()); }

    static GenSpec defaults(GenKind kind, std::uint64_t seed = 0) {
        GenSpec s;
        s.seed = seed;
        switch (kind) {
        case GenKind::blobs: s.params = BlobsParams{}; break;
        case GenKind::imbalance: s.params = ImbalanceParams{}; break;
        case GenKind::annulus_blobs: s.params = AnnulusBlobsParams{}; break;
        case GenKind::grid_line: s.params = GridLineParams{}; break;
        case GenKind::families: s.params = FamiliesParams{}; break;
        }
        return s;
    }

    /// {"kind": "...", "seed": N, <kind-specific fields>}; omitted fields keep
    /// their defaults, unknown fields are rejected.
    static GenSpec from_json(const nlohmann::json& doc);
    nlohmann::ordered_json to_json() const;
};

namespace detail {

template <class T>
void read_field(const nlohmann::json& doc, std::set<std::string>& seen, const char* key, T& out) {
    if (!doc.contains(key)) return;
    seen.insert(key);
    try {
        out = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string("generator field '") + key + "' has the wrong type");
    }
}

} // namespace detail

inline GenSpec GenSpec::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("generator spec must be a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ValidationError("generator spec needs a string 'kind'");
    std::set<std::string> seen{"kind"};
    GenSpec spec = defaults(parse_gen_kind(doc["kind"].get<std::string>()));
    detail::read_field(doc, seen, "seed", spec.seed);
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BlobsParams>) {
                detail::read_field(doc, seen, "k", p.k);
                detail::read_field(doc, seen, "dims", p.dims);
                detail::read_field(doc, seen, "count", p.count);
                detail::read_field(doc, seen, "spread", p.spread);
                detail::read_field(doc, seen, "separation", p.separation);
            } else if constexpr (std::is_same_v<P, ImbalanceParams>) {
                detail::read_field(doc, seen, "dense_count", p.dense_count);
                detail::read_field(doc, seen, "dense_spread", p.dense_spread);
                detail::read_field(doc, seen, "sparse_count", p.sparse_count);
                detail::read_field(doc, seen, "sparse_spread", p.sparse_spread);
                detail::read_field(doc, seen, "offset", p.offset);
            } else if constexpr (std::is_same_v<P, AnnulusBlobsParams>) {
                detail::read_field(doc, seen, "annulus_count", p.annulus_count);
                detail::read_field(doc, seen, "inner_radius", p.inner_radius);
                detail::read_field(doc, seen, "outer_radius", p.outer_radius);
                detail::read_field(doc, seen, "blob_count", p.blob_count);
                detail::read_field(doc, seen, "blob_spread", p.blob_spread);
                detail::read_field(doc, seen, "blob_radius", p.blob_radius);
            } else if constexpr (std::is_same_v<P, GridLineParams>) {
                detail::read_field(doc, seen, "group_sizes", p.group_sizes);
                detail::read_field(doc, seen, "spacing", p.spacing);
                detail::read_field(doc, seen, "gap", p.gap);
            } else {
                detail::read_field(doc, seen, "dense_count", p.dense_count);
                detail::read_field(doc, seen, "dense_spread", p.dense_spread);
                detail::read_field(doc, seen, "medium_count", p.medium_count);
                detail::read_field(doc, seen, "medium_spread", p.medium_spread);
                detail::read_field(doc, seen, "bridge_count", p.bridge_count);
                detail::read_field(doc, seen, "bridge_jitter", p.bridge_jitter);
                detail::read_field(doc, seen, "noise_count", p.noise_count);
            }
        },
        spec.params);
    for (const auto& [key, value] : doc.items())
        if (!seen.contains(key)) throw ValidationError("unknown generator field '" + key + "'");
    return spec;
}

inline nlohmann::ordered_json GenSpec::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind());
    j["seed"] = seed;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BlobsParams>) {
                j["k"] = p.k;
                j["dims"] = p.dims;
                j["count"] = p.count;
                j["spread"] = p.spread;
                j["separation"] = p.separation;
            } else if constexpr (std::is_same_v<P, ImbalanceParams>) {
                j["dense_count"] = p.dense_count;
                j["dense_spread"] = p.dense_spread;
                j["sparse_count"] = p.sparse_count;
                j["sparse_spread"] = p.sparse_spread;
                j["offset"] = p.offset;
            } else if constexpr (std::is_same_v<P, AnnulusBlobsParams>) {
                j["annulus_count"] = p.annulus_count;
                j["inner_radius"] = p.inner_radius;
                j["outer_radius"] = p.outer_radius;
                j["blob_count"] = p.blob_count;
                j["blob_spread"] = p.blob_spread;
                j["blob_radius"] = p.blob_radius;
            } else if constexpr (std::is_same_v<P, GridLineParams>) {
                j["group_sizes"] = p.group_sizes;
                j["spacing"] = p.spacing;
                j["gap"] = p.gap;
            } else {
                j["dense_count"] = p.dense_count;
                j["dense_spread"] = p.dense_spread;
                j["medium_count"] = p.medium_count;
                j["medium_spread"] = p.medium_spread;
                j["bridge_count"] = p.bridge_count;
                j["bridge_jitter"] = p.bridge_jitter;
                j["noise_count"] = p.noise_count;
            }
        },
        params);
    return j;
}

// ============================================================================
// Generation
// ============================================================================

namespace detail {

class PointSink {
public:
    explicit PointSink(std::size_t dims) : dims_(dims) {}

    void add(std::span<const double> p, int label) {
        coords_.insert(coords_.end(), p.begin(), p.end());
        labels_.push_back(label);
    }

    void gaussian(Rng& rng, std::span<const double> center, double spread, std::size_t count, int label) {
        std::vector<double> p(dims_);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t a = 0; a < dims_; ++a) p[a] = rng.normal(center[a], spread);
            add(p, label);
        }
    }

    Dataset finish(std::string name) && {
        return Dataset(std::move(coords_), dims_, std::move(labels_), std::move(name));
    }

private:
    std::size_t dims_;
    std::vector<double> coords_;
    std::vector<int> labels_;
};

inline void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("invalid generator spec: ") + what);
}

} // namespace detail

/// Labeled synthetic dataset; identical output for identical (spec, seed).
inline Dataset generate(const GenSpec& spec) {
    Rng rng(spec.seed);
    return std::visit(
        [&](const auto& p) -> Dataset {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BlobsParams>) {
                detail::require(p.k >= 1 && p.count >= 1 && p.dims >= 1, "blob counts must be >= 1");
                detail::require(p.spread > 0 && p.separation > 0, "spread and separation must be > 0");
                detail::PointSink sink(p.dims);
                const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p.k))));
                std::vector<double> center(p.dims, 0.0);
                for (std::size_t c = 0; c < p.k; ++c) {
                    center[0] = static_cast<double>(c % side) * p.separation;
                    if (p.dims > 1) center[1] = static_cast<double>(c / side) * p.separation;
                    else center[0] = static_cast<double>(c) * p.separation;
                    sink.gaussian(rng, center, p.spread, p.count, static_cast<int>(c));
                }
                return std::move(sink).finish("blobs");
            } else if constexpr (std::is_same_v<P, ImbalanceParams>) {
                detail::require(p.dense_count >= 1 && p.sparse_count >= 1, "cluster counts must be >= 1");
                detail::require(p.dense_spread > 0 && p.sparse_spread > 0, "spreads must be > 0");
                detail::PointSink sink(2);
                const double dense_center[2] = {0.0, 0.0};
                const double sparse_center[2] = {p.offset, p.offset};
                sink.gaussian(rng, dense_center, p.dense_spread, p.dense_count, 0);
                sink.gaussian(rng, sparse_center, p.sparse_spread, p.sparse_count, 1);
                return std::move(sink).finish("imbalance");
            } else if constexpr (std::is_same_v<P, AnnulusBlobsParams>) {
                detail::require(p.annulus_count >= 1 && p.blob_count >= 1, "counts must be >= 1");
                detail::require(p.inner_radius >= 0 && p.outer_radius > p.inner_radius, "need 0 <= inner < outer radius");
                detail::require(p.blob_spread > 0, "blob spread must be > 0");
                detail::PointSink sink(2);
                const double r2_lo = p.inner_radius * p.inner_radius;
                const double r2_hi = p.outer_radius * p.outer_radius;
                for (std::size_t i = 0; i < p.annulus_count; ++i) {
                    // Inverse CDF: area-uniform radius, uniform angle.
                    const double radius = std::sqrt(r2_lo + rng.uniform() * (r2_hi - r2_lo));
                    const double angle = 2.0 * std::numbers::pi * rng.uniform();
                    const double pt[2] = {radius * std::cos(angle), radius * std::sin(angle)};
                    sink.add(pt, 0);
                }
                for (int b = 0; b < 3; ++b) {
                    const double angle = (90.0 + 120.0 * b) * std::numbers::pi / 180.0;
                    const double center[2] = {p.blob_radius * std::cos(angle), p.blob_radius * std::sin(angle)};
                    sink.gaussian(rng, center, p.blob_spread, p.blob_count, b + 1);
                }
                return std::move(sink).finish("annulus_blobs");
            } else if constexpr (std::is_same_v<P, GridLineParams>) {
                detail::require(!p.group_sizes.empty(), "need at least one group");
                detail::require(p.spacing > 0 && p.gap > 0, "spacing and gap must be > 0");
                detail::PointSink sink(1);
                double x = 0.0;
                for (std::size_t g = 0; g < p.group_sizes.size(); ++g) {
                    detail::require(p.group_sizes[g] >= 1, "group sizes must be >= 1");
                    if (g > 0) x += p.gap;
                    for (std::size_t i = 0; i < p.group_sizes[g]; ++i) {
                        if (i > 0) x += p.spacing;
                        sink.add(std::span<const double>(&x, 1), static_cast<int>(g));
                    }
                }
                return std::move(sink).finish("grid_line");
            } else {
                detail::require(p.dense_count >= 1 && p.medium_count >= 1 && p.bridge_count >= 1,
                                "family counts must be >= 1");
                detail::require(p.dense_spread > 0 && p.medium_spread > 0 && p.bridge_jitter >= 0,
                                "spreads must be > 0");
                detail::PointSink sink(2);
                const double a[2] = {0.0, 30.0}, d[2] = {0.0, -30.0};
                const double b[2] = {30.0, 0.0}, f[2] = {60.0, 0.0};
                sink.gaussian(rng, a, p.dense_spread, p.dense_count, 0);
                sink.gaussian(rng, b, p.medium_spread, p.medium_count, 1);
                sink.gaussian(rng, d, p.dense_spread, p.dense_count, 2);
                sink.gaussian(rng, f, p.medium_spread, p.medium_count, 3);
                // Bridge: evenly spaced along the B-F segment, jittered.
                for (std::size_t i = 0; i < p.bridge_count; ++i) {
                    const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(p.bridge_count);
                    const double pt[2] = {b[0] + s * (f[0] - b[0]) + rng.normal(0.0, p.bridge_jitter),
                                          rng.normal(0.0, p.bridge_jitter)};
                    sink.add(pt, 4);
                }
                for (std::size_t i = 0; i < p.noise_count; ++i) {
                    const double pt[2] = {rng.uniform(-15.0, 75.0), rng.uniform(-45.0, 45.0)};
                    sink.add(pt, 5);
                }
                return std::move(sink).finish("families");
            }
        },
        spec.params);
}

// ============================================================================
// CSV and label files
// ============================================================================

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    const std::string text(cell);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) return std::nullopt;
    return v;
}

inline std::vector<std::pair<std::size_t, std::string_view>> nonblank_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0, start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        if (!trim(line).empty()) lines.emplace_back(line_no, line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

} // namespace detail

/// Parses CSV text: one point per row. A first row with any non-numeric cell
/// is a header; a header whose last column is `label` marks integer class ids,
/// which are renumbered 0..c-1 in ascending order.
inline Dataset parse_csv(std::string_view text, std::string name = {}) {
    const auto lines = detail::nonblank_lines(text);
    if (lines.empty()) throw ValidationError("CSV input is empty");
    std::size_t first = 0;
    bool has_label = false;
    const auto head = detail::split_cells(lines[0].second);
    const bool header = std::any_of(head.begin(), head.end(), [](auto c) { return !detail::parse_number(c); });
    std::size_t columns = head.size();
    if (header) {
        first = 1;
        has_label = head.back() == "label";
        if (has_label && columns < 2) throw ValidationError("CSV needs at least one feature column besides 'label'");
    }
    if (first >= lines.size()) throw ValidationError("CSV has a header but no data rows");
    const std::size_t dims = has_label ? columns - 1 : columns;

    std::vector<double> coords;
    std::vector<long long> raw_labels;
    for (std::size_t r = first; r < lines.size(); ++r) {
        const auto [line_no, line] = lines[r];
        const auto cells = detail::split_cells(line);
        if (cells.size() != columns)
            throw ValidationError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                  " columns, found " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = detail::parse_number(cells[c]);
            if (!v || !std::isfinite(*v))
                throw ValidationError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                      ": not a finite number: '" + std::string(cells[c]) + "'");
            if (has_label && c + 1 == cells.size()) {
                if (*v != std::floor(*v))
                    throw ValidationError("CSV line " + std::to_string(line_no) + ": label must be an integer");
                raw_labels.push_back(static_cast<long long>(*v));
            } else {
                coords.push_back(*v);
            }
        }
    }
    std::optional<std::vector<int>> labels;
    if (has_label) {
        std::vector<long long> distinct = raw_labels;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        labels.emplace();
        for (long long v : raw_labels)
            labels->push_back(static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin()));
    }
    return Dataset(std::move(coords), dims, std::move(labels), std::move(name));
}

inline Dataset load_csv(const std::filesystem::path& path) {
    return parse_csv(io::read_file(path), path.stem().string());
}

/// Header x0..x{d-1} (plus `label`), values with 17 significant digits.
inline std::string format_csv(const Dataset& ds) {
    std::string out;
    for (std::size_t a = 0; a < ds.dims(); ++a) {
        if (a) out += ',';
        out += "x" + std::to_string(a);
    }
    if (ds.labels()) out += ",label";
    out += '\n';
    for (Index i = 0; i < ds.size(); ++i) {
        const auto p = ds.point(i);
        for (std::size_t a = 0; a < p.size(); ++a) {
            if (a) out += ',';
            out += io::format_double(p[a]);
        }
        if (ds.labels()) out += "," + std::to_string((*ds.labels())[i]);
        out += '\n';
    }
    return out;
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
    io::write_file_atomic(path, format_csv(ds));
}

inline std::string format_labels(std::span<const int> labels) {
    if (labels.empty()) throw ValidationError("cannot save an empty partition");
    std::string out;
    for (int l : labels) out += std::to_string(l) + '\n';
    return out;
}

/// One integer per line, in point order.
inline void save_labels(std::span<const int> labels, const std::filesystem::path& path) {
    io::write_file_atomic(path, format_labels(labels));
}

inline std::vector<int> load_labels(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    std::vector<int> labels;
    for (const auto& [line_no, line] : detail::nonblank_lines(text)) {
        const auto v = detail::parse_number(detail::trim(line));
        if (!v || *v != std::floor(*v) || std::abs(*v) > 2e9)
            throw ValidationError("label file line " + std::to_string(line_no) + ": not an integer");
        labels.push_back(static_cast<int>(*v));
    }
    if (labels.empty()) throw ValidationError("label file '" + path.string() + "' is empty");
    return labels;
}

} // namespace fission
