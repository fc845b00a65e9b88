#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grnbounds/bounds.hpp"
#include "grnbounds/model.hpp"
#include "grnbounds/pde.hpp"

namespace grnbounds::app {

/// Bad or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure (exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NetworkBlock {
    std::vector<std::vector<double>> a;
    std::vector<double> nu;
    std::vector<double> rho;
    friend bool operator==(const NetworkBlock&, const NetworkBlock&) = default;
};

/// Either explicit (c, b) or fit_from_ssa, never both.
struct FinalDataBlock {
    std::optional<std::vector<double>> c;
    std::optional<std::vector<double>> b;
    bool fit_from_ssa = false;
    friend bool operator==(const FinalDataBlock&, const FinalDataBlock&) = default;
};

struct WindowBlock {
    double horizon = 0.0;  ///< "T"
    double time = 0.0;     ///< "t"
    friend bool operator==(const WindowBlock&, const WindowBlock&) = default;
};

/// a and N are chosen from `tol` when absent; dt defaults to (T - t) / 200.
struct PdeBlock {
    std::optional<double> a;
    std::optional<double> margin;  ///< "N"
    std::size_t points_per_axis = 65;
    std::optional<double> dt;
    double tol = 1e-3;
    friend bool operator==(const PdeBlock&, const PdeBlock&) = default;
};

struct SsaBlock {
    std::size_t ensemble = 10000;
    std::uint64_t seed = 1;
    std::optional<std::vector<std::int64_t>> initial;  ///< rounded b when absent
    std::vector<double> sample_times;                   ///< {t, T} when empty
    std::optional<double> bin_width;                    ///< 1 protein when neither is set
    std::optional<std::size_t> bin_count;
    std::size_t min_bin_count = 20;
    friend bool operator==(const SsaBlock&, const SsaBlock&) = default;
};

struct XGrid {
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;
    friend bool operator==(const XGrid&, const XGrid&) = default;
};

struct BoundsBlock {
    std::vector<double> alpha{0.75, 0.95};
    std::optional<XGrid> x_grid;  ///< mean +- 4 sqrt(Lambda), 201 points, when absent
    std::optional<std::vector<double>> mean;
    std::optional<std::vector<double>> abs_dev;
    std::size_t gene = 1;             ///< 1-based gene for histogram and coverage
    std::string envelope = "generic"; ///< or "suppressed"
    friend bool operator==(const BoundsBlock&, const BoundsBlock&) = default;
};

struct RunConfig {
    int schema = 1;
    NetworkBlock network;
    FinalDataBlock final_data;
    WindowBlock window;
    PdeBlock pde;
    SsaBlock ssa;
    BoundsBlock bounds;
    std::string out = "out";
    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    GeneNetwork make_network() const;
    TimeWindow make_window() const;
    /// Explicit final data; throws ConfigError under fit_from_ssa.
    GaussianFinalData make_final_data() const;
};

/// Parses and validates. Unknown keys, missing required keys, wrong types and
/// inconsistent dimensions raise ConfigError naming the key path.
RunConfig parse_config(const nlohmann::json& j);

/// Canonical form with every field written out.
nlohmann::json to_json(const RunConfig& cfg);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace grnbounds::app
