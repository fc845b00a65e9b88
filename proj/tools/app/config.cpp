#include "grnbounds/app/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace grnbounds::app {

namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers its key path and rejects
// keys nobody asked about.
class Block {
public:
    Block(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
        std::set<std::string> known(allowed.begin(), allowed.end());
        for (const auto& [key, value] : j_.items())
            if (!known.count(key)) fail(at(key), "unknown key");
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const {
        if (!has(key)) fail(at(key), "missing required key");
        return j_.at(key);
    }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const char* key) const { return as_number(raw(key), at(key)); }
    double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
    std::optional<double> maybe_number(const char* key) const {
        return has(key) ? std::optional(number(key)) : std::nullopt;
    }
    std::size_t count(const char* key) const { return as_count(raw(key), at(key)); }
    std::size_t count_or(const char* key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }
    std::vector<double> numbers(const char* key) const {
        const auto& v = raw(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], at(key) + "[" + std::to_string(k) + "]"));
        return out;
    }
    std::optional<std::vector<double>> maybe_numbers(const char* key) const {
        return has(key) ? std::optional(numbers(key)) : std::nullopt;
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ConfigError(where + ": " + what);
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) fail(where, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(where, "must be finite");
        return d;
    }
    static std::size_t as_count(const json& v, const std::string& where) {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            fail(where, "expected a non-negative integer");
        return v.get<std::size_t>();
    }

private:
    const json& j_;
    std::string path_;
};

void require_length(std::size_t got, std::size_t n, const std::string& where) {
    if (got != n)
        Block::fail(where, "has " + std::to_string(got) + " entries but the network has " + std::to_string(n) + " genes");
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

GeneNetwork RunConfig::make_network() const {
    const std::size_t n = network.nu.size();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = network.a[i][j];
    return GeneNetwork(std::move(a), network.nu, network.rho);
}

TimeWindow RunConfig::make_window() const { return TimeWindow(window.horizon, window.time); }

GaussianFinalData RunConfig::make_final_data() const {
    if (!final_data.c || !final_data.b) throw ConfigError("final_data: c and b are not given (fit_from_ssa is set)");
    return GaussianFinalData(*final_data.c, *final_data.b);
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    const Block root(j, "", {"schema", "network", "final_data", "window", "pde", "ssa", "bounds", "out"});
    const auto& schema = root.raw("schema");
    if (!schema.is_number_integer() || schema.get<int>() != 1) Block::fail("schema", "only schema 1 is supported");

    {
        const Block net(root.raw("network"), "network", {"A", "nu", "rho"});
        cfg.network.nu = net.numbers("nu");
        cfg.network.rho = net.numbers("rho");
        const auto& a = net.raw("A");
        if (!a.is_array()) Block::fail("network.A", "expected an array of rows");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string where = "network.A[" + std::to_string(i) + "]";
            if (!a[i].is_array()) Block::fail(where, "expected an array of numbers");
            std::vector<double> row;
            for (std::size_t k = 0; k < a[i].size(); ++k)
                row.push_back(Block::as_number(a[i][k], where + "[" + std::to_string(k) + "]"));
            cfg.network.a.push_back(std::move(row));
        }
    }
    const std::size_t n = cfg.network.nu.size();
    if (n == 0) Block::fail("network.nu", "at least one gene is required");
    require_length(cfg.network.rho.size(), n, "network.rho");
    require_length(cfg.network.a.size(), n, "network.A");
    for (std::size_t i = 0; i < n; ++i) require_length(cfg.network.a[i].size(), n, "network.A[" + std::to_string(i) + "]");

    {
        const Block fd(root.raw("final_data"), "final_data", {"c", "b", "fit_from_ssa"});
        if (fd.has("fit_from_ssa")) {
            const auto& v = fd.raw("fit_from_ssa");
            if (!v.is_boolean()) Block::fail("final_data.fit_from_ssa", "expected true or false");
            cfg.final_data.fit_from_ssa = v.get<bool>();
        }
        cfg.final_data.c = fd.maybe_numbers("c");
        cfg.final_data.b = fd.maybe_numbers("b");
        const bool explicit_data = cfg.final_data.c || cfg.final_data.b;
        if (explicit_data == cfg.final_data.fit_from_ssa)
            Block::fail("final_data", "give exactly one of (c, b) and fit_from_ssa: true");
        if (explicit_data) {
            if (!cfg.final_data.c) Block::fail("final_data.c", "missing required key");
            if (!cfg.final_data.b) Block::fail("final_data.b", "missing required key");
            require_length(cfg.final_data.c->size(), n, "final_data.c");
            require_length(cfg.final_data.b->size(), n, "final_data.b");
        }
    }
    {
        const Block w(root.raw("window"), "window", {"T", "t"});
        cfg.window.horizon = w.number("T");
        cfg.window.time = w.number("t");
    }
    if (root.has("pde")) {
        const Block p(root.raw("pde"), "pde", {"a", "N", "points_per_axis", "dt", "tol"});
        cfg.pde.a = p.maybe_number("a");
        cfg.pde.margin = p.maybe_number("N");
        cfg.pde.points_per_axis = p.count_or("points_per_axis", cfg.pde.points_per_axis);
        cfg.pde.dt = p.maybe_number("dt");
        cfg.pde.tol = p.number_or("tol", cfg.pde.tol);
        if (!(cfg.pde.tol > 0.0)) Block::fail("pde.tol", "must be > 0");
    }
    if (root.has("ssa")) {
        const Block s(root.raw("ssa"), "ssa",
                      {"ensemble", "seed", "initial", "sample_times", "bin_width", "bin_count", "min_bin_count"});
        cfg.ssa.ensemble = s.count_or("ensemble", cfg.ssa.ensemble);
        if (s.has("seed")) {
            const auto& v = s.raw("seed");
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                Block::fail("ssa.seed", "expected a non-negative integer");
            cfg.ssa.seed = v.get<std::uint64_t>();
        }
        if (s.has("initial")) {
            const auto& v = s.raw("initial");
            if (!v.is_array()) Block::fail("ssa.initial", "expected an array of counts");
            std::vector<std::int64_t> counts;
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (!v[k].is_number_integer() || v[k].get<std::int64_t>() < 0)
                    Block::fail("ssa.initial[" + std::to_string(k) + "]", "expected a non-negative integer");
                counts.push_back(v[k].get<std::int64_t>());
            }
            require_length(counts.size(), n, "ssa.initial");
            cfg.ssa.initial = std::move(counts);
        }
        if (s.has("sample_times")) cfg.ssa.sample_times = s.numbers("sample_times");
        cfg.ssa.bin_width = s.maybe_number("bin_width");
        if (s.has("bin_count")) cfg.ssa.bin_count = s.count("bin_count");
        cfg.ssa.min_bin_count = s.count_or("min_bin_count", cfg.ssa.min_bin_count);
        if (cfg.ssa.ensemble < 1) Block::fail("ssa.ensemble", "must be >= 1");
        if (cfg.ssa.bin_width && cfg.ssa.bin_count) Block::fail("ssa", "give at most one of bin_width and bin_count");
        if (cfg.ssa.bin_width && !(*cfg.ssa.bin_width > 0.0)) Block::fail("ssa.bin_width", "must be > 0");
        if (cfg.ssa.bin_count && *cfg.ssa.bin_count == 0) Block::fail("ssa.bin_count", "must be >= 1");
        for (double s_t : cfg.ssa.sample_times)
            if (!(s_t >= 0.0 && s_t <= cfg.window.horizon)) Block::fail("ssa.sample_times", "entries must lie in [0, T]");
    }
    if (root.has("bounds")) {
        const Block b(root.raw("bounds"), "bounds", {"alpha", "x_grid", "mean", "abs_dev", "gene", "envelope"});
        if (b.has("alpha")) cfg.bounds.alpha = b.numbers("alpha");
        for (double a : cfg.bounds.alpha)
            if (!(a > 0.0 && a < 1.0)) Block::fail("bounds.alpha", "entries must lie in (0, 1)");
        if (b.has("x_grid")) {
            const Block g(b.raw("x_grid"), "bounds.x_grid", {"from", "to", "points"});
            XGrid grid{g.number("from"), g.number("to"), g.count("points")};
            if (!(grid.to > grid.from) || grid.points < 2) Block::fail("bounds.x_grid", "need from < to and points >= 2");
            cfg.bounds.x_grid = grid;
        }
        cfg.bounds.mean = b.maybe_numbers("mean");
        cfg.bounds.abs_dev = b.maybe_numbers("abs_dev");
        if (cfg.bounds.mean) require_length(cfg.bounds.mean->size(), n, "bounds.mean");
        if (cfg.bounds.abs_dev) require_length(cfg.bounds.abs_dev->size(), n, "bounds.abs_dev");
        if (cfg.bounds.abs_dev && !cfg.bounds.mean) Block::fail("bounds.mean", "missing required key (abs_dev is given)");
        cfg.bounds.gene = b.count_or("gene", cfg.bounds.gene);
        if (cfg.bounds.gene < 1 || cfg.bounds.gene > n) Block::fail("bounds.gene", "must lie in 1.." + std::to_string(n));
        if (b.has("envelope")) {
            const auto& v = b.raw("envelope");
            if (!v.is_string() || (v != "generic" && v != "suppressed"))
                Block::fail("bounds.envelope", "expected \"generic\" or \"suppressed\"");
            cfg.bounds.envelope = v.get<std::string>();
        }
    }
    if (root.has("out")) {
        const auto& v = root.raw("out");
        if (!v.is_string() || v.get<std::string>().empty()) Block::fail("out", "expected a non-empty path");
        cfg.out = v.get<std::string>();
    }

    // Semantic checks delegated to the model types.
    try {
        (void)cfg.make_network();
        (void)cfg.make_window();
        if (!cfg.final_data.fit_from_ssa) (void)cfg.make_final_data();
        if (cfg.bounds.envelope == "suppressed" && !has_suppressed_gene_shape(cfg.make_network()))
            Block::fail("bounds.envelope", "the network does not have the suppressed-gene shape");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.final_data.fit_from_ssa && !cfg.ssa.initial)
        Block::fail("ssa.initial", "missing required key (needed with fit_from_ssa)");
    return cfg;
}

json to_json(const RunConfig& cfg) {
    json ssa = {{"ensemble", cfg.ssa.ensemble},
                {"seed", cfg.ssa.seed},
                {"sample_times", cfg.ssa.sample_times},
                {"min_bin_count", cfg.ssa.min_bin_count}};
    if (cfg.ssa.initial) ssa["initial"] = *cfg.ssa.initial;
    if (cfg.ssa.bin_width) ssa["bin_width"] = *cfg.ssa.bin_width;
    if (cfg.ssa.bin_count) ssa["bin_count"] = *cfg.ssa.bin_count;

    json pde = {{"points_per_axis", cfg.pde.points_per_axis}, {"tol", cfg.pde.tol}};
    if (cfg.pde.a) pde["a"] = *cfg.pde.a;
    if (cfg.pde.margin) pde["N"] = *cfg.pde.margin;
    if (cfg.pde.dt) pde["dt"] = *cfg.pde.dt;

    json fd = json::object();
    if (cfg.final_data.fit_from_ssa) {
        fd["fit_from_ssa"] = true;
    } else {
        fd["c"] = optional_json(cfg.final_data.c);
        fd["b"] = optional_json(cfg.final_data.b);
    }

    json bounds = {{"alpha", cfg.bounds.alpha}, {"gene", cfg.bounds.gene}, {"envelope", cfg.bounds.envelope}};
    if (cfg.bounds.x_grid)
        bounds["x_grid"] = {{"from", cfg.bounds.x_grid->from}, {"to", cfg.bounds.x_grid->to}, {"points", cfg.bounds.x_grid->points}};
    if (cfg.bounds.mean) bounds["mean"] = *cfg.bounds.mean;
    if (cfg.bounds.abs_dev) bounds["abs_dev"] = *cfg.bounds.abs_dev;

    return {{"schema", cfg.schema},
            {"network", {{"A", cfg.network.a}, {"nu", cfg.network.nu}, {"rho", cfg.network.rho}}},
            {"final_data", fd},
            {"window", {{"T", cfg.window.horizon}, {"t", cfg.window.time}}},
            {"pde", pde},
            {"ssa", ssa},
            {"bounds", bounds},
            {"out", cfg.out}};
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace grnbounds::app
