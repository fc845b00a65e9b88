#include "grnbounds/app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "grnbounds/errors.hpp"
#include "grnbounds/expect.hpp"
#include "grnbounds/ssa.hpp"
#include "grnbounds/validation.hpp"

namespace grnbounds::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Error raised inside a named stage; keeps the original kind.
struct StageFailure {
    std::string stage;
    int code;
    std::string kind;
    std::string message;
};

class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".grnbounds.lock") {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f) throw IoError("output directory " + dir.string() + " is locked by another run (" + path_.string() + ")");
        std::fclose(f);
    }
    ~OutputLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    fs::path path_;
};

class Session {
public:
    Session(std::string command, fs::path dir, std::ostream& log)
        : command_(std::move(command)), dir_(std::move(dir)), log_(log), lock_(dir_) {}

    template <class Fn>
    auto stage(const std::string& name, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                finish(name, start);
            } else {
                auto result = fn();
                finish(name, start);
                return result;
            }
        } catch (const ConfigError& e) {
            throw fail(name, kConfigError, "config", e.what());
        } catch (const std::invalid_argument& e) {
            throw fail(name, kConfigError, "config", e.what());
        } catch (const IoError& e) {
            throw fail(name, kIoError, "io", e.what());
        } catch (const NumericalError& e) {
            throw fail(name, kNumericalError, "numerical", e.what());
        } catch (const std::exception& e) {
            throw fail(name, kNumericalError, "numerical", e.what());
        }
    }

    const fs::path& dir() const noexcept { return dir_; }

    void write(const std::string& name, const std::string& content) { write_to(dir_ / name, name, content); }

    void write_to(const fs::path& path, const std::string& label, const std::string& content) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw IoError("cannot write " + path.string());
        artifacts_.push_back(label);
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void write_manifest(bool complete, const std::optional<StageFailure>& failure) {
        json m = {{"command", command_}, {"complete", complete}, {"stages", stages_}, {"artifacts", artifacts_}};
        if (failure) m["failure"] = {{"stage", failure->stage}, {"kind", failure->kind}, {"message", failure->message}};
        std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
        out << m.dump(2) << "\n";
    }

private:
    void finish(const std::string& name, std::chrono::steady_clock::time_point start) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log_ << "[grnbounds] " << command_ << ": stage " << name << " done in " << secs << " s\n";
        stages_.push_back({{"name", name}, {"status", "done"}});
    }

    StageFailure fail(const std::string& name, int code, const std::string& kind, const std::string& message) {
        stages_.push_back({{"name", name}, {"status", "failed"}});
        return {name, code, kind, message};
    }

    std::string command_;
    fs::path dir_;
    std::ostream& log_;
    OutputLock lock_;
    json stages_ = json::array();
    std::vector<std::string> artifacts_;
};

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Sizing {
    double a;
    double margin;
    PdeGrid grid;
    double boundary_error;
};

Sizing size_domain(const RunConfig& cfg, const GeneNetwork& net, const GaussianFinalData& fd, const TimeWindow& w) {
    const double a = cfg.pde.a ? *cfg.pde.a : choose_inner_cube(net, fd, w, cfg.pde.tol);
    const double margin = cfg.pde.margin ? *cfg.pde.margin : choose_margin(net, fd, w, cfg.pde.tol);
    PdeGrid grid = default_grid(a, margin, w);
    grid.points_per_axis = cfg.pde.points_per_axis;
    if (cfg.pde.dt) grid.dt = *cfg.pde.dt;
    grid.validate(w);
    return {a, margin, grid, boundary_extension_error(net, fd, w, margin)};
}

json moments_json(const MomentReport& m, const Sizing& s) {
    return {{"mean", m.mean},
            {"abs_dev", m.abs_dev},
            {"trunc_err_mean", m.trunc_err_mean},
            {"trunc_err_absdev", m.trunc_err_absdev},
            {"mass_deficit", m.mass_deficit},
            {"domain",
             {{"a", s.a},
              {"N", s.margin},
              {"points_per_axis", s.grid.points_per_axis},
              {"dt", s.grid.dt},
              {"boundary_extension_error", s.boundary_error}}}};
}

struct Moments {
    std::vector<double> mean;
    std::vector<double> abs_dev;
};

// Variance proxies behind the envelope of one gene.
struct GeneProxies {
    double lower;
    double upper;
};

class Pipeline {
public:
    Pipeline(const RunConfig& cfg, const CommandOptions& options, Session& session)
        : cfg_(cfg),
          net_(cfg.make_network()),
          window_(cfg.make_window()),
          threads_(resolve_threads(options.threads)),
          options_(options),
          session_(session) {
        if (!cfg.final_data.fit_from_ssa) fd_ = cfg.make_final_data();
        ssa_ = cfg.ssa;
        if (options.seed) ssa_.seed = *options.seed;
        if (options.ensemble) ssa_.ensemble = *options.ensemble;
        if (options.sample_times) ssa_.sample_times = *options.sample_times;
    }

    void fit_if_needed() {
        if (fd_) return;
        run_ssa();
        session_.stage("fit", [&] {
            const auto t_index = time_index(window_.horizon);
            std::vector<std::vector<double>> finals;
            for (std::size_t i = 0; i < net_.size(); ++i) finals.push_back(samples_->values(t_index, i));
            try {
                fd_ = fit_final_data(finals, window_.horizon);
            } catch (const std::invalid_argument& e) {
                throw NumericalError(e.what());
            }
        });
    }

    ThetaField& solve() {
        if (field_) return *field_;
        fit_if_needed();
        sizing_ = session_.stage("sizing", [&] { return size_domain(cfg_, net_, *fd_, window_); });
        field_ = session_.stage("pde", [&] {
            return solve_final_value(net_, *fd_, sizing_->grid, window_, SolverOptions{true, threads_});
        });
        return *field_;
    }

    const MomentReport& expect() {
        if (report_) return *report_;
        solve();
        report_ = session_.stage("expect", [&] {
            return compute_moments(net_, *fd_, window_, *field_, sizing_->a, threads_);
        });
        session_.write_json("moments.json", moments_json(*report_, *sizing_));
        return *report_;
    }

    Moments moments() {
        if (cfg_.bounds.mean) {
            Moments m{*cfg_.bounds.mean, cfg_.bounds.abs_dev ? *cfg_.bounds.abs_dev : std::vector<double>(net_.size(), 0.0)};
            if (!cfg_.bounds.abs_dev) abs_dev_given_ = false;
            return m;
        }
        const auto& r = expect();
        return {r.mean, r.abs_dev};
    }

    void write_theta() {
        const auto& field = solve();
        session_.stage("write_theta", [&] {
            const fs::path csv = options_.theta_out ? *options_.theta_out : session_.dir() / "theta.csv";
            const std::size_t n = field.genes();
            std::string text;
            for (std::size_t i = 0; i < n; ++i) text += "x" + std::to_string(i + 1) + ",";
            for (std::size_t i = 0; i < n; ++i) text += "theta" + std::to_string(i + 1) + (i + 1 < n ? "," : "\n");
            for (std::size_t node = 0; node < field.node_count(); ++node) {
                const auto idx = field.node_index(node);
                for (std::size_t i = 0; i < n; ++i) text += format_number(field.grid().coordinate(idx[i])) + ",";
                for (std::size_t i = 0; i < n; ++i)
                    text += format_number(field.component(i)[node]) + (i + 1 < n ? "," : "\n");
            }
            session_.write_to(csv, csv.filename().string(), text);
            const json meta = {{"t", field.time()},
                               {"T", window_.horizon},
                               {"genes", n},
                               {"a", field.grid().inner_half_width},
                               {"N", field.grid().margin},
                               {"half_width", field.grid().half_width()},
                               {"points_per_axis", field.grid().points_per_axis},
                               {"spacing", field.grid().spacing()},
                               {"dt", field.grid().dt},
                               {"layout", "row-major, last axis fastest"},
                               {"columns", "x1..xn, theta1..thetan"}};
            fs::path sidecar = csv;
            sidecar.replace_extension(".json");
            session_.write_to(sidecar, sidecar.filename().string(), meta.dump(2) + "\n");
        });
    }

    void bounds() {
        fit_if_needed();
        const auto m = moments();
        session_.stage("bounds", [&] {
            const auto db = DerivativeBounds::from_final_data(*fd_);
            const double upper = upper_variance_proxy(net_, db, window_);
            json genes = json::array();
            std::string envelope = "gene,x,lower,upper\n";
            proxies_.clear();
            for (std::size_t i = 0; i < net_.size(); ++i) {
                const double lower = lower_variance_proxy(net_, db, i, window_);
                proxies_.push_back({lower, upper});
                json alphas = json::array();
                for (double a : cfg_.bounds.alpha) {
                    const double x = prediction_halfwidth(upper, a);
                    alphas.push_back({{"alpha", a}, {"x_alpha", x}, {"interval", {m.mean[i] - x, m.mean[i] + x}}});
                }
                json gene = {{"gene", i + 1},
                             {"lambda", lower},
                             {"Lambda", upper},
                             {"mean", m.mean[i]},
                             {"abs_dev", abs_dev_given_ ? json(m.abs_dev[i]) : json(nullptr)},
                             {"x_alpha", alphas}};
                gene["positivity_bound"] = m.mean[i] > 0.0
                                               ? json(positivity_bound(make_envelope(lower, upper, m.mean[i], 0.0)))
                                               : json(nullptr);
                genes.push_back(gene);
            }
            json cert = {{"t", window_.time}, {"T", window_.horizon}, {"genes", genes}};

            if (cfg_.bounds.envelope == "suppressed") {
                const auto sb = suppressed_gene_bounds(net_, *fd_, window_);
                proxies_[0] = {sb.lower_variance, sb.upper_variance};
                json alphas = json::array();
                for (double a : cfg_.bounds.alpha) {
                    const double x = prediction_halfwidth(sb.upper_variance, a);
                    alphas.push_back({{"alpha", a}, {"x_alpha", x}, {"interval", {m.mean[0] - x, m.mean[0] + x}}});
                }
                cert["suppressed"] = {{"gene", 1},
                                      {"m_t", sb.lower_derivative},
                                      {"M_t", sb.upper_derivative},
                                      {"kappa", sb.cross_terms},
                                      {"lambda", sb.lower_variance},
                                      {"Lambda", sb.upper_variance},
                                      {"x_alpha", alphas}};
            }

            if (abs_dev_given_) {
                for (std::size_t i = 0; i < net_.size(); ++i) {
                    const auto env = make_envelope(proxies_[i].lower, proxies_[i].upper, m.mean[i], m.abs_dev[i]);
                    double from = m.mean[i] - 4.0 * std::sqrt(env.upper_variance);
                    double to = m.mean[i] + 4.0 * std::sqrt(env.upper_variance);
                    std::size_t points = 201;
                    if (cfg_.bounds.x_grid) {
                        from = cfg_.bounds.x_grid->from;
                        to = cfg_.bounds.x_grid->to;
                        points = cfg_.bounds.x_grid->points;
                    }
                    for (std::size_t k = 0; k < points; ++k) {
                        const double x = from + (to - from) * static_cast<double>(k) / static_cast<double>(points - 1);
                        const auto band = density_bounds(env, x);
                        envelope += std::to_string(i + 1) + "," + format_number(x) + "," + format_number(band.lower) +
                                    "," + format_number(band.upper) + "\n";
                    }
                }
                session_.write("envelope.csv", envelope);
            }
            session_.write_json("certificates.json", cert);
        });
        moments_ = m;
    }

    void run_ssa() {
        if (samples_) return;
        samples_ = session_.stage("ssa", [&] {
            SsaConfig sc{net_, {}, window_.horizon, ssa_.ensemble, ssa_.seed};
            if (ssa_.initial) {
                sc.initial = *ssa_.initial;
            } else if (fd_) {
                sc.initial = initial_counts_from(*fd_);
            } else {
                throw ConfigError("ssa.initial: missing required key (needed with fit_from_ssa)");
            }
            times_ = ssa_.sample_times;
            if (times_.empty()) times_ = {window_.time, window_.horizon};
            times_.push_back(window_.time);
            times_.push_back(window_.horizon);
            std::sort(times_.begin(), times_.end());
            times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
            for (double s : times_)
                if (!(s >= 0.0 && s <= window_.horizon)) throw ConfigError("ssa.sample_times: entries must lie in [0, T]");
            return simulate_ensemble(sc, times_, threads_);
        });
    }

    void write_samples() {
        session_.stage("write_samples", [&] {
            std::string text = "trajectory,gene,t,count\n";
            for (std::size_t k = 0; k < samples_->trajectories(); ++k)
                for (std::size_t s = 0; s < times_.size(); ++s)
                    for (std::size_t i = 0; i < net_.size(); ++i)
                        text += std::to_string(k) + "," + std::to_string(i + 1) + "," + format_number(times_[s]) + "," +
                                std::to_string(samples_->at(k, s, i)) + "\n";
            session_.write("samples.csv", text);

            json genes = json::array();
            for (std::size_t i = 0; i < net_.size(); ++i) {
                json rows = json::array();
                for (std::size_t s = 0; s < times_.size(); ++s) {
                    const auto v = samples_->values(s, i);
                    json row = {{"t", times_[s]}};
                    if (v.size() >= 2) {
                        const auto m = sample_moments(v);
                        row["mean"] = m.mean;
                        row["abs_dev"] = m.abs_dev;
                        row["std_dev"] = m.std_dev;
                    }
                    rows.push_back(row);
                }
                genes.push_back({{"gene", i + 1}, {"moments", rows}});
            }
            json out = {{"ensemble", samples_->trajectories()}, {"seed", ssa_.seed}, {"times", times_}, {"genes", genes}};
            if (samples_->trajectories() >= 2) {
                std::vector<std::vector<double>> finals;
                for (std::size_t i = 0; i < net_.size(); ++i) finals.push_back(samples_->values(time_index(window_.horizon), i));
                try {
                    const auto fit = fit_final_data(finals, window_.horizon);
                    out["fit"] = {{"c", std::vector<double>(fit.slope().begin(), fit.slope().end())},
                                  {"b", std::vector<double>(fit.offset().begin(), fit.offset().end())}};
                } catch (const std::invalid_argument& e) {
                    out["fit"] = {{"error", e.what()}};
                }
            }
            session_.write_json("ssa_moments.json", out);
        });
    }

    // Histogram of the configured gene at time t, and envelope coverage when
    // an envelope is available.
    void compare(bool with_coverage) {
        session_.stage("compare", [&] {
            const std::size_t gene = cfg_.bounds.gene - 1;
            const auto v = samples_->values(time_index(window_.time), gene);
            BinRule rule;
            if (ssa_.bin_count) {
                rule.count = *ssa_.bin_count;
            } else {
                rule.width = ssa_.bin_width ? *ssa_.bin_width : 1.0;
                rule.origin = -0.5 * rule.width;
            }
            const auto hist = histogram(v, rule);
            std::string text = "bin_left,bin_right,density\n";
            for (std::size_t k = 0; k < hist.bins(); ++k)
                text += format_number(hist.edges[k]) + "," + format_number(hist.edges[k + 1]) + "," +
                        format_number(hist.density(k)) + "\n";
            session_.write("histogram.csv", text);
            if (!with_coverage) return;

            const auto env = make_envelope(proxies_[gene].lower, proxies_[gene].upper, moments_->mean[gene],
                                           moments_->abs_dev[gene]);
            const auto cov = envelope_coverage(hist, env, ssa_.min_bin_count);
            const auto ssa_m = sample_moments(v);
            session_.write_json("coverage.json",
                                {{"gene", gene + 1},
                                 {"t", window_.time},
                                 {"min_bin_count", ssa_.min_bin_count},
                                 {"bins_checked", cov.bins_checked},
                                 {"bins_inside", cov.bins_inside},
                                 {"fraction", cov.fraction()},
                                 {"envelope",
                                  {{"lambda", env.lower_variance},
                                   {"Lambda", env.upper_variance},
                                   {"mean", env.mean},
                                   {"abs_dev", env.abs_dev}}},
                                 {"ssa", {{"mean", ssa_m.mean}, {"abs_dev", ssa_m.abs_dev}, {"std_dev", ssa_m.std_dev}}}});
        });
    }

    bool envelope_ready() const { return abs_dev_given_ && moments_.has_value(); }

private:
    std::size_t time_index(double t) const {
        for (std::size_t s = 0; s < times_.size(); ++s)
            if (times_[s] == t) return s;
        throw std::logic_error("sample time missing");
    }

    const RunConfig& cfg_;
    GeneNetwork net_;
    TimeWindow window_;
    unsigned threads_;
    const CommandOptions& options_;
    Session& session_;
    SsaBlock ssa_;
    std::optional<GaussianFinalData> fd_;
    std::optional<Sizing> sizing_;
    std::optional<ThetaField> field_;
    std::optional<MomentReport> report_;
    std::optional<Moments> moments_;
    std::vector<GeneProxies> proxies_;
    bool abs_dev_given_ = true;
    std::vector<double> times_;
    std::optional<EnsembleSamples> samples_;
};

int run_validate(const CommandOptions& options, Session& session) {
    ValidationOptions vo;
    vo.threads = resolve_threads(options.threads);
    if (options.seed) vo.seed = *options.seed;
    const auto results = session.stage("validate", [&] { return run_validation_suite(vo); });
    json fixtures = json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        fixtures.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"target", r.target}, {"detail", r.detail}});
    }
    session.write_json("validation.json", {{"passed", all}, {"fixtures", fixtures}});
    return all ? kOk : kNumericalError;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"bounds", "solve", "expect", "ssa", "pipeline", "validate"};
    return names;
}

int run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& options) {
    std::ostream& log = options.log ? *options.log : std::cerr;
    auto diagnose = [&](int code, const std::string& kind, const std::string& stage, const std::string& message) {
        json d = {{"error", {{"kind", kind}, {"stage", stage}, {"message", message}}}, {"exit_code", code}};
        log << d.dump() << "\n";
        return code;
    };
    if (std::find(command_names().begin(), command_names().end(), name) == command_names().end())
        return diagnose(kConfigError, "config", "", "unknown command " + name);

    const fs::path dir = options.out ? *options.out : fs::path(cfg.out);
    std::optional<Session> session;
    try {
        session.emplace(name, dir, log);
    } catch (const IoError& e) {
        return diagnose(kIoError, "io", "setup", e.what());
    }

    int code = kOk;
    try {
        if (name == "validate") {
            code = run_validate(options, *session);
        } else {
            std::optional<Pipeline> p;
            try {
                p.emplace(cfg, options, *session);
            } catch (const std::exception& e) {
                throw StageFailure{"setup", kConfigError, "config", e.what()};
            }
            if (name == "bounds") {
                p->bounds();
            } else if (name == "solve") {
                p->write_theta();
            } else if (name == "expect") {
                p->expect();
            } else if (name == "ssa") {
                p->run_ssa();
                p->write_samples();
                p->compare(false);
            } else if (name == "pipeline") {
                p->bounds();
                p->run_ssa();
                p->compare(p->envelope_ready());
            }
        }
    } catch (const StageFailure& f) {
        session->write_manifest(false, f);
        return diagnose(f.code, f.kind, f.stage, f.message);
    }
    session->write_manifest(true, std::nullopt);
    return code;
}

}  // namespace grnbounds::app
