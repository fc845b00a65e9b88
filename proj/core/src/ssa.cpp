#include "grnbounds/ssa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "grnbounds/errors.hpp"
#include "grnbounds/parallel.hpp"
#include "grnbounds/philox.hpp"

namespace grnbounds {

namespace {

// Counts this large make Theta and the degradation propensity meaningless.
constexpr std::int64_t kCountCeiling = std::int64_t{1} << 50;

void fill_propensities(const GeneNetwork& net, const std::int64_t* counts, double* out) {
    const std::size_t n = net.size();
    const auto& a = net.regulation();
    for (std::size_t i = 0; i < n; ++i) {
        double theta = 0.0;
        for (std::size_t j = 0; j < n; ++j) theta += a(i, j) * static_cast<double>(counts[j]);
        out[i] = net.max_synthesis()[i] * sigmoid(theta);
        out[n + i] = net.degradation()[i] * static_cast<double>(counts[i]);
    }
}

// Direct-method SSA. `on_hold(t_from, t_to, state)` is called for every
// interval on which the state is constant, the last one ending at the horizon.
template <class OnHold>
void run_path(const SsaConfig& cfg, std::uint64_t index, OnHold&& on_hold) {
    const std::size_t n = cfg.net.size();
    std::vector<std::int64_t> state(cfg.initial.begin(), cfg.initial.end());
    std::vector<double> prop(2 * n);
    CounterStream rng(cfg.seed, index);

    double t = 0.0;
    for (std::size_t events = 0;; ++events) {
        fill_propensities(cfg.net, state.data(), prop.data());
        double total = 0.0;
        for (double p : prop) total += p;
        if (!std::isfinite(total)) {
            throw NumericalError("ssa: trajectory " + std::to_string(index) +
                                 " propensity overflow at t = " + std::to_string(t));
        }
        if (total <= 0.0) {
            on_hold(t, cfg.horizon, std::span<const std::int64_t>(state));
            return;
        }
        const double t_next = t + rng.exponential() / total;
        if (t_next > cfg.horizon) {
            on_hold(t, cfg.horizon, std::span<const std::int64_t>(state));
            return;
        }
        if (events >= cfg.max_events) {
            throw NumericalError("ssa: trajectory " + std::to_string(index) + " exceeded " +
                                 std::to_string(cfg.max_events) + " events before the horizon");
        }
        on_hold(t, t_next, std::span<const std::int64_t>(state));

        const double target = rng.uniform() * total;
        std::size_t r = 0;
        double acc = prop[0];
        while (acc <= target && r + 1 < prop.size()) acc += prop[++r];
        // Rounding can land on a zero-propensity channel; step back to a live one.
        while (prop[r] <= 0.0 && r > 0) --r;

        if (r < n) {
            if (++state[r] > kCountCeiling) {
                throw NumericalError("ssa: trajectory " + std::to_string(index) + " gene " +
                                     std::to_string(r + 1) + " count runaway at t = " +
                                     std::to_string(t_next));
            }
        } else {
            --state[r - n];
        }
        t = t_next;
    }
}

}  // namespace

void SsaConfig::validate() const {
    if (initial.size() != net.size())
        throw std::invalid_argument("SsaConfig: initial counts must have one entry per gene");
    for (auto c : initial)
        if (c < 0) throw std::invalid_argument("SsaConfig: initial counts must be >= 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("SsaConfig: horizon must be > 0");
    if (ensemble < 1) throw std::invalid_argument("SsaConfig: ensemble must be >= 1");
}

std::vector<double> step_propensities(const GeneNetwork& net, std::span<const std::int64_t> counts) {
    if (counts.size() != net.size()) throw std::invalid_argument("step_propensities: dimension mismatch");
    for (auto c : counts)
        if (c < 0) throw std::invalid_argument("step_propensities: counts must be >= 0");
    std::vector<double> out(2 * net.size());
    fill_propensities(net, counts.data(), out.data());
    return out;
}

Trajectory::Trajectory(std::size_t genes, std::vector<double> times, std::vector<std::int64_t> states)
    : genes_(genes), times_(std::move(times)), states_(std::move(states)) {
    if (times_.empty() || states_.size() != times_.size() * genes_)
        throw std::invalid_argument("Trajectory: inconsistent storage");
}

std::span<const std::int64_t> Trajectory::state_at(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return state(k);
}

Trajectory simulate_trajectory(const SsaConfig& cfg, std::uint64_t index) {
    cfg.validate();
    std::vector<double> times;
    std::vector<std::int64_t> states;
    run_path(cfg, index, [&](double from, double, std::span<const std::int64_t> s) {
        times.push_back(from);
        states.insert(states.end(), s.begin(), s.end());
    });
    return Trajectory(cfg.net.size(), std::move(times), std::move(states));
}

EnsembleSamples::EnsembleSamples(std::vector<double> times, std::size_t genes, std::size_t trajectories)
    : times_(std::move(times)),
      genes_(genes),
      trajectories_(trajectories),
      counts_(times_.size() * genes * trajectories, 0) {}

std::vector<double> EnsembleSamples::values(std::size_t time_index, std::size_t gene) const {
    std::vector<double> out(trajectories_);
    for (std::size_t k = 0; k < trajectories_; ++k) out[k] = static_cast<double>(at(k, time_index, gene));
    return out;
}

EnsembleSamples simulate_ensemble(const SsaConfig& cfg, std::span<const double> sample_times,
                                  unsigned threads) {
    cfg.validate();
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("simulate_ensemble: sample times must be sorted");
    for (double s : sample_times)
        if (!(s >= 0.0 && s <= cfg.horizon))
            throw std::invalid_argument("simulate_ensemble: sample times must lie in [0, horizon]");

    const std::size_t n = cfg.net.size();
    EnsembleSamples out({sample_times.begin(), sample_times.end()}, n, cfg.ensemble);
    parallel_for(cfg.ensemble, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            auto slot = out.slot(k);
            std::size_t next = 0;
            run_path(cfg, k, [&](double from, double to, std::span<const std::int64_t> s) {
                // Sample time t sees the state held on [from, to); the final
                // hold also owns t = horizon.
                const bool last = to >= cfg.horizon;
                while (next < sample_times.size() &&
                       sample_times[next] >= from &&
                       (sample_times[next] < to || (last && sample_times[next] <= to))) {
                    std::copy(s.begin(), s.end(), slot.begin() + static_cast<std::ptrdiff_t>(next * n));
                    ++next;
                }
            });
        }
    });
    return out;
}

std::vector<std::int64_t> initial_counts_from(const GaussianFinalData& fd) {
    std::vector<std::int64_t> out;
    out.reserve(fd.size());
    for (double b : fd.offset()) out.push_back(static_cast<std::int64_t>(std::llround(b)));
    return out;
}

SampleMoments sample_moments(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("sample_moments: need at least 2 samples");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double abs_dev = 0.0, sq = 0.0;
    for (double v : samples) {
        abs_dev += std::abs(v - mean);
        sq += (v - mean) * (v - mean);
    }
    const auto count = static_cast<double>(samples.size());
    return {mean, abs_dev / count, std::sqrt(sq / (count - 1.0))};
}

GaussianFinalData fit_final_data(const std::vector<std::vector<double>>& per_gene_samples,
                                 double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("fit_final_data: horizon must be > 0");
    if (per_gene_samples.empty()) throw std::invalid_argument("fit_final_data: no genes");
    std::vector<double> c, b;
    for (std::size_t i = 0; i < per_gene_samples.size(); ++i) {
        const auto m = sample_moments(per_gene_samples[i]);
        const double slope = m.std_dev / std::sqrt(horizon);
        if (!(slope > 0.0) || !(m.mean > 0.0)) {
            throw std::invalid_argument("fit_final_data: gene " + std::to_string(i + 1) +
                                        " gives c = " + std::to_string(slope) + ", b = " +
                                        std::to_string(m.mean) +
                                        "; the Gaussian final-data surrogate does not apply");
        }
        c.push_back(slope);
        b.push_back(m.mean);
    }
    return GaussianFinalData(std::move(c), std::move(b));
}

double Histogram::density(std::size_t k) const {
    return static_cast<double>(counts.at(k)) / (static_cast<double>(total) * width(k));
}

Histogram histogram(std::span<const double> samples, const BinRule& rule) {
    if (samples.empty()) throw std::invalid_argument("histogram: no samples");
    if ((rule.count > 0) == (rule.width > 0.0))
        throw std::invalid_argument("histogram: set exactly one of bin count and bin width");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("histogram: non-finite sample");

    Histogram h;
    h.total = samples.size();
    if (rule.width > 0.0) {
        const double w = rule.width;
        const auto first = static_cast<std::int64_t>(std::floor((lo - rule.origin) / w));
        const auto last = static_cast<std::int64_t>(std::floor((hi - rule.origin) / w)) + 1;
        for (std::int64_t k = first; k <= last; ++k) h.edges.push_back(rule.origin + static_cast<double>(k) * w);
        h.counts.assign(h.edges.size() - 1, 0);
        for (double v : samples) {
            auto k = static_cast<std::size_t>(std::floor((v - rule.origin) / w) - static_cast<double>(first));
            k = std::min(k, h.counts.size() - 1);
            ++h.counts[k];
        }
    } else {
        if (!(hi > lo)) throw std::invalid_argument("histogram: degenerate bins (all samples equal)");
        const double w = (hi - lo) / static_cast<double>(rule.count);
        for (std::size_t k = 0; k <= rule.count; ++k) h.edges.push_back(lo + static_cast<double>(k) * w);
        h.edges.back() = hi;
        h.counts.assign(rule.count, 0);
        for (double v : samples) {
            auto k = static_cast<std::size_t>((v - lo) / w);
            ++h.counts[std::min(k, rule.count - 1)];
        }
    }
    for (std::size_t k = 0; k + 1 < h.edges.size(); ++k)
        if (!(h.edges[k + 1] > h.edges[k])) throw std::invalid_argument("histogram: degenerate bins");
    return h;
}

Coverage envelope_coverage(const Histogram& hist, const DensityEnvelope& env, std::size_t min_count) {
    Coverage cov;
    for (std::size_t k = 0; k < hist.bins(); ++k) {
        if (hist.counts[k] < min_count || hist.counts[k] == 0) continue;
        const double l = hist.edges[k], r = hist.edges[k + 1], m = 0.5 * (l + r);
        // Simpson average of each curve over the bin.
        const auto bl = density_bounds(env, l), bm = density_bounds(env, m), br = density_bounds(env, r);
        const double lower = (bl.lower + 4.0 * bm.lower + br.lower) / 6.0;
        const double upper = (bl.upper + 4.0 * bm.upper + br.upper) / 6.0;
        const double d = hist.density(k);
        ++cov.bins_checked;
        if (d >= lower && d <= upper) ++cov.bins_inside;
    }
    return cov;
}

}  // namespace grnbounds
