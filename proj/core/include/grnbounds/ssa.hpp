#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "grnbounds/bounds.hpp"
#include "grnbounds/model.hpp"

namespace grnbounds {

/// Exact stochastic simulation of the birth-death reading of the rate
/// function: gene i gains a protein at rate nu_i / (1 + e^{-Theta_i}), with
/// Theta computed from the integer counts, and loses one at rate rho_i count_i.
struct SsaConfig {
    GeneNetwork net;
    std::vector<std::int64_t> initial;
    double horizon = 0.0;
    std::size_t ensemble = 1;
    std::uint64_t seed = 0;
    std::size_t max_events = 200'000'000;  ///< per trajectory, guards runaway paths

    void validate() const;
};

/// [synthesis_1..synthesis_n, degradation_1..degradation_n].
std::vector<double> step_propensities(const GeneNetwork& net, std::span<const std::int64_t> counts);

/// Piecewise-constant path: state k holds on [times[k], times[k+1]).
class Trajectory {
public:
    Trajectory(std::size_t genes, std::vector<double> times, std::vector<std::int64_t> states);

    std::size_t genes() const noexcept { return genes_; }
    std::size_t events() const noexcept { return times_.size() - 1; }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const std::int64_t> state(std::size_t k) const {
        return {states_.data() + k * genes_, genes_};
    }
    /// State after the last event at or before t.
    std::span<const std::int64_t> state_at(double t) const;

private:
    std::size_t genes_;
    std::vector<double> times_;
    std::vector<std::int64_t> states_;
};

/// Full path of trajectory `index` up to the horizon. The random stream is a
/// function of (cfg.seed, index) only.
Trajectory simulate_trajectory(const SsaConfig& cfg, std::uint64_t index);

/// Counts of every trajectory at each sample time, laid out [trajectory][time][gene].
class EnsembleSamples {
public:
    EnsembleSamples(std::vector<double> times, std::size_t genes, std::size_t trajectories);

    std::span<const double> times() const noexcept { return times_; }
    std::size_t genes() const noexcept { return genes_; }
    std::size_t trajectories() const noexcept { return trajectories_; }

    std::int64_t at(std::size_t trajectory, std::size_t time_index, std::size_t gene) const {
        return counts_[(trajectory * times_.size() + time_index) * genes_ + gene];
    }
    std::span<std::int64_t> slot(std::size_t trajectory) {
        return {counts_.data() + trajectory * times_.size() * genes_, times_.size() * genes_};
    }

    /// All trajectories' values of one gene at one sample time.
    std::vector<double> values(std::size_t time_index, std::size_t gene) const;

private:
    std::vector<double> times_;
    std::size_t genes_;
    std::size_t trajectories_;
    std::vector<std::int64_t> counts_;
};

/// Runs cfg.ensemble trajectories (in parallel when threads > 1) and records
/// each at the sorted `sample_times` (all within [0, horizon]). Identical to
/// reading simulate_trajectory(cfg, k).state_at(t) for every k and t.
EnsembleSamples simulate_ensemble(const SsaConfig& cfg, std::span<const double> sample_times,
                                  unsigned threads = 1);

/// Rounded offsets b, used as launch counts when none are configured.
std::vector<std::int64_t> initial_counts_from(const GaussianFinalData& fd);

struct SampleMoments {
    double mean;
    double abs_dev;   ///< mean |x - mean|
    double std_dev;   ///< unbiased
};

SampleMoments sample_moments(std::span<const double> samples);

/// Moment matching of eta_T ~ c B_T + b: b = sample mean, c = sample sd / sqrt(T).
/// per_gene_samples[i] holds the final values of gene i. Throws
/// std::invalid_argument when a fitted c_i or b_i is not positive.
GaussianFinalData fit_final_data(const std::vector<std::vector<double>>& per_gene_samples,
                                 double horizon);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    double width(std::size_t k) const { return edges[k + 1] - edges[k]; }
    /// counts / (total * width)
    double density(std::size_t k) const;
};

/// Exactly one of `count` and `width` is set. With `width`, edges sit on
/// origin + k * width; with `count`, the range [min, max] is split evenly.
struct BinRule {
    std::size_t count = 0;
    double width = 0.0;
    double origin = 0.0;
};

Histogram histogram(std::span<const double> samples, const BinRule& rule);

struct Coverage {
    std::size_t bins_checked = 0;
    std::size_t bins_inside = 0;
    double fraction() const noexcept {
        return bins_checked == 0 ? 0.0 : static_cast<double>(bins_inside) / static_cast<double>(bins_checked);
    }
};

/// Share of bins with at least `min_count` samples whose density lies between
/// the bin averages of the lower and upper envelope curves.
Coverage envelope_coverage(const Histogram& hist, const DensityEnvelope& env, std::size_t min_count = 0);

}  // namespace grnbounds
