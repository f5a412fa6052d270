#ifndef ANIMARL_EVAL_STATS_HPP
#define ANIMARL_EVAL_STATS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "animarl/config.hpp"
#include "animarl/episode.hpp"
#include "animarl/train.hpp"

namespace animarl {

struct EpisodeMetrics {
    long episode_id = 0;
    int condition = 0;
    double contact_return = 0.0;  // 1 when the episode ended in contact
    double path_length = 0.0;     // mean over chasers
    double duration = 0.0;        // seconds
    double dtw_to_gt = 0.0;       // warping cost against the matched GT episode
};

// Per-episode metrics; DTW is computed against the nearest-start episode in
// gt_pool.
std::vector<EpisodeMetrics> compute_metrics(const std::vector<Episode>& episodes,
                                            const std::vector<Episode>& gt_pool);

double chaser_path_length(const Episode& episode);

// Silverman rule-of-thumb bandwidth.
double kde_bandwidth(const std::vector<double>& sample);

// Integrated absolute difference between Gaussian kernel density estimates,
// evaluated on a 512-point grid spanning the pooled range +-3 pooled
// bandwidths.
double kde_gap(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

struct BootstrapResult {
    std::string statistic_name;
    double median = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long n_replicates = 0;
    std::uint64_t seed = 0;
};

constexpr long kDefaultBootstrapReplicates = 10000;

// Percentile bootstrap over per-episode paired differences; deterministic
// given seed via per-replicate counter-based streams.
BootstrapResult paired_bootstrap(const std::vector<double>& diffs, long n_rep, std::uint64_t seed,
                                 const std::string& statistic_name = "paired_diff");

// Classical one-way F statistic (between-group over within-group mean squares).
double f_statistic(const std::vector<std::vector<double>>& groups);

// Median and 95% CI of the F statistic over within-group resamples.
BootstrapResult bootstrap_anova(const std::vector<std::vector<double>>& groups, long n_rep,
                                std::uint64_t seed);

// Paired condition-flip rollouts (same seeds), bootstrap CI of the
// per-episode path-length shift, sign convention to - from.
BootstrapResult counterfactual_shift(const std::vector<Policy*>& chaser_policies,
                                     const WorldConfig& cfg, int condition_from, int condition_to,
                                     int n_episodes, std::uint64_t seed, double eps = 0.0,
                                     long n_rep = kDefaultBootstrapReplicates,
                                     const std::vector<Episode>* demo_pool = nullptr);

// --- report files ---

void write_metrics_csv(const std::vector<EpisodeMetrics>& metrics, const std::string& path);
void write_bootstrap_csv(const std::vector<BootstrapResult>& results, const std::string& path);

struct ViolinRow {
    std::string method;
    std::string metric;
    double value = 0.0;
};
void write_violin_csv(const std::vector<ViolinRow>& rows, const std::string& path);

}  // namespace animarl

#endif
