#include "animarl/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "animarl/dtw.hpp"
#include "animarl/errors.hpp"
#include "animarl/stats_util.hpp"

namespace animarl {

double chaser_path_length(const Episode& episode) {
    double total = 0.0;
    int n_chasers = 0;
    for (const auto& a : episode.agents) {
        if (a.role != Role::Chaser) continue;
        ++n_chasers;
        for (std::size_t t = 0; t + 1 < a.positions.size(); ++t)
            total += (a.positions[t + 1] - a.positions[t]).norm();
    }
    if (n_chasers == 0) return 0.0;
    return total / n_chasers;
}

std::vector<EpisodeMetrics> compute_metrics(const std::vector<Episode>& episodes,
                                            const std::vector<Episode>& gt_pool) {
    if (episodes.empty()) throw ContractError("compute_metrics: no episodes");
    std::vector<EpisodeMetrics> out;
    out.reserve(episodes.size());
    for (const Episode& e : episodes) {
        EpisodeMetrics m;
        m.episode_id = e.episode_id;
        m.condition = e.condition;
        m.contact_return = e.outcome == TerminationCause::Contact ? 1.0 : 0.0;
        m.path_length = chaser_path_length(e);
        m.duration = e.duration();
        if (!gt_pool.empty()) {
            const Episode& gt = match_expert(e.start_position_features(), gt_pool);
            m.dtw_to_gt = dtw_distance(e.position_features(), gt.position_features());
        }
        out.push_back(m);
    }
    return out;
}

double kde_bandwidth(const std::vector<double>& sample) {
    if (sample.size() < 2) throw ContractError("kde_bandwidth: need at least 2 samples");
    double sd = std::sqrt(variance_of(sample));
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = sd;
    if (iqr > 0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0)) throw DegenerateSampleError("kde_bandwidth: zero-variance sample");
    return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

namespace {

constexpr int kKdeGridPoints = 512;

double kde_at(const std::vector<double>& sample, double h, double x) {
    const double inv = 1.0 / (h * std::sqrt(2.0 * M_PI));
    double acc = 0.0;
    for (double xi : sample) {
        double z = (x - xi) / h;
        acc += std::exp(-0.5 * z * z);
    }
    return acc * inv / static_cast<double>(sample.size());
}

}  // namespace

double kde_gap(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
    if (sample_a.size() < 2 || sample_b.size() < 2)
        throw ContractError("kde_gap: each sample needs at least 2 values");
    double ha = kde_bandwidth(sample_a);
    double hb = kde_bandwidth(sample_b);

    std::vector<double> pooled = sample_a;
    pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
    double hp = kde_bandwidth(pooled);
    double lo = *std::min_element(pooled.begin(), pooled.end()) - 3.0 * hp;
    double hi = *std::max_element(pooled.begin(), pooled.end()) + 3.0 * hp;

    double dx = (hi - lo) / (kKdeGridPoints - 1);
    double gap = 0.0;
    double prev = 0.0;
    for (int i = 0; i < kKdeGridPoints; ++i) {
        double x = lo + i * dx;
        double cur = std::abs(kde_at(sample_a, ha, x) - kde_at(sample_b, hb, x));
        if (i > 0) gap += 0.5 * (prev + cur) * dx;
        prev = cur;
    }
    return gap;
}

BootstrapResult paired_bootstrap(const std::vector<double>& diffs, long n_rep, std::uint64_t seed,
                                 const std::string& statistic_name) {
    if (diffs.size() < 2) throw ContractError("paired_bootstrap: need at least 2 differences");
    if (n_rep < 1) throw ContractError("paired_bootstrap: need at least 1 replicate");
    const std::size_t n = diffs.size();
    std::vector<double> reps(static_cast<std::size_t>(n_rep));
    for (long r = 0; r < n_rep; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += diffs[rng.uniform_index(n)];
        reps[static_cast<std::size_t>(r)] = acc / static_cast<double>(n);
    }
    std::sort(reps.begin(), reps.end());
    BootstrapResult res;
    res.statistic_name = statistic_name;
    res.ci_low = quantile_sorted(reps, 0.025);
    res.median = quantile_sorted(reps, 0.5);
    res.ci_high = quantile_sorted(reps, 0.975);
    res.n_replicates = n_rep;
    res.seed = seed;
    return res;
}

double f_statistic(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ContractError("f_statistic: need at least 2 groups");
    std::size_t total_n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw ContractError("f_statistic: each group needs at least 2 values");
        for (double x : g) grand += x;
        total_n += g.size();
    }
    grand /= static_cast<double>(total_n);

    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double m = mean_of(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ssw += (x - m) * (x - m);
    }
    double msb = ssb / static_cast<double>(groups.size() - 1);
    double msw = ssw / static_cast<double>(total_n - groups.size());
    if (msw <= 0.0) return std::numeric_limits<double>::infinity();
    return msb / msw;
}

BootstrapResult bootstrap_anova(const std::vector<std::vector<double>>& groups, long n_rep,
                                std::uint64_t seed) {
    if (groups.size() < 2) throw ContractError("bootstrap_anova: need at least 2 groups");
    for (const auto& g : groups)
        if (g.size() < 2) throw ContractError("bootstrap_anova: degenerate group");
    if (n_rep < 1) throw ContractError("bootstrap_anova: need at least 1 replicate");

    std::vector<double> fs(static_cast<std::size_t>(n_rep));
    std::vector<std::vector<double>> resampled(groups.size());
    for (long r = 0; r < n_rep; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        for (std::size_t g = 0; g < groups.size(); ++g) {
            resampled[g].resize(groups[g].size());
            for (std::size_t i = 0; i < groups[g].size(); ++i)
                resampled[g][i] = groups[g][rng.uniform_index(groups[g].size())];
        }
        fs[static_cast<std::size_t>(r)] = f_statistic(resampled);
    }
    std::sort(fs.begin(), fs.end());
    BootstrapResult res;
    res.statistic_name = "bootstrap_anova_F";
    res.ci_low = quantile_sorted(fs, 0.025);
    res.median = quantile_sorted(fs, 0.5);
    res.ci_high = quantile_sorted(fs, 0.975);
    res.n_replicates = n_rep;
    res.seed = seed;
    return res;
}

BootstrapResult counterfactual_shift(const std::vector<Policy*>& chaser_policies,
                                     const WorldConfig& cfg, int condition_from, int condition_to,
                                     int n_episodes, std::uint64_t seed, double eps, long n_rep,
                                     const std::vector<Episode>* demo_pool) {
    if (n_episodes < 2) throw ContractError("counterfactual_shift: need at least 2 episodes");
    RolloutOptions opt;
    opt.eps = eps;
    opt.n_episodes = n_episodes;
    opt.seed = seed;
    opt.demo_pool = demo_pool;

    opt.condition = condition_from;
    std::vector<Episode> from = rollout(chaser_policies, cfg, opt);
    opt.condition = condition_to;
    std::vector<Episode> to = rollout(chaser_policies, cfg, opt);

    std::vector<double> diffs(from.size());
    for (std::size_t i = 0; i < from.size(); ++i)
        diffs[i] = chaser_path_length(to[i]) - chaser_path_length(from[i]);
    std::string name = "path_length_shift_" + std::to_string(condition_from + 1) + "to" +
                       std::to_string(condition_to + 1);
    return paired_bootstrap(diffs, n_rep, seed, name);
}

void write_metrics_csv(const std::vector<EpisodeMetrics>& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write metrics csv: " + path);
    out << "episode_id,condition,return,path_length,duration,dtw_to_gt\n";
    for (const auto& m : metrics)
        out << m.episode_id << "," << m.condition << "," << format_double(m.contact_return) << ","
            << format_double(m.path_length) << "," << format_double(m.duration) << ","
            << format_double(m.dtw_to_gt) << "\n";
}

void write_bootstrap_csv(const std::vector<BootstrapResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bootstrap csv: " + path);
    out << "# kde gap convention: L1 distance between density curves\n";
    out << "statistic,median,ci_low,ci_high,n_replicates,seed\n";
    for (const auto& r : results)
        out << r.statistic_name << "," << format_double(r.median) << ","
            << format_double(r.ci_low) << "," << format_double(r.ci_high) << ","
            << r.n_replicates << "," << r.seed << "\n";
}

void write_violin_csv(const std::vector<ViolinRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write violin csv: " + path);
    out << "method,metric,value\n";
    for (const auto& r : rows)
        out << r.method << "," << r.metric << "," << format_double(r.value) << "\n";
}

}  // namespace animarl
