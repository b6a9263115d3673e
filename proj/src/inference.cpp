#include "sbt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sbt {

namespace {

struct ContainmentTally {
    std::vector<Index> contained;
    Index undefined = 0;

    ContainmentTally& operator+=(const ContainmentTally& other) {
        for (std::size_t t = 0; t < contained.size(); ++t) contained[t] += other.contained[t];
        undefined += other.undefined;
        return *this;
    }
};

GroupPartition single_stratum(Index rows) {
    GroupPartition p;
    p.levels = {"all"};
    p.index_sets.resize(1);
    p.index_sets[0].resize(static_cast<std::size_t>(rows));
    std::iota(p.index_sets[0].begin(), p.index_sets[0].end(), Index{0});
    p.n_rows = rows;
    return p;
}

// Counts, per target, the replicates whose top-|target| set contains it.
// A target covering every item is always contained.
ContainmentTally count_containment(const Eigen::MatrixXd& values, const std::vector<std::vector<Index>>& targets,
                                   const ResampleSpec& spec, std::uint64_t seed, const SummaryStatistic& stat,
                                   bool decreasing, Index workers, std::uint32_t stream_key) {
    const Index k = values.cols();
    const auto stratum = single_stratum(values.rows());
    ContainmentTally identity{std::vector<Index>(targets.size(), 0), 0};

    return run_replicates(
        stratum, spec, seed, workers, identity,
        [&](const ReplicateDraw& draw) {
            ContainmentTally tally{std::vector<Index>(targets.size(), 0), 0};
            thread_local std::vector<double> scratch;
            const Eigen::VectorXd stats = column_statistics(values, draw.per_stratum_rows[0], stat, scratch);
            const bool any_defined = (stats.array() == stats.array()).any();
            std::vector<Index> position(static_cast<std::size_t>(k), k);
            if (any_defined) {
                const auto order = rank_items(stats, decreasing);
                for (Index p = 0; p < k; ++p) position[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;
            } else {
                tally.undefined = 1;
            }
            for (std::size_t t = 0; t < targets.size(); ++t) {
                const auto size = static_cast<Index>(targets[t].size());
                bool inside = size == k;
                if (!inside && any_defined) {
                    inside = std::all_of(targets[t].begin(), targets[t].end(),
                                         [&](Index j) { return position[static_cast<std::size_t>(j)] < size; });
                }
                tally.contained[t] += inside ? 1 : 0;
            }
            return tally;
        },
        stream_key);
}

std::string undefined_warning(Index count, std::string_view context) {
    return std::to_string(count) + " replicate(s) " + std::string(context) +
           " had undefined statistics and were counted as non-events";
}

OrderingTestResult ordering_test(const ResponseMatrix& matrix, const GroupPartition& partition,
                                 std::optional<Index> split, const ResampleSpec& spec, Index workers,
                                 std::uint32_t stream_key) {
    if (matrix.cols() != 1)
        throw ConfigError("ordering tests need exactly one score column (got " + std::to_string(matrix.cols()) + ")");
    const Index G = partition.group_count();
    if (G < 2) throw ConfigError("ordering tests need at least 2 groups (got " + std::to_string(G) + ")");
    if (split && (*split < 1 || *split > G - 1))
        throw ConfigError("split " + std::to_string(*split) + " outside [1, " + std::to_string(G - 1) + "]");

    const auto stat = SummaryStatistic::mean();
    const MeanTable observed = group_means(matrix, partition, stat);
    for (Index g = 0; g < G; ++g) {
        if (std::isnan(observed.means(g, 0)))
            throw DataError("group '" + partition.levels[static_cast<std::size_t>(g)] + "' has no non-missing scores");
    }

    // position p holds group order[p]
    const auto order = rank_items(observed.means.col(0), true);

    OrderingTestResult result;
    result.split = split;
    result.n_boot = spec.n_boot();
    result.seed = spec.resolve_seed();
    for (const Index g : order) {
        result.group_order.push_back(partition.levels[static_cast<std::size_t>(g)]);
        result.observed_means.push_back(observed.means(g, 0));
        result.group_sizes.push_back(partition.size(g));
    }

    struct EventTally {
        Index events = 0;
        Index undefined = 0;
        EventTally& operator+=(const EventTally& o) {
            events += o.events;
            undefined += o.undefined;
            return *this;
        }
    };

    const auto tally = run_replicates(
        partition, spec, result.seed, workers, EventTally{},
        [&](const ReplicateDraw& draw) {
            thread_local std::vector<double> scratch;
            std::vector<double> means(static_cast<std::size_t>(G));
            for (Index p = 0; p < G; ++p) {
                const auto& rows = draw.per_stratum_rows[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])];
                means[static_cast<std::size_t>(p)] = column_statistics(matrix.values, rows, stat, scratch)(0);
            }
            if (std::any_of(means.begin(), means.end(), [](double m) { return std::isnan(m); }))
                return EventTally{0, 1};
            bool event = true;
            if (split) {
                const double low = *std::min_element(means.begin(), means.begin() + *split);
                const double high = *std::max_element(means.begin() + *split, means.end());
                event = low > high;
            } else {
                for (std::size_t p = 0; p + 1 < means.size() && event; ++p) event = means[p] > means[p + 1];
            }
            return EventTally{event ? 1 : 0, 0};
        },
        stream_key);

    result.event_count = tally.events;
    result.undefined_replicates = tally.undefined;
    result.p_hat = static_cast<double>(tally.events) / static_cast<double>(spec.n_boot());
    if (tally.undefined > 0) result.warnings.push_back(undefined_warning(tally.undefined, "of the ordering test"));
    return result;
}

}  // namespace

NonContainmentEstimate single_stratified_bootstrap(const Eigen::MatrixXd& values, std::span<const Index> target,
                                                   const ResampleSpec& spec, const SummaryStatistic& stat,
                                                   bool decreasing, Index workers, std::uint32_t stream_key) {
    const Index k = values.cols();
    if (values.rows() < 1 || k < 1) throw ConfigError("single_stratified_bootstrap needs a non-empty matrix");
    if (target.empty()) throw ConfigError("target indices must not be empty");
    if (static_cast<Index>(target.size()) > k)
        throw ConfigError("target has " + std::to_string(target.size()) + " indices but only " + std::to_string(k) +
                          " columns exist");
    std::vector<Index> t(target.begin(), target.end());
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw ConfigError("target indices must be distinct");
    if (t.front() < 0 || t.back() >= k) throw ConfigError("target index outside [0, " + std::to_string(k) + ")");

    NonContainmentEstimate out;
    out.seed = spec.resolve_seed();
    out.n_boot = spec.n_boot();
    const auto tally = count_containment(values, {t}, spec, out.seed, stat, decreasing, workers, stream_key);
    out.contained = tally.contained[0];
    out.undefined_replicates = tally.undefined;
    out.rate = 1.0 - static_cast<double>(out.contained) / static_cast<double>(out.n_boot);
    return out;
}

SbtReport get_sbt(const ResponseMatrix& matrix, const GroupPartition& partition, const ResampleSpec& spec,
                  const SbtOptions& options) {
    const Index G = partition.group_count();
    const Index k = matrix.cols();
    if (G < 1) throw ConfigError("get_sbt needs at least one group");
    if (k < 1) throw ConfigError("get_sbt needs at least one response column");
    if (options.min_group_size < 1) throw ConfigError("min_group_size must be at least 1");

    SbtReport report;
    report.n_boot = spec.n_boot();
    report.seed = spec.resolve_seed();
    report.mean_table = group_means(matrix, partition, options.stat);
    report.group_sizes = partition.sizes();
    report.noncontainment.group_names = partition.levels;
    for (Index i = 1; i <= k; ++i) report.noncontainment.columns.push_back("top_" + std::to_string(i));
    report.noncontainment.rates.resize(G, k);

    for (Index g = 0; g < G; ++g) {
        const auto& name = partition.levels[static_cast<std::size_t>(g)];
        const Eigen::VectorXd observed = report.mean_table.means.row(g).transpose();
        if (!(observed.array() == observed.array()).any())
            throw DataError("group '" + name + "' has no usable observations in any response column");
        if (partition.size(g) < options.min_group_size)
            report.warnings.push_back(small_group_warning(name, partition.size(g), options.min_group_size));
        for (Index j = 0; j < k; ++j) {
            if (std::isnan(observed(j)))
                report.warnings.push_back("group '" + name + "' has no observations for item '" +
                                          matrix.item_names[static_cast<std::size_t>(j)] + "'");
        }

        const auto ranking = rank_items(observed, options.decreasing);
        std::vector<std::vector<Index>> targets;
        for (Index i = 1; i <= k; ++i) targets.emplace_back(ranking.begin(), ranking.begin() + i);

        const Eigen::MatrixXd rows = matrix.values(partition.index_sets[static_cast<std::size_t>(g)], Eigen::all);
        const auto tally = count_containment(rows, targets, spec, report.seed, options.stat, options.decreasing,
                                             options.workers, static_cast<std::uint32_t>(g));
        for (Index i = 0; i < k; ++i) {
            report.noncontainment.rates(g, i) =
                1.0 - static_cast<double>(tally.contained[static_cast<std::size_t>(i)]) /
                          static_cast<double>(spec.n_boot());
        }
        if (tally.undefined > 0)
            report.warnings.push_back(undefined_warning(tally.undefined, "for group '" + name + "'"));
    }
    return report;
}

OrderingTestResult ordering_split_test(const ResponseMatrix& matrix, const GroupPartition& partition, Index split,
                                       const ResampleSpec& spec, Index workers, std::uint32_t stream_key) {
    return ordering_test(matrix, partition, split, spec, workers, stream_key);
}

OrderingTestResult total_ordering_test(const ResponseMatrix& matrix, const GroupPartition& partition,
                                       const ResampleSpec& spec, Index workers, std::uint32_t stream_key) {
    return ordering_test(matrix, partition, std::nullopt, spec, workers, stream_key);
}

double OrderingTestResult::std_error() const {
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n_boot));
}

double OrderingTestResult::p_hat_add_one() const {
    return static_cast<double>(event_count + 1) / static_cast<double>(n_boot + 1);
}

ResponseMatrix select_column(const ResponseMatrix& matrix, Index j) {
    if (j < 0 || j >= matrix.cols()) throw ConfigError("column index " + std::to_string(j) + " out of range");
    ResponseMatrix out;
    out.values = matrix.values.col(j);
    out.item_names = {matrix.item_names[static_cast<std::size_t>(j)]};
    return out;
}

ResponseMatrix row_mean_score(const ResponseMatrix& matrix, std::string name) {
    ResponseMatrix out;
    out.values.resize(matrix.rows(), 1);
    for (Index r = 0; r < matrix.rows(); ++r) {
        double sum = 0.0;
        Index count = 0;
        for (Index j = 0; j < matrix.cols(); ++j) {
            const double v = matrix.values(r, j);
            if (std::isnan(v)) continue;
            sum += v;
            ++count;
        }
        out.values(r, 0) = count == 0 ? std::nan("") : sum / static_cast<double>(count);
    }
    out.item_names = {std::move(name)};
    return out;
}

}  // namespace sbt
