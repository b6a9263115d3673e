#pragma once

#include "sbt/ingest.hpp"
#include "sbt/resample.hpp"
#include "sbt/summary.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbt {

struct NonContainmentEstimate {
    double rate = 0.0;
    Index contained = 0;
    Index n_boot = 0;
    /// Replicates whose statistics were all undefined; counted as not containing.
    Index undefined_replicates = 0;
    std::uint64_t seed = 0;
};

/// Fraction of bootstrap replicates whose top-|target| item set fails to
/// contain `target`. All rows of `values` form one stratum.
NonContainmentEstimate single_stratified_bootstrap(const Eigen::MatrixXd& values, std::span<const Index> target,
                                                   const ResampleSpec& spec,
                                                   const SummaryStatistic& stat = SummaryStatistic::mean(),
                                                   bool decreasing = true, Index workers = 1,
                                                   std::uint32_t stream_key = 0);

/// Groups x {top_1 .. top_k}.
struct NonContainmentMatrix {
    std::vector<std::string> group_names;
    std::vector<std::string> columns;
    Eigen::MatrixXd rates;
};

struct SbtOptions {
    SummaryStatistic stat = SummaryStatistic::mean();
    bool decreasing = true;
    Index min_group_size = 3;
    Index workers = 1;
};

struct SbtReport {
    MeanTable mean_table;
    NonContainmentMatrix noncontainment;
    std::vector<Index> group_sizes;
    std::vector<std::string> warnings;
    Index n_boot = 0;
    std::uint64_t seed = 0;
};

/// Per-group mean table and top-i non-containment rates. Group g resamples
/// only its own rows, with streams keyed on (seed, g, replicate).
SbtReport get_sbt(const ResponseMatrix& matrix, const GroupPartition& partition, const ResampleSpec& spec,
                  const SbtOptions& options = {});

struct OrderingTestResult {
    /// Group names by observed mean, largest first (ties keep level order).
    std::vector<std::string> group_order;
    std::vector<double> observed_means;
    std::vector<Index> group_sizes;
    /// Split position g; nullopt for the strict total-ordering chain.
    std::optional<Index> split;
    Index n_boot = 0;
    Index event_count = 0;
    double p_hat = 0.0;
    Index undefined_replicates = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    /// sqrt(p(1-p)/B).
    double std_error() const;
    /// (count + 1) / (B + 1).
    double p_hat_add_one() const;
};

/// Probability over stratified bootstrap replicates that the smallest mean
/// among the first `split` groups (observed order) strictly exceeds the
/// largest mean among the rest. `matrix` must hold a single score column.
OrderingTestResult ordering_split_test(const ResponseMatrix& matrix, const GroupPartition& partition, Index split,
                                       const ResampleSpec& spec, Index workers = 1, std::uint32_t stream_key = 0);

/// Probability that replicate means form a strictly decreasing chain in the
/// observed order.
OrderingTestResult total_ordering_test(const ResponseMatrix& matrix, const GroupPartition& partition,
                                       const ResampleSpec& spec, Index workers = 1, std::uint32_t stream_key = 0);

/// Column `j` of `matrix` as a one-column matrix.
ResponseMatrix select_column(const ResponseMatrix& matrix, Index j);

/// Per-row mean of the non-missing items; rows with none stay missing.
ResponseMatrix row_mean_score(const ResponseMatrix& matrix, std::string name = "row_mean");

}  // namespace sbt
