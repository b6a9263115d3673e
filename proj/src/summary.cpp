#include "sbt/summary.hpp"

namespace sbt {

std::string SummaryStatistic::name() const {
    switch (kind_) {
        case Kind::mean: return "mean";
        case Kind::median: return "median";
        case Kind::custom: return "custom";
    }
    return "?";
}

double SummaryStatistic::reduce(std::span<double> scratch) const {
    if (scratch.empty()) return std::nan("");
    switch (kind_) {
        case Kind::mean: {
            double sum = 0.0;
            for (const double v : scratch) sum += v;
            return sum / static_cast<double>(scratch.size());
        }
        case Kind::median: {
            const auto n = scratch.size();
            const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
            std::nth_element(scratch.begin(), mid, scratch.end());
            if (n % 2 == 1) return *mid;
            const double upper = *mid;
            const double lower = *std::max_element(scratch.begin(), mid);
            return lower + (upper - lower) / 2.0;
        }
        case Kind::custom: return fn_(scratch);
    }
    return std::nan("");
}

MeanTable group_means(const ResponseMatrix& matrix, const GroupPartition& partition, const SummaryStatistic& stat) {
    MeanTable table;
    table.group_names = partition.levels;
    table.item_names = matrix.item_names;
    table.means.resize(partition.group_count(), matrix.cols());
    std::vector<double> scratch;
    for (Index g = 0; g < partition.group_count(); ++g) {
        const auto& rows = partition.index_sets[static_cast<std::size_t>(g)];
        for (const Index r : rows) {
            if (r < 0 || r >= matrix.rows())
                throw ConfigError("partition row " + std::to_string(r) + " outside the response matrix");
        }
        table.means.row(g) = column_statistics(matrix.values, rows, stat, scratch).transpose();
    }
    return table;
}

}  // namespace sbt
