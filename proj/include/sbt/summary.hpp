#pragma once

#include "sbt/errors.hpp"
#include "sbt/ingest.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace sbt {

/// Reduction applied to the observed values of one group-item cell.
class SummaryStatistic {
public:
    enum class Kind { mean, median, custom };
    using Reduction = std::function<double(std::span<const double>)>;

    static SummaryStatistic mean(bool na_rm = true) { return {Kind::mean, na_rm, {}}; }
    static SummaryStatistic median(bool na_rm = true) { return {Kind::median, na_rm, {}}; }
    static SummaryStatistic custom(Reduction fn, bool na_rm = true) { return {Kind::custom, na_rm, std::move(fn)}; }

    Kind kind() const { return kind_; }
    bool na_rm() const { return na_rm_; }
    std::string name() const;

    /// NaN for an empty input. `scratch` may be reordered.
    double reduce(std::span<double> scratch) const;

private:
    SummaryStatistic(Kind kind, bool na_rm, Reduction fn) : kind_(kind), na_rm_(na_rm), fn_(std::move(fn)) {}

    Kind kind_;
    bool na_rm_;
    Reduction fn_;
};

/// Groups x items. Undefined entries are NaN.
struct MeanTable {
    std::vector<std::string> group_names;
    std::vector<std::string> item_names;
    Eigen::MatrixXd means;
};

/// Applies `stat` to every column over the rows listed in `rows`. Entries
/// with no usable observations (or any missing value when !na_rm) are NaN.
template <typename Derived>
Eigen::VectorXd column_statistics(const Eigen::MatrixBase<Derived>& values, std::span<const Index> rows,
                                  const SummaryStatistic& stat, std::vector<double>& scratch) {
    Eigen::VectorXd out(values.cols());
    for (Index j = 0; j < values.cols(); ++j) {
        if (stat.kind() == SummaryStatistic::Kind::mean) {
            double sum = 0.0;
            Index count = 0;
            bool poisoned = false;
            for (const Index r : rows) {
                const double v = values(r, j);
                if (std::isnan(v)) {
                    poisoned = !stat.na_rm();
                    if (poisoned) break;
                    continue;
                }
                sum += v;
                ++count;
            }
            out(j) = (poisoned || count == 0) ? std::nan("") : sum / static_cast<double>(count);
            continue;
        }
        scratch.clear();
        bool poisoned = false;
        for (const Index r : rows) {
            const double v = values(r, j);
            if (std::isnan(v)) {
                poisoned = !stat.na_rm();
                if (poisoned) break;
                continue;
            }
            scratch.push_back(v);
        }
        out(j) = poisoned ? std::nan("") : stat.reduce(scratch);
    }
    return out;
}

MeanTable group_means(const ResponseMatrix& matrix, const GroupPartition& partition,
                      const SummaryStatistic& stat = SummaryStatistic::mean());

/// Item indices ordered by score; ties go to the smaller index, undefined
/// (NaN) scores go last in either direction. Throws DataError when every
/// score is undefined.
template <typename Derived>
std::vector<Index> rank_items(const Eigen::DenseBase<Derived>& scores, bool decreasing = true) {
    const Index k = scores.size();
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    bool any_defined = false;
    for (Index j = 0; j < k; ++j) any_defined = any_defined || !std::isnan(scores(j));
    if (!any_defined) throw DataError("cannot rank items: every score is undefined");
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto va = scores(a);
        const auto vb = scores(b);
        const bool da = !std::isnan(va);
        const bool db = !std::isnan(vb);
        if (da != db) return da;
        if (!da) return false;
        return decreasing ? va > vb : va < vb;
    });
    return order;
}

struct TopSet {
    /// Ranked order, best first.
    std::vector<Index> indices;

    Index size() const { return static_cast<Index>(indices.size()); }
    bool contains(Index item) const { return std::find(indices.begin(), indices.end(), item) != indices.end(); }
};

template <typename Derived>
TopSet top_i_set(const Eigen::DenseBase<Derived>& scores, Index i, bool decreasing = true) {
    if (i < 1 || i > scores.size())
        throw ConfigError("top-i size " + std::to_string(i) + " outside [1, " + std::to_string(scores.size()) + "]");
    auto order = rank_items(scores, decreasing);
    order.resize(static_cast<std::size_t>(i));
    return TopSet{std::move(order)};
}

}  // namespace sbt
