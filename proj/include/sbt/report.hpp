#pragma once

#include "sbt/inference.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbt {

inline constexpr int kReportSchema = 1;

/// Run settings echoed into reports next to the results.
struct ReportContext {
    std::string response_type = "likert";
    std::string statistic = "mean";
    bool na_rm = true;
    bool decreasing = true;
    bool replace = true;
    std::optional<Index> sample_size;
    Index excluded_rows = 0;
};

/// Rounds to `digits` significant decimal digits; NaN passes through.
double round_significant(double value, int digits = 6);

/// "%.6g", or "NA" for NaN.
std::string format_real(double value);

nlohmann::ordered_json sbt_to_json(const SbtReport& report, const ReportContext& context);
std::string emit_sbt_json(const SbtReport& report, const ReportContext& context);
std::string emit_means_csv(const SbtReport& report);
std::string emit_noncontainment_csv(const SbtReport& report);
std::string emit_sbt_table(const SbtReport& report);

/// One ordering test result, labelled by the score it was run on.
struct OrderingEntry {
    std::string score;
    OrderingTestResult result;
};

nlohmann::ordered_json ordering_to_json(std::span<const OrderingEntry> entries, const ReportContext& context,
                                        bool add_one);
std::string emit_ordering_json(std::span<const OrderingEntry> entries, const ReportContext& context, bool add_one);
std::string emit_ordering_csv(std::span<const OrderingEntry> entries, bool add_one);
std::string emit_ordering_table(std::span<const OrderingEntry> entries, bool add_one);

}  // namespace sbt
