#include "sbt/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sbt {

namespace {

using nlohmann::ordered_json;

ordered_json real_json(double value) {
    if (std::isnan(value)) return nullptr;
    return round_significant(value);
}

ordered_json optional_index(const std::optional<Index>& v) {
    if (!v) return nullptr;
    return *v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string matrix_csv(const std::vector<std::string>& row_names, const std::vector<std::string>& columns,
                       const Eigen::MatrixXd& values) {
    std::ostringstream os;
    os << "group";
    for (const auto& c : columns) os << ',' << csv_field(c);
    os << '\n';
    for (Index g = 0; g < values.rows(); ++g) {
        os << csv_field(row_names[static_cast<std::size_t>(g)]);
        for (Index j = 0; j < values.cols(); ++j) os << ',' << format_real(values(g, j));
        os << '\n';
    }
    return os.str();
}

// Left-aligned first column, right-aligned numeric columns.
std::string aligned(const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
    }
    std::ostringstream os;
    for (const auto& row : cells) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto pad = std::string(width[j] - row[j].size(), ' ');
            if (j == 0) {
                os << row[j] << pad;
            } else {
                os << "  " << pad << row[j];
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string matrix_table(const std::vector<std::string>& row_names, const std::vector<std::string>& columns,
                         const Eigen::MatrixXd& values) {
    std::vector<std::vector<std::string>> cells;
    cells.emplace_back();
    cells.back().push_back("group");
    cells.back().insert(cells.back().end(), columns.begin(), columns.end());
    for (Index g = 0; g < values.rows(); ++g) {
        cells.emplace_back();
        cells.back().push_back(row_names[static_cast<std::size_t>(g)]);
        for (Index j = 0; j < values.cols(); ++j) cells.back().push_back(format_real(values(g, j)));
    }
    return aligned(cells);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

double round_significant(double value, int digits) {
    if (!std::isfinite(value)) return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

std::string format_real(double value) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

ordered_json sbt_to_json(const SbtReport& report, const ReportContext& context) {
    const auto& means = report.mean_table;
    const auto& nc = report.noncontainment;

    ordered_json j;
    j["schema"] = kReportSchema;
    j["command"] = "sbt";
    j["response_type"] = context.response_type;
    j["statistic"] = context.statistic;
    j["na_rm"] = context.na_rm;
    j["decreasing"] = context.decreasing;
    j["replace"] = context.replace;
    j["sample_size"] = optional_index(context.sample_size);
    j["n_boot"] = report.n_boot;
    j["seed"] = report.seed;
    j["groups"] = means.group_names;
    j["items"] = means.item_names;

    ordered_json sizes = ordered_json::object();
    for (std::size_t g = 0; g < means.group_names.size(); ++g) sizes[means.group_names[g]] = report.group_sizes[g];
    j["group_sizes"] = std::move(sizes);
    j["excluded_rows"] = context.excluded_rows;

    auto table = [](const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                    const Eigen::MatrixXd& values) {
        ordered_json t;
        t["columns"] = cols;
        ordered_json body = ordered_json::object();
        for (Index g = 0; g < values.rows(); ++g) {
            ordered_json row = ordered_json::array();
            for (Index c = 0; c < values.cols(); ++c) row.push_back(real_json(values(g, c)));
            body[rows[static_cast<std::size_t>(g)]] = std::move(row);
        }
        t["rows"] = std::move(body);
        return t;
    };
    j["mean_table"] = table(means.group_names, means.item_names, means.means);
    j["noncontainment"] = table(nc.group_names, nc.columns, nc.rates);
    j["warnings"] = report.warnings;
    return j;
}

std::string emit_sbt_json(const SbtReport& report, const ReportContext& context) {
    return sbt_to_json(report, context).dump(2) + "\n";
}

std::string emit_means_csv(const SbtReport& report) {
    return matrix_csv(report.mean_table.group_names, report.mean_table.item_names, report.mean_table.means);
}

std::string emit_noncontainment_csv(const SbtReport& report) {
    return matrix_csv(report.noncontainment.group_names, report.noncontainment.columns, report.noncontainment.rates);
}

std::string emit_sbt_table(const SbtReport& report) {
    std::ostringstream os;
    os << "group sizes:";
    for (std::size_t g = 0; g < report.group_sizes.size(); ++g)
        os << (g == 0 ? " " : ", ") << report.mean_table.group_names[g] << '=' << report.group_sizes[g];
    os << "\n\nMeanTable\n"
       << matrix_table(report.mean_table.group_names, report.mean_table.item_names, report.mean_table.means);
    os << "\nnoncontainment (n_boot=" << report.n_boot << ", seed=" << report.seed << ")\n"
       << matrix_table(report.noncontainment.group_names, report.noncontainment.columns,
                       report.noncontainment.rates);
    return os.str();
}

ordered_json ordering_to_json(std::span<const OrderingEntry> entries, const ReportContext& context, bool add_one) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["command"] = "ordering";
    j["quantity"] = "ordering event probability p_hat";
    const bool total = !entries.empty() && !entries.front().result.split;
    j["test"] = total ? "total" : "split";
    j["split"] = entries.empty() ? ordered_json(nullptr) : optional_index(entries.front().result.split);
    j["replace"] = context.replace;
    j["sample_size"] = optional_index(context.sample_size);
    j["n_boot"] = entries.empty() ? 0 : entries.front().result.n_boot;
    j["seed"] = entries.empty() ? 0 : entries.front().result.seed;
    j["excluded_rows"] = context.excluded_rows;

    ordered_json results = ordered_json::array();
    std::vector<std::string> warnings;
    for (const auto& e : entries) {
        const auto& r = e.result;
        ordered_json item;
        item["score"] = e.score;
        item["group_order"] = r.group_order;
        ordered_json means = ordered_json::array();
        for (const double m : r.observed_means) means.push_back(real_json(m));
        item["observed_means"] = std::move(means);
        item["group_sizes"] = r.group_sizes;
        item["event_count"] = r.event_count;
        item["p_hat"] = real_json(r.p_hat);
        item["std_error"] = real_json(r.std_error());
        if (add_one) item["p_hat_add_one"] = real_json(r.p_hat_add_one());
        item["undefined_replicates"] = r.undefined_replicates;
        results.push_back(std::move(item));
        for (const auto& w : r.warnings) warnings.push_back(e.score + ": " + w);
    }
    j["results"] = std::move(results);
    j["warnings"] = warnings;
    return j;
}

std::string emit_ordering_json(std::span<const OrderingEntry> entries, const ReportContext& context, bool add_one) {
    return ordering_to_json(entries, context, add_one).dump(2) + "\n";
}

std::string emit_ordering_csv(std::span<const OrderingEntry> entries, bool add_one) {
    std::ostringstream os;
    os << "score,test,split,group_order,observed_means,n_boot,event_count,p_hat,std_error";
    if (add_one) os << ",p_hat_add_one";
    os << '\n';
    for (const auto& e : entries) {
        const auto& r = e.result;
        std::vector<std::string> means;
        for (const double m : r.observed_means) means.push_back(format_real(m));
        os << csv_field(e.score) << ',' << (r.split ? "split" : "total") << ','
           << (r.split ? std::to_string(*r.split) : std::string("NA")) << ',' << csv_field(join(r.group_order, ";"))
           << ',' << join(means, ";") << ',' << r.n_boot << ',' << r.event_count << ',' << format_real(r.p_hat) << ','
           << format_real(r.std_error());
        if (add_one) os << ',' << format_real(r.p_hat_add_one());
        os << '\n';
    }
    return os.str();
}

std::string emit_ordering_table(std::span<const OrderingEntry> entries, bool add_one) {
    std::ostringstream os;
    for (std::size_t n = 0; n < entries.size(); ++n) {
        const auto& e = entries[n];
        const auto& r = e.result;
        if (n > 0) os << '\n';
        os << "score: " << e.score << '\n';
        os << "test: " << (r.split ? "split g=" + std::to_string(*r.split) : std::string("strict total ordering"))
           << '\n';
        std::vector<std::vector<std::string>> cells{{"rank", "group", "n", "observed mean"}};
        for (std::size_t p = 0; p < r.group_order.size(); ++p) {
            cells.push_back({std::to_string(p + 1), r.group_order[p], std::to_string(r.group_sizes[p]),
                             format_real(r.observed_means[p])});
        }
        os << aligned(cells);
        os << "ordering event probability p_hat = " << format_real(r.p_hat) << " (" << r.event_count << " / "
           << r.n_boot << " replicates, std. error " << format_real(r.std_error()) << ")\n";
        if (add_one) os << "add-one estimate = " << format_real(r.p_hat_add_one()) << '\n';
        os << "seed: " << r.seed << '\n';
    }
    return os.str();
}

}  // namespace sbt
