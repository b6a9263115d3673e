#include "cli.hpp"

#include "sbt/errors.hpp"
#include "sbt/inference.hpp"
#include "sbt/ingest.hpp"
#include "sbt/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace sbt::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input_path;
    std::string delimiter = ",";
    bool no_header = false;
    std::string group_column;
    std::vector<std::string> group_levels;
    std::vector<std::string> response_columns;
    std::string response_type = "likert";
    std::string likert_map_path;
    std::vector<std::string> missing_tokens;
    bool missing_tokens_set = false;
    Index n_boot = ResampleSpec::kDefaultBoot;
    std::string seed;
    Index sample_size = 0;
    bool no_replace = false;
    bool ascending = false;
    bool keep_na = false;
    Index min_group_size = 3;
    Index workers = 1;
    std::string format = "table";
    std::string out_path;

    // sbt
    std::string statistic = "mean";

    // ordering
    Index split = 0;
    bool total = false;
    std::string score_column;
    bool row_mean = false;
    bool per_item = false;
    bool add_one = false;
};

void add_common_options(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--input", cfg.input_path, "Delimited input file")->required();
    cmd.add_option("--delimiter", cfg.delimiter, "Field delimiter (single character, or 'tab')");
    cmd.add_flag("--no-header", cfg.no_header, "Input has no header row; columns are named col_1..col_k");
    cmd.add_option("--group-col", cfg.group_column, "Column holding group labels")->required();
    cmd.add_option("--levels", cfg.group_levels, "Comma-separated group levels; order is the group order")
        ->delimiter(',');
    cmd.add_option("--responses", cfg.response_columns, "Comma-separated response columns (default: all others)")
        ->delimiter(',');
    cmd.add_option("--type", cfg.response_type, "Response type")
        ->check(CLI::IsMember({"likert", "binary", "numeric"}));
    cmd.add_option("--likert-map", cfg.likert_map_path, "File of 'token = score' lines");
    cmd.add_option("--missing-tokens", cfg.missing_tokens, "Comma-separated tokens treated as missing")
        ->delimiter(',')
        ->allow_extra_args(false);
    cmd.add_option("--n-boot", cfg.n_boot, "Bootstrap replicates");
    cmd.add_option("--seed", cfg.seed, "Master seed (unsigned 64-bit)");
    cmd.add_option("--sample-size", cfg.sample_size, "Rows drawn per group (default: group size)");
    cmd.add_flag("--no-replace", cfg.no_replace, "Sample without replacement");
    cmd.add_flag("--ascending", cfg.ascending, "Rank items from smallest to largest");
    cmd.add_flag("--keep-na", cfg.keep_na, "Missing values make a statistic undefined instead of being dropped");
    cmd.add_option("--min-group-size", cfg.min_group_size, "Warn for groups smaller than this");
    cmd.add_option("--workers", cfg.workers, "Worker threads");
    cmd.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
    cmd.add_option("--out", cfg.out_path, "Output path (csv for sbt writes PATH.means.csv and PATH.sbt.csv)");
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t" || text == "\t") return '\t';
    if (text.size() != 1) throw ConfigError("--delimiter must be a single character");
    return text[0];
}

std::optional<std::uint64_t> parse_seed(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError("--seed must be an unsigned 64-bit integer (got '" + text + "')");
    return seed;
}

void validate(const RunConfig& cfg) {
    if (cfg.n_boot < 1) throw ConfigError("--n-boot must be at least 1 (got " + std::to_string(cfg.n_boot) + ")");
    if (cfg.workers < 1) throw ConfigError("--workers must be at least 1 (got " + std::to_string(cfg.workers) + ")");
    if (cfg.min_group_size < 1)
        throw ConfigError("--min-group-size must be at least 1 (got " + std::to_string(cfg.min_group_size) + ")");
    if (cfg.sample_size < 0) throw ConfigError("--sample-size must be at least 1");
}

ResampleSpec make_spec(const RunConfig& cfg) {
    std::optional<Index> sample_size;
    if (cfg.sample_size > 0) sample_size = cfg.sample_size;
    return ResampleSpec(cfg.n_boot, parse_seed(cfg.seed), sample_size, !cfg.no_replace);
}

struct LoadedData {
    ResponseMatrix matrix;
    GroupPartition partition;
    std::string response_type;
};

LoadedData load(const RunConfig& cfg) {
    const char delimiter = parse_delimiter(cfg.delimiter);
    std::ifstream in(cfg.input_path, std::ios::binary);
    if (!in) throw IoError("cannot read input '" + cfg.input_path + "'");
    const RawTable table = parse_table(in, delimiter, !cfg.no_header);

    const auto group_col = table.column(cfg.group_column);
    if (!group_col) throw ConfigError("group column '" + cfg.group_column + "' not found");

    std::vector<std::string> responses = cfg.response_columns;
    if (responses.empty()) {
        for (Index j = 0; j < table.n_cols(); ++j)
            if (j != *group_col) responses.push_back(table.headers[static_cast<std::size_t>(j)]);
    }
    if (responses.empty()) throw ConfigError("no response columns besides the group column");
    for (const auto& r : responses) {
        if (table.column(r) == group_col) throw ConfigError("group column '" + r + "' cannot also be a response");
    }

    MapOptions options;
    const auto type = parse_response_type(cfg.response_type);
    if (!type) throw ConfigError("unknown --type '" + cfg.response_type + "'");
    options.type = *type;
    if (!cfg.likert_map_path.empty()) options.likert_map = LikertMap::load(cfg.likert_map_path);
    if (cfg.missing_tokens_set) options.missing_tokens = {cfg.missing_tokens.begin(), cfg.missing_tokens.end()};

    LoadedData data;
    data.response_type = cfg.response_type;
    data.matrix = map_responses(table, responses, options);

    const auto cells = table.column_cells(*group_col);
    const auto levels = cfg.group_levels.empty() ? discover_levels(cells, options.missing_tokens) : cfg.group_levels;
    data.partition = partition_groups(cells, levels, cfg.min_group_size);
    return data;
}

ReportContext make_context(const RunConfig& cfg, const LoadedData& data, const ResampleSpec& spec) {
    ReportContext ctx;
    ctx.response_type = data.response_type;
    ctx.statistic = cfg.statistic;
    ctx.na_rm = !cfg.keep_na;
    ctx.decreasing = !cfg.ascending;
    ctx.replace = spec.replace();
    ctx.sample_size = spec.sample_size();
    ctx.excluded_rows = data.partition.excluded_rows;
    return ctx;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write output '" + path + "'");
    os << contents;
    os.flush();
    if (!os) throw IoError("failed writing output '" + path + "'");
}

void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
    if (cfg.out_path.empty()) {
        out << body;
    } else {
        write_file(cfg.out_path, body);
    }
}

std::vector<std::string> merge_unique(std::vector<std::string> first, const std::vector<std::string>& second) {
    for (const auto& w : second)
        if (std::find(first.begin(), first.end(), w) == first.end()) first.push_back(w);
    return first;
}

int cmd_sbt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto data = load(cfg);
    const auto spec = make_spec(cfg);

    SbtOptions options;
    const bool na_rm = !cfg.keep_na;
    options.stat = cfg.statistic == "median" ? SummaryStatistic::median(na_rm) : SummaryStatistic::mean(na_rm);
    options.decreasing = !cfg.ascending;
    options.min_group_size = cfg.min_group_size;
    options.workers = cfg.workers;

    auto report = get_sbt(data.matrix, data.partition, spec, options);
    report.warnings = merge_unique(merge_unique(data.matrix.warnings, data.partition.warnings), report.warnings);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';

    const auto ctx = make_context(cfg, data, spec);
    if (cfg.format == "json") {
        emit(cfg, emit_sbt_json(report, ctx), out);
    } else if (cfg.format == "csv") {
        if (cfg.out_path.empty()) {
            out << emit_means_csv(report) << '\n' << emit_noncontainment_csv(report);
        } else {
            write_file(cfg.out_path + ".means.csv", emit_means_csv(report));
            write_file(cfg.out_path + ".sbt.csv", emit_noncontainment_csv(report));
        }
    } else {
        emit(cfg, emit_sbt_table(report), out);
    }
    return kOk;
}

int cmd_ordering(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.total == (cfg.split != 0)) throw ConfigError("ordering needs exactly one of --split G or --total");
    if (!cfg.total && cfg.split < 1) throw ConfigError("--split must be at least 1");
    const int score_modes = (cfg.score_column.empty() ? 0 : 1) + (cfg.row_mean ? 1 : 0) + (cfg.per_item ? 1 : 0);
    if (score_modes > 1) throw ConfigError("--score-column, --row-mean and --per-item are mutually exclusive");

    const auto data = load(cfg);
    const auto unseeded = make_spec(cfg);
    const auto spec = unseeded.with_seed(unseeded.resolve_seed());

    std::vector<std::pair<std::string, ResponseMatrix>> scores;
    if (!cfg.score_column.empty()) {
        const auto& names = data.matrix.item_names;
        const auto it = std::find(names.begin(), names.end(), cfg.score_column);
        if (it == names.end()) throw ConfigError("score column '" + cfg.score_column + "' is not a response column");
        scores.emplace_back(cfg.score_column, select_column(data.matrix, it - names.begin()));
    } else if (cfg.row_mean) {
        scores.emplace_back("row_mean", row_mean_score(data.matrix));
    } else if (cfg.per_item || data.matrix.cols() == 1) {
        for (Index j = 0; j < data.matrix.cols(); ++j)
            scores.emplace_back(data.matrix.item_names[static_cast<std::size_t>(j)], select_column(data.matrix, j));
    } else {
        throw ConfigError("input has " + std::to_string(data.matrix.cols()) +
                          " response columns; choose --score-column NAME, --row-mean or --per-item");
    }

    std::vector<OrderingEntry> entries;
    for (std::size_t s = 0; s < scores.size(); ++s) {
        const auto key = static_cast<std::uint32_t>(s);
        auto result = cfg.total
                          ? total_ordering_test(scores[s].second, data.partition, spec, cfg.workers, key)
                          : ordering_split_test(scores[s].second, data.partition, cfg.split, spec, cfg.workers, key);
        entries.push_back({scores[s].first, std::move(result)});
    }

    auto warnings = merge_unique(data.matrix.warnings, data.partition.warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    for (const auto& e : entries) {
        for (const auto& w : e.result.warnings) err << "warning: " << e.score << ": " << w << '\n';
        const double p = e.result.p_hat;
        if (e.result.n_boot < 10000 && ((p > 0.0 && p < 0.1) || (p > 0.9 && p < 1.0)))
            err << "hint: " << e.score << ": p_hat is near the boundary; --n-boot 10000 is recommended\n";
    }

    const auto ctx = make_context(cfg, data, spec);
    if (cfg.format == "json") {
        auto j = ordering_to_json(entries, ctx, cfg.add_one);
        auto listed = j["warnings"].get<std::vector<std::string>>();
        j["warnings"] = merge_unique(warnings, listed);
        emit(cfg, j.dump(2) + "\n", out);
    } else if (cfg.format == "csv") {
        emit(cfg, emit_ordering_csv(entries, cfg.add_one), out);
    } else {
        emit(cfg, emit_ordering_table(entries, cfg.add_one), out);
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stratified bootstrap ranking-stability and ordering tests", "sbt"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto* sbt_cmd = app.add_subcommand("sbt", "Group mean table and top-i non-containment matrix");
    add_common_options(*sbt_cmd, cfg);
    sbt_cmd->add_option("--stat", cfg.statistic, "Summary statistic")->check(CLI::IsMember({"mean", "median"}));

    auto* ord_cmd = app.add_subcommand("ordering", "Monte Carlo probability of an ordering of group means");
    add_common_options(*ord_cmd, cfg);
    ord_cmd->add_option("--split", cfg.split, "Split position g in [1, G-1]");
    ord_cmd->add_flag("--total", cfg.total, "Test the strict total ordering of all groups");
    ord_cmd->add_option("--score-column", cfg.score_column, "Response column used as the score");
    ord_cmd->add_flag("--row-mean", cfg.row_mean, "Use the per-row mean of the responses as the score");
    ord_cmd->add_flag("--per-item", cfg.per_item, "Run the test separately for every response column");
    ord_cmd->add_flag("--add-one", cfg.add_one, "Also report (count + 1) / (B + 1)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfig;
    }

    for (auto* cmd : {sbt_cmd, ord_cmd}) {
        if (auto* opt = cmd->get_option_no_throw("--missing-tokens"); opt && opt->count() > 0)
            cfg.missing_tokens_set = true;
    }

    try {
        validate(cfg);
        if (sbt_cmd->parsed()) return cmd_sbt(cfg, out, err);
        return cmd_ordering(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const ReplicateError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace sbt::cli
