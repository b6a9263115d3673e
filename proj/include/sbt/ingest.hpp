#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbt {

using Index = Eigen::Index;

/// Delimited text as parsed, before any interpretation of the cells.
struct RawTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for error messages.
    std::vector<long> lines;

    Index n_rows() const { return static_cast<Index>(rows.size()); }
    Index n_cols() const { return static_cast<Index>(headers.size()); }

    /// Position of a header, or nullopt. Names are compared after trimming.
    std::optional<Index> column(std::string_view name) const;
    std::vector<std::string> column_cells(Index col) const;
};

/// Parses delimited UTF-8 text. Double-quoted fields may contain the
/// delimiter, newlines and doubled quotes. Blank lines are skipped.
/// Throws ParseError naming the line on ragged rows or empty input.
RawTable parse_table(std::istream& input, char delimiter = ',', bool has_header = true);
RawTable parse_table_string(std::string_view text, char delimiter = ',', bool has_header = true);

/// Lowercase, trim, and collapse interior whitespace runs to one space.
std::string normalize_response(std::string_view cell);

enum class ResponseType { likert, binary, numeric };

std::optional<ResponseType> parse_response_type(std::string_view name);
std::string_view to_string(ResponseType type);

/// Normalized response text -> score.
class LikertMap {
public:
    LikertMap() = default;

    /// Keys are normalized on insertion; a key colliding with an existing one
    /// after normalization, or a non-finite score, throws ConfigError.
    void insert(std::string_view token, double score);
    std::optional<double> lookup(std::string_view normalized) const;

    const std::map<std::string, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// strongly disagree=1 .. strongly agree=5, with "neutral" and
    /// "neither agree nor disagree" both 3.
    static LikertMap default_likert();
    static LikertMap default_binary();

    /// `token = score` per line, `#` starts a comment.
    static LikertMap parse(std::istream& in);
    static LikertMap load(const std::string& path);

private:
    std::map<std::string, double> entries_;
};

std::set<std::string> default_missing_tokens();

/// Respondents x items. Missing cells are NaN; every other value is finite.
struct ResponseMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> item_names;
    std::vector<std::string> warnings;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

inline bool is_missing(double v) { return std::isnan(v); }

struct MapOptions {
    ResponseType type = ResponseType::likert;
    /// Replaces the built-in map for the chosen type when set.
    std::optional<LikertMap> likert_map;
    std::set<std::string> missing_tokens = default_missing_tokens();
};

/// Converts the named columns to scores. Throws DataError naming token,
/// column and row for anything that cannot be mapped.
ResponseMatrix map_responses(const RawTable& table, std::span<const std::string> response_columns,
                             const MapOptions& options = {});

/// Row indices of each retained group level, in level order.
struct GroupPartition {
    std::vector<std::string> levels;
    std::vector<std::vector<Index>> index_sets;
    Index n_rows = 0;
    Index excluded_rows = 0;
    std::vector<std::string> warnings;

    Index group_count() const { return static_cast<Index>(levels.size()); }
    Index size(Index g) const { return static_cast<Index>(index_sets[static_cast<std::size_t>(g)].size()); }
    std::vector<Index> sizes() const;
};

/// Assigns each row to the level whose normalized name equals its normalized
/// cell. Unmatched rows are excluded and counted; empty levels are dropped.
/// Throws DataError when no row matches any level.
GroupPartition partition_groups(std::span<const std::string> group_cells,
                                std::span<const std::string> group_levels, Index min_group_size = 3);

/// Distinct labels in order of first appearance, skipping missing tokens.
std::vector<std::string> discover_levels(std::span<const std::string> group_cells,
                                         const std::set<std::string>& missing_tokens = default_missing_tokens());

std::string small_group_warning(std::string_view group, Index size, Index min_group_size);

}  // namespace sbt
