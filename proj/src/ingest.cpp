#include "sbt/ingest.hpp"

#include "sbt/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace sbt {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

struct Record {
    std::vector<std::string> cells;
    long line = 0;
    bool blank = false;
};

// Splits one record starting at `pos`; advances `pos` and `line`.
Record read_record(std::string_view text, std::size_t& pos, long& line, char delimiter) {
    Record rec;
    rec.line = line;
    std::string cell;
    bool quoted_any = false;
    bool in_quotes = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    cell.push_back('"');
                    pos += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                if (c == '\n') ++line;
                cell.push_back(c);
            }
            ++pos;
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            quoted_any = true;
            ++pos;
        } else if (c == delimiter) {
            rec.cells.push_back(std::move(cell));
            cell.clear();
            ++pos;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            ++line;
            break;
        } else {
            cell.push_back(c);
            ++pos;
        }
    }
    if (in_quotes) throw ParseError("line " + std::to_string(rec.line) + ": unterminated quoted field", rec.line);
    rec.blank = rec.cells.empty() && !quoted_any && trim(cell).empty();
    rec.cells.push_back(std::move(cell));
    return rec;
}

}  // namespace

std::optional<Index> RawTable::column(std::string_view name) const {
    const auto wanted = trim(name);
    for (std::size_t j = 0; j < headers.size(); ++j)
        if (headers[j] == wanted) return static_cast<Index>(j);
    return std::nullopt;
}

std::vector<std::string> RawTable::column_cells(Index col) const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(col)]);
    return out;
}

RawTable parse_table_string(std::string_view text, char delimiter, bool has_header) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    RawTable table;
    std::size_t pos = 0;
    long line = 1;
    std::size_t width = 0;
    bool have_width = false;
    while (pos < text.size()) {
        Record rec = read_record(text, pos, line, delimiter);
        if (rec.blank) continue;
        if (!have_width) {
            width = rec.cells.size();
            have_width = true;
            if (has_header) {
                for (auto& h : rec.cells) table.headers.emplace_back(trim(h));
                continue;
            }
            for (std::size_t j = 0; j < width; ++j) table.headers.push_back("col_" + std::to_string(j + 1));
        }
        if (rec.cells.size() != width) {
            throw ParseError("row " + std::to_string(rec.line) + " has " + std::to_string(rec.cells.size()) +
                                 " cells, expected " + std::to_string(width),
                             rec.line);
        }
        table.rows.push_back(std::move(rec.cells));
        table.lines.push_back(rec.line);
    }
    if (!have_width) throw ParseError("empty input", 0);

    std::set<std::string> seen;
    for (const auto& h : table.headers) {
        if (!seen.insert(h).second) throw ParseError("duplicate column name '" + h + "'", 1);
    }
    return table;
}

RawTable parse_table(std::istream& input, char delimiter, bool has_header) {
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return parse_table_string(buffer.str(), delimiter, has_header);
}

std::string normalize_response(std::string_view cell) {
    std::string out;
    out.reserve(cell.size());
    bool pending_space = false;
    for (const char c : trim(cell)) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(uc)));
    }
    return out;
}

std::optional<ResponseType> parse_response_type(std::string_view name) {
    const auto n = normalize_response(name);
    if (n == "likert") return ResponseType::likert;
    if (n == "binary") return ResponseType::binary;
    if (n == "numeric") return ResponseType::numeric;
    return std::nullopt;
}

std::string_view to_string(ResponseType type) {
    switch (type) {
        case ResponseType::likert: return "likert";
        case ResponseType::binary: return "binary";
        case ResponseType::numeric: return "numeric";
    }
    return "?";
}

void LikertMap::insert(std::string_view token, double score) {
    if (!std::isfinite(score)) throw ConfigError("score for '" + std::string(token) + "' is not finite");
    auto key = normalize_response(token);
    if (!entries_.emplace(key, score).second)
        throw ConfigError("duplicate likert map token '" + key + "' after normalization");
}

std::optional<double> LikertMap::lookup(std::string_view normalized) const {
    const auto it = entries_.find(std::string(normalized));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

LikertMap LikertMap::default_likert() {
    LikertMap m;
    m.insert("strongly disagree", 1);
    m.insert("disagree", 2);
    m.insert("neutral", 3);
    m.insert("neither agree nor disagree", 3);
    m.insert("agree", 4);
    m.insert("strongly agree", 5);
    return m;
}

LikertMap LikertMap::default_binary() {
    LikertMap m;
    for (const char* t : {"yes", "true", "1"}) m.insert(t, 1);
    for (const char* t : {"no", "false", "0"}) m.insert(t, 0);
    return m;
}

LikertMap LikertMap::parse(std::istream& in) {
    LikertMap m;
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.rfind('=');
        if (eq == std::string_view::npos)
            throw ConfigError("likert map line " + std::to_string(line) + ": expected 'token = score'");
        const auto score = parse_real(s.substr(eq + 1));
        if (!score)
            throw ConfigError("likert map line " + std::to_string(line) + ": invalid score '" +
                              std::string(trim(s.substr(eq + 1))) + "'");
        m.insert(s.substr(0, eq), *score);
    }
    if (m.empty()) throw ConfigError("likert map has no entries");
    return m;
}

LikertMap LikertMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open likert map '" + path + "'");
    return parse(in);
}

std::set<std::string> default_missing_tokens() { return {"", "na", "n/a"}; }

ResponseMatrix map_responses(const RawTable& table, std::span<const std::string> response_columns,
                             const MapOptions& options) {
    if (response_columns.empty()) throw ConfigError("no response columns selected");
    if (table.n_rows() == 0) throw DataError("input has no data rows");

    std::vector<Index> cols;
    for (const auto& name : response_columns) {
        const auto c = table.column(name);
        if (!c) throw ConfigError("response column '" + name + "' not found");
        cols.push_back(*c);
    }

    std::set<std::string> missing;
    for (const auto& t : options.missing_tokens) missing.insert(normalize_response(t));

    const LikertMap* map = nullptr;
    LikertMap builtin;
    if (options.likert_map) {
        map = &*options.likert_map;
    } else if (options.type == ResponseType::likert) {
        builtin = LikertMap::default_likert();
        map = &builtin;
    } else if (options.type == ResponseType::binary) {
        builtin = LikertMap::default_binary();
        map = &builtin;
    }

    const Index n = table.n_rows();
    const Index k = static_cast<Index>(cols.size());
    ResponseMatrix out;
    out.values.resize(n, k);
    for (const auto& name : response_columns) out.item_names.emplace_back(trim(name));

    for (Index j = 0; j < k; ++j) {
        Index present = 0;
        Index out_of_scale = 0;
        const auto& col_name = out.item_names[static_cast<std::size_t>(j)];
        for (Index r = 0; r < n; ++r) {
            const auto& cell = table.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])];
            const auto norm = normalize_response(cell);
            double value = std::numeric_limits<double>::quiet_NaN();
            if (!missing.contains(norm)) {
                std::optional<double> mapped;
                if (options.type == ResponseType::numeric && !options.likert_map) {
                    mapped = parse_real(norm);
                } else {
                    mapped = map->lookup(norm);
                    if (!mapped && options.type != ResponseType::binary) {
                        mapped = parse_real(norm);
                        if (mapped && options.type == ResponseType::likert && (*mapped < 1.0 || *mapped > 5.0))
                            ++out_of_scale;
                    }
                }
                if (!mapped) {
                    throw DataError("unmappable token '" + std::string(trim(cell)) + "' in column '" + col_name +
                                    "' at row " + std::to_string(r + 1) + " (line " +
                                    std::to_string(table.lines[static_cast<std::size_t>(r)]) + ")");
                }
                value = *mapped;
                ++present;
            }
            out.values(r, j) = value;
        }
        if (present == 0) out.warnings.push_back("column '" + col_name + "' has no non-missing values");
        if (out_of_scale > 0)
            out.warnings.push_back("column '" + col_name + "' has " + std::to_string(out_of_scale) +
                                   " numeric value(s) outside the 1-5 likert range");
    }
    return out;
}

std::vector<Index> GroupPartition::sizes() const {
    std::vector<Index> out;
    for (const auto& s : index_sets) out.push_back(static_cast<Index>(s.size()));
    return out;
}

std::string small_group_warning(std::string_view group, Index size, Index min_group_size) {
    return "group '" + std::string(group) + "' has " + std::to_string(size) + " row(s), below min_group_size " +
           std::to_string(min_group_size) + "; resampling estimates will be noisy";
}

GroupPartition partition_groups(std::span<const std::string> group_cells, std::span<const std::string> group_levels,
                                Index min_group_size) {
    if (group_levels.empty()) throw ConfigError("no group levels given");
    if (min_group_size < 1) throw ConfigError("min_group_size must be at least 1");

    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t g = 0; g < group_levels.size(); ++g) {
        if (!slot.emplace(normalize_response(group_levels[g]), g).second)
            throw ConfigError("duplicate group level '" + group_levels[g] + "'");
    }

    std::vector<std::vector<Index>> sets(group_levels.size());
    Index excluded = 0;
    for (std::size_t r = 0; r < group_cells.size(); ++r) {
        const auto it = slot.find(normalize_response(group_cells[r]));
        if (it == slot.end()) {
            ++excluded;
            continue;
        }
        sets[it->second].push_back(static_cast<Index>(r));
    }

    GroupPartition out;
    out.n_rows = static_cast<Index>(group_cells.size());
    out.excluded_rows = excluded;
    for (std::size_t g = 0; g < group_levels.size(); ++g) {
        const auto size = static_cast<Index>(sets[g].size());
        if (size == 0) {
            out.warnings.push_back("group '" + group_levels[g] + "' matched no rows and was dropped");
            continue;
        }
        if (size < min_group_size) out.warnings.push_back(small_group_warning(group_levels[g], size, min_group_size));
        out.levels.push_back(group_levels[g]);
        out.index_sets.push_back(std::move(sets[g]));
    }
    if (out.levels.empty()) throw DataError("no rows matched any group level");
    if (excluded > 0)
        out.warnings.push_back(std::to_string(excluded) + " row(s) matched no group level and were excluded");
    return out;
}

std::vector<std::string> discover_levels(std::span<const std::string> group_cells,
                                         const std::set<std::string>& missing_tokens) {
    std::set<std::string> missing;
    for (const auto& t : missing_tokens) missing.insert(normalize_response(t));
    std::vector<std::string> levels;
    std::set<std::string> seen;
    for (const auto& cell : group_cells) {
        auto norm = normalize_response(cell);
        if (missing.contains(norm)) continue;
        if (seen.insert(norm).second) levels.emplace_back(trim(cell));
    }
    return levels;
}

}  // namespace sbt
