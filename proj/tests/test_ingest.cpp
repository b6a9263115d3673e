#include "sbt/errors.hpp"
#include "sbt/ingest.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace sbt;

TEST_CASE("parse_table reads a minimal table") {
    const auto t = parse_table_string("a,b\n1,2\n");
    CHECK(t.headers == std::vector<std::string>{"a", "b"});
    REQUIRE(t.n_rows() == 1);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
    CHECK(t.lines[0] == 2);
}

TEST_CASE("parse_table reports ragged rows by line") {
    try {
        parse_table_string("a,b\n1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == "row 2 has 1 cells, expected 2");
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_table_string(""), ParseError);
    CHECK_THROWS_AS(parse_table_string("\n\n"), ParseError);
}

TEST_CASE("parse_table handles quoting, CRLF, blank lines and headerless input") {
    const auto t = parse_table_string("\xEF\xBB\xBF q , r\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n3,4\r\n");
    CHECK(t.headers == std::vector<std::string>{"q", "r"});
    REQUIRE(t.n_rows() == 2);
    CHECK(t.rows[0][0] == "x, y");
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(t.lines[1] == 4);

    const auto h = parse_table_string("1;2;3\n4;5;6\n", ';', false);
    CHECK(h.headers == std::vector<std::string>{"col_1", "col_2", "col_3"});
    CHECK(h.n_rows() == 2);

    CHECK_THROWS_AS(parse_table_string("a,a\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_table_string("a,b\n\"open,2\n"), ParseError);
}

TEST_CASE("normalize_response") {
    CHECK(normalize_response("  Strongly Agree ") == "strongly agree");
    CHECK(normalize_response("") == "");
    CHECK(normalize_response("YES") == "yes");
    CHECK(normalize_response("Neither \t Agree\nnor  Disagree") == "neither agree nor disagree");
}

TEST_CASE("normalize_response is idempotent") {
    std::mt19937 gen(7);
    const std::string alphabet = "aBc Z\t\n  xY";
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const auto len = gen() % 12;
        for (unsigned i = 0; i < len; ++i) s.push_back(alphabet[gen() % alphabet.size()]);
        const auto once = normalize_response(s);
        CHECK(normalize_response(once) == once);
    }
}

TEST_CASE("map_responses with the default likert map") {
    const auto t = parse_table_string("Q1,Q2\nStrongly Agree,3\n  disagree ,NA\nNEUTRAL,n/a\n");
    const std::vector<std::string> cols{"Q1", "Q2"};
    const auto m = map_responses(t, cols);
    REQUIRE(m.rows() == 3);
    CHECK(m.values(0, 0) == 5.0);
    CHECK(m.values(1, 0) == 2.0);
    CHECK(m.values(2, 0) == 3.0);
    CHECK(m.values(0, 1) == 3.0);
    CHECK(is_missing(m.values(1, 1)));
    CHECK(is_missing(m.values(2, 1)));
    CHECK(m.item_names == cols);
}

TEST_CASE("map_responses binary and numeric") {
    const auto t = parse_table_string("b,x\nyes,1.5\nno,-2e-1\nNA,\n");
    const std::vector<std::string> b{"b"};
    MapOptions bin;
    bin.type = ResponseType::binary;
    const auto mb = map_responses(t, b, bin);
    CHECK(mb.values(0, 0) == 1.0);
    CHECK(mb.values(1, 0) == 0.0);
    CHECK(is_missing(mb.values(2, 0)));

    const std::vector<std::string> x{"x"};
    MapOptions num;
    num.type = ResponseType::numeric;
    const auto mx = map_responses(t, x, num);
    CHECK(mx.values(0, 0) == 1.5);
    CHECK(mx.values(1, 0) == -0.2);
    CHECK(is_missing(mx.values(2, 0)));
}

TEST_CASE("map_responses numeric round-trips decimal numerals") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    std::ostringstream csv;
    csv << "v\n";
    std::vector<double> expected;
    for (int i = 0; i < 200; ++i) {
        const double v = dist(gen);
        std::ostringstream cell;
        cell.precision(17);
        cell << v;
        csv << cell.str() << '\n';
        expected.push_back(v);
    }
    const auto t = parse_table_string(csv.str());
    MapOptions num;
    num.type = ResponseType::numeric;
    const std::vector<std::string> cols{"v"};
    const auto m = map_responses(t, cols, num);
    REQUIRE(m.rows() == static_cast<Index>(expected.size()));
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(m.values(static_cast<Index>(i), 0) == expected[i]);
}

TEST_CASE("map_responses likert passes numbers through and warns outside 1..5") {
    const auto t = parse_table_string("q\n3\n7\n");
    const std::vector<std::string> cols{"q"};
    const auto m = map_responses(t, cols);
    CHECK(m.values(0, 0) == 3.0);
    CHECK(m.values(1, 0) == 7.0);
    CHECK(m.warnings.size() == 1);
}

TEST_CASE("map_responses errors name token, column and row") {
    const auto t = parse_table_string("q\nagree\nmaybe\n");
    const std::vector<std::string> cols{"q"};
    try {
        map_responses(t, cols);
        FAIL("expected a data error");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("'maybe'") != std::string::npos);
        CHECK(what.find("column 'q'") != std::string::npos);
        CHECK(what.find("row 2") != std::string::npos);
    }
    MapOptions num;
    num.type = ResponseType::numeric;
    CHECK_THROWS_AS(map_responses(t, cols, num), DataError);
    const std::vector<std::string> missing{"nope"};
    CHECK_THROWS_AS(map_responses(t, missing), ConfigError);
}

TEST_CASE("map_responses keeps all-missing columns with a warning and preserves row count") {
    const auto t = parse_table_string("a,b\n1,NA\n2,\n3,n/a\n");
    const std::vector<std::string> cols{"b", "a"};
    const auto m = map_responses(t, cols);
    CHECK(m.rows() == t.n_rows());
    CHECK(m.item_names == cols);
    CHECK(m.values(2, 1) == 3.0);
    CHECK(m.warnings.size() == 1);
}

TEST_CASE("LikertMap file parsing") {
    std::istringstream in("# custom scale\n  Very Happy = 10\nsad=0   # trailing comment\n\nMeh = 5.5\n");
    const auto map = LikertMap::parse(in);
    CHECK(map.lookup("very happy") == 10.0);
    CHECK(map.lookup("sad") == 0.0);
    CHECK(map.lookup("meh") == 5.5);

    std::istringstream dup("Yes = 1\n yes = 2\n");
    CHECK_THROWS_AS(LikertMap::parse(dup), ConfigError);
    std::istringstream bad("yes = high\n");
    CHECK_THROWS_AS(LikertMap::parse(bad), ConfigError);

    const auto t = parse_table_string("q\nvery HAPPY\nMeh\n");
    MapOptions opts;
    opts.likert_map = map;
    const std::vector<std::string> cols{"q"};
    const auto m = map_responses(t, cols, opts);
    CHECK(m.values(0, 0) == 10.0);
    CHECK(m.values(1, 0) == 5.5);
}

TEST_CASE("partition_groups") {
    const std::vector<std::string> cells{"W", "M", "W"};
    const std::vector<std::string> levels{"W", "M"};
    const auto p = partition_groups(cells, levels, 3);
    CHECK(p.index_sets[0] == std::vector<Index>{0, 2});
    CHECK(p.index_sets[1] == std::vector<Index>{1});
    REQUIRE(p.warnings.size() == 2);
    CHECK(p.warnings[1].find("'M'") != std::string::npos);

    const std::vector<std::string> aa{"A", "A"};
    const std::vector<std::string> b{"B"};
    CHECK_THROWS_AS(partition_groups(aa, b, 1), DataError);
}

TEST_CASE("partition_groups normalizes labels, drops empty levels and counts exclusions") {
    const std::vector<std::string> cells{" woman", "MAN ", "other", "Woman", ""};
    const std::vector<std::string> levels{"Woman", "Man", "Nonbinary"};
    const auto p = partition_groups(cells, levels, 1);
    CHECK(p.levels == std::vector<std::string>{"Woman", "Man"});
    CHECK(p.sizes() == std::vector<Index>{2, 1});
    CHECK(p.excluded_rows == 2);

    const std::vector<std::string> dup{"a", "A"};
    CHECK_THROWS_AS(partition_groups(cells, dup, 1), ConfigError);
}

TEST_CASE("partition_groups covers every row exactly once") {
    std::mt19937 gen(3);
    const std::vector<std::string> labels{"a", "b", "c", "d", "zz"};
    const std::vector<std::string> levels{"a", "b", "c", "d"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> cells;
        const auto n = 1 + gen() % 40;
        for (unsigned i = 0; i < n; ++i) cells.push_back(labels[gen() % labels.size()]);
        if (std::none_of(cells.begin(), cells.end(), [](const auto& c) { return c != "zz"; })) continue;
        const auto p = partition_groups(cells, levels, 1);
        std::vector<int> seen(n, 0);
        for (const auto& set : p.index_sets)
            for (const Index r : set) ++seen[static_cast<std::size_t>(r)];
        Index assigned = 0;
        for (const int s : seen) {
            CHECK(s <= 1);
            assigned += s;
        }
        CHECK(assigned + p.excluded_rows == static_cast<Index>(n));
    }
}

TEST_CASE("discover_levels keeps first-seen spelling and order") {
    const std::vector<std::string> cells{"Man", "woman", "MAN", "NA", "Woman "};
    CHECK(discover_levels(cells) == std::vector<std::string>{"Man", "woman"});
}
