#include "cli.hpp"

#include "sbt/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sbt;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "sbt_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write(const std::string& name, const std::string& contents) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << contents;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kSmall =
    "group,Q1,Q2,Q3\n"
    "A,Strongly agree,agree,neutral\n"
    "A,agree,agree,disagree\n"
    "A,5,4,2\n"
    "B,disagree,agree,strongly agree\n"
    "B,neutral,neutral,agree\n"
    "B,1,3,5\n"
    "C,agree,agree,agree\n";

}  // namespace

TEST_CASE("sbt json report") {
    const auto input = write("small.csv", kSmall);
    const auto r = run({"sbt", "--input", input, "--group-col", "group", "--levels", "A,B", "--n-boot", "200",
                        "--seed", "9", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["command"] == "sbt");
    CHECK(j["n_boot"] == 200);
    CHECK(j["seed"] == 9);
    CHECK(j["groups"] == nlohmann::json::array({"A", "B"}));
    CHECK(j["items"] == nlohmann::json::array({"Q1", "Q2", "Q3"}));
    CHECK(j["group_sizes"]["A"] == 3);
    CHECK(j["excluded_rows"] == 1);
    CHECK(j["noncontainment"]["columns"] == nlohmann::json::array({"top_1", "top_2", "top_3"}));
    CHECK(j["mean_table"]["rows"]["A"][0] == doctest::Approx(14.0 / 3.0).epsilon(1e-5));
    CHECK(j["noncontainment"]["rows"]["B"][2] == 0.0);
    CHECK(j["warnings"].is_array());
    CHECK(r.err.find("excluded") != std::string::npos);
}

TEST_CASE("sbt json round-trips the computed report") {
    const auto input = write("small_rt.csv", kSmall);
    const auto r = run({"sbt", "--input", input, "--group-col", "group", "--n-boot", "400", "--seed", "1",
                        "--format", "json", "--min-group-size", "1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["warnings"] == nlohmann::json::array());
    const auto groups = j["groups"].get<std::vector<std::string>>();
    CHECK(groups == std::vector<std::string>{"A", "B", "C"});
    for (const auto& g : groups) {
        for (const auto& rate : j["noncontainment"]["rows"][g]) {
            const double v = rate.get<double>();
            const double count = v * 400.0;
            CHECK(count == doctest::Approx(std::round(count)).epsilon(1e-9));
            CHECK(v == round_significant(v));
        }
    }
}

TEST_CASE("sbt csv writes two files and table renders") {
    const auto input = write("small_csv.csv", kSmall);
    const auto base = (scratch_dir() / "report").string();
    const auto r = run({"sbt", "--input", input, "--group-col", "group", "--n-boot", "50", "--seed", "2", "--format",
                        "csv", "--out", base});
    REQUIRE(r.code == 0);
    const auto means = slurp(base + ".means.csv");
    const auto rates = slurp(base + ".sbt.csv");
    CHECK(means.rfind("group,Q1,Q2,Q3\n", 0) == 0);
    CHECK(rates.rfind("group,top_1,top_2,top_3\n", 0) == 0);
    CHECK(std::count(rates.begin(), rates.end(), '\n') == 4);

    const auto t = run({"sbt", "--input", input, "--group-col", "group", "--n-boot", "50", "--seed", "2"});
    REQUIRE(t.code == 0);
    CHECK(t.out.find("MeanTable") != std::string::npos);
    CHECK(t.out.find("top_3") != std::string::npos);
}

TEST_CASE("single-column input yields one all-zero top_1 column") {
    const auto input = write("one_col.csv", "g,q\na,1\na,5\na,3\nb,2\nb,4\nb,4\n");
    const auto r = run({"sbt", "--input", input, "--group-col", "g", "--n-boot", "100", "--seed", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["noncontainment"]["columns"] == nlohmann::json::array({"top_1"}));
    CHECK(j["noncontainment"]["rows"]["a"] == nlohmann::json::array({0.0}));
    CHECK(j["noncontainment"]["rows"]["b"] == nlohmann::json::array({0.0}));
}

TEST_CASE("ordering command end-to-end") {
    const auto disjoint = write("disjoint.csv", "g,s\nlo,0\nlo,0\nhi,10\nhi,10\n");
    const auto r = run({"ordering", "--input", disjoint, "--group-col", "g", "--type", "numeric", "--split", "1",
                        "--n-boot", "300", "--seed", "5", "--format", "json", "--min-group-size", "1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["test"] == "split");
    CHECK(j["split"] == 1);
    CHECK(j["results"][0]["p_hat"] == 1.0);
    CHECK(j["results"][0]["std_error"] == 0.0);
    CHECK(j["results"][0]["group_order"] == nlohmann::json::array({"hi", "lo"}));

    // the 16-case enumeration design from a 4-line CSV
    const auto coin = write("coin.csv", "g,s\nA,0\nA,1\nB,0\nB,1\n");
    const std::vector<std::string> common{"--input", coin, "--group-col", "g", "--type", "numeric", "--n-boot",
                                          "10000", "--seed", "77", "--format", "json", "--min-group-size", "1"};
    auto split_args = std::vector<std::string>{"ordering", "--split", "1"};
    split_args.insert(split_args.end(), common.begin(), common.end());
    auto total_args = std::vector<std::string>{"ordering", "--total"};
    total_args.insert(total_args.end(), common.begin(), common.end());
    const auto s = run(split_args);
    const auto t = run(total_args);
    REQUIRE(s.code == 0);
    REQUIRE(t.code == 0);
    const auto js = nlohmann::json::parse(s.out);
    const auto jt = nlohmann::json::parse(t.out);
    const double p = js["results"][0]["p_hat"].get<double>();
    CHECK(std::abs(p - 0.3125) <= 4 * std::sqrt(0.3125 * 0.6875 / 10000.0));
    CHECK(jt["results"][0]["event_count"] == js["results"][0]["event_count"]);
    CHECK(jt["test"] == "total");
    CHECK(jt["split"].is_null());
}

TEST_CASE("ordering score selection") {
    const auto input = write("multi.csv", kSmall);
    const std::vector<std::string> base{"ordering", "--input", input, "--group-col", "group", "--levels", "A,B",
                                        "--split", "1", "--n-boot", "100", "--seed", "1", "--format", "json"};
    CHECK(run(base).code == 2);

    auto per_item = base;
    per_item.push_back("--per-item");
    const auto r = run(per_item);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["results"].size() == 3);

    auto score = base;
    score.insert(score.end(), {"--score-column", "Q3", "--add-one"});
    const auto s = run(score);
    REQUIRE(s.code == 0);
    const auto js = nlohmann::json::parse(s.out);
    CHECK(js["results"][0]["score"] == "Q3");
    CHECK(js["results"][0].contains("p_hat_add_one"));

    auto mean = base;
    mean.push_back("--row-mean");
    CHECK(run(mean).code == 0);

    auto bad = base;
    bad.insert(bad.end(), {"--score-column", "nope"});
    CHECK(run(bad).code == 2);
}

TEST_CASE("exit codes") {
    const auto good = write("good.csv", kSmall);
    const auto ragged = write("ragged.csv", "g,q\na,1\nb\n");
    const auto unknown = write("unknown.csv", "g,q\na,agree\nb,maybe\n");

    auto r = run({"sbt", "--input", ragged, "--group-col", "g"});
    CHECK(r.code == 3);
    CHECK(r.err.find("row 3") != std::string::npos);

    r = run({"sbt", "--input", unknown, "--group-col", "g"});
    CHECK(r.code == 3);
    CHECK(r.err.find("'maybe'") != std::string::npos);
    CHECK(r.err.find("column 'q'") != std::string::npos);
    CHECK(r.err.find("row 2") != std::string::npos);

    r = run({"sbt", "--input", good, "--group-col", "group", "--n-boot", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--n-boot") != std::string::npos);

    r = run({"ordering", "--input", good, "--group-col", "group", "--score-column", "Q1", "--split", "3"});
    CHECK(r.code == 2);
    r = run({"ordering", "--input", good, "--group-col", "group", "--score-column", "Q1"});
    CHECK(r.code == 2);
    r = run({"ordering", "--input", good, "--group-col", "group", "--score-column", "Q1", "--split", "1", "--total"});
    CHECK(r.code == 2);

    CHECK(run({"sbt", "--input", good}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sbt", "--input", good, "--group-col", "nope"}).code == 2);
    CHECK(run({"sbt", "--input", good, "--group-col", "group", "--levels", "X,Y"}).code == 3);
    CHECK(run({"sbt", "--input", (scratch_dir() / "missing.csv").string(), "--group-col", "g"}).code == 4);
    CHECK(run({"sbt", "--input", good, "--group-col", "group", "--format", "json", "--out",
               (scratch_dir() / "no" / "such" / "dir.json").string()})
              .code == 4);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("likert map and missing-token flags") {
    const auto input = write("custom.csv", "g,q\na,high\na,LOW\na,skip\nb,low\nb,low\nb,high\n");
    const auto map = write("scale.map", "# two point\nhigh = 2\nlow = 1\n");
    const auto r = run({"sbt", "--input", input, "--group-col", "g", "--likert-map", map, "--missing-tokens", "skip",
                        "--n-boot", "20", "--seed", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["mean_table"]["rows"]["a"][0] == 1.5);
    CHECK(run({"sbt", "--input", input, "--group-col", "g", "--likert-map", map}).code == 3);
    CHECK(run({"sbt", "--input", input, "--group-col", "g", "--likert-map", (scratch_dir() / "none.map").string()})
              .code == 2);
}

TEST_CASE("report formatting helpers") {
    CHECK(round_significant(0.004330127) == 0.00433013);
    CHECK(format_real(std::nan("")) == "NA");
    CHECK(format_real(0.25) == "0.25");
    CHECK(format_real(3.0) == "3");

    SbtReport rep;
    rep.mean_table.group_names = {"g"};
    rep.mean_table.item_names = {"a"};
    rep.mean_table.means = Eigen::MatrixXd::Constant(1, 1, std::nan(""));
    rep.noncontainment.group_names = {"g"};
    rep.noncontainment.columns = {"top_1"};
    rep.noncontainment.rates = Eigen::MatrixXd::Zero(1, 1);
    rep.group_sizes = {1};
    const auto j = sbt_to_json(rep, {});
    CHECK(j["warnings"] == nlohmann::json::array());
    CHECK(j["mean_table"]["rows"]["g"][0].is_null());
    CHECK(emit_means_csv(rep) == "group,a\ng,NA\n");

    OrderingTestResult o;
    o.n_boot = 10000;
    o.event_count = 2500;
    o.p_hat = 0.25;
    o.split = 1;
    const std::vector<OrderingEntry> entries{{"s", o}};
    const auto jo = ordering_to_json(entries, {}, false);
    CHECK(jo["results"][0]["std_error"] == 0.00433013);
}
