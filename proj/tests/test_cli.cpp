#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = UCTT_CLI_PATH;

int run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + kCli + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("uctt_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("solve writes solution, dataset, trace, and manifest") {
    TempDir dir;
    const std::string sol = dir / "toy.sol";
    const std::string data = dir / "toy.csv";
    const std::string trace = dir / "toy_trace.csv";
    const int code = run("solve --instance " + testsupport::fixture_path("toy01.ctt") +
                         " --seed 42 --population 10 --lambda 20 --max-evals 3000" +
                         " --out-solution " + sol + " --out-dataset " + data + " --out-trace " +
                         trace);
    CHECK(code == 0);
    CHECK(count_lines(slurp(sol)) == 4);

    const std::string dataset_text = slurp(data);
    CHECK(dataset_text.rfind("# instance=toy01 n_features=4", 0) == 0);

    const std::string trace_text = slurp(trace);
    CHECK(trace_text.rfind("generation,stage,evaluations,best_fitness", 0) == 0);

    const auto manifest = nlohmann::json::parse(slurp(sol + ".manifest.json"));
    CHECK(manifest["command"] == "solve");
    CHECK(manifest["seed"] == 42);
    REQUIRE(manifest["outputs"].size() == 3);
    for (const auto& output : manifest["outputs"]) {
        const std::string checksum = output["checksum"];
        CHECK(checksum.rfind("crc32:", 0) == 0);
    }
}

TEST_CASE("a missing instance file is an input error") {
    TempDir dir;
    CHECK(run("solve --instance " + (dir / "nope.ctt") + " --seed 1 --out-solution " +
              (dir / "s") + " --out-dataset " + (dir / "d") + " --out-trace " + (dir / "t")) == 1);
}

TEST_CASE("a malformed instance reports its line and exits 1") {
    TempDir dir;
    CHECK(run("solve --instance " + testsupport::fixture_path("bad/not_a_number.ctt") +
              " --seed 1 --out-solution " + (dir / "s") + " --out-dataset " + (dir / "d") +
              " --out-trace " + (dir / "t")) == 1);
    const std::string err = slurp("cli_stderr.txt");
    CHECK(err.find("line 10") != std::string::npos);
}

TEST_CASE("an infeasible instance returns 2 and still writes the manifest") {
    TempDir dir;
    const std::string sol = dir / "inf.sol";
    const int code = run("solve --instance " + testsupport::fixture_path("infeasible01.ctt") +
                         " --seed 3 --population 8 --lambda 16 --max-evals 800 --stop-stagnant 5" +
                         " --out-solution " + sol + " --out-dataset " + (dir / "inf.csv") +
                         " --out-trace " + (dir / "inf_trace.csv"));
    CHECK(code == 2);
    CHECK(fs::exists(sol + ".manifest.json"));
}

TEST_CASE("identical seeds give byte-identical artifacts") {
    TempDir dir;
    const std::string base = "solve --instance " + testsupport::fixture_path("toy01.ctt") +
                             " --seed 11 --population 8 --lambda 16 --max-evals 1200";
    REQUIRE(run(base + " --out-solution " + (dir / "a.sol") + " --out-dataset " + (dir / "a.csv") +
                " --out-trace " + (dir / "a_trace.csv")) == 0);
    REQUIRE(run(base + " --out-solution " + (dir / "b.sol") + " --out-dataset " + (dir / "b.csv") +
                " --out-trace " + (dir / "b_trace.csv")) == 0);
    CHECK(slurp(dir / "a.sol") == slurp(dir / "b.sol"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a_trace.csv") == slurp(dir / "b_trace.csv"));
}

TEST_CASE("TT_THREADS mirrors --threads and keeps runs byte-identical") {
    TempDir dir;
    const std::string base = "solve --instance " + testsupport::fixture_path("toy01.ctt") +
                             " --seed 77 --population 8 --lambda 16 --max-evals 1000";
    REQUIRE(run(base + " --out-solution " + (dir / "s1.sol") + " --out-dataset " + (dir / "s1.csv") +
                " --out-trace " + (dir / "s1_trace.csv")) == 0);
    REQUIRE(run(base + " --out-solution " + (dir / "s2.sol") + " --out-dataset " + (dir / "s2.csv") +
                " --out-trace " + (dir / "s2_trace.csv"),
                "TT_THREADS=3 ") == 0);
    CHECK(slurp(dir / "s1.sol") == slurp(dir / "s2.sol"));
    CHECK(slurp(dir / "s1.csv") == slurp(dir / "s2.csv"));
    CHECK(slurp(dir / "s1_trace.csv") == slurp(dir / "s2_trace.csv"));
}

TEST_CASE("train runs the protocol and report merges the outputs") {
    TempDir dir;
    const std::string data = dir / "toy.csv";
    REQUIRE(run("solve --instance " + testsupport::fixture_path("toy01.ctt") +
                " --seed 5 --population 10 --lambda 20 --max-evals 4000 --stop-stagnant 200" +
                " --out-solution " + (dir / "toy.sol") + " --out-dataset " + data +
                " --out-trace " + (dir / "toy_trace.csv")) == 0);

    const std::string reg_model = dir / "reg.model";
    const std::string reg_report = dir / "reg_report.csv";
    CHECK(run("train --dataset " + data +
              " --task regression --mode traditional --batch-size 500 --seed 9" +
              " --out-model " + reg_model + " --out-report " + reg_report) == 0);
    CHECK(fs::exists(reg_model));
    CHECK(fs::exists(reg_model + ".manifest.json"));
    CHECK(slurp(reg_report).find("batch,train_examples,test_examples,score") !=
          std::string::npos);

    const std::string inc_report = dir / "inc_report.csv";
    CHECK(run("train --dataset " + data +
              " --task regression --mode incremental --batch-size 500 --seed 9" +
              " --out-model " + (dir / "inc.model") + " --out-report " + inc_report) == 0);

    CHECK(run("report " + reg_report + " " + inc_report) == 0);
    const std::string table = slurp("cli_stdout.txt");
    CHECK(table.find("Traditional learning") != std::string::npos);
    CHECK(table.find("Incremental learning") != std::string::npos);
    CHECK(table.find("toy01") != std::string::npos);

    // Classification reports carry the A/P/R columns.
    const std::string cls_report = dir / "cls_report.csv";
    CHECK(run("train --dataset " + data +
              " --task classification --mode traditional --batch-size 500 --seed 9" +
              " --out-model " + (dir / "cls.model") + " --out-report " + cls_report) == 0);
    CHECK(run("report " + cls_report) == 0);
    const std::string cls_table = slurp("cli_stdout.txt");
    CHECK(cls_table.find(" A") != std::string::npos);
    CHECK(cls_table.find(" P") != std::string::npos);
    CHECK(cls_table.find(" R") != std::string::npos);
}

TEST_CASE("usage errors exit with 64") {
    TempDir dir;
    CHECK(run("train --dataset x --task sorcery --mode traditional --out-model m --out-report r") ==
          64);
    CHECK(run("frobnicate") == 64);
    CHECK(run("") == 64);
}

TEST_CASE("an empty report file is an input error") {
    TempDir dir;
    const std::string empty = dir / "empty.csv";
    std::ofstream(empty).close();
    CHECK(run("report " + empty) == 1);
}

TEST_CASE("mismatched report schemas are rejected") {
    TempDir dir;
    const std::string a = dir / "a.csv";
    const std::string b = dir / "b.csv";
    std::ofstream(a) << "# uctt-report v1 dataset=x task=regression mode=traditional "
                        "batch_size=10 split=0.7 seed=1 warning=0\n"
                        "batch,train_examples,test_examples,score,precision,recall\n"
                        "1,7,3,0.9,,\n";
    std::ofstream(b) << "# uctt-report v1 dataset=x task=classification mode=incremental "
                        "batch_size=10 split=0.7 seed=1 warning=0\n"
                        "batch,train_examples,test_examples,score,precision,recall\n"
                        "1,7,3,0.9,0.9,0.9\n";
    CHECK(run("report " + a + " " + b) == 1);
}

TEST_CASE("config file values apply beneath command-line flags") {
    TempDir dir;
    const std::string cfg = dir / "ga.toml";
    std::ofstream(cfg) << "[solve]\npopulation = 6\nlambda = 24\nmax-evals = 600\n";
    // --lambda on the command line must beat the config file's 24.
    const int code = run("solve --config " + cfg + " --lambda 12 --instance " +
                         testsupport::fixture_path("toy01.ctt") + " --seed 2 --out-solution " +
                         (dir / "c.sol") + " --out-dataset " + (dir / "c.csv") + " --out-trace " +
                         (dir / "c_trace.csv"));
    CHECK(code == 0);
    const auto manifest = nlohmann::json::parse(slurp((dir / "c.sol") + ".manifest.json"));
    CHECK(manifest["config"]["population"] == 6);
    CHECK(manifest["config"]["lambda"] == 12);
}
