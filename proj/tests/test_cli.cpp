#include <doctest.h>

#include <sgcm/rng.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the installed CLI (path in SGCM_CLI) through the shell, capturing
// streams in the scratch directory.
class CliFixture {
public:
    CliFixture() : td_("cli") {
        const char* cli = std::getenv("SGCM_CLI");
        REQUIRE_MESSAGE(cli != nullptr, "SGCM_CLI must point at the sgcm binary");
        cli_ = cli;
    }

    RunResult run(const std::string& args, const std::string& env = "") const {
        const std::string out_path = td_.path("stdout.txt").string();
        const std::string err_path = td_.path("stderr.txt").string();
        std::string cmd = env.empty() ? "" : env + " ";
        cmd += "\"" + cli_ + "\" " + args + " > \"" + out_path + "\" 2> \"" + err_path + "\"";
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = testutil::read_file(out_path);
        r.err = testutil::read_file(err_path);
        return r;
    }

    const testutil::TempDir& dir() const { return td_; }
    std::string file(const std::string& name) const { return td_.path(name).string(); }

private:
    testutil::TempDir td_;
    std::string cli_;
};

std::string csv_column(int n, std::uint64_t seed) {
    sgcm::Rng rng(seed);
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < n; ++i) os << rng.normal() << "\n";
    return os.str();
}

std::string sphere_rows(int n, std::uint64_t seed) {
    sgcm::Rng rng(seed);
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < n; ++i) {
        double a = rng.normal(), b = rng.normal(), c = rng.normal();
        const double norm = std::sqrt(a * a + b * b + c * c);
        os << a / norm << "," << b / norm << "," << c / norm << "\n";
    }
    return os.str();
}

// Strips '#' comment lines, returning the payload.
std::string strip_comments(const std::string& content) {
    std::istringstream in(content);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        out << line << "\n";
    }
    return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly") {
    CliFixture cli;
    RunResult r = cli.run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("test") != std::string::npos);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(r.out.find("diagnose") != std::string::npos);
}

TEST_CASE("missing subcommand and unknown flags are usage errors") {
    CliFixture cli;
    CHECK(cli.run("").exit_code == 2);
    CHECK(cli.run("test --bogus-flag 1").exit_code == 2);
    CHECK(cli.run("frobnicate").exit_code == 2);
}

TEST_CASE("test subcommand writes a parseable result record") {
    CliFixture cli;
    cli.dir().write("x.csv", csv_column(40, 1));
    cli.dir().write("y.csv", csv_column(40, 2));
    cli.dir().write("z.csv", csv_column(40, 3));
    const std::string out = cli.file("result.json");

    RunResult r = cli.run("test --x \"" + cli.file("x.csv") + "\" --y \"" + cli.file("y.csv") +
                          "\" --z \"" + cli.file("z.csv") + "\" --B 100 --seed 7 --out \"" +
                          out + "\"");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("statistic ") != std::string::npos);
    CHECK(r.out.find("p_value ") != std::string::npos);
    CHECK(r.out.find("reject ") != std::string::npos);

    const std::string content = testutil::read_file(out);
    CHECK(content.rfind("# sgcm test", 0) == 0);
    CHECK(content.find("# seed = 7") != std::string::npos);

    const nlohmann::json j = nlohmann::json::parse(strip_comments(content));
    CHECK(j["p_value"].get<double>() > 0.0);
    CHECK(j["p_value"].get<double>() <= 1.0);
    CHECK(j["reject"].is_boolean());
    CHECK(j["diagnostics"]["n"].get<int>() == 40);
    CHECK(j["diagnostics"]["P"].get<int>() >= 1);
    CHECK(j["diagnostics"]["gamma_z"].get<double>() > 0.0);
}

TEST_CASE("input problems map to exit code 2 and degeneracy to 3") {
    CliFixture cli;
    cli.dir().write("y.csv", csv_column(40, 2));
    cli.dir().write("z.csv", csv_column(40, 3));

    RunResult missing = cli.run("test --x \"" + cli.file("absent.csv") + "\" --y \"" +
                                cli.file("y.csv") + "\" --z \"" + cli.file("z.csv") +
                                "\" --B 50 --out \"" + cli.file("r.json") + "\"");
    CHECK(missing.exit_code == 2);

    std::string constant;
    for (int i = 0; i < 40; ++i) constant += "1.5\n";
    cli.dir().write("const.csv", constant);
    RunResult degen = cli.run("test --x \"" + cli.file("const.csv") + "\" --y \"" +
                              cli.file("y.csv") + "\" --z \"" + cli.file("z.csv") +
                              "\" --B 50 --out \"" + cli.file("r.json") + "\"");
    CHECK(degen.exit_code == 3);
    CHECK(degen.err.find("variable X") != std::string::npos);
}

TEST_CASE("test output is byte-identical across reruns and thread counts") {
    CliFixture cli;
    cli.dir().write("x.csv", csv_column(40, 4));
    cli.dir().write("y.csv", csv_column(40, 5));
    cli.dir().write("z.csv", csv_column(40, 6));
    const std::string out = cli.file("result.json");
    const std::string args = "test --x \"" + cli.file("x.csv") + "\" --y \"" +
                             cli.file("y.csv") + "\" --z \"" + cli.file("z.csv") +
                             "\" --B 200 --seed 11 --out \"" + out + "\"";

    REQUIRE(cli.run(args, "SGCM_THREADS=1").exit_code == 0);
    const std::string first = testutil::read_file(out);
    REQUIRE(cli.run(args, "SGCM_THREADS=8").exit_code == 0);
    const std::string second = testutil::read_file(out);
    CHECK(first == second);
    REQUIRE(cli.run(args).exit_code == 0);
    CHECK(testutil::read_file(out) == first);
}

TEST_CASE("simulate writes one study row with the pinned header") {
    CliFixture cli;
    const std::string out = cli.file("study.csv");
    RunResult r = cli.run(
        "simulate --family low_dim --scenario null --n 60 --reps 10 --B 100 --seed 5 --out \"" +
        out + "\"");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("rejection_rate ") != std::string::npos);

    const std::string content = testutil::read_file(out);
    CHECK(content.rfind("# sgcm simulate", 0) == 0);
    const std::string payload = strip_comments(content);
    std::istringstream lines(payload);
    std::string header, row, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK(header == "family,scenario,a,d,c,n,B,replications,rejection_rate,se,wall_time_s");
    CHECK(row.rfind("low_dim,null,2,10,0,60,100,10,", 0) == 0);
    CHECK(row.find("nan") != std::string::npos);
    bool more = false;
    while (std::getline(lines, extra)) {
        if (!extra.empty()) more = true;
    }
    CHECK_FALSE(more);
}

TEST_CASE("simulate rejects an off-grid oscillation parameter") {
    CliFixture cli;
    RunResult r = cli.run("simulate --family low_dim --a 3 --n 60 --reps 2 --B 50 --out \"" +
                          cli.file("study.csv") + "\"");
    CHECK(r.exit_code == 2);
}

TEST_CASE("simulate --timing replaces the nan column with a measurement") {
    CliFixture cli;
    const std::string out = cli.file("study.csv");
    RunResult r = cli.run(
        "simulate --family low_dim --n 40 --reps 2 --B 50 --timing --seed 1 --out \"" + out +
        "\"");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const std::string payload = strip_comments(testutil::read_file(out));
    CHECK(payload.find("nan") == std::string::npos);
}

TEST_CASE("simulate output is byte-identical across reruns and thread counts") {
    CliFixture cli;
    const std::string out = cli.file("study.csv");
    const std::string args =
        "simulate --family low_dim --scenario dgp1_1 --n 60 --reps 6 --B 100 --seed 9 --out \"" +
        out + "\"";
    REQUIRE(cli.run(args, "SGCM_THREADS=1").exit_code == 0);
    const std::string first = testutil::read_file(out);
    REQUIRE(cli.run(args, "SGCM_THREADS=8").exit_code == 0);
    CHECK(testutil::read_file(out) == first);
    REQUIRE(cli.run(args).exit_code == 0);
    CHECK(testutil::read_file(out) == first);
}

TEST_CASE("config files feed subcommand options") {
    CliFixture cli;
    cli.dir().write("study.ini",
                    "[simulate]\n"
                    "family=low_dim\n"
                    "n=55\n"
                    "reps=2\n"
                    "B=50\n");
    const std::string out = cli.file("study.csv");
    RunResult r = cli.run("--config \"" + cli.file("study.ini") + "\" simulate --seed 2 --out \"" +
                          out + "\"");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const std::string content = testutil::read_file(out);
    CHECK(content.find("# n = 55") != std::string::npos);
    CHECK(content.find("low_dim,null,2,10,0,55,50,2,") != std::string::npos);
}

TEST_CASE("diagnose reports kernel and negative-type diagnostics for sphere data") {
    CliFixture cli;
    cli.dir().write("s.csv", sphere_rows(15, 12));
    const std::string out = cli.file("diag.txt");
    RunResult r = cli.run("diagnose --input \"" + cli.file("s.csv") +
                          "\" --space sphere --trials 300 --seed 4 --out \"" + out + "\"");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("gamma ") != std::string::npos);
    CHECK(r.out.find("negative_type_max ") != std::string::npos);
    CHECK(r.out.find("gram_min_eigenvalue ") != std::string::npos);

    double neg_type = 1.0;
    {
        std::istringstream in(r.out);
        std::string key;
        double value;
        while (in >> key >> value) {
            if (key == "negative_type_max") neg_type = value;
        }
    }
    CHECK(neg_type <= 1e-8);

    // FVE column is nondecreasing and ends at exactly 1.
    const std::string content = testutil::read_file(out);
    CHECK(content.rfind("# sgcm diagnose", 0) == 0);
    const std::string::size_type table = content.find("index,lambda,fve\n");
    REQUIRE(table != std::string::npos);
    std::istringstream rows(content.substr(table + 17));
    std::string line;
    double prev = 0.0, last = -1.0;
    int count = 0;
    while (std::getline(rows, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        REQUIRE(c2 != std::string::npos);
        const double fve = std::stod(line.substr(c2 + 1));
        CHECK(fve >= prev);
        prev = fve;
        last = fve;
        ++count;
    }
    CHECK(count >= 1);
    CHECK(last == 1.0);
}

TEST_CASE("diagnose rejects invalid sphere rows with exit code 3") {
    CliFixture cli;
    cli.dir().write("bad.csv", "1,0,0\n0.5,0.5,0\n0,1,0\n");
    RunResult r = cli.run("diagnose --input \"" + cli.file("bad.csv") +
                          "\" --space sphere --out \"" + cli.file("d.txt") + "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("row 2") != std::string::npos);
}

TEST_CASE("diagnose output is byte-identical across reruns") {
    CliFixture cli;
    cli.dir().write("s.csv", sphere_rows(12, 13));
    const std::string out = cli.file("diag.txt");
    const std::string args = "diagnose --input \"" + cli.file("s.csv") +
                             "\" --space sphere --trials 100 --seed 6 --out \"" + out + "\"";
    REQUIRE(cli.run(args, "SGCM_THREADS=1").exit_code == 0);
    const std::string first = testutil::read_file(out);
    REQUIRE(cli.run(args, "SGCM_THREADS=8").exit_code == 0);
    CHECK(testutil::read_file(out) == first);
}

}
