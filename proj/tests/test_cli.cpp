#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gtetrad/dataset.hpp"
#include "gtetrad/report.hpp"
#include "gtetrad/simlab.hpp"

using namespace gtetrad;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

// Paths handed over by the build: the CLI binary under test and the JSON
// schema documenting its report formats. Datasets are materialized once.
struct Harness {
    std::string bin;
    Json schema;
    std::filesystem::path dir;
    std::string main_csv;
    std::string power_csv;
    std::string renamed_csv;
    std::string cov_csv;
    std::string degenerate_csv;

    Harness() {
        const char* bin_env = std::getenv("GTETRAD_BIN");
        if (bin_env == nullptr || *bin_env == '\0') {
            throw std::runtime_error(
                "GTETRAD_BIN is not set; run this suite through ctest");
        }
        bin = bin_env;
        const char* schema_env = std::getenv("GTETRAD_SCHEMA");
        if (schema_env == nullptr || *schema_env == '\0') {
            throw std::runtime_error("GTETRAD_SCHEMA is not set");
        }
        schema = Json::parse(slurp(schema_env));

        char tmpl[] = "/tmp/gtetrad_cli_XXXXXX";
        if (::mkdtemp(tmpl) == nullptr) {
            throw std::runtime_error("could not create a scratch directory");
        }
        dir = tmpl;

        const auto save = [&](const ObservationTable& table,
                              const char* name) {
            const std::string path = (dir / name).string();
            write_csv(table, path);
            return path;
        };
        const auto main_table = generate(SimSetting::preset("II.b"), 200, 606);
        main_csv = save(main_table, "main.csv");
        power_csv = save(generate(SimSetting::preset("II.b"), 1000, 606),
                         "power.csv");
        renamed_csv = save(
            ObservationTable({"a", "b", "c", "d"},
                             {main_table.x(), main_table.y(), main_table.z(),
                              main_table.w()},
                             {}, {}),
            "renamed.csv");
        cov_csv = save(generate(SimSetting::preset("cov:II.b"), 200, 607),
                       "cov.csv");
        degenerate_csv = save(
            ObservationTable({"x", "y", "z", "w"},
                             {main_table.x(), main_table.x(), main_table.x(),
                              main_table.x()},
                             {}, {}),
            "degenerate.csv");
    }
};

const Harness& harness() {
    static Harness instance;
    return instance;
}

CliResult run_cli(const std::string& args,
                  const std::string& env_prefix = "") {
    const Harness& h = harness();
    const std::string err_path = (h.dir / "stderr.txt").string();
    std::string cmd = env_prefix.empty() ? std::string() : env_prefix + " ";
    cmd += "'" + h.bin + "' " + args + " 2>'" + err_path + "'";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    CliResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, got);
    }
    const int status = ::pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.err = slurp(err_path);
    return result;
}

// Minimal JSON-schema checker covering the subset the report schema uses:
// $ref into #/definitions, type, required, properties, and items.
bool type_matches(const Json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

void check_schema(const Json& value, const Json& schema, const Json& root,
                  const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"].get<std::string>();
        const std::string prefix = "#/definitions/";
        if (ref.rfind(prefix, 0) != 0) {
            errors.push_back(path + ": unsupported $ref " + ref);
            return;
        }
        const std::string name = ref.substr(prefix.size());
        if (!root["definitions"].contains(name)) {
            errors.push_back(path + ": dangling $ref " + ref);
            return;
        }
        check_schema(value, root["definitions"][name], root, path, errors);
        return;
    }
    if (schema.contains("type") &&
        !type_matches(value, schema["type"].get<std::string>())) {
        errors.push_back(path + ": expected type " +
                         schema["type"].get<std::string>() + ", got " +
                         value.dump().substr(0, 60));
        return;
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& name : schema["required"]) {
                if (!value.contains(name.get<std::string>())) {
                    errors.push_back(path + ": missing required field '" +
                                     name.get<std::string>() + "'");
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [name, sub] : schema["properties"].items()) {
                if (value.contains(name)) {
                    check_schema(value[name], sub, root, path + "." + name,
                                 errors);
                }
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            check_schema(value[i], schema["items"], root,
                         path + "[" + std::to_string(i) + "]", errors);
        }
    }
}

void expect_valid(const Json& document, const std::string& definition) {
    const Json& root = harness().schema;
    REQUIRE(root["definitions"].contains(definition));
    std::vector<std::string> errors;
    check_schema(document, root["definitions"][definition], root, definition,
                 errors);
    std::string joined;
    for (const auto& e : errors) joined += e + "\n";
    CHECK_MESSAGE(errors.empty(), joined);
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

}  // namespace

TEST_CASE("test subcommand reports all three methods as valid JSON") {
    const auto r = run_cli("test --input " + harness().main_csv);
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const Json doc = Json::parse(r.out);
    expect_valid(doc, "tetrad-test-report");
    CHECK(doc["kind"] == "tetrad-test-report");
    CHECK(doc["n"] == 200);
    CHECK(doc["alpha"] == 0.05);
    CHECK(doc["roles"]["x"] == "x");
    CHECK(doc["roles"]["covariates"].empty());
    REQUIRE(doc["results"].size() == 3);
    CHECK(doc["results"][0]["method"] == "ct");
    CHECK(doc["results"][1]["method"] == "gmm");
    CHECK(doc["results"][2]["method"] == "psmd");
    expect_valid(doc["results"][0], "ct-result");
    expect_valid(doc["results"][1], "gt-result");
    expect_valid(doc["results"][2], "gt-result");
    for (const auto& result : doc["results"]) {
        const double p = result["p_value"].get<double>();
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK_FALSE(doc.contains("sweeps"));
}

TEST_CASE("decisions separate the methods on a confounded design") {
    // Quadratic confounding breaks every tetrad product but still admits a
    // bridge function, so at n = 1000 the classical test rejects while the
    // flexible sieve-based test does not.
    const auto r = run_cli("test --input " + harness().power_csv);
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    CHECK(doc["results"][0]["reject"] == true);
    CHECK(doc["results"][2]["reject"] == false);
}

TEST_CASE("role flags map arbitrary column names") {
    const auto r = run_cli("test --input " + harness().renamed_csv +
                           " --x a --y b --z c --w d --method ct");
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    CHECK(doc["roles"]["x"] == "a");
    CHECK(doc["roles"]["w"] == "d");
    REQUIRE(doc["results"].size() == 1);

    // The same data under default role names gives the same statistic.
    const auto base = run_cli("test --input " + harness().main_csv +
                              " --method ct");
    const Json base_doc = Json::parse(base.out);
    CHECK(doc["results"][0]["statistic"] ==
          base_doc["results"][0]["statistic"]);

    const auto missing = run_cli("test --input " + harness().main_csv +
                                 " --x nope --method ct");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("absent") != std::string::npos);
}

TEST_CASE("covariates flow through to the reports") {
    const auto r = run_cli("test --input " + harness().cov_csv +
                           " --covariates v");
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    expect_valid(doc, "tetrad-test-report");
    REQUIRE(doc["roles"]["covariates"].size() == 1);
    CHECK(doc["roles"]["covariates"][0] == "v");
    // The classical path announces the residualization.
    const Json& warnings = doc["results"][0]["warnings"];
    REQUIRE(warnings.size() >= 1);
    CHECK(warnings[0].get<std::string>().find("residualized") !=
          std::string::npos);
}

TEST_CASE("significance level outside the generalized-test range") {
    const auto gt = run_cli("test --input " + harness().main_csv +
                            " --method gt-gmm --alpha 0.3");
    CHECK(gt.code == 2);
    CHECK(gt.err.find("0.215") != std::string::npos);

    // The classical test accepts any interior level.
    const auto ct = run_cli("test --input " + harness().main_csv +
                            " --method ct --alpha 0.3");
    CHECK(ct.code == 0);

    const auto sim = run_cli(
        "simulate --setting I --method gt-psmd --n 50 --reps 2 --alpha 0.3");
    CHECK(sim.code == 2);
    CHECK(sim.err.find("0.215") != std::string::npos);
}

TEST_CASE("permutation sweep emits twelve entries per method") {
    const auto r = run_cli("test --input " + harness().main_csv +
                           " --method gt-gmm --permutations");
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    expect_valid(doc, "tetrad-test-report");
    REQUIRE(doc["sweeps"].size() == 1);
    CHECK(doc["sweeps"][0]["method"] == "gmm");
    REQUIRE(doc["sweeps"][0]["entries"].size() == 12);
    for (const auto& entry : doc["sweeps"][0]["entries"]) {
        REQUIRE(entry.contains("report"));
        CHECK(entry["report"]["permutation"] == entry["permutation"]);
    }

    // The identity permutation reproduces the direct run bit for bit.
    CHECK(doc["sweeps"][0]["entries"][0]["report"]["t_n"] ==
          doc["results"][0]["t_n"]);

    // The sweep subcommand produces the dedicated document kind, covering
    // both generalized methods by default.
    const auto sweep = run_cli("sweep --input " + harness().main_csv);
    REQUIRE(sweep.code == 0);
    const Json sweep_doc = Json::parse(sweep.out);
    expect_valid(sweep_doc, "permutation-sweep");
    CHECK(sweep_doc["kind"] == "permutation-sweep");
    REQUIRE(sweep_doc["sweeps"].size() == 2);
    CHECK(sweep_doc["sweeps"][0]["method"] == "gmm");
    CHECK(sweep_doc["sweeps"][1]["method"] == "psmd");
    CHECK(sweep_doc["sweeps"][0]["entries"].size() == 12);
    CHECK(sweep_doc["sweeps"][1]["entries"].size() == 12);
    CHECK_FALSE(sweep_doc.contains("results"));

    // The identity entry of the sweep matches the test subcommand.
    CHECK(sweep_doc["sweeps"][0]["entries"][0]["report"]["t_n"] ==
          doc["results"][0]["t_n"]);

    const auto bad = run_cli("sweep --input " + harness().main_csv +
                             " --method ct");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("not ct") != std::string::npos);
}

TEST_CASE("csv format and file output") {
    const std::string out_path = (harness().dir / "report.csv").string();
    const auto to_file = run_cli("test --input " + harness().main_csv +
                                 " --format csv --out " + out_path);
    REQUIRE(to_file.code == 0);
    CHECK(to_file.out.empty());
    const std::string content = slurp(out_path);
    CHECK(content.rfind("method,permutation,statistic,p_value,reject,error\n",
                        0) == 0);
    CHECK(count_lines(content) == 4);  // header + ct + gmm + psmd

    const auto to_stdout = run_cli("test --input " + harness().main_csv +
                                   " --format csv --out -");
    CHECK(to_stdout.out == content);

    // With the sweep included, each gt method contributes 12 more rows.
    const auto swept = run_cli("test --input " + harness().main_csv +
                               " --method gt-gmm --permutations --format csv");
    CHECK(count_lines(swept.out) == 14);

    const auto unknown = run_cli("test --input " + harness().main_csv +
                                 " --format xml");
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("unknown format") != std::string::npos);

    const auto unwritable = run_cli("test --input " + harness().main_csv +
                                    " --method ct --out /nonexistent/x.json");
    CHECK(unwritable.code == 2);
    CHECK(unwritable.err.find("cannot open") != std::string::npos);
}

TEST_CASE("standardization leaves the scale-free statistics unchanged") {
    const auto raw = run_cli("test --input " + harness().main_csv);
    const auto scaled = run_cli("test --input " + harness().main_csv +
                                " --standardize");
    REQUIRE(raw.code == 0);
    REQUIRE(scaled.code == 0);
    const Json a = Json::parse(raw.out);
    const Json b = Json::parse(scaled.out);
    for (int i = 0; i < 3; ++i) {
        const double pa = a["results"][i]["p_value"].get<double>();
        const double pb = b["results"][i]["p_value"].get<double>();
        CHECK(pa == doctest::Approx(pb).epsilon(1e-6));
    }
}

TEST_CASE("bridge flags reach the estimators") {
    const auto r = run_cli("test --input " + harness().main_csv +
                           " --method gt-psmd --basis-h pol:3 --basis-g "
                           "pol:3 --instrument-basis pol:5 --lambda 0.001");
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    const Json& result = doc["results"][0];
    CHECK(result["bridge_h"]["lambda"] == 0.001);
    CHECK(result["bridge_h"]["basis"].get<std::string>().find("pol:3") !=
          std::string::npos);
    CHECK(result["bridge_h"]["instrument_basis"]
              .get<std::string>()
              .find("pol:5") != std::string::npos);
    CHECK(result["bridge_h"]["coefficients"].size() == 3);

    const auto gmm = run_cli("test --input " + harness().main_csv +
                             " --method gt-gmm --basis-h poly:1 --basis-g "
                             "poly:1");
    REQUIRE(gmm.code == 0);
    const Json gmm_doc = Json::parse(gmm.out);
    CHECK(gmm_doc["results"][0]["bridge_h"]["coefficients"].size() == 2);

    const auto bad = run_cli("test --input " + harness().main_csv +
                             " --method gt-psmd --basis-h pol:0");
    CHECK(bad.code == 2);
}

TEST_CASE("simulate writes the study table in both formats") {
    const std::string common =
        "simulate --setting II.b --method ct --n 150 --reps 20 --seed 42";
    const auto csv = run_cli(common);
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("setting,method,n,reps,seed,rejection_rate,mc_se\n",
                        0) == 0);
    REQUIRE(count_lines(csv.out) == 2);
    CHECK(csv.out.find("II.b,ct,150,20,42,") != std::string::npos);

    const auto json = run_cli(common + " --format json");
    REQUIRE(json.code == 0);
    const Json doc = Json::parse(json.out);
    expect_valid(doc, "power-study");
    CHECK(doc["kind"] == "power-study");
    CHECK(doc["alpha"] == 0.05);
    REQUIRE(doc["entries"].size() == 1);
    CHECK(doc["entries"][0]["setting"] == "II.b");
    CHECK(doc["entries"][0]["failures"] == 0);
    CHECK(doc["table"]["II.b"]["ct"]["150"].is_number());

    // A single replication yields a degenerate rate.
    const auto single = run_cli(
        "simulate --setting I --method ct --n 100 --reps 1 --seed 9 "
        "--format json");
    REQUIRE(single.code == 0);
    const double rate =
        Json::parse(single.out)["entries"][0]["rejection_rate"].get<double>();
    CHECK((rate == 0.0 || rate == 1.0));
}

TEST_CASE("the table2 macro expands to the full grid") {
    const auto r = run_cli(
        "simulate --setting table2 --reps 2 --seed 5 --format json");
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    expect_valid(doc, "power-study");
    CHECK(doc["entries"].size() == 30);  // 5 settings x 3 methods x 2 sizes
    for (const char* setting : {"I", "II.a", "II.b", "III.a", "III.b"}) {
        for (const char* method : {"ct", "gt-gmm", "gt-psmd"}) {
            for (const char* n : {"500", "1000"}) {
                CAPTURE(setting);
                CAPTURE(method);
                CAPTURE(n);
                CHECK(doc["table"][setting][method][n].is_number());
            }
        }
    }
}

TEST_CASE("worker count never changes simulate output") {
    const std::string common =
        "simulate --setting II.b --method gt-gmm --n 150 --reps 16 --seed 77";
    const auto serial = run_cli(common + " --workers 1");
    REQUIRE(serial.code == 0);
    const auto threaded = run_cli(common + " --workers 8");
    REQUIRE(threaded.code == 0);
    CHECK(serial.out == threaded.out);

    // The environment variable is the fallback for the flag.
    const auto from_env = run_cli(common, "GTETRAD_WORKERS=8");
    REQUIRE(from_env.code == 0);
    CHECK(from_env.out == serial.out);

    const auto bad_env = run_cli(common, "GTETRAD_WORKERS=abc");
    CHECK(bad_env.code == 2);
    CHECK(bad_env.err.find("GTETRAD_WORKERS") != std::string::npos);
}

TEST_CASE("exit codes distinguish usage, data, and numerical failures") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("test --help").code == 0);
    const auto help = run_cli("--help");
    CHECK(help.out.find("simulate") != std::string::npos);

    CHECK(run_cli("").code == 2);                  // a subcommand is required
    CHECK(run_cli("bogus").code == 2);             // unknown subcommand
    CHECK(run_cli("test").code == 2);              // --input is required
    CHECK(run_cli("test --input x --nope").code == 2);  // unknown flag
    CHECK(run_cli("simulate --setting nope --reps 1").code == 2);
    CHECK(run_cli("simulate --setting I --reps 1 --alpha 1.5").code == 2);
    CHECK(run_cli("simulate --setting I --reps 0").code == 2);

    const auto missing = run_cli("test --input " +
                                 (harness().dir / "absent.csv").string());
    CHECK(missing.code == 2);

    // Four identical columns defeat the covariance inversion: a numerical
    // failure, not a usage error.
    const auto degenerate = run_cli("test --input " +
                                    harness().degenerate_csv +
                                    " --method ct");
    CHECK(degenerate.code == 3);
    CHECK(degenerate.err.find("error") != std::string::npos);
}
