#include "doctest.h"

#include "renoise/cli.hpp"
#include "renoise/error.hpp"
#include "renoise/experiments.hpp"
#include "renoise/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace renoise;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / "renoise_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("grid parsing")
    {
        auto g = parse_grid("0.5:4:0.5");
        REQUIRE(g.size() == 8);
        CHECK(g.front() == 0.5);
        CHECK(g.back() == 4.0);
        CHECK(parse_grid("1,2,3") == std::vector<double>{1, 2, 3});
        CHECK(parse_int_list("64,256") == std::vector<long long>{64, 256});
        CHECK_THROWS_AS(parse_grid("1:x:2"), Error);
        CHECK_THROWS_AS(parse_int_list("1.5"), Error);
    }

    TEST_CASE("fixed-point writes result and manifest")
    {
        fs::path out = scratch("fixed_point");
        CHECK(run_cli({"fixed-point", "--k", "1", "--N", "30", "--out", out.string()}) == kExitOk);
        auto res = read_json(out / "result.json");
        CHECK(std::abs(res["lambda"].get<double>() + 0.39953528) < 1e-8);
        CHECK(res["residual"].get<double>() < 1e-10);
        auto man = read_json(out / "manifest.json");
        CHECK(man["command"] == "fixed-point");
        CHECK(man["config"]["N"] == "30");
        CHECK(man.contains("version"));
        CHECK(man.contains("seed"));
        CHECK_FALSE(man.contains("timestamp"));
    }

    TEST_CASE("convexity check mode reproduces gamma")
    {
        fs::path out = scratch("convexity");
        CHECK(run_cli({"convexity", "--k", "1", "--p-grid", "0.5:4:0.5", "--check", "--out", out.string()}) == kExitOk);
        auto res = read_json(out / "result.json");
        CHECK(std::abs(res["gamma"].get<double>() - 3.8836) < 0.01);
        CHECK(fs::exists(out / "convexity.csv"));
    }

    TEST_CASE("clt check mode reports the KS series")
    {
        fs::path out = scratch("clt");
        int rc = run_cli({"clt", "--map", "pd", "--n", "4096", "--noise", "uniform", "--M", "20000", "--check", "--out", out.string()});
        auto res = read_json(out / "result.json");
        bool ks_ok = false, all_ok = true;
        for (const auto& c : res["checks"]) {
            if (c["name"] == "KS decreasing") ks_ok = c["pass"].get<bool>();
            all_ok = all_ok && c["pass"].get<bool>();
        }
        CHECK(ks_ok);
        CHECK(rc == (all_ok ? kExitOk : kExitCheck));
        CHECK(res["series"].size() == 4);
    }

    TEST_CASE("exit codes")
    {
        fs::path out = scratch("codes");
        CHECK(run_cli({"no-such-command"}) == kExitConfig);
        CHECK(run_cli({"spectrum", "--p", "1:x", "--out", out.string()}) == kExitConfig);
        CHECK(run_cli({"clt", "--map", "nowhere", "--out", out.string()}) == kExitConfig);
        CHECK(run_cli({"clt", "--map", "pd", "--sigma", "10", "--ns", "10", "--M", "1000", "--out", out.string()}) == kExitNumerical);
        CHECK(run_cli({"--help"}) == kExitOk);
    }

    TEST_CASE("configuration file with flag override")
    {
        fs::path out = scratch("toml");
        fs::create_directories(out);
        std::ofstream(out / "run.toml") << "[spectrum]\np = \"1,2\"\nN = 40\n";
        CHECK(run_cli({"--config", (out / "run.toml").string(), "spectrum", "--N", "32", "--out", (out / "run").string()}) ==
              kExitOk);
        auto man = read_json(out / "run" / "manifest.json");
        CHECK(man["config"]["p"] == "1,2");
        CHECK(man["config"]["N"] == "32");
        CHECK(read_json(out / "run" / "result.json")["spectrum"].size() == 2);
    }

    TEST_CASE("outputs stay inside the output directory")
    {
        fs::path root = scratch("contained");
        fs::create_directories(root);
        fs::path out = root / "a" / "b";
        CHECK(run_cli({"example2", "--M", "2000", "--out", out.string()}) == kExitOk);
        std::size_t outside = 0;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file() && e.path().parent_path() != out) ++outside;
        CHECK(outside == 0);
    }

    TEST_CASE("report")
    {
        fs::path empty = scratch("empty");
        fs::create_directories(empty);
        try {
            render_report(empty);
            FAIL("expected MissingManifest");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingManifest);
        }
        CHECK(run_cli({"report", "--out", empty.string()}) == kExitConfig);

        fs::path a = scratch("report_a"), b = scratch("report_b");
        REQUIRE(run_cli({"convexity", "--seed", "5", "--out", a.string()}) == kExitOk);
        REQUIRE(run_cli({"convexity", "--seed", "5", "--out", b.string()}) == kExitOk);
        std::string ra = render_report(a);
        CHECK(ra == render_report(b));
        std::size_t rows = 0;
        std::istringstream in(ra.substr(ra.find("## Verdicts")));
        std::string line;
        while (std::getline(in, line) && line.rfind("## Checks", 0) != 0)
            if (line.rfind("| ", 0) == 0 && line.find("| verdict |") == std::string::npos) ++rows;
        CHECK(rows == 4);
        CHECK(run_cli({"report", "--out", a.string()}) == kExitOk);
        CHECK(fs::exists(a / "summary.md"));
    }

    TEST_CASE("same seed gives identical artifacts")
    {
        fs::path a = scratch("det_a"), b = scratch("det_b");
        std::vector<std::string> args{"berry-esseen", "--ns", "16,32,64,128", "--M", "5000", "--seed", "9", "--out"};
        auto aa = args, bb = args;
        aa.push_back(a.string());
        bb.push_back(b.string());
        REQUIRE(run_cli(aa) == kExitOk);
        REQUIRE(run_cli(bb) == kExitOk);
        CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
        for (const auto& e : fs::directory_iterator(a))
            if (e.path().extension() == ".csv") CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }

    TEST_CASE("csv and json formatting")
    {
        CHECK(csv_field("plain") == "plain");
        CHECK(csv_field("a,b") == "\"a,b\"");
        CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
        CHECK(csv_field("two\nlines") == "\"two\nlines\"");
        Table t{"t", {"x", "label"}, {{"1", "a,b"}}};
        CHECK(to_csv(t) == "x,label\r\n1,\"a,b\"\r\n");
        fs::path p = scratch("json") / "k.json";
        fs::create_directories(p.parent_path());
        write_json(p, nlohmann::json{{"zeta", 1}, {"alpha", 2}});
        std::string s = slurp(p);
        CHECK(s.find("alpha") < s.find("zeta"));
        CHECK(s.find("\n  \"alpha\"") != std::string::npos);
        CHECK(num(std::nan("")).is_null());
        CHECK(fmt(0.1) == "0.1");
    }
}
