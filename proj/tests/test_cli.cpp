#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adwords/cli.hpp"
#include "adwords/report_io.hpp"
#include "support.hpp"

using namespace adwords;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("adwords-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("gen example_three writes three files") {
  TempDir dir;
  const Result r = cli({"gen", "--family", "example_three", "--W", "5", "--out", dir.path()});
  REQUIRE(r.code == kExitPass);
  for (const char* name : {"I1.json", "I2.json", "I3.json"}) {
    const Instance inst = read_instance(dir / name);
    CHECK(total_budget(inst) == 10);
  }
}

TEST_CASE("gen is deterministic in the seed") {
  TempDir dir;
  const std::vector<std::string> base{"gen", "general", "--family", "planted", "--mu", "0.01",
                                      "--seed", "7", "--out"};
  auto a = base, b = base;
  a.push_back(dir / "a.json");
  b.push_back(dir / "b.json");
  REQUIRE(cli(a).code == kExitPass);
  REQUIRE(cli(b).code == kExitPass);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const Instance inst = read_instance(dir / "a.json");
  CHECK(!(Ratio{1, 100} < mu(inst)));
}

TEST_CASE("gen to stdout") {
  const Result r = cli({"gen", "--family", "upper_triangular", "--n", "4"});
  REQUIRE(r.code == kExitPass);
  const Instance inst = from_json_text(r.out);
  CHECK(inst.num_queries() == 4);
  CHECK(r.err.find("id=inst-") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"gen", "--family", "upper_triangular", "--n", "0"}).code == kExitUsage);
  CHECK(cli({"gen", "--family", "nonsense"}).code == kExitUsage);
  CHECK(cli({"gen"}).code == kExitUsage);
  CHECK(cli({"run", "--bogus"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"run", "/nonexistent/file.json"}).code == kExitUsage);
  CHECK(cli({"verify", "--scale", "huge"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitPass);
}

TEST_CASE("run") {
  TempDir dir;
  REQUIRE(cli({"gen", "--family", "upper_triangular", "--n", "1", "--out", dir / "one.json"})
              .code == kExitPass);
  SUBCASE("a single edge yields W = 1") {
    const Result r = cli({"run", dir / "one.json", "ranking", "--seed", "3"});
    REQUIRE(r.code == kExitPass);
    const Json doc = Json::parse(r.out);
    CHECK(doc["W"] == 1);
    CHECK(doc["seed"] == 3);
    CHECK(!doc.contains("trace"));
  }
  SUBCASE("trace") {
    const Result r = cli({"run", dir / "one.json", "--trace"});
    REQUIRE(r.code == kExitPass);
    const Json doc = Json::parse(r.out);
    REQUIRE(doc.contains("trace"));
    CHECK(doc["trace"].size() == 1);
  }
  SUBCASE("csv") {
    const Result r = cli({"run", dir / "one.json", "--format", "csv", "--seed", "9"});
    REQUIRE(r.code == kExitPass);
    const CsvTable t = parse_csv(r.out);
    CHECK(t.seed == 9);
    CHECK(t.rows.size() == 1);
  }
  SUBCASE("class mismatch is a usage error") {
    REQUIRE(cli({"gen", "--family", "example_no_surpass", "--out", dir / "ns.json"}).code ==
            kExitPass);
    CHECK(cli({"run", dir / "ns.json", "ranking"}).code == kExitUsage);
    CHECK(cli({"run", dir / "ns.json", "nonsense"}).code == kExitUsage);
  }
  SUBCASE("ranks file") {
    std::ofstream(dir / "r.json") << "[0.5]";
    std::ofstream(dir / "bad.json") << "[0.5, 0.5]";
    CHECK(cli({"run", dir / "one.json", "--ranks", dir / "r.json"}).code == kExitPass);
    CHECK(cli({"run", dir / "one.json", "--ranks", dir / "bad.json"}).code == kExitUsage);
  }
}

TEST_CASE("the fake-money engine reproduces RANKING on unit instances") {
  TempDir dir;
  for (int s = 1; s <= 5; ++s) {
    const std::string path = dir / ("u" + std::to_string(s) + ".json");
    REQUIRE(cli({"gen", "obm", "--family", "random", "--n", "12", "--m", "5", "--seed",
                 std::to_string(s), "--out", path})
                .code == kExitPass);
    const Json a = Json::parse(cli({"run", path, "ranking", "--seed", "4"}).out);
    const Json b = Json::parse(cli({"run", path, "general", "--seed", "4"}).out);
    CHECK(a["matching"] == b["matching"]);
  }
}

TEST_CASE("ratio, audit and sweep outputs parse") {
  TempDir dir;
  REQUIRE(cli({"gen", "--family", "example_no_surpass", "--alpha", "2", "--k", "5", "--out",
               dir / "ns.json"})
              .code == kExitPass);
  const Result ratio = cli({"ratio", dir / "ns.json", "--trials", "50", "--jobs", "2"});
  REQUIRE(ratio.code == kExitPass);
  CHECK(ratio_from_json(Json::parse(ratio.out)).trials == 50);

  const Result csv = cli({"ratio", dir / "ns.json", "--trials", "50", "--format", "csv"});
  REQUIRE(csv.code == kExitPass);
  CHECK(parse_csv(csv.out).rows.size() == 1);

  std::ofstream(dir / "eq.json") << "[0.5, 0.5]";
  const Result audit = cli({"audit", dir / "ns.json", "--ranks", dir / "eq.json"});
  REQUIRE(audit.code == kExitPass);
  const Json doc = Json::parse(audit.out);
  CHECK(doc["summary"]["violations"] == 1);
  CHECK(doc["summary"]["run_rate"] == 1.0);

  const Result seeded = cli({"audit", dir / "ns.json", "--trials", "10", "--format", "csv"});
  REQUIRE(seeded.code == kExitPass);
  CHECK(parse_csv(seeded.out).seed.has_value());

  const Result sweep = cli({"sweep", "--mu", "0.2,0.05", "--m", "3", "--W", "100", "--trials",
                            "20", "--format", "csv", "--out", dir / "sweep.csv"});
  REQUIRE(sweep.code == kExitPass);
  const CsvTable t = parse_csv(slurp(dir / "sweep.csv"));
  CHECK(t.rows.size() == 2);
  CHECK(std::stod(t.rows[1][t.column("mu_target")]) == 0.05);
}

TEST_CASE("outputs are deterministic") {
  TempDir dir;
  REQUIRE(cli({"gen", "single_valued", "--family", "planted", "--n", "15", "--seed", "2",
               "--out", dir / "sv.json"})
              .code == kExitPass);
  const std::vector<std::string> args{"ratio", dir / "sv.json", "--trials", "200", "--seed",
                                      "5"};
  auto four = args;
  four.insert(four.end(), {"--jobs", "4"});
  CHECK(cli(args).out == cli(args).out);
  CHECK(cli(args).out == cli(four).out);
}

TEST_CASE("verify smoke passes") {
  const Result r = cli({"verify", "--scale", "smoke", "--jobs", "2"});
  MESSAGE(r.out);
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
