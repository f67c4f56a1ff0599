#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "epkit/cli.hpp"
#include "epkit/epfinder.hpp"

using namespace epkit;
using namespace epkit::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "epkit");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::size_t start = 0;
    for (;;) {
      const auto c = line.find(',', start);
      row.push_back(line.substr(start, c == std::string::npos ? std::string::npos : c - start));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double num(const std::string& s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(r.ec == std::errc());
  REQUIRE(r.ptr == s.data() + s.size());
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("epkit_cli_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("format_number round-trips and ignores locale") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    double x;
    const std::uint64_t b = bits(rng);
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    CHECK(num(format_number(x)) == x);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-0.5) == "-0.5");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV tables quote only when needed") {
  CsvTable t({"a", "b"});
  t.row({"1", "x,y"});
  t.row({"say \"hi\"", ""});
  CHECK(t.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  CHECK_THROWS(t.row({"1"}));
}

TEST_CASE("atomic writes leave only the target") {
  const auto dir = scratch("atomic");
  write_atomic(dir / "sub" / "f.txt", "hello");
  CHECK(slurp(dir / "sub" / "f.txt") == "hello");
  write_atomic(dir / "sub" / "f.txt", "again");
  CHECK(slurp(dir / "sub" / "f.txt") == "again");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++files;
  CHECK(files == 1);
}

TEST_CASE("provenance block has the documented fields and no timestamp") {
  const auto j = provenance_json({"sweep", "epn(n=6)", {{"n", "6"}}, 42, Precision::Double});
  CHECK(j["version"] == version());
  CHECK(j["seed"] == 42);
  CHECK(j["precision"] == "double");
  CHECK(j["flags"]["n"] == "6");
  CHECK(j.size() == 7);
  CHECK_FALSE(j.contains("time"));
}

TEST_CASE("sweep epn: 101 rows that match the library sweep") {
  const auto r = run({"sweep", "--model", "epn", "--n", "6", "--param", "t", "--range", "0:1", "--samples", "101"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 102);
  REQUIRE(rows[0].size() == 2 + 3 * 6 + 1);
  CHECK(rows[0][1] == "t");
  CHECK(rows[0][2] == "re_0");
  const auto s = ep::sweep(models::Epn{6}, 0, 1, 101);
  for (std::size_t i = 0; i < 101; ++i) {
    const auto& row = rows[i + 1];
    CHECK(num(row[1]) == s.grid[i]);
    for (int k = 0; k < 6; ++k) {
      CHECK(num(row[2 + 3 * k]) == s.values[i][k].real());
      CHECK(num(row[3 + 3 * k]) == s.values[i][k].imag());
      CHECK((row[4 + 3 * k] == "1") == s.real[i][k]);
    }
  }
}

TEST_CASE("sweep hermitian-demo: positive gap, all real") {
  const auto r = run({"sweep", "--model", "hermitian-demo", "--n", "4", "--seed", "1", "--range", "-1:1", "--samples",
                      "2001"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2002);
  double min_gap = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<double> re;
    for (int k = 0; k < 4; ++k) {
      CHECK(rows[i][4 + 3 * k] == "1");
      re.push_back(num(rows[i][2 + 3 * k]));
    }
    std::sort(re.begin(), re.end());
    for (int k = 1; k < 4; ++k) min_gap = std::min(min_gap, re[k] - re[k - 1]);
  }
  CHECK(min_gap > 0);
}

TEST_CASE("sweep epn n = 8: tracks meet at t = 0; JSON format carries provenance") {
  const auto r = run({"sweep", "--model", "epn", "--n", "8", "--range", "-0.5:0.5", "--samples", "201", "--format",
                      "json", "--precision", "extended"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["provenance"]["precision"] == "extended");
  CHECK(j["provenance"]["flags"]["range"] == "-0.5:0.5");
  REQUIRE(j["tracks"].size() == 8);
  for (const auto& t : j["tracks"]) {
    const double re = t["re"][100], im = t["im"][100];
    CHECK(std::hypot(re, im) <= 0.1);
  }
}

TEST_CASE("sturmian: X crossing at (2, 0) and a pole sidecar") {
  const auto dir = scratch("sturmian");
  const auto csv = (dir / "s.csv").string();
  const auto r = run({"sturmian", "--n", "6", "--y", "0", "--range", "0:5", "--samples", "2000", "--out", csv});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(slurp(csv));
  CHECK(rows[0] == std::vector<std::string>{"E", "r_plus", "r_minus", "r2", "in_model"});
  bool center = false;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "2") center = rows[i][1] == "0";
  CHECK(center);
  const auto side = nlohmann::json::parse(slurp(dir / "s.poles.json"));
  CHECK(side["poles"].size() == 4);
  CHECK(side["provenance"]["command"] == "sturmian");
  CHECK(side["data"] == "s.csv");
}

TEST_CASE("sturmian n = 5 at y = 0 reports the vertical line") {
  const auto dir = scratch("vertical");
  const auto csv = (dir / "v.csv").string();
  REQUIRE(run({"sturmian", "--n", "5", "--y", "0", "--range", "0:4", "--out", csv}).code == 0);
  const auto side = nlohmann::json::parse(slurp(dir / "v.poles.json"));
  REQUIRE(side["vertical_lines"].size() == 1);
  CHECK(side["vertical_lines"][0] == 2.0);
}

TEST_CASE("find-ep: the three documented hunts") {
  auto r = run({"find-ep", "--model", "bc", "--n", "6", "--y", "0", "--param", "r", "--range", "-1:1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["points"].size() == 1);
  CHECK(j["points"][0]["kind"] == "EP");
  CHECK(j["points"][0]["order"] == 2);
  CHECK(std::abs(j["points"][0]["params"]["r"].get<double>()) <= 1e-8);
  CHECK(std::abs(j["points"][0]["E"]["re"].get<double>() - 2) <= 1e-8);

  r = run({"find-ep", "--model", "bc", "--n", "5", "--scan-y", "--range", "-0.4:0"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& p : j["points"])
    if (p["kind"] == "EP") found = std::abs(p["params"]["y"].get<double>() + 0.196) <= 0.005;
  CHECK(found);

  r = run({"find-ep", "--model", "epn", "--n", "6", "--param", "t", "--range", "-0.5:0.5"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  REQUIRE(j["points"].size() == 1);
  CHECK(j["points"][0]["order"] == 6);
  CHECK(j["points"][0]["params"]["t"] == 0.0);
}

TEST_CASE("find-ep: an empty result is a success") {
  const auto r = run({"find-ep", "--model", "hermitian-demo", "--n", "4", "--seed", "1", "--range", "-1:1"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["points"].empty());
}

TEST_CASE("metric: residual, identity, refusal") {
  auto r = run({"metric", "--model", "epn", "--n", "6", "--t", "0.5"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["relative_residual"].get<double>() <= 1e-10);
  CHECK(j["min_eig"].get<double>() > 0);

  r = run({"metric", "--model", "epn", "--n", "6", "--t", "1"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      CHECK(j["theta"]["re"][a][b].get<double>() == (a == b ? 1.0 : 0.0));
      CHECK(j["theta"]["im"][a][b].get<double>() == 0.0);
    }

  r = run({"metric", "--model", "epn", "--n", "6", "--t", "0"});
  CHECK(r.code == kDomain);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.out.empty());

  r = run({"metric", "--model", "epn", "--n", "6", "--t", "0.5", "--kappa", "1,2,3,4,5,6"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["provenance"]["flags"]["kappa"] == "1,2,3,4,5,6");
}

TEST_CASE("metric-sweep: decreasing min_eig column") {
  const auto r = run({"metric-sweep", "--model", "epn", "--n", "6", "--t-grid", "0.5,0.2,0.1,0.05,0.02,0.01"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0][2] == "min_eig");
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(num(rows[i][2]) < num(rows[i - 1][2]));
}

TEST_CASE("exit codes for usage errors") {
  CHECK(run({}).code == kUsage);
  CHECK(run({"bogus"}).code == kUsage);
  CHECK(run({"sweep", "--nope"}).code == kUsage);
  CHECK(run({"sweep", "--model", "epn", "--param", "r"}).code == kUsage);
  CHECK(run({"sweep", "--model", "nope"}).code == kUsage);
  CHECK(run({"sweep", "--range", "1:0"}).code == kUsage);
  CHECK(run({"sweep", "--range", "abc"}).code == kUsage);
  CHECK(run({"sweep", "--samples", "1"}).code == kUsage);
  CHECK(run({"sweep", "--precision", "exact"}).code == kUsage);
  CHECK(run({"sweep", "--model", "epn", "--y", "0.1"}).code == kUsage);
  CHECK(run({"find-ep", "--model", "epn", "--scan-y", "--range", "0:1"}).code == kUsage);
  CHECK(run({"metric", "--model", "epn", "--r", "0.5"}).code == kUsage);
  CHECK(run({"metric", "--model", "epn", "--t", "0.5", "--kappa", "1,2"}).code == kUsage);
  CHECK(run({"figure", "7"}).code == kUsage);
  CHECK(run({"--help"}).code == kOk);
  const auto v = run({"--version"});
  CHECK(v.code == kOk);
  CHECK(v.out == version() + "\n");
}

TEST_CASE("figures: deterministic and equal to the canonical runs") {
  const auto a = scratch("figA"), b = scratch("figB"), c = scratch("direct");
  for (int k = 1; k <= 6; ++k) {
    REQUIRE(run({"figure", std::to_string(k), "--out-dir", a.string()}).code == 0);
    REQUIRE(run({"figure", std::to_string(k), "--out-dir", b.string()}).code == 0);
  }
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(files == 6 * 2 + 3);

  REQUIRE(run({"sturmian", "--n", "6", "--y", "0", "--range", "0:5", "--samples", "2000", "--out",
               (c / "fig4.csv").string()})
              .code == 0);
  CHECK(slurp(c / "fig4.csv") == slurp(a / "fig4.csv"));
  CHECK(slurp(c / "fig4.poles.json") == slurp(a / "fig4.poles.json"));

  const auto fig1 = run({"sweep", "--model", "hermitian-demo", "--n", "4", "--seed", "1", "--param", "t", "--range",
                         "-1:1", "--samples", "2001"});
  CHECK(fig1.out == slurp(a / "fig1.csv"));

  // Figure 3: real for t > 0, flagged complex for t < 0.
  const auto rows = parse_csv(slurp(a / "fig3.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = num(rows[i][1]);
    for (int k = 0; k < 6; ++k) {
      if (t >= 0.02) CHECK(rows[i][4 + 3 * k] == "1");
      if (t <= -0.02) CHECK(rows[i][4 + 3 * k] == "0");
    }
  }
  CHECK(slurp(a / "fig3.gp").find("fig3.csv") != std::string::npos);
  CHECK(slurp(a / "fig5.gp").find("plot") != std::string::npos);
}
