#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace smm::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("smm-cli-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("green writes the symbol grid") {
  const auto dir = scratch("green");
  auto r = run({"green", "--d", "1", "--z-re", "5", "--z-im", "0", "--grid", "512", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto files = lines(r.out);
  REQUIRE(files.size() == 3);
  const auto csv = slurp(files[0]);
  CHECK(csv.rfind("y1,re,im\n", 0) == 0);
  CHECK(lines(csv).size() == 513);
  CHECK(fs::path(files[0]).filename().string().rfind("green-", 0) == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto band = run({"green", "--d", "1", "--z-re", "3", "--z-im", "0", "--out", dir.string()});
  CHECK(band.code == 2);
  CHECK(band.err.find("BranchPoint") != std::string::npos);
  CHECK(run({"green", "--d", "one"}).code == 3);
  CHECK(run({"green", "--bogus", "1"}).code == 3);
  CHECK(run({}).code == 3);
  auto pole = run({"fv", "--theta", "0.5", "--L", "4", "--out", dir.string()});
  CHECK(pole.code == 2);
  CHECK(pole.err.find("PhaseSingularity") != std::string::npos);
  CHECK(run({"cf", "--alpha", "0.25", "--depth", "6", "--out", dir.string()}).code == 2);
}

TEST_CASE("identical configs give byte-identical output") {
  const auto a = scratch("det-a"), b = scratch("det-b");
  auto ra = run({"zeta0", "--steps", "20", "--out", a.string()});
  auto rb = run({"zeta0", "--steps", "20", "--out", b.string()});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  const auto fa = lines(ra.out), fb = lines(rb.out);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fs::path(fa[i]).filename() == fs::path(fb[i]).filename());
    if (fs::path(fa[i]).extension() == ".csv") CHECK(slurp(fa[i]) == slurp(fb[i]));
  }
}

TEST_CASE("dump-config round trip") {
  const auto dir = scratch("dump");
  auto d = run({"cf", "--alpha", "silver", "--depth", "12", "--out", dir.string(), "--dump-config"});
  REQUIRE(d.code == 0);
  const auto cfg = dir / "cf.json";
  std::ofstream(cfg) << d.out;
  auto direct = run({"cf", "--alpha", "silver", "--depth", "12", "--out", dir.string()});
  auto replay = run({"cf", "--config", cfg.string()});
  REQUIRE(direct.code == 0);
  REQUIRE(replay.code == 0);
  CHECK(direct.out == replay.out);
  auto j = nlohmann::json::parse(slurp(lines(replay.out).back()));
  CHECK(j["config"]["params"]["alpha"] == "silver");
  CHECK(j["summary"]["determinant_identity"] == true);
  // a flag on the command line overrides the file
  auto over = run({"cf", "--config", cfg.string(), "--depth", "10"});
  CHECK(over.out != replay.out);
  CHECK(run({"zeta0", "--config", cfg.string()}).code == 3);
}

TEST_CASE("predict with the finite-volume oracle") {
  const auto dir = scratch("predict");
  auto r = run({"predict", "--lambda", "1", "--alpha", "golden", "--theta", "0", "--k", "-20:20", "--e-window",
                "4.3:7.5", "--validate-L", "30", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = lines(slurp(lines(r.out)[0]));
  REQUIRE(!csv.empty());
  CHECK(csv[0] == "k,E_predicted,E_finite_volume,abs_error,decay_slope,surface_mass");
  CHECK(csv.size() >= 3);
}

TEST_CASE("json format") {
  const auto dir = scratch("json");
  auto r = run({"cover", "--format", "json", "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(slurp(lines(r.out)[0]));
  REQUIRE(j.is_array());
  CHECK(j[0].contains("log_per_k"));
}

TEST_CASE("ergodic and reduce run") {
  const auto dir = scratch("misc");
  CHECK(run({"ergodic", "--alpha", "golden", "--modes", "exp:40", "--sequence", "qn", "--max-n", "10", "--out",
             dir.string()})
            .code == 0);
  CHECK(run({"ergodic", "--modes", "cubic:3", "--out", dir.string()}).code == 3);
  CHECK(run({"resolvent", "--L", "12", "--W", "4", "--out", dir.string()}).code == 0);
  CHECK(run({"reduce", "--W", "12", "--e-window", "5.5:6.2", "--out", dir.string()}).code == 0);
}
