#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "becq/types.hpp"
#include "commands.hpp"

using namespace becq;
using namespace becq::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("becq_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  static struct Remover {
    fs::path d;
    ~Remover() {
      std::error_code ec;
      fs::remove_all(d, ec);
    }
  } remover{dir};
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(BECQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_to(const std::string& command, std::map<std::string, std::string> params, const fs::path& out,
           std::string* summary = nullptr) {
  params["out"] = out.string();
  std::ostringstream s;
  int code = run_command({command, params}, s);
  if (summary) *summary = s.str();
  return code;
}

}  // namespace

TEST_CASE("config file parsing") {
  fs::path p = write_file("ok.cfg", "# comment line\n\n  N = 3   # trailing\ngamma=0.02\naxis = paper-body\n");
  auto m = read_config_file(p.string());
  CHECK(m.size() == 3);
  CHECK(m.at("N") == "3");
  CHECK(m.at("gamma") == "0.02");
  CHECK(m.at("axis") == "paper-body");
  CHECK_THROWS_AS(read_config_file(write_file("dup.cfg", "N = 1\nN = 2\n").string()), ArgumentError);
  CHECK_THROWS_AS(read_config_file(write_file("noeq.cfg", "N 1\n").string()), ArgumentError);
  CHECK_THROWS_AS(read_config_file(write_file("empty.cfg", "N =\n").string()), ArgumentError);
  CHECK_THROWS_AS(read_config_file((scratch_dir() / "missing.cfg").string()), ArgumentError);
}

TEST_CASE("command table") {
  const auto& names = command_names();
  for (const char* c : {"fig2a", "fig2b", "fig4a", "fig4b", "fig4c", "fig4d", "deutsch", "rates", "schedule", "selftest"})
    CHECK(std::find(names.begin(), names.end(), c) != names.end());
  for (const auto& c : names) {
    if (c == "selftest") continue;
    const auto& keys = command_keys(c);
    CHECK(std::find(keys.begin(), keys.end(), "out") != keys.end());
  }
  CHECK_THROWS_AS(command_keys("fig9"), ArgumentError);
}

TEST_CASE("argument errors") {
  fs::path out = scratch_dir() / "err.csv";
  CHECK_THROWS_AS(run_to("fig4a", {{"G", "1"}}, out), ArgumentError);
  CHECK_THROWS_AS(run_to("fig4a", {{"N", "2"}, {"N-max", "3"}}, out), ArgumentError);
  CHECK_THROWS_AS(run_to("fig4a", {{"N", "two"}}, out), ArgumentError);
  CHECK_THROWS_AS(run_to("fig4a", {{"N", "2"}, {"axis", "diagonal"}}, out), ArgumentError);
  CHECK_THROWS_AS(run_to("schedule", {}, out), ArgumentError);
  CHECK_THROWS_AS(run_to("rates", {{"samples", "1"}}, out), ArgumentError);
}

TEST_CASE("rates command output") {
  fs::path out = scratch_dir() / "rates.csv";
  std::string summary;
  CHECK(run_to("rates", {{"samples", "11"}}, out, &summary) == kExitOk);
  CHECK(summary.find("tau_background (s): 10\n") != std::string::npos);
  CHECK(summary.find("PASS") != std::string::npos);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t_s,Na,Nb");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 11);
}

TEST_CASE("output is byte-identical across runs") {
  fs::path a = scratch_dir() / "a.csv", b = scratch_dir() / "b.csv";
  std::map<std::string, std::string> params = {{"N-max", "3"}, {"t-end", "2"}, {"samples", "21"}};
  REQUIRE(run_to("fig4a", params, a) == kExitOk);
  REQUIRE(run_to("fig4a", params, b) == kExitOk);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("schedule command runs a file") {
  fs::path in = write_file("s.sched", "sites 2 2\nterm 1 1:z 2:z ; 0.3\nterm 1 1:x ; 0.2\n");
  fs::path out = scratch_dir() / "sched.csv";
  CHECK(run_to("schedule", {{"in", in.string()}}, out) == kExitOk);
  std::string text = slurp(out);
  CHECK(text.rfind("step,", 0) == 0);
  CHECK_THROWS_AS(run_to("schedule", {{"in", in.string()}, {"N", "3"}}, out), ArgumentError);
  fs::path bad = write_file("bad.sched", "sites 2 2\nterm 1 0:z ; 0.3\n");
  CHECK_THROWS_AS(run_to("schedule", {{"in", bad.string()}}, out), ArgumentError);
}

TEST_CASE("executable exit codes") {
  const std::string out = "--out " + (scratch_dir() / "x.csv").string();
  CHECK(run_cli("selftest") == kExitOk);
  CHECK(run_cli("deutsch --N 3 " + out) == kExitOk);
  CHECK(run_cli("fig9") == kExitArgument);
  CHECK(run_cli("fig4a --N abc " + out) == kExitArgument);
  CHECK(run_cli("fig4a --bogus 1 " + out) == kExitArgument);
  CHECK(run_cli("fig4a --N 100 " + out) == kExitArgument);  // capacity
  CHECK(run_cli("fig4a --config " + (scratch_dir() / "none.cfg").string()) == kExitArgument);
  // A strong drive leaves the photon cutoff unconverged.
  CHECK(run_cli("fig4d --N 1 --g 4 " + out) == kExitNumerical);
}

TEST_CASE("flags override the config file") {
  fs::path cfg = write_file("o.cfg", "N = 2\nt-end = 1\nsamples = 3\n");
  fs::path a = scratch_dir() / "cfg.csv", b = scratch_dir() / "flag.csv";
  REQUIRE(run_cli("fig4a --config " + cfg.string() + " --out " + a.string()) == kExitOk);
  REQUIRE(run_cli("fig4a --config " + cfg.string() + " --N 3 --out " + b.string()) == kExitOk);
  CHECK(slurp(a).find("\n2,") != std::string::npos);
  CHECK(slurp(b).find("\n3,") != std::string::npos);
  CHECK(slurp(b).find("\n2,") == std::string::npos);
}
