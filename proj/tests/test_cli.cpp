#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(TUBEFLOW_BIN) + " " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) {
    res.output.append(buf, got);
  }
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "tubeflow_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Drops the timestamp line so reruns can be compared byte for byte.
std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") != std::string::npos) continue;
    out << line << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("print-defaults emits the configuration") {
  RunResult res = run_cli("print-defaults");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"seed\"") != std::string::npos);
  CHECK(res.output.find("\"deformation\"") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  RunResult res = run_cli("--help");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("verify-deformation") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("verify-deformation --config /does/not/exist.json").exit_code ==
        2);
  CHECK(run_cli("verify-deformation --threads 0").exit_code == 2);
}

TEST_CASE("config validation failures name the field") {
  fs::path dir = fresh_dir("badcfg");
  fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"deformation": {"epsilon": 0.9}})";
  RunResult res =
      run_cli("verify-deformation --config " + cfg.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("deformation.epsilon") != std::string::npos);
  fs::remove_all(dir.parent_path());
}

TEST_CASE("verification reruns are byte-identical except the timestamp") {
  fs::path dir = fresh_dir("rerun");
  fs::path summary = dir / "summary-verify-deformation.json";
  fs::path checks = dir / "checks-verify-deformation.csv";

  RunResult r1 = run_cli("verify-deformation --out " + dir.string());
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("[PASS]") != std::string::npos);
  REQUIRE(fs::exists(summary));
  std::string summary1 = slurp(summary);
  std::string checks1 = slurp(checks);

  RunResult r2 = run_cli("verify-deformation --out " + dir.string());
  CHECK(r2.exit_code == 0);
  CHECK(strip_timestamp(summary1) == strip_timestamp(slurp(summary)));
  CHECK(checks1 == slurp(checks));

  // The same command with a different seed changes the fingerprint.
  RunResult r3 = run_cli("verify-deformation --seed 9 --out " + dir.string());
  CHECK(r3.exit_code == 0);
  auto fingerprint = [](const std::string& text) {
    std::size_t at = text.find("\"config_fingerprint\"");
    return text.substr(at, text.find('\n', at) - at);
  };
  CHECK(fingerprint(summary1) != fingerprint(slurp(summary)));
  fs::remove_all(dir.parent_path());
}
