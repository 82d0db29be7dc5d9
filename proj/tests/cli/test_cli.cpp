#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end checks of the installed command-line surface: exit codes,
// deterministic output bytes, config handling, and failure hygiene (no
// partial files). The binary path comes from the build system.
#ifndef OSCSIM_TOOL_PATH
#error "OSCSIM_TOOL_PATH must point at the oscsim binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string output;
};

const fs::path& scratch_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() /
                 ("oscsim_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_tool(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path log =
      scratch_root() / ("log_" + std::to_string(counter++) + ".txt");
  std::string cmd = env.empty() ? std::string() : env + " ";
  cmd += std::string(OSCSIM_TOOL_PATH) + " " + args + " > " + log.string() +
         " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  result.output = read_file(log);
  return result;
}

// Data rows of a CSV document: everything except "#" lines and the header.
std::vector<std::vector<std::string>> data_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream cell_stream(line);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("spectrum output is byte-identical across runs") {
  const fs::path a = scratch_root() / "spectrum_a.csv";
  const fs::path b = scratch_root() / "spectrum_b.csv";
  const std::string args = "spectrum --n-grid 32 --max-n 4 --jobs 1";

  const auto first = run_tool(args + " --out " + a.string());
  const auto second = run_tool(args + " --out " + b.string());
  CHECK(first.code == 0);
  CHECK(second.code == 0);
  CHECK(first.output.find("wrote " + a.string()) != std::string::npos);

  const std::string text_a = read_file(a);
  CHECK(!text_a.empty());
  CHECK(text_a == read_file(b));
  CHECK(text_a.rfind("# tool=oscsim", 0) == 0);
  CHECK(data_rows(text_a).size() == 5);
}

TEST_CASE("usage problems exit with code 1") {
  CHECK(run_tool("spectrum --bogus-flag 3").code == 1);
  CHECK(run_tool("no-such-subcommand").code == 1);
  CHECK(run_tool("spectrum --n-grid 32 --kind pendulum").code == 1);

  // Fit-based reports need at least three abscissae.
  const auto fit = run_tool("eig-error-scan --n-grid 32,48");
  CHECK(fit.code == 1);
  CHECK(fit.output.find("error:") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_tool("--help").code == 0);
  CHECK(run_tool("spectrum --help").code == 0);
}

TEST_CASE("numerical failures exit with code 2 and leave no partial file") {
  const fs::path out = scratch_root() / "prep_fail" / "deep" / "prep.csv";
  const auto result = run_tool(
      "prep-ground --n 64 --delta-grid 18,20,22 --out " + out.string());
  CHECK(result.code == 2);
  CHECK(result.output.find("error: record delta=18: gaussian prep: "
                           "pi * delta / N must stay below 1/2") !=
        std::string::npos);
  CHECK(!fs::exists(out));
  CHECK(!fs::exists(out.parent_path()));
}

TEST_CASE("config files feed subcommand options") {
  const fs::path config = scratch_root() / "prep.ini";
  std::ofstream(config) << "[prep-ground]\nn=128\ndelta-grid=4,6,8\n";
  const fs::path out = scratch_root() / "prep_from_config.csv";

  const auto result = run_tool("--config " + config.string() +
                               " prep-ground --out " + out.string());
  CHECK(result.code == 0);
  const std::string text = read_file(out);
  CHECK(text.find("# N=128") != std::string::npos);
  CHECK(data_rows(text).size() == 3);
}

TEST_CASE("unknown config keys are rejected") {
  const fs::path config = scratch_root() / "bad.ini";
  std::ofstream(config) << "[prep-ground]\nbogus=1\n";
  const auto result =
      run_tool("--config " + config.string() + " prep-ground");
  CHECK(result.code == 1);
  CHECK(result.output.find("bogus") != std::string::npos);
}

TEST_CASE("frft CSV output feeds back through --in additively") {
  const fs::path one = scratch_root() / "frft_one.csv";
  const fs::path two = scratch_root() / "frft_two.csv";
  const fs::path direct = scratch_root() / "frft_direct.csv";

  CHECK(run_tool("frft --n 32 --order 1 --mode-n 2 --out " + one.string())
            .code == 0);
  CHECK(run_tool("frft --n 32 --order 1 --in " + one.string() + " --out " +
                 two.string())
            .code == 0);
  CHECK(run_tool("frft --n 32 --order 2 --mode-n 2 --out " + direct.string())
            .code == 0);

  const auto chained = data_rows(read_file(two));
  const auto straight = data_rows(read_file(direct));
  REQUIRE(chained.size() == 32);
  REQUIRE(straight.size() == 32);
  double worst = 0.0;
  for (std::size_t i = 0; i < chained.size(); ++i) {
    for (int comp = 0; comp < 2; ++comp) {
      worst = std::max(worst, std::abs(std::stod(chained[i][comp]) -
                                       std::stod(straight[i][comp])));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("frft rejects signals that do not match the grid") {
  const fs::path sig = scratch_root() / "short.csv";
  std::ofstream(sig) << "re,im\n1,0\n0,1\n";
  const auto result =
      run_tool("frft --n 32 --order 1 --in " + sig.string());
  CHECK(result.code == 1);
  CHECK(result.output.find("does not match --n") != std::string::npos);
}

TEST_CASE("OSCSIM_OUT_DIR names the default output") {
  const fs::path dir = scratch_root() / "envout";
  fs::create_directories(dir);
  const auto result =
      run_tool("sp2-defect -p 1", "OSCSIM_OUT_DIR=" + dir.string());
  CHECK(result.code == 0);
  const fs::path expected = dir / "sp2-defect.csv";
  REQUIRE(fs::exists(expected));
  const std::string text = read_file(expected);
  CHECK(text.find("# lowest_degree=2") != std::string::npos);
}

TEST_CASE("nested output directories are created on demand") {
  const fs::path out = scratch_root() / "made" / "by" / "emit" / "f.csv";
  const auto result =
      run_tool("frft --n 16 --order 0 --mode-n 1 --out " + out.string());
  CHECK(result.code == 0);
  CHECK(fs::exists(out));
}

TEST_CASE("amplitude rows track the closed-form reference") {
  const fs::path out = scratch_root() / "amplitude.csv";
  const auto result = run_tool(
      "amplitude --n 64 --nprime 4 --jobs 1 --out " + out.string());
  CHECK(result.code == 0);
  const auto rows = data_rows(read_file(out));
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 6);
    CHECK(std::stod(row[5]) < 1e-8);
  }
}
