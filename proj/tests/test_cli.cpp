#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path scratch = fs::temp_directory_path() / "varhunt_cli_tests";

int run_cli(const std::string& args) {
  fs::create_directories(scratch);
  std::string cmd = std::string(VARHUNT_BIN) + " " + args +
                    " >" + (scratch / "stdout.txt").string() +
                    " 2>" + (scratch / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path write_config(const char* name, const std::string& body) {
  fs::create_directories(scratch);
  fs::path p = scratch / name;
  std::ofstream(p) << body;
  return p;
}

fs::path last_run_dir() {
  std::string out = slurp(scratch / "stdout.txt");
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
    out.pop_back();
  auto nl = out.find_last_of('\n');
  return fs::path(nl == std::string::npos ? out : out.substr(nl + 1));
}

}  // namespace

TEST_CASE("toy quotient curve via the CLI") {
  fs::path cfg = write_config("phi.json", R"json({
    "problem": {"phi": "-xi", "psi": "xi^2"},
    "rho_values": [0.25, 1, 4], "budget": 6})json");
  int rc = run_cli("phi-curve --config " + cfg.string() + " --out " +
                   (scratch / "runs").string() + " --seed 5");
  CHECK(rc == 0);
  fs::path dir = last_run_dir();
  std::string csv = slurp(dir / "phi_curve.csv");
  CHECK(csv.find("rho,phi_hat,m_hat") == 0);
  // phi_hat column ~ {1.0, 0.5, 0.25}
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  double expect[] = {1.0, 0.5, 0.25};
  for (double e : expect) {
    REQUIRE(std::getline(is, line));
    auto c1 = line.find(',');
    double phi = std::stod(line.substr(c1 + 1));
    CHECK(phi == doctest::Approx(e).epsilon(1e-4));
  }
  CHECK(fs::exists(dir / "thresholds.json"));
  CHECK(fs::exists(dir / "MANIFEST"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "report.json"));

  // the verify command replays the stored certificates
  CHECK(run_cli("verify --config " + (dir / "config.json").string()) == 0);
}

TEST_CASE("config errors exit with code 2 and name the field") {
  fs::path cfg = write_config("nop.json", R"json({
    "problem": {"bc": "dirichlet", "f": "xi^3"},
    "rho_values": [1]})json");
  CHECK(run_cli("phi-curve --config " + cfg.string()) == 2);
  CHECK(slurp(scratch / "stderr.txt").find("config.problem.p") !=
        std::string::npos);

  fs::path unknown = write_config("unknown.json", R"json({
    "problem": {"phi": "-xi", "psi": "xi^2", "typo": 1},
    "rho_values": [1]})json");
  CHECK(run_cli("phi-curve --config " + unknown.string()) == 2);
  CHECK(slurp(scratch / "stderr.txt").find("typo") != std::string::npos);

  fs::path empty = write_config("empty.json", R"json({
    "problem": {"phi": "-xi", "psi": "xi^2"}, "rho_values": []})json");
  CHECK(run_cli("phi-curve --config " + empty.string()) == 2);

  CHECK(run_cli("phi-curve --config " + (scratch / "missing.json").string()) ==
        2);
}

TEST_CASE("expression parse errors exit with code 3 and an offset") {
  fs::path cfg = write_config("parse.json", R"json({
    "problem": {"p": 2, "bc": "dirichlet", "f": "xi^^3"},
    "rho_values": [1]})json");
  CHECK(run_cli("phi-curve --config " + cfg.string()) == 3);
  CHECK(slurp(scratch / "stderr.txt").find("offset") != std::string::npos);
}

TEST_CASE("artifacts are byte-identical across reruns and worker counts") {
  fs::path cfg = write_config("det.json", R"json({
    "problem": {"p": 2, "bc": "dirichlet", "N": 16, "f": "xi^3"},
    "mu": 0.5, "direction": "increasing",
    "ladder": {"rho0": 4.0, "factor": 4.0, "levels": 3}, "budget": 6})json");
  std::string outs[3] = {(scratch / "da").string(), (scratch / "db").string(),
                         (scratch / "dc").string()};
  CHECK(run_cli("hunt --config " + cfg.string() + " --out " + outs[0] +
                " --jobs 1 --seed 9") == 0);
  CHECK(run_cli("hunt --config " + cfg.string() + " --out " + outs[1] +
                " --jobs 8 --seed 9") == 0);
  CHECK(run_cli("hunt --config " + cfg.string() + " --out " + outs[2] +
                " --jobs 8 --seed 9") == 0);
  for (const auto& entry : fs::directory_iterator(outs[0])) {
    for (const auto& file : fs::directory_iterator(entry.path())) {
      if (file.path().extension() != ".csv") continue;
      fs::path rel = entry.path().filename() / file.path().filename();
      CHECK(slurp(file.path()) == slurp(fs::path(outs[1]) / rel));
      CHECK(slurp(file.path()) == slurp(fs::path(outs[2]) / rel));
    }
  }
}

TEST_CASE("fixed point toy run emits the certified point") {
  fs::path cfg = write_config("fp.json", R"json({
    "potential": {"P": "xi", "dim": 1}, "rho": 4, "budget": 6})json");
  CHECK(run_cli("fixed-point --config " + cfg.string() + " --out " +
                (scratch / "runs").string() + " --seed 2") == 0);
  fs::path dir = last_run_dir();
  std::string j = slurp(dir / "fixed_point.json");
  CHECK(j.find("\"found\": true") != std::string::npos);
  CHECK(run_cli("verify --config " + (dir / "config.json").string()) == 0);
}

TEST_CASE("problem3 juxtaposes dropped condition with the hunt") {
  fs::path cfg = write_config("p3.json", R"json({
    "problem": {"p": 2, "bc": "dirichlet", "N": 16, "f": "xi^3"},
    "mu": 0.5, "direction": "increasing",
    "ladder": {"rho0": 4.0, "factor": 4.0, "levels": 2}, "budget": 4,
    "osc": {"f": "distosc(2)", "p": 2,
            "a": [2, 6.9], "b": [3.9, 17.9], "horizon": 2}})json");
  CHECK(run_cli("problem3 --config " + cfg.string() + " --out " +
                (scratch / "runs").string()) == 0);
  fs::path dir = last_run_dir();
  std::string rep = slurp(dir / "report.json");
  CHECK(rep.find("\"ratio_condition\": \"dropped\"") != std::string::npos);
  CHECK(fs::exists(dir / "hunt.csv"));
}
