#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return CLTB_CLI_PATH; }

int run_command(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("cltb_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream of(p, std::ios::binary | std::ios::trunc);
  of << content;
}

}  // namespace

TEST_CASE("bundled relu config runs clean") {
  fs::path dir = fresh_dir("relu");
  std::string cfg = std::string(CLTB_CONFIG_DIR) + "/rademacher_relu.json";
  int code = run_command("run " + cfg + " --out " + dir.string());
  CHECK(code == 0);
  std::string csv = slurp(dir / "report.csv");
  CHECK(csv.find("instance_id,bound_kind,n,d,t,lhs,lhs_stderr,c0,c1,"
                 "ratio_at_unit,verdict") == 0);
  CHECK(csv.find("rademacher_relu_n4") != std::string::npos);
  CHECK(csv.find("holds_at_unit") != std::string::npos);
  CHECK(fs::exists(dir / "rademacher_relu_n4.json"));
}

TEST_CASE("malformed config exits 2 with a line-anchored diagnostic") {
  fs::path dir = fresh_dir("bad");
  fs::path cfg = dir / "broken.json";
  write_file(cfg, "{\n  \"instances\": [\n    {\"id\": }\n  ]\n}\n");
  std::string cmd = std::string(cli_path()) + " run " + cfg.string() + " --out " +
                    dir.string() + " 2> " + (dir / "err.txt").string();
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  std::string err = slurp(dir / "err.txt");
  CHECK(err.find(":3:") != std::string::npos);  // error sits on line 3
}

TEST_CASE("usage and selector errors exit 2") {
  fs::path dir = fresh_dir("usage");
  CHECK(run_command("flibber") == 2);
  fs::path cfg = dir / "unknown_bound.json";
  write_file(cfg, R"({"instances":[{
    "id": "x",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":1.0}, "n": 2},
    "bound": "frobnicate"
  }]})");
  CHECK(run_command("run " + cfg.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("violations exit 1") {
  fs::path dir = fresh_dir("violation");
  fs::path cfg = dir / "violated.json";
  // A c0-only bound far below the exact gap cannot be rescued by any
  // constant: verdict violated_even_scaled, exit 1.
  write_file(cfg, R"({"instances":[{
    "id": "tiny_raic",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":0.70710678118654752}, "n": 2},
    "function": {"variant":"indicator","set":{"class":"half_space","a":[1.0],"b":0.0}},
    "bound": "raic",
    "params": {"gamma_star": 0.0, "kappa": 0.0, "sum_third_moments": 1e-9},
    "verify": "exact",
    "seed": 5
  }]})");
  CHECK(run_command("run " + cfg.string() + " --out " + dir.string()) == 1);
}

TEST_CASE("numeric failures exit 3") {
  fs::path dir = fresh_dir("numeric");
  fs::path cfg = dir / "blowup.json";
  // 4000-atom discrete law convolved with itself exceeds the exact
  // enumeration support cap.
  std::ostringstream atoms;
  const int half = 2000;
  for (int i = 0; i < half; ++i) {
    if (i) atoms << ",";
    double v = i + 0.5;
    atoms << "[" << -v << "," << (0.5 / half) << "],[" << v << ","
          << (0.5 / half) << "]";
  }
  write_file(cfg, std::string(R"({"instances":[{
    "id": "support_blowup",
    "sequence": {"d":1, "iid": {"kind":"discrete","atoms":[)") +
                       atoms.str() + R"(]}, "n": 2},
    "function": {"variant":"ridge","activation":"relu","direction":[1.0],"threshold":0.0},
    "bound": "relu",
    "verify": "exact",
    "seed": 5
  }]})");
  CHECK(run_command("run " + cfg.string() + " --out " + dir.string()) == 3);
}

TEST_CASE("same seed gives byte-identical outputs") {
  fs::path dir_a = fresh_dir("det_a");
  fs::path dir_b = fresh_dir("det_b");
  fs::path cfg = dir_a / "mc.json";
  write_file(cfg, R"({"instances":[{
    "id": "mc_det",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":1.0}, "n": 4},
    "function": {"variant":"ridge","activation":"relu","direction":[1.0],"threshold":0.0},
    "bound": "relu",
    "verify": {"mc": 20000},
    "seed": 99
  },{
    "id": "exact_det",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":1.0}, "n": 4},
    "function": {"variant":"ridge","activation":"relu","direction":[1.0],"threshold":0.0},
    "bound": "relu",
    "verify": "exact",
    "seed": 99
  }]})");
  CHECK(run_command("run " + cfg.string() + " --out " + dir_a.string() +
                    " --seed 123") == 0);
  CHECK(run_command("run " + cfg.string() + " --out " + dir_b.string() +
                    " --seed 123") == 0);
  CHECK(slurp(dir_a / "report.csv") == slurp(dir_b / "report.csv"));
  CHECK(slurp(dir_a / "mc_det.json") == slurp(dir_b / "mc_det.json"));

  // Different seed changes the MC column but exact instances stay put.
  fs::path dir_c = fresh_dir("det_c");
  CHECK(run_command("run " + cfg.string() + " --out " + dir_c.string() +
                    " --seed 124") == 0);
  CHECK(slurp(dir_a / "report.csv") != slurp(dir_c / "report.csv"));
  CHECK(slurp(dir_a / "mc_det.json") != slurp(dir_c / "mc_det.json"));
  CHECK(slurp(dir_a / "exact_det.json") == slurp(dir_c / "exact_det.json"));
}

TEST_CASE("sweep over n emits the scaling column") {
  fs::path dir = fresh_dir("sweep");
  std::string cfg = std::string(CLTB_CONFIG_DIR) + "/rademacher_relu.json";
  int code = run_command("sweep " + cfg + " --vary n --values 4,16,64,256 --out " +
                         dir.string());
  CHECK(code == 0);
  std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.find("instance_id,vary,value,bound_kind,n,d,t,c0,c1,"
                 "bound_times_sqrt_n") == 0);
  // Every row carries the same bound * sqrt(n) = 0.5.
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find(",0.5") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 16);  // 4 instances x 4 values

  CHECK(run_command("sweep " + cfg + " --vary q --values 1 --out " +
                    dir.string()) == 2);
  CHECK(run_command("sweep " + cfg + " --vary n --out " + dir.string()) == 2);
}

TEST_CASE("sweep over t and d") {
  fs::path dir = fresh_dir("sweep_td");
  std::string relu_cfg = std::string(CLTB_CONFIG_DIR) + "/rademacher_relu.json";
  CHECK(run_command("sweep " + relu_cfg + " --vary t --values 0,1,2 --out " +
                    dir.string()) == 0);
  std::string tcsv = slurp(dir / "sweep.csv");
  CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 13);  // header + 4x3

  // d sweep scales the convex-class constant like 4 d^{1/4}.
  fs::path cfg = dir / "combo1.json";
  write_file(cfg, R"({"instances":[{
    "id": "convex_combo",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":1.0}, "n": 4},
    "bound": "combo1",
    "params": {"c": 1.0, "sup_norm": 1.0, "beta_norm": 1.0,
               "class": {"tag": "convex", "d": 1}}
  }]})");
  CHECK(run_command("sweep " + cfg.string() + " --vary d --values 1,16,81 --out " +
                    dir.string()) == 0);
  std::string dcsv = slurp(dir / "sweep.csv");
  CHECK(dcsv.find(",0,4,8") != std::string::npos);    // d=1:  c1 = 4
  CHECK(dcsv.find(",0,8,16") != std::string::npos);   // d=16: c1 = 8
  CHECK(dcsv.find(",0,12,24") != std::string::npos);  // d=81: c1 = 12

  // d sweep without an explicit beta parameter is rejected.
  fs::path cfg2 = dir / "combo1_nobeta.json";
  write_file(cfg2, R"({"instances":[{
    "id": "convex_combo2",
    "sequence": {"d":1, "iid": {"kind":"rademacher","scale":1.0}, "n": 4},
    "bound": "combo1",
    "params": {"c": 1.0, "sup_norm": 1.0, "class": {"tag": "convex", "d": 1}}
  }]})");
  CHECK(run_command("sweep " + cfg2.string() + " --vary d --values 1,16 --out " +
                    dir.string()) == 2);
}
