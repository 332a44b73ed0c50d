#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cltb/barron.hpp"
#include "cltb/be_nonuniform.hpp"
#include "cltb/be_uniform.hpp"
#include "cltb/errors.hpp"
#include "cltb/level_sets.hpp"
#include "cltb/serialization.hpp"
#include "cltb/verify.hpp"

namespace fs = std::filesystem;
using cltb::config_error;
using cltb::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  double constant = 1.0;
};

struct InstanceOutcome {
  std::string id;
  json report;
  std::string bound_kind;
  long n = 0;
  int d = 0;
  std::optional<double> t;
  std::optional<double> lhs, lhs_se;
  double c0 = 0.0, c1 = 0.0;
  std::optional<double> ratio;
  std::string verdict;
  bool violated = false;
};

json parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // err.byte anchors the diagnostic; convert to line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw config_error(path + ":" + std::to_string(line) + ":" +
                       std::to_string(col) + ": " + err.what());
  }
}

void validate_id(const std::string& id) {
  if (id.empty()) throw config_error("instance id must be nonempty");
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.') {
      throw config_error("instance id has unsupported characters: " + id);
    }
  }
}

cltb::FavorableClass class_from_json(const json& j) {
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "half_spaces") return cltb::FavorableClass::half_spaces();
  if (tag == "convex") return cltb::FavorableClass::convex(j.at("d").get<int>());
  if (tag == "balls") {
    return cltb::FavorableClass::balls(j.at("d").get<int>(),
                                       j.value("ball_constant", 1.0));
  }
  throw config_error("unknown favorable class tag: " + tag);
}

Eigen::VectorXd resolve_direction(const json& params,
                                  const std::optional<cltb::FunctionSpec>& f,
                                  const cltb::VectorSequenceSpec& seq) {
  if (params.contains("direction")) {
    const auto& arr = params.at("direction");
    Eigen::VectorXd a(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) a[i] = arr[i].get<double>();
    return a;
  }
  if (f) {
    if (const auto* ridge = std::get_if<cltb::FunctionSpec::Ridge>(&f->node())) {
      return ridge->direction;
    }
  }
  if (seq.dimension() == 1) return Eigen::VectorXd::Ones(1);
  throw config_error("instance needs a projection direction");
}

// Equivalent univariate spec of a symbolic f along its own direction.
cltb::FunctionSpec univariate_view(const cltb::FunctionSpec& f) {
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  if (const auto* ridge = std::get_if<cltb::FunctionSpec::Ridge>(&f.node())) {
    return cltb::FunctionSpec::ridge(ridge->activation, one, ridge->threshold);
  }
  if (const auto* ind = std::get_if<cltb::FunctionSpec::Indicator>(&f.node())) {
    if (const auto* hs = std::get_if<cltb::HalfSpace>(&ind->set.value())) {
      return cltb::FunctionSpec::indicator(
          cltb::FavorableSetInstance::half_space(one, hs->b));
    }
  }
  if (const auto* comp = std::get_if<cltb::FunctionSpec::Composed>(&f.node())) {
    return cltb::FunctionSpec::composed(univariate_view(*comp->inner), comp->g);
  }
  throw config_error("function cannot be reduced to one dimension");
}

struct VerifySpec {
  enum class Mode { exact, mc, none };
  Mode mode = Mode::none;
  std::int64_t samples = 0;
};

VerifySpec verify_from_json(const json& inst, const Overrides& over) {
  VerifySpec v;
  if (!inst.contains("verify")) return v;
  const auto& j = inst.at("verify");
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "exact") {
      v.mode = VerifySpec::Mode::exact;
    } else if (s == "none") {
      v.mode = VerifySpec::Mode::none;
    } else {
      throw config_error("unknown verification mode: " + s);
    }
  } else if (j.is_object() && j.contains("mc")) {
    v.mode = VerifySpec::Mode::mc;
    v.samples = j.at("mc").get<std::int64_t>();
    if (!inst.contains("seed") && !over.seed) {
      throw config_error("mc verification needs a seed");
    }
  } else {
    throw config_error("verify must be \"exact\", \"none\" or {\"mc\": N}");
  }
  if (over.samples && v.mode == VerifySpec::Mode::mc) v.samples = *over.samples;
  return v;
}

InstanceOutcome run_instance(const json& inst, const Overrides& over) {
  InstanceOutcome out;
  out.id = inst.at("id").get<std::string>();
  validate_id(out.id);
  out.bound_kind = inst.at("bound").get<std::string>();
  const json params = inst.value("params", json::object());

  cltb::VectorSequenceSpec seq = cltb::sequence_from_json(inst.at("sequence"));
  out.n = seq.size();
  out.d = seq.dimension();

  std::optional<cltb::FunctionSpec> f;
  if (inst.contains("function")) {
    f = cltb::function_from_json(inst.at("function"));
  }
  std::uint64_t seed = over.seed ? *over.seed : inst.value("seed", 0ull);
  VerifySpec verify = verify_from_json(inst, over);

  const std::string& kind = out.bound_kind;
  cltb::BoundValue bound;
  auto direction = [&]() { return resolve_direction(params, f, seq); };
  double beta_norm_cache = -1.0;
  auto beta_norm = [&]() {
    if (params.contains("beta_norm")) return params.at("beta_norm").get<double>();
    if (beta_norm_cache < 0.0) beta_norm_cache = cltb::lyapunov_beta(seq);
    return beta_norm_cache;
  };

  if (kind == "levelset") {
    if (!f) throw config_error("levelset bound needs a function");
    double sup = f->sup_norm_bound();
    auto summands = cltb::projected_spec(seq, direction());
    double gap = cltb::pushforward_gap_exact(univariate_view(*f), summands);
    bound.c0 = cltb::level_set_bound(sup, gap);
    bound.breakdown.push_back({"2 sup|f| * level-set gap", bound.c0, 0.0, {}});
  } else if (kind == "combo1") {
    bound.c1 = cltb::combo1_bound(params.at("c").get<double>(),
                                  params.at("sup_norm").get<double>(),
                                  class_from_json(params.at("class")),
                                  beta_norm(), seq.size());
    bound.symbol = cltb::BoundValue::ConstantSymbol::M;
    bound.breakdown.push_back({"combo1", 0.0, bound.c1, {}});
  } else if (kind == "combo2") {
    std::vector<cltb::FavorableClass> classes;
    for (const auto& c : params.at("classes")) classes.push_back(class_from_json(c));
    bound.c1 = cltb::combo2_bound(classes, params.at("sup_norm").get<double>(),
                                  beta_norm(), seq.size());
    bound.symbol = cltb::BoundValue::ConstantSymbol::M;
    bound.breakdown.push_back({"combo2", 0.0, bound.c1, {}});
  } else if (kind == "bentkus") {
    double beta = params.contains("beta")
                      ? params.at("beta").get<double>()
                      : beta_norm() / std::sqrt(static_cast<double>(seq.size()));
    bound = cltb::bentkus_bound(class_from_json(params.at("class")), beta);
  } else if (kind == "raic") {
    double sum_third =
        params.contains("sum_third_moments")
            ? params.at("sum_third_moments").get<double>()
            : beta_norm() / std::sqrt(static_cast<double>(seq.size()));
    bound.c0 = cltb::raic_bound(params.at("gamma_star").get<double>(),
                                params.value("kappa", 0.0), sum_third,
                                params.value("symmetric_closure", false));
    bound.breakdown.push_back({"raic", bound.c0, 0.0, {}});
  } else if (kind == "shevtsova") {
    double x = params.at("x").get<double>();
    out.t = x;
    auto summands = cltb::projected_spec(seq, direction());
    bound = cltb::shevtsova_delta_bound(x, summands);
  } else if (kind == "relu" || kind == "relu_sq") {
    if (!f) throw config_error(kind + " bound needs a ridge function");
    const auto* ridge = std::get_if<cltb::FunctionSpec::Ridge>(&f->node());
    if (!ridge) throw config_error(kind + " bound needs a ridge function");
    bool want_sq = (kind == "relu_sq");
    bool is_sq = ridge->activation.kind == cltb::Activation::Kind::relu_sq;
    bool is_relu = ridge->activation.kind == cltb::Activation::Kind::relu;
    if ((want_sq && !is_sq) || (!want_sq && !is_relu)) {
      throw config_error("function activation does not match bound " + kind);
    }
    out.t = ridge->threshold;
    auto input = cltb::RidgeBoundInput::make(
        cltb::projected_spec(seq, ridge->direction), ridge->threshold);
    bound = want_sq ? cltb::relu_sq_bound(input) : cltb::relu_bound(input);
  } else if (kind == "barron_s2" || kind == "barron_s3") {
    if (!f) throw config_error("barron bound needs a fourier function");
    const auto* four = std::get_if<cltb::FunctionSpec::Fourier>(&f->node());
    if (!four) throw config_error("barron bound needs a fourier function");
    cltb::L1SphereSearchConfig cfg;
    cfg.restarts = params.value("restarts", 32);
    cfg.local_steps = params.value("local_steps", 60);
    cfg.step_decay = params.value("step_decay", 0.5);
    cfg.include_vertices = params.value("include_vertices", true);
    cfg.stream = cltb::RngStream(params.value("search_seed", seed), 1);
    bound = cltb::barron_bound(four->spec, seq, kind == "barron_s2" ? 2 : 3, cfg);
  } else {
    throw config_error("unknown bound selector: " + kind);
  }
  out.c0 = bound.c0;
  out.c1 = bound.c1;
  bound.check_breakdown();

  json report;
  report["instance_id"] = out.id;
  report["bound_kind"] = out.bound_kind;
  report["n"] = out.n;
  report["d"] = out.d;
  if (out.t) {
    report["t"] = *out.t;
  } else {
    report["t"] = nullptr;
  }
  report["bound"] = cltb::to_json(bound);

  if (verify.mode == VerifySpec::Mode::none) {
    report["verification"] = nullptr;
    out.report = std::move(report);
    return out;
  }

  cltb::LhsValue lhs;
  if (verify.mode == VerifySpec::Mode::exact) {
    double delta;
    if (kind == "shevtsova") {
      double x = params.at("x").get<double>();
      auto summands = cltb::projected_spec(seq, direction());
      auto law = cltb::exact_sum_law(summands);
      double bn = cltb::make_moment_summary(summands).bn;
      delta = std::abs(law.cdf_strict(x * bn) - cltb::normal_cdf(x));
    } else if (f && std::get_if<cltb::FunctionSpec::Fourier>(&f->node())) {
      delta = cltb::exact_delta_fourier(
          std::get<cltb::FunctionSpec::Fourier>(f->node()).spec, seq);
    } else if (f) {
      delta = cltb::exact_delta(*f, seq);
    } else {
      throw config_error("exact verification needs a function");
    }
    lhs = cltb::LhsValue::from_exact(delta);
  } else {
    cltb::FunctionSpec target = [&]() -> cltb::FunctionSpec {
      if (kind == "shevtsova") {
        // Delta_n(x) as an expectation gap of 1{a.v < x B_n}: the gaussian
        // side is exactly Phi(x) because ||a||_Sigma = B_n.
        Eigen::VectorXd a = direction();
        auto summands = cltb::projected_spec(seq, a);
        double cut = params.at("x").get<double>() *
                     cltb::make_moment_summary(summands).bn;
        return cltb::FunctionSpec::blackbox(
            [a, cut](const Eigen::VectorXd& v) {
              return a.dot(v) < cut ? 1.0 : 0.0;
            },
            1.0);
      }
      if (!f) throw config_error("mc verification needs a function");
      return *f;
    }();
    lhs = cltb::LhsValue::from_mc(cltb::mc_delta(target, seq, verify.samples, seed));
  }

  cltb::VerdictPolicy policy;
  policy.constant = over.constant;
  cltb::VerdictReport verdict = cltb::verify_inequality(lhs, bound, policy);
  if (over.constant != 1.0) {
    verdict.notes = "checked at constant=" + format_double(over.constant);
  }
  out.lhs = lhs.value;
  out.lhs_se = lhs.std_error;
  out.ratio = verdict.ratio_at_unit;
  out.verdict = cltb::verdict_name(verdict.verdict);
  out.violated = verdict.verdict == cltb::Verdict::violated_even_scaled;
  report["verification"] = cltb::to_json(verdict);
  out.report = std::move(report);
  return out;
}

void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream of(tmp, std::ios::binary | std::ios::trunc);
    of << content;
  }
  fs::rename(tmp, target);
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

int command_run(const std::string& config_path, const std::string& out_dir,
                const Overrides& over) {
  json config = parse_config_file(config_path);
  if (!config.contains("instances") || !config.at("instances").is_array() ||
      config.at("instances").empty()) {
    throw config_error("config needs a nonempty \"instances\" array");
  }
  std::vector<std::string> ids;
  for (const auto& inst : config.at("instances")) {
    std::string id = inst.at("id").get<std::string>();
    validate_id(id);
    ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw config_error("duplicate instance ids");
  }

  fs::create_directories(out_dir);
  std::vector<std::future<InstanceOutcome>> futures;
  for (const auto& inst : config.at("instances")) {
    futures.push_back(std::async(std::launch::async, run_instance, inst, over));
  }
  std::vector<InstanceOutcome> outcomes;
  outcomes.reserve(futures.size());
  for (auto& fut : futures) outcomes.push_back(fut.get());

  std::sort(outcomes.begin(), outcomes.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  bool violated = false;
  std::string csv = "instance_id,bound_kind,n,d,t,lhs,lhs_stderr,c0,c1,"
                    "ratio_at_unit,verdict\n";
  for (const auto& oc : outcomes) {
    write_atomically(fs::path(out_dir) / (oc.id + ".json"),
                     oc.report.dump(2) + "\n");
    csv += oc.id + "," + oc.bound_kind + "," + std::to_string(oc.n) + "," +
           std::to_string(oc.d) + "," + csv_cell(oc.t) + "," + csv_cell(oc.lhs) +
           "," + csv_cell(oc.lhs_se) + "," + format_double(oc.c0) + "," +
           format_double(oc.c1) + "," + csv_cell(oc.ratio) + "," + oc.verdict +
           "\n";
    violated = violated || oc.violated;
    std::string line = oc.id + ": c0=" + format_double(oc.c0) +
                       " c1=" + format_double(oc.c1);
    if (oc.lhs) line += " lhs=" + format_double(*oc.lhs);
    if (!oc.verdict.empty()) line += " " + oc.verdict;
    std::printf("%s\n", line.c_str());
  }
  write_atomically(fs::path(out_dir) / "report.csv", csv);
  return violated ? kExitViolation : kExitOk;
}

int command_sweep(const std::string& config_path, const std::string& vary,
                  const std::vector<double>& values, const std::string& out_dir) {
  if (values.empty()) throw config_error("sweep needs at least one value");
  json config = parse_config_file(config_path);
  if (!config.contains("instances") || config.at("instances").empty()) {
    throw config_error("config needs a nonempty \"instances\" array");
  }
  Overrides over;
  std::string csv =
      "instance_id,vary,value,bound_kind,n,d,t,c0,c1,bound_times_sqrt_n\n";
  for (const auto& inst : config.at("instances")) {
    for (double value : values) {
      json patched = inst;
      patched["verify"] = "none";
      if (vary == "n") {
        if (!patched.at("sequence").contains("iid")) {
          throw config_error("sweep over n needs an iid sequence");
        }
        patched["sequence"]["n"] = static_cast<long>(value);
      } else if (vary == "t") {
        if (!patched.contains("function") ||
            patched.at("function").value("variant", "") != "ridge") {
          throw config_error("sweep over t needs a ridge function");
        }
        patched["function"]["threshold"] = value;
      } else if (vary == "d") {
        json& params = patched["params"];
        if (!params.contains("beta_norm") && !params.contains("beta") &&
            !params.contains("sum_third_moments")) {
          throw config_error(
              "sweep over d needs an explicit beta parameter (the sequence "
              "does not change with d)");
        }
        if (params.contains("class")) {
          params["class"]["d"] = static_cast<int>(value);
        } else if (params.contains("classes")) {
          for (auto& c : params["classes"]) c["d"] = static_cast<int>(value);
        } else {
          throw config_error("sweep over d needs a class parameter");
        }
      } else {
        throw config_error("vary must be one of n, d, t");
      }
      InstanceOutcome oc = run_instance(patched, over);
      double total = oc.c0 + oc.c1;
      csv += oc.id + "," + vary + "," + format_double(value) + "," +
             oc.bound_kind + "," + std::to_string(oc.n) + "," +
             std::to_string(oc.d) + "," + csv_cell(oc.t) + "," +
             format_double(oc.c0) + "," + format_double(oc.c1) + "," +
             format_double(total * std::sqrt(static_cast<double>(oc.n))) + "\n";
    }
  }
  fs::create_directories(out_dir);
  write_atomically(fs::path(out_dir) / "sweep.csv", csv);
  std::printf("wrote %s\n", (fs::path(out_dir) / "sweep.csv").string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-approximation bound evaluation and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  Overrides over;
  std::uint64_t seed_flag = 0;
  std::int64_t samples_flag = 0;

  auto* run = app.add_subcommand("run", "evaluate bounds and verify them");
  run->add_option("config", config_path, "experiment config (json)")->required();
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed_flag, "seed override");
  auto* samples_opt =
      run->add_option("--samples", samples_flag, "mc sample-count override");
  run->add_option("--constant-A", over.constant,
                  "constant to check verdicts at (ratios stay at 1)");

  std::string vary;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "vary one parameter, emit a csv");
  sweep->add_option("config", config_path, "experiment config (json)")->required();
  sweep->add_option("--vary", vary, "parameter to vary: n, d or t")->required();
  sweep->add_option("--values", values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (seed_opt->count() > 0) over.seed = seed_flag;
    if (samples_opt->count() > 0) over.samples = samples_flag;
    if (run->parsed()) return command_run(config_path, out_dir, over);
    return command_sweep(config_path, vary, values, out_dir);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cltb::numeric_error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return kExitNumeric;
  }
}
