#include "cltb/serialization.hpp"

#include <cmath>
#include <cstdio>

#include "cltb/errors.hpp"

namespace cltb {

namespace {

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw config_error("expected a vector");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const char* symbol_name(BoundValue::ConstantSymbol s) {
  switch (s) {
    case BoundValue::ConstantSymbol::M: return "M";
    case BoundValue::ConstantSymbol::A: return "A";
    default: return nullptr;
  }
}

}  // namespace

json to_json(const UnivariateSpec& spec) {
  json j;
  switch (spec.kind()) {
    case UnivariateSpec::Kind::discrete: {
      j["kind"] = "discrete";
      json atoms = json::array();
      for (auto [v, p] : spec.atoms()) atoms.push_back(json::array({v, p}));
      j["atoms"] = std::move(atoms);
      break;
    }
    case UnivariateSpec::Kind::gaussian:
      j["kind"] = "gaussian";
      j["variance"] = spec.gaussian_variance();
      break;
    case UnivariateSpec::Kind::rademacher:
      j["kind"] = "rademacher";
      j["scale"] = spec.rademacher_scale();
      break;
  }
  return j;
}

UnivariateSpec univariate_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& entry : j.at("atoms")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw config_error("discrete atom must be [value, prob]");
      }
      atoms.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return UnivariateSpec::discrete(std::move(atoms));
  }
  if (kind == "gaussian") {
    return UnivariateSpec::gaussian(j.at("variance").get<double>());
  }
  if (kind == "rademacher") {
    return UnivariateSpec::rademacher(j.at("scale").get<double>());
  }
  throw config_error("unknown univariate kind: " + kind);
}

json to_json(const VectorSequenceSpec& seq) {
  json j;
  j["d"] = seq.dimension();
  json summands = json::array();
  for (const auto& s : seq.summands()) {
    json e;
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      e["kind"] = "gaussian";
      json rows = json::array();
      for (int r = 0; r < g->covariance.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < g->covariance.cols(); ++c) {
          row.push_back(g->covariance(r, c));
        }
        rows.push_back(std::move(row));
      }
      e["covariance"] = std::move(rows);
    } else {
      const auto& d = std::get<VectorSummand::Discrete>(s.value);
      e["kind"] = "discrete";
      json atoms = json::array();
      for (std::size_t i = 0; i < d.points.size(); ++i) {
        atoms.push_back(json::array({vector_to_json(d.points[i]), d.probs[i]}));
      }
      e["atoms"] = std::move(atoms);
    }
    summands.push_back(std::move(e));
  }
  j["summands"] = std::move(summands);
  return j;
}

namespace {

VectorSummand vector_summand_from_json(const json& e, int d) {
  const std::string kind = e.at("kind").get<std::string>();
  if (kind == "gaussian") {
    if (e.contains("covariance")) {
      const auto& rows = e.at("covariance");
      Eigen::MatrixXd cov(rows.size(), rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) {
          throw config_error("covariance must be square");
        }
        for (std::size_t c = 0; c < rows.size(); ++c) {
          cov(r, c) = rows[r][c].get<double>();
        }
      }
      return VectorSummand::gaussian(std::move(cov));
    }
    // Scalar convenience for d = 1.
    if (d != 1) throw config_error("gaussian summand needs a covariance");
    Eigen::MatrixXd cov(1, 1);
    cov(0, 0) = e.at("variance").get<double>();
    return VectorSummand::gaussian(std::move(cov));
  }
  if (kind == "discrete") {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> probs;
    for (const auto& entry : e.at("atoms")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw config_error("atom must be [point, prob]");
      }
      if (entry[0].is_number()) {
        Eigen::VectorXd x(1);
        x[0] = entry[0].get<double>();
        points.push_back(std::move(x));
      } else {
        points.push_back(vector_from_json(entry[0]));
      }
      probs.push_back(entry[1].get<double>());
    }
    return VectorSummand::discrete(std::move(points), std::move(probs));
  }
  if (kind == "rademacher") {
    if (d != 1) throw config_error("rademacher summands are univariate");
    double s = e.at("scale").get<double>();
    Eigen::VectorXd plus(1), minus(1);
    plus[0] = s;
    minus[0] = -s;
    return VectorSummand::discrete({minus, plus}, {0.5, 0.5});
  }
  throw config_error("unknown summand kind: " + kind);
}

}  // namespace

VectorSequenceSpec sequence_from_json(const json& j) {
  int d = j.at("d").get<int>();
  std::vector<VectorSummand> summands;
  if (j.contains("iid")) {
    // {"d":1, "iid": <summand>, "n": N, "scale_by_inv_sqrt_n": bool}
    long n = j.at("n").get<long>();
    if (n < 1) throw config_error("n must be >= 1");
    bool rescale = j.value("scale_by_inv_sqrt_n", false);
    json proto = j.at("iid");
    if (rescale) {
      UnivariateSpec u = univariate_from_json(proto).scaled_by(
          1.0 / std::sqrt(static_cast<double>(n)));
      proto = to_json(u);
    }
    VectorSummand s = vector_summand_from_json(proto, d);
    for (long i = 0; i < n; ++i) summands.push_back(s);
  } else {
    for (const auto& e : j.at("summands")) {
      summands.push_back(vector_summand_from_json(e, d));
    }
  }
  try {
    return VectorSequenceSpec(d, std::move(summands));
  } catch (const std::invalid_argument& err) {
    throw config_error(std::string("invalid sequence: ") + err.what());
  }
}

namespace {

json set_to_json(const FavorableSetInstance& set) {
  json j;
  if (const auto* hs = std::get_if<HalfSpace>(&set.value())) {
    j["class"] = "half_space";
    j["a"] = vector_to_json(hs->a);
    j["b"] = hs->b;
  } else if (const auto* ball = std::get_if<Ball>(&set.value())) {
    j["class"] = "ball";
    j["center"] = vector_to_json(ball->center);
    j["radius"] = ball->radius;
  } else {
    const auto& faces = std::get<FavorableSetInstance::Polytope>(set.value());
    j["class"] = "polytope";
    json arr = json::array();
    for (const auto& f : faces) {
      arr.push_back(json{{"a", vector_to_json(f.a)}, {"b", f.b}});
    }
    j["half_spaces"] = std::move(arr);
  }
  return j;
}

FavorableSetInstance set_from_json(const json& j) {
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "half_space") {
    return FavorableSetInstance::half_space(vector_from_json(j.at("a")),
                                            j.at("b").get<double>());
  }
  if (cls == "ball") {
    return FavorableSetInstance::ball(vector_from_json(j.at("center")),
                                      j.at("radius").get<double>());
  }
  if (cls == "polytope") {
    FavorableSetInstance::Polytope faces;
    for (const auto& e : j.at("half_spaces")) {
      faces.push_back(
          HalfSpace{vector_from_json(e.at("a")), e.at("b").get<double>()});
    }
    return FavorableSetInstance::polytope(std::move(faces));
  }
  throw config_error("unknown set class: " + cls);
}

json table_to_json(const MonotoneTable& t) {
  json arr = json::array();
  for (std::size_t i = 0; i < t.inputs().size(); ++i) {
    arr.push_back(json::array({t.inputs()[i], t.outputs()[i]}));
  }
  return arr;
}

MonotoneTable table_from_json(const json& j) {
  std::vector<double> xs, ys;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) {
      throw config_error("table knot must be [input, output]");
    }
    xs.push_back(e[0].get<double>());
    ys.push_back(e[1].get<double>());
  }
  try {
    return MonotoneTable(std::move(xs), std::move(ys));
  } catch (const std::invalid_argument& err) {
    throw config_error(std::string("invalid table: ") + err.what());
  }
}

}  // namespace

json to_json(const FunctionSpec& f) {
  json j;
  if (const auto* ind = std::get_if<FunctionSpec::Indicator>(&f.node())) {
    j["variant"] = "indicator";
    j["set"] = set_to_json(ind->set);
  } else if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node())) {
    j["variant"] = "ridge";
    switch (ridge->activation.kind) {
      case Activation::Kind::relu: j["activation"] = "relu"; break;
      case Activation::Kind::relu_sq: j["activation"] = "relu_sq"; break;
      case Activation::Kind::table:
        j["activation"] = json{{"table", table_to_json(*ridge->activation.table)}};
        break;
    }
    j["direction"] = vector_to_json(ridge->direction);
    j["threshold"] = ridge->threshold;
  } else if (const auto* combo =
                 std::get_if<FunctionSpec::LinearCombo>(&f.node())) {
    j["variant"] = "linear_combo";
    json terms = json::array();
    for (const auto& [w, sub] : combo->terms) {
      terms.push_back(json{{"weight", w}, {"fn", to_json(*sub)}});
    }
    j["terms"] = std::move(terms);
  } else if (const auto* four = std::get_if<FunctionSpec::Fourier>(&f.node())) {
    j["variant"] = "fourier_atomic";
    j.update(to_json(four->spec));
  } else if (const auto* comp = std::get_if<FunctionSpec::Composed>(&f.node())) {
    j["variant"] = "composed";
    j["inner"] = to_json(*comp->inner);
    j["table"] = table_to_json(comp->g);
  } else {
    throw config_error("blackbox functions are not serializable");
  }
  return j;
}

FunctionSpec function_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "indicator") {
    return FunctionSpec::indicator(set_from_json(j.at("set")));
  }
  if (variant == "ridge") {
    Activation act = Activation::relu();
    const auto& a = j.at("activation");
    if (a.is_string()) {
      const std::string name = a.get<std::string>();
      if (name == "relu") {
        act = Activation::relu();
      } else if (name == "relu_sq") {
        act = Activation::relu_sq();
      } else {
        throw config_error("unknown activation: " + name);
      }
    } else {
      act = Activation::from_table(table_from_json(a.at("table")));
    }
    return FunctionSpec::ridge(std::move(act), vector_from_json(j.at("direction")),
                               j.at("threshold").get<double>());
  }
  if (variant == "linear_combo") {
    std::vector<std::pair<double, FunctionSpec>> terms;
    for (const auto& e : j.at("terms")) {
      terms.emplace_back(e.at("weight").get<double>(),
                         function_from_json(e.at("fn")));
    }
    return FunctionSpec::linear_combo(std::move(terms));
  }
  if (variant == "fourier_atomic") {
    return FunctionSpec::fourier(fourier_from_json(j));
  }
  if (variant == "composed") {
    return FunctionSpec::composed(function_from_json(j.at("inner")),
                                  table_from_json(j.at("table")));
  }
  throw config_error("unknown function variant: " + variant);
}

json to_json(const FourierAtomicSpec& f) {
  json atoms = json::array();
  for (const auto& atom : f.atoms) {
    atoms.push_back(json{{"omega", vector_to_json(atom.omega)},
                         {"re", atom.amplitude.real()},
                         {"im", atom.amplitude.imag()}});
  }
  return json{{"atoms", std::move(atoms)}};
}

FourierAtomicSpec fourier_from_json(const json& j) {
  FourierAtomicSpec f;
  for (const auto& e : j.at("atoms")) {
    FourierAtomicSpec::Atom atom;
    atom.omega = vector_from_json(e.at("omega"));
    atom.amplitude = {e.at("re").get<double>(), e.value("im", 0.0)};
    f.atoms.push_back(std::move(atom));
  }
  if (f.atoms.empty()) throw config_error("fourier spec needs atoms");
  return f;
}

json to_json(const BoundValue& bound) {
  json j;
  j["c0"] = bound.c0;
  j["c1"] = bound.c1;
  const char* sym = symbol_name(bound.symbol);
  if (sym) {
    j["constant_symbol"] = sym;
  } else {
    j["constant_symbol"] = nullptr;
  }
  json breakdown = json::array();
  for (const auto& comp : bound.breakdown) {
    breakdown.push_back(json{{"name", comp.name}, {"c0", comp.c0}, {"c1", comp.c1}});
  }
  j["breakdown"] = std::move(breakdown);
  return j;
}

BoundValue bound_from_json(const json& j) {
  BoundValue bound;
  bound.c0 = j.at("c0").get<double>();
  bound.c1 = j.at("c1").get<double>();
  const auto& sym = j.at("constant_symbol");
  if (sym.is_null()) {
    bound.symbol = BoundValue::ConstantSymbol::none;
  } else if (sym.get<std::string>() == "M") {
    bound.symbol = BoundValue::ConstantSymbol::M;
  } else if (sym.get<std::string>() == "A") {
    bound.symbol = BoundValue::ConstantSymbol::A;
  } else {
    throw config_error("unknown constant symbol");
  }
  for (const auto& e : j.value("breakdown", json::array())) {
    bound.breakdown.push_back({e.at("name").get<std::string>(),
                               e.at("c0").get<double>(),
                               e.at("c1").get<double>(), std::nullopt});
  }
  return bound;
}

std::string to_csv_row(const VerdictReport& report,
                       const std::string& instance_id) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  return instance_id + "," + num(report.lhs.value) + "," + num(report.rhs.c0) +
         "," + num(report.rhs.c1) + "," + num(report.ratio_at_unit) + "," +
         verdict_name(report.verdict);
}

json to_json(const VerdictReport& report) {
  json j;
  json lhs;
  lhs["value"] = report.lhs.value;
  lhs["std_error"] = report.lhs.std_error;
  lhs["n_samples"] = report.lhs.n_samples;
  lhs["seed"] = report.lhs.seed;
  lhs["exact"] = report.lhs.exact;
  j["lhs"] = std::move(lhs);
  j["rhs"] = to_json(report.rhs);
  j["ratio_at_unit"] = report.ratio_at_unit;
  j["verdict"] = verdict_name(report.verdict);
  if (std::isfinite(report.scale_constant)) {
    j["scale_constant"] = report.scale_constant;
  } else {
    j["scale_constant"] = nullptr;
  }
  j["notes"] = report.notes;
  return j;
}

}  // namespace cltb
