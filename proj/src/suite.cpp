#include "wacs/suite.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace wacs {

namespace {

using nlohmann::json;

Expr parse_entry(const json& v, const std::vector<std::string>& coords,
                 const std::string& where) {
  if (v.is_number()) return Expr::constant(v.get<double>());
  if (v.is_string()) {
    try {
      return parse_expr(v.get<std::string>(), coords);
    } catch (const ParseError& e) {
      throw SpecError(where + ": " + e.what() + " (offset " +
                      std::to_string(e.position) + ")");
    }
  }
  throw SpecError(where + " must be a number or an expression string");
}

TensorField parse_matrix(const json& v, const ChartPtr& chart,
                         const std::string& where) {
  const int d = chart->dim();
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw SpecError(where + " must be a " + std::to_string(d) + "x" +
                    std::to_string(d) + " array (row i = output slot)");
  TensorField out(chart, 1, 1);  // shape fixed by caller afterwards if (0,2)
  for (int i = 0; i < d; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw SpecError(where + " row " + std::to_string(i) + " must have " +
                      std::to_string(d) + " entries");
    for (int j = 0; j < d; ++j)
      out.at({i, j}) = parse_entry(row[j], chart->coords(),
                                   where + "[" + std::to_string(i) + "][" +
                                       std::to_string(j) + "]");
  }
  return out;
}

TensorField parse_matrix_02(const json& v, const ChartPtr& chart,
                            const std::string& where) {
  TensorField m = parse_matrix(v, chart, where);
  TensorField out(chart, 0, 2);
  const int d = chart->dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.at({i, j}) = m.at({i, j});
  return out;
}

TensorField parse_vector(const json& v, const ChartPtr& chart, int rank_up,
                         const std::string& where) {
  const int d = chart->dim();
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw SpecError(where + " must have " + std::to_string(d) + " entries");
  TensorField out(chart, rank_up, 1 - rank_up);
  for (int i = 0; i < d; ++i)
    out.at({i}) = parse_entry(v[i], chart->coords(),
                              where + "[" + std::to_string(i) + "]");
  return out;
}

double parse_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw SpecError(where + " needs a numeric \"" + key + "\"");
  return j.at(key).get<double>();
}

ZooInstance load_kind(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "model") {
    int n = static_cast<int>(parse_number(j, "n", "model"));
    double beta = parse_number(j, "beta", "model");
    double c = j.contains("c") ? parse_number(j, "c", "model") : 0.0;
    return kenmotsu_model(n, beta, c);
  }
  if (kind == "warped") {
    if (!j.contains("scales") || !j.at("scales").is_array())
      throw SpecError("warped needs a \"scales\" array");
    std::vector<double> scales;
    for (const json& s : j.at("scales")) {
      if (!s.is_number()) throw SpecError("warped scales must be numbers");
      scales.push_back(s.get<double>());
    }
    if (!j.contains("sigma"))
      throw SpecError("warped needs a \"sigma\" expression in t");
    Expr sigma = parse_entry(j.at("sigma"), {"t"}, "sigma");
    return {warped_product(flat_weak_kaehler(scales), sigma), std::nullopt};
  }
  if (kind == "perturbed") {
    int n = static_cast<int>(parse_number(j, "n", "perturbed"));
    double beta = parse_number(j, "beta", "perturbed");
    double c = j.contains("c") ? parse_number(j, "c", "perturbed") : 0.0;
    double eps = parse_number(j, "eps", "perturbed");
    return perturbed_model(n, beta, c, eps);
  }
  throw SpecError("unknown kind \"" + kind +
                  "\" (expected model, warped, or perturbed)");
}

ZooInstance load_explicit(const json& j) {
  if (!j.contains("coordinates") || !j.at("coordinates").is_array())
    throw SpecError("bundle needs a \"coordinates\" array");
  std::vector<std::string> coords;
  for (const json& cj : j.at("coordinates")) {
    if (!cj.is_string()) throw SpecError("coordinates must be strings");
    coords.push_back(cj.get<std::string>());
  }
  ChartPtr chart;
  if (j.contains("domain")) {
    const json& dom = j.at("domain");
    if (!dom.is_array() || dom.size() != coords.size())
      throw SpecError("domain needs one [lo, hi] pair per coordinate");
    std::vector<std::array<double, 2>> box;
    for (const json& iv : dom) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() ||
          !iv[1].is_number())
        throw SpecError("each domain entry must be [lo, hi]");
      box.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    try {
      chart = Chart::make(coords, box);
    } catch (const std::invalid_argument& e) {
      throw SpecError(e.what());
    }
  } else {
    try {
      chart = Chart::make(coords);
    } catch (const std::invalid_argument& e) {
      throw SpecError(e.what());
    }
  }

  for (const char* key : {"metric", "f", "Q", "xi", "eta"})
    if (!j.contains(key))
      throw SpecError(std::string("bundle needs \"") + key + "\"");

  TensorField g = parse_matrix_02(j.at("metric"), chart, "metric");
  TensorField f = parse_matrix(j.at("f"), chart, "f");
  TensorField Q = parse_matrix(j.at("Q"), chart, "Q");
  TensorField xi = parse_vector(j.at("xi"), chart, 1, "xi");
  TensorField eta = parse_vector(j.at("eta"), chart, 0, "eta");
  std::optional<Expr> beta;
  if (j.contains("beta"))
    beta = parse_entry(j.at("beta"), coords, "beta");
  std::string id = j.contains("id") && j.at("id").is_string()
                       ? j.at("id").get<std::string>()
                       : std::string("custom");

  std::optional<SolitonData> soliton;
  if (j.contains("soliton")) {
    const json& sj = j.at("soliton");
    SolitonData s;
    bool has_v = sj.contains("V"), has_p = sj.contains("potential");
    if (has_v == has_p)
      throw SpecError("soliton needs exactly one of \"V\" or \"potential\"");
    if (has_v) s.V = parse_vector(sj.at("V"), chart, 1, "soliton V");
    if (has_p) s.potential = parse_entry(sj.at("potential"), coords,
                                         "soliton potential");
    s.lambda = parse_number(sj, "lambda", "soliton");
    s.mu = parse_number(sj, "mu", "soliton");
    soliton = std::move(s);
  }

  try {
    WacsBundle b(std::move(id), std::move(f), std::move(Q), std::move(xi),
                 std::move(eta), std::move(g), std::move(beta));
    return {std::move(b), std::move(soliton)};
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

}  // namespace

ZooInstance load_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("bundle description is not valid JSON: ") +
                    e.what());
  }
  if (!j.is_object()) throw SpecError("bundle description must be an object");
  try {
    if (j.contains("kind")) return load_kind(j);
    return load_explicit(j);
  } catch (const json::exception& e) {
    throw SpecError(std::string("bundle description: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

ZooInstance load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_spec(ss.str());
}

VerificationReport run_suite(const ZooInstance& inst, const RunConfig& cfg) {
  static const std::map<std::string, int, std::less<>> kLevels{
      {"wacs", 1},   {"kenmotsu", 2}, {"star", 3},
      {"soliton", 4}, {"theorems", 5}, {"all", 5}};
  auto lv = kLevels.find(cfg.suite);
  if (lv == kLevels.end())
    throw std::invalid_argument("unknown suite \"" + cfg.suite + "\"");
  const int level = lv->second;
  if (cfg.samples < 1) throw std::invalid_argument("samples must be positive");
  if (!(cfg.base_tol > 0.0))
    throw std::invalid_argument("tolerance must be positive");

  const WacsBundle& b = inst.bundle;
  VerificationReport rep;
  rep.bundle_id = b.id();
  rep.samples = cfg.samples;
  rep.seed = cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<Point> pts = sample_points(b.metric(), cfg.samples, cfg.seed);
  const double tol = cfg.base_tol;

  rep.add(wacs_axiom_checks(b, pts, tol / 10.0));
  const bool axioms_ok = rep.family_passed("wacs");

  auto gate = [&rep](const char* name, const std::string& why) {
    rep.add(make_skip(name, "family preconditions", why));
  };
  const std::string kAxiomsFailed = "structure axioms failed upstream";
  const std::string kNotConstant = "beta is not constant over the samples";

  std::optional<double> beta_c;
  if (b.beta()) beta_c = constant_value_over(*b.beta(), pts);

  if (level >= 2) {
    if (!axioms_ok) {
      gate("kenmotsu/gated", kAxiomsFailed);
      gate("nijenhuis/gated", kAxiomsFailed);
      gate("curv/gated", kAxiomsFailed);
    } else {
      rep.add(kenmotsu_checks(b, pts, tol, cfg.kappa));
      NijenhuisFields nf = nijenhuis_tensors(b);
      TensorField z02(b.chart(), 0, 2), z11(b.chart(), 1, 1),
          z01(b.chart(), 0, 1);
      rep.add(make_check("nijenhuis/n2_vanishes",
                         "(L_fX eta)(Y) - (L_fY eta)(X) = 0",
                         max_residual(nf.n2, z02, pts), tol));
      rep.add(make_check("nijenhuis/n3_vanishes", "L_xi f = 0",
                         max_residual(nf.n3, z11, pts), tol));
      rep.add(make_check("nijenhuis/n4_vanishes", "L_xi eta = 0",
                         max_residual(nf.n4, z01, pts), tol));
      if (!b.beta())
        gate("curv/gated", "bundle has no beta");
      else if (!beta_c)
        gate("curv/gated", kNotConstant);
      else
        rep.add(curvature_checks(b, *beta_c, pts, tol));
    }
  }

  const bool kenmotsu_ok = axioms_ok && level >= 2 &&
                           rep.family_passed("kenmotsu") &&
                           rep.family_passed("nijenhuis");

  if (level >= 3) {
    if (!kenmotsu_ok)
      gate("star/gated",
           axioms_ok ? "class identities failed upstream" : kAxiomsFailed);
    else
      rep.add(star_checks(b, *b.beta(), pts, tol));
  }

  if (level >= 4) {
    if (!kenmotsu_ok) {
      const std::string why =
          axioms_ok ? "class identities failed upstream" : kAxiomsFailed;
      gate("einstein/gated", why);
      gate("soliton/gated", why);
      gate("lie/gated", why);
      gate("prop/gated", why);
    } else if (!beta_c) {
      gate("einstein/gated", kNotConstant);
      gate("soliton/gated", kNotConstant);
      gate("lie/gated", kNotConstant);
      gate("prop/gated", kNotConstant);
    } else {
      rep.add(einstein_checks(b, *beta_c, pts, tol));
      if (!inst.soliton) {
        const std::string why = "no soliton data attached";
        gate("soliton/gated", why);
        gate("lie/gated", why);
        gate("prop/gated", why);
      } else {
        rep.add(soliton_checks(b, *inst.soliton, *beta_c, pts, tol));
        rep.add(gradient_soliton_checks(b, *inst.soliton, *beta_c, pts, tol));
        rep.add(lie_checks(b, *inst.soliton, *beta_c, pts, tol));
        rep.add(proposition_checks(b, *inst.soliton, pts, tol));
      }
    }
  }

  if (level >= 5) {
    if (!kenmotsu_ok)
      gate("theorem/gated",
           axioms_ok ? "class identities failed upstream" : kAxiomsFailed);
    else if (!beta_c)
      gate("theorem/gated", kNotConstant);
    else
      rep.add(flatten(
          theorem_harness(b, inst.soliton, *beta_c, pts, tol, tol * 10.0)));
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace wacs
