// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "locbeam/harness.hpp"
#include "locbeam/units.hpp"

namespace locbeam::harness {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
    throw ConfigError(std::string("'") + key + "' must be a number");
  }
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j.at(key).get<int>();
}

scene::Position position(const json& p) {
  if (!p.is_object() || !p.contains("x") || !p.contains("y")) throw ConfigError("positions need x and y");
  return {number(p, "x", 0.0), number(p, "y", 0.0)};
}

void parse_bs(const json& j, ScenarioConfig& c) {
  c.antennas = integer(j, "antennas", 4);
  if (!j.contains("bs")) throw ConfigError("missing 'bs'");
  const json& bs = j.at("bs");
  if (bs.is_string()) {
    if (bs.get<std::string>() != "corners") throw ConfigError("'bs' string must be \"corners\"");
    c.bs_layout = BsLayout::kCorners;
    c.n_bs = 4;
  } else if (bs.is_array()) {
    c.bs_layout = BsLayout::kList;
    for (const json& p : bs) {
      c.bs.push_back(position(p));
      c.bs_antennas.push_back(integer(p, "antennas", c.antennas));
    }
    c.n_bs = static_cast<int>(c.bs.size());
  } else if (bs.is_object()) {
    if (bs.value("placement", "") != "uniform") throw ConfigError("'bs' placement must be \"uniform\"");
    c.bs_layout = BsLayout::kUniform;
    c.n_bs = integer(bs, "count", 4);
    c.antennas = integer(bs, "antennas", c.antennas);
  } else {
    throw ConfigError("'bs' must be \"corners\", a list or a placement object");
  }
}

void parse_ms(const json& j, ScenarioConfig& c) {
  if (!j.contains("ms")) throw ConfigError("missing 'ms'");
  const json& ms = j.at("ms");
  if (ms.is_array()) {
    c.ms_layout = MsLayout::kList;
    for (const json& p : ms) c.ms.push_back(position(p));
    c.n_ms = static_cast<int>(c.ms.size());
  } else if (ms.is_object()) {
    const std::string kind = ms.value("placement", "");
    if (kind == "uniform") {
      c.ms_layout = MsLayout::kUniform;
    } else if (kind == "line") {
      c.ms_layout = MsLayout::kLine;
      c.line_offset = number(ms, "offset", c.line_offset);
    } else {
      throw ConfigError("'ms' placement must be \"uniform\" or \"line\"");
    }
    c.n_ms = integer(ms, "count", kind == "line" ? 2 : 1);
  } else {
    throw ConfigError("'ms' must be a list or a placement object");
  }
  if (c.n_ms < 1) throw ConfigError("at least one MS is required");
  if (c.ms_layout != MsLayout::kList && c.bs_layout == BsLayout::kList) {
    throw ConfigError("random MS placement needs \"corners\" or uniform BSs");
  }
}

void parse_params(const json& j, ScenarioConfig& c) {
  scene::SystemParams& p = c.params;
  if (!j.contains("params")) return;
  const json& q = j.at("params");
  if (!q.is_object()) throw ConfigError("'params' must be an object");
  p.pilot_symbols = number(q, "n_p", p.pilot_symbols);
  p.bandwidth_hz = number(q, "beta_hz", p.bandwidth_hz);
  if (q.contains("n0_dbm_per_hz")) p.noise_w = dbm_to_watts(number(q, "n0_dbm_per_hz", -121.0));
  p.pathloss_exponent = number(q, "eta", p.pathloss_exponent);
  if (q.contains("pathloss_ref")) {
    const json& r = q.at("pathloss_ref");
    c.pathloss_db = number(r, "db", c.pathloss_db);
    c.pathloss_at_m = number(r, "at_m", c.pathloss_at_m);
  }
  p.duty = number(q, "duty", p.duty);
  p.data_symbols = number(q, "data_symbols", p.data_symbols);
  if (q.contains("K_b")) {
    const json& k = q.at("K_b");
    if (k.is_array()) {
      p.clock_prior = k.get<std::vector<double>>();
    } else {
      p.clock_prior = {number(q, "K_b", 0.0)};
    }
  }
}

void parse_requirements(const json& j, ScenarioConfig& c) {
  c.rate.assign(c.n_ms, 0.0);
  c.accuracy.assign(c.n_ms, kInf);
  if (!j.contains("requirements")) return;
  const json& r = j.at("requirements");
  if (r.is_object()) {
    std::fill(c.rate.begin(), c.rate.end(), number(r, "rate_bps_hz", 0.0));
    std::fill(c.accuracy.begin(), c.accuracy.end(), number(r, "q_m2", kInf));
  } else if (r.is_array()) {
    if (static_cast<int>(r.size()) != c.n_ms) throw ConfigError("'requirements' needs one entry per MS");
    for (int i = 0; i < c.n_ms; ++i) {
      c.rate[i] = number(r[i], "rate_bps_hz", 0.0);
      c.accuracy[i] = number(r[i], "q_m2", kInf);
    }
  } else {
    throw ConfigError("'requirements' must be an object or a list");
  }
  for (int i = 0; i < c.n_ms; ++i) {
    if (!(c.rate[i] >= 0.0) || !std::isfinite(c.rate[i])) throw ConfigError("rate_bps_hz must be finite and >= 0");
    if (!(c.accuracy[i] > 0.0)) throw ConfigError("q_m2 must be positive");
  }
}

void parse_uncertainty(const json& j, ScenarioConfig& c) {
  if (!j.contains("uncertainty")) return;
  const json& u = j.at("uncertainty");
  c.has_uncertainty = true;
  if (u.contains("epsilon")) {
    const double eps = number(u, "epsilon", 0.0);
    c.distance_halfwidth = eps * c.region_side / 2.0;
    c.angle_halfwidth = 2.0 * eps * kPi / 180.0;
  } else {
    c.distance_halfwidth = number(u, "distance_halfwidth_m", 0.0);
    c.angle_halfwidth = number(u, "angle_halfwidth_deg", 0.0) * kPi / 180.0;
  }
  c.uncertainty_samples = integer(u, "samples", c.uncertainty_samples);
}

void parse_ofdm(const json& j, ScenarioConfig& c) {
  if (!j.contains("ofdm")) return;
  const json& o = j.at("ofdm");
  scene::SystemParams& p = c.params;
  p.subcarriers = integer(o, "subcarriers", p.subcarriers);
  p.blocks = integer(o, "blocks", p.blocks);
  p.sampling_period_s = number(o, "sampling_period_s", p.sampling_period_s);
  if (o.contains("paths")) {
    const json& l = o.at("paths");
    p.paths = l.is_array() ? l.get<std::vector<int>>() : std::vector<int>{l.get<int>()};
  }
  c.ofdm.decay_rate = number(o, "decay_rate", c.ofdm.decay_rate);
  c.ofdm.angle_spread_deg = number(o, "angle_spread_deg", c.ofdm.angle_spread_deg);
  if (o.contains("seed")) c.ofdm.seed = o.at("seed").get<std::uint64_t>();
}

void parse_options(const json& j, ScenarioConfig& c) {
  if (!j.contains("options")) return;
  const json& o = j.at("options");
  optimizer::Options& opt = c.options;
  opt.initial_power = number(o, "initial_power", opt.initial_power);
  opt.delta_th = number(o, "delta_th", opt.delta_th);
  opt.max_outer = integer(o, "max_outer", opt.max_outer);
  opt.delta_inc = number(o, "delta_inc", opt.delta_inc);
  opt.rescale_cap = number(o, "rescale_cap", opt.rescale_cap);
  opt.tol_feas = number(o, "tol_feas", opt.tol_feas);
  if (o.contains("tdoa_method")) opt.tdoa_method = optimizer::tdoa_method_from_string(o.at("tdoa_method"));
  if (o.contains("solver")) {
    const std::string m = o.at("solver").get<std::string>();
    if (m == "barrier") {
      opt.solver.method = conic::Method::kBarrier;
    } else if (m == "splitting") {
      opt.solver.method = conic::Method::kSplitting;
    } else {
      throw ConfigError("unknown solver '" + m + "'");
    }
  }
  opt.solver.tol = number(o, "solver_tol", opt.solver.tol);
  opt.solver.max_iters = integer(o, "solver_max_iters", opt.solver.max_iters);
}

void parse_sweep(const json& j, ScenarioConfig& c) {
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    c.sweep_param = s.at("param").get<std::string>();
    const auto& known = sweep_parameters();
    if (std::find(known.begin(), known.end(), c.sweep_param) == known.end()) {
      throw ConfigError("unknown sweep parameter '" + c.sweep_param + "'");
    }
    c.sweep_grid = s.at("grid").get<std::vector<double>>();
    if (c.sweep_grid.empty()) throw ConfigError("sweep grid must not be empty");
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const json& m : j.at("modes")) c.modes.push_back(constraint_mode_from_string(m.get<std::string>()));
    if (c.modes.empty()) throw ConfigError("'modes' must not be empty");
  }
  c.trials = integer(j, "trials", 1);
  if (c.trials < 1) throw ConfigError("'trials' must be positive");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace

std::string to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::kRateOnly:
      return "rate_only";
    case ConstraintMode::kLocOnly:
      return "loc_only";
    case ConstraintMode::kBoth:
      return "both";
  }
  return "both";
}

ConstraintMode constraint_mode_from_string(const std::string& s) {
  if (s == "rate_only" || s == "rate") return ConstraintMode::kRateOnly;
  if (s == "loc_only" || s == "loc") return ConstraintMode::kLocOnly;
  if (s == "both") return ConstraintMode::kBoth;
  throw ConfigError("unknown constraint mode '" + s + "'");
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"ms_offset", "clock_prior", "epsilon", "blocks", "n_bs",
                                              "n_ms",      "rate",        "accuracy_m2", "antennas"};
  return names;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig c;
  try {
    c.region_side = number(j, "region_side_m", c.region_side);
    if (!(c.region_side > 0.0)) throw ConfigError("'region_side_m' must be positive");
    parse_bs(j, c);
    parse_ms(j, c);
    parse_params(j, c);
    parse_requirements(j, c);
    if (!j.contains("mode")) throw ConfigError("missing 'mode'");
    c.mode = optimizer::mode_from_string(j.at("mode").get<std::string>());
    parse_uncertainty(j, c);
    parse_ofdm(j, c);
    parse_options(j, c);
    parse_sweep(j, c);
    if (j.contains("beamformers")) c.beamformers = j.at("beamformers");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const bool robust = c.mode == optimizer::Mode::kRobustToa || c.mode == optimizer::Mode::kRobustTdoa;
  if (robust && !c.has_uncertainty && c.sweep_param != "epsilon") {
    throw ConfigError("robust modes need an 'uncertainty' block");
  }
  if (c.mode == optimizer::Mode::kOfdmToa && c.params.paths.empty()) c.params.paths = {3};
  return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

optimizer::Scenario build_scenario(const ScenarioConfig& config, double sweep_value, ConstraintMode mode,
                                   int trial) {
  ScenarioConfig c = config;
  const std::string& p = c.sweep_param;
  if (p == "ms_offset") {
    c.line_offset = sweep_value;
  } else if (p == "clock_prior") {
    c.params.clock_prior = {sweep_value};
  } else if (p == "epsilon") {
    c.has_uncertainty = true;
    c.distance_halfwidth = sweep_value * c.region_side / 2.0;
    c.angle_halfwidth = 2.0 * sweep_value * kPi / 180.0;
  } else if (p == "blocks") {
    c.params.blocks = static_cast<int>(std::lround(sweep_value));
  } else if (p == "n_bs") {
    if (c.bs_layout != BsLayout::kUniform) throw ConfigError("n_bs sweeps need uniform BSs");
    c.n_bs = static_cast<int>(std::lround(sweep_value));
  } else if (p == "n_ms") {
    if (c.ms_layout == MsLayout::kList) throw ConfigError("n_ms sweeps need random MS placement");
    c.n_ms = static_cast<int>(std::lround(sweep_value));
    c.rate.assign(c.n_ms, config.rate.at(0));
    c.accuracy.assign(c.n_ms, config.accuracy.at(0));
  } else if (p == "rate") {
    std::fill(c.rate.begin(), c.rate.end(), sweep_value);
  } else if (p == "accuracy_m2") {
    std::fill(c.accuracy.begin(), c.accuracy.end(), sweep_value);
  } else if (p == "antennas") {
    c.antennas = static_cast<int>(std::lround(sweep_value));
    std::fill(c.bs_antennas.begin(), c.bs_antennas.end(), c.antennas);
  }

  scene::Topology topo;
  const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(trial);
  if (c.ms_layout == MsLayout::kList) {
    topo.region_side = c.region_side;
    if (c.bs_layout == BsLayout::kList) {
      topo.bs = c.bs;
      topo.bs_antennas = c.bs_antennas;
    } else {
      scene::PlacementOptions po;
      po.kind = c.bs_layout == BsLayout::kCorners ? scene::Placement::kCorners : scene::Placement::kUniform;
      po.antennas = c.antennas;
      const scene::Topology t = scene::random_topology(seed, c.region_side, c.n_bs, 1, po);
      topo.bs = t.bs;
      topo.bs_antennas = t.bs_antennas;
    }
    topo.ms = c.ms;
    topo.validate();
  } else {
    scene::PlacementOptions po;
    po.antennas = c.antennas;
    po.line_offset = c.line_offset;
    if (c.ms_layout == MsLayout::kLine) {
      if (c.bs_layout != BsLayout::kCorners) throw ConfigError("line placement needs \"corners\" BSs");
      po.kind = scene::Placement::kLineScene;
    } else {
      po.kind = c.bs_layout == BsLayout::kCorners ? scene::Placement::kCorners : scene::Placement::kUniform;
    }
    topo = scene::random_topology(seed, c.region_side, c.n_bs, c.n_ms, po);
  }

  scene::SystemParams params = c.params;
  params.reference_distance =
      scene::calibrate_reference_distance(c.pathloss_db, c.pathloss_at_m, params.pathloss_exponent);

  scene::Requirements req;
  req.rate = c.rate;
  req.accuracy = c.accuracy;
  if (mode == ConstraintMode::kRateOnly) std::fill(req.accuracy.begin(), req.accuracy.end(), kInf);
  if (mode == ConstraintMode::kLocOnly) std::fill(req.rate.begin(), req.rate.end(), 0.0);

  using optimizer::Mode;
  switch (c.mode) {
    case Mode::kToaFlat:
    case Mode::kTdoaFlat:
      return optimizer::flat_scenario(c.mode, topo, params, req);
    case Mode::kRobustToa:
    case Mode::kRobustTdoa:
      return optimizer::robust_scenario(c.mode, topo, params, req, c.distance_halfwidth, c.angle_halfwidth,
                                        c.uncertainty_samples);
    case Mode::kOfdmToa: {
      channel::SelectiveOptions o = c.ofdm;
      o.seed += static_cast<std::uint64_t>(trial);
      return optimizer::ofdm_scenario(topo, params, req, o);
    }
  }
  throw ConfigError("unknown mode");
}

json beamformers_to_json(const BeamformerSet& w) {
  json out = json::array();
  for (int j = 0; j < w.n_bs(); ++j) {
    for (int i = 0; i < w.n_ms(); ++i) {
      for (int b = 0; b < w.n_blocks(); ++b) {
        const CVector& v = w.at(j, i, b);
        std::vector<double> re(v.size()), im(v.size());
        for (int m = 0; m < v.size(); ++m) {
          re[m] = v(m).real();
          im[m] = v(m).imag();
        }
        out.push_back({{"bs", j}, {"ms", i}, {"block", b}, {"re", re}, {"im", im}});
      }
    }
  }
  return out;
}

BeamformerSet beamformers_from_json(const json& j, const std::vector<int>& antennas, int n_ms, int n_blocks) {
  BeamformerSet w(antennas, n_ms, n_blocks);
  try {
    if (!j.is_array()) throw ConfigError("beamformers must be a list");
    for (const json& e : j) {
      const int bs = e.at("bs").get<int>();
      const int ms = e.at("ms").get<int>();
      const int block = e.value("block", 0);
      if (bs < 0 || bs >= w.n_bs() || ms < 0 || ms >= n_ms || block < 0 || block >= n_blocks) {
        throw ConfigError("beamformer index out of range");
      }
      const auto re = e.at("re").get<std::vector<double>>();
      const auto im = e.value("im", std::vector<double>(re.size(), 0.0));
      if (static_cast<int>(re.size()) != antennas[bs] || im.size() != re.size()) {
        throw ConfigError("beamformer length differs from the antenna count");
      }
      CVector& v = w.at(bs, ms, block);
      for (int m = 0; m < v.size(); ++m) v(m) = Complex(re[m], im[m]);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed beamformers: ") + e.what());
  }
  return w;
}

double dbm_conversion(double value, DbmDirection direction) {
  return direction == DbmDirection::kWattsToDbm ? watts_to_dbm(value) : dbm_to_watts(value);
}

}  // namespace locbeam::harness
