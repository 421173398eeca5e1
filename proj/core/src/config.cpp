#include "pat/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pat {

namespace {

std::string where(const std::string& source, const YAML::Mark& m) {
  if (m.is_null()) return source + ": ";
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": ";
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    throw ConfigError(where(source_, node.Mark()) + msg);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, "'" + what + "' must be a mapping");
  }

  /// Rejects keys outside `allowed`.
  void check_keys(const YAML::Node& node, const std::string& block,
                  const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + block);
    }
  }

  template <class T>
  void read(const YAML::Node& parent, const char* key, T& out) const {
    const YAML::Node n = parent[key];
    if (!n) return;
    if (!n.IsScalar()) fail(n, std::string("'") + key + "' must be a scalar");
    try {
      out = n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, std::string("'") + key + "' has an invalid value '" + n.Scalar() + "'");
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

SmootherKind smoother_kind(const Parser& p, const YAML::Node& n) {
  const auto s = n.as<std::string>();
  if (s == "raised-cosine") return SmootherKind::kRaisedCosine;
  if (s == "none") return SmootherKind::kNone;
  p.fail(n, "smoother kind must be 'raised-cosine' or 'none', got '" + s + "'");
}

}  // namespace

std::string to_string(Side side) {
  switch (side) {
    case Side::kLeft: return "left";
    case Side::kBottom: return "bottom";
    case Side::kRight: return "right";
    case Side::kTop: return "top";
  }
  return "?";
}

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::kLeft;
  if (s == "bottom") return Side::kBottom;
  if (s == "right") return Side::kRight;
  if (s == "top") return Side::kTop;
  throw std::invalid_argument("unknown side '" + s + "' (expected left, bottom, right or top)");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const ExperimentConfig& base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(source, e.mark) + e.msg);
  }
  ExperimentConfig c = base;
  if (!root || root.IsNull()) return c;
  const Parser p(source);
  p.require_map(root, "document");
  p.check_keys(root, "document",
               {"name", "grid", "medium", "array", "smoother", "recon", "noise", "phantom", "seeds",
                "trials"});
  p.read(root, "name", c.name);
  p.read(root, "trials", c.trials);

  if (const auto g = root["grid"]) {
    p.require_map(g, "grid");
    p.check_keys(g, "grid", {"dims", "dx", "pml_size", "pml_alpha_max", "nt", "dt"});
    if (const auto d = g["dims"]) {
      if (!d.IsSequence() || d.size() != kDim) p.fail(d, "'dims' must be a list of 2 integers");
      for (std::size_t a = 0; a < kDim; ++a) {
        try {
          c.grid.dims[a] = d[a].as<int>();
        } catch (const YAML::BadConversion&) {
          p.fail(d[a], "'dims' entries must be integers");
        }
      }
    }
    p.read(g, "dx", c.grid.dx);
    p.read(g, "pml_size", c.grid.pml_size);
    p.read(g, "pml_alpha_max", c.grid.pml_alpha_max);
    p.read(g, "nt", c.grid.nt);
    p.read(g, "dt", c.grid.dt);
  }

  if (const auto m = root["medium"]) {
    p.require_map(m, "medium");
    p.check_keys(m, "medium", {"c", "rho0", "c_file", "rho0_file"});
    p.read(m, "c", c.medium.c);
    p.read(m, "rho0", c.medium.rho0);
    p.read(m, "c_file", c.medium.c_file);
    p.read(m, "rho0_file", c.medium.rho0_file);
  }

  if (const auto a = root["array"]) {
    p.require_map(a, "array");
    p.check_keys(a, "array",
                 {"kind", "n_receivers", "radius", "half_length", "nodes_per_receiver", "sides",
                  "inset", "eps_factor"});
    if (const auto k = a["kind"]) {
      const auto s = k.as<std::string>();
      if (s == "circular") c.array.kind = ArrayKind::kCircular;
      else if (s == "ongrid") c.array.kind = ArrayKind::kOnGrid;
      else p.fail(k, "array kind must be 'circular' or 'ongrid', got '" + s + "'");
    }
    p.read(a, "n_receivers", c.array.n_receivers);
    p.read(a, "radius", c.array.radius);
    p.read(a, "half_length", c.array.half_length);
    p.read(a, "nodes_per_receiver", c.array.nodes_per_receiver);
    p.read(a, "inset", c.array.inset);
    p.read(a, "eps_factor", c.array.eps_factor);
    if (const auto s = a["sides"]) {
      if (!s.IsSequence()) p.fail(s, "'sides' must be a list");
      c.array.sides.clear();
      for (const auto& e : s) {
        try {
          c.array.sides.push_back(side_from_string(e.as<std::string>()));
        } catch (const std::invalid_argument& err) {
          p.fail(e, err.what());
        }
      }
    }
  }

  if (const auto s = root["smoother"]) {
    p.require_map(s, "smoother");
    p.check_keys(s, "smoother", {"kind", "rolloff_start", "rolloff_end"});
    if (const auto k = s["kind"]) c.smoother.kind = smoother_kind(p, k);
    p.read(s, "rolloff_start", c.smoother.rolloff_start);
    p.read(s, "rolloff_end", c.smoother.rolloff_end);
  }

  if (const auto r = root["recon"]) {
    p.require_map(r, "recon");
    p.check_keys(r, "recon",
                 {"tau_mode", "tau", "eta", "max_iters", "power_iterations", "tau_safety"});
    if (const auto k = r["tau_mode"]) {
      const auto s = k.as<std::string>();
      if (s == "auto") c.recon.tau_mode = TauMode::kAuto;
      else if (s == "fixed") c.recon.tau_mode = TauMode::kFixed;
      else p.fail(k, "tau_mode must be 'auto' or 'fixed', got '" + s + "'");
    }
    p.read(r, "tau", c.recon.tau);
    p.read(r, "eta", c.recon.eta);
    p.read(r, "max_iters", c.recon.max_iters);
    p.read(r, "power_iterations", c.recon.power_iterations);
    p.read(r, "tau_safety", c.recon.tau_safety);
  }

  if (const auto n = root["noise"]) {
    p.require_map(n, "noise");
    p.check_keys(n, "noise", {"snr_db"});
    if (const auto s = n["snr_db"]) {
      if (s.IsScalar() && s.Scalar() == "none") c.snr_db = kNoNoise;
      else p.read(n, "snr_db", c.snr_db);
    }
  }

  if (const auto ph = root["phantom"]) {
    p.require_map(ph, "phantom");
    p.check_keys(ph, "phantom",
                 {"kind", "radius", "lo", "hi", "n_branches", "width_min", "width_max",
                  "support_radius"});
    if (const auto k = ph["kind"]) {
      const auto s = k.as<std::string>();
      if (s == "disc") c.phantom.kind = PhantomKind::kDisc;
      else if (s == "vessel") c.phantom.kind = PhantomKind::kVessel;
      else p.fail(k, "phantom kind must be 'disc' or 'vessel', got '" + s + "'");
    }
    p.read(ph, "radius", c.phantom.radius);
    p.read(ph, "lo", c.phantom.lo);
    p.read(ph, "hi", c.phantom.hi);
    p.read(ph, "n_branches", c.phantom.vessel.n_branches);
    p.read(ph, "width_min", c.phantom.vessel.width_min);
    p.read(ph, "width_max", c.phantom.vessel.width_max);
    p.read(ph, "support_radius", c.phantom.vessel.support_radius);
  }

  if (const auto s = root["seeds"]) {
    p.require_map(s, "seeds");
    p.check_keys(s, "seeds", {"phantom", "noise", "trials", "power"});
    p.read(s, "phantom", c.seeds.phantom);
    p.read(s, "noise", c.seeds.noise);
    p.read(s, "trials", c.seeds.trials);
    p.read(s, "power", c.seeds.power);
  }
  c.recon.power_seed = c.seeds.power;

  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path, base);
}

void validate(const ExperimentConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  check(c.grid.dims[0] >= 8 && c.grid.dims[1] >= 8, "grid.dims must be at least 8 per axis");
  check(c.grid.dx > 0.0, "grid.dx must be positive");
  check(c.grid.dt > 0.0, "grid.dt must be positive");
  check(c.grid.nt >= 2, "grid.nt must be at least 2");
  check(c.grid.pml_size >= 0, "grid.pml_size must be non-negative");
  check(c.grid.pml_alpha_max >= 0.0, "grid.pml_alpha_max must be non-negative");
  check(c.medium.c > 0.0 && c.medium.rho0 > 0.0, "medium c and rho0 must be positive");
  if (c.array.kind == ArrayKind::kCircular) {
    check(c.array.n_receivers >= 1, "array.n_receivers must be positive");
    check(c.array.radius > c.array.half_length && c.array.half_length > 0.0,
          "array requires radius > half_length > 0");
    check(c.array.nodes_per_receiver >= 2, "array.nodes_per_receiver must be at least 2");
    check(c.array.eps_factor >= 0.0, "array.eps_factor must be non-negative");
  } else {
    check(!c.array.sides.empty(), "array.sides must not be empty");
    check(c.array.inset >= 1, "array.inset must be at least 1");
  }
  check(c.smoother.rolloff_start >= 0.0 && c.smoother.rolloff_end > c.smoother.rolloff_start,
        "smoother requires 0 <= rolloff_start < rolloff_end");
  check(!std::isnan(c.snr_db), "noise.snr_db must be a number or 'none'");
  check(c.trials >= 1, "trials must be positive");
  try {
    validate(c.recon);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "trials" << YAML::Value << c.trials;

  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dims" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.grid.dims[0]
    << c.grid.dims[1] << YAML::EndSeq;
  e << YAML::Key << "dx" << YAML::Value << c.grid.dx;
  e << YAML::Key << "pml_size" << YAML::Value << c.grid.pml_size;
  e << YAML::Key << "pml_alpha_max" << YAML::Value << c.grid.pml_alpha_max;
  e << YAML::Key << "nt" << YAML::Value << c.grid.nt;
  e << YAML::Key << "dt" << YAML::Value << c.grid.dt;
  e << YAML::EndMap;

  e << YAML::Key << "medium" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "c" << YAML::Value << c.medium.c;
  e << YAML::Key << "rho0" << YAML::Value << c.medium.rho0;
  e << YAML::Key << "c_file" << YAML::Value << c.medium.c_file;
  e << YAML::Key << "rho0_file" << YAML::Value << c.medium.rho0_file;
  e << YAML::EndMap;

  e << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value
    << (c.array.kind == ArrayKind::kCircular ? "circular" : "ongrid");
  e << YAML::Key << "n_receivers" << YAML::Value << c.array.n_receivers;
  e << YAML::Key << "radius" << YAML::Value << c.array.radius;
  e << YAML::Key << "half_length" << YAML::Value << c.array.half_length;
  e << YAML::Key << "nodes_per_receiver" << YAML::Value << c.array.nodes_per_receiver;
  e << YAML::Key << "sides" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Side s : c.array.sides) e << to_string(s);
  e << YAML::EndSeq;
  e << YAML::Key << "inset" << YAML::Value << c.array.inset;
  e << YAML::Key << "eps_factor" << YAML::Value << c.array.eps_factor;
  e << YAML::EndMap;

  e << YAML::Key << "smoother" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value
    << (c.smoother.kind == SmootherKind::kNone ? "none" : "raised-cosine");
  e << YAML::Key << "rolloff_start" << YAML::Value << c.smoother.rolloff_start;
  e << YAML::Key << "rolloff_end" << YAML::Value << c.smoother.rolloff_end;
  e << YAML::EndMap;

  e << YAML::Key << "recon" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tau_mode" << YAML::Value
    << (c.recon.tau_mode == TauMode::kAuto ? "auto" : "fixed");
  e << YAML::Key << "tau" << YAML::Value << c.recon.tau;
  e << YAML::Key << "eta" << YAML::Value << c.recon.eta;
  e << YAML::Key << "max_iters" << YAML::Value << c.recon.max_iters;
  e << YAML::Key << "power_iterations" << YAML::Value << c.recon.power_iterations;
  e << YAML::Key << "tau_safety" << YAML::Value << c.recon.tau_safety;
  e << YAML::EndMap;

  e << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "snr_db" << YAML::Value;
  if (std::isinf(c.snr_db)) e << "none";
  else e << c.snr_db;
  e << YAML::EndMap;

  e << YAML::Key << "phantom" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value
    << (c.phantom.kind == PhantomKind::kDisc ? "disc" : "vessel");
  e << YAML::Key << "radius" << YAML::Value << c.phantom.radius;
  e << YAML::Key << "lo" << YAML::Value << c.phantom.lo;
  e << YAML::Key << "hi" << YAML::Value << c.phantom.hi;
  e << YAML::Key << "n_branches" << YAML::Value << c.phantom.vessel.n_branches;
  e << YAML::Key << "width_min" << YAML::Value << c.phantom.vessel.width_min;
  e << YAML::Key << "width_max" << YAML::Value << c.phantom.vessel.width_max;
  e << YAML::Key << "support_radius" << YAML::Value << c.phantom.vessel.support_radius;
  e << YAML::EndMap;

  e << YAML::Key << "seeds" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "phantom" << YAML::Value << c.seeds.phantom;
  e << YAML::Key << "noise" << YAML::Value << c.seeds.noise;
  e << YAML::Key << "trials" << YAML::Value << c.seeds.trials;
  e << YAML::Key << "power" << YAML::Value << c.seeds.power;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string text = to_yaml(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pat
