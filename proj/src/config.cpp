#include "spde/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace spde {

namespace {

using nlohmann::json;

void reject_unknown(const json &section, const std::string &name, const std::set<std::string> &allowed) {
  if (!section.is_object())
    throw ConfigError("section '" + name + "' must be an object");
  for (const auto &item : section.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + name + "." + item.key() + "'");
}

template <class T> T get(const json &section, const char *key, T fallback) {
  if (!section.contains(key))
    return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json &section, const char *key, std::size_t fallback) {
  if (!section.contains(key))
    return fallback;
  const json &v = section.at(key);
  if (!v.is_number_unsigned())
    throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<std::size_t> get_counts(const json &section, const char *key, std::vector<std::size_t> fallback) {
  if (!section.contains(key))
    return fallback;
  const json &v = section.at(key);
  if (!v.is_array() || v.empty())
    throw ConfigError(std::string("'") + key + "' must be a nonempty array");
  std::vector<std::size_t> out;
  for (const json &x : v) {
    if (!x.is_number_unsigned() || x.get<std::size_t>() == 0)
      throw ConfigError(std::string("'") + key + "' entries must be positive integers");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

std::vector<ModeCount> get_modes(const json &section, std::vector<ModeCount> fallback) {
  if (!section.contains("modes"))
    return fallback;
  const json &v = section.at("modes");
  if (!v.is_array() || v.empty())
    throw ConfigError("'modes' must be a nonempty array");
  std::vector<ModeCount> out;
  for (const json &x : v) {
    if (x.is_string() && x.get<std::string>() == "all")
      out.push_back(ModeCount::all());
    else if (x.is_number_unsigned() && x.get<std::size_t>() > 0)
      out.push_back(x.get<std::size_t>());
    else
      throw ConfigError("'modes' entries must be positive integers or \"all\"");
  }
  return out;
}

CubicCoefficients parse_drift(const json &v) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "allen_cahn")
      return CubicCoefficients::allen_cahn();
    if (name == "zero")
      return CubicCoefficients::zero();
    throw ConfigError("unknown drift preset '" + name + "'");
  }
  if (!v.is_array() || v.size() != 4)
    throw ConfigError("'drift' must be a preset name or [a0, a1, a2, a3]");
  std::array<double, 4> a{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number())
      throw ConfigError("drift coefficients must be numbers");
    a[i] = v[i].get<double>();
  }
  try {
    return CubicCoefficients(a);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> powers_of_two_to(std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t v = 1; v <= last; v *= 2)
    out.push_back(v);
  return out;
}

} // namespace

void RunConfig::require_finite_modes() {
  study.modes_grid.clear();
  for (const ModeCount &n : modes_grid) {
    if (n.is_all())
      throw ConfigError("\"all\" modes is only supported by heat-errors");
    study.modes_grid.push_back(n.value());
  }
  study.steps_grid = steps_grid;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.steps_grid = powers_of_two_to(64);
  for (std::size_t n : powers_of_two_to(64))
    cfg.modes_grid.push_back(n);
  cfg.study.model.initial = initial_value_preset("bump", cfg.study.ref_modes);
  return cfg;
}

RunConfig parse_config(const std::string &json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigError("configuration must be a JSON object");
  reject_unknown(root, "<root>", {"model", "discretization", "study", "output"});

  RunConfig cfg = default_config();
  StudyConfig &s = cfg.study;
  const json empty = json::object();
  const json &model = root.value("model", empty);
  const json &disc = root.value("discretization", empty);
  const json &study = root.value("study", empty);
  const json &output = root.value("output", empty);
  reject_unknown(model, "model", {"horizon", "nu", "drift", "initial"});
  reject_unknown(disc, "discretization",
                 {"steps", "modes", "gamma", "chi", "ref_steps", "ref_modes", "temporal_modes", "spatial_steps",
                  "simulate_steps", "simulate_modes"});
  reject_unknown(study, "study",
                 {"paths", "seed", "threads", "exact_linear", "moments", "moment_order", "moment_norm",
                  "simulate_path", "audit_trials", "audit_modes"});
  reject_unknown(output, "output", {"dir"});

  s.model.horizon = get<double>(model, "horizon", s.model.horizon);
  s.model.nu = get<double>(model, "nu", s.model.nu);
  if (model.contains("drift"))
    s.model.drift = parse_drift(model.at("drift"));

  cfg.steps_grid = get_counts(disc, "steps", cfg.steps_grid);
  cfg.modes_grid = get_modes(disc, cfg.modes_grid);
  s.gamma = get<double>(disc, "gamma", s.gamma);
  s.chi = disc.contains("chi") ? get<double>(disc, "chi", 0.0) : DiscretizationParams::max_chi(s.gamma);
  s.ref_steps = get_count(disc, "ref_steps", s.ref_steps);
  s.ref_modes = get_count(disc, "ref_modes", s.ref_modes);
  s.temporal_modes = get_count(disc, "temporal_modes", s.temporal_modes);
  s.spatial_steps = get_count(disc, "spatial_steps", s.spatial_steps);
  cfg.simulate_steps = get_count(disc, "simulate_steps", cfg.simulate_steps);
  cfg.simulate_modes = get_count(disc, "simulate_modes", cfg.simulate_modes);

  const std::size_t initial_modes = std::max(s.ref_modes, cfg.simulate_modes);
  const json initial = model.value("initial", json("bump"));
  if (initial.is_string()) {
    try {
      s.model.initial = initial_value_preset(initial.get<std::string>(), initial_modes);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  } else if (initial.is_array()) {
    std::vector<double> c;
    for (const json &x : initial) {
      if (!x.is_number())
        throw ConfigError("'initial' coefficients must be numbers");
      c.push_back(x.get<double>());
    }
    s.model.initial = SpectralVector(std::move(c));
  } else {
    throw ConfigError("'initial' must be a preset name or a coefficient array");
  }

  s.paths = get_count(study, "paths", s.paths);
  s.seed = get<std::uint64_t>(study, "seed", s.seed);
  s.threads = unsigned(get_count(study, "threads", s.threads));
  s.exact_linear = get<bool>(study, "exact_linear", s.exact_linear);
  s.moment_order = get<double>(study, "moment_order", s.moment_order);
  s.moment_norm = get<double>(study, "moment_norm", s.moment_norm);
  cfg.moments = get<bool>(study, "moments", cfg.moments);
  cfg.simulate_path = std::uint32_t(get_count(study, "simulate_path", cfg.simulate_path));
  cfg.audit_trials = get_count(study, "audit_trials", cfg.audit_trials);
  cfg.audit_modes = get_count(study, "audit_modes", cfg.audit_modes);

  cfg.out_dir = get<std::string>(output, "dir", cfg.out_dir.string());
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_environment(RunConfig &cfg) {
  if (const char *seed = std::getenv("SPDE_SEED"); seed && *seed) {
    std::uint64_t v = 0;
    const char *end = seed + std::char_traits<char>::length(seed);
    const auto [ptr, ec] = std::from_chars(seed, end, v);
    if (ec != std::errc() || ptr != end)
      throw ConfigError(std::string("SPDE_SEED is not an unsigned integer: '") + seed + "'");
    cfg.study.seed = v;
  }
  if (const char *out = std::getenv("SPDE_OUT"); out && *out)
    cfg.out_dir = out;
}

} // namespace spde
