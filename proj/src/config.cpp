#include "ssir/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ssir {

namespace {

constexpr std::string_view kPresetEx1 = R"(# Extinction example: ratio incidence with c = 1, m = 1.
[model]
a1 = 3
b1 = 1
b2 = 1
sigma1 = 1
sigma2 = 1

[incidence]
kind = ratio_example
c = 1
m = 1

[experiment]
name = ex1
mode = replicate
horizon = 200
dt = 0.001
n_paths = 200
master_seed = 1001
burn_in = 100
store_stride = 100
output_dir = out/ex1

[initial]
s = 3
i = 1
)";

constexpr std::string_view kPresetEx2 = R"(# Permanence example: ratio incidence with c = 6, m = 1.
[model]
a1 = 10
b1 = 1
b2 = 1
sigma1 = 1
sigma2 = 1

[incidence]
kind = ratio_example
c = 6
m = 1

[experiment]
name = ex2
mode = replicate
horizon = 500
dt = 0.001
n_paths = 200
master_seed = 1002
burn_in = 100
store_stride = 100
output_dir = out/ex2

[initial]
s = 5
i = 2

[initial2]
s = 15
i = 0.5
)";

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry, std::less<>>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::map<std::string, Section, std::less<>> parse_sections(std::string_view text) {
  std::map<std::string, Section, std::less<>> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string content = trim(std::string_view(raw).substr(0, comment));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError("unterminated section header", content, line);
      current = trim(std::string_view(content).substr(1, content.size() - 2));
      if (current.empty()) throw ConfigError("empty section name", content, line);
      if (sections.contains(current)) throw ConfigError("duplicate section [" + current + "]", current, line);
      sections[current];
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", content, line);
    if (current.empty()) throw ConfigError("key outside of any section", content, line);
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", content, line);
    const std::string field = "[" + current + "] " + key;
    if (value.empty()) throw ConfigError("empty value for " + field, field, line);
    auto& section = sections[current];
    if (section.contains(key)) throw ConfigError("duplicate field " + field, field, line);
    section[key] = {value, line};
  }
  return sections;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section, std::less<>> sections) : sections_(std::move(sections)) {}

  bool has_section(std::string_view name) const { return sections_.contains(name); }

  const Entry* find(std::string_view section, std::string_view key) {
    used_.insert(std::string(section) + "." + std::string(key));
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  const Entry& require(std::string_view section, std::string_view key) {
    const Entry* e = find(section, key);
    if (!e) {
      const std::string field = field_name(section, key);
      throw ConfigError("missing required field " + field, field);
    }
    return *e;
  }

  double number(std::string_view section, std::string_view key, const Entry& e) const {
    double v = 0.0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      const std::string field = field_name(section, key);
      throw ConfigError("field " + field + ": cannot parse '" + e.value + "' as a number", field, e.line);
    }
    return v;
  }

  std::uint64_t integer(std::string_view section, std::string_view key, const Entry& e) const {
    std::uint64_t v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      const std::string field = field_name(section, key);
      throw ConfigError("field " + field + ": cannot parse '" + e.value + "' as a non-negative integer", field,
                        e.line);
    }
    return v;
  }

  double required_number(std::string_view section, std::string_view key) {
    return number(section, key, require(section, key));
  }

  template <class T>
  void optional_number(std::string_view section, std::string_view key, T& out) {
    if (const Entry* e = find(section, key)) out = static_cast<T>(number(section, key, *e));
  }

  template <class T>
  void optional_integer(std::string_view section, std::string_view key, T& out) {
    if (const Entry* e = find(section, key)) out = static_cast<T>(integer(section, key, *e));
  }

  /// Every key not consumed so far; the incidence section is open-ended and
  /// is read wholesale by the caller.
  void reject_unknown(std::string_view open_section) const {
    for (const auto& [name, section] : sections_) {
      if (name == open_section) continue;
      if (name != "model" && name != "experiment" && name != "initial" && name != "initial2") {
        throw ConfigError("unknown section [" + name + "]", name,
                          section.empty() ? 0 : section.begin()->second.line);
      }
      for (const auto& [key, entry] : section) {
        if (!used_.contains(name + "." + key)) {
          const std::string field = field_name(name, key);
          throw ConfigError("unknown field " + field, field, entry.line);
        }
      }
    }
  }

  const Section* section(std::string_view name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
  }

  static std::string field_name(std::string_view section, std::string_view key) {
    return "[" + std::string(section) + "] " + std::string(key);
  }

 private:
  std::map<std::string, Section, std::less<>> sections_;
  std::set<std::string> used_;
};

Mode parse_mode(const Entry& e) {
  for (auto m : {Mode::threshold, Mode::simulate, Mode::classify, Mode::replicate}) {
    if (to_string(m) == e.value) return m;
  }
  throw ConfigError("field [experiment] mode: unknown mode '" + e.value + "'", "[experiment] mode", e.line);
}

void check_field(bool ok, const char* section, const char* key, const char* requirement) {
  if (!ok) {
    const std::string field = Reader::field_name(section, key);
    throw ConfigError("field " + field + " " + requirement, field);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string field, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      field_(std::move(field)),
      line_(line) {}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::threshold: return "threshold";
    case Mode::simulate: return "simulate";
    case Mode::classify: return "classify";
    case Mode::replicate: return "replicate";
  }
  return "classify";
}

ExperimentConfig parse_config(std::string_view text) {
  Reader r(parse_sections(text));
  ExperimentConfig cfg;

  cfg.params.a1 = r.required_number("model", "a1");
  cfg.params.b1 = r.required_number("model", "b1");
  cfg.params.b2 = r.required_number("model", "b2");
  cfg.params.sigma1 = r.required_number("model", "sigma1");
  cfg.params.sigma2 = r.required_number("model", "sigma2");
  try {
    validate(cfg.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "[model]");
  }

  const Entry& kind = r.require("incidence", "kind");
  try {
    cfg.incidence_kind = parse_incidence_kind(kind.value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "[incidence] kind", kind.line);
  }
  if (cfg.incidence_kind == IncidenceKind::custom) {
    throw ConfigError("custom incidence cannot be declared in a config file", "[incidence] kind", kind.line);
  }
  for (const auto& [key, entry] : *r.section("incidence")) {
    if (key == "kind") continue;
    cfg.coefficients[key] = r.number("incidence", key, entry);
  }

  cfg.master_seed = r.integer("experiment", "master_seed", r.require("experiment", "master_seed"));
  if (const Entry* e = r.find("experiment", "mode")) cfg.mode = parse_mode(*e);
  if (const Entry* e = r.find("experiment", "name")) cfg.name = e->value;
  if (const Entry* e = r.find("experiment", "output_dir")) cfg.output_dir = e->value;
  double horizon = 0.0;
  if (r.find("experiment", "horizon")) {
    r.optional_number("experiment", "horizon", horizon);
    cfg.horizon = horizon;
  }
  r.optional_number("experiment", "dt", cfg.dt);
  r.optional_integer("experiment", "n_paths", cfg.n_paths);
  r.optional_number("experiment", "burn_in", cfg.burn_in);
  r.optional_integer("experiment", "store_stride", cfg.store_stride);
  r.optional_number("experiment", "window", cfg.window);
  r.optional_integer("experiment", "threads", cfg.threads);
  r.optional_integer("experiment", "mc_samples", cfg.mc_samples);
  r.optional_number("experiment", "quad_tol", cfg.quad_tol);

  cfg.initial.s = r.required_number("initial", "s");
  cfg.initial.i = r.required_number("initial", "i");
  if (r.has_section("initial2")) {
    cfg.initial2 = State{r.required_number("initial2", "s"), r.required_number("initial2", "i")};
  }
  r.reject_unknown("incidence");

  check_field(cfg.dt > 0.0, "experiment", "dt", "must be positive");
  if (cfg.horizon) check_field(*cfg.horizon >= cfg.dt, "experiment", "horizon", "must be at least dt");
  check_field(cfg.n_paths >= 1, "experiment", "n_paths", "must be at least 1");
  check_field(cfg.burn_in >= 0.0, "experiment", "burn_in", "must be non-negative");
  if (cfg.horizon) check_field(cfg.burn_in < *cfg.horizon, "experiment", "burn_in", "must be below horizon");
  check_field(cfg.store_stride >= 1, "experiment", "store_stride", "must be at least 1");
  check_field(cfg.window > 0.0 && cfg.window < 1.0, "experiment", "window", "must lie in (0, 1)");
  check_field(cfg.quad_tol > 0.0, "experiment", "quad_tol", "must be positive");
  check_field(cfg.initial.s > 0.0, "initial", "s", "must be positive");
  check_field(cfg.initial.i > 0.0, "initial", "i", "must be positive");
  if (cfg.initial2) {
    check_field(cfg.initial2->s > 0.0, "initial2", "s", "must be positive");
    check_field(cfg.initial2->i > 0.0, "initial2", "i", "must be positive");
  }
  // Surface coefficient problems as config errors.
  build_incidence(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string(), file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

IncidenceModel build_incidence(const ExperimentConfig& config) {
  try {
    return make_catalog_incidence(config.incidence_kind, config.coefficients);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "[incidence]");
  }
}

std::string_view preset_text(std::string_view example_id) {
  if (example_id == "ex1") return kPresetEx1;
  if (example_id == "ex2") return kPresetEx2;
  throw ConfigError("unknown example id '" + std::string(example_id) + "' (expected ex1 or ex2)", "example_id");
}

}  // namespace ssir
