#include "kpplab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "kpplab/error.hpp"

namespace kpplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"seed"}},
      {"habitat", {"kind", "dim", "L", "h", "boundary"}},
      {"reaction", {"family", "r0", "b", "K", "A", "L0"}},
      {"dispersal", {"kind", "profile", "delta0", "rates"}},
      {"solver", {"scheme", "dt", "T", "record_interval"}},
      {"experiment",
       {"name", "direction", "angle", "level", "burn_in", "margin", "speed_factor", "tolerance",
        "amplitudes", "clause", "plateau_radius", "tail_radius", "mu_max", "mu_points", "expect"}},
      {"output", {"directory", "formats"}},
  };
  return s;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& path, const std::string& what) {
  std::ostringstream msg;
  msg << source;
  if (line > 0) msg << ":" << line;
  msg << ": " << path << ": " << what;
  throw Error(ErrorKind::config, msg.str());
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  const IniEntry* find(const std::string& section, const std::string& key) const {
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  void require_section(const std::string& section, const std::string& first_key) const {
    if (!doc_.has(section)) fail(doc_.source, 0, section + "." + first_key, "missing [" + section + "] block");
  }

  std::string text(const std::string& section, const std::string& key, std::optional<std::string> fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) {
      if (!fallback) fail(doc_.source, section_line(section), path(section, key), "required key missing");
      return *fallback;
    }
    return e->value;
  }

  double number(const std::string& section, const std::string& key, std::optional<double> fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) {
      if (!fallback) fail(doc_.source, section_line(section), path(section, key), "required key missing");
      return *fallback;
    }
    return parse_number(*e, section, key);
  }

  long integer(const std::string& section, const std::string& key, std::optional<long> fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) {
      if (!fallback) fail(doc_.source, section_line(section), path(section, key), "required key missing");
      return *fallback;
    }
    char* end = nullptr;
    const long v = std::strtol(e->value.c_str(), &end, 10);
    if (e->value.empty() || *end != '\0') fail(doc_.source, e->line, path(section, key), "expected an integer, got '" + e->value + "'");
    return v;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key,
                              std::optional<std::vector<double>> fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) {
      if (!fallback) fail(doc_.source, section_line(section), path(section, key), "required key missing");
      return *fallback;
    }
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      IniEntry part{trim(item), e->line};
      out.push_back(parse_number(part, section, key));
    }
    if (out.empty()) fail(doc_.source, e->line, path(section, key), "empty list");
    return out;
  }

  int line(const std::string& section, const std::string& key) const {
    const IniEntry* e = find(section, key);
    return e ? e->line : section_line(section);
  }

  [[noreturn]] void error(const std::string& section, const std::string& key, const std::string& what) const {
    fail(doc_.source, line(section, key), path(section, key), what);
  }

 private:
  static std::string path(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  int section_line(const std::string& section) const {
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end() || s->second.empty()) return 0;
    int first = 0;
    for (const auto& [k, e] : s->second) first = first == 0 ? e.line : std::min(first, e.line);
    return first;
  }

  double parse_number(const IniEntry& e, const std::string& section, const std::string& key) const {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (e.value.empty() || *end != '\0' || !std::isfinite(v))
      fail(doc_.source, e.line, path(section, key), "expected a finite number, got '" + e.value + "'");
    return v;
  }

  const IniDocument& doc_;
};

template <class Enum>
Enum choose(const Reader& rd, const std::string& section, const std::string& key, const std::string& value,
            const std::vector<std::pair<std::string, Enum>>& options) {
  for (const auto& [name, e] : options)
    if (lower(value) == name) return e;
  std::string list;
  for (const auto& [name, e] : options) list += (list.empty() ? "" : ", ") + name;
  rd.error(section, key, "unknown value '" + value + "' (expected one of " + list + ")");
}

}  // namespace

IniDocument parse_ini(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source = source;
  doc.sections[""];
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(source, line, "[" + section + "]", "unterminated section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (!schema().count(section) || section.empty()) fail(source, line, section, "unknown section");
      if (doc.sections.count(section) && !doc.sections[section].empty())
        fail(source, line, section, "duplicate section");
      doc.sections[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(source, line, section.empty() ? "<top>" : section, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    if (key.empty()) fail(source, line, path, "empty key");
    if (!schema().at(section).count(key)) fail(source, line, path, "unknown key");
    auto& sec = doc.sections[section];
    if (sec.count(key)) fail(source, line, path, "duplicate key (first on line " + std::to_string(sec[key].line) + ")");
    sec[key] = IniEntry{value, line};
  }
  return doc;
}

void apply_env_overrides(IniDocument& doc) {
  for (const auto& [section, keys] : schema()) {
    for (const std::string& key : keys) {
      const std::string name = section.empty() ? "KPPLAB_" + upper(key) : "KPPLAB_" + upper(section) + "_" + upper(key);
      if (const char* v = std::getenv(name.c_str())) {
        auto& sec = doc.sections[section];
        const int line = sec.count(key) ? sec[key].line : 0;
        sec[key] = IniEntry{trim(v), line};
      }
    }
  }
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::front_speed: return "front_speed";
    case ExperimentKind::inhomogeneity_sweep: return "inhomogeneity_sweep";
    case ExperimentKind::spreading_clause: return "spreading_clause";
    case ExperimentKind::stationary: return "stationary";
    case ExperimentKind::dispersion_curve: return "dispersion_curve";
  }
  return "?";
}

std::vector<std::string> experiment_names() {
  return {"front_speed", "inhomogeneity_sweep", "spreading_clause", "stationary", "dispersion_curve"};
}

ExperimentSetup RunConfig::setup() const {
  ExperimentSetup s;
  s.op = op;
  s.habitat = habitat;
  s.reaction = reaction;
  s.xi = experiment.xi;
  s.T = T;
  s.dt = dt;
  s.record_interval = record_interval;
  s.level_fraction = experiment.level_fraction;
  s.burn_in = experiment.burn_in;
  s.margin = experiment.margin;
  s.plateau_radius = experiment.plateau_radius;
  return s;
}

RunConfig build_config(const IniDocument& doc) {
  Reader rd(doc);
  RunConfig cfg;
  cfg.source = doc.source;
  cfg.text = render_config(doc);
  const long seed = rd.integer("", "seed", 0);
  if (seed < 0) rd.error("", "seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  rd.require_section("habitat", "kind");
  const auto hk = choose<HabitatKind>(rd, "habitat", "kind", rd.text("habitat", "kind", "continuum"),
                                      {{"continuum", HabitatKind::continuum}, {"lattice", HabitatKind::lattice}});
  const long dim = rd.integer("habitat", "dim", 1);
  if (dim < 1 || dim > kMaxDim) rd.error("habitat", "dim", "must be 1 or 2");
  const double L = rd.number("habitat", "L", std::nullopt);
  if (!(L > 0.0)) rd.error("habitat", "L", "must be positive");
  const auto boundary = choose<Boundary>(rd, "habitat", "boundary", rd.text("habitat", "boundary", "clamp"),
                                         {{"clamp", Boundary::clamp}, {"periodic", Boundary::periodic}});
  try {
    if (hk == HabitatKind::lattice) {
      if (L != std::floor(L)) rd.error("habitat", "L", "lattice half extent must be an integer");
      cfg.habitat = Habitat::lattice(static_cast<int>(dim), static_cast<int>(L), boundary);
    } else {
      const double h = rd.number("habitat", "h", std::nullopt);
      if (!(h > 0.0)) rd.error("habitat", "h", "must be positive");
      cfg.habitat = Habitat::continuum(static_cast<int>(dim), L, h, boundary);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    rd.error("habitat", "h", e.what());
  }

  rd.require_section("reaction", "family");
  const auto family = choose<GrowthFamily>(rd, "reaction", "family", rd.text("reaction", "family", "linear"),
                                           {{"linear", GrowthFamily::linear}, {"logistic", GrowthFamily::logistic}});
  const double r0 = rd.number("reaction", "r0", 1.0);
  const double A = rd.number("reaction", "A", 0.0);
  const double L0 = rd.number("reaction", "L0", 1.0);
  if (!(L0 > 0.0)) rd.error("reaction", "L0", "must be positive");
  try {
    if (family == GrowthFamily::linear) {
      const double b = rd.number("reaction", "b", 1.0);
      if (!(b > 0.0)) rd.error("reaction", "b", "must be positive");
      cfg.reaction = Reaction::linear(r0, b, A, L0);
    } else {
      const double K = rd.number("reaction", "K", 1.0);
      if (!(K > 0.0)) rd.error("reaction", "K", "must be positive");
      cfg.reaction = Reaction::logistic(r0, K, A, L0);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    rd.error("reaction", "r0", e.what());
  }

  rd.require_section("dispersal", "kind");
  const auto dk = choose<DispersalKind>(rd, "dispersal", "kind", rd.text("dispersal", "kind", std::nullopt),
                                        {{"random", DispersalKind::random},
                                         {"nonlocal", DispersalKind::nonlocal},
                                         {"discrete", DispersalKind::discrete}});
  try {
    switch (dk) {
      case DispersalKind::random: cfg.op = DispersalOp::random(); break;
      case DispersalKind::nonlocal: {
        const auto profile = choose<KernelProfile>(
            rd, "dispersal", "profile", rd.text("dispersal", "profile", "tent"),
            {{"uniform", KernelProfile::uniform}, {"tent", KernelProfile::tent}, {"smooth", KernelProfile::smooth}});
        const double delta0 = rd.number("dispersal", "delta0", 1.0);
        if (!(delta0 > 0.0)) rd.error("dispersal", "delta0", "must be positive");
        cfg.op = DispersalOp::nonlocal(Kernel(profile, delta0, cfg.habitat.dim(), cfg.habitat.spacing()));
        break;
      }
      case DispersalKind::discrete: {
        std::vector<double> rates = rd.numbers("dispersal", "rates", std::vector<double>{1.0});
        if (rates.size() == 1) rates.assign(2 * cfg.habitat.dim(), rates[0]);
        if (rates.size() != static_cast<std::size_t>(2 * cfg.habitat.dim()))
          rd.error("dispersal", "rates", "expected 1 or 2*dim rates");
        cfg.op = DispersalOp::discrete(LatticeWeights(rates));
        break;
      }
    }
    cfg.op.check_habitat(cfg.habitat);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    rd.error("dispersal", "kind", e.what());
  }

  rd.require_section("solver", "T");
  cfg.scheme = choose<Scheme>(rd, "solver", "scheme", rd.text("solver", "scheme", "rk4"),
                              {{"rk4", Scheme::rk4}, {"euler", Scheme::explicit_euler}});
  cfg.T = rd.number("solver", "T", std::nullopt);
  if (!(cfg.T > 0.0)) rd.error("solver", "T", "must be positive");
  cfg.dt = rd.number("solver", "dt", 0.0);
  if (cfg.dt < 0.0) rd.error("solver", "dt", "must be positive (or 0 for the stability bound)");
  cfg.record_interval = rd.number("solver", "record_interval", 0.5);
  if (!(cfg.record_interval > 0.0)) rd.error("solver", "record_interval", "must be positive");
  if (cfg.dt > 0.0) {
    const double u_max = std::max(cfg.reaction.beta0(), 1.0) + 1.0;
    const double bound = stable_step_bound(cfg.op, cfg.habitat, cfg.reaction, u_max);
    if (cfg.dt > bound) {
      std::ostringstream msg;
      msg << "dt = " << cfg.dt << " exceeds the stability bound " << bound;
      rd.error("solver", "dt", msg.str());
    }
  }

  rd.require_section("experiment", "name");
  ExperimentConfig& ex = cfg.experiment;
  ex.kind = choose<ExperimentKind>(rd, "experiment", "name", rd.text("experiment", "name", std::nullopt),
                                   {{"front_speed", ExperimentKind::front_speed},
                                    {"inhomogeneity_sweep", ExperimentKind::inhomogeneity_sweep},
                                    {"spreading_clause", ExperimentKind::spreading_clause},
                                    {"stationary", ExperimentKind::stationary},
                                    {"dispersion_curve", ExperimentKind::dispersion_curve}});
  if (rd.find("experiment", "angle")) {
    if (cfg.habitat.dim() != 2) rd.error("experiment", "angle", "only valid in 2-D");
    ex.xi = Direction::angle(rd.number("experiment", "angle", std::nullopt));
  } else {
    std::vector<double> d(cfg.habitat.dim(), 0.0);
    d[0] = 1.0;
    d = rd.numbers("experiment", "direction", d);
    if (d.size() != static_cast<std::size_t>(cfg.habitat.dim()))
      rd.error("experiment", "direction", "needs habitat.dim components");
    try {
      ex.xi = Direction::of(d);
    } catch (const Error& e) {
      rd.error("experiment", "direction", e.what());
    }
  }
  ex.level_fraction = rd.number("experiment", "level", 0.5);
  if (!(ex.level_fraction > 0.0 && ex.level_fraction < 0.9)) rd.error("experiment", "level", "must lie in (0, 0.9)");
  ex.burn_in = rd.number("experiment", "burn_in", 0.5);
  if (!(ex.burn_in >= 0.0 && ex.burn_in < 1.0)) rd.error("experiment", "burn_in", "must lie in [0, 1)");
  ex.margin = rd.number("experiment", "margin", 0.2);
  if (!(ex.margin > 0.0 && ex.margin < 1.0)) rd.error("experiment", "margin", "must lie in (0, 1)");
  ex.speed_factor = rd.number("experiment", "speed_factor", 1.0);
  if (!(ex.speed_factor > 0.0)) rd.error("experiment", "speed_factor", "must be positive");
  ex.tolerance = rd.number("experiment", "tolerance", 0.05);
  if (!(ex.tolerance > 0.0)) rd.error("experiment", "tolerance", "must be positive");
  ex.amplitudes = rd.numbers("experiment", "amplitudes", ex.amplitudes);
  ex.clause = static_cast<int>(rd.integer("experiment", "clause", 1));
  if (ex.clause < 1 || ex.clause > 4) rd.error("experiment", "clause", "must be 1, 2, 3 or 4");
  ex.plateau_radius = rd.number("experiment", "plateau_radius", 5.0);
  if (!(ex.plateau_radius > 0.0)) rd.error("experiment", "plateau_radius", "must be positive");
  ex.tail_radius = rd.number("experiment", "tail_radius", 0.0);
  if (ex.tail_radius < 0.0) rd.error("experiment", "tail_radius", "must be nonnegative");
  ex.mu_max = rd.number("experiment", "mu_max", 20.0);
  if (!(ex.mu_max > 0.0)) rd.error("experiment", "mu_max", "must be positive");
  ex.mu_points = static_cast<int>(rd.integer("experiment", "mu_points", 200));
  if (ex.mu_points < 2) rd.error("experiment", "mu_points", "must be at least 2");
  ex.expect = choose<Expectation>(rd, "experiment", "expect", rd.text("experiment", "expect", "pass"),
                                  {{"pass", Expectation::pass}, {"fail", Expectation::fail}});

  cfg.output.directory = rd.text("output", "directory", cfg.output.directory);
  if (cfg.output.directory.empty()) rd.error("output", "directory", "must not be empty");
  if (const IniEntry* f = rd.find("output", "formats")) {
    cfg.output.csv = cfg.output.json = cfg.output.trajectory = false;
    std::stringstream ss(f->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string fmt = lower(trim(item));
      if (fmt == "csv") cfg.output.csv = true;
      else if (fmt == "json") cfg.output.json = true;
      else if (fmt == "trajectory") cfg.output.trajectory = true;
      else rd.error("output", "formats", "unknown format '" + fmt + "'");
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  return build_config(parse_ini(text, source));
}

RunConfig load_config(const std::string& path, bool env_overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  IniDocument doc = parse_ini(buf.str(), path);
  if (env_overrides) apply_env_overrides(doc);
  return build_config(doc);
}

std::string render_config(const IniDocument& doc) {
  std::ostringstream out;
  for (const auto& [section, keys] : doc.sections) {
    if (keys.empty()) continue;
    if (!section.empty()) out << "[" << section << "]\n";
    for (const auto& [k, e] : keys) out << k << " = " << e.value << "\n";
    out << "\n";
  }
  return out.str();
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kpplab
