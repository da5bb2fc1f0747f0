#include "tubeflow/report.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tubeflow {

namespace {

using nlohmann::json;

const char* kind_name(DeformationKind kind) {
  switch (kind) {
    case DeformationKind::kConformal:
      return "conformal";
    case DeformationKind::kG00:
      return "g00";
    default:
      return "none";
  }
}

bool kind_from_name(const std::string& name, DeformationKind* out) {
  if (name == "conformal") {
    *out = DeformationKind::kConformal;
  } else if (name == "g00") {
    *out = DeformationKind::kG00;
  } else if (name == "none") {
    *out = DeformationKind::kNone;
  } else {
    return false;
  }
  return true;
}

// Field-by-field JSON reader that accumulates schema errors with dotted
// paths instead of throwing on the first problem.
class Reader {
 public:
  explicit Reader(std::vector<ConfigError>* errs) : errs_(errs) {}

  void unknown_keys(const json& j, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) {
        if (it.key() == a) {
          ok = true;
          break;
        }
      }
      if (!ok) push(prefix + it.key(), "unknown key");
    }
  }

  const json* object(const json& j, const char* key,
                     const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return nullptr;
    if (!it->is_object()) {
      push(path, "expected an object");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& j, const char* key, const std::string& path,
              double* out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number()) {
      push(path, "expected a number");
      return;
    }
    *out = it->get<double>();
  }

  void integer(const json& j, const char* key, const std::string& path,
               int* out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_integer()) {
      push(path, "expected an integer");
      return;
    }
    *out = it->get<int>();
  }

  void unsigned64(const json& j, const char* key, const std::string& path,
                  std::uint64_t* out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (it->is_number_unsigned()) {
      *out = it->get<std::uint64_t>();
    } else if (it->is_number_integer() && it->get<long long>() >= 0) {
      *out = static_cast<std::uint64_t>(it->get<long long>());
    } else {
      push(path, "expected a non-negative integer");
    }
  }

  void boolean(const json& j, const char* key, const std::string& path,
               bool* out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_boolean()) {
      push(path, "expected a boolean");
      return;
    }
    *out = it->get<bool>();
  }

  void text(const json& j, const char* key, const std::string& path,
            std::string* out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_string()) {
      push(path, "expected a string");
      return;
    }
    *out = it->get<std::string>();
  }

  void push(const std::string& path, const std::string& message) {
    errs_->push_back({path, message});
  }

 private:
  std::vector<ConfigError>* errs_;
};

ExperimentConfig read_config(const json& j, std::vector<ConfigError>* errs) {
  ExperimentConfig cfg;
  Reader r(errs);
  if (!j.is_object()) {
    r.push("", "top-level config must be an object");
    return cfg;
  }
  r.unknown_keys(j, "",
                 {"model", "deformation", "integration", "cones", "scan",
                  "output_dir", "seed", "threads", "use_simd"});

  if (const json* m = r.object(j, "model", "model")) {
    r.unknown_keys(*m, "model.", {"m", "r", "s", "period", "tube_radius"});
    r.integer(*m, "m", "model.m", &cfg.model.m);
    r.integer(*m, "r", "model.r", &cfg.model.r);
    r.integer(*m, "s", "model.s", &cfg.model.s);
    r.number(*m, "period", "model.period", &cfg.model.period);
    r.number(*m, "tube_radius", "model.tube_radius", &cfg.model.tube_radius);
  }
  if (const json* d = r.object(j, "deformation", "deformation")) {
    r.unknown_keys(*d, "deformation.", {"kind", "epsilon", "order"});
    std::string kind = kind_name(cfg.deformation.kind);
    r.text(*d, "kind", "deformation.kind", &kind);
    if (!kind_from_name(kind, &cfg.deformation.kind)) {
      r.push("deformation.kind", "expected one of conformal, g00, none");
    }
    r.number(*d, "epsilon", "deformation.epsilon", &cfg.deformation.epsilon);
    r.integer(*d, "order", "deformation.order", &cfg.deformation.order);
  }
  if (const json* i = r.object(j, "integration", "integration")) {
    r.unknown_keys(*i, "integration.",
                   {"step", "jacobi_horizon", "lyapunov_horizon",
                    "qr_interval"});
    r.number(*i, "step", "integration.step", &cfg.integration.step);
    r.number(*i, "jacobi_horizon", "integration.jacobi_horizon",
             &cfg.integration.jacobi_horizon);
    r.number(*i, "lyapunov_horizon", "integration.lyapunov_horizon",
             &cfg.integration.lyapunov_horizon);
    r.number(*i, "qr_interval", "integration.qr_interval",
             &cfg.integration.qr_interval);
  }
  if (const json* c = r.object(j, "cones", "cones")) {
    r.unknown_keys(*c, "cones.",
                   {"opening", "theta_threshold", "seeds_per_class",
                    "boundary_directions", "scan_horizon", "sample_stride"});
    r.number(*c, "opening", "cones.opening", &cfg.cones.opening);
    r.number(*c, "theta_threshold", "cones.theta_threshold",
             &cfg.cones.theta_threshold);
    r.integer(*c, "seeds_per_class", "cones.seeds_per_class",
              &cfg.cones.seeds_per_class);
    r.integer(*c, "boundary_directions", "cones.boundary_directions",
              &cfg.cones.boundary_directions);
    r.number(*c, "scan_horizon", "cones.scan_horizon",
             &cfg.cones.scan_horizon);
    r.integer(*c, "sample_stride", "cones.sample_stride",
              &cfg.cones.sample_stride);
  }
  if (const json* s = r.object(j, "scan", "scan")) {
    r.unknown_keys(*s, "scan.",
                   {"grid_per_axis", "t_samples", "random_planes",
                    "refine_grid"});
    r.integer(*s, "grid_per_axis", "scan.grid_per_axis",
              &cfg.scan.grid_per_axis);
    r.integer(*s, "t_samples", "scan.t_samples", &cfg.scan.t_samples);
    r.integer(*s, "random_planes", "scan.random_planes",
              &cfg.scan.random_planes);
    r.integer(*s, "refine_grid", "scan.refine_grid", &cfg.scan.refine_grid);
  }
  r.text(j, "output_dir", "output_dir", &cfg.output_dir);
  r.unsigned64(j, "seed", "seed", &cfg.seed);
  r.integer(j, "threads", "threads", &cfg.threads);
  r.boolean(j, "use_simd", "use_simd", &cfg.use_simd);
  return cfg;
}

std::string join_errors(const std::vector<ConfigError>& errs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    if (i) out << "; ";
    out << errs[i].path << ": " << errs[i].message;
  }
  return out.str();
}

}  // namespace

std::vector<ConfigError> ExperimentConfig::check() const {
  std::vector<ConfigError> errs;
  auto bad = [&](const char* path, const char* msg) {
    errs.push_back({path, msg});
  };
  if (model.m < 2 || 2 * model.m > kMaxDim) {
    bad("model.m", "must be at least 2 with 2m within the dimension cap");
  }
  if (model.r != 1) bad("model.r", "the flat family has rank one");
  if (model.s <= model.r || model.s >= 2 * model.m) {
    bad("model.s", "deformed slot must lie strictly between r and n");
  }
  if (!(model.period > 0.0)) bad("model.period", "must be positive");
  if (!(model.tube_radius > 0.0)) bad("model.tube_radius", "must be positive");

  if (!(deformation.epsilon > 0.0) ||
      deformation.epsilon >= model.tube_radius) {
    bad("deformation.epsilon", "must lie in (0, tube_radius)");
  }
  if (deformation.epsilon > 0.25) {
    bad("deformation.epsilon", "must be at most 0.25");
  }
  if (deformation.order < 2) bad("deformation.order", "must be at least 2");

  if (!(integration.step > 0.0) || integration.step > 0.01) {
    bad("integration.step", "must lie in (0, 0.01]");
  }
  if (!(integration.jacobi_horizon > 0.0)) {
    bad("integration.jacobi_horizon", "must be positive");
  }
  if (!(integration.lyapunov_horizon > 0.0)) {
    bad("integration.lyapunov_horizon", "must be positive");
  }
  if (integration.qr_interval < integration.step) {
    bad("integration.qr_interval", "must be at least the step");
  }

  if (!(cones.opening > 0.5) || !(cones.opening < 1.0)) {
    bad("cones.opening", "must lie in (0.5, 1)");
  }
  if (!(cones.theta_threshold > 0.0) || cones.theta_threshold > 0.5) {
    bad("cones.theta_threshold", "must lie in (0, 0.5]");
  }
  if (deformation.epsilon > cones.theta_threshold) {
    bad("cones.theta_threshold",
        "must be at least the deformation scale epsilon");
  }
  if (cones.seeds_per_class < 1) {
    bad("cones.seeds_per_class", "must be at least 1");
  }
  if (cones.boundary_directions < 1 || cones.boundary_directions > 4096) {
    bad("cones.boundary_directions", "must lie in [1, 4096]");
  }
  if (!(cones.scan_horizon > 0.0)) {
    bad("cones.scan_horizon", "must be positive");
  }
  if (cones.sample_stride < 1) {
    bad("cones.sample_stride", "must be at least 1");
  }

  if (scan.grid_per_axis < 5 || scan.grid_per_axis % 2 == 0) {
    bad("scan.grid_per_axis", "must be odd and at least 5");
  }
  if (scan.t_samples < 1) bad("scan.t_samples", "must be at least 1");
  if (scan.random_planes < 0) {
    bad("scan.random_planes", "must be non-negative");
  }
  if (scan.refine_grid < 5 || scan.refine_grid % 2 == 0) {
    bad("scan.refine_grid", "must be odd and at least 5");
  }

  if (output_dir.empty()) bad("output_dir", "must be non-empty");
  if (threads < 1) bad("threads", "must be at least 1");
  return errs;
}

void ExperimentConfig::validate() const {
  std::vector<ConfigError> errs = check();
  if (!errs.empty()) {
    throw std::invalid_argument("invalid config: " + join_errors(errs));
  }
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  std::vector<ConfigError> errs;
  ExperimentConfig cfg = read_config(j, &errs);
  if (errs.empty()) {
    std::vector<ConfigError> constraint = cfg.check();
    errs.insert(errs.end(), constraint.begin(), constraint.end());
  }
  if (!errs.empty()) {
    throw std::invalid_argument("invalid config: " + join_errors(errs));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = {{"m", cfg.model.m},
                {"r", cfg.model.r},
                {"s", cfg.model.s},
                {"period", cfg.model.period},
                {"tube_radius", cfg.model.tube_radius}};
  j["deformation"] = {{"kind", kind_name(cfg.deformation.kind)},
                      {"epsilon", cfg.deformation.epsilon},
                      {"order", cfg.deformation.order}};
  j["integration"] = {{"step", cfg.integration.step},
                      {"jacobi_horizon", cfg.integration.jacobi_horizon},
                      {"lyapunov_horizon", cfg.integration.lyapunov_horizon},
                      {"qr_interval", cfg.integration.qr_interval}};
  j["cones"] = {{"opening", cfg.cones.opening},
                {"theta_threshold", cfg.cones.theta_threshold},
                {"seeds_per_class", cfg.cones.seeds_per_class},
                {"boundary_directions", cfg.cones.boundary_directions},
                {"scan_horizon", cfg.cones.scan_horizon},
                {"sample_stride", cfg.cones.sample_stride}};
  j["scan"] = {{"grid_per_axis", cfg.scan.grid_per_axis},
               {"t_samples", cfg.scan.t_samples},
               {"random_planes", cfg.scan.random_planes},
               {"refine_grid", cfg.scan.refine_grid}};
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["use_simd"] = cfg.use_simd;
  return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("config: cannot write " + path);
  }
  out << config_to_json(cfg);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::string dump = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// --- Results -----------------------------------------------------------------

bool RunSummary::pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string summary_to_json(const RunSummary& summary) {
  json j;
  j["command"] = summary.command;
  j["version"] = summary.version;
  j["config_fingerprint"] = summary.config_fingerprint;
  j["seed"] = summary.seed;
  j["timestamp"] = summary.timestamp;
  j["pass"] = summary.pass();
  json checks = json::array();
  for (const CheckResult& c : summary.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  json metrics = json::object();
  for (const auto& [k, v] : summary.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

void write_summary(const RunSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("summary: cannot write " + path);
  }
  out << summary_to_json(summary);
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("csv: cannot write " + path);
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf;
    }
    out << '\n';
  }
}

std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

bool ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  return std::filesystem::is_directory(path);
}

}  // namespace tubeflow
