/*
 Copyright 2026 The ompath Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "ompath/cli/config.hpp"

#include "ompath/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ompath::cli {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

[[noreturn]] void parse_error(int line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw Error(ErrorCode::kParseError, os.str());
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kValidationError, msg); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string> kSections = {"system", "problem", "solver", "mc", "output", "geometry"};

const std::map<std::string, std::vector<std::string>> kKeys = {
    {"", {"command"}},
    {"system",
     {"kind", "sigma", "gamma", "epsilon", "D", "N0", "a", "b", "alpha", "c", "d", "D1", "beta", "D2",
      "dim", "drift_matrix", "drift_offset", "diffusion"}},
    {"problem", {"x0", "x_target", "t0", "tf", "terminal_weight"}},
    {"solver",
     {"n_nodes", "max_iterations", "damping_eta", "cost_tolerance", "stationarity_tolerance",
      "initial_control"}},
    {"mc",
     {"dt", "delta", "attempts", "trials", "tube_delta", "seed", "reference", "store_nodes",
      "threads"}},
    {"output", {"directory", "formats"}},
    {"geometry", {"points"}},
};

const std::map<SystemKind, std::set<std::string>> kSystemKeys = {
    {SystemKind::kDoubleWell, {"kind", "sigma"}},
    {SystemKind::kMaierStein, {"kind", "gamma", "epsilon"}},
    {SystemKind::kNpz,
     {"kind", "sigma", "D", "N0", "a", "b", "alpha", "c", "d", "D1", "beta", "D2"}},
    {SystemKind::kCustom, {"kind", "dim", "drift_matrix", "drift_offset", "diffusion"}},
};

std::optional<SystemKind> kind_from_string(std::string_view s) {
  if (s == "double_well") return SystemKind::kDoubleWell;
  if (s == "maier_stein") return SystemKind::kMaierStein;
  if (s == "npz") return SystemKind::kNpz;
  if (s == "custom") return SystemKind::kCustom;
  return std::nullopt;
}

double parse_double(std::string_view text, int line, const std::string& field) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_error(line, field + ": '" + std::string(text) + "' is not a number");
  }
  if (!std::isfinite(v)) invalid(field + " must be finite");
  return v;
}

template <class Int>
Int parse_int(std::string_view text, int line, const std::string& field) {
  text = trim(text);
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    parse_error(line, field + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, std::string_view separators) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find_first_of(separators, pos);
    const auto piece = trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

Vector parse_vector(std::string_view text, int line, const std::string& field) {
  const auto parts = split(text, ", \t");
  if (parts.empty()) parse_error(line, field + ": empty vector");
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i], line, field);
  return v;
}

std::vector<Vector> parse_rows(std::string_view text, int line, const std::string& field) {
  std::vector<Vector> rows;
  for (auto row : split(text, ";")) rows.push_back(parse_vector(row, line, field));
  if (rows.empty()) parse_error(line, field + ": no rows");
  return rows;
}

Matrix parse_matrix(std::string_view text, int line, const std::string& field) {
  const auto rows = parse_rows(text, line, field);
  const auto cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) invalid(field + ": rows have different lengths");
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return m;
}

std::string join(const Vector& v, const char* sep = ", ") {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::string join_rows(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    out += join(m.row(i).transpose());
  }
  return out;
}

// Parsed text with default bookkeeping.
class Source {
 public:
  Source(std::map<std::string, Section> sections, std::vector<std::string>& defaults)
      : sections_(std::move(sections)), defaults_(defaults) {}

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.entries.find(key);
    return e == s->second.entries.end() ? nullptr : &e->second;
  }

  static std::string field(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  void note_default(const std::string& section, const std::string& key, const std::string& value) {
    defaults_.push_back(field(section, key) + " = " + value);
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    if (const Entry* e = find(section, key)) return parse_double(e->value, e->line, field(section, key));
    note_default(section, key, format_double(fallback));
    return fallback;
  }

  template <class Int>
  Int integer(const std::string& section, const std::string& key, Int fallback) {
    if (const Entry* e = find(section, key)) return parse_int<Int>(e->value, e->line, field(section, key));
    note_default(section, key, std::to_string(fallback));
    return fallback;
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) {
    if (const Entry* e = find(section, key)) return e->value;
    note_default(section, key, fallback);
    return fallback;
  }

  Vector required_vector(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) invalid("missing required field " + field(section, key));
    return parse_vector(e->value, e->line, field(section, key));
  }

  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  std::map<std::string, Section> sections_;
  std::vector<std::string>& defaults_;
};

std::map<std::string, Section> tokenize(std::string_view text) {
  std::map<std::string, Section> sections;
  sections[""].line = 0;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_error(line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
        std::ostringstream os;
        os << "line " << line_no << ": unknown section [" << name << "]";
        if (auto s = nearest_key(name, kSections)) os << "; did you mean [" << *s << "]?";
        invalid(os.str());
      }
      if (sections.count(name)) {
        std::ostringstream os;
        os << "line " << line_no << ": section [" << name << "] appears twice";
        invalid(os.str());
      }
      sections[name].line = line_no;
      current = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_error(line_no, "missing key before '='");
    if (value.empty()) parse_error(line_no, "missing value for '" + key + "'");

    const auto& known = kKeys.at(current);
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      std::ostringstream os;
      os << "line " << line_no << ": unknown key '" << key << "'";
      os << (current.empty() ? std::string(" at top level") : " in [" + current + "]");
      if (auto s = nearest_key(key, known)) os << "; did you mean '" << *s << "'?";
      invalid(os.str());
    }
    auto& entries = sections[current].entries;
    if (entries.count(key)) {
      std::ostringstream os;
      os << "line " << line_no << ": '" << key << "' is set twice";
      invalid(os.str());
    }
    entries[key] = Entry{value, line_no};
  }
  return sections;
}

int system_dim(const SystemBlock& s) {
  switch (s.kind) {
    case SystemKind::kDoubleWell: return 1;
    case SystemKind::kMaierStein: return 2;
    case SystemKind::kNpz: return 3;
    case SystemKind::kCustom: return s.dim;
  }
  return 0;
}

void read_system(Source& src, SystemBlock& s) {
  if (!src.has_section("system")) invalid("missing required section [system]");
  const Entry* kind = src.find("system", "kind");
  if (!kind) invalid("missing required field system.kind");
  const auto parsed = kind_from_string(kind->value);
  if (!parsed) {
    std::ostringstream os;
    os << "line " << kind->line << ": system.kind '" << kind->value
       << "' is not one of double_well, maier_stein, npz, custom";
    invalid(os.str());
  }
  s.kind = *parsed;
  const auto& allowed = kSystemKeys.at(s.kind);
  for (const auto& [key, entry] : src.sections().at("system").entries) {
    if (!allowed.count(key)) {
      std::ostringstream os;
      os << "line " << entry.line << ": system." << key << " does not apply to kind "
         << to_string(s.kind);
      invalid(os.str());
    }
  }

  switch (s.kind) {
    case SystemKind::kDoubleWell:
      s.sigma = src.number("system", "sigma", 1.0);
      if (!(s.sigma > 0.0)) invalid("system.sigma must be positive");
      break;
    case SystemKind::kMaierStein:
      s.gamma = src.number("system", "gamma", 1.0);
      s.epsilon = src.number("system", "epsilon", 0.1);
      if (s.epsilon < 0.0) invalid("system.epsilon must be nonnegative");
      break;
    case SystemKind::kNpz: {
      NpzParams& p = s.npz;
      p.D = src.number("system", "D", p.D);
      p.N0 = src.number("system", "N0", p.N0);
      p.a = src.number("system", "a", p.a);
      p.b = src.number("system", "b", p.b);
      p.alpha = src.number("system", "alpha", p.alpha);
      p.c = src.number("system", "c", p.c);
      p.d = src.number("system", "d", p.d);
      p.D1 = src.number("system", "D1", p.D1);
      p.beta = src.number("system", "beta", p.beta);
      p.D2 = src.number("system", "D2", p.D2);
      if (const Entry* e = src.find("system", "sigma")) {
        const Vector v = parse_vector(e->value, e->line, "system.sigma");
        if (v.size() != 3) invalid("system.sigma needs 3 components for npz");
        for (int i = 0; i < 3; ++i) p.sigma[static_cast<std::size_t>(i)] = v[i];
      } else {
        src.note_default("system", "sigma", "1, 1, 1");
      }
      try {
        p.validate();
      } catch (const Error& e) {
        invalid(std::string("system: ") + e.what());
      }
      break;
    }
    case SystemKind::kCustom: {
      const Entry* a = src.find("system", "drift_matrix");
      if (!a) invalid("missing required field system.drift_matrix");
      s.drift_matrix = parse_matrix(a->value, a->line, "system.drift_matrix");
      const int d = static_cast<int>(s.drift_matrix.rows());
      s.dim = src.integer<int>("system", "dim", d);
      if (s.dim != d || s.drift_matrix.cols() != d) {
        invalid("system.drift_matrix must be dim x dim");
      }
      if (const Entry* e = src.find("system", "drift_offset")) {
        s.drift_offset = parse_vector(e->value, e->line, "system.drift_offset");
      } else {
        s.drift_offset = Vector::Zero(d);
        src.note_default("system", "drift_offset", join(s.drift_offset));
      }
      if (const Entry* e = src.find("system", "diffusion")) {
        s.diffusion = parse_matrix(e->value, e->line, "system.diffusion");
      } else {
        s.diffusion = Matrix::Identity(d, d);
        src.note_default("system", "diffusion", join_rows(s.diffusion));
      }
      if (s.drift_offset.size() != d || s.diffusion.rows() != d || s.diffusion.cols() != d) {
        invalid("system.drift_offset and system.diffusion must match dim");
      }
      break;
    }
  }
}

void read_problem(Source& src, RunConfig& cfg) {
  if (!src.has_section("problem")) invalid("missing required section [problem]");
  ProblemBlock& p = cfg.problem;
  p.x0 = src.required_vector("problem", "x0");
  p.x_target = src.required_vector("problem", "x_target");
  p.t0 = src.number("problem", "t0", 0.0);
  p.tf = src.number("problem", "tf", 1.0);
  p.terminal_weight = src.number("problem", "terminal_weight", 1.0);
  if (!(p.tf > p.t0)) {
    std::ostringstream os;
    os << "problem.t0/problem.tf: the horizon needs tf > t0, got t0 = " << p.t0
       << ", tf = " << p.tf;
    invalid(os.str());
  }
  if (p.terminal_weight < 0.0) invalid("problem.terminal_weight must be nonnegative");
  const int d = system_dim(cfg.system);
  if (p.x0.size() != d || p.x_target.size() != d) {
    std::ostringstream os;
    os << "problem.x0/problem.x_target must have " << d << " components for "
       << to_string(cfg.system.kind);
    invalid(os.str());
  }
}

void read_solver(Source& src, SolverBlock& s) {
  SolverConfig& c = s.config;
  c.n_nodes = src.integer<int>("solver", "n_nodes", 201);
  c.max_iterations = src.integer<int>("solver", "max_iterations", 500);
  c.damping_eta = src.number("solver", "damping_eta", 0.5);
  c.cost_tolerance = src.number("solver", "cost_tolerance", 1e-8);
  c.stationarity_tolerance = src.number("solver", "stationarity_tolerance", 1e-6);
  s.initial_control = src.text("solver", "initial_control", "zeros");
  try {
    c.validate();
  } catch (const Error& e) {
    invalid(std::string("solver: ") + e.what());
  }
}

void read_mc(Source& src, McBlock& m) {
  m.dt = src.number("mc", "dt", 1e-3);
  m.delta = src.number("mc", "delta", 0.1);
  m.attempts = src.integer<std::int64_t>("mc", "attempts", 100000);
  m.trials = src.integer<std::int64_t>("mc", "trials", 100000);
  m.tube_delta = src.number("mc", "tube_delta", 0.3);
  m.seed = src.integer<std::uint64_t>("mc", "seed", 1);
  const std::string ref = src.text("mc", "reference", "min_action");
  const auto method = reference_method_from_string(ref);
  if (!method) invalid("mc.reference must be per_slice_mode or min_action, got '" + ref + "'");
  m.reference = *method;
  m.store_nodes = src.integer<int>("mc", "store_nodes", 201);
  m.threads = src.integer<unsigned>("mc", "threads", 0u);
  if (!(m.dt > 0.0)) invalid("mc.dt must be positive");
  if (!(m.delta > 0.0)) invalid("mc.delta must be positive");
  if (!(m.tube_delta > 0.0)) invalid("mc.tube_delta must be positive");
  if (m.attempts < 1) invalid("mc.attempts must be at least 1");
  if (m.trials < 1) invalid("mc.trials must be at least 1");
  if (m.store_nodes < 2) invalid("mc.store_nodes must be at least 2");
}

void read_output(Source& src, OutputBlock& o) {
  o.directory = src.text("output", "directory", "out");
  const std::string formats = src.text("output", "formats", "csv, json");
  o.csv = o.json = false;
  for (auto f : split(formats, ", ")) {
    if (f == "csv") {
      o.csv = true;
    } else if (f == "json") {
      o.json = true;
    } else {
      invalid("output.formats accepts csv and json, got '" + std::string(f) + "'");
    }
  }
}

void read_geometry(Source& src, RunConfig& cfg) {
  if (!src.has_section("geometry")) invalid("missing required section [geometry]");
  const Entry* e = src.find("geometry", "points");
  if (!e) invalid("missing required field geometry.points");
  cfg.geometry.points = parse_rows(e->value, e->line, "geometry.points");
  const int d = system_dim(cfg.system);
  for (const auto& p : cfg.geometry.points) {
    if (p.size() != d) {
      std::ostringstream os;
      os << "line " << e->line << ": geometry.points entries need " << d << " coordinates";
      invalid(os.str());
    }
  }
}

bool same_vec(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }
bool same_mat(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kSolve: return "solve";
    case Command::kSample: return "sample";
    case Command::kVerify: return "verify";
    case Command::kGeometry: return "geometry";
  }
  return "unknown";
}

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kDoubleWell: return "double_well";
    case SystemKind::kMaierStein: return "maier_stein";
    case SystemKind::kNpz: return "npz";
    case SystemKind::kCustom: return "custom";
  }
  return "unknown";
}

std::optional<Command> command_from_string(std::string_view text) {
  for (Command c : {Command::kSolve, Command::kSample, Command::kVerify, Command::kGeometry}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::optional<std::string> nearest_key(std::string_view key,
                                       const std::vector<std::string>& candidates) {
  std::optional<std::string> best;
  std::size_t best_distance = 4;
  for (const auto& c : candidates) {
    const std::size_t dist = edit_distance(key, c);
    if (dist < best_distance) {
      best_distance = dist;
      best = c;
    }
  }
  return best;
}

RunConfig parse_config(std::string_view text, std::optional<Command> command_override) {
  RunConfig cfg;
  Source src(tokenize(text), cfg.applied_defaults);

  const bool given = src.find("", "command") != nullptr;
  const std::string command =
      given || !command_override ? src.text("", "command", "solve") : "solve";
  auto parsed = command_from_string(command);
  if (!parsed) {
    const Entry* e = src.find("", "command");
    std::ostringstream os;
    os << "line " << (e ? e->line : 0) << ": command '" << command
       << "' is not one of solve, sample, verify, geometry";
    invalid(os.str());
  }
  cfg.command = command_override.value_or(*parsed);

  read_system(src, cfg.system);
  const bool needs_problem = cfg.command != Command::kGeometry;
  if (needs_problem || src.has_section("problem")) read_problem(src, cfg);
  read_solver(src, cfg.solver);
  if ((cfg.command == Command::kSample || cfg.command == Command::kVerify) &&
      !src.has_section("mc")) {
    invalid(std::string("missing required section [mc] for command ") +
            std::string(to_string(cfg.command)));
  }
  read_mc(src, cfg.mc);
  read_output(src, cfg.output);
  if (cfg.command == Command::kGeometry || src.has_section("geometry")) read_geometry(src, cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), command_override);
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << to_string(c.command) << "\n\n[system]\nkind = " << to_string(c.system.kind)
     << "\n";
  const SystemBlock& s = c.system;
  switch (s.kind) {
    case SystemKind::kDoubleWell:
      os << "sigma = " << format_double(s.sigma) << "\n";
      break;
    case SystemKind::kMaierStein:
      os << "gamma = " << format_double(s.gamma) << "\nepsilon = " << format_double(s.epsilon)
         << "\n";
      break;
    case SystemKind::kNpz: {
      const NpzParams& p = s.npz;
      os << "D = " << format_double(p.D) << "\nN0 = " << format_double(p.N0)
         << "\na = " << format_double(p.a) << "\nb = " << format_double(p.b)
         << "\nalpha = " << format_double(p.alpha) << "\nc = " << format_double(p.c)
         << "\nd = " << format_double(p.d) << "\nD1 = " << format_double(p.D1)
         << "\nbeta = " << format_double(p.beta) << "\nD2 = " << format_double(p.D2)
         << "\nsigma = " << format_double(p.sigma[0]) << ", " << format_double(p.sigma[1]) << ", "
         << format_double(p.sigma[2]) << "\n";
      break;
    }
    case SystemKind::kCustom:
      os << "dim = " << s.dim << "\ndrift_matrix = " << join_rows(s.drift_matrix)
         << "\ndrift_offset = " << join(s.drift_offset) << "\ndiffusion = " << join_rows(s.diffusion)
         << "\n";
      break;
  }
  if (c.problem.x0.size() > 0) {
    os << "\n[problem]\nx0 = " << join(c.problem.x0) << "\nx_target = " << join(c.problem.x_target)
       << "\nt0 = " << format_double(c.problem.t0) << "\ntf = " << format_double(c.problem.tf)
       << "\nterminal_weight = " << format_double(c.problem.terminal_weight) << "\n";
  }
  const SolverConfig& sc = c.solver.config;
  os << "\n[solver]\nn_nodes = " << sc.n_nodes << "\nmax_iterations = " << sc.max_iterations
     << "\ndamping_eta = " << format_double(sc.damping_eta)
     << "\ncost_tolerance = " << format_double(sc.cost_tolerance)
     << "\nstationarity_tolerance = " << format_double(sc.stationarity_tolerance)
     << "\ninitial_control = " << c.solver.initial_control << "\n";
  const McBlock& m = c.mc;
  os << "\n[mc]\ndt = " << format_double(m.dt) << "\ndelta = " << format_double(m.delta)
     << "\nattempts = " << m.attempts << "\ntrials = " << m.trials
     << "\ntube_delta = " << format_double(m.tube_delta) << "\nseed = " << m.seed
     << "\nreference = " << to_string(m.reference) << "\nstore_nodes = " << m.store_nodes
     << "\nthreads = " << m.threads << "\n";
  std::string formats;
  if (c.output.csv) formats = "csv";
  if (c.output.json) formats += formats.empty() ? "json" : ", json";
  os << "\n[output]\ndirectory = " << c.output.directory << "\nformats = " << formats << "\n";
  if (!c.geometry.points.empty()) {
    os << "\n[geometry]\npoints = ";
    for (std::size_t i = 0; i < c.geometry.points.size(); ++i) {
      if (i) os << "; ";
      os << join(c.geometry.points[i]);
    }
    os << "\n";
  }
  return os.str();
}

bool same_config(const RunConfig& a, const RunConfig& b) {
  const SystemBlock& sa = a.system;
  const SystemBlock& sb = b.system;
  const NpzParams& na = sa.npz;
  const NpzParams& nb = sb.npz;
  const bool npz_same = na.D == nb.D && na.N0 == nb.N0 && na.a == nb.a && na.b == nb.b &&
                        na.alpha == nb.alpha && na.c == nb.c && na.d == nb.d && na.D1 == nb.D1 &&
                        na.beta == nb.beta && na.D2 == nb.D2 && na.sigma == nb.sigma;
  const bool system_same = sa.kind == sb.kind && sa.sigma == sb.sigma && sa.gamma == sb.gamma &&
                           sa.epsilon == sb.epsilon && npz_same && sa.dim == sb.dim &&
                           same_mat(sa.drift_matrix, sb.drift_matrix) &&
                           same_vec(sa.drift_offset, sb.drift_offset) &&
                           same_mat(sa.diffusion, sb.diffusion);
  const ProblemBlock& pa = a.problem;
  const ProblemBlock& pb = b.problem;
  const bool problem_same = same_vec(pa.x0, pb.x0) && same_vec(pa.x_target, pb.x_target) &&
                            pa.t0 == pb.t0 && pa.tf == pb.tf &&
                            pa.terminal_weight == pb.terminal_weight;
  const SolverConfig& ca = a.solver.config;
  const SolverConfig& cb = b.solver.config;
  const bool solver_same = ca.n_nodes == cb.n_nodes && ca.max_iterations == cb.max_iterations &&
                           ca.damping_eta == cb.damping_eta &&
                           ca.cost_tolerance == cb.cost_tolerance &&
                           ca.stationarity_tolerance == cb.stationarity_tolerance &&
                           a.solver.initial_control == b.solver.initial_control;
  const McBlock& ma = a.mc;
  const McBlock& mb = b.mc;
  const bool mc_same = ma.dt == mb.dt && ma.delta == mb.delta && ma.attempts == mb.attempts &&
                       ma.trials == mb.trials && ma.tube_delta == mb.tube_delta &&
                       ma.seed == mb.seed && ma.reference == mb.reference &&
                       ma.store_nodes == mb.store_nodes && ma.threads == mb.threads;
  const bool output_same = a.output.directory == b.output.directory && a.output.csv == b.output.csv &&
                           a.output.json == b.output.json;
  bool geometry_same = a.geometry.points.size() == b.geometry.points.size();
  for (std::size_t i = 0; geometry_same && i < a.geometry.points.size(); ++i) {
    geometry_same = same_vec(a.geometry.points[i], b.geometry.points[i]);
  }
  return a.command == b.command && system_same && problem_same && solver_same && mc_same &&
         output_same && geometry_same;
}

SystemModel build_system(const SystemBlock& block) {
  switch (block.kind) {
    case SystemKind::kDoubleWell: return make_double_well(block.sigma);
    case SystemKind::kMaierStein: return make_maier_stein(block.gamma, block.epsilon);
    case SystemKind::kNpz: return make_npz(block.npz);
    case SystemKind::kCustom:
      return make_linear(block.drift_matrix, block.drift_offset, block.diffusion, "custom");
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown system kind");
}

}  // namespace ompath::cli
