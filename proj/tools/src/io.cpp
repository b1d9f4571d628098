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

#include "ompath/cli/io.hpp"

#include "ompath/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ompath::cli {

namespace {

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

double parse_cell(std::string_view cell, int line) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    parse_error(line, "'" + std::string(cell) + "' is not a number");
  }
  return v;
}

void append_row(std::string& out, double t, const Matrix* blocks[], int count, Eigen::Index row) {
  out += format_double(t);
  for (int b = 0; b < count; ++b) {
    for (Eigen::Index j = 0; j < blocks[b]->cols(); ++j) {
      out += ',';
      out += format_double((*blocks[b])(row, j));
    }
  }
  out += '\n';
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  traj.validate();
  const int d = traj.dim();
  std::string out = "t";
  const Matrix* blocks[3] = {&traj.states, nullptr, nullptr};
  int count = 1;
  for (int j = 1; j <= d; ++j) out += ",x" + std::to_string(j);
  if (traj.has_costates()) {
    blocks[count++] = &traj.costates;
    for (int j = 1; j <= d; ++j) out += ",p" + std::to_string(j);
  }
  if (traj.has_controls()) {
    blocks[count++] = &traj.controls;
    for (int j = 1; j <= d; ++j) out += ",theta" + std::to_string(j);
  }
  out += '\n';
  for (int i = 0; i < traj.nodes(); ++i) append_row(out, traj.times[static_cast<std::size_t>(i)], blocks, count, i);
  return out;
}

Trajectory parse_trajectory_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) parse_error(1, "missing header");
  const auto header = split_commas(lines.front());
  if (header.empty() || header.front() != "t") parse_error(1, "header must start with 't'");
  int d = 0;
  while (d + 1 < static_cast<int>(header.size()) &&
         header[static_cast<std::size_t>(d + 1)] == "x" + std::to_string(d + 1)) {
    ++d;
  }
  if (d == 0) parse_error(1, "header has no state columns");
  const int rest = static_cast<int>(header.size()) - 1 - d;
  if (rest != 0 && rest != d && rest != 2 * d) parse_error(1, "unexpected column count");
  bool has_p = false;
  bool has_theta = false;
  for (int block = 0; block < rest / d; ++block) {
    const std::string_view first = header[static_cast<std::size_t>(1 + d + block * d)];
    const std::string prefix = first.substr(0, 1) == "p" ? "p" : "theta";
    if (prefix == "p" && block == 0) has_p = true;
    else if (prefix == "theta" && !has_theta) has_theta = true;
    else parse_error(1, "unexpected column '" + std::string(first) + "'");
    for (int j = 0; j < d; ++j) {
      if (header[static_cast<std::size_t>(1 + d + block * d + j)] != prefix + std::to_string(j + 1)) {
        parse_error(1, "unexpected column order");
      }
    }
  }

  std::vector<std::string_view> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!lines[i].empty()) rows.push_back(lines[i]);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Trajectory traj;
  traj.times.resize(rows.size());
  traj.states.resize(n, d);
  if (has_p) traj.costates.resize(n, d);
  if (has_theta) traj.controls.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int line = static_cast<int>(i) + 2;
    const auto cells = split_commas(rows[static_cast<std::size_t>(i)]);
    if (cells.size() != header.size()) parse_error(line, "wrong number of columns");
    traj.times[static_cast<std::size_t>(i)] = parse_cell(cells[0], line);
    std::size_t c = 1;
    for (int j = 0; j < d; ++j) traj.states(i, j) = parse_cell(cells[c++], line);
    if (has_p) {
      for (int j = 0; j < d; ++j) traj.costates(i, j) = parse_cell(cells[c++], line);
    }
    if (has_theta) {
      for (int j = 0; j < d; ++j) traj.controls(i, j) = parse_cell(cells[c++], line);
    }
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  try {
    return parse_trajectory_csv(read_text(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

std::string ensemble_csv(const TransitionEnsemble& ensemble) {
  const Eigen::Index d =
      ensemble.paths.empty() ? ensemble.x_target.size() : ensemble.paths.front().cols();
  std::string out = "path,attempt,t";
  for (Eigen::Index j = 1; j <= d; ++j) out += ",x" + std::to_string(j);
  out += '\n';
  for (std::size_t m = 0; m < ensemble.paths.size(); ++m) {
    const Matrix& p = ensemble.paths[m];
    const std::string prefix =
        std::to_string(m) + ',' + std::to_string(ensemble.attempt_index[m]) + ',';
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      out += prefix;
      out += format_double(ensemble.times[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < d; ++j) {
        out += ',';
        out += format_double(p(i, j));
      }
      out += '\n';
    }
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot move output into place at " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json iteration_json(const IterationRecord& r) {
  return {{"k", r.k},
          {"cost", r.cost},
          {"grad_norm", r.grad_norm},
          {"endpoint_error", r.endpoint_error},
          {"eta", r.eta}};
}

nlohmann::json solver_report_json(const SolverReport& report) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& r : report.iterations) iterations.push_back(iteration_json(r));
  const IterationRecord& last = report.iterations.back();
  return {{"stop_reason", std::string(to_string(report.stop_reason))},
          {"converged", report.converged},
          {"stalled", report.stalled},
          {"rejected_steps", report.rejected_steps},
          {"final_cost", last.cost},
          {"final_grad_norm", last.grad_norm},
          {"endpoint_error", last.endpoint_error},
          {"iterations", std::move(iterations)}};
}

std::string dump_json(const nlohmann::json& value) { return value.dump(2) + "\n"; }

}  // namespace ompath::cli
