/*
 * Copyright 2026 The depthcomp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "depthcomp/cost_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "depthcomp/error.hpp"
#include "depthcomp/merge.hpp"

namespace depthcomp {

namespace {

std::string pair_name(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string key_name(const ImportanceKey& k) {
  return "(" + std::to_string(k.i) + "," + std::to_string(k.j) + "," + std::to_string(k.a) + "," +
         std::to_string(k.b) + ")";
}

void check_pair(int depth, int i, int j) {
  if (i < 0 || j <= i || j > depth) throw Error(Errc::IndexOutOfRange, pair_name(i, j));
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

// ---- CostTable -------------------------------------------------------------

CostTable::CostTable(int depth) : depth_(depth) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "cost table depth must be >= 1");
  ms_.resize(static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1));
}

std::size_t CostTable::index(int i, int j) const {
  check_pair(depth_, i, j);
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(depth_ + 1) + static_cast<std::size_t>(j);
}

void CostTable::set(int i, int j, double ms) {
  if (!std::isfinite(ms)) throw Error(Errc::NonFiniteValue, "T" + pair_name(i, j));
  if (!(ms > 0.0)) throw Error(Errc::InvalidArgument, "T" + pair_name(i, j) + " must be positive");
  ms_[index(i, j)] = ms;
}

std::optional<double> CostTable::at(int i, int j) const { return ms_[index(i, j)]; }

std::vector<Block> CostTable::blocks() const {
  std::vector<Block> out;
  for (int i = 0; i < depth_; ++i) {
    for (int j = i + 1; j <= depth_; ++j) {
      if (at(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

// ---- TickTable -------------------------------------------------------------

TickTable::TickTable(int depth, std::int64_t scale) : depth_(depth), scale_(scale) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "tick table depth must be >= 1");
  if (scale < 1) throw Error(Errc::InvalidArgument, "scale must be >= 1");
  ticks_.resize(static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1));
}

std::size_t TickTable::index(int i, int j) const {
  check_pair(depth_, i, j);
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(depth_ + 1) + static_cast<std::size_t>(j);
}

void TickTable::set(int i, int j, Ticks ticks) {
  if (ticks < 0) throw Error(Errc::InvalidArgument, "negative ticks at " + pair_name(i, j));
  ticks_[index(i, j)] = ticks;
}

std::optional<Ticks> TickTable::at(int i, int j) const { return ticks_[index(i, j)]; }

// ---- ImportanceTable -------------------------------------------------------

ImportanceTable::ImportanceTable(int depth, PlanMode mode) : depth_(depth), mode_(mode) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "importance table depth must be >= 1");
  scores_.resize(static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1) * 4);
}

std::size_t ImportanceTable::index(int i, int j, int a, int b) const {
  check_pair(depth_, i, j);
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
    throw Error(Errc::IndexOutOfRange, "edge bits must be 0 or 1");
  }
  const std::size_t cell =
      static_cast<std::size_t>(i) * static_cast<std::size_t>(depth_ + 1) + static_cast<std::size_t>(j);
  return cell * 4 + static_cast<std::size_t>(a * 2 + b);
}

void ImportanceTable::set(int i, int j, double score) {
  if (mode_ != PlanMode::base) throw Error(Errc::InvalidArgument, "extended table needs edge bits");
  set(i, j, 1, 1, score);
}

void ImportanceTable::set(int i, int j, int a, int b, double score) {
  if (!std::isfinite(score)) throw Error(Errc::NonFiniteValue, "I" + pair_name(i, j));
  if (mode_ == PlanMode::base && (a != 1 || b != 1)) {
    throw Error(Errc::InvalidArgument, "base table stores a single score per block");
  }
  scores_[index(i, j, a, b)] = score;
}

void ImportanceTable::erase(int i, int j, int a, int b) { scores_[index(i, j, a, b)].reset(); }

std::optional<double> ImportanceTable::at(int i, int j) const {
  if (mode_ != PlanMode::base) throw Error(Errc::InvalidArgument, "extended table needs edge bits");
  return scores_[index(i, j, 1, 1)];
}

std::optional<double> ImportanceTable::at(int i, int j, int a, int b) const {
  if (mode_ == PlanMode::base) {
    throw Error(Errc::InvalidArgument, "base table has no edge bits");
  }
  return scores_[index(i, j, a, b)];
}

std::vector<std::pair<ImportanceKey, double>> ImportanceTable::entries() const {
  std::vector<std::pair<ImportanceKey, double>> out;
  for (int i = 0; i < depth_; ++i) {
    for (int j = i + 1; j <= depth_; ++j) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (const auto& v = scores_[index(i, j, a, b)]) out.push_back({{i, j, a, b}, *v});
        }
      }
    }
  }
  return out;
}

// ---- feasibility -----------------------------------------------------------

void validate_latency_params(const LatencyModelParams& params) {
  if (!(params.mac_cost >= 0.0) || !(params.layer_overhead >= 0.0) ||
      !std::isfinite(params.mac_cost) || !std::isfinite(params.layer_overhead)) {
    throw Error(Errc::InvalidArgument, "latency model parameters must be finite and >= 0");
  }
  if (params.mac_cost == 0.0 && params.layer_overhead == 0.0) {
    throw Error(Errc::InvalidArgument, "latency model with zero MAC cost and zero overhead");
  }
}

std::vector<Block> feasible_latency_blocks(const NetworkSpec& net, bool forbid_wide_after_stride) {
  const int L = net.depth();
  std::vector<Block> out;
  for (int i = 0; i < L; ++i) {
    // Once a stride >= 2 layer has been seen in (i, j], any later K > 1 layer
    // disqualifies every longer block starting at i.
    bool seen_stride = false;
    bool wide_after_stride = false;
    for (int j = i + 1; j <= L; ++j) {
      const ConvLayer& layer = net.layer(j);
      if (seen_stride && layer.kernel_size > 1) wide_after_stride = true;
      if (layer.stride >= 2) seen_stride = true;

      bool ok = true;
      for (const SkipConnection& skip : net.skips) {
        const bool start_inside = i < skip.start && skip.start < j;
        const bool end_inside = i < skip.end && skip.end < j;
        if (start_inside != end_inside) {
          ok = false;
          break;
        }
      }
      if (forbid_wide_after_stride && wide_after_stride) ok = false;
      if (j == i + 1) ok = true;
      if (ok) out.push_back({i, j});
    }
  }
  return out;
}

int natural_edge_bit(const NetworkSpec& net, int p) {
  if (p == 0) return 1;
  if (p == net.depth()) return 0;
  return net.activation_at(p) != Activation::identity ? 1 : 0;
}

namespace {

// sigma_p == id, with the input boundary counted as a live (non-identity) edge.
bool identity_at(const NetworkSpec& net, int p) {
  if (p == 0) return false;
  return net.activation_at(p) == Activation::identity;
}

}  // namespace

std::vector<ImportanceKey> feasible_importance_blocks(const NetworkSpec& net, std::span<const Block> blocks) {
  const int L = net.depth();
  std::vector<ImportanceKey> out;
  for (const Block& blk : blocks) {
    for (int a = 0; a < 2; ++a) {
      if (a == 0 && (blk.i == 0 || !identity_at(net, blk.i))) continue;
      for (int b = 0; b < 2; ++b) {
        if (blk.j == L) {
          if (b != 0) continue;
        } else {
          if (b == 0 && !identity_at(net, blk.j)) continue;
          if (b == 0 && identity_at(net, blk.i) && identity_at(net, blk.j)) continue;
        }
        out.push_back({blk.i, blk.j, a, b});
      }
    }
  }
  return out;
}

bool violates_mask(const NetworkSpec& net, const ImportanceKey& key) {
  const int L = net.depth();
  const bool i_interior = key.i > 0 && key.i < L;
  const bool j_interior = key.j > 0 && key.j < L;
  if (i_interior && key.a == 0 && !identity_at(net, key.i)) return true;
  if (j_interior && key.b == 0 && !identity_at(net, key.j)) return true;
  if (i_interior && j_interior && key.b == 0 && identity_at(net, key.i) && identity_at(net, key.j)) {
    return true;
  }
  return false;
}

// ---- synthesis -------------------------------------------------------------

CostTable synthesize_latency(const NetworkSpec& net, std::span<const Block> blocks,
                             const LatencyModelParams& params) {
  validate_latency_params(params);
  const std::vector<FeatureShape> shapes = shape_trace(net);
  CostTable table(net.depth());
  for (const Block& blk : blocks) {
    const MergedShape m = merged_shape(net, blk.i, blk.j);
    const FeatureShape& in = shapes[static_cast<std::size_t>(blk.i)];
    const int h = conv_output_size(in.height, m.kernel_size, m.stride, m.padding);
    const int w = conv_output_size(in.width, m.kernel_size, m.stride, m.padding);
    if (h <= 0 || w <= 0) throw Error(Errc::NonPositiveSpatialDim, "merged block " + pair_name(blk.i, blk.j));
    const double macs = static_cast<double>(h) * w * (m.in_channels / m.groups) * m.out_channels *
                        static_cast<double>(m.kernel_size) * m.kernel_size;
    table.set(blk.i, blk.j, params.layer_overhead + params.mac_cost * macs);
  }
  return table;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double quantized_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b << 1));
  h = splitmix64(h ^ (c << 2));
  // k in [-1024, 1024], score = k / 1024.
  const auto k = static_cast<std::int64_t>(h % 2049) - 1024;
  return static_cast<double>(k) / 1024.0;
}

ImportanceTable synthesize_importance(const NetworkSpec& net, std::span<const Block> blocks, PlanMode mode,
                                      std::uint64_t seed) {
  ImportanceTable table(net.depth(), mode);
  if (mode == PlanMode::base) {
    for (const Block& blk : blocks) {
      table.set(blk.i, blk.j, quantized_uniform(seed, static_cast<std::uint64_t>(blk.i),
                                                static_cast<std::uint64_t>(blk.j), 3));
    }
    return table;
  }
  for (const ImportanceKey& key : feasible_importance_blocks(net, blocks)) {
    table.set(key.i, key.j, key.a, key.b,
              quantized_uniform(seed, static_cast<std::uint64_t>(key.i), static_cast<std::uint64_t>(key.j),
                                static_cast<std::uint64_t>(key.a * 2 + key.b)));
  }
  return table;
}

ImportanceTable normalize_importance(const ImportanceTable& table, double alpha,
                                     std::span<const double> size_one_drops) {
  if (size_one_drops.empty()) throw Error(Errc::EmptyReferenceSet, "no size-one drops supplied");
  const double mean = std::accumulate(size_one_drops.begin(), size_one_drops.end(), 0.0) /
                      static_cast<double>(size_one_drops.size());
  const double shift = alpha * mean;
  ImportanceTable out(table.depth(), table.mode());
  for (const auto& [key, score] : table.entries()) {
    out.set(key.i, key.j, key.a, key.b, score - shift);
  }
  return out;
}

std::vector<double> size_one_scores(const ImportanceTable& table) {
  std::vector<double> out;
  for (const auto& [key, score] : table.entries()) {
    if (key.j == key.i + 1) out.push_back(score);
  }
  return out;
}

// ---- discretization --------------------------------------------------------

Ticks to_ticks(double ms, std::int64_t scale) {
  if (scale < 1) throw Error(Errc::InvalidArgument, "scale must be >= 1");
  if (!std::isfinite(ms)) throw Error(Errc::NonFiniteValue, "latency " + format_double(ms));
  const double scaled = ms * static_cast<double>(scale);
  // 2^63 as a double; anything at or above cannot be represented.
  if (std::fabs(scaled) >= 9223372036854775807.0) {
    throw Error(Errc::Overflow, format_double(ms) + " ms at scale " + std::to_string(scale));
  }
  return static_cast<Ticks>(std::llround(scaled));
}

Discretized discretize(const CostTable& table, double budget_ms, std::int64_t scale) {
  Discretized out{TickTable(table.depth(), scale), to_ticks(budget_ms, scale)};
  for (const Block& blk : table.blocks()) {
    out.table.set(blk.i, blk.j, to_ticks(*table.at(blk.i, blk.j), scale));
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

struct CsvRows {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // (line number, cells)
};

CsvRows read_csv(const std::string& text) {
  CsvRows out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (out.header.empty()) {
      out.header = std::move(cells);
    } else {
      out.rows.push_back({line_no, std::move(cells)});
    }
  }
  if (out.header.empty()) throw Error(Errc::ParseError, "empty CSV");
  return out;
}

int parse_int(const std::string& cell, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad integer '" + cell + "'");
  }
  return value;
}

double parse_real(const std::string& cell, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    const std::string lower = [&] {
      std::string s = cell;
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return s;
    }();
    if (lower == "inf" || lower == "+inf" || lower == "-inf" || lower == "nan") {
      throw Error(Errc::NonFiniteValue, "line " + std::to_string(line));
    }
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  if (!std::isfinite(value)) throw Error(Errc::NonFiniteValue, "line " + std::to_string(line));
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CostTable parse_cost_csv(const std::string& text, int depth) {
  const CsvRows csv = read_csv(text);
  if (csv.header != std::vector<std::string>{"i", "j", "ms"}) {
    throw Error(Errc::ParseError, "latency CSV header must be i,j,ms");
  }
  CostTable table(depth);
  for (const auto& [line, cells] : csv.rows) {
    if (cells.size() != 3) throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected 3 fields");
    const int i = parse_int(cells[0], line);
    const int j = parse_int(cells[1], line);
    const double ms = parse_real(cells[2], line);
    if (i < 0 || j <= i || j > depth) {
      throw Error(Errc::IndexOutOfRange, "line " + std::to_string(line) + ": " + pair_name(i, j));
    }
    table.set(i, j, ms);
  }
  return table;
}

CostTable load_cost_table(const std::filesystem::path& path, int depth) {
  return parse_cost_csv(read_file(path), depth);
}

std::string cost_table_csv(const CostTable& table) {
  std::string out = "i,j,ms\n";
  for (const Block& blk : table.blocks()) {
    out += std::to_string(blk.i) + "," + std::to_string(blk.j) + "," + format_double(*table.at(blk.i, blk.j)) +
           "\n";
  }
  return out;
}

ImportanceTable parse_importance_csv(const std::string& text, const NetworkSpec& net, PlanMode mode) {
  const CsvRows csv = read_csv(text);
  const bool with_bits = csv.header == std::vector<std::string>{"i", "j", "a", "b", "score"};
  const bool without_bits = csv.header == std::vector<std::string>{"i", "j", "score"};
  if (!with_bits && !without_bits) {
    throw Error(Errc::ParseError, "importance CSV header must be i,j,a,b,score or i,j,score");
  }
  const int L = net.depth();
  ImportanceTable table(L, mode);
  for (const auto& [line, cells] : csv.rows) {
    const std::size_t expected = with_bits ? 5 : 3;
    if (cells.size() != expected) {
      throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected " + std::to_string(expected) +
                                        " fields");
    }
    ImportanceKey key;
    key.i = parse_int(cells[0], line);
    key.j = parse_int(cells[1], line);
    if (key.i < 0 || key.j <= key.i || key.j > L) {
      throw Error(Errc::IndexOutOfRange, "line " + std::to_string(line) + ": " + pair_name(key.i, key.j));
    }
    if (with_bits) {
      key.a = parse_int(cells[2], line);
      key.b = parse_int(cells[3], line);
      if ((key.a != 0 && key.a != 1) || (key.b != 0 && key.b != 1)) {
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ": edge bits must be 0 or 1");
      }
    } else {
      key.a = natural_edge_bit(net, key.i);
      key.b = natural_edge_bit(net, key.j);
    }
    const double score = parse_real(cells.back(), line);
    if (mode == PlanMode::base) {
      // A base table keeps only the variant matching the original activations.
      if (with_bits && (key.a != natural_edge_bit(net, key.i) || key.b != natural_edge_bit(net, key.j))) {
        continue;
      }
      table.set(key.i, key.j, score);
    } else {
      if (violates_mask(net, key)) throw Error(Errc::MaskViolation, key_name(key));
      table.set(key.i, key.j, key.a, key.b, score);
    }
  }
  return table;
}

ImportanceTable load_importance_table(const std::filesystem::path& path, const NetworkSpec& net, PlanMode mode) {
  return parse_importance_csv(read_file(path), net, mode);
}

std::string importance_table_csv(const ImportanceTable& table) {
  const bool base = table.mode() == PlanMode::base;
  std::string out = base ? "i,j,score\n" : "i,j,a,b,score\n";
  for (const auto& [key, score] : table.entries()) {
    out += std::to_string(key.i) + "," + std::to_string(key.j) + ",";
    if (!base) out += std::to_string(key.a) + "," + std::to_string(key.b) + ",";
    out += format_double(score) + "\n";
  }
  return out;
}

}  // namespace depthcomp
