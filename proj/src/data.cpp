#include "dmfw/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dmfw/rng.hpp"

namespace dmfw {

namespace {

[[noreturn]] void parse_fail(long lineno, const std::string& what) {
  throw std::runtime_error("libsvm parse error at line " + std::to_string(lineno) + ": " + what);
}

double parse_double(std::string_view tok, long lineno, const char* what) {
  if (tok.empty()) parse_fail(lineno, std::string("empty ") + what);
  // from_chars for double is incomplete on some libstdc++; strtod is fine here.
  std::string buf(tok);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) parse_fail(lineno, std::string("bad ") + what);
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, int dim_override) {
  Dataset ds;
  std::string line;
  long lineno = 0;
  int max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    auto skip_ws = [&] {
      while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    };
    auto next_token = [&]() -> std::string_view {
      skip_ws();
      std::size_t len = 0;
      while (len < sv.size() && !std::isspace(static_cast<unsigned char>(sv[len]))) ++len;
      const auto tok = sv.substr(0, len);
      sv.remove_prefix(len);
      return tok;
    };

    const auto label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line
    SparseRow row;
    row.label = parse_double(label_tok, lineno, "label");

    int prev_index = 0;
    for (;;) {
      const auto tok = next_token();
      if (tok.empty()) break;
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) parse_fail(lineno, "feature token lacks ':'");
      int idx = 0;
      const auto idx_sv = tok.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_sv.data(), idx_sv.data() + idx_sv.size(), idx);
      if (ec != std::errc() || ptr != idx_sv.data() + idx_sv.size() || idx < 1)
        parse_fail(lineno, "bad feature index");
      if (idx <= prev_index) parse_fail(lineno, "feature indices not strictly increasing");
      prev_index = idx;
      const double val = parse_double(tok.substr(colon + 1), lineno, "feature value");
      row.entries.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    ds.rows.push_back(std::move(row));
  }
  ds.dim = dim_override > 0 ? dim_override : max_index;
  if (dim_override > 0 && max_index > dim_override)
    throw std::runtime_error("libsvm: feature index " + std::to_string(max_index) +
                             " exceeds declared dimension " + std::to_string(dim_override));
  return ds;
}

Dataset load_libsvm_file(const std::string& path, int dim_override) {
  // gzopen reads both gzip-compressed and plain files.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("dataset: cannot open " + path);
  std::string content;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<size_t>(got));
  const bool read_error = got < 0;
  gzclose(f);
  if (read_error) throw std::runtime_error("dataset: read/inflate failure on " + path);
  std::istringstream in(content);
  return parse_libsvm(in, dim_override);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  char num[64];
  for (const auto& row : ds.rows) {
    std::snprintf(num, sizeof(num), "%.17g", row.label);
    out << num;
    for (const auto& [idx, val] : row.entries) {
      std::snprintf(num, sizeof(num), "%.17g", val);
      out << ' ' << idx << ':' << num;
    }
    out << '\n';
  }
}

void normalize_labels(Dataset& ds) {
  std::set<double> labels;
  for (const auto& row : ds.rows) labels.insert(row.label);
  if (labels.empty()) return;
  if (labels.size() > 2)
    throw std::runtime_error("labels: expected binary labels, found " +
                             std::to_string(labels.size()) + " distinct values");
  const bool already = std::all_of(labels.begin(), labels.end(),
                                   [](double v) { return v == 1.0 || v == -1.0; });
  if (already) return;
  if (labels.size() == 1) {
    const double v = *labels.begin() > 0 ? 1.0 : -1.0;
    for (auto& row : ds.rows) row.label = v;
    return;
  }
  const double lo = *labels.begin();
  for (auto& row : ds.rows) row.label = row.label == lo ? -1.0 : 1.0;
}

Partition partition_even(const Dataset& ds, int n_agents, std::uint64_t seed, bool shuffle) {
  if (n_agents < 1) throw std::invalid_argument("partition: agent count must be >= 1");
  const std::size_t m = ds.size();
  if (static_cast<std::size_t>(n_agents) > m)
    throw std::invalid_argument("partition: more agents than rows");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    auto rng = make_engine(seed, 0x70617274);
    std::shuffle(order.begin(), order.end(), rng);
  }
  Partition part;
  part.agents.resize(static_cast<std::size_t>(n_agents));
  const std::size_t base = m / static_cast<std::size_t>(n_agents);
  const std::size_t rem = m % static_cast<std::size_t>(n_agents);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_agents); ++i) {
    const std::size_t take = base + (i < rem ? 1 : 0);
    part.agents[i].assign(order.begin() + static_cast<long>(pos),
                          order.begin() + static_cast<long>(pos + take));
    pos += take;
  }
  return part;
}

Dataset subsample(const Dataset& ds, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("subsample: count must be positive");
  if (count > ds.size()) throw std::invalid_argument("subsample: count exceeds dataset size");
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(count);
  auto rng = make_engine(seed, 0x73756273);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), count, rng);
  return gather(ds, picked);
}

void max_abs_scale(Dataset& ds) {
  std::vector<double> peak(static_cast<size_t>(ds.dim), 0.0);
  for (const auto& row : ds.rows)
    for (const auto& [idx, val] : row.entries)
      peak[static_cast<size_t>(idx - 1)] = std::max(peak[static_cast<size_t>(idx - 1)], std::abs(val));
  for (auto& row : ds.rows)
    for (auto& [idx, val] : row.entries)
      if (peak[static_cast<size_t>(idx - 1)] > 0) val /= peak[static_cast<size_t>(idx - 1)];
}

Dataset gather(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.dim = ds.dim;
  out.rows.reserve(indices.size());
  for (const auto i : indices) out.rows.push_back(ds.rows.at(i));
  return out;
}

std::uint64_t file_fnv1a64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = in.gcount();
    for (long i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

}  // namespace dmfw
