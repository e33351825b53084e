#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dmfw {

/// One example: sparse features (1-based indices, strictly increasing within
/// a row) plus a label (+-1 for classification, real for regression).
struct SparseRow {
  double label = 0;
  std::vector<std::pair<int, double>> entries;
};

struct Dataset {
  std::vector<SparseRow> rows;
  int dim = 0;

  std::size_t size() const { return rows.size(); }
};

/// Parse LIBSVM text: `label idx:val idx:val ...`, 1-based indices, blank
/// lines and trailing whitespace tolerated. dim = max index seen unless
/// overridden. Malformed tokens and non-increasing indices report the line.
Dataset parse_libsvm(std::istream& in, int dim_override = 0);

/// Reads a LIBSVM file; gzip-compressed input is detected and inflated
/// transparently.
Dataset load_libsvm_file(const std::string& path, int dim_override = 0);

void write_libsvm(std::ostream& out, const Dataset& ds);

/// Map labels onto {-1,+1}: +-1 kept as-is; {1,2} -> {-1,+1} (covtype);
/// {0,1} -> {-1,+1}; any other two-valued set maps lower -> -1. More than two
/// distinct labels is an error.
void normalize_labels(Dataset& ds);

/// agent -> row indices; disjoint, covering, sizes differing by at most one
/// (the first m mod n agents receive the extra row).
struct Partition {
  std::vector<std::vector<std::size_t>> agents;
};

Partition partition_even(const Dataset& ds, int n_agents, std::uint64_t seed, bool shuffle);

/// Seeded uniform subsample without replacement, original order preserved.
Dataset subsample(const Dataset& ds, std::size_t count, std::uint64_t seed);

/// Optional per-feature max-abs scaling: every stored value of feature j is
/// divided by max_rows |v_j|. Off by default at load time.
void max_abs_scale(Dataset& ds);

Dataset gather(const Dataset& ds, const std::vector<std::size_t>& indices);

/// FNV-1a 64 over a file's raw bytes; manifest change-detection hash.
std::uint64_t file_fnv1a64(const std::string& path);

}  // namespace dmfw
