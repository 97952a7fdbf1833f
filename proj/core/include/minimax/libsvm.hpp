#pragma once

#include "minimax/rng.hpp"
#include "minimax/types.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace minimax {

/// A line of a data file failed to parse; line numbers are 1-based.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Sparse dataset in LIBSVM text form. Indices are 1-based in the file and
/// stored 0-based here; they must be strictly increasing within a row.
struct LibsvmDataset {
  struct Entry {
    Eigen::Index index;
    double value;
  };
  using Row = std::vector<Entry>;

  std::vector<Row> rows;
  std::vector<double> labels;
  Eigen::Index n_features = 0;

  Eigen::Index n_rows() const { return static_cast<Eigen::Index>(rows.size()); }
};

/// Parses "label idx:val idx:val ..." lines. Blank lines are skipped;
/// malformed tokens and nonmonotone indices raise ParseError with the line
/// number.
LibsvmDataset parse_libsvm(const std::filesystem::path& path);

/// Sparse random sign projection to target_dim columns. Entries of the
/// projection matrix are +-sqrt(s / target_dim) with probability 1/(2s) each
/// and zero otherwise, s = sqrt(original dim); squared row norms are
/// preserved in expectation. With identity_fallback and target_dim equal to
/// the original dimension the input is densified unchanged.
Mat sparse_random_project(const LibsvmDataset& ds, Eigen::Index target_dim,
                          SeededRng& rng, bool identity_fallback = false);

}  // namespace minimax
