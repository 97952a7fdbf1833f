#include "minimax/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace minimax {

namespace {

double parse_double(const std::string& tok, std::size_t line,
                    const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("invalid ") + what + " '" + tok + "' on line " +
                         std::to_string(line),
                     line);
  }
}

long parse_index(const std::string& tok, std::size_t line) {
  long v = 0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || v < 1)
    throw ParseError("invalid feature index '" + tok + "' on line " +
                         std::to_string(line),
                     line);
  return v;
}

}  // namespace

LibsvmDataset parse_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("parse_libsvm: cannot open " + path.string());

  LibsvmDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line

    ds.labels.push_back(parse_double(tok, line_no, "label"));
    LibsvmDataset::Row row;
    long prev_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("malformed feature token '" + tok + "' on line " +
                             std::to_string(line_no),
                         line_no);
      const long idx = parse_index(tok.substr(0, colon), line_no);
      if (idx <= prev_index)
        throw ParseError("nonmonotone feature index " + std::to_string(idx) +
                             " on line " + std::to_string(line_no),
                         line_no);
      prev_index = idx;
      const double val =
          parse_double(tok.substr(colon + 1), line_no, "feature value");
      row.push_back({static_cast<Eigen::Index>(idx - 1), val});
      ds.n_features = std::max<Eigen::Index>(ds.n_features, idx);
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Mat sparse_random_project(const LibsvmDataset& ds, Eigen::Index target_dim,
                          SeededRng& rng, bool identity_fallback) {
  if (target_dim < 1)
    throw ConfigError("sparse_random_project: target_dim must be >= 1");
  const Eigen::Index orig = ds.n_features;
  const Eigen::Index n = ds.n_rows();

  if (identity_fallback && target_dim == orig) {
    Mat out = Mat::Zero(n, orig);
    for (Eigen::Index i = 0; i < n; ++i)
      for (const auto& e : ds.rows[i]) out(i, e.index) = e.value;
    return out;
  }

  // Each original feature's projection row comes from its own seeded stream,
  // so rows are generated on demand (nothing the size of the original
  // feature space is ever materialized) and the result does not depend on
  // the order features are encountered in.
  const double s = std::sqrt(static_cast<double>(std::max<Eigen::Index>(orig, 1)));
  const double scale = std::sqrt(s / static_cast<double>(target_dim));
  const double p_nonzero = 1.0 / s;  // split evenly between +/-
  const std::uint64_t stream_base = rng.next_u64();

  Vec row(target_dim);
  auto feature_row = [&](Eigen::Index feature) -> const Vec& {
    SeededRng feature_rng(stream_base ^
                          (0x9e3779b97f4a7c15ull *
                           (static_cast<std::uint64_t>(feature) + 1)));
    for (Eigen::Index j = 0; j < target_dim; ++j) {
      const double u = feature_rng.next_uniform();
      row[j] = u < 0.5 * p_nonzero ? scale : (u < p_nonzero ? -scale : 0.0);
    }
    return row;
  };

  Mat out = Mat::Zero(n, target_dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (const auto& e : ds.rows[i])
      out.row(i) += e.value * feature_row(e.index).transpose();
  return out;
}

}  // namespace minimax
