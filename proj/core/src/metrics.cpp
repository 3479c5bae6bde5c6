#include "lsmo/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace lsmo {

std::string format_double(double v) {
  char buf[40];
  // 17 significant digits round-trip any finite double; prefer the shortest
  // precision that still parses back exactly
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::string>& header_comments)
    : path_(path), out_(path), n_columns_(columns.size()) {
  if (!out_) throw std::runtime_error("csv: cannot write " + path);
  for (const auto& c : header_comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) {
    throw std::runtime_error("csv: row width mismatch in " + path_);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
}

void write_eval_metrics(const std::string& path, const std::vector<EvalRow>& rows) {
  // decoded points wider than 8 dims are truncated here; full trajectories
  // go to their own per-z files
  int point_cols = 0;
  int z_cols = 1;
  for (const auto& r : rows) {
    point_cols = std::max(point_cols,
                          static_cast<int>(std::min<Eigen::Index>(r.point.size(), 8)));
    z_cols = std::max(z_cols, static_cast<int>(r.z.size()));
  }
  std::vector<std::string> columns{"seed", "z_index"};
  for (int c = 0; c < z_cols; ++c) columns.push_back("z" + std::to_string(c));
  for (int c = 0; c < point_cols; ++c) columns.push_back("x" + std::to_string(c + 1));
  columns.push_back("score");

  CsvWriter csv(path, columns);
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.seed), std::to_string(r.z_index)};
    for (int c = 0; c < z_cols; ++c) {
      cells.push_back(c < r.z.size() ? format_double(r.z(c)) : "0");
    }
    for (int c = 0; c < point_cols; ++c) {
      cells.push_back(c < r.point.size() ? format_double(r.point(c)) : "");
    }
    cells.push_back(format_double(r.score));
    csv.row(cells);
  }
}

void write_eval_summary(const std::string& path, const std::string& label,
                        const Eigen::VectorXd& pooled_scores) {
  const double mean = pooled_scores.mean();
  const double var =
      (pooled_scores.array() - mean).square().sum() / pooled_scores.size();
  CsvWriter csv(path, {"label", "mean", "std", "n"},
                {"scores pooled across all seeds before computing mean/std"});
  csv.row({label, format_double(mean), format_double(std::sqrt(var)),
           std::to_string(pooled_scores.size())});
}

void write_train_curves(const std::string& path, const TrainReport& report) {
  std::vector<std::string> columns{"epoch", "loss"};
  for (Eigen::Index c = 0; c < report.kl_per_channel.cols(); ++c) {
    columns.push_back("kl_" + std::to_string(c));
  }
  CsvWriter csv(path, columns);
  for (std::size_t e = 0; e < report.loss.size(); ++e) {
    std::vector<std::string> cells{std::to_string(e), format_double(report.loss[e])};
    for (Eigen::Index c = 0; c < report.kl_per_channel.cols(); ++c) {
      cells.push_back(
          format_double(report.kl_per_channel(static_cast<Eigen::Index>(e), c)));
    }
    csv.row(cells);
  }
}

void write_timing(const std::string& path,
                  const std::vector<std::pair<std::uint64_t, double>>& seed_seconds) {
  CsvWriter csv(path, {"seed", "wall_time_sec"},
                {"wall-clock time; the only environment-dependent output"});
  for (const auto& [seed, sec] : seed_seconds) {
    csv.row({std::to_string(seed), format_double(sec)});
  }
}

}  // namespace lsmo
