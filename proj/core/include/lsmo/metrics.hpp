#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "lsmo/manifold.hpp"

namespace lsmo {

/// Shortest decimal that round-trips the double exactly; all CSV output goes
/// through this so identical runs produce identical bytes.
std::string format_double(double v);

/// Minimal CSV emitter with a fixed column schema per file.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::vector<std::string>& header_comments = {});

  void row(const std::vector<std::string>& cells);

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t n_columns_;
};

/// One manifold-evaluation row per (seed, z grid point).
struct EvalRow {
  std::uint64_t seed = 0;
  int z_index = 0;
  Eigen::VectorXd z;
  Eigen::VectorXd point;  // decoded point (truncated to 8 leading dims in CSV)
  double score = 0.0;
};

void write_eval_metrics(const std::string& path, const std::vector<EvalRow>& rows);

/// Pooled summary (scores pooled across seeds before the statistics).
void write_eval_summary(const std::string& path, const std::string& label,
                        const Eigen::VectorXd& pooled_scores);

void write_train_curves(const std::string& path, const TrainReport& report);

/// Wall-clock fields live only here, in clearly named columns.
void write_timing(const std::string& path,
                  const std::vector<std::pair<std::uint64_t, double>>& seed_seconds);

}  // namespace lsmo
