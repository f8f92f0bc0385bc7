#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggdr/affinity.hpp"
#include "ggdr/optimizer.hpp"
#include "ggdr/pipeline.hpp"
#include "ggdr/types.hpp"

namespace ggdr::io {

namespace fs = std::filesystem;

/// Basis files within this ||X^T X - I||_F are accepted as-is (re-QR'd only
/// past the in-memory 1e-10 tolerance); up to kBasisRepairTol they are
/// re-orthonormalized; beyond that they are rejected.
inline constexpr double kBasisAcceptTol = 1e-6;
inline constexpr double kBasisRepairTol = 1e-3;

/// 17 significant digits ("%.17g"); parses back to the identical double.
std::string format_double(double x);

/// Comma-separated rows of decimal numbers; blank lines are skipped.
/// Throws Io when unreadable and Parse (naming file and line) on a bad
/// number or a ragged row.
Matrix read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const Matrix& m);

void write_int_matrix_csv(const fs::path& path, const IntMatrix& m);

struct DatasetLoadReport {
  std::size_t repaired_bases = 0;
  NumericalHealth health;
};

/// Reads `dir/manifest.tsv` (id, label, mode, path; tab separated, optional
/// header row, '#' comments). Labels are integers. Raw samples are reduced
/// to their first `order` left singular vectors; basis samples are checked
/// against the orthonormality ladder and must have `order` columns when it
/// is given. Ids end up in `provenance`.
LabeledDataset read_dataset(const fs::path& dir,
                            std::optional<Eigen::Index> order = std::nullopt,
                            DatasetLoadReport* report = nullptr);

/// Writes every sample in basis mode as `<id>.csv` plus the manifest. Ids
/// come from `provenance` when present (sanitized), else "s<index>".
void write_dataset(const fs::path& dir, const LabeledDataset& ds);

/// Optional `# key=value` lines, then
/// `iter,cost,grad_norm,step,backtracks,skipped_pairs`.
void write_trace_csv(
    const fs::path& path, const OptimTrace& trace,
    const std::vector<std::pair<std::string, std::string>>& params = {});

struct PredictionRow {
  std::string id;
  Label truth = 0;
  Label pred = 0;
  double nn_distance = 0.0;
};

/// Header `id,true,pred,nn_distance`.
void write_predictions_csv(const fs::path& path,
                           const std::vector<PredictionRow>& rows);

}  // namespace ggdr::io
