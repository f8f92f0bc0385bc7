#include "ggdr/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "ggdr/error.hpp"
#include "ggdr/manifold.hpp"

namespace ggdr::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string sanitize_id(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("sample") : out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<double> row;
    for (std::string_view cell : split(body, ',')) {
      cell = trim(cell);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw Error(ErrorKind::Parse, where(path, lineno) + ": bad number '" +
                                          std::string(cell) + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::Parse,
                  where(path, lineno) + ": expected " +
                      std::to_string(rows.front().size()) + " columns, got " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, path.string() + ": empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_int_matrix_csv(const fs::path& path, const IntMatrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  finish(out, path);
}

LabeledDataset read_dataset(const fs::path& dir,
                            std::optional<Eigen::Index> order,
                            DatasetLoadReport* report) {
  const fs::path manifest = dir / "manifest.tsv";
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.string());
  LabeledDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, '\t');
    if (fields.size() != 4) {
      throw Error(ErrorKind::Parse, where(manifest, lineno) +
                                        ": expected 4 tab-separated fields, got " +
                                        std::to_string(fields.size()));
    }
    if (lineno == 1 && trim(fields[0]) == "id" && trim(fields[1]) == "label") {
      continue;
    }
    const std::string id(trim(fields[0]));
    const std::string_view label_text = trim(fields[1]);
    const std::string_view mode = trim(fields[2]);
    const fs::path file = dir / std::string(trim(fields[3]));

    Label label = 0;
    const auto [ptr, ec] = std::from_chars(
        label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc() || ptr != label_text.data() + label_text.size() ||
        label_text.empty()) {
      throw Error(ErrorKind::Parse, where(manifest, lineno) +
                                        ": label must be an integer, got '" +
                                        std::string(label_text) + "'");
    }

    const Matrix m = read_matrix_csv(file);
    const std::size_t index = ds.samples.size();
    if (mode == "raw") {
      if (!order) {
        throw Error(ErrorKind::InvalidArgument,
                    "raw sample '" + id + "' needs a subspace order", index);
      }
      try {
        ds.samples.push_back(build_subspace(
            m, *order, report ? &report->health : nullptr));
      } catch (const Error& e) {
        throw Error(e.kind(), file.string() + ": " + e.what(), index);
      }
    } else if (mode == "basis") {
      if (order && m.cols() != *order) {
        throw Error(ErrorKind::DimensionMismatch,
                    file.string() + ": basis has " + std::to_string(m.cols()) +
                        " columns, expected order " + std::to_string(*order),
                    index);
      }
      if (m.cols() > m.rows()) {
        throw Error(ErrorKind::InvalidShape,
                    file.string() + ": basis has more columns than rows", index);
      }
      const double err = orthonormality_error(m);
      if (!(err <= kBasisRepairTol)) {
        throw Error(ErrorKind::NotOrthonormal,
                    file.string() + ": basis deviates from orthonormal by " +
                        std::to_string(err),
                    index);
      }
      if (err <= kOrthonormalTol) {
        ds.samples.emplace_back(m);
      } else {
        ds.samples.emplace_back(orthonormalize(m).q);
        if (report && err > kBasisAcceptTol) ++report->repaired_bases;
      }
    } else {
      throw Error(ErrorKind::Parse, where(manifest, lineno) +
                                        ": mode must be raw or basis, got '" +
                                        std::string(mode) + "'");
    }
    ds.labels.push_back(label);
    ds.provenance.push_back(id);
  }
  if (ds.samples.empty()) {
    throw Error(ErrorKind::Parse, manifest.string() + ": no samples listed");
  }
  ds.validate();
  return ds;
}

void write_dataset(const fs::path& dir, const LabeledDataset& ds) {
  ds.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string());
  const fs::path manifest = dir / "manifest.tsv";
  std::ofstream out = open_out(manifest);
  out << "id\tlabel\tmode\tpath\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::string id = ds.provenance.empty()
                               ? "s" + std::to_string(i)
                               : sanitize_id(ds.provenance[i]);
    const std::string file = id + ".csv";
    write_matrix_csv(dir / file, ds.samples[i].basis());
    out << id << '\t' << ds.labels[i] << "\tbasis\t" << file << '\n';
  }
  finish(out, manifest);
}

void write_trace_csv(
    const fs::path& path, const OptimTrace& trace,
    const std::vector<std::pair<std::string, std::string>>& params) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : params) out << "# " << key << '=' << value << '\n';
  out << "iter,cost,grad_norm,step,backtracks,skipped_pairs\n";
  for (const auto& r : trace) {
    out << r.iter << ',' << format_double(r.cost) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.step) << ','
        << r.backtracks << ',' << r.skipped_pairs << '\n';
  }
  finish(out, path);
}

void write_predictions_csv(const fs::path& path,
                           const std::vector<PredictionRow>& rows) {
  std::ofstream out = open_out(path);
  out << "id,true,pred,nn_distance\n";
  for (const auto& r : rows) {
    out << r.id << ',' << r.truth << ',' << r.pred << ','
        << format_double(r.nn_distance) << '\n';
  }
  finish(out, path);
}

}  // namespace ggdr::io
