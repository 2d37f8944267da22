#ifndef HSDU_IO_HPP
#define HSDU_IO_HPP

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hsdu/core.hpp"

namespace hsdu {

static_assert(std::endian::native == std::endian::little,
              "HSTS payloads are little-endian; big-endian hosts unsupported");

/// Shortest decimal form that round-trips a double (up to 17 significant
/// digits), '.' decimal point regardless of locale.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0;
  // prefer shorter representations when they round-trip
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

namespace detail {

inline void write_hsts(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>&
                           header,
                       const std::vector<Matrix>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "HSTS1\n";
  for (const auto& [key, value] : header) out << key << "=" << value << "\n";
  out << "\n";
  for (const Matrix& frame : frames)
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size() * sizeof(double)));
  if (!out) throw FormatError("write failed: " + path);
}

/// Parses the header and payload; `rows_key`/`cols_key` name the two
/// per-frame dimension fields expected in this file kind.
inline std::vector<Matrix> read_hsts(const std::string& path,
                                     const std::string& rows_key,
                                     const std::string& cols_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "HSTS1")
    throw FormatError(path + ": bad magic at byte offset 0");
  std::map<std::string, std::string> fields;
  while (std::getline(in, line) && !line.empty()) {
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path + ": malformed header line '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) {
    auto it = fields.find(key);
    if (it == fields.end())
      throw FormatError(path + ": missing header field " + key);
    return it->second;
  };
  if (get("dtype") != "f64le")
    throw FormatError(path + ": unsupported dtype " + get("dtype"));
  if (get("layout") != "frame-major,column-major")
    throw FormatError(path + ": unsupported layout " + get("layout"));
  long k = std::stol(get("k"));
  long rows = std::stol(get(rows_key));
  long cols = std::stol(get(cols_key));
  if (k < 1 || rows < 1 || cols < 1 ||
      k > 1'000'000 || rows > 10'000'000 || cols > 10'000'000 ||
      k * rows * cols > (1L << 34))
    throw FormatError(path + ": dimension overflow in header");

  std::vector<Matrix> frames;
  std::streamoff payload_start = in.tellg();
  for (long i = 0; i < k; ++i) {
    Matrix frame(rows, cols);
    in.read(reinterpret_cast<char*>(frame.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(rows * cols * 8))
      throw FormatError(path + ": truncated payload at byte offset " +
                        std::to_string(payload_start + i * rows * cols * 8 +
                                       in.gcount()));
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace detail

inline void write_sequence(const std::string& path, const FrameSequence& X) {
  detail::write_hsts(path,
                     {{"k", std::to_string(X.dims.K)},
                      {"l", std::to_string(X.dims.L)},
                      {"n", std::to_string(X.dims.N)},
                      {"dtype", "f64le"},
                      {"layout", "frame-major,column-major"}},
                     X.frames);
}

inline FrameSequence read_sequence(const std::string& path) {
  FrameSequence X;
  X.frames = detail::read_hsts(path, "l", "n");
  X.dims.K = static_cast<int>(X.frames.size());
  X.dims.L = static_cast<int>(X.frames[0].rows());
  X.dims.N = static_cast<int>(X.frames[0].cols());
  X.dims.P = 1;  // unknown from a sequence file alone
  return X;
}

inline void write_endmembers(const std::string& path,
                             const EndmemberTrajectory& S) {
  detail::write_hsts(path,
                     {{"k", std::to_string(S.size())},
                      {"l", std::to_string(S[0].rows())},
                      {"p", std::to_string(S[0].cols())},
                      {"dtype", "f64le"},
                      {"layout", "frame-major,column-major"}},
                     S);
}

inline EndmemberTrajectory read_endmembers(const std::string& path) {
  return detail::read_hsts(path, "l", "p");
}

inline void write_abundances(const std::string& path,
                             const AbundanceTrajectory& A) {
  detail::write_hsts(path,
                     {{"k", std::to_string(A.size())},
                      {"p", std::to_string(A[0].rows())},
                      {"n", std::to_string(A[0].cols())},
                      {"dtype", "f64le"},
                      {"layout", "frame-major,column-major"}},
                     A);
}

inline AbundanceTrajectory read_abundances(const std::string& path) {
  return detail::read_hsts(path, "p", "n");
}

inline void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << format_double(m(r, c));
    }
    out << "\n";
  }
}

inline Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows[0].size())
      throw FormatError(path + ": ragged CSV row " +
                        std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path + ": empty CSV");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

/// One binary 8-bit graymap (P5) per source, min-max scaled to [0,255]
/// with round-half-away-from-zero; constant maps render all-zero.
inline void export_abundance_pgm(const Matrix& A_k, int width, int height,
                                 const std::string& path_prefix) {
  const int P = static_cast<int>(A_k.rows());
  if (static_cast<long>(width) * height != A_k.cols())
    throw DimensionError("export_abundance_pgm: width*height must equal N");
  for (int p = 0; p < P; ++p) {
    double lo = A_k.row(p).minCoeff(), hi = A_k.row(p).maxCoeff();
    std::ofstream out(path_prefix + "_source" + std::to_string(p + 1) + ".pgm",
                      std::ios::binary);
    if (!out) throw FormatError("cannot open PGM for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    for (long n = 0; n < A_k.cols(); ++n) {
      unsigned char byte = 0;
      if (hi > lo)
        byte = static_cast<unsigned char>(
            std::lround(255.0 * (A_k(p, n) - lo) / (hi - lo)));
      out.put(static_cast<char>(byte));
    }
  }
}

}  // namespace hsdu

#endif
