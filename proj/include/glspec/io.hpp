#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glspec {

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string to_hex(std::uint64_t v);

// CSV, row-major, full precision (%.17g), comma separated, one matrix row per
// line. Vectors are written as a single column.
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

// Binary dump: 8-byte little-endian u64 n header, then doubles column-major.
// Square matrices store n*n entries, vectors store n.
void write_binary_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_binary_matrix(const std::filesystem::path& path);

std::string file_checksum_hex(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

// Minimal standalone log-log SVG plot with the data embedded as comments.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), positive
  std::string color = "#1f6fb2";
  bool line = true;
};

std::string render_loglog_svg(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<SvgSeries>& series);

}  // namespace glspec
