#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fracot/dnmap.hpp"
#include "fracot/mesh.hpp"

namespace fracot {

// Comma-separated table with a header row; doubles printed with %.17g.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(int v);
  CsvWriter& operator<<(const std::string& v);
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

std::string format_double(double v);

// Node coordinates followed by one column per named field.
void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<std::string>& names,
                     const std::vector<const Eigen::VectorXd*>& fields);

// Rows are W2 nodes, columns W1 nodes; the header carries column node coordinates.
void write_dn_csv(const std::filesystem::path& path, const Mesh& mesh, const DNMatrix& dn);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fracot
