#include "fracot/io.hpp"

#include <cstdio>

#include "fracot/errors.hpp"

namespace fracot {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  require(static_cast<bool>(out_), Errc::InvalidArgument, "cannot write " + path.string());
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << "\n";
}

void CsvWriter::sep() {
  if (filled_ > 0) out_ << ",";
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(int v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  sep();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  require(filled_ == columns_, Errc::InvalidArgument, "CSV row width does not match the header");
  out_ << "\n";
  filled_ = 0;
}

void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<std::string>& names,
                     const std::vector<const Eigen::VectorXd*>& fields) {
  std::vector<std::string> cols = {"node", "x"};
  if (mesh.dim == 2) cols.push_back("y");
  cols.insert(cols.end(), names.begin(), names.end());
  CsvWriter csv(path, cols);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    csv << i << mesh.nodes[i][0];
    if (mesh.dim == 2) csv << mesh.nodes[i][1];
    for (const auto* f : fields) csv << (*f)(i);
    csv.end_row();
  }
}

void write_dn_csv(const std::filesystem::path& path, const Mesh& mesh, const DNMatrix& dn) {
  auto label = [&](int node) {
    std::string s = "x=" + format_double(mesh.nodes[node][0]);
    if (mesh.dim == 2) s += ";y=" + format_double(mesh.nodes[node][1]);
    return s;
  };
  std::vector<std::string> cols = {"row_node", "row_coord"};
  for (int c : dn.cols) cols.push_back(label(c));
  CsvWriter csv(path, cols);
  for (std::size_t j = 0; j < dn.rows.size(); ++j) {
    csv << dn.rows[j] << label(dn.rows[j]);
    for (std::size_t i = 0; i < dn.cols.size(); ++i) csv << dn.entries(j, i);
    csv.end_row();
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::InvalidArgument, "cannot write " + path.string());
  out << text;
}

}  // namespace fracot
