#include "sbs/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sbs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw IoError(path.string() + ": empty file");
  return rows;
}

double cell_value(const std::filesystem::path& path, const std::string& cell, std::size_t row) {
  double v = 0.0;
  if (!parse_number(cell, v))
    throw IoError(path.string() + ": non-numeric value '" + cell + "' on data row " +
                  std::to_string(row));
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

models::LogisticData read_logistic_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  const auto& header = rows.front();
  std::size_t ycol = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") ycol = c;
  }
  if (ycol == header.size()) throw IoError(path.string() + ": no column named 'y'");
  models::LogisticData data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != ycol) data.names.push_back(header[c]);
  }
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  data.x.resize(n, static_cast<Eigen::Index>(data.names.size()));
  data.y.resize(n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw IoError(path.string() + ": wrong field count on data row " + std::to_string(r));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const double v = cell_value(path, rows[r][c], r);
      if (c == ycol) {
        if (v != 0.0 && v != 1.0) throw IoError(path.string() + ": response must be 0/1");
        data.y(static_cast<Eigen::Index>(r - 1)) = v;
      } else {
        data.x(static_cast<Eigen::Index>(r - 1), col++) = v;
      }
    }
  }
  return data;
}

void write_logistic_csv(const std::filesystem::path& path, const models::LogisticData& data) {
  auto out = open_out(path);
  out << "y";
  for (const auto& name : data.names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y(i));
    for (Eigen::Index c = 0; c < data.p(); ++c) out << ',' << format_double(data.x(i, c));
    out << '\n';
  }
}

Eigen::MatrixXd read_lca_csv(const std::filesystem::path& path) {
  auto rows = read_rows(path);
  double probe = 0.0;
  if (!parse_number(rows.front().front(), probe)) rows.erase(rows.begin());
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  const std::size_t q = rows.front().size();
  Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(q));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != q)
      throw IoError(path.string() + ": wrong field count on data row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < q; ++c) {
      const double v = cell_value(path, rows[r][c], r + 1);
      if (v != 0.0 && v != 1.0) throw IoError(path.string() + ": entries must be 0/1");
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return y;
}

void write_lca_csv(const std::filesystem::path& path, const Eigen::MatrixXd& y) {
  auto out = open_out(path);
  for (Eigen::Index j = 0; j < y.cols(); ++j) out << (j ? "," : "") << "item" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) out << (j ? "," : "") << static_cast<int>(y(i, j));
    out << '\n';
  }
}

models::EdgeData read_edge_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  const auto& header = rows.front();
  if (header.size() < 3 || header[0] != "i" || header[1] != "j" || header[2] != "y")
    throw IoError(path.string() + ": header must start with i,j,y");
  models::EdgeData data;
  data.names.assign(header.begin() + 3, header.end());
  const auto dcount = static_cast<Eigen::Index>(rows.size() - 1);
  const auto p = static_cast<Eigen::Index>(data.names.size());
  data.x.resize(dcount, p);
  data.y.resize(dcount);
  int max_node = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw IoError(path.string() + ": wrong field count on data row " + std::to_string(r));
    const double i = cell_value(path, rows[r][0], r);
    const double j = cell_value(path, rows[r][1], r);
    if (i < 1 || j < 1 || i != std::floor(i) || j != std::floor(j))
      throw IoError(path.string() + ": node ids must be positive integers");
    data.dyads.emplace_back(static_cast<int>(i) - 1, static_cast<int>(j) - 1);
    max_node = std::max({max_node, static_cast<int>(i), static_cast<int>(j)});
    data.y(static_cast<Eigen::Index>(r - 1)) = cell_value(path, rows[r][2], r);
    for (Eigen::Index c = 0; c < p; ++c)
      data.x(static_cast<Eigen::Index>(r - 1), c) =
          cell_value(path, rows[r][static_cast<std::size_t>(c) + 3], r);
  }
  data.n = max_node;
  try {
    data.finalize();
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return data;
}

void write_edge_csv(const std::filesystem::path& path, const models::EdgeData& data) {
  auto out = open_out(path);
  out << "i,j,y";
  for (const auto& name : data.names) out << ',' << name;
  out << '\n';
  for (std::size_t d = 0; d < data.dyads.size(); ++d) {
    const auto di = static_cast<Eigen::Index>(d);
    out << data.dyads[d].first + 1 << ',' << data.dyads[d].second + 1 << ','
        << static_cast<int>(data.y(di));
    for (Eigen::Index c = 0; c < data.p(); ++c) out << ',' << format_double(data.x(di, c));
    out << '\n';
  }
}

void write_sample_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      std::span<const double> weights,
                      const std::vector<std::vector<double>>& rows) {
  if (weights.size() != rows.size())
    throw std::invalid_argument("write_sample_csv: weights and rows differ in length");
  auto out = open_out(path);
  out << "weight";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t m = 0; m < rows.size(); ++m) {
    out << format_double(weights[m]);
    for (double v : rows[m]) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace sbs
