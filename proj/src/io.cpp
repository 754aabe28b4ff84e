#include "anovagp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "anovagp/errors.hpp"

namespace anovagp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r\"");
    const auto last = cell.find_last_not_of(" \t\r\"");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t row) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw DataError(path.string() + ": non-numeric value '" + cell + "' on line " +
                    std::to_string(row + 2));
  }
  return value;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path.string() + ": missing header line");
  }
  table.header = split_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw DataError(path.string() + ": line " + std::to_string(rows.size() + 2) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      row.push_back(parse_cell(cell, path, rows.size()));
    }
    rows.push_back(std::move(row));
  }
  table.data.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw DataError("cannot format number");
  }
  return std::string(buffer, ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
  if (static_cast<std::size_t>(data.cols()) != header.size()) {
    throw DataError("CSV header does not match the number of columns");
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << (c ? "," : "") << header[c];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      out << (c ? "," : "") << format_double(data(r, c));
    }
    out << '\n';
  }
}

void write_text_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << (c ? "," : "") << cells[c];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw DataError("CSV row does not match the header");
    }
    emit(row);
  }
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << value.dump(2) << '\n';
}

} // namespace anovagp
