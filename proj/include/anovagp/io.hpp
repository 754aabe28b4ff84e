#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace anovagp {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;
};

/// Numeric CSV with one header line. Throws DataError on unreadable files,
/// ragged rows or non-numeric cells.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);

/// CSV of preformatted cells (labels mixed with numbers).
void write_text_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

} // namespace anovagp
