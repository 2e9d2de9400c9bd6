#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmkdv::studies {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form; identical bits give identical text.
std::string fmt(double v);

void write_json(const std::filesystem::path& path, const json& body);

// CSV with the metadata object rendered as "# key: value" lines above the
// header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const json& metadata, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t width_;
};

}  // namespace qmkdv::studies
