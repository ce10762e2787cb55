#include "common/jsonl.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {

void for_each_jsonl(const std::string& path, const std::function<void(const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(row);
  }
}

std::string to_jsonl(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<std::string> list_files(const std::string& path, const std::string& extension) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return {path};
  if (!fs::is_directory(path, ec)) throw Error(ErrorCode::Io, "no such file or directory: " + path);
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace claimsearch
