#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace claimsearch {

using Json = nlohmann::ordered_json;

// Calls fn for every non-blank line; parse errors carry the line number.
void for_each_jsonl(const std::string& path, const std::function<void(const Json&)>& fn);

std::string to_jsonl(const std::vector<Json>& rows);

// Files under `path` with the given extension, sorted; `path` itself if it
// is a regular file.
std::vector<std::string> list_files(const std::string& path, const std::string& extension);

}  // namespace claimsearch
