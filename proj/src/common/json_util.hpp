#pragma once

#include "common/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace flexmesh::json_util {

/// Parses a UTF-8 JSON file. Missing files raise ErrorCode::Io, malformed
/// content raises ErrorCode::Parse; both messages carry the path.
nlohmann::json read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// Reads a finite double; `what` names the field for diagnostics.
double finite_number(const nlohmann::json& v, const std::string& what);

Vec2 point(const nlohmann::json& v, const std::string& what);

Positions points(const nlohmann::json& arr, const std::string& what);

nlohmann::json to_json(const Positions& p);

} // namespace flexmesh::json_util
