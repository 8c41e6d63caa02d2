#pragma once

#include "mesh/tri_mesh.hpp"

#include <json.hpp>

#include <filesystem>

namespace flexmesh::mesh {

// Mesh JSON: {"vertices": [[x, y], ...], "faces": [[i, j, k], ...],
//             "keypoints": [v, ...]}

TriMesh mesh_from_json(const nlohmann::json& doc);
nlohmann::json mesh_to_json(const TriMesh& mesh);

TriMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

} // namespace flexmesh::mesh
