#include "mesh/mesh_io.hpp"

#include "common/error.hpp"
#include "common/json_util.hpp"

#include <limits>
#include <string>

namespace flexmesh::mesh {

namespace {

int index_value(const nlohmann::json& v, const std::string& what)
{
    if (!v.is_number_integer()) fail(ErrorCode::Parse, what + ": expected an integer index");
    const auto x = v.get<long long>();
    if (x < 0 || x > std::numeric_limits<int>::max())
        fail(ErrorCode::IndexOutOfRange, what + ": index " + std::to_string(x) + " out of range");
    return static_cast<int>(x);
}

} // namespace

TriMesh mesh_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object()) fail(ErrorCode::Parse, "mesh document must be a JSON object");
    for (const char* key : {"vertices", "faces", "keypoints"})
        if (!doc.contains(key)) fail(ErrorCode::Parse, std::string("mesh is missing \"") + key + "\"");

    Positions vertices = json_util::points(doc["vertices"], "vertices");

    const auto& jf = doc["faces"];
    if (!jf.is_array()) fail(ErrorCode::Parse, "faces: expected an array");
    std::vector<Face> faces;
    faces.reserve(jf.size());
    for (std::size_t f = 0; f < jf.size(); ++f) {
        const auto& tri = jf[f];
        const std::string what = "faces[" + std::to_string(f) + "]";
        if (!tri.is_array() || tri.size() != 3) fail(ErrorCode::Parse, what + ": expected [i, j, k]");
        faces.push_back({index_value(tri[0], what), index_value(tri[1], what), index_value(tri[2], what)});
    }

    const auto& jk = doc["keypoints"];
    if (!jk.is_array()) fail(ErrorCode::Parse, "keypoints: expected an array");
    std::vector<int> keypoints;
    for (std::size_t i = 0; i < jk.size(); ++i)
        keypoints.push_back(index_value(jk[i], "keypoints[" + std::to_string(i) + "]"));

    return TriMesh(std::move(vertices), std::move(faces), std::move(keypoints));
}

nlohmann::json mesh_to_json(const TriMesh& mesh)
{
    nlohmann::json doc;
    doc["vertices"] = json_util::to_json(mesh.vertices());
    auto faces = nlohmann::json::array();
    for (const auto& f : mesh.faces()) faces.push_back({f[0], f[1], f[2]});
    doc["faces"] = std::move(faces);
    doc["keypoints"] = mesh.keypoint_ids();
    return doc;
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    const auto doc = json_util::read_file(path);
    try {
        return mesh_from_json(doc);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path)
{
    json_util::write_file(path, mesh_to_json(mesh));
}

} // namespace flexmesh::mesh
