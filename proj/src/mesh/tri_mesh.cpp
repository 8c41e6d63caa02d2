#include "mesh/tri_mesh.hpp"

#include "common/error.hpp"

#include <string>
#include <unordered_set>

namespace flexmesh::mesh {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const Vec2 e1 = b - a;
    const Vec2 e2 = c - a;
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

TriMesh::TriMesh(Positions vertices, std::vector<Face> faces, std::vector<int> keypoint_ids)
    : m_vertices(std::move(vertices))
    , m_faces(std::move(faces))
    , m_keypoints(std::move(keypoint_ids))
{
    const int n = vertex_count();
    require(n >= 3, ErrorCode::InvalidArgument, "mesh needs at least 3 vertices");
    require(!m_faces.empty(), ErrorCode::InvalidArgument, "mesh has no faces");
    require(all_finite(m_vertices), ErrorCode::NonFinite, "mesh vertices contain non-finite values");

    for (std::size_t f = 0; f < m_faces.size(); ++f) {
        for (int v : m_faces[f]) {
            if (v < 0 || v >= n)
                fail(ErrorCode::IndexOutOfRange,
                     "face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                         " but the mesh has " + std::to_string(n) + " vertices");
        }
        const auto& t = m_faces[f];
        const double a = signed_area(vertex(t[0]), vertex(t[1]), vertex(t[2]));
        if (std::abs(a) <= kDegenerateArea)
            fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " is degenerate (area " +
                                                std::to_string(a) + ")");
        if (a < 0)
            fail(ErrorCode::InvalidArgument,
                 "face " + std::to_string(f) + " has negative orientation; all faces must share "
                                               "positive signed area");
    }

    std::unordered_set<int> seen;
    for (int k : m_keypoints) {
        if (k < 0 || k >= n)
            fail(ErrorCode::IndexOutOfRange, "keypoint " + std::to_string(k) +
                                                 " is out of range for " + std::to_string(n) +
                                                 " vertices");
        if (!seen.insert(k).second)
            fail(ErrorCode::DuplicateKeypoint, "keypoint " + std::to_string(k) + " listed twice");
    }
}

Positions TriMesh::keypoint_positions() const
{
    return gather_keypoints(m_vertices);
}

Positions TriMesh::gather_keypoints(const Positions& vertices) const
{
    require(vertices.rows() == vertex_count(), ErrorCode::ShapeMismatch,
            "vertex set does not match mesh size");
    Positions out(keypoint_count(), 2);
    for (int i = 0; i < keypoint_count(); ++i)
        out.row(i) = vertices.row(m_keypoints[static_cast<std::size_t>(i)]);
    return out;
}

bool TriMesh::operator==(const TriMesh& other) const
{
    return m_vertices == other.m_vertices && m_faces == other.m_faces &&
           m_keypoints == other.m_keypoints;
}

} // namespace flexmesh::mesh
