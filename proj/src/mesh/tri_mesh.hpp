#pragma once

#include "common/types.hpp"

#include <array>
#include <vector>

namespace flexmesh::mesh {

using Face = std::array<int, 3>;

/// Faces whose |signed area| falls below this (unit-square coordinates)
/// are rejected.
inline constexpr double kDegenerateArea = 1e-12;

/// 2D triangle mesh in normalized image coordinates with designated
/// keypoint vertices. Validated on construction and immutable afterwards.
class TriMesh
{
public:
    TriMesh(Positions vertices, std::vector<Face> faces, std::vector<int> keypoint_ids);

    const Positions& vertices() const { return m_vertices; }
    const std::vector<Face>& faces() const { return m_faces; }
    const std::vector<int>& keypoint_ids() const { return m_keypoints; }

    int vertex_count() const { return static_cast<int>(m_vertices.rows()); }
    int face_count() const { return static_cast<int>(m_faces.size()); }
    int keypoint_count() const { return static_cast<int>(m_keypoints.size()); }

    Vec2 vertex(int i) const { return m_vertices.row(i).transpose(); }

    /// Rest positions of the keypoints, in keypoint order.
    Positions keypoint_positions() const;

    /// Gathers the keypoint rows of an arbitrary vertex set.
    Positions gather_keypoints(const Positions& vertices) const;

    bool operator==(const TriMesh& other) const;

private:
    Positions m_vertices;
    std::vector<Face> m_faces;
    std::vector<int> m_keypoints;
};

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

} // namespace flexmesh::mesh
