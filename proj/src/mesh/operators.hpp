#pragma once

#include "mesh/tri_mesh.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <vector>

namespace flexmesh::mesh {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// One 2x2 matrix per face. Entry (c, d) is the derivative of output
/// coordinate c along rest direction d, so an affine map x -> Ax + b
/// yields A on every face.
struct JacobianField
{
    std::vector<Mat2> per_face;

    JacobianField() = default;
    explicit JacobianField(std::size_t faces, const Mat2& fill = Mat2::Zero())
        : per_face(faces, fill)
    {}

    static JacobianField identity(std::size_t faces) { return JacobianField(faces, Mat2::Identity()); }

    std::size_t size() const { return per_face.size(); }
    Mat2& operator[](std::size_t f) { return per_face[f]; }
    const Mat2& operator[](std::size_t f) const { return per_face[f]; }

    bool is_finite() const;

    JacobianField& operator+=(const JacobianField& o);
    JacobianField& operator-=(const JacobianField& o);
    JacobianField& operator*=(double s);

    /// Flattened face-major, row-major 2x2.
    Eigen::VectorXd flatten() const;
    static JacobianField unflatten(const Eigen::VectorXd& v);

    /// Sum of squared Frobenius norms over faces.
    double squared_norm() const;
};

JacobianField operator+(JacobianField a, const JacobianField& b);
JacobianField operator-(JacobianField a, const JacobianField& b);
JacobianField operator*(double s, JacobianField a);

/// Per-face gradient, face areas and cotangent Laplacian of a rest mesh.
/// The gradient is built from rest edge vectors, so the rest vertices map
/// to the identity Jacobian on every face.
class DifferentialOperators
{
public:
    explicit DifferentialOperators(const TriMesh& mesh);

    const TriMesh& mesh() const { return *m_mesh; }
    int vertex_count() const { return m_mesh->vertex_count(); }
    int face_count() const { return m_mesh->face_count(); }

    /// Gradients of the three hat functions on face f, in corner order.
    const std::array<Vec2, 3>& hat_gradients(int f) const { return m_hat[static_cast<std::size_t>(f)]; }
    double area(int f) const { return m_area[static_cast<std::size_t>(f)]; }
    const std::vector<double>& areas() const { return m_area; }

    /// Symmetric positive semidefinite cotangent Laplacian,
    /// L_ij = -1/2 (cot a_ij + cot b_ij), rows summing to zero.
    const SparseMatrix& laplacian() const { return m_laplacian; }

    /// (2F x V) gradient matrix; row 2f+d holds d/dx_d on face f.
    SparseMatrix gradient_matrix() const;

    /// (2F x 2F) diagonal mass matrix, face areas repeated per component.
    SparseMatrix mass_matrix() const;

    /// J_f = sum_k v_k (grad phi_k)^T.
    JacobianField jacobians(const Positions& vertices) const;

    /// Transpose of jacobians(): maps dLoss/dJ to dLoss/dV.
    Positions jacobians_adjoint(const JacobianField& grad) const;

    /// grad^T A J, the weighted divergence of a Jacobian field (V x 2).
    Positions divergence(const JacobianField& jac) const;

    /// Transpose of divergence(): maps a (V x 2) covector to per-face 2x2.
    JacobianField divergence_adjoint(const Positions& y) const;

private:
    std::shared_ptr<const TriMesh> m_mesh;
    std::vector<std::array<Vec2, 3>> m_hat;
    std::vector<double> m_area;
    SparseMatrix m_laplacian;
};

/// Cotangents of the interior angles at the three corners of a triangle.
std::array<double, 3> corner_cotangents(const Vec2& a, const Vec2& b, const Vec2& c);

DifferentialOperators build_operators(const TriMesh& mesh);

JacobianField compute_jacobians(const DifferentialOperators& ops, const Positions& vertices);

} // namespace flexmesh::mesh
