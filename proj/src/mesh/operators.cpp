#include "mesh/operators.hpp"

#include "common/error.hpp"

#include <string>

namespace flexmesh::mesh {

bool JacobianField::is_finite() const
{
    for (const auto& m : per_face)
        if (!m.allFinite()) return false;
    return true;
}

JacobianField& JacobianField::operator+=(const JacobianField& o)
{
    require(o.size() == size(), ErrorCode::ShapeMismatch, "jacobian field size mismatch");
    for (std::size_t f = 0; f < size(); ++f) per_face[f] += o.per_face[f];
    return *this;
}

JacobianField& JacobianField::operator-=(const JacobianField& o)
{
    require(o.size() == size(), ErrorCode::ShapeMismatch, "jacobian field size mismatch");
    for (std::size_t f = 0; f < size(); ++f) per_face[f] -= o.per_face[f];
    return *this;
}

JacobianField& JacobianField::operator*=(double s)
{
    for (auto& m : per_face) m *= s;
    return *this;
}

JacobianField operator+(JacobianField a, const JacobianField& b) { return a += b; }
JacobianField operator-(JacobianField a, const JacobianField& b) { return a -= b; }
JacobianField operator*(double s, JacobianField a) { return a *= s; }

Eigen::VectorXd JacobianField::flatten() const
{
    Eigen::VectorXd v(4 * static_cast<Eigen::Index>(size()));
    for (std::size_t f = 0; f < size(); ++f) {
        const auto i = static_cast<Eigen::Index>(4 * f);
        v[i] = per_face[f](0, 0);
        v[i + 1] = per_face[f](0, 1);
        v[i + 2] = per_face[f](1, 0);
        v[i + 3] = per_face[f](1, 1);
    }
    return v;
}

JacobianField JacobianField::unflatten(const Eigen::VectorXd& v)
{
    require(v.size() % 4 == 0, ErrorCode::ShapeMismatch, "flattened jacobian length not a multiple of 4");
    JacobianField out(static_cast<std::size_t>(v.size() / 4));
    for (std::size_t f = 0; f < out.size(); ++f) {
        const auto i = static_cast<Eigen::Index>(4 * f);
        out[f] << v[i], v[i + 1], v[i + 2], v[i + 3];
    }
    return out;
}

double JacobianField::squared_norm() const
{
    double s = 0;
    for (const auto& m : per_face) s += m.squaredNorm();
    return s;
}

std::array<double, 3> corner_cotangents(const Vec2& a, const Vec2& b, const Vec2& c)
{
    auto cot = [](const Vec2& apex, const Vec2& p, const Vec2& q) {
        const Vec2 u = p - apex;
        const Vec2 v = q - apex;
        const double cross = u.x() * v.y() - u.y() * v.x();
        return u.dot(v) / std::abs(cross);
    };
    return {cot(a, b, c), cot(b, c, a), cot(c, a, b)};
}

DifferentialOperators::DifferentialOperators(const TriMesh& mesh)
    : m_mesh(std::make_shared<const TriMesh>(mesh))
{
    const int nf = m_mesh->face_count();
    const int nv = m_mesh->vertex_count();
    m_hat.resize(static_cast<std::size_t>(nf));
    m_area.resize(static_cast<std::size_t>(nf));

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nf) * 9);

    for (int f = 0; f < nf; ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        const Vec2 p[3] = {m_mesh->vertex(t[0]), m_mesh->vertex(t[1]), m_mesh->vertex(t[2])};
        const double area = signed_area(p[0], p[1], p[2]);
        if (area <= kDegenerateArea)
            fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " is degenerate");
        m_area[static_cast<std::size_t>(f)] = area;

        // grad phi_i = perp(p_k - p_j) / (2A) for the edge opposite corner i.
        for (int i = 0; i < 3; ++i) {
            const Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
            m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)] =
                Vec2(-e.y(), e.x()) / (2.0 * area);
        }

        const auto cot = corner_cotangents(p[0], p[1], p[2]);
        for (int i = 0; i < 3; ++i) {
            const int a = t[static_cast<std::size_t>((i + 1) % 3)];
            const int b = t[static_cast<std::size_t>((i + 2) % 3)];
            const double w = 0.5 * cot[static_cast<std::size_t>(i)];
            trips.emplace_back(a, b, -w);
            trips.emplace_back(b, a, -w);
            trips.emplace_back(a, a, w);
            trips.emplace_back(b, b, w);
        }
    }
    m_laplacian.resize(nv, nv);
    m_laplacian.setFromTriplets(trips.begin(), trips.end());
    m_laplacian.makeCompressed();
}

SparseMatrix DifferentialOperators::gradient_matrix() const
{
    std::vector<Eigen::Triplet<double>> trips;
    for (int f = 0; f < face_count(); ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        for (int i = 0; i < 3; ++i) {
            const Vec2& g = m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)];
            trips.emplace_back(2 * f, t[static_cast<std::size_t>(i)], g.x());
            trips.emplace_back(2 * f + 1, t[static_cast<std::size_t>(i)], g.y());
        }
    }
    SparseMatrix g(2 * face_count(), vertex_count());
    g.setFromTriplets(trips.begin(), trips.end());
    return g;
}

SparseMatrix DifferentialOperators::mass_matrix() const
{
    SparseMatrix m(2 * face_count(), 2 * face_count());
    std::vector<Eigen::Triplet<double>> trips;
    for (int f = 0; f < face_count(); ++f) {
        trips.emplace_back(2 * f, 2 * f, area(f));
        trips.emplace_back(2 * f + 1, 2 * f + 1, area(f));
    }
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

JacobianField DifferentialOperators::jacobians(const Positions& vertices) const
{
    require(vertices.rows() == vertex_count(), ErrorCode::ShapeMismatch,
            "vertex count " + std::to_string(vertices.rows()) + " does not match operator size " +
                std::to_string(vertex_count()));
    JacobianField out(static_cast<std::size_t>(face_count()));
    for (int f = 0; f < face_count(); ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        Mat2 j = Mat2::Zero();
        for (int i = 0; i < 3; ++i)
            j += vertices.row(t[static_cast<std::size_t>(i)]).transpose() *
                 m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)].transpose();
        out[static_cast<std::size_t>(f)] = j;
    }
    return out;
}

Positions DifferentialOperators::jacobians_adjoint(const JacobianField& grad) const
{
    require(grad.size() == static_cast<std::size_t>(face_count()), ErrorCode::ShapeMismatch,
            "jacobian gradient does not match face count");
    Positions out = Positions::Zero(vertex_count(), 2);
    for (int f = 0; f < face_count(); ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        for (int i = 0; i < 3; ++i)
            out.row(t[static_cast<std::size_t>(i)]) +=
                (grad[static_cast<std::size_t>(f)] *
                 m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)])
                    .transpose();
    }
    return out;
}

Positions DifferentialOperators::divergence(const JacobianField& jac) const
{
    require(jac.size() == static_cast<std::size_t>(face_count()), ErrorCode::ShapeMismatch,
            "jacobian field does not match face count");
    Positions out = Positions::Zero(vertex_count(), 2);
    for (int f = 0; f < face_count(); ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        const Mat2 aj = area(f) * jac[static_cast<std::size_t>(f)];
        for (int i = 0; i < 3; ++i)
            out.row(t[static_cast<std::size_t>(i)]) +=
                (aj * m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)]).transpose();
    }
    return out;
}

JacobianField DifferentialOperators::divergence_adjoint(const Positions& y) const
{
    require(y.rows() == vertex_count(), ErrorCode::ShapeMismatch, "covector does not match vertex count");
    JacobianField out(static_cast<std::size_t>(face_count()));
    for (int f = 0; f < face_count(); ++f) {
        const Face& t = m_mesh->faces()[static_cast<std::size_t>(f)];
        Mat2 g = Mat2::Zero();
        for (int i = 0; i < 3; ++i)
            g += y.row(t[static_cast<std::size_t>(i)]).transpose() *
                 m_hat[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)].transpose();
        out[static_cast<std::size_t>(f)] = area(f) * g;
    }
    return out;
}

DifferentialOperators build_operators(const TriMesh& mesh)
{
    return DifferentialOperators(mesh);
}

JacobianField compute_jacobians(const DifferentialOperators& ops, const Positions& vertices)
{
    return ops.jacobians(vertices);
}

} // namespace flexmesh::mesh
