#include "deform/solver.hpp"

#include "common/error.hpp"

#include <string>

namespace flexmesh::deform {

FactorizedSystem::FactorizedSystem(std::shared_ptr<const DifferentialOperators> ops, double weight)
    : m_ops(std::move(ops))
    , m_weight(weight)
{
    require(m_ops != nullptr, ErrorCode::InvalidArgument, "operators are null");
    require(std::isfinite(weight) && weight > 0, ErrorCode::InvalidArgument,
            "constraint weight must be positive and finite");
    const auto& keypoints = mesh().keypoint_ids();
    require(!keypoints.empty(), ErrorCode::SingularSystem,
            "at least one keypoint is required; without constraints the system is singular "
            "under global translation");

    const SparseMatrix& lap = m_ops->laplacian();
    m_system = SparseMatrix(lap.transpose()) * lap;
    for (int k : keypoints) m_system.coeffRef(k, k) += weight;
    m_system.makeCompressed();

    m_factor = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>();
    m_factor->compute(m_system);
    if (m_factor->info() != Eigen::Success)
        fail(ErrorCode::SingularSystem,
             "normal-equations matrix is not positive definite (a mesh component may lack a keypoint)");
}

Positions FactorizedSystem::rhs(const JacobianField& jac, const Positions& targets) const
{
    require(jac.size() == static_cast<std::size_t>(m_ops->face_count()), ErrorCode::ShapeMismatch,
            "jacobian field has " + std::to_string(jac.size()) + " faces, mesh has " +
                std::to_string(m_ops->face_count()));
    require(targets.rows() == mesh().keypoint_count(), ErrorCode::ShapeMismatch,
            "expected " + std::to_string(mesh().keypoint_count()) + " keypoint targets, got " +
                std::to_string(targets.rows()));
    Positions b = m_ops->laplacian().transpose() * m_ops->divergence(jac);
    const auto& keypoints = mesh().keypoint_ids();
    for (std::size_t i = 0; i < keypoints.size(); ++i)
        b.row(keypoints[i]) += m_weight * targets.row(static_cast<Eigen::Index>(i));
    return b;
}

Positions FactorizedSystem::apply_inverse(const Positions& b) const
{
    require(b.rows() == m_ops->vertex_count(), ErrorCode::ShapeMismatch, "right-hand side size mismatch");
    Positions x(b.rows(), 2);
    x.col(0) = m_factor->solve(b.col(0));
    x.col(1) = m_factor->solve(b.col(1));
    return x;
}

FactorizedSystem assemble(std::shared_ptr<const DifferentialOperators> ops, double weight)
{
    return FactorizedSystem(std::move(ops), weight);
}

Positions solve(const FactorizedSystem& sys, const JacobianField& jac, const KeypointConstraint& constraint)
{
    require(jac.is_finite(), ErrorCode::NonFinite, "jacobian field contains non-finite entries");
    require(all_finite(constraint.targets), ErrorCode::NonFinite, "keypoint targets contain non-finite values");
    require(constraint.weight == sys.weight(), ErrorCode::InvalidArgument,
            "constraint weight differs from the weight the system was factorized with");
    return sys.apply_inverse(sys.rhs(jac, constraint.targets));
}

SolveGradients solve_adjoint(const FactorizedSystem& sys, const Positions& grad_vertices)
{
    require(grad_vertices.rows() == sys.operators().vertex_count(), ErrorCode::ShapeMismatch,
            "vertex gradient does not match vertex count");
    const Positions y = sys.apply_inverse(grad_vertices);
    const auto& ops = sys.operators();
    SolveGradients out;
    out.jacobian = ops.divergence_adjoint(Positions(ops.laplacian() * y));
    out.targets = sys.weight() * sys.mesh().gather_keypoints(y);
    return out;
}

} // namespace flexmesh::deform
