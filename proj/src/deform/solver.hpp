#pragma once

#include "mesh/operators.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace flexmesh::deform {

using mesh::DifferentialOperators;
using mesh::JacobianField;
using mesh::SparseMatrix;
using mesh::TriMesh;

inline constexpr double kDefaultConstraintWeight = 1000.0;

/// Soft keypoint targets, one row per keypoint in keypoint order.
struct KeypointConstraint
{
    Positions targets;
    double weight = kDefaultConstraintWeight;
};

/// Cholesky factorization of (L^T L + w K^T K) for a fixed keypoint set and
/// weight. One instance serves every frame and optimizer step; solve() and
/// adjoint() are const and may run concurrently.
class FactorizedSystem
{
public:
    FactorizedSystem(std::shared_ptr<const DifferentialOperators> ops, double weight);

    const DifferentialOperators& operators() const { return *m_ops; }
    const TriMesh& mesh() const { return m_ops->mesh(); }
    double weight() const { return m_weight; }

    /// Assembled normal-equations matrix (for inspection and tests).
    const SparseMatrix& system_matrix() const { return m_system; }

    /// Right-hand side L^T grad^T A J + w K^T T.
    Positions rhs(const JacobianField& jac, const Positions& targets) const;

    /// Applies the inverse of the system matrix to a (V x 2) block.
    Positions apply_inverse(const Positions& b) const;

private:
    std::shared_ptr<const DifferentialOperators> m_ops;
    double m_weight;
    SparseMatrix m_system;
    std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> m_factor;
};

FactorizedSystem assemble(std::shared_ptr<const DifferentialOperators> ops, double weight);

/// V* = argmin ||L V - grad^T A J||^2 + w ||K V - T||^2.
Positions solve(const FactorizedSystem& sys, const JacobianField& jac, const KeypointConstraint& constraint);

struct SolveGradients
{
    JacobianField jacobian;
    Positions targets;
};

/// Exact reverse-mode gradients of solve() given dLoss/dV*.
SolveGradients solve_adjoint(const FactorizedSystem& sys, const Positions& grad_vertices);

} // namespace flexmesh::deform
