#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace flexmesh::nn {

using Matrix = Eigen::MatrixXd;

/// Named gradient buffers, shaped like the parameters they belong to.
class GradStore
{
public:
    /// Returns the buffer for `name`, zero-initialized to the given shape on
    /// first access.
    Matrix& at(const std::string& name, Eigen::Index rows, Eigen::Index cols);
    const Matrix* find(const std::string& name) const;
    bool contains(const std::string& name) const { return m_grads.count(name) != 0; }

    void clear() { m_grads.clear(); }
    const std::map<std::string, Matrix>& entries() const { return m_grads; }

    GradStore& operator+=(const GradStore& o);

private:
    std::map<std::string, Matrix> m_grads;
};

struct AdamOptions
{
    double lr = 0.5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Trainable tensors by name. Shapes are fixed at creation; adam_step is
/// the only mutation point during optimization.
class ParamStore
{
public:
    /// Creates a parameter; throws if the name already exists.
    Matrix& create(const std::string& name, Eigen::Index rows, Eigen::Index cols);

    const Matrix& get(const std::string& name) const;
    Matrix& get_mut(const std::string& name);
    bool contains(const std::string& name) const { return m_entries.count(name) != 0; }

    std::vector<std::string> names() const;
    std::size_t scalar_count() const;
    long step_count() const { return m_step; }

    /// Bias-corrected Adam update. Parameters without a gradient entry are
    /// treated as having a zero gradient (moments still decay).
    void adam_step(const GradStore& grads, const AdamOptions& options);

    /// Flat view in name order, used by checkpoints and finite-difference tests.
    std::vector<std::pair<std::string, Matrix>> values() const;
    void assign(const std::vector<std::pair<std::string, Matrix>>& values);

    const Matrix& first_moment(const std::string& name) const;
    const Matrix& second_moment(const std::string& name) const;

private:
    struct Entry
    {
        Matrix value;
        Matrix m;
        Matrix v;
    };
    const Entry& entry(const std::string& name) const;

    std::map<std::string, Entry> m_entries;
    long m_step = 0;
};

} // namespace flexmesh::nn
