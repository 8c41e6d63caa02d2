#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace flexmesh {

/// Seeded random stream. Subsystems derive their own stream with split()
/// so that adding draws in one place never shifts another's sequence.
class Rng
{
public:
    explicit Rng(std::uint64_t seed)
        : m_seed(seed)
        , m_engine(seed)
    {}

    Rng split(std::string_view tag) const;

    double normal() { return m_normal(m_engine); }
    double uniform() { return m_uniform(m_engine); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t seed() const { return m_seed; }
    std::mt19937_64& engine() { return m_engine; }

private:
    std::uint64_t m_seed;
    std::mt19937_64 m_engine;
    std::normal_distribution<double> m_normal{0.0, 1.0};
    std::uniform_real_distribution<double> m_uniform{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace flexmesh
