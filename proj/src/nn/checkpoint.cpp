#include "nn/checkpoint.hpp"

#include "common/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace flexmesh::nn {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'X', 'M', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::ostream& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path)
{
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        fail(ErrorCode::Parse, "truncated checkpoint '" + path + "'");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const NamedArrays& arrays)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write checkpoint '" + path.string() + "'");
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
    for (const auto& [name, m] : arrays) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint32_t>(out, 2);
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
    }
    if (!out) fail(ErrorCode::Io, "write failed for checkpoint '" + path.string() + "'");
}

NamedArrays load_checkpoint(const std::filesystem::path& path)
{
    const std::string p = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open checkpoint '" + p + "'");
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        fail(ErrorCode::Parse, "'" + p + "' is not a checkpoint file");
    const auto version = get<std::uint32_t>(in, p);
    if (version != kCheckpointVersion)
        fail(ErrorCode::Parse, "unsupported checkpoint version " + std::to_string(version) + " in '" + p + "'");
    const auto count = get<std::uint32_t>(in, p);
    NamedArrays arrays;
    for (std::uint32_t e = 0; e < count; ++e) {
        const auto len = get<std::uint32_t>(in, p);
        if (len > 4096) fail(ErrorCode::Parse, "implausible array name length in '" + p + "'");
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) fail(ErrorCode::Parse, "truncated checkpoint '" + p + "'");
        const auto rank = get<std::uint32_t>(in, p);
        if (rank != 2) fail(ErrorCode::Parse, "array '" + name + "' has unsupported rank " + std::to_string(rank));
        const auto rows = get<std::uint64_t>(in, p);
        const auto cols = get<std::uint64_t>(in, p);
        if (rows > (1u << 28) || cols > (1u << 28) || rows * cols > (1u << 28))
            fail(ErrorCode::Parse, "array '" + name + "' is implausibly large");
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>(in, p);
        arrays.emplace_back(std::move(name), std::move(m));
    }
    return arrays;
}

const Matrix& find_array(const NamedArrays& arrays, const std::string& name)
{
    for (const auto& [n, m] : arrays)
        if (n == name) return m;
    fail(ErrorCode::Parse, "checkpoint has no array named '" + name + "'");
}

} // namespace flexmesh::nn
