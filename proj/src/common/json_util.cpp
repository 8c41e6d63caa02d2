#include "common/json_util.hpp"

#include "common/error.hpp"

#include <fstream>
#include <sstream>

namespace flexmesh::json_util {

nlohmann::json read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Parse, "malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void write_file(const std::filesystem::path& path, const nlohmann::json& doc)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

double finite_number(const nlohmann::json& v, const std::string& what)
{
    if (!v.is_number()) fail(ErrorCode::Parse, what + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ErrorCode::NonFinite, what + ": non-finite value");
    return x;
}

Vec2 point(const nlohmann::json& v, const std::string& what)
{
    if (!v.is_array() || v.size() != 2) fail(ErrorCode::Parse, what + ": expected [x, y]");
    return {finite_number(v[0], what), finite_number(v[1], what)};
}

Positions points(const nlohmann::json& arr, const std::string& what)
{
    if (!arr.is_array()) fail(ErrorCode::Parse, what + ": expected an array of points");
    Positions p(static_cast<Eigen::Index>(arr.size()), 2);
    for (std::size_t i = 0; i < arr.size(); ++i)
        p.row(static_cast<Eigen::Index>(i)) =
            point(arr[i], what + "[" + std::to_string(i) + "]").transpose();
    return p;
}

nlohmann::json to_json(const Positions& p)
{
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        arr.push_back({p(i, 0), p(i, 1)});
    return arr;
}

} // namespace flexmesh::json_util
