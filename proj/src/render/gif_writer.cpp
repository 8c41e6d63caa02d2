#include "render/image_io.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace flexmesh::render {

namespace {

constexpr int kLevelsR = 6;
constexpr int kLevelsG = 7;
constexpr int kLevelsB = 6;
constexpr int kTransparent = 0;

int level(double v, int levels)
{
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (levels - 1)));
}

unsigned char palette_index(double r, double g, double b, double a)
{
    if (a < 0.5) return kTransparent;
    return static_cast<unsigned char>(1 + (level(r, kLevelsR) * kLevelsG + level(g, kLevelsG)) * kLevelsB +
                                      level(b, kLevelsB));
}

class ByteSink
{
public:
    void u8(unsigned v) { bytes.push_back(static_cast<unsigned char>(v & 0xff)); }
    void u16(unsigned v)
    {
        u8(v);
        u8(v >> 8);
    }
    void str(const char* s)
    {
        while (*s) u8(static_cast<unsigned char>(*s++));
    }
    std::vector<unsigned char> bytes;
};

/// LSB-first bit packer emitting 255-byte data sub-blocks.
class CodeWriter
{
public:
    explicit CodeWriter(ByteSink& sink)
        : m_sink(sink)
    {}

    void write(unsigned code, int bits)
    {
        m_acc |= static_cast<std::uint64_t>(code) << m_nbits;
        m_nbits += bits;
        while (m_nbits >= 8) {
            push(static_cast<unsigned char>(m_acc & 0xff));
            m_acc >>= 8;
            m_nbits -= 8;
        }
    }

    void finish()
    {
        if (m_nbits > 0) push(static_cast<unsigned char>(m_acc & 0xff));
        m_acc = 0;
        m_nbits = 0;
        flush_block();
        m_sink.u8(0); // block terminator
    }

private:
    void push(unsigned char b)
    {
        m_block.push_back(b);
        if (m_block.size() == 255) flush_block();
    }
    void flush_block()
    {
        if (m_block.empty()) return;
        m_sink.u8(static_cast<unsigned>(m_block.size()));
        m_sink.bytes.insert(m_sink.bytes.end(), m_block.begin(), m_block.end());
        m_block.clear();
    }

    ByteSink& m_sink;
    std::uint64_t m_acc = 0;
    int m_nbits = 0;
    std::vector<unsigned char> m_block;
};

void lzw_encode(const std::vector<unsigned char>& indices, ByteSink& sink)
{
    constexpr int min_code_size = 8;
    constexpr unsigned clear = 1u << min_code_size;
    constexpr unsigned eoi = clear + 1;
    sink.u8(min_code_size);
    CodeWriter out(sink);

    std::unordered_map<std::uint32_t, unsigned> dict;
    int code_size = min_code_size + 1;
    unsigned max_code = eoi;
    out.write(clear, code_size);

    unsigned current = indices.front();
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const unsigned next = indices[i];
        const std::uint32_t key = (current << 8) | next;
        auto it = dict.find(key);
        if (it != dict.end()) {
            current = it->second;
            continue;
        }
        out.write(current, code_size);
        dict.emplace(key, ++max_code);
        if (max_code >= (1u << code_size)) ++code_size;
        if (max_code == 4095) {
            out.write(clear, code_size);
            dict.clear();
            code_size = min_code_size + 1;
            max_code = eoi;
        }
        current = next;
    }
    out.write(current, code_size);
    out.write(clear, code_size);
    out.write(eoi, min_code_size + 1);
    out.finish();
}

} // namespace

std::vector<unsigned char> encode_gif(const std::vector<RasterImage>& frames, double fps)
{
    require(!frames.empty(), ErrorCode::InvalidArgument, "no frames to encode");
    require(std::isfinite(fps) && fps > 0, ErrorCode::InvalidArgument, "fps must be positive");
    const int w = frames.front().width();
    const int h = frames.front().height();
    require(w <= 65535 && h <= 65535, ErrorCode::InvalidArgument, "image too large for GIF");
    for (const auto& f : frames)
        require(f.width() == w && f.height() == h, ErrorCode::ShapeMismatch, "frames must share dimensions");

    ByteSink s;
    s.str("GIF89a");
    s.u16(static_cast<unsigned>(w));
    s.u16(static_cast<unsigned>(h));
    s.u8(0xF7); // global color table, 8 bits, 256 entries
    s.u8(kTransparent);
    s.u8(0);
    for (int i = 0; i < 256; ++i) {
        const int k = i - 1;
        if (k < 0 || k >= kLevelsR * kLevelsG * kLevelsB) {
            s.u8(0);
            s.u8(0);
            s.u8(0);
            continue;
        }
        const int rb = k / (kLevelsG * kLevelsB);
        const int gb = (k / kLevelsB) % kLevelsG;
        const int bb = k % kLevelsB;
        s.u8(static_cast<unsigned>(std::lround(255.0 * rb / (kLevelsR - 1))));
        s.u8(static_cast<unsigned>(std::lround(255.0 * gb / (kLevelsG - 1))));
        s.u8(static_cast<unsigned>(std::lround(255.0 * bb / (kLevelsB - 1))));
    }

    // loop forever
    s.u8(0x21);
    s.u8(0xFF);
    s.u8(11);
    s.str("NETSCAPE2.0");
    s.u8(3);
    s.u8(1);
    s.u16(0);
    s.u8(0);

    long elapsed = 0;
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const long end = std::lround(100.0 * static_cast<double>(t + 1) / fps);
        const long delay = std::max(0L, end - elapsed);
        elapsed = end;

        s.u8(0x21);
        s.u8(0xF9);
        s.u8(4);
        s.u8((2 << 2) | 1); // restore to background, transparency on
        s.u16(static_cast<unsigned>(std::min(delay, 65535L)));
        s.u8(kTransparent);
        s.u8(0);

        s.u8(0x2C);
        s.u16(0);
        s.u16(0);
        s.u16(static_cast<unsigned>(w));
        s.u16(static_cast<unsigned>(h));
        s.u8(0);

        const auto& img = frames[t];
        std::vector<unsigned char> idx(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                idx[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
                    palette_index(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2), img.at(x, y, 3));
        lzw_encode(idx, s);
    }
    s.u8(0x3B);
    return s.bytes;
}

void emit_gif(const std::vector<RasterImage>& frames, const std::filesystem::path& path, double fps)
{
    const auto bytes = encode_gif(frames, fps);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write GIF '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "write failed for GIF '" + path.string() + "'");
}

} // namespace flexmesh::render
