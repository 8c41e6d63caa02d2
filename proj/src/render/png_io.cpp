#include "render/image_io.hpp"

#include "common/error.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>

namespace flexmesh::render {

RasterImage load_png(const std::filesystem::path& path)
{
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str()))
        fail(std::filesystem::exists(path) ? ErrorCode::Parse : ErrorCode::Io,
             "cannot read PNG '" + path.string() + "': " + img.message);
    img.format = PNG_FORMAT_RGBA;
    std::vector<unsigned char> bytes(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, bytes.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        fail(ErrorCode::Parse, "cannot decode PNG '" + path.string() + "': " + msg);
    }
    return RasterImage::from_rgba8(static_cast<int>(img.width), static_cast<int>(img.height), bytes);
}

void save_png(const RasterImage& image, const std::filesystem::path& path)
{
    require(!image.empty(), ErrorCode::InvalidArgument, "cannot save an empty image");
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGBA;
    const auto bytes = image.to_rgba8();
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, bytes.data(), 0, nullptr))
        fail(ErrorCode::Io, "cannot write PNG '" + path.string() + "': " + img.message);
}

void emit_frames(const std::vector<RasterImage>& frames, const std::filesystem::path& out_dir)
{
    require(!frames.empty(), ErrorCode::InvalidArgument, "no frames to emit");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());
    for (std::size_t t = 0; t < frames.size(); ++t) {
        require(frames[t].width() == frames[0].width() && frames[t].height() == frames[0].height(),
                ErrorCode::ShapeMismatch, "frames must share dimensions");
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.png", t);
        save_png(frames[t], out_dir / name);
    }
}

} // namespace flexmesh::render
