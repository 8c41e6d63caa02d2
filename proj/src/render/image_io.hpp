#pragma once

#include "render/raster_image.hpp"

#include <filesystem>
#include <vector>

namespace flexmesh::render {

RasterImage load_png(const std::filesystem::path& path);
void save_png(const RasterImage& image, const std::filesystem::path& path);

/// Writes frame_0000.png, frame_0001.png, ... into out_dir (created if needed).
void emit_frames(const std::vector<RasterImage>& frames, const std::filesystem::path& out_dir);

/// Looping animated GIF. Colors are quantized to a fixed 6x7x6 palette;
/// alpha below one half becomes the transparent index. Per-frame delays are
/// distributed so the total duration is N/fps rounded to centiseconds.
void emit_gif(const std::vector<RasterImage>& frames, const std::filesystem::path& path, double fps);

/// Encodes to memory; emit_gif writes exactly these bytes.
std::vector<unsigned char> encode_gif(const std::vector<RasterImage>& frames, double fps);

} // namespace flexmesh::render
