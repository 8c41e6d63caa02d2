#pragma once

#include "mesh/tri_mesh.hpp"
#include "render/raster_image.hpp"

namespace flexmesh::render {

struct WarpStats
{
    int inverted_faces = 0;
    int covered_pixels = 0;
};

/// Piecewise-affine warp. Each output pixel inside a deformed triangle
/// samples the input at the barycentrically equivalent rest location;
/// pixels outside every triangle are fully transparent. Overlaps from
/// fold-overs resolve to the last face in face order. Output size defaults
/// to the input size.
RasterImage warp(const RasterImage& image, const mesh::TriMesh& rest, const Positions& deformed,
                 int out_width = 0, int out_height = 0, WarpStats* stats = nullptr);

/// dLoss/d(deformed vertices) for a given dLoss/d(output), using the
/// analytic derivative of the bilinear-barycentric lookup. Coverage changes
/// at triangle borders are not differentiated.
Positions warp_gradient(const RasterImage& image, const mesh::TriMesh& rest, const Positions& deformed,
                        const RasterImage& grad_frame);

} // namespace flexmesh::render
