#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tamp/geom.hpp"

namespace tamp::render {

// Fixed orthographic cameras around the workspace. Front looks along +y,
// top looks straight down, left and right look along +x / -x.
enum class View { Front, Top, Left, Right };

const char* view_name(View v);  // "front", "top", "left", "right"

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    const std::uint8_t* at(int row, int col) const {
        return rgb.data() + 3 * (static_cast<std::size_t>(row) * width + col);
    }
};

// Painter's rendering of the scene boxes: objects far to near (ties by id),
// front faces only, flat shading from a fixed light. The square view window
// is fitted to scene.bounds, so identical bounds give identical framing.
Image render_view(const geom::Scene& scene, View v, int width = 512, int height = 512);

// All four views in declaration order.
std::array<Image, 4> render_all(const geom::Scene& scene, int width = 512, int height = 512);

std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const std::string& path, const Image& img);

}  // namespace tamp::render
