#include "tamp/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <zlib.h>

namespace tamp::render {

namespace {

using geom::Vec3;

struct Basis {
    Vec3 u, v, d;  // screen right, screen up, into the screen
};

Basis basis_of(View v) {
    switch (v) {
        case View::Front: return {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
        case View::Top: return {{1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
        case View::Left: return {{0, -1, 0}, {0, 0, 1}, {1, 0, 0}};
        case View::Right: return {{0, 1, 0}, {0, 0, 1}, {-1, 0, 0}};
    }
    return {};
}

// Fixed light, no x component so mirrored scenes shade identically.
const Vec3 kLight = [] {
    Vec3 l{0.0, -0.4, 0.9};
    return l * (1.0 / l.norm());
}();

struct Quad {
    double u[4], v[4];
};

bool inside(const Quad& q, double pu, double pv) {
    int pos = 0, neg = 0;
    for (int i = 0; i < 4; ++i) {
        int j = (i + 1) % 4;
        double cross = (q.u[j] - q.u[i]) * (pv - q.v[i]) - (q.v[j] - q.v[i]) * (pu - q.u[i]);
        if (cross > 1e-12) ++pos;
        if (cross < -1e-12) ++neg;
    }
    return pos == 0 || neg == 0;
}

void fill_quad(Image& img, const Quad& q, geom::Rgb color, double u_lo, double v_hi,
               double scale) {
    // scale = pixels per world unit; pixel (r, c) center sits at
    // (u_lo + (c + .5) / scale, v_hi - (r + .5) / scale).
    double umin = *std::min_element(q.u, q.u + 4), umax = *std::max_element(q.u, q.u + 4);
    double vmin = *std::min_element(q.v, q.v + 4), vmax = *std::max_element(q.v, q.v + 4);
    int cmin = std::max(0, static_cast<int>(std::ceil((umin - u_lo) * scale - 0.5)));
    int cmax = std::min(img.width - 1, static_cast<int>(std::floor((umax - u_lo) * scale - 0.5)));
    int rmin = std::max(0, static_cast<int>(std::ceil((v_hi - vmax) * scale - 0.5)));
    int rmax = std::min(img.height - 1, static_cast<int>(std::floor((v_hi - vmin) * scale - 0.5)));
    for (int r = rmin; r <= rmax; ++r) {
        double pv = v_hi - (r + 0.5) / scale;
        for (int c = cmin; c <= cmax; ++c) {
            double pu = u_lo + (c + 0.5) / scale;
            if (!inside(q, pu, pv)) continue;
            std::uint8_t* px = img.rgb.data() + 3 * (static_cast<std::size_t>(r) * img.width + c);
            px[0] = color.r;
            px[1] = color.g;
            px[2] = color.b;
        }
    }
}

geom::Rgb shade(geom::Rgb base, const Vec3& normal) {
    double f = 0.55 + 0.45 * std::max(0.0, normal.dot(kLight));
    auto ch = [&](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(c * f), 0L, 255L));
    };
    return {ch(base.r), ch(base.g), ch(base.b)};
}

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t x) {
    out.push_back(static_cast<std::uint8_t>(x >> 24));
    out.push_back(static_cast<std::uint8_t>(x >> 16));
    out.push_back(static_cast<std::uint8_t>(x >> 8));
    out.push_back(static_cast<std::uint8_t>(x));
}

void push_chunk(std::vector<std::uint8_t>& out, const char type[5],
                const std::vector<std::uint8_t>& data) {
    push_be32(out, static_cast<std::uint32_t>(data.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = ::crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    push_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

const char* view_name(View v) {
    switch (v) {
        case View::Front: return "front";
        case View::Top: return "top";
        case View::Left: return "left";
        case View::Right: return "right";
    }
    return "?";
}

Image render_view(const geom::Scene& scene, View view, int width, int height) {
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.assign(static_cast<std::size_t>(3) * width * height, 255);

    Basis b = basis_of(view);

    // Square window fitted around the workspace bounds.
    double ulo = 1e30, uhi = -1e30, vlo = 1e30, vhi = -1e30;
    for (int i = 0; i < 8; ++i) {
        Vec3 corner{i & 1 ? scene.bounds.hi.x : scene.bounds.lo.x,
                    i & 2 ? scene.bounds.hi.y : scene.bounds.lo.y,
                    i & 4 ? scene.bounds.hi.z : scene.bounds.lo.z};
        ulo = std::min(ulo, corner.dot(b.u));
        uhi = std::max(uhi, corner.dot(b.u));
        vlo = std::min(vlo, corner.dot(b.v));
        vhi = std::max(vhi, corner.dot(b.v));
    }
    double cu = (ulo + uhi) / 2, cv = (vlo + vhi) / 2;
    double s = std::max({(uhi - ulo) / 2, (vhi - vlo) / 2, 1e-6});
    double u_lo = cu - s, v_hi = cv + s;
    double scale = width / (2 * s);

    std::vector<const geom::BoxObject*> order;
    for (const auto& [id, obj] : scene.objects) order.push_back(&obj);
    std::sort(order.begin(), order.end(), [&](const geom::BoxObject* a, const geom::BoxObject* o) {
        double da = a->pose.position.dot(b.d), db = o->pose.position.dot(b.d);
        return da != db ? da > db : a->id < o->id;
    });

    for (const geom::BoxObject* obj : order) {
        double cy = std::cos(obj->pose.yaw), sy = std::sin(obj->pose.yaw);
        Vec3 axes[3] = {{cy, sy, 0}, {-sy, cy, 0}, {0, 0, 1}};
        double half[3] = {obj->half_extents.x, obj->half_extents.y, obj->half_extents.z};
        for (int a = 0; a < 3; ++a) {
            for (int sign : {-1, 1}) {
                Vec3 normal = axes[a] * static_cast<double>(sign);
                if (normal.dot(b.d) >= -1e-9) continue;  // backface or edge-on
                int b1 = (a + 1) % 3, b2 = (a + 2) % 3;
                static constexpr int kWind[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
                Quad q;
                for (int k = 0; k < 4; ++k) {
                    Vec3 p = obj->pose.position + normal * half[a] +
                             axes[b1] * (kWind[k][0] * half[b1]) +
                             axes[b2] * (kWind[k][1] * half[b2]);
                    q.u[k] = p.dot(b.u);
                    q.v[k] = p.dot(b.v);
                }
                fill_quad(img, q, shade(obj->color, normal), u_lo, v_hi, scale);
            }
        }
    }
    return img;
}

std::array<Image, 4> render_all(const geom::Scene& scene, int width, int height) {
    return {render_view(scene, View::Front, width, height),
            render_view(scene, View::Top, width, height),
            render_view(scene, View::Left, width, height),
            render_view(scene, View::Right, width, height)};
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (1 + 3 * img.width));
    for (int r = 0; r < img.height; ++r) {
        raw.push_back(0);  // filter: none
        const std::uint8_t* row = img.rgb.data() + 3 * static_cast<std::size_t>(r) * img.width;
        raw.insert(raw.end(), row, row + 3 * img.width);
    }
    uLongf cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(cap);
    if (compress2(comp.data(), &cap, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("png deflate failed");
    comp.resize(cap);

    std::vector<std::uint8_t> out{137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> ihdr;
    push_be32(ihdr, static_cast<std::uint32_t>(img.width));
    push_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", comp);
    push_chunk(out, "IEND", {});
    return out;
}

void write_png(const std::string& path, const Image& img) {
    auto bytes = encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("short write to " + path);
}

}  // namespace tamp::render
