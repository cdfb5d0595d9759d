#include "irrlab/testbed/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace irrlab::testbed {

namespace {

struct Vec3 {
    double x, y, z;
};

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 rotate_y(const Vec3& v, double c, double s)
{
    return {v.x * c + v.z * s, v.y, -v.x * s + v.z * c};
}

constexpr double kElevationDeg = 35.0;
constexpr double kViewHalfExtent = 1.9;
constexpr double kCameraDistance = 10.0;

// +x, -x, +y, -y, +z, -z
constexpr std::array<Rgb, 6> kFaceColors{{
    {220, 60, 50},
    {60, 190, 70},
    {70, 110, 230},
    {230, 210, 60},
    {200, 70, 200},
    {60, 200, 210},
}};

std::uint8_t to_channel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb background(int py, int height)
{
    const double t = height > 1 ? static_cast<double>(py) / (height - 1) : 0.0;
    return {to_channel(30 + 20 * t), to_channel(32 + 24 * t), to_channel(40 + 40 * t)};
}

} // namespace

Resolution parse_resolution(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument("");
        }
        std::size_t used = 0;
        Resolution r{std::stoi(text.substr(0, x), &used), 0};
        if (used != x) {
            throw std::invalid_argument("");
        }
        const auto rest = text.substr(x + 1);
        r.height = std::stoi(rest, &used);
        if (used != rest.size() || r.width <= 0 || r.height <= 0) {
            throw std::invalid_argument("");
        }
        return r;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("bad resolution '" + text + "', expected WxH");
    }
}

double wrap_degrees(double deg)
{
    double a = std::fmod(deg, 360.0);
    if (a < 0) {
        a += 360.0;
    }
    if (a >= 360.0) {
        a = 0.0;
    }
    return a;
}

Image render_scene(const ServerSceneState& s)
{
    const int w = s.resolution.width;
    const int h = s.resolution.height;
    Image img(w, h);

    const double theta = wrap_degrees(s.angle_degrees) * std::numbers::pi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double el = kElevationDeg * std::numbers::pi / 180.0;

    const Vec3 dir{0.0, -std::sin(el), -std::cos(el)};
    const Vec3 up{0.0, std::cos(el), -std::sin(el)};
    // Ray direction in cube-local coordinates (rotate by -theta).
    const Vec3 ldir = rotate_y(dir, ct, -st);
    const Vec3 light{0.4, 0.8, 0.45};
    const double light_norm = std::sqrt(dot(light, light));

    for (int py = 0; py < h; ++py) {
        const double vy = (1.0 - (py + 0.5) / h * 2.0) * kViewHalfExtent;
        for (int px = 0; px < w; ++px) {
            const double vx = ((px + 0.5) / w * 2.0 - 1.0) * kViewHalfExtent;
            const Vec3 origin{vx, vy * up.y - kCameraDistance * dir.y, vy * up.z - kCameraDistance * dir.z};
            const Vec3 lo = rotate_y(origin, ct, -st);

            // Slab test against the unit cube [-1, 1]^3.
            double tmin = -1e30;
            double tmax = 1e30;
            const double o[3] = {lo.x, lo.y, lo.z};
            const double d[3] = {ldir.x, ldir.y, ldir.z};
            bool miss = false;
            for (int k = 0; k < 3 && !miss; ++k) {
                if (std::abs(d[k]) < 1e-12) {
                    miss = o[k] < -1.0 || o[k] > 1.0;
                    continue;
                }
                double t0 = (-1.0 - o[k]) / d[k];
                double t1 = (1.0 - o[k]) / d[k];
                if (t0 > t1) {
                    std::swap(t0, t1);
                }
                tmin = std::max(tmin, t0);
                tmax = std::min(tmax, t1);
                miss = tmin > tmax;
            }
            if (miss) {
                img.set(px, py, background(py, h));
                continue;
            }

            const double p[3] = {o[0] + tmin * d[0], o[1] + tmin * d[1], o[2] + tmin * d[2]};
            int axis = 0;
            for (int k = 1; k < 3; ++k) {
                if (std::abs(p[k]) > std::abs(p[axis])) {
                    axis = k;
                }
            }
            const bool positive = p[axis] > 0;
            const int face = axis * 2 + (positive ? 0 : 1);

            const double u = p[(axis + 1) % 3];
            const double v = p[(axis + 2) % 3];
            const int cell = static_cast<int>(std::floor((u + 1.0) * 2.0)) + static_cast<int>(std::floor((v + 1.0) * 2.0));
            const double pattern = (cell & 1) ? 0.7 : 1.0;

            Vec3 n{0, 0, 0};
            const double sign = positive ? 1.0 : -1.0;
            (axis == 0 ? n.x : axis == 1 ? n.y : n.z) = sign;
            const Vec3 nw = rotate_y(n, ct, st);
            const double lambert = std::max(0.0, dot(nw, light) / light_norm);
            const double shade = (0.3 + 0.7 * lambert) * pattern;

            const Rgb base = kFaceColors[static_cast<std::size_t>(face)];
            img.set(px, py, {to_channel(base.r * shade), to_channel(base.g * shade), to_channel(base.b * shade)});
        }
    }
    return img;
}

NetworkMessage server_handle_message(ServerSceneState& s, const NetworkMessage& m, const ServerOptions& opts)
{
    NetworkMessage out;
    out.id = m.id;
    out.interaction = m.interaction;

    if (m.type == MessageType::shutdown || m.interaction == keys::quit) {
        out.type = MessageType::shutdown;
        out.interaction = keys::quit;
        return out;
    }
    if (m.type != MessageType::interaction || !is_scene_interaction(m.interaction)) {
        out.type = MessageType::error;
        return out;
    }

    const double step = m.interaction == keys::rotate_left ? -s.rotation_step : s.rotation_step;
    s.angle_degrees = wrap_degrees(s.angle_degrees + step);
    out.type = MessageType::frame_result;
    out.frame = encode_frame(render_scene(s), opts.codec);
    return out;
}

} // namespace irrlab::testbed
