#pragma once

#include "irrlab/image.hpp"
#include "irrlab/testbed/codec.hpp"
#include "irrlab/testbed/message.hpp"

namespace irrlab::testbed {

struct Resolution {
    int width = 256;
    int height = 256;
};

/// Parses "WxH", e.g. "256x256".
Resolution parse_resolution(const std::string& text);

struct ServerSceneState {
    double angle_degrees = 0.0;
    double rotation_step = 5.0;
    Resolution resolution{};
};

/// Wraps any angle into [0, 360).
double wrap_degrees(double deg);

/// Flat-shaded orthographic view of a cube seen from above and in front,
/// rotated about the vertical axis by the scene angle. Every face carries
/// its own color and a checker pattern, so any rotation changes pixels in
/// the interior of the image, not just along the silhouette.
///
/// A pure function of (angle mod 360, resolution).
Image render_scene(const ServerSceneState& s);

struct ServerOptions {
    FrameCodec codec = FrameCodec::deflate;
};

/// Applies one client message to the scene and builds the response.
///
/// 'a' rotates left (angle - step), 'd' rotates right (angle + step); the
/// response carries the request's GUID and the encoded frame rendered at the
/// new angle. 'q' produces a shutdown echo with an empty frame. Anything else
/// yields an error response and leaves the scene untouched.
NetworkMessage server_handle_message(ServerSceneState& s, const NetworkMessage& m,
                                     const ServerOptions& opts = {});

} // namespace irrlab::testbed
