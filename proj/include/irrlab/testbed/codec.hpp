#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "irrlab/image.hpp"

namespace irrlab::testbed {

enum class FrameCodec : std::uint8_t {
    raw = 0,
    /// Lossless zlib deflate of the RGB bytes. Default.
    deflate = 1,
    /// Lossy: channels quantized to 5 bits, then deflated. Dimensions survive
    /// exactly; pixel values come back to within one quantization step.
    quantized = 2,
};

FrameCodec parse_codec(std::string_view s);
std::string_view to_string(FrameCodec c);

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Encoded layout: "IRF1" | codec u8 | width u32 BE | height u32 BE | body.
std::vector<std::uint8_t> encode_frame(const Image& pixels, FrameCodec codec = FrameCodec::deflate);
Image decode_frame(std::span<const std::uint8_t> bytes);

} // namespace irrlab::testbed
