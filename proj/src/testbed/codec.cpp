#include "irrlab/testbed/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <string>

#include "irrlab/testbed/message.hpp"

namespace irrlab::testbed {

namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'R', 'F', '1'};
constexpr std::size_t kFrameHeader = 4 + 1 + 4 + 4;
constexpr int kMaxDimension = 1 << 14;
constexpr std::uint8_t kQuantMask = 0xF8;

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> in)
{
    uLongf bound = compressBound(static_cast<uLong>(in.size()));
    std::vector<std::uint8_t> out(bound);
    // Level 1: frames are latency-critical, ratio matters less.
    const int rc = compress2(out.data(), &bound, in.data(), static_cast<uLong>(in.size()), 1);
    if (rc != Z_OK) {
        throw CodecError("deflate failed with code " + std::to_string(rc));
    }
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> in, std::size_t expected)
{
    std::vector<std::uint8_t> out(expected);
    uLongf len = static_cast<uLongf>(expected);
    const int rc = uncompress(out.data(), &len, in.data(), static_cast<uLong>(in.size()));
    if (rc != Z_OK || len != expected) {
        throw CodecError("malformed deflate body");
    }
    return out;
}

} // namespace

FrameCodec parse_codec(std::string_view s)
{
    if (s == "raw") return FrameCodec::raw;
    if (s == "deflate" || s == "lossless") return FrameCodec::deflate;
    if (s == "quantized" || s == "lossy") return FrameCodec::quantized;
    throw std::invalid_argument("unknown codec '" + std::string(s) + "'");
}

std::string_view to_string(FrameCodec c)
{
    switch (c) {
    case FrameCodec::raw: return "raw";
    case FrameCodec::deflate: return "deflate";
    case FrameCodec::quantized: return "quantized";
    }
    return "?";
}

std::vector<std::uint8_t> encode_frame(const Image& pixels, FrameCodec codec)
{
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(static_cast<std::uint8_t>(codec));
    put_u32_be(out, static_cast<std::uint32_t>(pixels.width()));
    put_u32_be(out, static_cast<std::uint32_t>(pixels.height()));

    switch (codec) {
    case FrameCodec::raw:
        out.insert(out.end(), pixels.bytes().begin(), pixels.bytes().end());
        break;
    case FrameCodec::deflate: {
        auto body = deflate_bytes(pixels.bytes());
        out.insert(out.end(), body.begin(), body.end());
        break;
    }
    case FrameCodec::quantized: {
        std::vector<std::uint8_t> q(pixels.bytes().begin(), pixels.bytes().end());
        for (auto& v : q) {
            v &= kQuantMask;
        }
        auto body = deflate_bytes(q);
        out.insert(out.end(), body.begin(), body.end());
        break;
    }
    default:
        throw CodecError("unknown codec");
    }
    return out;
}

Image decode_frame(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kFrameHeader || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw CodecError("not an encoded frame");
    }
    const auto codec = bytes[4];
    const auto w = get_u32_be(bytes.subspan(5, 4));
    const auto h = get_u32_be(bytes.subspan(9, 4));
    if (w > kMaxDimension || h > kMaxDimension) {
        throw CodecError("frame dimensions out of range");
    }
    const std::size_t raw_size = std::size_t{w} * h * 3;
    const auto body = bytes.subspan(kFrameHeader);

    std::vector<std::uint8_t> rgb;
    switch (static_cast<FrameCodec>(codec)) {
    case FrameCodec::raw:
        if (body.size() != raw_size) {
            throw CodecError("raw frame body has wrong size");
        }
        rgb.assign(body.begin(), body.end());
        break;
    case FrameCodec::deflate:
        rgb = inflate_bytes(body, raw_size);
        break;
    case FrameCodec::quantized:
        rgb = inflate_bytes(body, raw_size);
        for (auto& v : rgb) {
            v = static_cast<std::uint8_t>((v & kQuantMask) | 0x04);
        }
        break;
    default:
        throw CodecError("unknown codec byte " + std::to_string(codec));
    }
    return Image::from_bytes(static_cast<int>(w), static_cast<int>(h), std::move(rgb));
}

} // namespace irrlab::testbed
