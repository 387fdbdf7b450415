#include "keygest/frame.hpp"

#include <string>
#include <utility>

#include "keygest/error.hpp"

namespace keygest {
namespace {

void check_extent(int width, int height) {
  if (width < Frame::kMinExtent || height < Frame::kMinExtent) {
    throw Error(ErrorCode::InvalidArgument, "frame must be at least 3x3, got " + std::to_string(width) + "x" +
                                                std::to_string(height));
  }
}

}  // namespace

Frame::Frame(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_extent(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_extent(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::DimensionMismatch, "pixel buffer does not match frame size");
  }
}

FrameSequence::FrameSequence(std::vector<Frame> frames, std::string source_id, std::optional<GestureLabel> label)
    : frames_(std::move(frames)), source_id_(std::move(source_id)), label_(std::move(label)) {
  if (frames_.size() < kMinFrames) {
    throw Error(ErrorCode::SequenceTooShort,
                "sequence too short: " + std::to_string(frames_.size()) + " frames, need at least 3");
  }
  for (const Frame& f : frames_) {
    if (f.size() != frames_.front().size()) {
      throw Error(ErrorCode::InconsistentDimensions, "frames in a sequence must share one size");
    }
  }
}

FrameSequence FrameSequence::with_label(std::optional<GestureLabel> label) const {
  return FrameSequence(frames_, source_id_, std::move(label));
}

Volume::Volume(int width, int height, int depth, std::uint8_t fill) : width_(width), height_(height), depth_(depth) {
  if (width < 1 || height < 1 || depth < 1) {
    throw Error(ErrorCode::InvalidArgument, "volume extents must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(depth),
               fill);
}

}  // namespace keygest
