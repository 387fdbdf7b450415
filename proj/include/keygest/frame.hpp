#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace keygest {

struct Size2 {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size2&, const Size2&) = default;
};

struct GestureLabel {
  int id = 0;
  std::string name;

  friend bool operator==(const GestureLabel&, const GestureLabel&) = default;
};

// 8-bit grayscale image, row-major. Width and height are at least 3.
class Frame {
 public:
  static constexpr int kMinExtent = 3;

  Frame(int width, int height, std::uint8_t fill = 0);
  Frame(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Size2 size() const noexcept { return {width_, height_}; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

// Ordered frames of one gesture video. Immutable once built; all frames share one size
// and there are at least three of them.
class FrameSequence {
 public:
  static constexpr std::size_t kMinFrames = 3;

  explicit FrameSequence(std::vector<Frame> frames, std::string source_id = {},
                         std::optional<GestureLabel> label = std::nullopt);

  std::size_t size() const noexcept { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const Frame& front() const { return frames_.front(); }
  std::span<const Frame> frames() const noexcept { return frames_; }

  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }

  const std::string& source_id() const noexcept { return source_id_; }
  const std::optional<GestureLabel>& label() const noexcept { return label_; }

  FrameSequence with_label(std::optional<GestureLabel> label) const;

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<Frame> frames_;
  std::string source_id_;
  std::optional<GestureLabel> label_;
};

// Dense (x, y, t) intensity volume. Storage is t-major, then y, then x.
class Volume {
 public:
  Volume(int width, int height, int depth, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }

  std::uint8_t at(int x, int y, int t) const { return data_[index(x, y, t)]; }
  std::uint8_t& at(int x, int y, int t) { return data_[index(x, y, t)]; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  std::size_t index(int x, int y, int t) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  int depth_;
  std::vector<std::uint8_t> data_;
};

}  // namespace keygest
