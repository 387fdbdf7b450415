#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "keygest/frame.hpp"

namespace keygest {

// ITU-R BT.601 luma, rounded half up.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

// Bilinear resampling with pixel-center alignment. Same-size input is returned unchanged.
Frame resize_bilinear(const Frame& frame, Size2 target);

// Decodes a .png or .pgm (P5 / P2) file to 8-bit grayscale.
Frame read_frame(const std::filesystem::path& path);

// Writes binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const Frame& frame);

bool is_frame_file(const std::filesystem::path& path);

// Loads every .png/.pgm file in `dir` in lexicographic filename order.
FrameSequence load_sequence(const std::filesystem::path& dir,
                            std::optional<Size2> target = std::nullopt);

// Writes frame_00000.pgm, frame_00001.pgm, ... into `dir` (created if needed).
void save_sequence(const std::filesystem::path& dir, const FrameSequence& seq);

struct LabeledDataset {
  std::vector<std::string> class_names;  // index == GestureLabel::id
  std::vector<FrameSequence> sequences;  // every sequence carries a label
};

// <root>/<class_name>/<sequence_id>/<frames>. Class ids follow sorted class names.
LabeledDataset load_dataset(const std::filesystem::path& root,
                            std::optional<Size2> target = std::nullopt);

void save_dataset(const std::filesystem::path& root, const LabeledDataset& dataset);

Volume to_grayscale_stack(const FrameSequence& seq);

FrameSequence from_grayscale_stack(const Volume& volume, std::string source_id = {},
                                   std::optional<GestureLabel> label = std::nullopt);

}  // namespace keygest
