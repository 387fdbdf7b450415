#include "keygest/sequence_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "keygest/error.hpp"

namespace fs = std::filesystem;

namespace keygest {
namespace {

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

[[noreturn]] void undecodable(const fs::path& path, const std::string& why) {
  throw Error(ErrorCode::UndecodableFile, "cannot decode " + path.string() + ": " + why);
}

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    undecodable(path, image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string why = image.message;
    png_image_free(&image);
    undecodable(path, why);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  if (w < Frame::kMinExtent || h < Frame::kMinExtent) undecodable(path, "image smaller than 3x3");
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma(buffer[4 * i], buffer[4 * i + 1], buffer[4 * i + 2]);
  }
  return Frame(w, h, std::move(gray));
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
bool next_token(std::istream& in, std::string& token) {
  token.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return true;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return !token.empty();
}

Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) undecodable(path, "cannot open");
  std::string magic, ws, hs, ms;
  if (!next_token(in, magic) || (magic != "P5" && magic != "P2")) undecodable(path, "not a PGM (P5/P2) file");
  if (!next_token(in, ws) || !next_token(in, hs) || !next_token(in, ms)) undecodable(path, "truncated header");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(ws);
    h = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    undecodable(path, "malformed header");
  }
  if (w < Frame::kMinExtent || h < Frame::kMinExtent) undecodable(path, "image smaller than 3x3");
  if (maxval < 1 || maxval > 65535) undecodable(path, "bad maxval");

  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint32_t> raw(count);
  if (magic == "P5") {
    // next_token consumed exactly one whitespace byte after maxval
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> bytes(count * bytes_per);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) undecodable(path, "truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      raw[i] = bytes_per == 2 ? (std::uint32_t{bytes[2 * i]} << 8) | bytes[2 * i + 1] : bytes[i];
    }
  } else {
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
      if (!next_token(in, tok)) undecodable(path, "truncated pixel data");
      try {
        raw[i] = static_cast<std::uint32_t>(std::stoul(tok));
      } catch (const std::exception&) {
        undecodable(path, "malformed pixel value");
      }
    }
  }
  std::vector<std::uint8_t> gray(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (raw[i] > static_cast<std::uint32_t>(maxval)) undecodable(path, "pixel exceeds maxval");
    gray[i] = maxval == 255 ? static_cast<std::uint8_t>(raw[i])
                            : static_cast<std::uint8_t>((raw[i] * 255u * 2u + static_cast<std::uint32_t>(maxval)) /
                                                        (2u * static_cast<std::uint32_t>(maxval)));
  }
  return Frame(w, h, std::move(gray));
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (directories ? entry.is_directory() : (entry.is_regular_file() && is_frame_file(entry.path()))) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  // weights sum to 1000, so +500 is exact half-up rounding
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

Frame resize_bilinear(const Frame& frame, Size2 target) {
  if (target == frame.size()) return frame;
  Frame out(target.width, target.height);
  const double sx = static_cast<double>(frame.width()) / target.width;
  const double sy = static_cast<double>(frame.height()) / target.height;
  for (int y = 0; y < target.height; ++y) {
    double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(frame.height() - 1));
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, frame.height() - 1);
    double wy = fy - y0;
    for (int x = 0; x < target.width; ++x) {
      double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(frame.width() - 1));
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, frame.width() - 1);
      double wx = fx - x0;
      double top = frame.at(x0, y0) * (1.0 - wx) + frame.at(x1, y0) * wx;
      double bottom = frame.at(x0, y1) * (1.0 - wx) + frame.at(x1, y1) * wx;
      double v = top * (1.0 - wy) + bottom * wy;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

bool is_frame_file(const fs::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".pgm";
}

Frame read_frame(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  undecodable(path, "unsupported extension");
}

void write_pgm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels().data()), static_cast<std::streamsize>(frame.pixels().size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

FrameSequence load_sequence(const fs::path& dir, std::optional<Size2> target) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::MissingDirectory, "missing directory: " + dir.string());
  }
  const std::vector<fs::path> files = sorted_entries(dir, false);
  if (files.size() < FrameSequence::kMinFrames) {
    throw Error(ErrorCode::SequenceTooShort, "sequence too short: " + dir.string() + " has " +
                                                 std::to_string(files.size()) + " frame files");
  }
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const fs::path& f : files) {
    Frame frame = read_frame(f);
    if (target) {
      frame = resize_bilinear(frame, *target);
    } else if (!frames.empty() && frame.size() != frames.front().size()) {
      throw Error(ErrorCode::InconsistentDimensions, "inconsistent frame size in " + dir.string() + " at " +
                                                         f.filename().string());
    }
    frames.push_back(std::move(frame));
  }
  return FrameSequence(std::move(frames), dir.filename().string());
}

void save_sequence(const fs::path& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(name, sizeof name, "frame_%05zu.pgm", i);
    write_pgm(dir / name, seq[i]);
  }
}

LabeledDataset load_dataset(const fs::path& root, std::optional<Size2> target) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::MissingDirectory, "missing directory: " + root.string());
  }
  LabeledDataset ds;
  for (const fs::path& class_dir : sorted_entries(root, true)) {
    const int id = static_cast<int>(ds.class_names.size());
    ds.class_names.push_back(class_dir.filename().string());
    for (const fs::path& seq_dir : sorted_entries(class_dir, true)) {
      FrameSequence seq = load_sequence(seq_dir, target);
      ds.sequences.push_back(FrameSequence(std::vector<Frame>(seq.frames().begin(), seq.frames().end()),
                                           ds.class_names.back() + "/" + seq.source_id(),
                                           GestureLabel{id, ds.class_names.back()}));
    }
  }
  return ds;
}

void save_dataset(const fs::path& root, const LabeledDataset& dataset) {
  std::map<int, std::size_t> counters;
  for (const FrameSequence& seq : dataset.sequences) {
    if (!seq.label()) throw Error(ErrorCode::InvalidArgument, "dataset sequence without a label");
    const int id = seq.label()->id;
    char name[32];
    std::snprintf(name, sizeof name, "seq_%04zu", counters[id]++);
    save_sequence(root / dataset.class_names.at(static_cast<std::size_t>(id)) / name, seq);
  }
}

Volume to_grayscale_stack(const FrameSequence& seq) {
  Volume v(seq.width(), seq.height(), static_cast<int>(seq.size()));
  for (int t = 0; t < v.depth(); ++t) {
    const Frame& f = seq[static_cast<std::size_t>(t)];
    for (int y = 0; y < v.height(); ++y) {
      for (int x = 0; x < v.width(); ++x) v.at(x, y, t) = f.at(x, y);
    }
  }
  return v;
}

FrameSequence from_grayscale_stack(const Volume& volume, std::string source_id, std::optional<GestureLabel> label) {
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(volume.depth()));
  const std::size_t plane = static_cast<std::size_t>(volume.width()) * static_cast<std::size_t>(volume.height());
  for (int t = 0; t < volume.depth(); ++t) {
    auto first = volume.data().begin() + static_cast<std::ptrdiff_t>(plane * static_cast<std::size_t>(t));
    frames.emplace_back(volume.width(), volume.height(),
                        std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(plane)));
  }
  return FrameSequence(std::move(frames), std::move(source_id), std::move(label));
}

}  // namespace keygest
