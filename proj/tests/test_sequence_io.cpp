#include <png.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "keygest/error.hpp"
#include "keygest/sequence_io.hpp"

using namespace keygest;
namespace fs = std::filesystem;

namespace {

void write_rgb_png(const fs::path& path, int w, int h, const std::vector<std::uint8_t>& rgb) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr));
}

ErrorCode load_error(const fs::path& dir, std::optional<Size2> target = std::nullopt) {
  try {
    load_sequence(dir, target);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load_sequence did not throw");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("luma uses BT.601 weights rounded half up") {
  CHECK(luma(0, 0, 0) == 0);
  CHECK(luma(255, 255, 255) == 255);
  CHECK(luma(255, 0, 0) == 76);   // 76.245
  CHECK(luma(0, 255, 0) == 150);  // 149.685
  CHECK(luma(0, 0, 255) == 29);   // 29.07
  CHECK(luma(1, 1, 1) == 1);
  CHECK(luma(10, 0, 0) == 3);   // 2.99
  CHECK(luma(1, 123, 0) == 73);  // exactly 72.5
}

TEST_CASE("frame and sequence invariants") {
  CHECK_THROWS_AS(Frame(2, 5), Error);
  CHECK_THROWS_AS(Frame(4, 4, std::vector<std::uint8_t>(15)), Error);
  std::vector<Frame> two(2, Frame(4, 4));
  try {
    FrameSequence s(two);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SequenceTooShort);
  }
  std::vector<Frame> mixed{Frame(4, 4), Frame(4, 4), Frame(5, 4)};
  try {
    FrameSequence s(mixed);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentDimensions);
  }
}

TEST_CASE("PGM round trip preserves pixels") {
  testutil::TempDir dir("pgm");
  Rng rng(7);
  const Frame f = testutil::random_frame(rng, 17, 9);
  write_pgm(dir.path() / "a.pgm", f);
  CHECK(read_frame(dir.path() / "a.pgm") == f);
}

TEST_CASE("ASCII PGM with comments and a non-255 maxval") {
  testutil::TempDir dir("p2");
  {
    std::ofstream out(dir.path() / "x.pgm");
    out << "P2\n# a comment\n3 3\n# another\n15\n0 15 5\n10 3 15\n0 0 1\n";
  }
  const Frame f = read_frame(dir.path() / "x.pgm");
  CHECK(f.width() == 3);
  CHECK(f.at(0, 0) == 0);
  CHECK(f.at(1, 0) == 255);
  CHECK(f.at(2, 0) == 85);   // 5/15*255
  CHECK(f.at(0, 1) == 170);  // 10/15*255
  CHECK(f.at(1, 1) == 51);
  CHECK(f.at(2, 2) == 17);
}

TEST_CASE("PNG frames decode through luma") {
  testutil::TempDir dir("png");
  std::vector<std::uint8_t> rgb;
  for (int i = 0; i < 12; ++i) {
    rgb.push_back(static_cast<std::uint8_t>(20 * i));
    rgb.push_back(static_cast<std::uint8_t>(255 - 20 * i));
    rgb.push_back(static_cast<std::uint8_t>(7 * i));
  }
  write_rgb_png(dir.path() / "f.png", 4, 3, rgb);
  const Frame f = read_frame(dir.path() / "f.png");
  REQUIRE(f.width() == 4);
  REQUIRE(f.height() == 3);
  for (int i = 0; i < 12; ++i) CHECK(f.at(i % 4, i / 4) == luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]));
}

TEST_CASE("26 PNG frames resized to 320x240") {
  testutil::TempDir dir("png26");
  Rng rng(3);
  for (int i = 0; i < 26; ++i) {
    std::vector<std::uint8_t> rgb(40 * 30 * 3);
    for (auto& v : rgb) v = static_cast<std::uint8_t>(rng.below(256));
    char name[32];
    std::snprintf(name, sizeof name, "img_%03d.png", i);
    write_rgb_png(dir.path() / name, 40, 30, rgb);
  }
  const FrameSequence seq = load_sequence(dir.path(), Size2{320, 240});
  CHECK(seq.size() == 26);
  for (const Frame& f : seq.frames()) CHECK(f.size() == Size2{320, 240});
}

TEST_CASE("loader errors are distinct") {
  testutil::TempDir dir("errors");
  CHECK(load_error(dir.path() / "nope") == ErrorCode::MissingDirectory);

  const fs::path two = dir.path() / "two";
  fs::create_directories(two);
  write_pgm(two / "a.pgm", Frame(4, 4));
  write_pgm(two / "b.pgm", Frame(4, 4));
  CHECK(load_error(two) == ErrorCode::SequenceTooShort);

  const fs::path bad = dir.path() / "bad";
  fs::create_directories(bad);
  for (const char* n : {"a.pgm", "b.pgm"}) write_pgm(bad / n, Frame(4, 4));
  std::ofstream(bad / "c.png") << "definitely not a png";
  CHECK(load_error(bad) == ErrorCode::UndecodableFile);

  const fs::path mixed = dir.path() / "mixed";
  fs::create_directories(mixed);
  write_pgm(mixed / "a.pgm", Frame(4, 4));
  write_pgm(mixed / "b.pgm", Frame(4, 4));
  write_pgm(mixed / "c.pgm", Frame(5, 4));
  CHECK(load_error(mixed) == ErrorCode::InconsistentDimensions);
  // with a target size the mismatch is resolved by resizing
  CHECK(load_sequence(mixed, Size2{6, 6}).size() == 3);
}

TEST_CASE("same-size sequence loads unchanged and in lexicographic order") {
  testutil::TempDir dir("order");
  Rng rng(11);
  std::vector<Frame> frames;
  for (int i = 0; i < 3; ++i) frames.push_back(testutil::random_frame(rng, 320, 240));
  // written out of order; names decide the order
  write_pgm(dir.path() / "b.pgm", frames[1]);
  write_pgm(dir.path() / "c.pgm", frames[2]);
  write_pgm(dir.path() / "a.pgm", frames[0]);
  std::ofstream(dir.path() / "notes.txt") << "ignored";
  const FrameSequence seq = load_sequence(dir.path());
  REQUIRE(seq.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(seq[static_cast<std::size_t>(i)] == frames[static_cast<std::size_t>(i)]);
  const FrameSequence same = load_sequence(dir.path(), Size2{320, 240});
  for (int i = 0; i < 3; ++i) CHECK(same[static_cast<std::size_t>(i)] == frames[static_cast<std::size_t>(i)]);
}

TEST_CASE("save then load is lossless") {
  testutil::TempDir dir("roundtrip");
  Rng rng(5);
  std::vector<Frame> frames;
  for (int i = 0; i < 12; ++i) frames.push_back(testutil::random_frame(rng, 9, 7));
  const FrameSequence seq(frames, "s");
  save_sequence(dir.path() / "s", seq);
  const FrameSequence back = load_sequence(dir.path() / "s");
  REQUIRE(back.size() == seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(back[i] == seq[i]);
  save_sequence(dir.path() / "t", back);
  const FrameSequence again = load_sequence(dir.path() / "t");
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(again[i] == seq[i]);
}

TEST_CASE("bilinear resize") {
  Frame f(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) f.at(x, y) = static_cast<std::uint8_t>(8 * x + 16 * y);
  CHECK(resize_bilinear(f, Size2{8, 8}) == f);
  const Frame half = resize_bilinear(f, Size2{4, 4});
  // each output pixel sits at the center of a 2x2 block, so it is the block mean
  CHECK(half.at(0, 0) == 12);
  CHECK(half.at(1, 1) == 60);
  CHECK(half.at(3, 2) == 8 * 6.5 + 16 * 4.5);
  const Frame flat = resize_bilinear(Frame(5, 3, 77), Size2{11, 8});
  CHECK(std::all_of(flat.pixels().begin(), flat.pixels().end(), [](auto v) { return v == 77; }));
}

TEST_CASE("grayscale stack shape, locality and round trip") {
  Rng rng(9);
  std::vector<Frame> frames;
  for (int i = 0; i < 5; ++i) frames.push_back(testutil::random_frame(rng, 4, 4));
  const FrameSequence seq(frames, "id", GestureLabel{2, "wave"});
  const Volume v = to_grayscale_stack(seq);
  CHECK(v.width() == 4);
  CHECK(v.height() == 4);
  CHECK(v.depth() == 5);
  for (int t = 0; t < 5; ++t)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) CHECK(v.at(x, y, t) == frames[static_cast<std::size_t>(t)].at(x, y));

  std::vector<Frame> changed = frames;
  changed[2].at(1, 3) = static_cast<std::uint8_t>(changed[2].at(1, 3) ^ 0xFF);
  const Volume w = to_grayscale_stack(FrameSequence(changed));
  int diffs = 0;
  for (int t = 0; t < 5; ++t)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        if (v.at(x, y, t) != w.at(x, y, t)) {
          ++diffs;
          CHECK((x == 1 && y == 3 && t == 2));
        }
  CHECK(diffs == 1);

  CHECK(from_grayscale_stack(v, "id", GestureLabel{2, "wave"}) == seq);
}

TEST_CASE("dataset layout round trip") {
  testutil::TempDir dir("dataset");
  Rng rng(21);
  LabeledDataset ds;
  ds.class_names = {"alpha", "beta"};
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j) {
      std::vector<Frame> frames;
      for (int i = 0; i < 4; ++i) frames.push_back(testutil::random_frame(rng, 6, 5));
      ds.sequences.emplace_back(frames, "", GestureLabel{c, ds.class_names[static_cast<std::size_t>(c)]});
    }
  save_dataset(dir.path(), ds);
  const LabeledDataset back = load_dataset(dir.path());
  CHECK(back.class_names == ds.class_names);
  REQUIRE(back.sequences.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.sequences[i].label() == ds.sequences[i].label());
    for (std::size_t f = 0; f < 4; ++f) CHECK(back.sequences[i][f] == ds.sequences[i][f]);
  }
  CHECK(back.sequences[3].source_id() == "beta/seq_0001");
}
