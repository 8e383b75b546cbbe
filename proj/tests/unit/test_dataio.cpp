// Copyright 2026 The robustlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "core/training.hpp"

namespace robustlab {
namespace {

std::vector<std::uint8_t> idx_images() {
  // magic 0x803, 2 images of 2x2
  return {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 51, 102, 255, 255, 0, 0, 204};
}
std::vector<std::uint8_t> idx_labels(std::uint8_t count = 2) { return {0, 0, 8, 1, 0, 0, 0, count, 1, 0}; }

TEST(Idx, ParsesFixtureExactly) {
  const Dataset d = parse_idx(idx_images(), idx_labels());
  ASSERT_EQ(d.size(), 2u);
  ASSERT_EQ(d.dim(), 4);
  EXPECT_EQ(d.inputs[0][1], 51.0 / 255.0);
  EXPECT_EQ(d.inputs[0][3], 1.0);
  EXPECT_EQ(d.inputs[1][3], 204.0 / 255.0);
  EXPECT_EQ(d.labels, (std::vector<int>{1, 0}));
}

TEST(Idx, TruncationNamesOffset) {
  auto img = idx_images();
  img.resize(20);
  try {
    parse_idx(img, idx_labels());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 20u);
    EXPECT_NE(std::string(e.what()).find("20"), std::string::npos);
  }
  auto header = idx_images();
  header.resize(6);
  EXPECT_THROW(parse_idx(header, idx_labels()), ParseError);
}

TEST(Idx, BadMagicAndCountMismatch) {
  auto img = idx_images();
  img[3] = 1;
  EXPECT_THROW(parse_idx(img, idx_labels()), ParseError);
  auto lab = idx_labels(3);
  lab.push_back(0);
  EXPECT_THROW(parse_idx(idx_images(), lab), ContractError);
}

TEST(Idx, LoadsFromFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto write = [](const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), static_cast<long>(b.size()));
  };
  write(dir / "rl_img.idx", idx_images());
  write(dir / "rl_lab.idx", idx_labels());
  EXPECT_EQ(load_idx((dir / "rl_img.idx").string(), (dir / "rl_lab.idx").string()).size(), 2u);
  EXPECT_THROW(load_idx((dir / "absent.idx").string(), (dir / "rl_lab.idx").string()), IoError);
}

TEST(Csv, RoundTripIsExact) {
  const Dataset d = synth_blobs(3, 5, 4, 1.0, 0.3, 8);
  const auto path = (std::filesystem::temp_directory_path() / "rl_data.csv").string();
  save_csv(d, path);
  const Dataset back = load_csv(path);
  ASSERT_EQ(back.size(), d.size());
  EXPECT_EQ(back.labels, d.labels);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(back.inputs[i], d.inputs[i]);
}

TEST(Csv, RejectsMalformedRows) {
  const auto path = (std::filesystem::temp_directory_path() / "rl_bad.csv").string();
  std::ofstream(path) << "label,x0,x1\n0,0.5,0.25\n1,abc,0.1\n";
  EXPECT_THROW(load_csv(path), ParseError);
  std::ofstream(path) << "label,x0,x1\n0,0.5\n";
  EXPECT_THROW(load_csv(path), ParseError);
}

TEST(SynthBlobs, DeterministicAndCentered) {
  const Dataset a = synth_blobs(2, 10, 3, 2.0, 0.5, 1);
  const Dataset b = synth_blobs(2, 10, 3, 2.0, 0.5, 1);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.inputs[i], b.inputs[i]);
  const Dataset c = synth_blobs(2, 3, 4, 2.0, 0.0, 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.inputs[i], c.inputs[c.labels[i]]);  // first rows are one per class
    EXPECT_NEAR(c.inputs[i].norm(), 2.0, 1e-12);
  }
  EXPECT_THROW(synth_blobs(0, 3, 4, 1.0, 0.1, 1), ContractError);
}

TEST(SynthBlobs, SeparableBlobsTrainToHighAccuracy) {
  const Dataset train_set = synth_blobs(2, 200, 10, 3.0, 0.3, 2);
  const Dataset test_set = synth_blobs(2, 200, 10, 3.0, 0.3, 3);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 32;
  cfg.seed = 4;
  const TrainResult r = train(train_set, ModelSpec{}, cfg);
  EXPECT_GE(evaluate(*r.model, test_set, 0.0, 1, 0), 0.99);
}

TEST(SynthDesk, ShapeAndBalance) {
  const Dataset d = synth_desk(DeskSpec{});
  EXPECT_EQ(d.size(), 400u);
  EXPECT_EQ(d.dim(), 64);
  EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), 1), 200);
}

}  // namespace
}  // namespace robustlab
