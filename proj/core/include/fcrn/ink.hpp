/* Copyright (c) 2026 The FCRN Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fcrn {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Stroke {
  std::vector<Point> points;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

// Symbol indices into an Alphabet. Index 0 is the CTC blank and never
// appears in a label.
using Label = std::vector<int>;

struct TextLineSample {
  std::vector<Stroke> strokes;
  Label label;

  friend bool operator==(const TextLineSample&, const TextLineSample&) = default;
};

// Ordered character set C with the blank reserved at index 0, so symbol i of
// C has index i + 1 and indices are dense in 0..|C|.
class Alphabet {
 public:
  static constexpr int kBlank = 0;
  static constexpr std::string_view kBlankName = "_";
  static constexpr int kMaxSymbols = 100;

  explicit Alphabet(std::vector<std::string> symbols);

  // Symbols named a..z, then A..Z, then c52, c53, ...
  static Alphabet make_default(int num_symbols);

  int num_symbols() const noexcept { return static_cast<int>(symbols_.size()); }
  // |C'| = |C| + 1.
  int num_labels() const noexcept { return num_symbols() + 1; }

  const std::string& name(int index) const;
  int index(std::string_view name) const;
  bool contains(int index) const noexcept { return index >= 1 && index <= num_symbols(); }

  Label parse(std::string_view space_separated) const;
  std::string format(const Label& label) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> lookup_;
};

std::vector<TextLineSample> read_ink(std::istream& in, const Alphabet& alphabet);
void write_ink(std::ostream& out, const std::vector<TextLineSample>& samples,
               const Alphabet& alphabet);

std::vector<TextLineSample> load_ink(const std::filesystem::path& path, const Alphabet& alphabet);
void save_ink(const std::filesystem::path& path, const std::vector<TextLineSample>& samples,
              const Alphabet& alphabet);

// Corpus files: one label per line, symbols separated by spaces.
std::vector<Label> load_corpus(const std::filesystem::path& path, const Alphabet& alphabet);
// Same format, one entry per line; blank lines are empty transcriptions.
std::vector<Label> load_transcriptions(const std::filesystem::path& path, const Alphabet& alphabet);
void save_corpus(const std::filesystem::path& path, const std::vector<Label>& corpus,
                 const Alphabet& alphabet);

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
  bool empty = true;

  double width() const noexcept { return empty ? 0.0 : max_x - min_x; }
  double height() const noexcept { return empty ? 0.0 : max_y - min_y; }
};

BoundingBox bounding_box(const TextLineSample& sample);

struct NormalizedSample {
  TextLineSample sample;
  // Set when the input had zero height and was only translated.
  bool degenerate = false;
};

// Scales uniformly so the bounding box is `height` tall and translates it to
// the origin. A zero-height sample is translated to y = height / 2 instead.
NormalizedSample normalize_height(const TextLineSample& sample, double height);

// Shortest decimal that parses back to the same double.
std::string format_number(double value);

}  // namespace fcrn
