/* Copyright 2026 The segfusion Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <string>

#include "segfusion/seg_format.hpp"
#include "support/generators.hpp"

namespace segfusion::seg {
namespace {

const char* kTwoByTwo =
    "format ascii cr\n"
    "date Thu Jan 01 00:00:00 1970\n"
    "image 12345\n"
    "user 1102\n"
    "width 2\n"
    "height 2\n"
    "segments 2\n"
    "gray 0\n"
    "invert 0\n"
    "flipflop 0\n"
    "data\n"
    "0 0 0 1\n"
    "1 1 0 1\n";

ParseError parse_error(const std::string& text) {
  try {
    parse_seg(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error";
  return ParseError(ParseErrorKind::missing_header, 0, "");
}

TEST(ParseSeg, ExpandsRunsAndShiftsLabels) {
  const SegFile f = parse_seg_file(kTwoByTwo);
  EXPECT_EQ(f.map, LabelMap(2, 2, std::vector<Label>{1, 1, 2, 2}));
  EXPECT_EQ(f.header.width, 2u);
  EXPECT_EQ(f.header.height, 2u);
  EXPECT_EQ(f.header.segments, 2u);
  EXPECT_EQ(f.header.format, "ascii cr");
  ASSERT_EQ(f.header.extras.size(), 6u);
  EXPECT_EQ(f.header.extras[0].first, "date");
  EXPECT_EQ(f.header.extras[0].second, "Thu Jan 01 00:00:00 1970");
  EXPECT_EQ(f.header.extras[2], (std::pair<std::string, std::string>{"user", "1102"}));
}

TEST(ParseSeg, AcceptsCrlf) {
  std::string crlf;
  for (const char* p = kTwoByTwo; *p; ++p) {
    if (*p == '\n') crlf += '\r';
    crlf += *p;
  }
  EXPECT_EQ(parse_seg(crlf), parse_seg(kTwoByTwo));
}

TEST(ParseSeg, HeaderOnlyIsUncovered) {
  const ParseError e = parse_error("width 2\nheight 2\nsegments 1\ndata\n");
  EXPECT_EQ(e.kind(), ParseErrorKind::uncovered_pixels);
  EXPECT_EQ(e.line(), 4u);
}

TEST(ParseSeg, RunOutOfBounds) {
  const ParseError e = parse_error("width 2\nheight 2\nsegments 1\ndata\n0 0 0 5\n");
  EXPECT_EQ(e.kind(), ParseErrorKind::run_out_of_bounds);
  EXPECT_EQ(e.line(), 5u);
  EXPECT_EQ(parse_error("width 2\nheight 2\nsegments 1\ndata\n0 2 0 1\n").kind(),
            ParseErrorKind::run_out_of_bounds);
  EXPECT_EQ(parse_error("width 2\nheight 2\nsegments 1\ndata\n0 0 1 0\n").kind(),
            ParseErrorKind::run_out_of_bounds);
}

TEST(ParseSeg, OverlappingRuns) {
  const ParseError e =
      parse_error("width 3\nheight 1\nsegments 2\ndata\n0 0 0 1\n1 0 1 2\n");
  EXPECT_EQ(e.kind(), ParseErrorKind::overlapping_runs);
  EXPECT_EQ(e.line(), 6u);
  EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos);
}

TEST(ParseSeg, MalformedHeaders) {
  EXPECT_EQ(parse_error("width 2\nheight 2\nsegments 1\n").kind(), ParseErrorKind::missing_header);
  EXPECT_EQ(parse_error("width 2\nsegments 1\ndata\n0 0 0 1\n").kind(),
            ParseErrorKind::garbled_header);
  const ParseError e = parse_error("width two\nheight 2\nsegments 1\ndata\n");
  EXPECT_EQ(e.kind(), ParseErrorKind::garbled_header);
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(parse_error("width 1\nheight 1\nsegments 1\ndata\n0 0 0\n").kind(),
            ParseErrorKind::garbled_run);
  EXPECT_EQ(parse_error("width 1\nheight 1\nsegments 1\ndata\n0 0 0 x\n").kind(),
            ParseErrorKind::garbled_run);
  EXPECT_EQ(parse_error("width 1\nheight 1\nsegments 1\ndata\n0 0 -1 0\n").kind(),
            ParseErrorKind::garbled_run);
}

TEST(WriteSeg, EmitsMaximalZeroBasedRuns) {
  const std::string out = write_seg(LabelMap(2, 2, std::vector<Label>{1, 1, 2, 2}));
  EXPECT_EQ(out,
            "format ascii cr\n"
            "width 2\n"
            "height 2\n"
            "segments 2\n"
            "data\n"
            "0 0 0 1\n"
            "1 1 0 1\n");
}

TEST(WriteSeg, ReproducesParsedFile) {
  const SegFile f = parse_seg_file(kTwoByTwo);
  EXPECT_EQ(write_seg(f.map, f.header.extras), kTwoByTwo);
}

TEST(WriteSeg, RejectsBackground) {
  EXPECT_THROW(write_seg(LabelMap(2, 1, std::vector<Label>{0, 1})), InvalidArgument);
}

TEST(SegProperty, RoundTripPreservesPartition) {
  testing::Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelMap m = testing::random_label_map(rng, testing::uniform(rng, 1, 40),
                                                 testing::uniform(rng, 1, 30), 12);
    const std::string text = write_seg(m);
    const LabelMap back = parse_seg(text);
    ASSERT_TRUE(partition_equal(back, m));
    ASSERT_EQ(write_seg(back), text);
  }
}

}  // namespace
}  // namespace segfusion::seg
