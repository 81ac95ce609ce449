// Copyright 2026 The cscaffnew Authors. All Rights Reserved.
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
// =============================================================================
#include "cscaffnew/dataio.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cscaffnew/errors.h"

namespace cscaffnew {

namespace {

bool IsBlank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// from_chars rejects a leading '+', which LIBSVM files use for labels.
template <typename T>
bool ParseNumber(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && IsBlank(line[pos])) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && !IsBlank(line[pos])) ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

void ParseLine(std::string_view line, std::size_t line_no, Dataset& out) {
  const auto tokens = Tokenize(line);
  if (tokens.empty()) return;

  double label = 0.0;
  if (!ParseNumber(tokens[0], label)) {
    throw ParseError(line_no, "malformed label '" + std::string(tokens[0]) + "'");
  }
  Sample sample;
  sample.label = label > 0.0 ? 1.0 : -1.0;
  sample.features.reserve(tokens.size() - 1);

  std::int32_t previous = 0;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const std::string_view token = tokens[k];
    const std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected idx:val, got '" + std::string(token) + "'");
    }
    Feature feature{};
    if (!ParseNumber(token.substr(0, colon), feature.index)) {
      throw ParseError(line_no, "malformed index in '" + std::string(token) + "'");
    }
    if (feature.index < 1) {
      throw ParseError(line_no, "feature index < 1 in '" + std::string(token) + "'");
    }
    if (feature.index <= previous) {
      throw ParseError(line_no, "non-increasing feature index " +
                                    std::to_string(feature.index));
    }
    if (!ParseNumber(token.substr(colon + 1), feature.value)) {
      throw ParseError(line_no, "malformed value in '" + std::string(token) + "'");
    }
    previous = feature.index;
    sample.features.push_back(feature);
  }
  if (previous > out.max_index) out.max_index = previous;
  out.samples.push_back(std::move(sample));
}

}  // namespace

Dataset ParseLibsvm(std::string_view text) {
  Dataset dataset;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ParseLine(text.substr(pos, end - pos), ++line_no, dataset);
    pos = end + 1;
  }
  return dataset;
}

Dataset ParseLibsvm(std::istream& in) {
  Dataset dataset;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) ParseLine(line, ++line_no, dataset);
  return dataset;
}

Dataset ReadLibsvmFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file '" + path + "'");
  return ParseLibsvm(in);
}

std::string FormatLibsvm(const Dataset& dataset) {
  std::ostringstream out;
  char buf[64];
  for (const Sample& sample : dataset.samples) {
    out << (sample.label > 0 ? "+1" : "-1");
    for (const Feature& f : sample.features) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", f.index, f.value);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

ShardedDataset Shard(const Dataset& dataset, std::size_t n) {
  if (n < 2) throw ConfigError("shard: client count must be at least 2");
  if (dataset.size() < n) {
    throw ConfigError("shard: too few samples (" + std::to_string(dataset.size()) +
                      ") for " + std::to_string(n) + " clients");
  }
  const std::size_t per_client = dataset.size() / n;
  ShardedDataset sharded;
  sharded.dimension = dataset.max_index;
  sharded.discarded = dataset.size() - per_client * n;
  sharded.shards.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& shard = sharded.shards[i];
    auto first = dataset.samples.begin() + static_cast<std::ptrdiff_t>(i * per_client);
    shard.samples.assign(first, first + static_cast<std::ptrdiff_t>(per_client));
    for (const Sample& s : shard.samples) {
      if (!s.features.empty() && s.features.back().index > shard.max_index) {
        shard.max_index = s.features.back().index;
      }
    }
  }
  return sharded;
}

}  // namespace cscaffnew
