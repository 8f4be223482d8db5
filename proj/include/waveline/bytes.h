// Copyright 2026 The Waveline Authors. All Rights Reserved.
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

#ifndef WAVELINE_BYTES_H_
#define WAVELINE_BYTES_H_

#include <array>
#include <filesystem>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace waveline {

using Bytes = std::vector<uint8_t>;
using Md5Digest = std::array<uint8_t, 16>;

// Lowercase, no prefix.
std::string HexEncode(std::span<const uint8_t> bytes);

// Accepts upper or lower case. Returns nullopt on odd length or a non-hex
// character.
std::optional<Bytes> HexDecode(std::string_view hex);

Md5Digest Md5(std::span<const uint8_t> bytes);
Md5Digest Md5(std::string_view text);

inline std::string Md5Hex(std::span<const uint8_t> bytes) {
  return HexEncode(Md5(bytes));
}
inline std::string Md5Hex(std::string_view text) {
  return HexEncode(Md5(text));
}

// Whole-file helpers; both throw InputError naming the path.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace waveline

#endif  // WAVELINE_BYTES_H_
