// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cicdec/errors.hpp"
#include "cicdec/samples.hpp"

namespace cicdec {

// Atomic file write: content goes to a sibling temp file first, then a
// rename moves it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Text sample format: one integer per line, blank lines ignored.
// rate_hz/width tag the returned block; width 0 skips the range check.
SampleBlock read_samples_text(const std::filesystem::path& path, double rate_hz, int width);
void write_samples_text(const std::filesystem::path& path, const SampleBlock& block);

// Binary sample format, 16-byte header then 8-bit signed samples:
//   bytes 0-7   magic "CICDEC01"
//   bytes 8-11  u32 sample rate, little endian
//   bytes 12-15 u32 sample count, little endian
SampleBlock read_samples_binary(const std::filesystem::path& path);
void write_samples_binary(const std::filesystem::path& path, const SampleBlock& block);

// True if the file starts with the binary sample magic.
bool is_binary_sample_file(const std::filesystem::path& path);

// Reads either format, dispatching on the magic.
SampleBlock read_samples_auto(const std::filesystem::path& path, double rate_hz, int width);

// Packed bit stream for +/-1 sequences (+1 -> bit 1), LSB-first bytes:
//   bytes 0-7   magic "CICDECPB"
//   bytes 8-11  u32 sample rate, little endian
//   bytes 12-15 u32 bit count, little endian
void write_packed_bits(const std::filesystem::path& path, const SampleBlock& block);
SampleBlock read_packed_bits(const std::filesystem::path& path);

} // namespace cicdec
