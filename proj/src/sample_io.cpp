// SPDX-License-Identifier: Apache-2.0
#include "cicdec/sample_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cicdec/word.hpp"

namespace cicdec {

namespace {

constexpr char kBinaryMagic[8] = {'C', 'I', 'C', 'D', 'E', 'C', '0', '1'};
constexpr char kPackedMagic[8] = {'C', 'I', 'C', 'D', 'E', 'C', 'P', 'B'};

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw input_error("read failed for " + path.string());
    return std::move(buf).str();
}

std::string trimmed(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
}

} // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw input_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw input_error("rename to " + path.string() + " failed: " + ec.message());
    }
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    return fnv1a64(read_file(path));
}

SampleBlock read_samples_text(const std::filesystem::path& path, double rate_hz, int width) {
    const std::string data = read_file(path);
    SampleBlock block;
    block.rate_hz = rate_hz;
    block.width = width;
    std::istringstream in(data);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string tok = trimmed(line);
        if (tok.empty()) continue;
        std::int64_t value = 0;
        const auto* begin = tok.data();
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw input_error(path.string() + ":" + std::to_string(line_no) +
                              ": malformed sample '" + tok + "'");
        }
        if (width > 0 && !Word::fits(value, width)) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": sample " +
                              std::to_string(value) + " exceeds " + std::to_string(width) +
                              "-bit range");
        }
        block.samples.push_back(value);
    }
    return block;
}

void write_samples_text(const std::filesystem::path& path, const SampleBlock& block) {
    std::string out;
    out.reserve(block.samples.size() * 8);
    for (std::int64_t v : block.samples) {
        out += std::to_string(v);
        out += '\n';
    }
    atomic_write(path, out);
}

SampleBlock read_samples_binary(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kBinaryMagic, 8) != 0)
        throw input_error(path.string() + ": missing binary sample header");
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t rate = get_u32le(bytes + 8);
    const std::uint32_t count = get_u32le(bytes + 12);
    if (data.size() != 16 + static_cast<std::size_t>(count))
        throw input_error(path.string() + ": header declares " + std::to_string(count) +
                          " samples but file holds " + std::to_string(data.size() - 16));
    SampleBlock block;
    block.rate_hz = static_cast<double>(rate);
    block.width = 8;
    block.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        block.samples.push_back(static_cast<std::int8_t>(bytes[16 + i]));
    return block;
}

void write_samples_binary(const std::filesystem::path& path, const SampleBlock& block) {
    if (block.samples.size() > 0xffffffffULL)
        throw input_error("binary sample format caps length at 2^32-1");
    std::string out;
    out.reserve(16 + block.samples.size());
    out.append(kBinaryMagic, 8);
    put_u32le(out, static_cast<std::uint32_t>(block.rate_hz + 0.5));
    put_u32le(out, static_cast<std::uint32_t>(block.samples.size()));
    for (std::int64_t v : block.samples) {
        if (v < -128 || v > 127)
            throw input_error("sample " + std::to_string(v) +
                              " does not fit the 8-bit binary format");
        out.push_back(static_cast<char>(static_cast<std::int8_t>(v)));
    }
    atomic_write(path, out);
}

bool is_binary_sample_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path.string());
    char head[8] = {};
    in.read(head, 8);
    return in.gcount() == 8 && std::memcmp(head, kBinaryMagic, 8) == 0;
}

SampleBlock read_samples_auto(const std::filesystem::path& path, double rate_hz, int width) {
    if (is_binary_sample_file(path)) return read_samples_binary(path);
    return read_samples_text(path, rate_hz, width);
}

void write_packed_bits(const std::filesystem::path& path, const SampleBlock& block) {
    if (block.samples.size() > 0xffffffffULL)
        throw input_error("packed bit format caps length at 2^32-1");
    std::string out;
    out.reserve(16 + block.samples.size() / 8 + 1);
    out.append(kPackedMagic, 8);
    put_u32le(out, static_cast<std::uint32_t>(block.rate_hz + 0.5));
    put_u32le(out, static_cast<std::uint32_t>(block.samples.size()));
    unsigned char acc = 0;
    int nbits = 0;
    for (std::int64_t v : block.samples) {
        if (v != 1 && v != -1)
            throw input_error("packed bit format requires +/-1 samples, got " +
                              std::to_string(v));
        if (v == 1) acc |= static_cast<unsigned char>(1u << nbits);
        if (++nbits == 8) {
            out.push_back(static_cast<char>(acc));
            acc = 0;
            nbits = 0;
        }
    }
    if (nbits > 0) out.push_back(static_cast<char>(acc));
    atomic_write(path, out);
}

SampleBlock read_packed_bits(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kPackedMagic, 8) != 0)
        throw input_error(path.string() + ": missing packed bit header");
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t rate = get_u32le(bytes + 8);
    const std::uint32_t count = get_u32le(bytes + 12);
    const std::size_t need = 16 + (count + 7) / 8;
    if (data.size() != need)
        throw input_error(path.string() + ": expected " + std::to_string(need) +
                          " bytes, found " + std::to_string(data.size()));
    SampleBlock block;
    block.rate_hz = static_cast<double>(rate);
    block.width = 2;
    block.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const unsigned char byte = bytes[16 + i / 8];
        block.samples.push_back((byte >> (i % 8)) & 1u ? 1 : -1);
    }
    return block;
}

} // namespace cicdec
