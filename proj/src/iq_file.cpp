#include "lora/iq_file.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "lora/errors.hpp"

namespace lora {

namespace {

static_assert(sizeof(float) == 4);

void put_le(std::uint8_t* dst, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) dst[b] = static_cast<std::uint8_t>(bits >> (8 * b));
}

float get_le(const std::uint8_t* src) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(src[b]) << (8 * b);
    return std::bit_cast<float>(bits);
}

}  // namespace

void write_cf32(const std::string& path, const cvec& samples) {
    std::vector<std::uint8_t> buf(samples.size() * 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        put_le(&buf[8 * i], static_cast<float>(samples[i].real()));
        put_le(&buf[8 * i + 4], static_cast<float>(samples[i].imag()));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::ios_base::failure("write failed: " + path);
}

cvec read_cf32(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw std::ios_base::failure("read failed: " + path);
    if (buf.size() % 8 != 0)
        throw MalformedFile(path + ": size is not a whole number of float32 I/Q pairs");
    cvec out(buf.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {get_le(&buf[8 * i]), get_le(&buf[8 * i + 4])};
    return out;
}

}  // namespace lora
