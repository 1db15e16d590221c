#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>

namespace platoon {

/// Incremental FNV-1a (64-bit) used for content addressing of scenarios and
/// gains bundles.
class Digest {
public:
    Digest& add_bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001B3ull;
        }
        return *this;
    }
    Digest& add(double v) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        return add_bytes(&bits, sizeof(bits));
    }
    Digest& add(std::uint64_t v) { return add_bytes(&v, sizeof(v)); }
    Digest& add(std::int64_t v) { return add_bytes(&v, sizeof(v)); }
    Digest& add(int v) { return add(static_cast<std::int64_t>(v)); }
    Digest& add(const std::string& s) { return add_bytes(s.data(), s.size()); }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ull;
};

}  // namespace platoon
