/**
 * @file crypto.cpp
 */

#include "ehrgate/crypto/crypto.hpp"

#include "ehrgate/common/error.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <charconv>

namespace ehrgate::crypto {

namespace {
constexpr std::string_view scheme_prefix = "pbkdf2-sha256:i=";
constexpr char hex_digits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
} // namespace

std::vector<std::uint8_t> random_bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    if (n != 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
        throw error("system random generator failed");
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += hex_digits[b >> 4];
        out += hex_digits[b & 0x0f];
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw parse_error("odd-length hex string");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw parse_error("invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string random_token() { return to_hex(random_bytes(32)); }

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
    if (a.size() != b.size()) return false;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

std::string HashScheme::tag() const {
    return std::string(scheme_prefix) + std::to_string(iterations);
}

HashScheme HashScheme::from_tag(std::string_view tag) {
    if (!tag.starts_with(scheme_prefix)) {
        throw parse_error("unsupported credential scheme '" + std::string(tag) + "'");
    }
    auto digits = tag.substr(scheme_prefix.size());
    HashScheme s;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), s.iterations);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || s.iterations == 0) {
        throw parse_error("bad iteration count in '" + std::string(tag) + "'");
    }
    return s;
}

std::vector<std::uint8_t> derive_hash(std::string_view password,
                                      std::span<const std::uint8_t> salt,
                                      const HashScheme& scheme) {
    std::vector<std::uint8_t> out(hash_size);
    int rc = PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                               salt.data(), static_cast<int>(salt.size()),
                               static_cast<int>(scheme.iterations), EVP_sha256(),
                               static_cast<int>(out.size()), out.data());
    if (rc != 1) throw error("PBKDF2 derivation failed");
    return out;
}

} // namespace ehrgate::crypto
