/**
 * @file crypto.hpp
 * @brief Random tokens and salted password hashing (OpenSSL underneath)
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ehrgate::crypto {

/// Bytes from the system CSPRNG. Throws ehrgate::error if it fails.
std::vector<std::uint8_t> random_bytes(std::size_t n);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws parse_error on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

/// 32 random bytes, lowercase hex (64 chars).
std::string random_token();

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;

inline constexpr std::size_t salt_size = 16;
inline constexpr std::size_t hash_size = 32;
inline constexpr unsigned default_pbkdf2_iterations = 310000;

/**
 * @brief Hashing scheme and parameters, serialized as
 * `pbkdf2-sha256:i=<iterations>`.
 */
struct HashScheme {
    unsigned iterations = default_pbkdf2_iterations;

    std::string tag() const;
    /// Throws parse_error for unknown schemes.
    static HashScheme from_tag(std::string_view tag);
};

std::vector<std::uint8_t> derive_hash(std::string_view password,
                                      std::span<const std::uint8_t> salt,
                                      const HashScheme& scheme);

} // namespace ehrgate::crypto
