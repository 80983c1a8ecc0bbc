/**
 * @file fixture.hpp
 * @brief Seeded users, policies and records that scenarios attack
 *
 * A fixture directory has the health-store layout plus `scenario.cfg`
 * (key=value). Plaintext passwords live only in scenario.cfg, as
 * `password.<username>=...`; the store files hold salted hashes.
 */

#pragma once

#include "ehrgate/policy/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ehrgate::harness {

class fixture_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Fixture {
    std::filesystem::path dir;
    std::map<std::string, std::string> config;    ///< scenario.cfg without passwords
    std::map<std::string, std::string> passwords; ///< username -> plaintext
    std::vector<policy::User> users;
    std::vector<policy::PolicyTuple> tuples;      ///< raw, in file order
    std::vector<policy::HealthRecord> records;

    /// Throws fixture_error when files are missing or inconsistent.
    static Fixture load(const std::filesystem::path& dir);

    const policy::User& user(const std::string& username) const;
    const std::string& password(const std::string& username) const;
    std::string param(const std::string& key, const std::string& fallback) const;
    std::uint64_t param_u64(const std::string& key, std::uint64_t fallback) const;
};

/**
 * @brief Writes the default fixture: two patients, two physicians, a
 * records officer and an admin; records rec1 and rec2 with all twelve
 * fields populated; a policy where dr_a may read only heart_rate of rec1.
 *
 * Same seed, same passwords and values.
 */
void write_default_fixture(const std::filesystem::path& dir, std::uint64_t seed,
                           unsigned pbkdf2_iterations);

/// Copies the fixture's store files (not audit or sessions) into @p data_dir.
void seed_data_dir(const std::filesystem::path& fixture_dir, const std::filesystem::path& data_dir);

} // namespace ehrgate::harness
