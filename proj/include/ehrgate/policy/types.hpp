/**
 * @file types.hpp
 * @brief Subjects, grants, requests, records and decisions of the access model
 */

#pragma once

#include "ehrgate/policy/field.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ehrgate::policy {

enum class Role : std::uint8_t { patient, physician, records_officer, admin };

inline constexpr std::array<Role, 4> all_roles = {
    Role::patient, Role::physician, Role::records_officer, Role::admin};

std::string_view to_string(Role r) noexcept;
std::optional<Role> try_parse_role(std::string_view text) noexcept;
/// Throws parse_error naming the offending text.
Role parse_role(std::string_view text);

enum class AccessMode : std::uint8_t { read, write };

inline constexpr std::array<AccessMode, 2> all_modes = {AccessMode::read, AccessMode::write};

std::string_view to_string(AccessMode m) noexcept;
std::optional<AccessMode> try_parse_mode(std::string_view text) noexcept;
AccessMode parse_mode(std::string_view text);

struct User {
    std::string user_id;
    std::string username;
    Role role = Role::patient;
    std::string credential_ref;

    bool operator==(const User&) const = default;
};

/**
 * @brief One grant: members of @c role may use @c mode on @c fields of
 * record @c file_id.
 */
struct PolicyTuple {
    Role role = Role::patient;
    AccessMode mode = AccessMode::read;
    std::string file_id;
    FieldSet fields;

    bool operator==(const PolicyTuple&) const = default;
};

struct AccessRequest {
    std::string user_id;
    AccessMode mode = AccessMode::read;
    std::string file_id;
    FieldSet requested_fields = FieldSet::wildcard(); ///< wildcard: everything allowed

    bool operator==(const AccessRequest&) const = default;
};

/// Scalar stored in one record field. Units are free-form per field.
using FieldValue = std::variant<std::string, double>;

std::string to_string(const FieldValue& v);

struct HealthRecord {
    std::string file_id;
    std::string owner_user_id;
    std::map<FieldId, FieldValue> values;

    bool operator==(const HealthRecord&) const = default;
};

enum class ConnectOutcome : std::uint8_t { establish, no_connection };
enum class ConnectReason : std::uint8_t { ok, unknown_user, no_policy_for_role };

struct ConnectDecision {
    ConnectOutcome outcome = ConnectOutcome::no_connection;
    ConnectReason reason = ConnectReason::unknown_user;

    bool established() const noexcept { return outcome == ConnectOutcome::establish; }
    bool operator==(const ConnectDecision&) const = default;
};

enum class AccessOutcome : std::uint8_t { granted, denied };
enum class AccessReason : std::uint8_t { ok, no_matching_tuple, not_authenticated };

struct AccessDecision {
    AccessOutcome outcome = AccessOutcome::denied;
    FieldSet granted_fields; ///< empty when denied
    AccessReason reason = AccessReason::no_matching_tuple;

    bool granted() const noexcept { return outcome == AccessOutcome::granted; }

    static AccessDecision grant(FieldSet fields) {
        return {AccessOutcome::granted, std::move(fields), AccessReason::ok};
    }
    static AccessDecision deny(AccessReason why) { return {AccessOutcome::denied, {}, why}; }

    bool operator==(const AccessDecision&) const = default;
};

std::string_view to_string(ConnectReason r) noexcept;
std::string_view to_string(AccessReason r) noexcept;

} // namespace ehrgate::policy
