/**
 * @file evaluate.hpp
 * @brief Connection gate, file-access decision and field redaction
 *
 * All functions are pure and safe to call concurrently.
 */

#pragma once

#include "ehrgate/policy/policy_table.hpp"
#include "ehrgate/policy/types.hpp"

#include <span>
#include <string_view>

namespace ehrgate::policy {

/**
 * @brief Decides whether a connection may be established for @p username.
 *
 * Establishes iff the username belongs to @p users and the table holds at
 * least one tuple for that user's role. No specific file is considered.
 */
ConnectDecision evaluate_connection(std::string_view username,
                                    std::span<const User> users,
                                    const PolicyTable& policies);

/**
 * @brief Decides a file-access request.
 *
 * Grants the intersection of the matching tuple's fields with the requested
 * fields. A missing tuple or an empty intersection is a denial. The caller
 * must have verified the session; @p requester.user_id must equal
 * @p request.user_id.
 */
AccessDecision evaluate_access(const AccessRequest& request,
                               const User& requester,
                               const PolicyTable& policies);

/// Copy of @p record with values restricted to @p granted.
HealthRecord filter_record(const HealthRecord& record, const FieldSet& granted);

} // namespace ehrgate::policy
