/**
 * @file evaluate.cpp
 */

#include "ehrgate/policy/evaluate.hpp"

#include <algorithm>

namespace ehrgate::policy {

ConnectDecision evaluate_connection(std::string_view username,
                                    std::span<const User> users,
                                    const PolicyTable& policies) {
    auto it = std::find_if(users.begin(), users.end(),
                           [&](const User& u) { return u.username == username; });
    if (it == users.end()) {
        return {ConnectOutcome::no_connection, ConnectReason::unknown_user};
    }
    if (!policies.has_role(it->role)) {
        return {ConnectOutcome::no_connection, ConnectReason::no_policy_for_role};
    }
    return {ConnectOutcome::establish, ConnectReason::ok};
}

AccessDecision evaluate_access(const AccessRequest& request,
                               const User& requester,
                               const PolicyTable& policies) {
    const FieldSet* allowed = policies.find(requester.role, request.mode, request.file_id);
    if (allowed == nullptr) return AccessDecision::deny(AccessReason::no_matching_tuple);

    FieldSet granted = intersect(*allowed, request.requested_fields);
    if (granted.empty()) return AccessDecision::deny(AccessReason::no_matching_tuple);
    return AccessDecision::grant(std::move(granted));
}

HealthRecord filter_record(const HealthRecord& record, const FieldSet& granted) {
    HealthRecord out{record.file_id, record.owner_user_id, {}};
    for (const auto& [field, value] : record.values) {
        if (granted.contains(field)) out.values.emplace(field, value);
    }
    return out;
}

} // namespace ehrgate::policy
