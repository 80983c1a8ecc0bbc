/**
 * @file oracle.cpp
 *
 * Intentionally slow. Do not optimize; its value is in being obviously
 * correct.
 */

#include "ehrgate/policy/oracle.hpp"

namespace ehrgate::policy {

namespace {

bool tuple_allows(const PolicyTuple& t, Role role, AccessMode mode,
                  const std::string& file_id, FieldId field) {
    if (t.role != role) return false;
    if (t.mode != mode) return false;
    if (t.file_id != file_id) return false;
    if (t.fields.is_wildcard()) return true;
    for (auto f : t.fields.fields()) {
        if (f == field) return true;
    }
    return false;
}

bool requested(const AccessRequest& request, FieldId field) {
    if (request.requested_fields.is_wildcard()) return true;
    for (auto f : request.requested_fields.fields()) {
        if (f == field) return true;
    }
    return false;
}

} // namespace

AccessDecision oracle_evaluate(const AccessRequest& request,
                               const User& requester,
                               std::span<const PolicyTuple> tuples) {
    FieldSet granted;
    std::size_t count = 0;
    for (auto field : all_fields) {
        if (!requested(request, field)) continue;
        bool allowed = false;
        for (const auto& t : tuples) {
            if (tuple_allows(t, requester.role, request.mode, request.file_id, field)) {
                allowed = true;
            }
        }
        if (allowed) {
            granted.insert(field);
            ++count;
        }
    }
    if (count == 0) return AccessDecision::deny(AccessReason::no_matching_tuple);
    if (count == field_count) return AccessDecision::grant(FieldSet::wildcard());
    return AccessDecision::grant(granted);
}

} // namespace ehrgate::policy
