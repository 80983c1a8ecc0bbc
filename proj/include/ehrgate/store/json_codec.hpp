/**
 * @file json_codec.hpp
 * @brief JSON forms of the persisted entities
 */

#pragma once

#include "ehrgate/common/session.hpp"
#include "ehrgate/policy/types.hpp"
#include "ehrgate/store/audit.hpp"

#include <json.hpp>

namespace ehrgate::store {

using json = nlohmann::json;

json to_json(const policy::User& u);
policy::User user_from_json(const json& j);

/// Only the `values` object: field name -> string or number.
json values_to_json(const std::map<policy::FieldId, policy::FieldValue>& values);
/// Throws validation_error on unknown field names or non-scalar values.
std::map<policy::FieldId, policy::FieldValue> values_from_json(const json& j);

json to_json(const policy::HealthRecord& r);
policy::HealthRecord record_from_json(const json& j);

json to_json(const Session& s);
Session session_from_json(const json& j);

json to_json(const AuditEvent& e);
AuditEvent audit_from_json(const json& j);

} // namespace ehrgate::store
