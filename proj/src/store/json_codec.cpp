/**
 * @file json_codec.cpp
 */

#include "ehrgate/store/json_codec.hpp"

#include "ehrgate/common/error.hpp"

namespace ehrgate::store {

using namespace ehrgate::policy;

json to_json(const User& u) {
    return {{"user_id", u.user_id},
            {"username", u.username},
            {"role", to_string(u.role)},
            {"credential_ref", u.credential_ref}};
}

User user_from_json(const json& j) {
    User u;
    u.user_id = j.at("user_id").get<std::string>();
    u.username = j.at("username").get<std::string>();
    u.role = parse_role(j.at("role").get<std::string>());
    u.credential_ref = j.value("credential_ref", u.user_id);
    return u;
}

json values_to_json(const std::map<FieldId, FieldValue>& values) {
    json out = json::object();
    for (const auto& [field, value] : values) {
        auto key = std::string(to_string(field));
        if (auto s = std::get_if<std::string>(&value)) {
            out[key] = *s;
        } else {
            out[key] = std::get<double>(value);
        }
    }
    return out;
}

std::map<FieldId, FieldValue> values_from_json(const json& j) {
    if (!j.is_object()) throw validation_error("values must be a JSON object");
    std::map<FieldId, FieldValue> out;
    for (const auto& [key, value] : j.items()) {
        auto field = parse_field(key);
        if (!field) throw validation_error("unknown field '" + key + "'");
        if (value.is_string()) {
            out.emplace(*field, value.get<std::string>());
        } else if (value.is_number()) {
            out.emplace(*field, value.get<double>());
        } else {
            throw validation_error("field '" + key + "' must be a string or number");
        }
    }
    return out;
}

json to_json(const HealthRecord& r) {
    return {{"file_id", r.file_id},
            {"owner_user_id", r.owner_user_id},
            {"values", values_to_json(r.values)}};
}

HealthRecord record_from_json(const json& j) {
    HealthRecord r;
    r.file_id = j.at("file_id").get<std::string>();
    r.owner_user_id = j.at("owner_user_id").get<std::string>();
    r.values = values_from_json(j.at("values"));
    return r;
}

json to_json(const Session& s) {
    return {{"token", s.token},
            {"user_id", s.user_id},
            {"established_at", s.established_at},
            {"expires_at", s.expires_at},
            {"revoked", s.revoked}};
}

Session session_from_json(const json& j) {
    Session s;
    s.token = j.at("token").get<std::string>();
    s.user_id = j.at("user_id").get<std::string>();
    s.established_at = j.at("established_at").get<double>();
    s.expires_at = j.at("expires_at").get<double>();
    s.revoked = j.value("revoked", false);
    return s;
}

json to_json(const AuditEvent& e) {
    json j = {{"sequence", e.sequence},
              {"timestamp", e.timestamp},
              {"correlation_id", e.correlation_id},
              {"actor_username", e.actor_username},
              {"event_kind", to_string(e.kind)},
              {"detail", e.detail}};
    if (e.decision_fields) {
        j["decision_fields"] = e.decision_fields->to_string();
    } else {
        j["decision_fields"] = nullptr;
    }
    return j;
}

AuditEvent audit_from_json(const json& j) {
    AuditEvent e;
    e.sequence = j.at("sequence").get<std::uint64_t>();
    e.timestamp = j.at("timestamp").get<double>();
    e.correlation_id = j.at("correlation_id").get<std::string>();
    e.actor_username = j.at("actor_username").get<std::string>();
    auto kind = parse_audit_kind(j.at("event_kind").get<std::string>());
    if (!kind) throw parse_error("unknown audit event kind");
    e.kind = *kind;
    e.detail = j.value("detail", "");
    if (j.contains("decision_fields") && !j["decision_fields"].is_null()) {
        e.decision_fields = FieldSet::parse(j["decision_fields"].get<std::string>());
    }
    return e;
}

} // namespace ehrgate::store
