/**
 * @file gateway.cpp
 */

#include "ehrgate/gateway/gateway.hpp"

#include "ehrgate/common/error.hpp"
#include "ehrgate/store/json_codec.hpp"

#include <httplib.h>

#include <charconv>

namespace ehrgate::gateway {

using agents::Status;
using store::json;

std::string ApiError::body() const {
    return json{{"code", code}, {"message", message}, {"correlation_id", correlation_id}}.dump();
}

ApiError to_api_error(Status status, std::string message, std::string correlation_id) {
    ApiError e;
    e.message = std::move(message);
    e.correlation_id = std::move(correlation_id);
    switch (status) {
        case Status::validation_error: e.http_status = 400; e.code = "validation_error"; break;
        case Status::invalid_credentials:
        case Status::not_authenticated: e.http_status = 401; e.code = "invalid_credentials"; break;
        case Status::access_denied: e.http_status = 403; e.code = "access_denied"; break;
        case Status::not_found: e.http_status = 404; e.code = "not_found"; break;
        case Status::duplicate_username: e.http_status = 409; e.code = "duplicate_username"; break;
        case Status::overloaded: e.http_status = 503; e.code = "overloaded"; break;
        case Status::storage_error:
        case Status::ok: e.http_status = 500; e.code = "internal_error"; break;
    }
    return e;
}

bool valid_correlation_id(std::string_view id) noexcept {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

namespace {

std::string correlation_of(const httplib::Request& req) {
    auto id = req.get_header_value("X-Correlation-Id");
    return valid_correlation_id(id) ? id : agents::new_correlation_id();
}

std::string bearer_token(const httplib::Request& req) {
    auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return {};
    return h.substr(prefix.size());
}

void send_json(httplib::Response& res, int status, const json& body, const std::string& cid) {
    res.status = status;
    res.set_header("X-Correlation-Id", cid);
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& e) {
    res.status = e.http_status;
    res.set_header("X-Correlation-Id", e.correlation_id);
    res.set_content(e.body(), "application/json");
}

template <typename Outcome>
bool failed(httplib::Response& res, const Outcome& o) {
    if (o.status == Status::ok) return false;
    send_error(res, to_api_error(o.status, o.message, o.correlation_id));
    return true;
}

void bad_request(httplib::Response& res, const std::string& cid, const std::string& message) {
    send_error(res, to_api_error(Status::validation_error, message, cid));
}

/// Parsed JSON object body, or nullopt after answering 400.
std::optional<json> object_body(const httplib::Request& req, httplib::Response& res, const std::string& cid) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        bad_request(res, cid, "request body must be a JSON object");
        return std::nullopt;
    }
    return body;
}

std::optional<std::string> string_member(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

} // namespace

struct Gateway::Impl {
    agents::Runtime& runtime;
    httplib::Server server;

    Impl(agents::Runtime& rt, std::size_t workers) : runtime(rt) {
        server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
        routes();
    }

    void routes() {
        server.Get("/api/health", [](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}}, correlation_of(req));
        });

        server.Post("/api/register", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            auto body = object_body(req, res, cid);
            if (!body) return;
            auto username = string_member(*body, "username");
            auto password = string_member(*body, "password");
            auto role_text = string_member(*body, "role");
            if (!username || !password || !role_text) {
                return bad_request(res, cid, "username, password and role are required strings");
            }
            auto role = policy::try_parse_role(*role_text);
            if (!role) return bad_request(res, cid, "invalid role '" + *role_text + "'");
            auto out = runtime.register_user(*username, *password, *role, false, cid).get();
            if (failed(res, out)) return;
            send_json(res, 201, {{"user_id", out.user_id}}, cid);
        });

        server.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            auto body = object_body(req, res, cid);
            if (!body) return;
            auto username = string_member(*body, "username");
            auto password = string_member(*body, "password");
            if (!username || !password) return bad_request(res, cid, "username and password are required strings");
            auto out = runtime.login(*username, *password, cid).get();
            if (failed(res, out)) return;
            send_json(res, 200,
                      {{"token", out.session.token},
                       {"expires_at", out.session.expires_at},
                       {"role", policy::to_string(out.role)}},
                      cid);
        });

        server.Get(R"(/api/records/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            auto fields = policy::FieldSet::wildcard();
            if (req.has_param("fields")) {
                try {
                    auto text = req.get_param_value("fields");
                    if (text.empty()) return bad_request(res, cid, "fields must not be empty");
                    fields = policy::FieldSet::parse(text, ',');
                } catch (const parse_error& e) {
                    return bad_request(res, cid, e.what());
                }
            }
            auto out = runtime.read_record(bearer_token(req), req.matches[1], fields, cid).get();
            if (failed(res, out)) return;
            send_json(res, 200,
                      {{"file_id", out.record->file_id}, {"values", store::values_to_json(out.record->values)}},
                      cid);
        });

        server.Put(R"(/api/records/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            auto body = object_body(req, res, cid);
            if (!body) return;
            std::map<policy::FieldId, policy::FieldValue> values;
            try {
                if (!body->contains("values")) return bad_request(res, cid, "values is required");
                values = store::values_from_json((*body)["values"]);
            } catch (const validation_error& e) {
                return bad_request(res, cid, e.what());
            }
            if (values.empty()) return bad_request(res, cid, "values must not be empty");
            auto out = runtime.write_record(bearer_token(req), req.matches[1], std::move(values), cid).get();
            if (failed(res, out)) return;
            json written = json::array();
            for (const auto& [field, value] : out.record->values) written.push_back(policy::to_string(field));
            send_json(res, 200, {{"file_id", out.record->file_id}, {"written", written}}, cid);
        });

        server.Post("/api/logout", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            auto out = runtime.revoke(bearer_token(req), cid).get();
            if (failed(res, out)) return;
            res.status = 204;
            res.set_header("X-Correlation-Id", cid);
        });

        server.Get("/api/audit", [this](const httplib::Request& req, httplib::Response& res) {
            auto cid = correlation_of(req);
            std::uint64_t from = 1;
            if (req.has_param("from")) {
                auto text = req.get_param_value("from");
                auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), from);
                if (ec != std::errc{} || ptr != text.data() + text.size()) {
                    return bad_request(res, cid, "from must be a non-negative integer");
                }
            }
            auto out = runtime.read_audit(bearer_token(req), from, cid).get();
            if (failed(res, out)) return;
            json events = json::array();
            for (const auto& e : out.events) events.push_back(store::to_json(e));
            send_json(res, 200, events, cid);
        });
    }
};

Gateway::Gateway(agents::Runtime& runtime, std::size_t worker_threads)
    : impl_(std::make_unique<Impl>(runtime, worker_threads)) {}

Gateway::~Gateway() { stop(); }

int Gateway::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
    } else {
        port_ = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw error("cannot bind " + host + ":" + std::to_string(port));
    listener_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void Gateway::stop() {
    impl_->server.stop();
    if (listener_.joinable()) listener_.join();
}

Service::Service(ServiceConfig config, Clock clock) : config_(std::move(config)) {
    store::StoreOptions so;
    so.dir = config_.data_dir;
    so.scheme.iterations = config_.pbkdf2_iterations;
    so.fsync = config_.store_fsync;
    so.clock = clock;
    store_ = std::make_unique<store::HealthStore>(std::move(so));
    auto ro = agents::RuntimeOptions::from(config_);
    ro.clock = std::move(clock);
    runtime_ = std::make_unique<agents::Runtime>(*store_, std::move(ro));
    gateway_ = std::make_unique<Gateway>(*runtime_);
}

Service::~Service() { stop(); }

int Service::start() {
    runtime_->start();
    return gateway_->start(config_.host(), config_.port());
}

void Service::stop() {
    gateway_->stop();
    runtime_->stop();
}

std::string Service::address() const { return config_.host() + ":" + std::to_string(port()); }

} // namespace ehrgate::gateway
