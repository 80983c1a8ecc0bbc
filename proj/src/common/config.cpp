/**
 * @file config.cpp
 */

#include "ehrgate/common/config.hpp"

#include "ehrgate/common/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ehrgate {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw parse_error("invalid value for " + key + ": '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw parse_error("invalid boolean for " + key + ": '" + value + "'");
}

constexpr std::array<std::string_view, 9> known_keys = {
    "data_dir", "listen_addr", "session_ttl_seconds", "auth_fail_delay_ms",
    "sweep_interval_seconds", "queue_bound", "pbkdf2_iterations", "store_fsync",
    "unsafe_allow_all",
};

} // namespace

double system_now() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw parse_error("expected key=value", line_no);
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw parse_error("empty key", line_no);
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw storage_io("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

void ServiceConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "data_dir") {
            data_dir = value;
        } else if (key == "listen_addr") {
            listen_addr = value;
            (void)port();
        } else if (key == "session_ttl_seconds") {
            session_ttl_seconds = parse_number<double>(key, value);
            if (!(session_ttl_seconds > 0)) throw parse_error("session_ttl_seconds must be positive");
        } else if (key == "auth_fail_delay_ms") {
            auth_fail_delay_ms = parse_number<unsigned>(key, value);
        } else if (key == "sweep_interval_seconds") {
            sweep_interval_seconds = parse_number<double>(key, value);
            if (!(sweep_interval_seconds > 0)) throw parse_error("sweep_interval_seconds must be positive");
        } else if (key == "queue_bound") {
            queue_bound = parse_number<std::size_t>(key, value);
            if (queue_bound == 0) throw parse_error("queue_bound must be positive");
        } else if (key == "pbkdf2_iterations") {
            pbkdf2_iterations = parse_number<unsigned>(key, value);
            if (pbkdf2_iterations == 0) throw parse_error("pbkdf2_iterations must be positive");
        } else if (key == "store_fsync") {
            store_fsync = parse_bool(key, value);
        } else if (key == "unsafe_allow_all") {
            unsafe_allow_all = parse_bool(key, value);
        } else {
            throw parse_error("unknown configuration key '" + key + "'");
        }
    }
}

void ServiceConfig::apply_environment() {
    std::map<std::string, std::string> kv;
    for (auto key : known_keys) {
        std::string var = "EHRGATE_";
        for (char c : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(var.c_str())) kv[std::string(key)] = v;
    }
    apply(kv);
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    ServiceConfig cfg;
    cfg.apply(load_key_values(path));
    return cfg;
}

std::string ServiceConfig::host() const {
    auto colon = listen_addr.rfind(':');
    return colon == std::string::npos ? listen_addr : listen_addr.substr(0, colon);
}

int ServiceConfig::port() const {
    auto colon = listen_addr.rfind(':');
    if (colon == std::string::npos) throw parse_error("listen_addr needs host:port");
    auto p = parse_number<int>("listen_addr", listen_addr.substr(colon + 1));
    if (p < 0 || p > 65535) throw parse_error("listen_addr port out of range");
    return p;
}

} // namespace ehrgate
