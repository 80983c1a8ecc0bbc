/**
 * @file policy_format.cpp
 */

#include "ehrgate/policy/policy_format.hpp"

#include "ehrgate/common/error.hpp"

#include <fstream>
#include <sstream>

namespace ehrgate::policy {

namespace {

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

bool is_skippable(std::string_view line) {
    auto pos = line.find_first_not_of(" \t");
    return pos == std::string_view::npos || line[pos] == '#';
}

} // namespace

PolicyTuple parse_policy_line(std::string_view line, std::size_t line_no) {
    line = trim_cr(line);
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (parts.size() < 3) {
        auto end = line.find_first_of(",\t", start);
        if (end == std::string_view::npos) break;
        parts.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    if (parts.size() != 3) {
        throw parse_error("expected role,mode,file_id,fields", line_no);
    }
    auto rest = line.substr(start);
    if (rest.find_first_of(",\t") != std::string_view::npos) {
        throw parse_error("too many columns", line_no);
    }

    PolicyTuple t;
    auto role = try_parse_role(parts[0]);
    if (!role) throw parse_error("invalid role '" + std::string(parts[0]) + "'", line_no);
    auto mode = try_parse_mode(parts[1]);
    if (!mode) throw parse_error("invalid access mode '" + std::string(parts[1]) + "'", line_no);
    if (parts[2].empty()) throw parse_error("empty file_id", line_no);
    if (parts[2].find_first_of("|# ") != std::string_view::npos) {
        throw parse_error("file_id contains a reserved character", line_no);
    }
    t.role = *role;
    t.mode = *mode;
    t.file_id = std::string(parts[2]);
    try {
        t.fields = FieldSet::parse(rest);
    } catch (const parse_error& e) {
        throw parse_error(e.what(), line_no);
    }
    return t;
}

std::string format_policy_line(const PolicyTuple& tuple) {
    std::string out;
    out += to_string(tuple.role);
    out += ',';
    out += to_string(tuple.mode);
    out += ',';
    out += tuple.file_id;
    out += ',';
    out += tuple.fields.to_string();
    return out;
}

std::vector<PolicyTuple> parse_policy_tuples(std::string_view text) {
    std::vector<PolicyTuple> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? end : end - start);
        ++line_no;
        if (!is_skippable(trim_cr(line))) out.push_back(parse_policy_line(line, line_no));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

PolicyTable parse_policy_table(std::string_view text) {
    auto tuples = parse_policy_tuples(text);
    return PolicyTable(tuples);
}

std::string format_policy_table(const PolicyTable& table) {
    std::string out;
    for (const auto& t : table.tuples()) {
        out += format_policy_line(t);
        out += '\n';
    }
    return out;
}

PolicyTable load_policy_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw storage_io("cannot open policy table " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_policy_table(buf.str());
}

void save_policy_table(const PolicyTable& table, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw storage_io("cannot write policy table " + tmp.string());
        out << format_policy_table(table);
        out.flush();
        if (!out) throw storage_io("short write on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw storage_io("cannot replace " + path.string() + ": " + ec.message());
}

} // namespace ehrgate::policy
