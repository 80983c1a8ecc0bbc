/**
 * @file policy_format.hpp
 * @brief Line format for policy tables
 *
 * One tuple per line, `role,mode,file_id,field1|field2|...` with `*` for
 * the wildcard. Tabs may replace the commas. Lines starting with `#` and
 * blank lines are ignored.
 */

#pragma once

#include "ehrgate/policy/policy_table.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ehrgate::policy {

/// Parses a single non-comment line. @p line_no is only used in errors.
PolicyTuple parse_policy_line(std::string_view line, std::size_t line_no = 0);

std::string format_policy_line(const PolicyTuple& tuple);

/// Raw tuples in file order, duplicates preserved.
std::vector<PolicyTuple> parse_policy_tuples(std::string_view text);
PolicyTable parse_policy_table(std::string_view text);
std::string format_policy_table(const PolicyTable& table);

/// Throws storage_io when unreadable and parse_error on malformed lines.
PolicyTable load_policy_table(const std::filesystem::path& path);
void save_policy_table(const PolicyTable& table, const std::filesystem::path& path);

} // namespace ehrgate::policy
