/**
 * @file policy_table.hpp
 * @brief Indexed set of policy tuples keyed by (role, mode, file)
 */

#pragma once

#include "ehrgate/policy/types.hpp"

#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace ehrgate::policy {

/**
 * @brief Holds at most one tuple per (role, mode, file_id).
 *
 * Inserting a tuple whose key is already present unites the field sets, so
 * lookups never have to choose between competing grants.
 */
class PolicyTable {
public:
    PolicyTable() = default;
    explicit PolicyTable(std::span<const PolicyTuple> tuples);

    void insert(const PolicyTuple& tuple);

    /// Merged field set for the key, or nullptr when nothing is granted.
    const FieldSet* find(Role role, AccessMode mode, const std::string& file_id) const;

    bool has_role(Role role) const noexcept;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Tuples in key order (role, mode, file_id).
    std::vector<PolicyTuple> tuples() const;

    bool operator==(const PolicyTable&) const = default;

private:
    using Key = std::tuple<Role, AccessMode, std::string>;
    std::map<Key, FieldSet> entries_;
    std::array<std::size_t, all_roles.size()> per_role_{};
};

} // namespace ehrgate::policy
