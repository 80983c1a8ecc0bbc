/**
 * @file policy_table.cpp
 */

#include "ehrgate/policy/policy_table.hpp"

namespace ehrgate::policy {

PolicyTable::PolicyTable(std::span<const PolicyTuple> tuples) {
    for (const auto& t : tuples) insert(t);
}

void PolicyTable::insert(const PolicyTuple& tuple) {
    auto [it, inserted] = entries_.try_emplace(Key{tuple.role, tuple.mode, tuple.file_id}, tuple.fields);
    if (inserted) {
        ++per_role_[static_cast<std::size_t>(tuple.role)];
    } else {
        it->second = unite(it->second, tuple.fields);
    }
}

const FieldSet* PolicyTable::find(Role role, AccessMode mode, const std::string& file_id) const {
    auto it = entries_.find(Key{role, mode, file_id});
    return it == entries_.end() ? nullptr : &it->second;
}

bool PolicyTable::has_role(Role role) const noexcept {
    return per_role_[static_cast<std::size_t>(role)] != 0;
}

std::vector<PolicyTuple> PolicyTable::tuples() const {
    std::vector<PolicyTuple> out;
    out.reserve(entries_.size());
    for (const auto& [key, fields] : entries_) {
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), fields});
    }
    return out;
}

} // namespace ehrgate::policy
