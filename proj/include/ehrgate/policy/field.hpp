/**
 * @file field.hpp
 * @brief Closed catalog of health-record fields and field sets over it
 */

#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ehrgate::policy {

/**
 * @brief The three groups a health record is split into.
 */
enum class FieldGroup : std::uint8_t {
    environment,     ///< where and when the data was collected
    patient_info,    ///< stable facts about the patient
    current_medical, ///< latest vital signs and history
};

/**
 * @brief Every field a health record may carry.
 *
 * The numeric value is the catalog index and is relied upon by FieldSet.
 */
enum class FieldId : std::uint8_t {
    location,
    collected_at,
    age,
    status,
    blood_group,
    height,
    weight,
    bgm,
    heart_rate,
    blood_pressure,
    sugar_level,
    operation_history,
};

inline constexpr std::size_t field_count = 12;

inline constexpr std::array<FieldId, field_count> all_fields = {
    FieldId::location,   FieldId::collected_at,   FieldId::age,
    FieldId::status,     FieldId::blood_group,    FieldId::height,
    FieldId::weight,     FieldId::bgm,            FieldId::heart_rate,
    FieldId::blood_pressure, FieldId::sugar_level, FieldId::operation_history,
};

constexpr std::size_t index_of(FieldId f) noexcept { return static_cast<std::size_t>(f); }

FieldGroup group_of(FieldId f) noexcept;
std::string_view to_string(FieldId f) noexcept;
std::string_view to_string(FieldGroup g) noexcept;

std::optional<FieldId> parse_field(std::string_view name) noexcept;
std::optional<FieldGroup> parse_field_group(std::string_view name) noexcept;

/// Resolves @p name within @p group; throws validation_error if the name is
/// unknown or belongs to another group.
FieldId make_field(FieldGroup group, std::string_view name);

/**
 * @brief Either "all fields" or an explicit duplicate-free set of fields.
 *
 * Wildcard compares equal to an explicit set holding the whole catalog; the
 * distinction survives only for serialization.
 */
class FieldSet {
public:
    FieldSet() = default;
    FieldSet(std::initializer_list<FieldId> fields);

    static FieldSet wildcard() noexcept;
    static FieldSet none() noexcept { return {}; }
    static FieldSet from_bits(std::bitset<field_count> bits) noexcept;

    bool is_wildcard() const noexcept { return wildcard_; }
    bool empty() const noexcept { return !wildcard_ && bits_.none(); }
    bool contains(FieldId f) const noexcept { return wildcard_ || bits_.test(index_of(f)); }
    std::size_t size() const noexcept { return wildcard_ ? field_count : bits_.count(); }

    /// Full membership bitmap, wildcard expanded.
    std::bitset<field_count> bits() const noexcept;
    /// Members in catalog order, wildcard expanded.
    std::vector<FieldId> fields() const;

    void insert(FieldId f);

    /// Set semantics; wildcard on both sides stays wildcard.
    friend FieldSet intersect(const FieldSet& a, const FieldSet& b) noexcept;
    friend FieldSet unite(const FieldSet& a, const FieldSet& b) noexcept;

    bool is_subset_of(const FieldSet& other) const noexcept;

    friend bool operator==(const FieldSet& a, const FieldSet& b) noexcept {
        return a.bits() == b.bits();
    }

    /// `*` for wildcard, otherwise names in catalog order joined by `|`.
    std::string to_string() const;
    /// Inverse of to_string(); throws parse_error on unknown or repeated names.
    static FieldSet parse(std::string_view text, char separator = '|');

private:
    bool wildcard_ = false;
    std::bitset<field_count> bits_;
};

} // namespace ehrgate::policy
