/**
 * @file field.cpp
 */

#include "ehrgate/policy/field.hpp"

#include "ehrgate/common/error.hpp"

namespace ehrgate::policy {

namespace {

constexpr std::array<std::string_view, field_count> field_names = {
    "location",  "collected_at", "age",        "status",
    "blood_group", "height",     "weight",     "bgm",
    "heart_rate", "blood_pressure", "sugar_level", "operation_history",
};

} // namespace

FieldGroup group_of(FieldId f) noexcept {
    switch (f) {
        case FieldId::location:
        case FieldId::collected_at:
            return FieldGroup::environment;
        case FieldId::age:
        case FieldId::status:
        case FieldId::blood_group:
        case FieldId::height:
        case FieldId::weight:
        case FieldId::bgm:
            return FieldGroup::patient_info;
        default:
            return FieldGroup::current_medical;
    }
}

std::string_view to_string(FieldId f) noexcept { return field_names[index_of(f)]; }

std::string_view to_string(FieldGroup g) noexcept {
    switch (g) {
        case FieldGroup::environment: return "environment";
        case FieldGroup::patient_info: return "patient_info";
        case FieldGroup::current_medical: return "current_medical";
    }
    return "unknown";
}

std::optional<FieldId> parse_field(std::string_view name) noexcept {
    for (std::size_t i = 0; i < field_count; ++i) {
        if (field_names[i] == name) return all_fields[i];
    }
    return std::nullopt;
}

std::optional<FieldGroup> parse_field_group(std::string_view name) noexcept {
    for (auto g : {FieldGroup::environment, FieldGroup::patient_info, FieldGroup::current_medical}) {
        if (to_string(g) == name) return g;
    }
    return std::nullopt;
}

FieldId make_field(FieldGroup group, std::string_view name) {
    auto f = parse_field(name);
    if (!f) throw validation_error("unknown field '" + std::string(name) + "'");
    if (group_of(*f) != group) {
        throw validation_error("field '" + std::string(name) + "' is not in group " +
                               std::string(to_string(group)));
    }
    return *f;
}

FieldSet::FieldSet(std::initializer_list<FieldId> fields) {
    for (auto f : fields) insert(f);
}

FieldSet FieldSet::wildcard() noexcept {
    FieldSet s;
    s.wildcard_ = true;
    return s;
}

FieldSet FieldSet::from_bits(std::bitset<field_count> bits) noexcept {
    FieldSet s;
    s.bits_ = bits;
    return s;
}

std::bitset<field_count> FieldSet::bits() const noexcept {
    return wildcard_ ? std::bitset<field_count>{}.set() : bits_;
}

std::vector<FieldId> FieldSet::fields() const {
    std::vector<FieldId> out;
    for (auto f : all_fields) {
        if (contains(f)) out.push_back(f);
    }
    return out;
}

void FieldSet::insert(FieldId f) {
    if (!wildcard_) bits_.set(index_of(f));
}

FieldSet intersect(const FieldSet& a, const FieldSet& b) noexcept {
    if (a.wildcard_ && b.wildcard_) return FieldSet::wildcard();
    if (a.wildcard_) return FieldSet::from_bits(b.bits_);
    if (b.wildcard_) return FieldSet::from_bits(a.bits_);
    return FieldSet::from_bits(a.bits_ & b.bits_);
}

FieldSet unite(const FieldSet& a, const FieldSet& b) noexcept {
    if (a.wildcard_ || b.wildcard_) return FieldSet::wildcard();
    return FieldSet::from_bits(a.bits_ | b.bits_);
}

bool FieldSet::is_subset_of(const FieldSet& other) const noexcept {
    return (bits() & ~other.bits()).none();
}

std::string FieldSet::to_string() const {
    if (wildcard_) return "*";
    std::string out;
    for (auto f : fields()) {
        if (!out.empty()) out += '|';
        out += policy::to_string(f);
    }
    return out;
}

FieldSet FieldSet::parse(std::string_view text, char separator) {
    if (text == "*") return wildcard();
    FieldSet out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto end = text.find(separator, start);
        auto name = text.substr(start, end == std::string_view::npos ? end : end - start);
        auto f = parse_field(name);
        if (!f) throw parse_error("unknown field '" + std::string(name) + "'");
        if (out.contains(*f)) throw parse_error("duplicate field '" + std::string(name) + "'");
        out.insert(*f);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

} // namespace ehrgate::policy
