#include "pleiades/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

ParseError::ParseError(std::size_t row, std::string column, const std::string& what)
    : Error("row " + std::to_string(row) + (column.empty() ? "" : ", column '" + column + "'") + ": " + what),
      row_(row),
      column_(std::move(column)) {}

namespace {

constexpr std::array<std::string_view, kDrugCount> kDrugTokens{
    "alcohol", "amphet",   "amyl",   "benzos", "caff", "cannabis", "choc",       "coke",     "crack",
    "ecstasy", "heroin",   "ketamine", "legalh", "lsd",  "meth",     "mmushrooms", "nicotine", "vsa"};

constexpr std::array<std::string_view, kAttributeCount> kAttributeTokens{
    "age",    "gender", "education", "country", "ethnicity", "nscore",
    "escore", "oscore", "ascore",    "cscore",  "impulsive", "ss"};

constexpr std::string_view kSemeron = "semer";

// Inclusive valid range of raw codes per attribute.
struct CodeRange {
    int lo;
    int hi;
};
constexpr std::array<CodeRange, kAttributeCount> kRawRanges{{
    {1, 6}, {1, 2}, {1, 9}, {1, 7}, {1, 7},
    {0, 48}, {0, 48}, {0, 48}, {0, 48}, {0, 48},
    {1, 10}, {1, 11}}};

// Canonical column order of the headerless public file.
std::vector<std::string> canonical_columns() {
    std::vector<std::string> cols{"id"};
    for (auto a : kAttributeTokens) cols.emplace_back(a);
    for (std::size_t d = 0; d < kDrugCount; ++d) {
        if (kDrugTokens[d] == "vsa") cols.emplace_back(kSemeron);
        cols.emplace_back(kDrugTokens[d]);
    }
    return cols;
}

std::string canonical_name(std::string name) {
    name = csv::lower(name);
    static const std::unordered_map<std::string, std::string> aliases{
        {"mushrooms", "mmushrooms"}, {"semeron", "semer"}, {"impulsiveness", "impulsive"},
        {"sensation_seeking", "ss"}, {"n", "nscore"}, {"e", "escore"}, {"o", "oscore"},
        {"a", "ascore"}, {"c", "cscore"}, {"imp", "impulsive"}};
    if (auto it = aliases.find(name); it != aliases.end()) return it->second;
    return name;
}

bool looks_like_header(const std::vector<std::string>& fields) {
    if (fields.empty()) return false;
    if (csv::lower(fields[0]) == "id") return true;
    // A data row has numeric attributes in positions 1..12.
    std::size_t numeric = 0;
    for (std::size_t i = 1; i < fields.size() && i <= kAttributeCount; ++i)
        if (csv::to_double(fields[i])) ++numeric;
    return numeric == 0;
}

}  // namespace

std::string_view to_string(Usage u) {
    static constexpr std::array<std::string_view, kUsageLevels> names{"CL0", "CL1", "CL2", "CL3",
                                                                      "CL4", "CL5", "CL6"};
    return names[static_cast<std::size_t>(u)];
}

std::string_view to_string(Basis b) {
    static constexpr std::array<std::string_view, 4> names{"decade", "year", "month", "week"};
    return names[static_cast<std::size_t>(b)];
}

std::string_view to_string(Drug d) { return kDrugTokens[static_cast<std::size_t>(d)]; }
std::string_view to_string(Attribute a) { return kAttributeTokens[static_cast<std::size_t>(a)]; }
std::string_view to_string(DataMode m) { return m == DataMode::Raw ? "raw" : "quantified"; }

std::optional<Usage> parse_usage(std::string_view token) {
    if (token.size() == 3 && (token[0] == 'C' || token[0] == 'c') && (token[1] == 'L' || token[1] == 'l') &&
        token[2] >= '0' && token[2] <= '6')
        return static_cast<Usage>(token[2] - '0');
    return std::nullopt;
}

Basis parse_basis(std::string_view token) {
    auto t = csv::lower(token);
    for (auto b : kAllBases)
        if (to_string(b) == t) return b;
    throw DomainError("unknown separation basis '" + std::string(token) + "'");
}

std::optional<Drug> find_drug(std::string_view token) {
    auto t = canonical_name(std::string(token));
    for (std::size_t d = 0; d < kDrugCount; ++d)
        if (kDrugTokens[d] == t) return static_cast<Drug>(d);
    return std::nullopt;
}

Drug parse_drug(std::string_view token) {
    if (auto d = find_drug(token)) return *d;
    throw DomainError("unknown drug id '" + std::string(token) + "'");
}

std::optional<Attribute> find_attribute(std::string_view token) {
    auto t = canonical_name(std::string(token));
    for (std::size_t a = 0; a < kAttributeCount; ++a)
        if (kAttributeTokens[a] == t) return static_cast<Attribute>(a);
    return std::nullopt;
}

Attribute parse_attribute(std::string_view token) {
    if (auto a = find_attribute(token)) return *a;
    throw DomainError("unknown attribute '" + std::string(token) + "'");
}

DataMode parse_mode(std::string_view token) {
    auto t = csv::lower(token);
    if (t == "raw") return DataMode::Raw;
    if (t == "quantified" || t == "prequantified") return DataMode::Quantified;
    throw DomainError("unknown data mode '" + std::string(token) + "'");
}

std::array<Drug, kDrugCount> all_drugs() {
    std::array<Drug, kDrugCount> out{};
    for (std::size_t d = 0; d < kDrugCount; ++d) out[d] = static_cast<Drug>(d);
    return out;
}

std::array<Attribute, kAttributeCount> all_attributes() {
    std::array<Attribute, kAttributeCount> out{};
    for (std::size_t a = 0; a < kAttributeCount; ++a) out[a] = static_cast<Attribute>(a);
    return out;
}

bool is_user(Usage u, Basis b) {
    // Decade: CL2..CL6, Year: CL3.., Month: CL4.., Week: CL5..
    return static_cast<int>(u) >= 2 + static_cast<int>(b);
}

Dataset::Dataset(DataMode mode, std::vector<ParticipantRecord> records)
    : mode_(mode), records_(std::move(records)) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < records_.size(); ++i)
        if (!seen.insert(records_[i].id).second)
            throw ParseError(i + 1, "id", "duplicate id '" + records_[i].id + "'");
}

std::vector<double> Dataset::column(Attribute a) const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.attribute(a));
    return out;
}

Dataset parse_dataset(std::istream& in, DataMode mode) {
    std::string line;
    std::vector<std::string> columns;
    std::vector<ParticipantRecord> records;
    std::size_t row = 0;

    // slot[i] says where column i goes: -1 id, 0..11 attribute, 100+d drug, 200 semeron, -2 ignored
    std::vector<int> slot;
    auto build_slots = [&](const std::vector<std::string>& names) {
        slot.assign(names.size(), -2);
        std::array<bool, kAttributeCount> have_attr{};
        std::array<bool, kDrugCount> have_drug{};
        bool have_id = false, have_semer = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto n = canonical_name(names[i]);
            if (n == "id") {
                slot[i] = -1;
                have_id = true;
            } else if (n == kSemeron) {
                slot[i] = 200;
                have_semer = true;
            } else if (auto a = find_attribute(n)) {
                slot[i] = static_cast<int>(*a);
                have_attr[static_cast<std::size_t>(*a)] = true;
            } else if (auto d = find_drug(n)) {
                slot[i] = 100 + static_cast<int>(*d);
                have_drug[static_cast<std::size_t>(*d)] = true;
            }
        }
        if (!have_id) throw ParseError(0, "id", "missing id column");
        if (!have_semer) throw ParseError(0, std::string(kSemeron), "missing Semeron column");
        for (std::size_t a = 0; a < kAttributeCount; ++a)
            if (!have_attr[a]) throw ParseError(0, std::string(kAttributeTokens[a]), "missing attribute column");
        for (std::size_t d = 0; d < kDrugCount; ++d)
            if (!have_drug[d]) throw ParseError(0, std::string(kDrugTokens[d]), "missing usage column");
    };

    bool first = true;
    while (csv::next_record(in, line)) {
        auto fields = csv::split(line);
        if (first) {
            first = false;
            if (looks_like_header(fields)) {
                columns = fields;
                build_slots(columns);
                continue;
            }
            columns = canonical_columns();
            build_slots(columns);
        }
        ++row;
        if (fields.size() != columns.size())
            throw ParseError(row, "", "expected " + std::to_string(columns.size()) + " columns, found " +
                                          std::to_string(fields.size()));
        ParticipantRecord rec;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            int s = slot[i];
            const auto& f = fields[i];
            if (s == -1) {
                if (f.empty()) throw ParseError(row, columns[i], "empty id");
                rec.id = f;
            } else if (s >= 0 && s < static_cast<int>(kAttributeCount)) {
                auto v = csv::to_double(f);
                if (!v || !std::isfinite(*v)) throw ParseError(row, columns[i], "not a number: '" + f + "'");
                if (mode == DataMode::Raw) {
                    auto code = csv::to_integer(f);
                    const auto& r = kRawRanges[static_cast<std::size_t>(s)];
                    if (!code || *code < r.lo || *code > r.hi)
                        throw ParseError(row, columns[i],
                                         "raw code '" + f + "' outside " + std::to_string(r.lo) + ".." +
                                             std::to_string(r.hi));
                }
                rec.attributes[static_cast<std::size_t>(s)] = *v;
            } else if (s >= 100) {
                auto u = parse_usage(f);
                if (!u) throw ParseError(row, columns[i], "unknown usage code '" + f + "'");
                if (s == 200)
                    rec.semeron = *u;
                else
                    rec.usage[static_cast<std::size_t>(s - 100)] = *u;
            }
        }
        records.push_back(std::move(rec));
    }
    return Dataset(mode, std::move(records));
}

Dataset load_dataset(const std::string& path, DataMode mode) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset '" + path + "'");
    return parse_dataset(in, mode);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    auto cols = canonical_columns();
    out << csv::join(cols, ",") << '\n';
    for (const auto& r : data.records()) {
        out << r.id;
        for (double v : r.attributes) out << ',' << csv::format_double(v);
        for (std::size_t d = 0; d < kDrugCount; ++d) {
            if (kDrugTokens[d] == "vsa") out << ',' << to_string(r.semeron);
            out << ',' << to_string(r.usage[d]);
        }
        out << '\n';
    }
}

ScreenResult screen_overclaimers(const Dataset& data) {
    ScreenResult res;
    std::vector<ParticipantRecord> kept;
    kept.reserve(data.size());
    for (const auto& r : data.records()) {
        if (r.semeron == Usage::CL0)
            kept.push_back(r);
        else
            res.excluded.push_back(r.id);
    }
    res.retained = Dataset(data.mode(), std::move(kept));
    return res;
}

Labels binarize_usage(const Dataset& data, Drug drug, Basis basis) {
    if (static_cast<std::size_t>(drug) >= kDrugCount) throw DomainError("unknown drug id");
    Labels out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = is_user(data[i].usage_of(drug), basis) ? 1 : 0;
    return out;
}

const Pleiad& heroin_pleiad() {
    static const Pleiad p{"heroinPl", {Drug::Crack, Drug::Coke, Drug::Meth, Drug::Heroin}};
    return p;
}

const Pleiad& ecstasy_pleiad() {
    static const Pleiad p{"ecstasyPl",
                          {Drug::Amphet, Drug::Cannabis, Drug::Coke, Drug::Ketamine, Drug::Lsd, Drug::Mmushrooms,
                           Drug::Legalh, Drug::Ecstasy}};
    return p;
}

const Pleiad& benzo_pleiad() {
    static const Pleiad p{"benzoPl", {Drug::Meth, Drug::Amphet, Drug::Coke, Drug::Benzos}};
    return p;
}

const std::array<Pleiad, 3>& all_pleiades() {
    static const std::array<Pleiad, 3> all{heroin_pleiad(), ecstasy_pleiad(), benzo_pleiad()};
    return all;
}

const Pleiad& find_pleiad(std::string_view name) {
    auto n = csv::lower(name);
    for (const auto& p : all_pleiades())
        if (csv::lower(p.name) == n) return p;
    throw DomainError("unknown pleiad '" + std::string(name) + "'");
}

Labels pleiad_labels(const Dataset& data, const Pleiad& pleiad, Basis basis) {
    Labels out(data.size(), 0);
    for (auto d : pleiad.members) {
        auto l = binarize_usage(data, d, basis);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] |= l[i];
    }
    return out;
}

Labels target_labels(const Dataset& data, std::string_view target, Basis basis) {
    if (auto d = find_drug(target)) return binarize_usage(data, *d, basis);
    return pleiad_labels(data, find_pleiad(target), basis);
}

std::size_t count_users(std::span<const std::uint8_t> labels) {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

}  // namespace pleiades
