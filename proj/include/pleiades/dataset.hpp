#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pleiades {

enum class Usage : std::uint8_t { CL0, CL1, CL2, CL3, CL4, CL5, CL6 };
inline constexpr std::size_t kUsageLevels = 7;

enum class Basis : std::uint8_t { Decade, Year, Month, Week };
inline constexpr std::array<Basis, 4> kAllBases{Basis::Decade, Basis::Year, Basis::Month, Basis::Week};

// Schema order of the 18 real drugs (Semeron is kept apart).
enum class Drug : std::uint8_t {
    Alcohol, Amphet, Amyl, Benzos, Caff, Cannabis, Choc, Coke, Crack, Ecstasy,
    Heroin, Ketamine, Legalh, Lsd, Meth, Mmushrooms, Nicotine, Vsa
};
inline constexpr std::size_t kDrugCount = 18;

enum class Attribute : std::uint8_t {
    Age, Gender, Education, Country, Ethnicity,
    Nscore, Escore, Oscore, Ascore, Cscore, Impulsive, SS
};
inline constexpr std::size_t kAttributeCount = 12;

enum class DataMode : std::uint8_t { Raw, Quantified };

std::string_view to_string(Usage u);
std::string_view to_string(Basis b);
std::string_view to_string(Drug d);
std::string_view to_string(Attribute a);
std::string_view to_string(DataMode m);

std::optional<Usage> parse_usage(std::string_view token);
Basis parse_basis(std::string_view token);
Drug parse_drug(std::string_view token);
std::optional<Drug> find_drug(std::string_view token);
Attribute parse_attribute(std::string_view token);
std::optional<Attribute> find_attribute(std::string_view token);
DataMode parse_mode(std::string_view token);

std::array<Drug, kDrugCount> all_drugs();
std::array<Attribute, kAttributeCount> all_attributes();

// The five personality factor attributes N, E, O, A, C.
inline constexpr std::array<Attribute, 5> kFactors{
    Attribute::Nscore, Attribute::Escore, Attribute::Oscore, Attribute::Ascore, Attribute::Cscore};

bool is_user(Usage u, Basis b);

struct ParticipantRecord {
    std::string id;
    std::array<double, kAttributeCount> attributes{};
    std::array<Usage, kDrugCount> usage{};
    Usage semeron = Usage::CL0;

    double attribute(Attribute a) const { return attributes[static_cast<std::size_t>(a)]; }
    Usage usage_of(Drug d) const { return usage[static_cast<std::size_t>(d)]; }
};

class Dataset {
public:
    Dataset() = default;
    Dataset(DataMode mode, std::vector<ParticipantRecord> records);

    DataMode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const ParticipantRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<ParticipantRecord>& records() const noexcept { return records_; }

    std::vector<double> column(Attribute a) const;

private:
    DataMode mode_ = DataMode::Quantified;
    std::vector<ParticipantRecord> records_;
};

// Binary labels aligned with record order: 1 = user, 0 = non-user.
using Labels = std::vector<std::uint8_t>;

Dataset parse_dataset(std::istream& in, DataMode mode);
Dataset load_dataset(const std::string& path, DataMode mode);
void write_dataset(std::ostream& out, const Dataset& data);

struct ScreenResult {
    Dataset retained;
    std::vector<std::string> excluded;
};
ScreenResult screen_overclaimers(const Dataset& data);

Labels binarize_usage(const Dataset& data, Drug drug, Basis basis);

struct Pleiad {
    std::string name;
    std::vector<Drug> members;  // the core drug last
};

const Pleiad& heroin_pleiad();
const Pleiad& ecstasy_pleiad();
const Pleiad& benzo_pleiad();
const std::array<Pleiad, 3>& all_pleiades();
const Pleiad& find_pleiad(std::string_view name);

Labels pleiad_labels(const Dataset& data, const Pleiad& pleiad, Basis basis);

// Drug token or pleiad name.
Labels target_labels(const Dataset& data, std::string_view target, Basis basis);

std::size_t count_users(std::span<const std::uint8_t> labels);

}  // namespace pleiades
