#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "pleiades/quantify.hpp"

namespace pleiades::testing {

namespace {

int pick(std::mt19937_64& rng, std::initializer_list<double> weights) {
    std::discrete_distribution<int> d(weights);
    return d(rng) + 1;
}

int clamp_round(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::lround(v)), lo, hi); }

}  // namespace

Dataset synthetic_raw(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    // Per-drug baseline and loading on the latent trait (schema order).
    static constexpr double base[kDrugCount] = {3.5, -0.8, -0.9, -0.6, 4.0, 0.6, 4.0, -0.4, -2.0, -0.6,
                                                -1.9, -1.2, -0.6, -0.9, -1.6, -0.7, 1.2, -1.8};
    static constexpr double load[kDrugCount] = {0.2, 1.1, 0.7, 0.9, 0.1, 1.2, 0.05, 1.1, 0.9, 1.2,
                                                1.0, 0.9, 1.1, 1.1, 0.9, 1.1, 0.8, 0.7};
    std::vector<ParticipantRecord> recs;
    recs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double trait = z(rng);
        ParticipantRecord r;
        r.id = std::to_string(i + 1);
        auto set = [&](Attribute a, double v) { r.attributes[static_cast<std::size_t>(a)] = v; };
        const int age = clamp_round(2.4 - 0.6 * trait + 1.2 * z(rng), 1, 6);
        const int gender = pick(rng, {0.5, 0.5});
        set(Attribute::Age, age);
        set(Attribute::Gender, gender);
        set(Attribute::Education, clamp_round(6.0 - 0.5 * trait + 1.6 * z(rng), 1, 9));
        set(Attribute::Country, pick(rng, {0.55, 0.05, 0.30, 0.06, 0.03, 0.01, 0.003}));
        set(Attribute::Ethnicity, pick(rng, {0.01, 0.91, 0.03, 0.01, 0.01, 0.02, 0.003}));
        set(Attribute::Nscore, clamp_round(24 + 9 * (0.3 * trait + 0.95 * z(rng)), 0, 48));
        set(Attribute::Escore, clamp_round(27 + 7 * z(rng), 0, 48));
        set(Attribute::Oscore, clamp_round(33 + 6.5 * (0.45 * trait + 0.9 * z(rng)), 0, 48));
        set(Attribute::Ascore, clamp_round(31 + 6.5 * (-0.3 * trait + 0.95 * z(rng)), 0, 48));
        set(Attribute::Cscore, clamp_round(29 + 7 * (-0.4 * trait + 0.9 * z(rng)), 0, 48));
        set(Attribute::Impulsive, clamp_round(5 + 2.2 * (0.6 * trait + 0.8 * z(rng)), 1, 10));
        set(Attribute::SS, clamp_round(6 + 2.8 * (0.7 * trait + 0.7 * z(rng)), 1, 11));
        for (std::size_t d = 0; d < kDrugCount; ++d) {
            const double u = base[d] + load[d] * 1.6 * trait + (gender == 2 ? 0.3 : 0.0) - 0.25 * (age - 2) + z(rng);
            r.usage[d] = static_cast<Usage>(clamp_round(u, 0, 6));
        }
        r.semeron = i % 211 == 5 ? Usage::CL2 : Usage::CL0;
        recs.push_back(std::move(r));
    }
    return Dataset(DataMode::Raw, std::move(recs));
}

Dataset to_quantified(const Dataset& raw) {
    const auto m = quantify_dataset(raw, NominalMode::CatPca);
    std::vector<ParticipantRecord> recs = raw.records();
    for (std::size_t i = 0; i < recs.size(); ++i)
        for (auto a : all_attributes())
            recs[i].attributes[static_cast<std::size_t>(a)] =
                m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.index_of(to_string(a))));
    return Dataset(DataMode::Quantified, std::move(recs));
}

void write_file(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    write_dataset(out, data);
}

}  // namespace pleiades::testing
