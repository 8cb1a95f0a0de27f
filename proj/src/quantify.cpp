#include "pleiades/quantify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/linalg.hpp"
#include "pleiades/stats.hpp"

namespace pleiades {

double tscore(double raw, const ScoreTransform& t) {
    if (!(t.scale > 0)) throw DomainError("tscore: scale must be positive");
    return 10.0 * (raw - t.center) / t.scale + 50.0;
}

ScoreTransform sample_transform(std::span<const double> raw) { return {mean(raw), stddev(raw)}; }

std::vector<double> tscores(std::span<const double> raw, const ScoreTransform& t) {
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back(tscore(v, t));
    return out;
}

OrdinalQuantization ordinal_quantize(std::span<const std::size_t> counts) {
    std::size_t total = 0, nonempty = 0;
    for (auto c : counts) {
        total += c;
        nonempty += c > 0;
    }
    if (total == 0) throw DomainError("ordinal_quantize: zero total count");
    if (nonempty < 2) throw DomainError("ordinal_quantize: fewer than two nonempty categories");

    OrdinalQuantization q;
    q.counts.assign(counts.begin(), counts.end());
    const double n = static_cast<double>(total);
    std::size_t below = 0;
    for (auto c : counts) {
        q.probabilities.push_back(static_cast<double>(c) / n);
        // Cumulative sums are formed from integer counts so that scaling all
        // counts leaves every probability argument bit-identical.
        const double lower = static_cast<double>(below) / n;
        below += c;
        const double upper = static_cast<double>(below) / n;
        q.thresholds.push_back(below == total ? std::numeric_limits<double>::infinity() : normal_quantile(upper));
        if (c == 0) {
            q.values.push_back(normal_quantile(lower));
            q.empty.push_back(true);
        } else {
            q.values.push_back(normal_quantile((2.0 * static_cast<double>(below - c) + static_cast<double>(c)) / (2.0 * n)));
            q.empty.push_back(false);
        }
    }
    return q;
}

double CategoryMap::value_of(double category) const {
    auto it = std::lower_bound(categories.begin(), categories.end(), category);
    if (it == categories.end() || *it != category)
        throw DomainError("category " + csv::format_double(category) + " not in mapping");
    return values[static_cast<std::size_t>(it - categories.begin())];
}

std::vector<double> CategoryMap::apply(std::span<const double> codes) const {
    std::vector<double> out;
    out.reserve(codes.size());
    for (double c : codes) out.push_back(value_of(c));
    return out;
}

namespace {

std::map<double, std::size_t> tally(std::span<const double> codes) {
    std::map<double, std::size_t> t;
    for (double c : codes) ++t[c];
    return t;
}

}  // namespace

CategoryMap quantize_ordinal_column(std::span<const double> codes) {
    auto t = tally(codes);
    CategoryMap m;
    for (auto& [code, n] : t) {
        m.categories.push_back(code);
        m.counts.push_back(n);
    }
    m.values = ordinal_quantize(m.counts).values;
    return m;
}

std::vector<Eigen::Index> PcaDecomposition::informative() const {
    std::vector<Eigen::Index> out;
    const double cut = kaiser_threshold * (1.0 + 1e-9);
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
        if (eigenvalues(j) > cut) out.push_back(j);
    return out;
}

PcaDecomposition pca_from_covariance(const Eigen::MatrixXd& covariance) {
    if (covariance.rows() < 1) throw DomainError("pca: no columns");
    auto eig = symmetric_eigen(covariance);
    PcaDecomposition p;
    p.components = eig.vectors;
    p.eigenvalues = eig.values.cwiseMax(0.0);
    p.kaiser_threshold = covariance.trace() / static_cast<double>(covariance.rows());
    return p;
}

PcaDecomposition pca(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw DomainError("pca: need at least two rows");
    if (data.cols() < 1) throw DomainError("pca: need at least one column");
    return pca_from_covariance(sample_covariance(data));
}

CategoryMap catpca_quantize(const Eigen::MatrixXd& retained, std::span<const double> nominal) {
    if (static_cast<std::size_t>(retained.rows()) != nominal.size())
        throw DomainError("catpca_quantize: row count mismatch");
    auto t = tally(nominal);
    if (t.size() < 2) throw DomainError("catpca_quantize: fewer than two categories");

    auto p = pca(retained);
    auto pcs = p.informative();
    if (pcs.empty()) pcs.push_back(0);
    Eigen::MatrixXd basis(retained.cols(), static_cast<Eigen::Index>(pcs.size()));
    for (std::size_t k = 0; k < pcs.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = p.components.col(pcs[k]);

    const Eigen::RowVectorXd mu = retained.colwise().mean();
    Eigen::MatrixXd scores = (retained.rowwise() - mu) * basis;

    CategoryMap m;
    std::map<double, Eigen::Index> slot;
    for (auto& [code, n] : t) {
        slot[code] = static_cast<Eigen::Index>(m.categories.size());
        m.categories.push_back(code);
        m.counts.push_back(n);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(m.categories.size());
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, basis.cols());
    for (std::size_t i = 0; i < nominal.size(); ++i)
        centroids.row(slot[nominal[i]]) += scores.row(static_cast<Eigen::Index>(i));
    Eigen::VectorXd w(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        w(c) = static_cast<double>(m.counts[static_cast<std::size_t>(c)]);
        centroids.row(c) /= w(c);
    }

    // Weighted centroid cloud; its first PC is the quantification axis.
    const double total = w.sum();
    const Eigen::RowVectorXd center = (w.transpose() * centroids) / total;
    Eigen::MatrixXd dev = centroids.rowwise() - center;
    Eigen::MatrixXd cov = dev.transpose() * w.asDiagonal() * dev / total;
    auto eig = symmetric_eigen(cov);
    if (!(eig.values(0) > 1e-14 * std::max(1.0, p.eigenvalues.sum()))) {
        m.values.assign(m.categories.size(), 0.0);
        m.coincident = true;
        return m;
    }

    Eigen::VectorXd axis = eig.vectors.col(0);
    Eigen::VectorXd proj = dev * axis;
    m.values.assign(proj.data(), proj.data() + proj.size());
    return m;
}

DummyCoding dummy_code(std::span<const double> nominal) {
    auto t = tally(nominal);
    DummyCoding d;
    std::map<double, Eigen::Index> slot;
    for (auto& [code, n] : t) {
        slot[code] = static_cast<Eigen::Index>(d.categories.size());
        d.categories.push_back(code);
    }
    d.columns = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nominal.size()),
                                      static_cast<Eigen::Index>(d.categories.size()));
    for (std::size_t i = 0; i < nominal.size(); ++i) d.columns(static_cast<Eigen::Index>(i), slot[nominal[i]]) = 1.0;
    return d;
}

NominalMode parse_nominal_mode(std::string_view token) {
    auto t = csv::lower(token);
    if (t == "catpca") return NominalMode::CatPca;
    if (t == "dummy") return NominalMode::Dummy;
    throw DomainError("unknown nominal mode '" + std::string(token) + "'");
}

std::size_t FeatureMatrix::index_of(std::string_view name) const {
    auto n = csv::lower(name);
    for (std::size_t j = 0; j < names.size(); ++j)
        if (csv::lower(names[j]) == n) return j;
    // Attribute aliases (e.g. "n" for nscore) resolve to the canonical token.
    if (auto a = find_attribute(name)) {
        for (std::size_t j = 0; j < names.size(); ++j)
            if (names[j] == to_string(*a)) return j;
    }
    throw DomainError("feature '" + std::string(name) + "' not in matrix");
}

std::vector<std::size_t> FeatureMatrix::indices_of(const std::vector<std::string>& wanted) const {
    std::vector<std::size_t> out;
    for (const auto& w : wanted) out.push_back(index_of(w));
    return out;
}

namespace {

const std::map<std::pair<int, int>, std::string>& raw_labels() {
    static const std::map<std::pair<int, int>, std::string> labels{
        {{3, 1}, "UK"},      {{3, 2}, "Canada"},       {{3, 3}, "USA"},          {{3, 4}, "Other"},
        {{3, 5}, "Australia"}, {{3, 6}, "Ireland"},    {{3, 7}, "New Zealand"},  {{4, 1}, "Mixed-White/Asian"},
        {{4, 2}, "White"},   {{4, 3}, "Other"},        {{4, 4}, "Mixed-White/Black"}, {{4, 5}, "Asian"},
        {{4, 6}, "Black"},   {{4, 7}, "Mixed-Black/Asian"}, {{1, 1}, "female"}, {{1, 2}, "male"}};
    return labels;
}

std::string slug(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

}  // namespace

std::string category_label(Attribute a, double code, DataMode mode) {
    if (mode == DataMode::Raw) {
        auto it = raw_labels().find({static_cast<int>(a), static_cast<int>(code)});
        if (it != raw_labels().end()) return it->second;
    }
    return csv::format_double(code);
}

std::vector<CategoryCount> load_category_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read category counts '" + path + "'");
    std::vector<CategoryCount> out;
    std::string line;
    bool header = true;
    std::size_t row = 0;
    while (csv::next_record(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        ++row;
        auto f = csv::split(line);
        auto c = f.size() == 2 ? csv::to_integer(f[1]) : std::nullopt;
        if (!c || *c < 0) throw ParseError(row, "", "expected label,count");
        out.push_back({f[0], static_cast<std::size_t>(*c)});
    }
    return out;
}

FeatureMatrix quantify_dataset(const Dataset& data, NominalMode nominal, const std::vector<CategoryCount>* country_counts) {
    const auto n = static_cast<Eigen::Index>(data.size());
    if (n < 2) throw DomainError("quantify_dataset: need at least two records");

    static constexpr std::array<Attribute, 9> ordinal{Attribute::Age,    Attribute::Education, Attribute::Nscore,
                                                      Attribute::Escore, Attribute::Oscore,    Attribute::Ascore,
                                                      Attribute::Cscore, Attribute::Impulsive, Attribute::SS};
    std::array<std::vector<double>, kAttributeCount> cols;
    for (auto a : all_attributes()) cols[static_cast<std::size_t>(a)] = data.column(a);

    std::array<ColumnProvenance, kAttributeCount> prov;
    std::array<std::vector<double>, kAttributeCount> quant;
    for (auto a : all_attributes()) {
        auto i = static_cast<std::size_t>(a);
        prov[i].source = a;
        if (data.mode() == DataMode::Quantified) {
            prov[i].method = "published";
            quant[i] = cols[i];
        }
    }

    if (data.mode() == DataMode::Raw) {
        Eigen::MatrixXd retained(n, static_cast<Eigen::Index>(ordinal.size()));
        for (std::size_t k = 0; k < ordinal.size(); ++k) {
            auto i = static_cast<std::size_t>(ordinal[k]);
            prov[i].mapping = quantize_ordinal_column(cols[i]);
            prov[i].method = "ordinal";
            quant[i] = prov[i].mapping.apply(cols[i]);
            for (Eigen::Index r = 0; r < n; ++r) retained(r, static_cast<Eigen::Index>(k)) = quant[i][static_cast<std::size_t>(r)];
        }
        for (auto a : {Attribute::Gender, Attribute::Country, Attribute::Ethnicity}) {
            auto i = static_cast<std::size_t>(a);
            prov[i].mapping = catpca_quantize(retained, cols[i]);
            prov[i].method = "catpca";
            quant[i] = prov[i].mapping.apply(cols[i]);
        }
    }

    FeatureMatrix m;
    std::vector<std::vector<double>> out_cols;
    for (auto a : all_attributes()) {
        auto i = static_cast<std::size_t>(a);
        bool expand = nominal == NominalMode::Dummy && (a == Attribute::Country || a == Attribute::Ethnicity);
        if (!expand) {
            m.names.emplace_back(to_string(a));
            m.provenance.push_back(prov[i]);
            out_cols.push_back(quant[i]);
            continue;
        }
        auto d = dummy_code(cols[i]);
        for (std::size_t c = 0; c < d.categories.size(); ++c) {
            std::string label = category_label(a, d.categories[c], data.mode());
            if (data.mode() == DataMode::Quantified && a == Attribute::Country && country_counts) {
                const auto size = static_cast<std::size_t>(std::count(cols[i].begin(), cols[i].end(), d.categories[c]));
                const CategoryCount* match = nullptr;
                std::size_t matches = 0;
                for (const auto& cc : *country_counts)
                    if (cc.count == size) {
                        match = &cc;
                        ++matches;
                    }
                if (matches == 1) label = match->label;
            }
            m.names.push_back(std::string(to_string(a)) + "_" + slug(label));
            ColumnProvenance p;
            p.source = a;
            p.method = "dummy";
            p.dummy_category = d.categories[c];
            m.provenance.push_back(p);
            auto col = d.columns.col(static_cast<Eigen::Index>(c));
            out_cols.emplace_back(col.data(), col.data() + col.size());
        }
    }
    m.values.resize(n, static_cast<Eigen::Index>(out_cols.size()));
    for (std::size_t j = 0; j < out_cols.size(); ++j)
        for (Eigen::Index r = 0; r < n; ++r) m.values(r, static_cast<Eigen::Index>(j)) = out_cols[j][static_cast<std::size_t>(r)];
    return m;
}

FeatureMatrix load_feature_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix '" + path + "'");
    std::string line;
    if (!csv::next_record(in, line)) throw ParseError(0, "", "empty matrix file");
    auto header = csv::split(line);
    std::vector<std::size_t> keep;
    FeatureMatrix m;
    for (std::size_t j = 0; j < header.size(); ++j) {
        auto h = csv::lower(header[j]);
        if (h == "id" || find_drug(h) || h == "semer" || h == "semeron") continue;
        keep.push_back(j);
        m.names.push_back(header[j]);
        ColumnProvenance p;
        p.source = find_attribute(h).value_or(Attribute::Age);
        p.method = "published";
        m.provenance.push_back(p);
    }
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (csv::next_record(in, line)) {
        ++row;
        auto f = csv::split(line);
        if (f.size() != header.size())
            throw ParseError(row, "", "expected " + std::to_string(header.size()) + " columns");
        std::vector<double> r;
        for (auto j : keep) {
            auto v = csv::to_double(f[j]);
            if (!v) throw ParseError(row, header[j], "not a number: '" + f[j] + "'");
            r.push_back(*v);
        }
        rows.push_back(std::move(r));
    }
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_feature_matrix(std::ostream& out, const FeatureMatrix& m, const Dataset* usage_source) {
    out << "id";
    for (const auto& n : m.names) out << ',' << n;
    if (usage_source) {
        for (auto d : all_drugs()) {
            if (d == Drug::Vsa) out << ",semer";
            out << ',' << to_string(d);
        }
    }
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << (usage_source ? (*usage_source)[i].id : std::to_string(i + 1));
        for (std::size_t j = 0; j < m.cols(); ++j)
            out << ',' << csv::format_double(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        if (usage_source) {
            const auto& r = (*usage_source)[i];
            for (auto d : all_drugs()) {
                if (d == Drug::Vsa) out << ',' << to_string(r.semeron);
                out << ',' << to_string(r.usage_of(d));
            }
        }
        out << '\n';
    }
}

}  // namespace pleiades
