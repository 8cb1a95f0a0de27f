#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pleiades/dataset.hpp"

namespace pleiades {

struct ScoreTransform {
    double center = 0;
    double scale = 1;
};

double tscore(double raw, const ScoreTransform& t);
// Sample mean and n - 1 SD of the column.
ScoreTransform sample_transform(std::span<const double> raw);
std::vector<double> tscores(std::span<const double> raw, const ScoreTransform& t);

struct OrdinalQuantization {
    std::vector<std::size_t> counts;
    std::vector<double> probabilities;
    std::vector<double> thresholds;  // cumulative, last one is +inf
    std::vector<double> values;
    std::vector<bool> empty;  // category had zero count; its value is the boundary t_i
};

OrdinalQuantization ordinal_quantize(std::span<const std::size_t> counts);

// Category label (the numeric code as it appears in the data) to real value.
struct CategoryMap {
    std::vector<double> categories;  // ascending codes
    std::vector<std::size_t> counts;
    std::vector<double> values;
    bool coincident = false;  // CatPCA: all centroids equal, every value is 0

    double value_of(double category) const;
    std::vector<double> apply(std::span<const double> codes) const;
};

// Ordinal quantization of a code column; categories are the distinct codes present.
CategoryMap quantize_ordinal_column(std::span<const double> codes);

struct PcaDecomposition {
    Eigen::MatrixXd components;  // columns, unit length
    Eigen::VectorXd eigenvalues;  // descending, clamped at 0
    double kaiser_threshold = 0;  // mean eigenvalue

    // Indices of components with eigenvalue above the Kaiser threshold.
    std::vector<Eigen::Index> informative() const;
};

PcaDecomposition pca(const Eigen::MatrixXd& data);
PcaDecomposition pca_from_covariance(const Eigen::MatrixXd& covariance);

// Nominal quantification against already numeric columns. Values are the
// projections of category centroids (in the informative PC space) on the
// first count-weighted principal direction of those centroids; the result has
// weighted mean zero. Coincident centroids give all-zero values and set
// `coincident`.
CategoryMap catpca_quantize(const Eigen::MatrixXd& retained, std::span<const double> nominal);

struct DummyCoding {
    std::vector<double> categories;
    Eigen::MatrixXd columns;  // rows x categories, one-hot
};

DummyCoding dummy_code(std::span<const double> nominal);

enum class NominalMode { CatPca, Dummy };
NominalMode parse_nominal_mode(std::string_view token);

struct ColumnProvenance {
    Attribute source;
    std::string method;  // "ordinal", "catpca", "dummy", "published"
    CategoryMap mapping;  // empty for published and dummy columns
    double dummy_category = 0;  // category code a dummy column indicates
};

// Numeric design matrix with named columns.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> names;
    std::vector<ColumnProvenance> provenance;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
    std::size_t index_of(std::string_view name) const;
    std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const;
};

// Raw data: ordinal attributes by ordinal_quantize, nominal ones by CatPCA or
// dummy coding (gender stays a single CatPCA column in both modes).
// Quantified data: published values are used as is; in dummy mode country and
// ethnicity are one-hot coded by their distinct published values.
// Published category sizes, used to name the dummy columns of quantified
// country values (the release does not carry the raw codes).
struct CategoryCount {
    std::string label;
    std::size_t count = 0;
};
std::vector<CategoryCount> load_category_counts(const std::string& path);

FeatureMatrix quantify_dataset(const Dataset& data, NominalMode nominal = NominalMode::CatPca,
                               const std::vector<CategoryCount>* country_counts = nullptr);

// Plain numeric matrix from a CSV with a header. The id column and any drug
// usage columns are skipped.
FeatureMatrix load_feature_matrix(const std::string& path);
void write_feature_matrix(std::ostream& out, const FeatureMatrix& m, const Dataset* usage_source = nullptr);

// Label used for a dummy column or category: the raw-code label when known.
std::string category_label(Attribute a, double code, DataMode mode);

}  // namespace pleiades
