#include <cmath>
#include <numeric>

#include "pleiades/classifiers.hpp"
#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::string_view, N>& names, const char* what) {
    auto t = csv::lower(s);
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == t) return static_cast<E>(i);
    throw DomainError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 8> kMethodNames{"knn", "dt", "lda", "gm", "pdfe", "lr", "nb", "rf"};
constexpr std::array<std::string_view, 4> kKernelNames{"uniform", "triangular", "epanechnikov", "gaussian"};
constexpr std::array<std::string_view, 3> kDistanceNames{"euclidean", "fisher", "adaptive"};
constexpr std::array<std::string_view, 3> kCriterionNames{"info", "gini", "dkm"};

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(Kernel k) { return kKernelNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Distance d) { return kDistanceNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(SplitCriterion c) { return kCriterionNames[static_cast<std::size_t>(c)]; }
Method parse_method(std::string_view s) { return parse_enum<Method>(s, kMethodNames, "method"); }
Kernel parse_kernel(std::string_view s) { return parse_enum<Kernel>(s, kKernelNames, "kernel"); }
Distance parse_distance(std::string_view s) { return parse_enum<Distance>(s, kDistanceNames, "distance"); }
SplitCriterion parse_criterion(std::string_view s) { return parse_enum<SplitCriterion>(s, kCriterionNames, "criterion"); }

double kernel_profile(Kernel k, double u) {
    switch (k) {
        case Kernel::Uniform: return u <= 1.0 ? 1.0 : 0.0;
        case Kernel::Triangular: return u < 1.0 ? 1.0 - u : 0.0;
        case Kernel::Epanechnikov: return u < 1.0 ? 1.0 - u * u : 0.0;
        case Kernel::Gaussian: return std::exp(-0.5 * u * u);
    }
    return 0.0;
}

void ClassifierConfig::validate(std::size_t feature_count) const {
    if (features.empty()) throw DomainError("classifier config: empty feature subset");
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] >= feature_count) throw DomainError("classifier config: feature index out of range");
        if (i > 0 && features[i] <= features[i - 1])
            throw DomainError("classifier config: features must be ascending and distinct");
    }
    if (!(user_weight >= 0.01 - 1e-12 && user_weight <= 5.0 + 1e-12))
        throw DomainError("classifier config: user weight outside [0.01, 5]");
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                if (p.k < 1) throw DomainError("knn: k must be positive");
                if (p.distance != Distance::Euclidean && p.k_transform < p.k)
                    throw DomainError("knn: transform neighbourhood smaller than k");
            } else if constexpr (std::is_same_v<T, DtParams>) {
                if (p.min_leaf < 1) throw DomainError("dt: min_leaf must be positive");
            } else if constexpr (std::is_same_v<T, PdfeParams>) {
                if (p.k_density < 1) throw DomainError("pdfe: k_density must be positive");
            } else if constexpr (std::is_same_v<T, NbParams>) {
                if (p.max_categorical_levels < 1) throw DomainError("nb: max_categorical_levels must be positive");
            } else if constexpr (std::is_same_v<T, RfParams>) {
                if (p.trees < 1) throw DomainError("rf: need at least one tree");
                if (p.tree.min_leaf < 1) throw DomainError("rf: min_leaf must be positive");
            }
        },
        params);
}

nlohmann::ordered_json params_to_json(const MethodParams& params) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                j["k"] = p.k;
                j["distance"] = to_string(p.distance);
                j["k_transform"] = p.distance == Distance::Euclidean ? p.k : p.k_transform;
                j["vote_kernel"] = to_string(p.vote_kernel);
                j["transform_kernel"] = to_string(p.transform_kernel);
            } else if constexpr (std::is_same_v<T, DtParams>) {
                j["criterion"] = to_string(p.criterion);
                j["fisher"] = p.fisher_combination;
                j["min_leaf"] = p.min_leaf;
            } else if constexpr (std::is_same_v<T, LdaParams>) {
                j["criterion"] = to_string(p.criterion);
            } else if constexpr (std::is_same_v<T, PdfeParams>) {
                j["k_density"] = p.k_density;
                j["kernel"] = to_string(p.kernel);
            } else if constexpr (std::is_same_v<T, LrParams>) {
                j["balanced"] = p.balanced;
            } else if constexpr (std::is_same_v<T, NbParams>) {
                j["max_categorical_levels"] = p.max_categorical_levels;
            } else if constexpr (std::is_same_v<T, RfParams>) {
                j["trees"] = p.trees;
                j["criterion"] = to_string(p.tree.criterion);
                j["fisher"] = p.tree.fisher_combination;
                j["min_leaf"] = p.tree.min_leaf;
                j["mtry"] = p.mtry;
                j["bootstrap"] = p.bootstrap;
                j["seed"] = p.seed;
            }
        },
        params);
    return j;
}

std::string describe_params(const MethodParams& params) {
    auto j = params_to_json(params);
    std::string out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!out.empty()) out += ';';
        out += it.key() + '=';
        if (it->is_string())
            out += it->get<std::string>();
        else if (it->is_boolean())
            out += fmt_bool(it->get<bool>());
        else
            out += it->dump();
    }
    return out;
}

MethodParams params_from_json(Method m, const nlohmann::json& j) {
    auto str = [&](const char* key, const char* dflt) { return j.contains(key) ? j.at(key).get<std::string>() : std::string(dflt); };
    switch (m) {
        case Method::Knn: {
            KnnParams p;
            p.k = j.value("k", p.k);
            p.distance = parse_distance(str("distance", "euclidean"));
            p.k_transform = j.value("k_transform", p.k);
            p.vote_kernel = parse_kernel(str("vote_kernel", "uniform"));
            p.transform_kernel = parse_kernel(str("transform_kernel", "uniform"));
            return p;
        }
        case Method::Dt: {
            DtParams p;
            p.criterion = parse_criterion(str("criterion", "info"));
            p.fisher_combination = j.value("fisher", false);
            p.min_leaf = j.value("min_leaf", p.min_leaf);
            return p;
        }
        case Method::Lda: return LdaParams{parse_criterion(str("criterion", "info"))};
        case Method::Gm: return GmParams{};
        case Method::Pdfe: {
            PdfeParams p;
            p.k_density = j.value("k_density", p.k_density);
            p.kernel = parse_kernel(str("kernel", "gaussian"));
            return p;
        }
        case Method::Lr: return LrParams{j.value("balanced", false)};
        case Method::Nb: return NbParams{j.value("max_categorical_levels", 20)};
        case Method::Rf: {
            RfParams p;
            p.trees = j.value("trees", p.trees);
            p.tree.criterion = parse_criterion(str("criterion", "gini"));
            p.tree.fisher_combination = j.value("fisher", false);
            p.tree.min_leaf = j.value("min_leaf", p.tree.min_leaf);
            p.mtry = j.value("mtry", 0);
            p.bootstrap = j.value("bootstrap", true);
            p.seed = j.value("seed", std::uint64_t{1});
            return p;
        }
    }
    throw DomainError("unknown method");
}

Eigen::VectorXd TrainedModel::select(std::span<const double> row) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(config_.features.size()));
    for (std::size_t k = 0; k < config_.features.size(); ++k) {
        if (config_.features[k] >= row.size()) throw DomainError("feature row is too short for the model");
        v(static_cast<Eigen::Index>(k)) = row[config_.features[k]];
    }
    return v;
}

double base_function(SplitCriterion c, double m0, double m1) {
    const double m = m0 + m1;
    if (m <= 0) return 0.0;
    const double p0 = m0 / m, p1 = m1 / m;
    switch (c) {
        case SplitCriterion::InfoGain: {
            double h = 0;
            if (p0 > 0) h -= p0 * std::log2(p0);
            if (p1 > 0) h -= p1 * std::log2(p1);
            return h;
        }
        case SplitCriterion::GiniGain: return 1.0 - p0 * p0 - p1 * p1;
        case SplitCriterion::DkmGain: return 2.0 * std::sqrt(p0 * p1);
    }
    return 0.0;
}

double split_gain(const Contingency& t, SplitCriterion c) {
    const double c0 = t.n[0][0] + t.n[0][1];
    const double c1 = t.n[1][0] + t.n[1][1];
    const double total = c0 + c1;
    if (!(total > 0)) throw DomainError("split_gain: empty node");
    double g = base_function(c, c0, c1);
    for (int j = 0; j < 2; ++j) {
        const double b = t.n[0][j] + t.n[1][j];
        if (b > 0) g -= (b / total) * base_function(c, t.n[0][j], t.n[1][j]);
    }
    return g;
}

std::unique_ptr<TrainedModel> fit(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return fit(config, TrainingView{x, y, rows});
}

}  // namespace pleiades
