#include <fstream>
#include <limits>

#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace {

constexpr const char* kFormat = "pleiades-model";
constexpr int kVersion = 1;

Eigen::VectorXd vector_of(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_of(const nlohmann::json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& r = j[i];
        if (r.size() != static_cast<std::size_t>(cols)) throw ParseError("model bundle: ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = r[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

GaussianClass class_of(const nlohmann::json& j, Eigen::Index dim) {
    return detail::gaussian_class_from(vector_of(j.at("mean")), matrix_of(j.at("covariance"), dim), j.at("prior").get<double>());
}

double threshold_of(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ParseError("model bundle: bad threshold '" + s + "'");
    }
    return j.get<double>();
}

std::unique_ptr<TrainedModel> rebuild(const ClassifierConfig& c, const nlohmann::json& f) {
    const auto dim = static_cast<Eigen::Index>(c.features.size());
    switch (c.method()) {
        case Method::Knn:
            return std::make_unique<KnnModel>(c, matrix_of(f.at("points"), dim), f.at("labels").get<Labels>());
        case Method::Dt: return std::make_unique<TreeModel>(c, detail::tree_from_json(f.at("nodes")));
        case Method::Lda:
            return std::make_unique<LdaModel>(c, vector_of(f.at("direction")), threshold_of(f.at("threshold")),
                                              f.at("user_above").get<bool>());
        case Method::Gm: return std::make_unique<GmModel>(c, class_of(f.at("user"), dim), class_of(f.at("nonuser"), dim));
        case Method::Pdfe:
            return std::make_unique<PdfeModel>(c, matrix_of(f.at("points"), dim), f.at("labels").get<Labels>(),
                                               f.at("radii").get<std::vector<double>>());
        case Method::Lr: {
            LrFit fit;
            fit.beta = vector_of(f.at("beta"));
            if (fit.beta.size() != dim + 1) throw ParseError("model bundle: coefficient count mismatch");
            fit.iterations = f.value("iterations", 0);
            fit.gradient_norm = f.value("gradient_norm", 0.0);
            fit.converged = f.value("converged", false);
            fit.capped = f.value("capped", false);
            return std::make_unique<LrModel>(c, std::move(fit));
        }
        case Method::Nb: {
            NbStats s;
            s.class_count[0] = f.at("class_count")[0].get<double>();
            s.class_count[1] = f.at("class_count")[1].get<double>();
            for (const auto& e : f.at("features")) {
                NbFeature nf;
                nf.categorical = e.at("categorical").get<bool>();
                nf.levels = e.at("levels").get<std::vector<double>>();
                nf.counts[0] = e.at("counts_nonuser").get<std::vector<double>>();
                nf.counts[1] = e.at("counts_user").get<std::vector<double>>();
                for (int k = 0; k < 2; ++k) {
                    nf.mean[k] = e.at("mean")[static_cast<std::size_t>(k)].get<double>();
                    nf.var[k] = e.at("var")[static_cast<std::size_t>(k)].get<double>();
                }
                s.features.push_back(std::move(nf));
            }
            if (s.features.size() != c.features.size()) throw ParseError("model bundle: feature count mismatch");
            return std::make_unique<NbModel>(c, std::move(s));
        }
        case Method::Rf: {
            std::vector<std::vector<TreeNode>> trees;
            for (const auto& t : f.at("trees")) trees.push_back(detail::tree_from_json(t));
            if (trees.empty()) throw ParseError("model bundle: forest has no trees");
            return std::make_unique<RfModel>(c, std::move(trees));
        }
    }
    throw DomainError("unknown method");
}

}  // namespace

nlohmann::ordered_json model_to_json(const TrainedModel& m) {
    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["method"] = to_string(m.method());
    j["features"] = m.feature_names();
    j["feature_indices"] = m.config().features;
    j["user_weight"] = m.config().user_weight;
    j["params"] = params_to_json(m.config().params);
    j["fitted"] = m.fitted_json();
    return j;
}

std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string()) != kFormat) throw ParseError("not a model bundle");
        if (j.value("version", 0) != kVersion) throw ParseError("unsupported model bundle version");
        const Method m = parse_method(j.at("method").get<std::string>());
        ClassifierConfig c;
        c.features = j.at("feature_indices").get<std::vector<std::size_t>>();
        c.user_weight = j.at("user_weight").get<double>();
        c.params = params_from_json(m, j.at("params"));
        auto model = rebuild(c, j.at("fitted"));
        model->set_feature_names(j.value("features", std::vector<std::string>{}));
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model bundle: ") + e.what());
    }
}

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model bundle '" + path + "'");
    out << model_to_json(m).dump(1) << '\n';
}

std::unique_ptr<TrainedModel> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read model bundle '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model bundle: ") + e.what());
    }
    return model_from_json(j);
}

}  // namespace pleiades
