#include "internal.hpp"
#include "pleiades/error.hpp"

namespace pleiades {

namespace detail {

Eigen::MatrixXd gather(const Eigen::MatrixXd& x, std::span<const std::size_t> rows,
                       const std::vector<std::size_t>& features) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < features.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                x(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(features[j]));
    return out;
}

Labels gather_labels(const Labels& y, std::span<const std::size_t> rows) {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

void require_both_classes(const Labels& y, std::span<const std::size_t> rows, const char* who) {
    bool u = false, n = false;
    for (auto r : rows) (y[r] ? u : n) = true;
    if (!u || !n) throw DomainError(std::string(who) + ": both classes must be present in the training rows");
}

}  // namespace detail

std::unique_ptr<TrainedModel> fit(const ClassifierConfig& config, const TrainingView& data) {
    config.validate(static_cast<std::size_t>(data.x.cols()));
    if (data.y.size() != static_cast<std::size_t>(data.x.rows())) throw DomainError("fit: label count mismatch");
    if (data.rows.empty()) throw DomainError("fit: no training rows");
    switch (config.method()) {
        case Method::Knn: return detail::fit_knn(config, data);
        case Method::Dt: return detail::fit_dt(config, data);
        case Method::Lda: return detail::fit_lda(config, data);
        case Method::Gm: return detail::fit_gm(config, data);
        case Method::Pdfe: return detail::fit_pdfe(config, data);
        case Method::Lr: return detail::fit_lr(config, data);
        case Method::Nb: return detail::fit_nb(config, data);
        case Method::Rf: return detail::fit_rf(config, data);
    }
    throw DomainError("unknown method");
}

}  // namespace pleiades
