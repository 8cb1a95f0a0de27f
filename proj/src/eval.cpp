#include "pleiades/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "classifiers/internal.hpp"
#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/parallel.hpp"

namespace pleiades {

int compare(const Rational& a, const Rational& b) {
    const auto l = static_cast<unsigned __int128>(a.num) * b.den;
    const auto r = static_cast<unsigned __int128>(b.num) * a.den;
    return l < r ? -1 : (l > r ? 1 : 0);
}

Rational operator+(const Rational& a, const Rational& b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
}

std::string format_percent(const Rational& r, int decimals) {
    if (r.den == 0) return "nan";
    unsigned __int128 scale = 100;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    const unsigned __int128 q = static_cast<unsigned __int128>(r.num) * scale;
    unsigned __int128 whole = q / r.den;
    const unsigned __int128 rem = q % r.den;
    const unsigned __int128 twice = rem * 2;
    if (twice > r.den || (twice == r.den && (whole & 1))) ++whole;
    unsigned __int128 unit = 1;
    for (int i = 0; i < decimals; ++i) unit *= 10;
    std::string out = std::to_string(static_cast<std::uint64_t>(whole / unit));
    if (decimals > 0) {
        std::string frac = std::to_string(static_cast<std::uint64_t>(whole % unit));
        out += '.' + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
    }
    return out;
}

Rational EvalResult::sensitivity() const { return {counts.tp, std::max<std::uint64_t>(counts.users(), 1)}; }
Rational EvalResult::specificity() const { return {counts.tn, std::max<std::uint64_t>(counts.nonusers(), 1)}; }
Rational EvalResult::min_rate() const {
    auto a = sensitivity(), b = specificity();
    return compare(a, b) <= 0 ? a : b;
}
Rational EvalResult::sum_rate() const { return sensitivity() + specificity(); }

namespace {

std::vector<double> full_row(const Eigen::MatrixXd& x, std::size_t r) {
    std::vector<double> v(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index c = 0; c < x.cols(); ++c) v[static_cast<std::size_t>(c)] = x(static_cast<Eigen::Index>(r), c);
    return v;
}

Eigen::VectorXd selected_row(const Eigen::MatrixXd& x, std::size_t r, const std::vector<std::size_t>& features) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j)
        v(static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(features[j]));
    return v;
}

std::vector<std::size_t> without(std::span<const std::size_t> rows, std::size_t pos) {
    std::vector<std::size_t> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != pos) out.push_back(rows[i]);
    return out;
}

using FoldRisk = std::function<double(std::size_t pos)>;

FoldRisk naive_folds(const ClassifierConfig& c, const Eigen::MatrixXd& x, const Labels& y,
                     std::span<const std::size_t> rows) {
    return [&c, &x, &y, rows](std::size_t pos) {
        auto train = without(rows, pos);
        auto model = fit(c, TrainingView{x, y, train});
        auto row = full_row(x, rows[pos]);
        return model->risk(row);
    };
}

// Sorted distances from each point to its k+1 nearest other points.
std::vector<std::vector<double>> nearest_lists(const Eigen::MatrixXd& pts, std::size_t keep) {
    const auto n = static_cast<std::size_t>(pts.rows());
    std::vector<std::vector<double>> out(n);
    std::vector<double> d;
    for (std::size_t t = 0; t < n; ++t) {
        d.clear();
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            double acc = 0;
            for (Eigen::Index k = 0; k < pts.cols(); ++k) {
                const double v = pts(static_cast<Eigen::Index>(s), k) - pts(static_cast<Eigen::Index>(t), k);
                acc += v * v;
            }
            d.push_back(std::sqrt(acc));
        }
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
        out[t].assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    return out;
}

struct FastPath {
    FoldRisk risk;
    std::shared_ptr<void> state;
};

FastPath fast_folds(const ClassifierConfig& c, const Eigen::MatrixXd& x, const Labels& y,
                    std::span<const std::size_t> rows) {
    const auto& f = c.features;
    const double w = c.user_weight;
    switch (c.method()) {
        case Method::Knn: {
            auto model = std::shared_ptr<TrainedModel>(fit(c, TrainingView{x, y, rows}));
            auto* knn = static_cast<KnnModel*>(model.get());
            return {[knn, &x, rows, &f](std::size_t pos) {
                        return knn->risk_excluding(selected_row(x, rows[pos], f), static_cast<std::ptrdiff_t>(pos));
                    },
                    model};
        }
        case Method::Dt: {
            auto index = std::make_shared<BinIndex>(BinIndex::build(x, f, rows));
            const auto& p = std::get<DtParams>(c.params);
            return {[index, p, w, &x, &y, rows, &f](std::size_t pos) {
                        std::vector<std::uint32_t> train;
                        train.reserve(rows.size() - 1);
                        for (std::size_t i = 0; i < rows.size(); ++i)
                            if (i != pos) train.push_back(static_cast<std::uint32_t>(rows[i]));
                        auto nodes = grow_tree(p, w, x, y, f, *index, std::move(train));
                        return detail::tree_risk(nodes, selected_row(x, rows[pos], f));
                    },
                    index};
        }
        case Method::Rf: {
            auto index = std::make_shared<BinIndex>(BinIndex::build(x, f, rows));
            const auto& p = std::get<RfParams>(c.params);
            return {[index, p, w, &x, &y, rows, &f](std::size_t pos) {
                        auto train = without(rows, pos);
                        auto trees = grow_forest(p, w, x, y, f, *index, train);
                        const auto xi = selected_row(x, rows[pos], f);
                        double s = 0;
                        for (const auto& t : trees) s += detail::tree_risk(t, xi);
                        return s / static_cast<double>(trees.size());
                    },
                    index};
        }
        case Method::Nb: {
            const auto& p = std::get<NbParams>(c.params);
            auto full = std::make_shared<NbStats>(nb_statistics(p, x, y, rows, f));
            return {[full, p, w, &x, &y, rows, &f](std::size_t pos) {
                        auto s = nb_statistics_without(*full, p, x, y, rows, f, rows[pos]);
                        return nb_risk(s, w, selected_row(x, rows[pos], f));
                    },
                    full};
        }
        case Method::Pdfe: {
            const auto& p = std::get<PdfeParams>(c.params);
            const auto k = static_cast<std::size_t>(p.k_density);
            if (k + 1 > rows.size() - 1) throw DomainError("pdfe: k_density too large for leave-one-out");
            struct State {
                Eigen::MatrixXd pts;
                Labels labels;
                std::vector<std::vector<double>> nn;
            };
            auto st = std::make_shared<State>();
            st->pts = detail::gather(x, rows, f);
            st->labels = detail::gather_labels(y, rows);
            st->nn = nearest_lists(st->pts, k + 1);
            return {[st, p, w, k](std::size_t pos) {
                        const auto n = static_cast<std::size_t>(st->pts.rows());
                        const Eigen::VectorXd xi = st->pts.row(static_cast<Eigen::Index>(pos)).transpose();
                        std::vector<double> radii(n, 0.0);
                        for (std::size_t t = 0; t < n; ++t) {
                            if (t == pos) continue;
                            double acc = 0;
                            for (Eigen::Index c = 0; c < st->pts.cols(); ++c) {
                                const double v = st->pts(static_cast<Eigen::Index>(pos), c) - st->pts(static_cast<Eigen::Index>(t), c);
                                acc += v * v;
                            }
                            const double dti = std::sqrt(acc);
                            const auto& d = st->nn[t];
                            radii[t] = std::max(dti <= d[k - 1] ? d[k] : d[k - 1], 1e-9);
                        }
                        return PdfeModel::risk_with(p, w, st->pts, st->labels, radii, xi, static_cast<std::ptrdiff_t>(pos));
                    },
                    st};
        }
        case Method::Lr: {
            const auto& p = std::get<LrParams>(c.params);
            auto start = std::make_shared<Eigen::VectorXd>(fit_logistic(x, y, rows, f, w, p.balanced).beta);
            return {[start, p, w, &x, &y, rows, &f](std::size_t pos) {
                        auto train = without(rows, pos);
                        auto sol = fit_logistic(x, y, train, f, w, p.balanced, start.get());
                        const auto xi = selected_row(x, rows[pos], f);
                        double eta = sol.beta(0);
                        for (Eigen::Index j = 0; j < xi.size(); ++j) eta += sol.beta(j + 1) * xi(j);
                        return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
                    },
                    start};
        }
        default: return {naive_folds(c, x, y, rows), nullptr};
    }
}

}  // namespace

LoocvPrediction loocv_predict(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y,
                              std::span<const std::size_t> rows, const LoocvOptions& options) {
    config.validate(static_cast<std::size_t>(x.cols()));
    if (y.size() != static_cast<std::size_t>(x.rows())) throw DomainError("loocv: label count mismatch");
    std::size_t count[2] = {0, 0};
    for (auto r : rows) ++count[y[r] ? 1 : 0];
    if (count[0] < 2 || count[1] < 2) throw DomainError("loocv: each class needs at least two rows");

    FastPath path = options.fast ? fast_folds(config, x, y, rows) : FastPath{naive_folds(config, x, y, rows), nullptr};
    LoocvPrediction out;
    out.risk.assign(rows.size(), 0.0);
    out.label.assign(rows.size(), 0);
    parallel_for(rows.size(), options.jobs, [&](std::size_t pos) {
        const double r = path.risk(pos);
        out.risk[pos] = r;
        out.label[pos] = r >= 0.5 ? 1 : 0;
    });
    return out;
}

EvalResult loocv(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y,
                 std::span<const std::size_t> rows, const LoocvOptions& options) {
    auto pred = loocv_predict(config, x, y, rows, options);
    EvalResult r;
    r.config = config;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool truth = y[rows[i]] != 0;
        const bool said = pred.label[i] != 0;
        if (truth)
            ++(said ? r.counts.tp : r.counts.fn);
        else
            ++(said ? r.counts.fp : r.counts.tn);
    }
    return r;
}

EvalResult loocv(const ClassifierConfig& config, const Eigen::MatrixXd& x, const Labels& y, const LoocvOptions& options) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return loocv(config, x, y, rows, options);
}

bool admissible(const EvalResult& r) {
    const Rational half{1, 2};
    return compare(r.sensitivity(), half) >= 0 && compare(r.specificity(), half) >= 0;
}

bool better(const EvalResult& a, const EvalResult& b) {
    if (int c = compare(a.min_rate(), b.min_rate()); c != 0) return c > 0;
    if (int c = compare(a.sum_rate(), b.sum_rate()); c != 0) return c > 0;
    return a.config_id < b.config_id;
}

Selection select_best(const std::vector<EvalResult>& results) {
    Selection s;
    for (const auto& r : results) {
        if (!admissible(r)) continue;
        ++s.admissible;
        if (!s.best || better(r, *s.best)) s.best = r;
    }
    if (s.best) {
        for (const auto& r : results) {
            if (!admissible(r) || r.config_id == s.best->config_id) continue;
            if (compare(r.min_rate(), s.best->min_rate()) == 0 && compare(r.sum_rate(), s.best->sum_rate()) == 0) {
                s.tie = true;
                break;
            }
        }
    }
    return s;
}

SearchOutcome search(const SearchSpace& space, const FeatureMatrix& features, const Labels& y,
                     const SearchOptions& options) {
    ConfigEnumerator configs(space, features);
    if (configs.size() == 0) throw DomainError("search: the search space is empty");
    SearchOutcome out;
    out.space_size = configs.size();
    out.evaluated = options.budget > 0 ? std::min(options.budget, configs.size()) : configs.size();

    std::vector<std::optional<EvalResult>> slots(out.evaluated);
    std::vector<std::string> errors(out.evaluated);
    std::mutex progress_mu;
    std::size_t done = 0;
    parallel_for(out.evaluated, options.jobs, [&](std::size_t id) {
        try {
            auto r = loocv(configs.at(id), features.values, y);
            r.config_id = id;
            slots[id] = std::move(r);
        } catch (const Error& e) {
            errors[id] = e.what();
        }
        if (options.progress) {
            std::lock_guard lock(progress_mu);
            options.progress(++done, out.evaluated);
        }
    });
    for (std::size_t id = 0; id < out.evaluated; ++id) {
        if (slots[id])
            out.results.push_back(std::move(*slots[id]));
        else {
            out.failed.push_back(id);
            out.failures.push_back(errors[id]);
        }
    }
    out.selection = select_best(out.results);
    return out;
}

std::vector<EvalResult> leaderboard(const SearchOutcome& outcome) {
    std::vector<EvalResult> board;
    for (const auto& r : outcome.results)
        if (admissible(r)) board.push_back(r);
    std::sort(board.begin(), board.end(), better);
    return board;
}

std::string feature_list(const ClassifierConfig& c, const FeatureMatrix& features, std::string_view sep) {
    std::string out;
    for (auto f : c.features) {
        if (!out.empty()) out += sep;
        out += features.names.at(f);
    }
    return out;
}

void write_leaderboard(std::ostream& out, const std::vector<EvalResult>& board, const FeatureMatrix& features) {
    out << "rank,config_id,method,features,params,weight,tp,fn,tn,fp,sens,spec,min,sum\n";
    std::size_t rank = 0;
    for (const auto& r : board) {
        out << ++rank << ',' << r.config_id << ',' << to_string(r.config.method()) << ',' << feature_list(r.config, features)
            << ',' << describe_params(r.config.params) << ',' << csv::format_double(r.config.user_weight) << ','
            << r.counts.tp << ',' << r.counts.fn << ',' << r.counts.tn << ',' << r.counts.fp << ','
            << format_percent(r.sensitivity()) << ',' << format_percent(r.specificity()) << ','
            << format_percent(r.min_rate()) << ',' << format_percent(r.sum_rate()) << '\n';
    }
}

}  // namespace pleiades
