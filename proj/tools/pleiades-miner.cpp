#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pleiades/classifiers.hpp"
#include "pleiades/correlation.hpp"
#include "pleiades/csv.hpp"
#include "pleiades/dataset.hpp"
#include "pleiades/error.hpp"
#include "pleiades/eval.hpp"
#include "pleiades/feature_rank.hpp"
#include "pleiades/parallel.hpp"
#include "pleiades/profiles.hpp"
#include "pleiades/quantify.hpp"
#include "pleiades/report.hpp"

namespace fs = std::filesystem;
using namespace pleiades;

namespace {

struct Globals {
    int jobs = 1;
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string log_level = "info";
    std::string data_dir;
};

struct DataArgs {
    std::string input;
    std::string mode = "quantified";
    std::string nominal = "catpca";
    bool screen = false;
};

void add_data_options(CLI::App* app, DataArgs& a) {
    app->add_option("--input", a.input, "Survey CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--mode", a.mode, "raw or quantified")->check(CLI::IsMember({"raw", "quantified"}));
    app->add_option("--nominal", a.nominal, "catpca or dummy coding of nominal attributes")
        ->check(CLI::IsMember({"catpca", "dummy"}));
    app->add_flag("--screen", a.screen, "Drop respondents who claim Semeron use");
}

Dataset load(const DataArgs& a) {
    auto data = load_dataset(a.input, parse_mode(a.mode));
    spdlog::info("loaded {} records from {}", data.size(), a.input);
    if (a.screen) {
        auto s = screen_overclaimers(data);
        spdlog::info("screened out {} over-claimers", s.excluded.size());
        data = std::move(s.retained);
    }
    return data;
}

FeatureMatrix features_of(const Dataset& data, const DataArgs& a, const Globals& g) {
    std::vector<CategoryCount> counts;
    const auto path = g.data_dir + "/reference/country_counts.csv";
    if (data.mode() == DataMode::Quantified && fs::exists(path)) counts = load_category_counts(path);
    auto m = quantify_dataset(data, parse_nominal_mode(a.nominal), counts.empty() ? nullptr : &counts);
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m.provenance[j].mapping.coincident)
            spdlog::warn("{}: category centroids coincide, all categories quantified as 0", m.names[j]);
    return m;
}

std::ofstream open_out(const std::string& path) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// ---- subcommands --------------------------------------------------------------------

struct IngestArgs {
    DataArgs data;
    std::string out;
    std::string counts;
};

int run_ingest(const IngestArgs& a) {
    auto data = load(a.data);
    if (!a.out.empty()) {
        auto out = open_out(a.out);
        write_dataset(out, data);
    }
    std::ostringstream table;
    table << "target,basis,users,percent\n";
    auto row = [&](const std::string& name, Basis b, const Labels& l) {
        const auto u = count_users(l);
        table << name << ',' << to_string(b) << ',' << u << ',' << format_percent(Rational{u, data.size()}) << '\n';
    };
    for (auto d : all_drugs())
        for (auto b : kAllBases) row(std::string(to_string(d)), b, binarize_usage(data, d, b));
    for (const auto& p : all_pleiades())
        for (auto b : kAllBases) row(p.name, b, pleiad_labels(data, p, b));
    if (!a.counts.empty()) {
        auto out = open_out(a.counts);
        out << table.str();
    } else if (a.out.empty()) {
        std::cout << table.str();
    }
    return 0;
}

struct QuantifyArgs {
    DataArgs data;
    std::string out;
    bool with_usage = false;
};

int run_quantify(const QuantifyArgs& a, const Globals& g) {
    auto data = load(a.data);
    auto m = features_of(data, a.data, g);
    auto out = open_out(a.out);
    write_feature_matrix(out, m, a.with_usage ? &data : nullptr);
    spdlog::info("wrote {} x {} feature matrix to {}", m.rows(), m.cols(), a.out);
    return 0;
}

struct RankArgs {
    DataArgs data;
    std::string method = "pv";
    std::string features;
    std::string out;
};

int run_rank(const RankArgs& a, const Globals& g) {
    auto data = load(a.data);
    auto m = features_of(data, a.data, g);
    std::vector<std::size_t> cols;
    if (a.features.empty()) {
        for (std::size_t j = 0; j < m.cols(); ++j) cols.push_back(j);
    } else {
        cols = m.indices_of(split_list(a.features));
    }
    Eigen::MatrixXd x(m.values.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = m.values.col(static_cast<Eigen::Index>(cols[j]));
    const auto r = rank_features(x, parse_rank_method(a.method));
    auto name = [&](std::size_t k) { return m.names[cols[k]]; };
    auto names = [&](const std::vector<std::size_t>& v) {
        std::vector<std::string> out;
        for (auto k : v) out.push_back(name(k));
        return out;
    };
    nlohmann::ordered_json j;
    j["method"] = to_string(r.method);
    j["order"] = names(r.order);
    if (!r.fve.empty()) {
        j["fve"] = r.fve;
        j["cfve"] = r.cfve;
        j["zero_variance"] = names(r.zero_variance);
    }
    if (r.method == RankMethod::DoubleKaiser) {
        nlohmann::ordered_json imp = nlohmann::ordered_json::array();
        for (double v : r.importance) imp.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
        j["importance"] = imp;
    }
    if (!r.removed.empty() || r.method != RankMethod::PrincipalVariables) j["removed"] = names(r.removed);
    if (r.method == RankMethod::SparsePca) {
        j["retained"] = names(r.retained);
        nlohmann::ordered_json steps = nlohmann::ordered_json::array();
        for (const auto& s : r.steps) {
            nlohmann::ordered_json e;
            e["features"] = names(s.features);
            nlohmann::ordered_json comps = nlohmann::ordered_json::array();
            for (const auto& c : s.components)
                comps.push_back({{"variance", c.variance},
                                 {"loadings", std::vector<double>(c.loadings.data(), c.loadings.data() + c.loadings.size())}});
            e["components"] = comps;
            e["removed"] = names(s.removed);
            steps.push_back(e);
        }
        j["steps"] = steps;
    }
    const auto text = j.dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        auto out = open_out(a.out);
        out << text;
    }
    return 0;
}

struct SearchArgs {
    DataArgs data;
    std::string target;
    std::string basis = "decade";
    std::string space;
    std::string out;
    std::string save_model;
    std::size_t budget = 0;
};

int run_search(const SearchArgs& a, const Globals& g) {
    auto data = load(a.data);
    auto m = features_of(data, a.data, g);
    const auto labels = target_labels(data, a.target, parse_basis(a.basis));
    auto space = load_search_space(a.space);
    if (g.seed_given) apply_forest_seed(space, g.seed);
    SearchOptions so;
    so.jobs = g.jobs;
    so.budget = a.budget;
    std::size_t last = 0;
    so.progress = [&](std::size_t done, std::size_t total) {
        if (done == total || done - last >= std::max<std::size_t>(1, total / 20)) {
            last = done;
            spdlog::info("evaluated {}/{} configurations", done, total);
        }
    };
    const auto outcome = search(space, m, labels, so);
    for (std::size_t i = 0; i < outcome.failed.size(); ++i)
        spdlog::warn("config {} skipped: {}", outcome.failed[i], outcome.failures[i]);
    auto out = open_out(a.out);
    write_leaderboard(out, leaderboard(outcome), m);
    const auto& sel = outcome.selection;
    if (!sel.best) {
        spdlog::warn("no admissible classifier among {} evaluated configurations", outcome.evaluated);
        return 0;
    }
    const auto& b = *sel.best;
    spdlog::info("best: config {} {} [{}] {} weight {}: sens {} spec {}{}", b.config_id, to_string(b.config.method()),
                 feature_list(b.config, m), describe_params(b.config.params), csv::format_double(b.config.user_weight),
                 format_percent(b.sensitivity()), format_percent(b.specificity()), sel.tie ? " (tie)" : "");
    if (!a.save_model.empty()) {
        auto model = fit(b.config, m.values, labels);
        std::vector<std::string> names;
        for (auto f : b.config.features) names.push_back(m.names[f]);
        model->set_feature_names(names);
        save_model(*model, a.save_model);
        spdlog::info("saved model bundle to {}", a.save_model);
    }
    return 0;
}

struct PredictArgs {
    DataArgs data;
    std::string model;
    std::string out;
};

int run_predict(const PredictArgs& a, const Globals& g) {
    auto data = load(a.data);
    auto m = features_of(data, a.data, g);
    auto model = load_model(a.model);
    const auto& want = model->feature_names();
    const auto& idx = model->config().features;
    for (std::size_t j = 0; j < idx.size(); ++j)
        if (idx[j] >= m.cols() || (!want.empty() && csv::lower(m.names[idx[j]]) != csv::lower(want[j])))
            throw DomainError("the input's feature layout does not match the model");
    auto out = open_out(a.out);
    out << "id,risk,user\n";
    std::vector<double> row(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] = m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double r = model->risk(row);
        out << data[i].id << ',' << csv::format_double(r) << ',' << (model->classify(row) ? 1 : 0) << '\n';
    }
    return 0;
}

struct CorrelateArgs {
    DataArgs data;
    std::string basis = "decade";
    std::string out;
    std::string edges;
    std::optional<double> threshold;
    std::string bands;
    double alpha = 0.001;
    double q = 0.01;
    bool permutation = false;
};

int run_correlate(const CorrelateArgs& a, const Globals& g) {
    auto data = load(a.data);
    const auto basis = parse_basis(a.basis);
    CorrelationOptions o;
    o.alpha = a.alpha;
    o.q = a.q;
    o.permutation = a.permutation;
    o.jobs = g.jobs;
    const auto rep = correlate(data, basis, o);
    BandTable bands = default_bands(basis);
    if (!a.bands.empty()) bands = parse_bands(a.bands, bands.display_threshold);
    if (a.threshold) bands.display_threshold = *a.threshold;
    auto out = open_out(a.out);
    out << to_json(rep, bands).dump(2) << '\n';
    spdlog::info("{} pairs: {} Bonferroni-significant at {}, {} BH-significant at q={}", rep.pairs, rep.bonferroni_count,
                 a.alpha, rep.bh_count, a.q);
    if (!a.edges.empty()) {
        auto e = open_out(a.edges);
        write_edges(e, pleiade_graph(rep.pcc, bands), rep.names);
    }
    return 0;
}

struct ProfileArgs {
    DataArgs data;
    std::string basis = "decade";
    std::string out;
    std::string arrows;
    std::string groups;
    std::string descriptives;
    std::string test = "welch";
    double alpha = 0.01;
};

int run_profile(const ProfileArgs& a, const Globals& g) {
    auto data = load(a.data);
    const auto basis = parse_basis(a.basis);
    const auto test = parse_ttest(a.test);
    std::vector<std::string> skipped;
    auto profiles = profile_drugs(data, basis, test, g.jobs, &skipped);
    const auto drug_count = profiles.size();
    for (const auto& p : all_pleiades()) {
        const auto labels = pleiad_labels(data, p, basis);
        const auto users = count_users(labels);
        if (users < 2 || labels.size() - users < 2) {
            skipped.push_back(p.name);
            continue;
        }
        auto gp = group_mean_tscores(data, labels, test);
        gp.target = p.name;
        gp.basis = basis;
        profiles.push_back(gp);
    }
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& p : profiles) j.push_back(to_json(p, a.alpha));
    {
        auto out = open_out(a.out);
        out << j.dump(2) << '\n';
    }
    for (const auto& name : skipped) spdlog::warn("{}: fewer than two users or non-users on this basis, no profile", name);
    std::vector<GroupProfile> drugs(profiles.begin(), profiles.begin() + static_cast<std::ptrdiff_t>(drug_count));
    if (!a.arrows.empty()) {
        auto out = open_out(a.arrows);
        write_arrows(out, profiles, a.alpha);
    }
    if (!a.groups.empty()) {
        auto out = open_out(a.groups);
        out << "basis,group,code,targets\n";
        std::size_t k = 0;
        for (const auto& grp : moderate_groups(drugs))
            out << to_string(basis) << ',' << ++k << ',' << grp.code << ',' << csv::join(grp.targets, " ") << '\n';
    }
    if (!a.descriptives.empty()) {
        std::optional<FactorNorms> norms;
        const auto path = g.data_dir + "/schema/neo_norms.csv";
        if (data.mode() == DataMode::Raw && fs::exists(path)) norms = load_factor_norms(path);
        auto out = open_out(a.descriptives);
        out << to_json(descriptive_stats(data, norms ? &*norms : nullptr)).dump(2) << '\n';
    }
    return 0;
}

struct RiskmapArgs {
    DataArgs data;
    std::string model;
    std::string x, y, slice;
    std::vector<std::string> fixed;
    std::vector<double> slice_values;
    std::size_t nx = 200, ny = 200;
    std::optional<double> x_lo, x_hi, y_lo, y_hi;
    std::string out_dir;
};

int run_riskmap(const RiskmapArgs& a, const Globals& g) {
    auto data = load(a.data);
    auto m = features_of(data, a.data, g);
    auto model = load_model(a.model);
    RiskGridSpec spec;
    spec.x = {a.x, a.x_lo, a.x_hi, a.nx};
    spec.y = {a.y, a.y_lo, a.y_hi, a.ny};
    if (!a.slice.empty()) spec.slice_feature = a.slice;
    spec.slice_values = a.slice_values;
    for (const auto& f : a.fixed) {
        auto eq = f.find('=');
        auto v = eq == std::string::npos ? std::nullopt : csv::to_double(f.substr(eq + 1));
        if (!v) throw DomainError("--fixed expects name=value, got '" + f + "'");
        spec.fixed.emplace_back(f.substr(0, eq), *v);
    }
    const auto grids = risk_map(*model, m, spec, g.jobs);
    fs::create_directories(a.out_dir);
    for (std::size_t i = 0; i < grids.size(); ++i) {
        const auto name = grids.size() == 1 ? std::string("risk_grid.csv") : "risk_grid_" + std::to_string(i + 1) + ".csv";
        auto out = open_out((fs::path(a.out_dir) / name).string());
        write_risk_grid(out, grids[i]);
    }
    auto out = open_out((fs::path(a.out_dir) / "risk_long.csv").string());
    write_risk_long(out, grids);
    spdlog::info("wrote {} grid(s) to {}", grids.size(), a.out_dir);
    return 0;
}

struct ReproduceArgs {
    DataArgs data;
    std::string raw;
    std::vector<std::string> tables{"T1"};
    std::string out_dir;
    std::string targets;
    std::string test = "welch";
    std::size_t budget = 0;
};

int run_reproduce(const ReproduceArgs& a, const Globals& g) {
    auto data = load(a.data);
    std::optional<Dataset> raw;
    if (!a.raw.empty()) raw = load_dataset(a.raw, DataMode::Raw);
    ReproduceInputs in;
    in.data = &data;
    in.raw = raw ? &*raw : nullptr;
    in.data_dir = g.data_dir;
    in.targets = split_list(a.targets);
    in.test = parse_ttest(a.test);
    in.jobs = g.jobs;
    in.budget = a.budget;
    std::vector<TableId> tables;
    for (const auto& t : a.tables) {
        if (csv::lower(t) == "all") {
            tables = all_tables();
            break;
        }
        tables.push_back(parse_table_id(t));
    }
    bool ok = true;
    for (auto t : tables) {
        const auto r = reproduce(t, in);
        ok = ok && r.pass;
        std::cout << r.summary << '\n';
        if (!a.out_dir.empty()) {
            auto out = open_out((fs::path(a.out_dir) / (std::string(to_string(t)) + ".csv")).string());
            write_report(out, r);
        }
    }
    return ok ? 0 : 1;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("PLEIADES_DATA_DIR")) return env;
#ifdef PLEIADES_DEFAULT_DATA_DIR
    return PLEIADES_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drug-consumption risk mining from personality profiles"};
    app.require_subcommand(1);
    Globals g;
    g.data_dir = default_data_dir();
    app.add_option("--jobs,-j", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    auto* seed = app.add_option("--seed", g.seed, "Random forest seed (spaces that do not fix one)");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    app.add_option("--data-dir", g.data_dir, "Directory with reference/, schema/ and spaces/");

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate a survey file; write it back canonically and count users");
    add_data_options(c_ingest, ingest.data);
    c_ingest->add_option("--out", ingest.out, "Canonical CSV output");
    c_ingest->add_option("--counts", ingest.counts, "User counts per drug, pleiad and basis");

    QuantifyArgs quantify;
    auto* c_quantify = app.add_subcommand("quantify", "Convert attributes to a numeric feature matrix");
    add_data_options(c_quantify, quantify.data);
    c_quantify->add_option("--out", quantify.out, "Feature matrix CSV")->required();
    c_quantify->add_flag("--with-usage", quantify.with_usage, "Append the usage columns");

    RankArgs rank;
    auto* c_rank = app.add_subcommand("rank", "Rank input features");
    add_data_options(c_rank, rank.data);
    c_rank->add_option("--method", rank.method, "pv, dk or spca")->check(CLI::IsMember({"pv", "dk", "spca"}));
    c_rank->add_option("--features", rank.features, "Comma separated subset of columns");
    c_rank->add_option("--out", rank.out, "JSON report (stdout if omitted)");

    SearchArgs srch;
    auto* c_search = app.add_subcommand("search", "Evaluate a configuration space by leave-one-out");
    add_data_options(c_search, srch.data);
    c_search->add_option("--drug,--target", srch.target, "Drug or pleiad")->required();
    c_search->add_option("--basis", srch.basis, "decade, year, month or week");
    c_search->add_option("--space", srch.space, "Search space TOML")->required()->check(CLI::ExistingFile);
    c_search->add_option("--out", srch.out, "Leaderboard CSV")->required();
    c_search->add_option("--budget", srch.budget, "Evaluate only this many configurations in canonical order");
    c_search->add_option("--save-model", srch.save_model, "Fit the winner on all rows and save the bundle");

    PredictArgs pred;
    auto* c_predict = app.add_subcommand("predict", "Apply a saved model bundle");
    add_data_options(c_predict, pred.data);
    c_predict->add_option("--model", pred.model, "Model bundle JSON")->required()->check(CLI::ExistingFile);
    c_predict->add_option("--out", pred.out, "Predictions CSV")->required();

    CorrelateArgs corr;
    auto* c_corr = app.add_subcommand("correlate", "Pairwise drug usage correlations");
    add_data_options(c_corr, corr.data);
    c_corr->add_option("--basis", corr.basis, "decade, year, month or week");
    c_corr->add_option("--out", corr.out, "JSON report")->required();
    c_corr->add_option("--edges", corr.edges, "Edge list CSV");
    c_corr->add_option("--threshold", corr.threshold, "Edge display threshold on |r|");
    c_corr->add_option("--bands", corr.bands, "Band lower bounds, e.g. medium=0.4,strong=0.45,very_strong=0.5");
    c_corr->add_option("--alpha", corr.alpha, "Bonferroni family level");
    c_corr->add_option("--q", corr.q, "Benjamini-Hochberg false discovery rate");
    c_corr->add_flag("--permutation", corr.permutation, "Exact permutation p-values");

    ProfileArgs prof;
    auto* c_prof = app.add_subcommand("profile", "User versus non-user personality profiles");
    add_data_options(c_prof, prof.data);
    c_prof->add_option("--basis", prof.basis, "decade, year, month or week");
    c_prof->add_option("--out", prof.out, "JSON profiles")->required();
    c_prof->add_option("--arrows", prof.arrows, "Significance arrows CSV");
    c_prof->add_option("--groups", prof.groups, "Moderate code groups CSV");
    c_prof->add_option("--descriptives", prof.descriptives, "Factor descriptive statistics JSON");
    c_prof->add_option("--test", prof.test, "welch or pooled")->check(CLI::IsMember({"welch", "pooled"}));
    c_prof->add_option("--alpha", prof.alpha, "Arrow significance level");

    RiskmapArgs rm;
    auto* c_rm = app.add_subcommand("riskmap", "Risk grid of a saved model over two features");
    add_data_options(c_rm, rm.data);
    c_rm->add_option("--model", rm.model, "Model bundle JSON")->required()->check(CLI::ExistingFile);
    c_rm->add_option("--x", rm.x, "Horizontal feature")->required();
    c_rm->add_option("--y", rm.y, "Vertical feature")->required();
    c_rm->add_option("--slice", rm.slice, "One grid per value of this feature");
    c_rm->add_option("--slice-values", rm.slice_values, "Slice values (default: distinct data values)");
    c_rm->add_option("--fixed", rm.fixed, "name=value for every other model feature");
    c_rm->add_option("--nx", rm.nx, "Grid points along x");
    c_rm->add_option("--ny", rm.ny, "Grid points along y");
    c_rm->add_option("--x-min", rm.x_lo);
    c_rm->add_option("--x-max", rm.x_hi);
    c_rm->add_option("--y-min", rm.y_lo);
    c_rm->add_option("--y-max", rm.y_hi);
    c_rm->add_option("--out-dir", rm.out_dir, "Output directory")->required();

    ReproduceArgs rep;
    auto* c_rep = app.add_subcommand("reproduce", "Regenerate published tables and diff them");
    add_data_options(c_rep, rep.data);
    c_rep->add_option("--raw", rep.raw, "Raw-score survey file for the descriptive tables");
    c_rep->add_option("--table", rep.tables, "T1 T2 T3 T5 T6 T12 T12a T13a S1 S2 or all");
    c_rep->add_option("--out-dir", rep.out_dir, "Per-table diff CSVs");
    c_rep->add_option("--targets", rep.targets, "Classifier targets (drug, pleiad/basis or all)");
    c_rep->add_option("--test", rep.test, "welch or pooled")->check(CLI::IsMember({"welch", "pooled"}));
    c_rep->add_option("--budget", rep.budget, "Configuration budget per classifier search");

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("pleiades");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    g.seed_given = seed->count() > 0;

    try {
        if (*c_ingest) return run_ingest(ingest);
        if (*c_quantify) return run_quantify(quantify, g);
        if (*c_rank) return run_rank(rank, g);
        if (*c_search) return run_search(srch, g);
        if (*c_predict) return run_predict(pred, g);
        if (*c_corr) return run_correlate(corr, g);
        if (*c_prof) return run_profile(prof, g);
        if (*c_rm) return run_riskmap(rm, g);
        if (*c_rep) return run_reproduce(rep, g);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}
