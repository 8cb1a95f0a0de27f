#include "pleiades/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "pleiades/correlation.hpp"
#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/parallel.hpp"

namespace pleiades {

// ---- risk maps ----------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw DomainError("risk map axes need at least two points");
    if (!(hi > lo)) throw DomainError("risk map axis range is empty");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> axis_points(const GridAxis& a, const Eigen::MatrixXd& values, std::size_t col) {
    const auto c = values.col(static_cast<Eigen::Index>(col));
    return linspace(a.lo.value_or(c.minCoeff()), a.hi.value_or(c.maxCoeff()), a.points);
}

}  // namespace

std::vector<RiskGrid> risk_map(const TrainedModel& model, const FeatureMatrix& fm, const RiskGridSpec& spec, int jobs) {
    const auto& used = model.config().features;
    const auto& names = model.feature_names();
    for (std::size_t j = 0; j < used.size(); ++j) {
        if (used[j] >= fm.cols()) throw DomainError("model uses a column beyond the feature matrix");
        if (!names.empty() && csv::lower(names[j]) != csv::lower(fm.names[used[j]]))
            throw DomainError("model feature '" + names[j] + "' does not match matrix column '" + fm.names[used[j]] + "'");
    }
    const std::size_t xc = fm.index_of(spec.x.feature);
    const std::size_t yc = fm.index_of(spec.y.feature);
    if (xc == yc) throw DomainError("risk map axes must differ");
    auto in_model = [&](std::size_t c) { return std::find(used.begin(), used.end(), c) != used.end(); };
    if (!in_model(xc)) throw DomainError("grid feature '" + spec.x.feature + "' is not used by the model");
    if (!in_model(yc)) throw DomainError("grid feature '" + spec.y.feature + "' is not used by the model");

    std::vector<double> base(fm.cols(), 0.0);
    std::set<std::size_t> covered{xc, yc};
    std::vector<std::pair<std::string, double>> fixed;
    for (const auto& [name, value] : spec.fixed) {
        const auto c = fm.index_of(name);
        base[c] = value;
        covered.insert(c);
        fixed.emplace_back(fm.names[c], value);
    }
    std::optional<std::size_t> sc;
    std::vector<double> slices{0.0};
    if (spec.slice_feature) {
        sc = fm.index_of(*spec.slice_feature);
        covered.insert(*sc);
        slices = spec.slice_values;
        if (slices.empty()) {
            const auto col = fm.values.col(static_cast<Eigen::Index>(*sc));
            slices.assign(col.data(), col.data() + col.size());
            std::sort(slices.begin(), slices.end());
            slices.erase(std::unique(slices.begin(), slices.end()), slices.end());
            if (slices.size() > 16) throw DomainError("slice feature has too many distinct values; list them explicitly");
        }
    }
    for (auto c : used)
        if (!covered.contains(c)) throw DomainError("model feature '" + fm.names[c] + "' is neither a grid axis nor fixed");

    const auto xs = axis_points(spec.x, fm.values, xc);
    const auto ys = axis_points(spec.y, fm.values, yc);
    std::vector<RiskGrid> grids;
    for (double s : slices) {
        RiskGrid g;
        g.x_feature = fm.names[xc];
        g.y_feature = fm.names[yc];
        if (sc) {
            g.slice_feature = fm.names[*sc];
            g.slice_value = s;
        }
        g.fixed = fixed;
        g.x_points = xs;
        g.y_points = ys;
        g.risks.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
        parallel_for(xs.size(), jobs, [&](std::size_t i) {
            std::vector<double> row = base;
            if (sc) row[*sc] = s;
            row[xc] = xs[i];
            for (std::size_t k = 0; k < ys.size(); ++k) {
                row[yc] = ys[k];
                g.risks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = model.risk(row);
            }
        });
        grids.push_back(std::move(g));
    }
    return grids;
}

void write_risk_grid(std::ostream& out, const RiskGrid& g) {
    if (!g.slice_feature.empty()) out << "# slice " << g.slice_feature << '=' << csv::format_double(g.slice_value) << '\n';
    for (const auto& [name, v] : g.fixed) out << "# fixed " << name << '=' << csv::format_double(v) << '\n';
    out << g.y_feature << '\\' << g.x_feature;
    for (double x : g.x_points) out << ',' << csv::format_double(x);
    out << '\n';
    for (std::size_t k = 0; k < g.y_points.size(); ++k) {
        out << csv::format_double(g.y_points[k]);
        for (std::size_t i = 0; i < g.x_points.size(); ++i)
            out << ',' << csv::format_double(g.risks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        out << '\n';
    }
}

void write_risk_long(std::ostream& out, const std::vector<RiskGrid>& grids) {
    if (grids.empty()) return;
    out << grids.front().x_feature << ',' << grids.front().y_feature << ','
        << (grids.front().slice_feature.empty() ? "slice" : grids.front().slice_feature) << ",risk\n";
    for (const auto& g : grids)
        for (std::size_t i = 0; i < g.x_points.size(); ++i)
            for (std::size_t k = 0; k < g.y_points.size(); ++k)
                out << csv::format_double(g.x_points[i]) << ',' << csv::format_double(g.y_points[k]) << ','
                    << csv::format_double(g.slice_value) << ','
                    << csv::format_double(g.risks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) << '\n';
}

// ---- reference tables ------------------------------------------------------------

std::size_t ReferenceTable::column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    throw DomainError("reference table has no column '" + std::string(name) + "'");
}

double ReferenceTable::number(std::size_t row, std::string_view name) const {
    auto v = csv::to_double(at(row, name));
    if (!v) throw ParseError(row + 1, std::string(name), "not a number: '" + at(row, name) + "'");
    return *v;
}

ReferenceTable load_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read reference table '" + path + "'");
    ReferenceTable t;
    std::string line;
    if (!csv::next_record(in, line)) throw ParseError("reference table '" + path + "' is empty");
    t.header = csv::split(line);
    while (csv::next_record(in, line)) {
        auto f = csv::split(line);
        if (f.size() != t.header.size()) throw ParseError(t.rows.size() + 1, "", path + ": field count mismatch");
        t.rows.push_back(std::move(f));
    }
    return t;
}

TableId parse_table_id(std::string_view s) {
    auto t = csv::lower(s);
    if (t == "t1") return TableId::T1;
    if (t == "t2") return TableId::T2;
    if (t == "t3") return TableId::T3;
    if (t.starts_with("t5")) return TableId::T5;
    if (t.starts_with("t6")) return TableId::T6;
    if (t == "t12") return TableId::T12;
    if (t == "t12a") return TableId::T12a;
    if (t == "t13a") return TableId::T13a;
    if (t == "s1") return TableId::S1;
    if (t == "s2") return TableId::S2;
    throw DomainError("unknown table '" + std::string(s) + "'");
}

std::string_view to_string(TableId t) {
    switch (t) {
        case TableId::T1: return "T1";
        case TableId::T2: return "T2";
        case TableId::T3: return "T3";
        case TableId::T5: return "T5";
        case TableId::T6: return "T6";
        case TableId::T12: return "T12";
        case TableId::T12a: return "T12a";
        case TableId::T13a: return "T13a";
        case TableId::S1: return "S1";
        case TableId::S2: return "S2";
    }
    return "";
}

std::vector<TableId> all_tables() {
    return {TableId::T1, TableId::T2, TableId::T3, TableId::T5, TableId::T6,
            TableId::T12, TableId::T12a, TableId::T13a, TableId::S1, TableId::S2};
}

SearchSpace reduced_space(const SearchSpace& base, const std::vector<std::string>& features) {
    if (features.empty()) throw DomainError("reduced space needs at least one feature");
    SearchSpace s = base;
    s.features = features;
    s.subset_list.clear();
    if (features.size() <= 4) {
        for (std::uint32_t mask = 1; mask < (1u << features.size()); ++mask) {
            std::vector<std::string> sub;
            for (std::size_t j = 0; j < features.size(); ++j)
                if (mask >> j & 1) sub.push_back(features[j]);
            s.subset_list.push_back(sub);
        }
    } else {
        s.subset_list.push_back(features);
        for (std::size_t drop = 0; drop < features.size(); ++drop) {
            std::vector<std::string> sub;
            for (std::size_t j = 0; j < features.size(); ++j)
                if (j != drop) sub.push_back(features[j]);
            s.subset_list.push_back(sub);
        }
    }
    for (auto& m : s.methods) m.policy = SubsetPolicy::List;
    return s;
}

namespace {

constexpr std::array<const char*, 5> kFactorNames{"N", "E", "O", "A", "C"};

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

class Checker {
public:
    explicit Checker(ReproReport& r) : r_(r) {}

    void exact(std::string key, const std::string& expected, const std::string& computed, std::string note = {}) {
        add({std::move(key), expected, computed, std::numeric_limits<double>::quiet_NaN(), 0,
             expected == computed ? CellStatus::Pass : CellStatus::Fail, std::move(note)});
    }
    void number(std::string key, double expected, double computed, double tol, int decimals, std::string note = {}) {
        const double d = computed - expected;
        add({std::move(key), csv::format_fixed(expected, decimals), csv::format_fixed(computed, decimals), d, tol,
             std::fabs(d) <= tol + 1e-12 ? CellStatus::Pass : CellStatus::Fail, std::move(note)});
    }
    void info(std::string key, const std::string& expected, const std::string& computed, double diff = std::numeric_limits<double>::quiet_NaN(),
              std::string note = {}) {
        add({std::move(key), expected, computed, diff, 0, CellStatus::Info, std::move(note)});
    }

private:
    void add(CellCheck c) {
        if (c.status != CellStatus::Info) {
            ++r_.checked;
            r_.passed += c.status == CellStatus::Pass;
        }
        r_.cells.push_back(std::move(c));
    }
    ReproReport& r_;
};

const Dataset& require_data(const ReproduceInputs& in) {
    if (!in.data) throw DomainError("reproduction needs the survey data");
    return *in.data;
}

const Dataset& require_raw(const ReproduceInputs& in) {
    if (in.raw) return *in.raw;
    if (in.data && in.data->mode() == DataMode::Raw) return *in.data;
    throw DomainError("this table needs raw NEO-FFI-R scores (a raw-mode data file)");
}

std::string ref_path(const ReproduceInputs& in, const std::string& name) { return in.data_dir + "/reference/" + name; }

std::string percent_of(std::size_t users, std::size_t n) { return format_percent(Rational{users, n}); }

void check_counts(Checker& ck, const ReproduceInputs& in, bool pleiades) {
    const auto& data = require_data(in);
    const auto t = load_reference(ref_path(in, pleiades ? "pleiad_counts.csv" : "user_counts.csv"));
    const char* id = pleiades ? "pleiad" : "drug";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto basis = parse_basis(t.at(i, "basis"));
        const auto& name = t.at(i, id);
        const auto labels = pleiades ? pleiad_labels(data, find_pleiad(name), basis)
                                     : binarize_usage(data, parse_drug(name), basis);
        const auto users = count_users(labels);
        const std::string key = name + "/" + t.at(i, "basis");
        ck.exact(key + " users", t.at(i, "users"), std::to_string(users));
        ck.exact(key + " percent", t.at(i, "percent"), percent_of(users, data.size()));
    }
}

void check_descriptives(Checker& ck, const ReproduceInputs& in) {
    const auto& raw = require_raw(in);
    const auto norms = load_factor_norms(in.data_dir + "/schema/neo_norms.csv");
    const auto d = descriptive_stats(raw, &norms);
    const auto t = load_reference(ref_path(in, "factor_descriptives.csv"));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::find(kFactorNames.begin(), kFactorNames.end(), t.at(i, "factor")) - kFactorNames.begin());
        if (k >= 5) throw ParseError(i + 1, "factor", "unknown factor");
        const auto& s = d.factors[k];
        const std::string f = t.at(i, "factor");
        ck.number(f + " mean", t.number(i, "mean"), s.mean, 0.01, 2);
        ck.number(f + " sd", t.number(i, "sd"), s.sd, 0.01, 2);
        ck.number(f + " ci_low", t.number(i, "ci_low"), s.ci_low, 0.01, 2);
        ck.number(f + " ci_high", t.number(i, "ci_high"), s.ci_high, 0.01, 2);
        ck.info(f + " kurtosis", t.at(i, "kurtosis"), csv::format_fixed(s.kurtosis, 2), s.kurtosis - t.number(i, "kurtosis"));
        ck.info(f + " skewness", t.at(i, "skewness"), csv::format_fixed(s.skewness, 2), s.skewness - t.number(i, "skewness"));
    }
    const auto ts = load_reference(ref_path(in, "factor_tscores.csv"));
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::find(kFactorNames.begin(), kFactorNames.end(), ts.at(i, "factor")) - kFactorNames.begin());
        if (k >= 5) throw ParseError(i + 1, "factor", "unknown factor");
        const auto& s = (*d.normative)[k];
        const std::string f = ts.at(i, "factor") + " tscore";
        ck.number(f + " mean", ts.number(i, "mean"), s.mean, 0.02, 2);
        ck.number(f + " sd", ts.number(i, "sd"), s.sd, 0.02, 2);
        ck.number(f + " ci_low", ts.number(i, "ci_low"), s.ci_low, 0.02, 2);
        ck.number(f + " ci_high", ts.number(i, "ci_high"), s.ci_high, 0.02, 2);
    }
}

void check_factor_pcc(Checker& ck, const ReproduceInputs& in) {
    const auto d = descriptive_stats(require_raw(in));
    const auto t = load_reference(ref_path(in, "factor_pcc.csv"));
    for (std::size_t a = 0; a < t.rows.size(); ++a)
        for (std::size_t b = a + 1; b < 5; ++b)
            ck.number(std::string(kFactorNames[a]) + "-" + kFactorNames[b], t.number(a, kFactorNames[b]),
                      d.pcc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), 0.001, 3);
}

std::map<Basis, std::vector<GroupProfile>> profiles_for(const ReproduceInputs& in, const std::set<Basis>& bases,
                                                        TTest test) {
    std::map<Basis, std::vector<GroupProfile>> out;
    for (auto b : bases) out[b] = profile_drugs(require_data(in), b, test, in.jobs);
    return out;
}

void check_moderate(Checker& ck, const ReproduceInputs& in) {
    const auto t = load_reference(ref_path(in, "moderate_groups.csv"));
    std::set<Basis> bases;
    for (std::size_t i = 0; i < t.rows.size(); ++i) bases.insert(parse_basis(t.at(i, "basis")));
    const auto profiles = profiles_for(in, bases, in.test);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto basis = parse_basis(t.at(i, "basis"));
        const auto groups = moderate_groups(profiles.at(basis));
        auto expected = words(t.at(i, "drugs"));
        std::sort(expected.begin(), expected.end());
        const ModerateGroup* found = nullptr;
        for (const auto& g : groups)
            if (std::find(g.targets.begin(), g.targets.end(), expected.front()) != g.targets.end()) found = &g;
        std::vector<std::string> got = found ? found->targets : std::vector<std::string>{};
        std::sort(got.begin(), got.end());
        const std::string key = t.at(i, "basis") + " group " + t.at(i, "group");
        ck.exact(key, csv::join(expected, " "), csv::join(got, " "),
                 "code " + t.at(i, "code") + " vs " + (found ? found->code : std::string("?")));
    }
}

void check_arrows(Checker& ck, ReproReport& r, const ReproduceInputs& in) {
    const auto t = load_reference(ref_path(in, "arrows.csv"));
    std::set<Basis> bases;
    for (std::size_t i = 0; i < t.rows.size(); ++i) bases.insert(parse_basis(t.at(i, "basis")));
    const auto main = profiles_for(in, bases, in.test);
    const auto other = profiles_for(in, bases, in.test == TTest::Welch ? TTest::Pooled : TTest::Welch);
    auto arrows_of = [](const std::vector<GroupProfile>& ps, const std::string& drug) -> std::optional<std::array<Arrow, 5>> {
        for (const auto& p : ps)
            if (p.target == drug) return significance_arrows(p, 0.01);
        return std::nullopt;
    };
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto basis = parse_basis(t.at(i, "basis"));
        const auto drug = std::string(to_string(parse_drug(t.at(i, "drug"))));
        const auto a = arrows_of(main.at(basis), drug);
        const auto b = arrows_of(other.at(basis), drug);
        for (std::size_t k = 0; k < 5; ++k) {
            const auto& expected = t.at(i, kFactorNames[k]);
            const std::string got = a ? std::string(to_string((*a)[k])) : "?";
            std::string note = a ? "" : "too few users or non-users";
            if (a && got != expected)
                note = std::string(to_string(in.test == TTest::Welch ? TTest::Pooled : TTest::Welch)) + " gives " +
                       std::string(to_string((*b)[k]));
            ck.exact(t.at(i, "basis") + " " + t.at(i, "drug") + " " + kFactorNames[k], expected, got, note);
        }
    }
    r.required_fraction = 0.95;
}

void check_group_means(Checker& ck, const ReproduceInputs& in) {
    const auto t = load_reference(ref_path(in, "group_means.csv"));
    std::set<Basis> bases;
    for (std::size_t i = 0; i < t.rows.size(); ++i) bases.insert(parse_basis(t.at(i, "basis")));
    const auto profiles = profiles_for(in, bases, in.test);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto basis = parse_basis(t.at(i, "basis"));
        const auto drug = std::string(to_string(parse_drug(t.at(i, "drug"))));
        const GroupProfile* p = nullptr;
        for (const auto& g : profiles.at(basis))
            if (g.target == drug) p = &g;
        const auto k = static_cast<std::size_t>(std::find(kFactorNames.begin(), kFactorNames.end(), t.at(i, "factor")) - kFactorNames.begin());
        if (k >= 5) throw ParseError(i + 1, "", "unknown factor");
        const std::string key = t.at(i, "basis") + " " + t.at(i, "drug") + " " + t.at(i, "factor");
        if (!p) {
            ck.exact(key + " n_users", t.at(i, "n_users"), "?", "too few users or non-users");
            continue;
        }
        const auto& f = p->factors[k];
        ck.exact(key + " n_users", t.at(i, "n_users"), std::to_string(p->users));
        ck.exact(key + " n_nonusers", t.at(i, "n_nonusers"), std::to_string(p->nonusers));
        ck.number(key + " user_mean", t.number(i, "user_mean"), f.users.mean, 0.01, 2);
        ck.number(key + " user_ci_low", t.number(i, "user_ci_low"), f.users.ci_low, 0.01, 2);
        ck.number(key + " user_ci_high", t.number(i, "user_ci_high"), f.users.ci_high, 0.01, 2);
        ck.number(key + " nonuser_mean", t.number(i, "nonuser_mean"), f.nonusers.mean, 0.01, 2);
        ck.number(key + " nonuser_ci_low", t.number(i, "nonuser_ci_low"), f.nonusers.ci_low, 0.01, 2);
        ck.number(key + " nonuser_ci_high", t.number(i, "nonuser_ci_high"), f.nonusers.ci_high, 0.01, 2);
        ck.info(key + " p_value", t.at(i, "p_value"), csv::format_fixed(f.p, 4), f.p - t.number(i, "p_value"));
    }
}

int marker_of(double p) { return p < 0.001 ? 1 : p < 0.01 ? 2 : p < 0.05 ? 3 : 4; }

void check_drug_pcc(Checker& ck, const ReproduceInputs& in) {
    const auto& data = require_data(in);
    CorrelationOptions opt;
    opt.jobs = in.jobs;
    for (auto basis : {Basis::Decade, Basis::Year}) {
        const std::string b(to_string(basis));
        const auto rep = correlate(data, basis, opt);
        const auto t = load_reference(ref_path(in, "drug_pcc_" + b + ".csv"));
        const auto mk = load_reference(ref_path(in, "drug_pcc_" + b + "_markers.csv"));
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto a = static_cast<Eigen::Index>(parse_drug(t.at(i, "drug")));
            for (std::size_t j = 1; j < t.header.size(); ++j) {
                const auto c = static_cast<Eigen::Index>(parse_drug(t.header[j]));
                if (c <= a) continue;
                const std::string key = b + " " + t.at(i, "drug") + "-" + t.header[j];
                const double expected = t.number(i, t.header[j]);
                if (basis == Basis::Decade)
                    ck.number(key + " r", expected, rep.pcc(a, c), 0.001, 3);
                else
                    ck.info(key + " r", t.at(i, t.header[j]), csv::format_fixed(rep.pcc(a, c), 3), rep.pcc(a, c) - expected);
                ck.info(key + " marker", mk.at(i, t.header[j]), std::to_string(marker_of(rep.pvalues(a, c))));
            }
        }
        if (basis != Basis::Decade) continue;
        const auto counts = load_reference(ref_path(in, "correlation_counts.csv"));
        for (std::size_t i = 0; i < counts.rows.size(); ++i) {
            if (counts.at(i, "basis") != b) continue;
            const double level = counts.number(i, "level");
            CorrelationOptions o = opt;
            const auto& method = counts.at(i, "method");
            if (method == "bonferroni")
                o.alpha = level;
            else
                o.q = level;
            const auto r = (o.alpha == opt.alpha && o.q == opt.q) ? rep : correlate(data, basis, o);
            const auto got = method == "bonferroni" ? r.bonferroni_count : r.bh_count;
            ck.exact(b + " " + method + " at " + counts.at(i, "level"), counts.at(i, "count"), std::to_string(got));
        }
    }
}

struct TargetRow {
    std::string target;
    Basis basis;
    std::vector<std::string> features;
    double sens, spec;
};

std::string target_key(const std::string& target, Basis b) { return target + "/" + std::string(to_string(b)); }

void check_classifiers(Checker& ck, const ReproduceInputs& in, bool pleiades) {
    const auto& data = require_data(in);
    const auto t = load_reference(ref_path(in, pleiades ? "best_pleiad_classifiers.csv" : "best_classifiers.csv"));
    std::vector<std::string> wanted = in.targets;
    if (wanted.empty())
        wanted = pleiades ? std::vector<std::string>{"ecstasyPl/year", "benzoPl/week"}
                          : std::vector<std::string>{"crack", "ecstasy", "lsd", "cannabis", "legalh", "vsa"};
    const bool all = wanted.size() == 1 && wanted.front() == "all";
    std::vector<TargetRow> rows;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        TargetRow r{t.at(i, "target"), parse_basis(t.at(i, "basis")), words(t.at(i, "features")), t.number(i, "sensitivity"),
                    t.number(i, "specificity")};
        const bool hit = all || std::any_of(wanted.begin(), wanted.end(), [&](const std::string& w) {
                             return w == r.target || w == target_key(r.target, r.basis);
                         });
        if (hit) rows.push_back(std::move(r));
    }
    if (rows.empty()) throw DomainError("no reference rows match the requested targets");
    const auto fm = quantify_dataset(data);
    const auto base = load_search_space(in.data_dir + "/spaces/reduced_dt.toml");
    for (const auto& r : rows) {
        const auto labels = target_labels(data, r.target, r.basis);
        SearchOptions so;
        so.jobs = in.jobs;
        so.budget = in.budget;
        const auto outcome = search(reduced_space(base, r.features), fm, labels, so);
        const double expected = std::min(r.sens, r.spec);
        const std::string key = target_key(r.target, r.basis) + " min(sens,spec)";
        if (!outcome.selection.best) {
            ck.exact(key, csv::format_fixed(expected, 2), "none", "no admissible classifier");
            continue;
        }
        const auto& b = *outcome.selection.best;
        const std::string note = "sens " + format_percent(b.sensitivity()) + " spec " + format_percent(b.specificity()) +
                                 " (published " + csv::format_fixed(r.sens, 2) + "/" + csv::format_fixed(r.spec, 2) +
                                 "); " + feature_list(b.config, fm) + "; " + describe_params(b.config.params) +
                                 "; weight " + csv::format_double(b.config.user_weight);
        ck.number(key, expected, 100.0 * b.min_rate().value(), 3.0, 2, note);
    }
}

}  // namespace

ReproReport reproduce(TableId table, const ReproduceInputs& in) {
    ReproReport r;
    r.table = table;
    Checker ck(r);
    switch (table) {
        case TableId::T1: check_counts(ck, in, false); break;
        case TableId::T13a: check_counts(ck, in, true); break;
        case TableId::T2: check_descriptives(ck, in); break;
        case TableId::T3: check_factor_pcc(ck, in); break;
        case TableId::T5: check_moderate(ck, in); break;
        case TableId::T6: check_arrows(ck, r, in); break;
        case TableId::S1: check_group_means(ck, in); break;
        case TableId::S2: check_drug_pcc(ck, in); break;
        case TableId::T12: check_classifiers(ck, in, false); break;
        case TableId::T12a: check_classifiers(ck, in, true); break;
    }
    r.pass = r.checked > 0 &&
             static_cast<double>(r.passed) >= r.required_fraction * static_cast<double>(r.checked) - 1e-12;
    r.summary = std::string(to_string(table)) + ": " + std::to_string(r.passed) + "/" + std::to_string(r.checked) +
                " cells within tolerance" + (r.pass ? " (pass)" : " (FAIL)");
    return r;
}

void write_report(std::ostream& out, const ReproReport& r) {
    out << "# " << r.summary << '\n';
    out << "key,expected,computed,diff,tolerance,status,note\n";
    for (const auto& c : r.cells) {
        out << c.key << ',' << c.expected << ',' << c.computed << ','
            << (std::isnan(c.diff) ? std::string() : csv::format_fixed(c.diff, 4)) << ','
            << (c.status == CellStatus::Info ? std::string() : csv::format_double(c.tolerance)) << ','
            << (c.status == CellStatus::Pass ? "pass" : c.status == CellStatus::Fail ? "fail" : "info") << ','
            << c.note << '\n';
    }
}

}  // namespace pleiades
