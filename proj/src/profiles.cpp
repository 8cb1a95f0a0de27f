#include "pleiades/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/parallel.hpp"
#include "pleiades/stats.hpp"

namespace pleiades {

namespace {

constexpr std::array<char, 5> kFactorLetters{'N', 'E', 'O', 'A', 'C'};

std::vector<double> subset(const std::vector<double>& x, const Labels& labels, bool users) {
    std::vector<double> out;
    for (std::size_t i = 0; i < x.size(); ++i)
        if ((labels[i] != 0) == users) out.push_back(x[i]);
    return out;
}

nlohmann::ordered_json summary_json(const ColumnSummary& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high},
            {"kurtosis", s.kurtosis}, {"skewness", s.skewness}};
}

}  // namespace

ColumnSummary summarize(std::span<const double> x, double level) {
    if (x.size() < 2) throw DomainError("summary needs at least two values");
    ColumnSummary s;
    s.n = x.size();
    s.mean = mean(x);
    s.sd = stddev(x);
    const double half = student_t_quantile(0.5 + level / 2, static_cast<double>(s.n - 1)) * s.sd /
                        std::sqrt(static_cast<double>(s.n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    if (s.sd > 0) {
        s.kurtosis = s.n > 3 ? excess_kurtosis(x) : std::numeric_limits<double>::quiet_NaN();
        s.skewness = s.n > 2 ? skewness(x) : std::numeric_limits<double>::quiet_NaN();
    } else {
        s.kurtosis = s.skewness = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

FactorNorms load_factor_norms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read factor norms '" + path + "'");
    FactorNorms norms{};
    std::array<bool, 5> seen{};
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
        if (f.size() != 3) throw ParseError(row, "", "expected factor,mean,sd");
        const auto it = std::find(kFactorLetters.begin(), kFactorLetters.end(), f[0].empty() ? '?' : f[0][0]);
        auto m = csv::to_double(f[1]);
        auto sd = csv::to_double(f[2]);
        if (f[0].size() != 1 || it == kFactorLetters.end() || !m || !sd || !(*sd > 0))
            throw ParseError(row, f[0], "bad factor norm");
        const auto k = static_cast<std::size_t>(it - kFactorLetters.begin());
        norms[k] = {*m, *sd};
        seen[k] = true;
    }
    for (std::size_t k = 0; k < 5; ++k)
        if (!seen[k]) throw ParseError(0, std::string(1, kFactorLetters[k]), "missing factor norm");
    return norms;
}

Descriptives descriptive_stats(const Dataset& data, const FactorNorms* norms) {
    Descriptives d;
    d.mode = data.mode();
    std::array<std::vector<double>, 5> cols;
    for (std::size_t k = 0; k < 5; ++k) {
        cols[k] = data.column(kFactors[k]);
        d.factors[k] = summarize(cols[k]);
    }
    if (norms) {
        std::array<ColumnSummary, 5> t;
        for (std::size_t k = 0; k < 5; ++k) t[k] = summarize(tscores(cols[k], (*norms)[k]));
        d.normative = t;
    }
    d.pcc = Eigen::MatrixXd::Identity(5, 5);
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b) {
            const double r = pearson(cols[a], cols[b]);
            d.pcc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
            d.pcc(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
        }
    for (std::size_t a = 0; a < 5; ++a)
        if (!(d.factors[a].sd > 0)) d.pcc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = std::numeric_limits<double>::quiet_NaN();
    return d;
}

TTest parse_ttest(std::string_view s) {
    auto t = csv::lower(s);
    if (t == "welch") return TTest::Welch;
    if (t == "pooled" || t == "student") return TTest::Pooled;
    throw DomainError("unknown t-test '" + std::string(s) + "'");
}

std::string_view to_string(TTest t) { return t == TTest::Welch ? "welch" : "pooled"; }

GroupProfile group_mean_tscores(const Dataset& data, const Labels& labels, TTest test) {
    if (labels.size() != data.size()) throw DomainError("profile: label count mismatch");
    GroupProfile g;
    g.test = test;
    g.users = count_users(labels);
    g.nonusers = labels.size() - g.users;
    if (g.users < 2 || g.nonusers < 2) throw DomainError("profile: each group needs at least two members");
    for (std::size_t k = 0; k < 5; ++k) {
        const auto raw = data.column(kFactors[k]);
        const auto t = tscores(raw, sample_transform(raw));
        auto& fc = g.factors[k];
        const auto u = subset(t, labels, true);
        const auto n = subset(t, labels, false);
        fc.users = summarize(u);
        fc.nonusers = summarize(n);
        const double n1 = static_cast<double>(u.size()), n2 = static_cast<double>(n.size());
        const double v1 = fc.users.sd * fc.users.sd, v2 = fc.nonusers.sd * fc.nonusers.sd;
        double se2 = 0;
        if (test == TTest::Welch) {
            se2 = v1 / n1 + v2 / n2;
            const double a = v1 / n1, b = v2 / n2;
            fc.df = se2 * se2 / (a * a / (n1 - 1) + b * b / (n2 - 1));
        } else {
            fc.df = n1 + n2 - 2;
            const double pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / fc.df;
            se2 = pooled * (1 / n1 + 1 / n2);
        }
        const double diff = fc.users.mean - fc.nonusers.mean;
        if (se2 > 0) {
            fc.t = diff / std::sqrt(se2);
            fc.p = student_t_two_sided(fc.t, fc.df);
        } else {
            fc.t = diff == 0 ? 0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            fc.p = diff == 0 ? 1.0 : 0.0;
        }
    }
    return g;
}

ModerateCode moderate_code(double m) {
    ModerateCode c;
    if (m < 49)
        c.code = '-';
    else if (m <= 51)
        c.code = '0';
    else
        c.code = '+';
    c.out_of_band = m < 44 || m > 56;
    return c;
}

std::array<ModerateCode, 5> moderate_code(const GroupProfile& p) {
    std::array<ModerateCode, 5> out;
    for (std::size_t k = 0; k < 5; ++k) out[k] = moderate_code(p.factors[k].users.mean);
    return out;
}

std::string code_string(const std::array<ModerateCode, 5>& codes) {
    std::string s;
    for (const auto& c : codes) s += c.code;
    return s;
}

std::string_view to_string(Arrow a) {
    switch (a) {
        case Arrow::Up: return "up";
        case Arrow::Down: return "down";
        case Arrow::None: break;
    }
    return "none";
}

std::array<Arrow, 5> significance_arrows(const GroupProfile& p, double alpha) {
    std::array<Arrow, 5> out{};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& f = p.factors[k];
        if (!(f.p < alpha)) continue;
        if (f.users.mean > f.nonusers.mean)
            out[k] = Arrow::Up;
        else if (f.users.mean < f.nonusers.mean)
            out[k] = Arrow::Down;
    }
    return out;
}

std::vector<ModerateGroup> moderate_groups(const std::vector<GroupProfile>& profiles) {
    std::vector<ModerateGroup> groups;
    std::map<std::string, std::size_t> at;
    for (const auto& p : profiles) {
        const auto code = code_string(moderate_code(p));
        auto [it, fresh] = at.emplace(code, groups.size());
        if (fresh) groups.push_back({code, {}});
        groups[it->second].targets.push_back(p.target);
    }
    return groups;
}

std::vector<GroupProfile> profile_drugs(const Dataset& data, Basis basis, TTest test, int jobs,
                                        std::vector<std::string>* skipped) {
    const auto drugs = all_drugs();
    std::vector<std::optional<GroupProfile>> slots(drugs.size());
    parallel_for(drugs.size(), jobs, [&](std::size_t i) {
        const auto labels = binarize_usage(data, drugs[i], basis);
        const auto users = count_users(labels);
        if (users < 2 || labels.size() - users < 2) return;
        slots[i] = group_mean_tscores(data, labels, test);
        slots[i]->target = std::string(to_string(drugs[i]));
        slots[i]->basis = basis;
    });
    std::vector<GroupProfile> out;
    for (std::size_t i = 0; i < drugs.size(); ++i) {
        if (slots[i])
            out.push_back(std::move(*slots[i]));
        else if (skipped)
            skipped->emplace_back(to_string(drugs[i]));
    }
    return out;
}

nlohmann::ordered_json to_json(const GroupProfile& p, double alpha) {
    nlohmann::ordered_json j;
    j["target"] = p.target;
    j["basis"] = to_string(p.basis);
    j["test"] = to_string(p.test);
    j["users"] = p.users;
    j["nonusers"] = p.nonusers;
    const auto codes = moderate_code(p);
    const auto arrows = significance_arrows(p, alpha);
    j["code"] = code_string(codes);
    nlohmann::ordered_json fs = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& f = p.factors[k];
        fs[std::string(1, kFactorLetters[k])] = {
            {"users", summary_json(f.users)}, {"nonusers", summary_json(f.nonusers)}, {"t", f.t}, {"df", f.df},
            {"p", f.p}, {"code", std::string(1, codes[k].code)}, {"out_of_band", codes[k].out_of_band},
            {"arrow", to_string(arrows[k])}};
    }
    j["factors"] = fs;
    return j;
}

nlohmann::ordered_json to_json(const Descriptives& d) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(d.mode);
    nlohmann::ordered_json fs = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < 5; ++k) {
        auto e = summary_json(d.factors[k]);
        if (d.normative) e["tscore"] = summary_json((*d.normative)[k]);
        fs[std::string(1, kFactorLetters[k])] = e;
    }
    j["factors"] = fs;
    nlohmann::ordered_json pcc = nlohmann::ordered_json::array();
    for (Eigen::Index a = 0; a < 5; ++a) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (Eigen::Index b = 0; b < 5; ++b) {
            if (std::isfinite(d.pcc(a, b)))
                r.push_back(d.pcc(a, b));
            else
                r.push_back(nullptr);
        }
        pcc.push_back(r);
    }
    j["pcc"] = pcc;
    return j;
}

void write_arrows(std::ostream& out, const std::vector<GroupProfile>& profiles, double alpha) {
    out << "basis,target,N,E,O,A,C\n";
    for (const auto& p : profiles) {
        out << to_string(p.basis) << ',' << p.target;
        for (auto a : significance_arrows(p, alpha)) out << ',' << to_string(a);
        out << '\n';
    }
}

}  // namespace pleiades
