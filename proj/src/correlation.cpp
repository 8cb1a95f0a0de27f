#include "pleiades/correlation.hpp"

#include <algorithm>
#include <boost/math/distributions/hypergeometric.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/parallel.hpp"
#include "pleiades/stats.hpp"

namespace pleiades {

namespace {

struct Table {
    double n[2][2] = {{0, 0}, {0, 0}};  // [x][y]
    double total = 0;
};

Table tabulate(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
    if (x.size() != y.size()) throw DomainError("label vectors differ in length");
    Table t;
    for (std::size_t i = 0; i < x.size(); ++i) t.n[x[i] ? 1 : 0][y[i] ? 1 : 0] += 1;
    t.total = static_cast<double>(x.size());
    return t;
}

// Pearson r from the joint count with fixed margins.
double r_from_joint(double n11, double nx, double ny, double n) {
    const double cov = n * n11 - nx * ny;
    return cov / std::sqrt(nx * (n - nx) * ny * (n - ny));
}

}  // namespace

PccResult pcc_binary(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
    const Table t = tabulate(x, y);
    const double nx = t.n[1][0] + t.n[1][1];
    const double ny = t.n[0][1] + t.n[1][1];
    if (nx == 0 || nx == t.total || ny == 0 || ny == t.total) throw DomainError("pcc: constant label vector");
    PccResult out;
    out.r = std::clamp(r_from_joint(t.n[1][1], nx, ny, t.total), -1.0, 1.0);
    const double df = t.total - 2;
    if (df < 1) throw DomainError("pcc: need at least three observations");
    if (std::fabs(out.r) >= 1.0) {
        out.p = 0.0;
    } else {
        const double tstat = out.r * std::sqrt(df / (1.0 - out.r * out.r));
        out.p = student_t_two_sided(tstat, df);
    }
    return out;
}

double permutation_pvalue(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
    const Table t = tabulate(x, y);
    const auto n = static_cast<unsigned>(t.total);
    const auto nx = static_cast<unsigned>(t.n[1][0] + t.n[1][1]);
    const auto ny = static_cast<unsigned>(t.n[0][1] + t.n[1][1]);
    if (nx == 0 || nx == n || ny == 0 || ny == n) throw DomainError("pcc: constant label vector");
    const double observed = std::fabs(r_from_joint(t.n[1][1], nx, ny, n));
    boost::math::hypergeometric_distribution<double> h(nx, ny, n);
    const unsigned lo = nx + ny > n ? nx + ny - n : 0;
    const unsigned hi = std::min(nx, ny);
    double p = 0;
    for (unsigned k = lo; k <= hi; ++k)
        if (std::fabs(r_from_joint(k, nx, ny, n)) >= observed * (1 - 1e-12)) p += boost::math::pdf(h, k);
    return std::min(p, 1.0);
}

std::vector<bool> bonferroni(std::span<const double> p, double alpha) {
    std::vector<bool> out(p.size(), false);
    if (p.empty()) return out;
    const double level = alpha / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] <= level;
    return out;
}

std::vector<bool> bh_fdr(std::span<const double> p, double q) {
    if (!(q > 0 && q < 1)) throw DomainError("bh_fdr: q must lie in (0, 1)");
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (p[order[i]] <= static_cast<double>(i + 1) * q / static_cast<double>(m)) k = i + 1;
    std::vector<bool> out(m, false);
    for (std::size_t i = 0; i < k; ++i) out[order[i]] = true;
    return out;
}

double entropy_bits(std::span<const double> counts) {
    double total = 0;
    for (double c : counts) total += c;
    if (total <= 0) return 0;
    double h = 0;
    for (double c : counts)
        if (c > 0) h -= (c / total) * std::log2(c / total);
    return h;
}

double rig_from_table(const double n[2][2]) {
    const double t0 = n[0][0] + n[0][1];
    const double t1 = n[1][0] + n[1][1];
    const double target[2] = {t0, t1};
    const double h = entropy_bits(target);
    if (!(h > 0)) throw DomainError("rig: constant target");
    const double total = t0 + t1;
    double cond = 0;
    for (int g = 0; g < 2; ++g) {
        const double col[2] = {n[0][g], n[1][g]};
        const double ng = col[0] + col[1];
        if (ng > 0) cond += ng / total * entropy_bits(col);
    }
    return std::clamp((h - cond) / h, 0.0, 1.0);
}

double rig(std::span<const std::uint8_t> target, std::span<const std::uint8_t> given) {
    const Table t = tabulate(target, given);
    return rig_from_table(t.n);
}

std::vector<RigPair> symmetric_rig_pairs(const Eigen::MatrixXd& m, double ratio, double strong) {
    std::vector<RigPair> out;
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < m.cols(); ++b) {
            RigPair p;
            p.a = static_cast<std::size_t>(a);
            p.b = static_cast<std::size_t>(b);
            p.rig_ab = m(a, b);
            p.rig_ba = m(b, a);
            const double lo = std::min(p.rig_ab, p.rig_ba);
            p.symmetric = lo > 0 && std::fabs(p.rig_ab - p.rig_ba) / lo < ratio;
            p.strong = p.rig_ab > strong && p.rig_ba > strong;
            if (p.symmetric || p.strong) out.push_back(p);
        }
    }
    return out;
}

std::string BandTable::band_of(double r) const {
    const double a = std::fabs(r);
    std::string name = bands.empty() ? "" : bands.front().name;
    for (const auto& b : bands)
        if (a >= b.lower) name = b.name;
    return name;
}

BandTable default_bands(Basis basis) {
    BandTable t;
    if (basis == Basis::Year) {
        t.display_threshold = 0.35;
        t.bands = {{"weak", 0.0}, {"medium", 0.35}, {"strong", 0.40}, {"very_strong", 0.5}};
    } else {
        t.display_threshold = 0.4;
        t.bands = {{"weak", 0.0}, {"medium", 0.4}, {"strong", 0.45}, {"very_strong", 0.5}};
    }
    return t;
}

BandTable parse_bands(std::string_view spec, double display_threshold) {
    BandTable t;
    t.display_threshold = display_threshold;
    t.bands.push_back({"weak", 0.0});
    std::size_t start = 0;
    while (start < spec.size()) {
        auto end = spec.find(',', start);
        if (end == std::string_view::npos) end = spec.size();
        auto item = spec.substr(start, end - start);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("band '" + std::string(item) + "' is not name=lower");
        auto v = csv::to_double(item.substr(eq + 1));
        if (!v || *v <= t.bands.back().lower) throw ParseError("band bounds must increase: '" + std::string(item) + "'");
        t.bands.push_back({std::string(item.substr(0, eq)), *v});
        start = end + 1;
    }
    return t;
}

std::vector<Edge> pleiade_graph(const Eigen::MatrixXd& pcc, const BandTable& bands) {
    if (pcc.rows() != pcc.cols()) throw DomainError("pleiade_graph: matrix is not square");
    std::vector<Edge> edges;
    for (Eigen::Index a = 0; a < pcc.rows(); ++a)
        for (Eigen::Index b = a + 1; b < pcc.cols(); ++b)
            if (std::fabs(pcc(a, b)) >= bands.display_threshold && std::fabs(pcc(a, b)) > 0)
                edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), pcc(a, b), bands.band_of(pcc(a, b))});
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return std::fabs(x.r) > std::fabs(y.r); });
    return edges;
}

std::vector<PleiadLink> check_pleiades(const Eigen::MatrixXd& pcc, const BandTable& bands) {
    if (pcc.rows() != static_cast<Eigen::Index>(kDrugCount)) throw DomainError("check_pleiades: expects the drug matrix");
    std::vector<PleiadLink> out;
    for (const auto& pl : all_pleiades()) {
        const Drug core = pl.members.back();
        for (auto m : pl.members) {
            if (m == core) continue;
            PleiadLink l{pl.name, core, m, pcc(static_cast<Eigen::Index>(core), static_cast<Eigen::Index>(m)), false};
            l.connected = std::fabs(l.r) >= bands.display_threshold;
            out.push_back(l);
        }
    }
    return out;
}

CorrelationReport correlate(const std::vector<Labels>& columns, const std::vector<std::string>& names,
                            const CorrelationOptions& options) {
    const auto k = columns.size();
    if (names.size() != k) throw DomainError("correlate: name count mismatch");
    auto constant = [](const Labels& v) {
        return std::all_of(v.begin(), v.end(), [&](std::uint8_t e) { return e == v.front(); });
    };
    CorrelationReport rep;
    rep.names = names;
    rep.options = options;
    rep.pcc = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    rep.pvalues = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    rep.rig = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
    rep.pairs = pairs.size();
    std::vector<double> p(pairs.size());
    parallel_for(pairs.size(), options.jobs, [&](std::size_t i) {
        const auto [a, b] = pairs[i];
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        const bool ca = constant(columns[a]), cb = constant(columns[b]);
        if (ca || cb) {
            // Undefined correlation: reported as NaN and never significant.
            rep.pcc(ia, ib) = rep.pcc(ib, ia) = std::numeric_limits<double>::quiet_NaN();
            rep.pvalues(ia, ib) = rep.pvalues(ib, ia) = 1.0;
            rep.rig(ia, ib) = ca ? std::numeric_limits<double>::quiet_NaN() : 0.0;
            rep.rig(ib, ia) = cb ? std::numeric_limits<double>::quiet_NaN() : 0.0;
            p[i] = 1.0;
            return;
        }
        const auto res = pcc_binary(columns[a], columns[b]);
        const double pv = options.permutation ? permutation_pvalue(columns[a], columns[b]) : res.p;
        rep.pcc(ia, ib) = rep.pcc(ib, ia) = res.r;
        rep.pvalues(ia, ib) = rep.pvalues(ib, ia) = pv;
        rep.rig(ia, ib) = rig(columns[a], columns[b]);
        rep.rig(ib, ia) = rig(columns[b], columns[a]);
        p[i] = pv;
    });
    const auto bon = bonferroni(p, options.alpha);
    const auto bh = bh_fdr(p, options.q);
    rep.bonferroni.assign(k, std::vector<bool>(k, false));
    rep.bh.assign(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [a, b] = pairs[i];
        rep.bonferroni[a][b] = rep.bonferroni[b][a] = bon[i];
        rep.bh[a][b] = rep.bh[b][a] = bh[i];
        rep.bonferroni_count += bon[i];
        rep.bh_count += bh[i];
    }
    return rep;
}

CorrelationReport correlate(const Dataset& data, Basis basis, const CorrelationOptions& options) {
    std::vector<Labels> cols;
    std::vector<std::string> names;
    for (auto d : all_drugs()) {
        cols.push_back(binarize_usage(data, d, basis));
        names.emplace_back(to_string(d));
    }
    auto rep = correlate(cols, names, options);
    rep.basis = basis;
    return rep;
}

nlohmann::ordered_json to_json(const CorrelationReport& rep, const BandTable& bands) {
    auto matrix = [&](const Eigen::MatrixXd& m) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
            rows.push_back(r);
        }
        return rows;
    };
    auto flags = [&](const std::vector<std::vector<bool>>& f) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (std::size_t a = 0; a < f.size(); ++a)
            for (std::size_t b = a + 1; b < f.size(); ++b)
                if (f[a][b]) out.push_back({rep.names[a], rep.names[b]});
        return out;
    };
    nlohmann::ordered_json j;
    j["basis"] = to_string(rep.basis);
    j["names"] = rep.names;
    j["pairs"] = rep.pairs;
    j["pvalue_method"] = rep.options.permutation ? "permutation" : "student_t";
    j["pcc"] = matrix(rep.pcc);
    j["pvalues"] = matrix(rep.pvalues);
    j["rig"] = matrix(rep.rig);
    j["bonferroni"] = {{"alpha", rep.options.alpha}, {"count", rep.bonferroni_count}, {"pairs", flags(rep.bonferroni)}};
    j["bh"] = {{"q", rep.options.q}, {"count", rep.bh_count}, {"pairs", flags(rep.bh)}};
    nlohmann::ordered_json sym = nlohmann::ordered_json::array();
    for (const auto& p : symmetric_rig_pairs(rep.rig))
        sym.push_back({{"a", rep.names[p.a]}, {"b", rep.names[p.b]}, {"rig_ab", p.rig_ab}, {"rig_ba", p.rig_ba},
                       {"symmetric", p.symmetric}, {"strong", p.strong}});
    j["rig_pairs"] = sym;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : pleiade_graph(rep.pcc, bands))
        edges.push_back({{"a", rep.names[e.a]}, {"b", rep.names[e.b]}, {"r", e.r}, {"band", e.band}});
    j["edges"] = {{"threshold", bands.display_threshold}, {"list", edges}};
    if (rep.names.size() == kDrugCount) {
        nlohmann::ordered_json links = nlohmann::ordered_json::array();
        for (const auto& l : check_pleiades(rep.pcc, bands))
            links.push_back({{"pleiad", l.pleiad}, {"core", to_string(l.core)}, {"member", to_string(l.member)}, {"r", l.r},
                             {"connected", l.connected}});
        j["pleiad_links"] = links;
    }
    return j;
}

void write_edges(std::ostream& out, const std::vector<Edge>& edges, const std::vector<std::string>& names) {
    out << "a,b,r,band\n";
    for (const auto& e : edges) out << names[e.a] << ',' << names[e.b] << ',' << csv::format_fixed(e.r, 3) << ',' << e.band << '\n';
}

}  // namespace pleiades
