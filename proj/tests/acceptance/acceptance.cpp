// Acceptance runner. One line per criterion: [PASS], [FAIL] or [BLOCKED].
//   acceptance properties --cli <pleiades-miner> --synth <make-synthetic> --data-dir <dir> --work <dir>
//   acceptance dataset --data-dir <dir>   (reads PLEIADES_DATA and PLEIADES_RAW_DATA)
// Exit status: 0 all pass, 1 any failure, 77 dataset not available.

#include <CLI11.hpp>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fmt/core.h>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "pleiades/classifiers.hpp"
#include "pleiades/correlation.hpp"
#include "pleiades/eval.hpp"
#include "pleiades/feature_rank.hpp"
#include "pleiades/quantify.hpp"
#include "pleiades/report.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace pleiades;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Tally {
    int failed = 0;

    void line(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
        if (!ok) ++failed;
        fmt::print("[{}] {} {}: {}\n", ok ? "PASS" : "FAIL", id, what, detail);
        std::fflush(stdout);
    }

    // Runs a check; an exception is a failure with its message as detail.
    template <class F>
    void run(const std::string& id, const std::string& what, F&& f) {
        try {
            std::string detail;
            const bool ok = f(detail);
            line(id, ok, what, detail);
        } catch (const std::exception& e) {
            line(id, false, what, std::string("error: ") + e.what());
        }
    }
};

// ---- oracles -------------------------------------------------------------------

double plugin_base(SplitCriterion c, double a, double b) {
    const double m = a + b;
    if (m == 0) return 0;
    const double p[2] = {a / m, b / m};
    double h = 0;
    switch (c) {
        case SplitCriterion::InfoGain:
            for (double q : p)
                if (q > 0) h -= q * std::log2(q);
            return h;
        case SplitCriterion::GiniGain:
            for (double q : p) h += q * (1 - q);
            return h;
        case SplitCriterion::DkmGain: return 2 * std::sqrt(p[0] * p[1]);
    }
    return 0;
}

double plugin_gain(SplitCriterion c, const double n[2][2]) {
    const double col[2] = {n[0][0] + n[1][0], n[0][1] + n[1][1]};
    const double total = col[0] + col[1];
    double g = plugin_base(c, n[0][0] + n[0][1], n[1][0] + n[1][1]);
    for (int j = 0; j < 2; ++j) g -= col[j] / total * plugin_base(c, n[0][j], n[1][j]);
    return g;
}

double entropy_sum_rig(const double n[2][2]) {
    const double total = n[0][0] + n[0][1] + n[1][0] + n[1][1];
    double ht = 0, hg = 0, hj = 0;
    for (int i = 0; i < 2; ++i) {
        const double row = n[i][0] + n[i][1], col = n[0][i] + n[1][i];
        if (row > 0) ht -= row / total * std::log2(row / total);
        if (col > 0) hg -= col / total * std::log2(col / total);
        for (int j = 0; j < 2; ++j)
            if (n[i][j] > 0) hj -= n[i][j] / total * std::log2(n[i][j] / total);
    }
    return (ht + hg - hj) / ht;
}

double phi_inv(double p) {
    static const boost::math::normal_distribution<double> z;
    if (p <= 0) return -std::numeric_limits<double>::infinity();
    if (p >= 1) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(z, p);
}

// ---- criterion 7 ------------------------------------------------------------------

bool check_gains(std::string& detail) {
    std::mt19937_64 rng(20240701);
    std::uniform_int_distribution<int> cell(0, 500);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        Contingency c;
        for (auto& r : c.n)
            for (auto& v : r) v = t % 2 ? cell(rng) : cell(rng) * frac(rng);
        if (c.n[0][0] + c.n[1][0] == 0) c.n[0][0] = 1;
        if (c.n[0][1] + c.n[1][1] == 0) c.n[1][1] = 1;
        for (auto k : {SplitCriterion::InfoGain, SplitCriterion::GiniGain, SplitCriterion::DkmGain})
            worst = std::max(worst, std::abs(split_gain(c, k) - plugin_gain(k, c.n)));
    }
    detail = fmt::format("max |gain - oracle| = {:.3g} over 1000 tables x 3 criteria (tol 1e-12)", worst);
    return worst <= 1e-12;
}

bool check_nested(std::string& detail) {
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto d = testing::synthetic_raw(300, seed);
        for (auto drug : all_drugs()) {
            const Labels l[4] = {binarize_usage(d, drug, Basis::Decade), binarize_usage(d, drug, Basis::Year),
                                 binarize_usage(d, drug, Basis::Month), binarize_usage(d, drug, Basis::Week)};
            for (std::size_t i = 0; i < d.size(); ++i)
                for (int b = 1; b < 4; ++b) {
                    ++checked;
                    violations += l[b][i] > l[b - 1][i];
                }
        }
        for (const auto& pl : all_pleiades()) {
            const Labels l[4] = {pleiad_labels(d, pl, Basis::Decade), pleiad_labels(d, pl, Basis::Year),
                                 pleiad_labels(d, pl, Basis::Month), pleiad_labels(d, pl, Basis::Week)};
            for (std::size_t i = 0; i < d.size(); ++i)
                for (int b = 1; b < 4; ++b) {
                    ++checked;
                    violations += l[b][i] > l[b - 1][i];
                }
        }
    }
    detail = fmt::format("week <= month <= year <= decade violated {} times in {} comparisons (25 seeds)", violations,
                         checked);
    return violations == 0;
}

bool check_parallel(std::string& detail) {
    const auto fm = quantify_dataset(testing::to_quantified(testing::synthetic_raw(240, 5)));
    const auto raw = testing::synthetic_raw(240, 5);
    const auto y = binarize_usage(raw, Drug::Cannabis, Basis::Decade);
    const std::vector<std::size_t> f{0, 2, 5, 6, 7};
    std::vector<MethodParams> grid{KnnParams{7, Distance::Fisher, 20, Kernel::Triangular, Kernel::Uniform},
                                   DtParams{SplitCriterion::DkmGain, true, 5},
                                   LdaParams{},
                                   GmParams{},
                                   PdfeParams{10, Kernel::Epanechnikov},
                                   LrParams{true},
                                   NbParams{},
                                   RfParams{25, DtParams{SplitCriterion::GiniGain, false, 2}, 0, true, 99}};
    std::size_t mismatched = 0;
    for (const auto& p : grid) {
        ClassifierConfig c{f, 1.5, p};
        std::vector<std::size_t> rows(fm.rows());
        std::iota(rows.begin(), rows.end(), 0);
        const auto serial = loocv_predict(c, fm.values, y, rows, LoocvOptions{true, 1});
        const auto par = loocv_predict(c, fm.values, y, rows, LoocvOptions{true, 4});
        const bool same = serial.label == par.label &&
                          std::equal(serial.risk.begin(), serial.risk.end(), par.risk.begin(), par.risk.end(),
                                     [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; });
        mismatched += !same;
    }
    detail = fmt::format("{} of {} methods differ between 1 and 4 fold threads (bitwise risks)", mismatched, grid.size());
    return mismatched == 0;
}

bool check_rig(std::string& detail) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> cell(0, 800);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        double n[2][2];
        for (auto& r : n)
            for (auto& v : r) v = cell(rng);
        if (n[0][0] + n[0][1] == 0) n[0][1] = 1;
        if (n[1][0] + n[1][1] == 0) n[1][0] = 1;
        worst = std::max(worst, std::abs(rig_from_table(n) - entropy_sum_rig(n)));
    }
    detail = fmt::format("max |RIG - entropy oracle| = {:.3g} over 1000 tables (tol 1e-12)", worst);
    return worst <= 1e-12;
}

bool check_risks(std::string& detail) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z;
    double lo = 1, hi = 0;
    std::size_t bad = 0;
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd x(60, 3);
        Labels y(60);
        for (Eigen::Index i = 0; i < 60; ++i) {
            y[static_cast<std::size_t>(i)] = (i % 3 == 0);
            for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = z(rng) * (1 + j) + (y[static_cast<std::size_t>(i)] ? 0.8 : 0.0);
            if (t % 2) x(i, 2) = std::round(x(i, 2));
        }
        for (MethodParams p : {MethodParams{GmParams{}}, MethodParams{NbParams{}}, MethodParams{PdfeParams{5, Kernel::Gaussian}},
                               MethodParams{PdfeParams{5, Kernel::Uniform}}}) {
            auto m = fit(ClassifierConfig{{0, 1, 2}, 0.5 + (t % 10) * 0.25, p}, x, y);
            for (int q = 0; q < 200; ++q) {
                const std::vector<double> row{z(rng) * 4, z(rng) * 4, z(rng) * 4};
                const double r = m->risk(row);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
                bad += !(r >= 0 && r <= 1);
            }
        }
    }
    // Symmetric settings: both classes see the same evidence.
    double worst = 0;
    {
        Eigen::MatrixXd x(6, 1);
        x << -1, 0, 1, -1, 0, 1;
        Labels y{1, 1, 1, 0, 0, 0};
        for (MethodParams p : {MethodParams{GmParams{}}, MethodParams{NbParams{}}}) {
            auto m = fit(ClassifierConfig{{0}, 1.0, p}, x, y);
            for (double v : {-1.0, 0.0, 1.0}) worst = std::max(worst, std::abs(m->risk(std::vector<double>{v}) - 0.5));
        }
        Eigen::MatrixXd two(2, 1);
        two << 0, 4;
        for (auto k : {Kernel::Uniform, Kernel::Triangular, Kernel::Epanechnikov, Kernel::Gaussian}) {
            auto m = fit(ClassifierConfig{{0}, 1.0, PdfeParams{1, k}}, two, Labels{1, 0});
            worst = std::max(worst, std::abs(m->risk(std::vector<double>{2.0}) - 0.5));
        }
        Eigen::MatrixXd mirror(8, 2);
        mirror << 1, 2, 2, 1, 3, 3, 1.5, 0.5, -1, -2, -2, -1, -3, -3, -1.5, -0.5;
        auto g = fit(ClassifierConfig{{0, 1}, 1.0, GmParams{}}, mirror, Labels{1, 1, 1, 1, 0, 0, 0, 0});
        worst = std::max(worst, std::abs(g->risk(std::vector<double>{0.0, 0.0}) - 0.5));
    }
    detail = fmt::format("risk range [{:.4g}, {:.4g}], {} outside [0,1]; max |symmetric risk - 0.5| = {:.3g} (tol 1e-12)",
                         lo, hi, bad, worst);
    return bad == 0 && worst <= 1e-12;
}

bool check_bh(std::string& detail) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t bad = 0, bh_total = 0, bon_total = 0;
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> p(1 + t % 153);
        const double skew = 1 + t % 9;
        for (auto& v : p) v = std::pow(u(rng), skew);
        const double level = 0.0005 + 0.1 * u(rng);
        const auto bh = bh_fdr(p, level);
        const auto bon = bonferroni(p, level);
        for (std::size_t i = 0; i < p.size(); ++i) {
            bad += bon[i] && !bh[i];
            bh_total += bh[i];
            bon_total += bon[i];
        }
    }
    detail = fmt::format("{} Bonferroni rejections missing from BH over 2000 vectors ({} BH, {} Bonferroni)", bad,
                         bh_total, bon_total);
    return bad == 0 && bh_total >= bon_total;
}

bool check_ordinal(std::string& detail) {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> len(2, 12), cnt(0, 2000);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::size_t> c(static_cast<std::size_t>(len(rng)));
        for (auto& v : c) v = static_cast<std::size_t>(cnt(rng));
        c.front() += 1;
        c.back() += 1;
        const double n = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0}));
        const auto q = ordinal_quantize(c);
        double below = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double ci = static_cast<double>(c[i]);
            const double mid = ci == 0 ? phi_inv(below / n) : phi_inv((below + ci / 2) / n);
            worst = std::max(worst, std::abs(q.values[i] - mid));
            below += ci;
            if (i + 1 < c.size()) worst = std::max(worst, std::abs(q.thresholds[i] - phi_inv(below / n)));
        }
    }
    detail = fmt::format("max |value - Phi^-1 oracle| = {:.3g} over 1000 count vectors (tol 1e-9)", worst);
    return worst <= 1e-9;
}

// ---- criterion 8 ------------------------------------------------------------------

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int shell(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every regular file under the directory, by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

constexpr const char* kDeterminismSpace = R"(features = ["age", "gender", "education", "nscore", "oscore", "ss"]
weights = [1.0, 2.0]
max_subset_size = 3

[[method]]
name = "dt"
criterion = ["info", "dkm"]
min_leaf = [3]

[[method]]
name = "knn"
k = [9]
distance = ["euclidean", "adaptive"]
k_transform = 30

[[method]]
name = "lr"

[[method]]
name = "rf"
trees = [15]
)";

bool check_determinism(const fs::path& cli, const fs::path& synth, const fs::path& data_dir, const fs::path& work,
                       std::string& detail) {
    fs::remove_all(work);
    fs::create_directories(work);
    const auto raw = work / "raw.csv", quantified = work / "quantified.csv", space = work / "space.toml";
    if (shell(quote(synth) + " " + quote(raw) + " 400 19 raw") != 0 ||
        shell(quote(synth) + " " + quote(quantified) + " 400 19 quantified") != 0)
        throw std::runtime_error("synthetic data generation failed");
    std::ofstream(space) << kDeterminismSpace;

    const std::string common = quote(cli) + " --log-level off --jobs 3 --seed 5 --data-dir " + quote(data_dir);
    std::vector<std::map<std::string, std::string>> runs;
    for (int run = 0; run < 2; ++run) {
        const auto dir = work / ("run" + std::to_string(run));
        fs::create_directories(dir);
        const int s = shell(common + " search --input " + quote(quantified) + " --drug cannabis --basis year --space " +
                            quote(space) + " --budget 600 --out " + quote(dir / "search" / "leaderboard.csv") +
                            " --save-model " + quote(dir / "search" / "model.json") + " > " +
                            quote(dir / "search.stdout"));
        if (s != 0) throw std::runtime_error("search exited with status " + std::to_string(s));
        // The tables do not match synthetic data; only the output bytes matter here.
        const int r = shell(common + " reproduce --input " + quote(quantified) + " --raw " + quote(raw) +
                            " --table T1 T2 T3 T5 T6 T13a S1 S2 T12 --targets crack --budget 80 --out-dir " +
                            quote(dir / "reproduce") + " > " + quote(dir / "reproduce.stdout"));
        if (r != 0 && r != 1) throw std::runtime_error("reproduce exited with status " + std::to_string(r));
        runs.push_back(tree(dir));
    }
    std::size_t differing = 0;
    for (const auto& [name, bytes] : runs[0]) {
        auto it = runs[1].find(name);
        differing += it == runs[1].end() || it->second != bytes;
    }
    differing += runs[1].size() > runs[0].size() ? runs[1].size() - runs[0].size() : 0;
    const bool enough = runs[0].contains("search/leaderboard.csv") && runs[0].contains("search/model.json") &&
                        runs[0].contains("reproduce/T12.csv") && runs[0].size() >= 12;
    detail = fmt::format("{} output files per run, {} differ between two runs of search and reproduce", runs[0].size(),
                         differing);
    return differing == 0 && enough;
}

int properties(const fs::path& cli, const fs::path& synth, const fs::path& data_dir, const fs::path& work) {
    Tally t;
    t.run("7a", "split gains vs plug-in oracle", check_gains);
    t.run("7b", "nested user sets across bases", check_nested);
    t.run("7c", "LOOCV parallel equals serial", check_parallel);
    t.run("7d", "RIG vs entropy summation oracle", check_rig);
    t.run("7e", "GM/NB/PDFE risks in [0,1], symmetric cases 0.5", check_risks);
    t.run("7f", "BH rejections contain Bonferroni rejections", check_bh);
    t.run("7g", "ordinal quantization vs inverse normal CDF", check_ordinal);
    t.run("8", "search and reproduce are byte-deterministic",
          [&](std::string& d) { return check_determinism(cli, synth, data_dir, work, d); });
    return t.failed == 0 ? 0 : 1;
}

// ---- dataset criteria -----------------------------------------------------------------

struct DatasetPaths {
    std::string data;
    std::string raw;
};

std::string table_summary(const std::vector<ReproReport>& reps) {
    std::string s;
    for (const auto& r : reps) s += (s.empty() ? "" : "; ") + r.summary;
    return s;
}

bool all_pass(const std::vector<ReproReport>& reps) {
    return std::all_of(reps.begin(), reps.end(), [](const ReproReport& r) { return r.pass; });
}

std::set<std::string> names_of(const FeatureMatrix& fm, const std::vector<std::size_t>& idx) {
    std::set<std::string> s;
    for (auto i : idx) s.insert(fm.names[i]);
    return s;
}

std::string join(const std::set<std::string>& s) {
    std::string out;
    for (const auto& v : s) out += (out.empty() ? "" : ",") + v;
    return "{" + out + "}";
}

int dataset(const fs::path& data_dir, int jobs) {
    const char* d = std::getenv("PLEIADES_DATA");
    const char* r = std::getenv("PLEIADES_RAW_DATA");
    const std::vector<std::pair<std::string, std::string>> criteria{
        {"1", "user counts (T1)"},          {"2", "pleiad counts (T13a)"},
        {"3", "descriptive statistics"},    {"4", "drug pair correlations (S2)"},
        {"5", "profile codes and arrows"},  {"6", "reduced-grid classifier search"},
        {"7h", "sparse PCA removal waves"}};
    if (!d || !fs::exists(d)) {
        for (const auto& [id, what] : criteria)
            fmt::print("[BLOCKED] {} {}: set PLEIADES_DATA to the quantified survey CSV\n", id, what);
        return 77;
    }
    const auto t0 = Clock::now();
    const Dataset data = load_dataset(d, DataMode::Quantified);
    const double load_s = seconds_since(t0);
    std::optional<Dataset> raw;
    if (r && fs::exists(r)) raw = load_dataset(r, DataMode::Raw);

    ReproduceInputs in;
    in.data = &data;
    in.raw = raw ? &*raw : nullptr;
    in.data_dir = data_dir.string();
    in.jobs = jobs;
    auto repro = [&](std::initializer_list<TableId> ids) {
        std::vector<ReproReport> out;
        for (auto id : ids) out.push_back(reproduce(id, in));
        return out;
    };

    Tally t;
    t.run("1", "user counts (T1)", [&](std::string& det) {
        const auto t1 = Clock::now();
        const auto reps = repro({TableId::T1});
        const double s = load_s + seconds_since(t1);
        det = fmt::format("{}; {:.3f} s (limit 1 s)", table_summary(reps), s);
        return all_pass(reps) && reps[0].passed == reps[0].checked && s < 1.0;
    });
    t.run("2", "pleiad counts (T13a)", [&](std::string& det) {
        const auto reps = repro({TableId::T13a});
        det = table_summary(reps);
        return all_pass(reps) && reps[0].passed == reps[0].checked;
    });
    t.run("3", "descriptive statistics (T2, T3, T-scores)", [&](std::string& det) {
        if (!raw) {
            det = "set PLEIADES_RAW_DATA to the raw-score survey CSV";
            return false;
        }
        const auto t1 = Clock::now();
        const auto reps = repro({TableId::T2, TableId::T3});
        const double s = seconds_since(t1);
        det = fmt::format("{}; {:.3f} s (limit 1 s)", table_summary(reps), s);
        return all_pass(reps) && s < 1.0;
    });
    t.run("4", "drug pair correlations and significant pair counts (S2)", [&](std::string& det) {
        const auto reps = repro({TableId::S2});
        det = table_summary(reps);
        return all_pass(reps);
    });
    t.run("5", "moderate code groups (T5) and arrows (T6)", [&](std::string& det) {
        const auto reps = repro({TableId::T5, TableId::T6});
        det = table_summary(reps);
        return all_pass(reps);
    });
    t.run("6", "reduced-grid classifier search (T12, T12a)", [&](std::string& det) {
        const auto t1 = Clock::now();
        const auto reps = repro({TableId::T12, TableId::T12a});
        det = fmt::format("{}; {:.1f} s", table_summary(reps), seconds_since(t1));
        return all_pass(reps) && std::all_of(reps.begin(), reps.end(), [](const ReproReport& x) {
                   return x.passed == x.checked;
               });
    });
    t.run("7h", "sparse PCA removal waves", [&](std::string& det) {
        std::vector<CategoryCount> counts;
        const auto cpath = data_dir / "reference" / "country_counts.csv";
        if (fs::exists(cpath)) counts = load_category_counts(cpath.string());
        const auto cat = quantify_dataset(data, NominalMode::CatPca, counts.empty() ? nullptr : &counts);
        const auto dum = quantify_dataset(data, NominalMode::Dummy, counts.empty() ? nullptr : &counts);
        const auto rc = sparse_pca_rank(cat.values);
        const auto rd = sparse_pca_rank(dum.values);
        const std::set<std::string> want_cat{"gender", "ethnicity"};
        const std::set<std::string> want_dum{"gender", "country_uk", "country_usa"};
        const auto got_cat = rc.steps.empty() ? std::set<std::string>{} : names_of(cat, rc.steps[0].removed);
        const auto got_dum = rd.steps.size() < 2 ? std::set<std::string>{} : names_of(dum, rd.steps[1].removed);
        det = fmt::format("CatPCA step 1 removed {} (want {}); dummy step 2 removed {} (want {})", join(got_cat),
                          join(want_cat), join(got_dum), join(want_dum));
        return got_cat == want_cat && got_dum == want_dum;
    });
    return t.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    app.require_subcommand(1);
    fs::path cli, synth, data_dir = "data", work = "acceptance_work";
    int jobs = 1;
    auto* props = app.add_subcommand("properties", "Criteria that need no survey data");
    props->add_option("--cli", cli, "pleiades-miner executable")->required()->check(CLI::ExistingFile);
    props->add_option("--synth", synth, "make-synthetic executable")->required()->check(CLI::ExistingFile);
    props->add_option("--data-dir", data_dir)->check(CLI::ExistingDirectory);
    props->add_option("--work", work, "Scratch directory");
    auto* ds = app.add_subcommand("dataset", "Criteria on the survey data");
    ds->add_option("--data-dir", data_dir)->check(CLI::ExistingDirectory);
    ds->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    try {
        if (*props) return properties(fs::absolute(cli), fs::absolute(synth), fs::absolute(data_dir), fs::absolute(work));
        return dataset(data_dir, jobs);
    } catch (const std::exception& e) {
        fmt::print(stderr, "acceptance: {}\n", e.what());
        return 1;
    }
}
