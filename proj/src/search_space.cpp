#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "pleiades/csv.hpp"
#include "pleiades/error.hpp"
#include "pleiades/eval.hpp"
#include "pleiades/feature_rank.hpp"

namespace pleiades {

namespace {

nlohmann::json to_json(const toml::node& n, const std::string& where) {
    if (auto v = n.as_string()) return v->get();
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    throw ParseError(where + ": unsupported value type");
}

// Scalar or array of scalars.
std::vector<nlohmann::json> values_of(const toml::node& n, const std::string& where) {
    std::vector<nlohmann::json> out;
    if (auto a = n.as_array()) {
        for (const auto& e : *a) out.push_back(to_json(e, where));
        if (out.empty()) throw ParseError(where + ": empty value list");
    } else {
        out.push_back(to_json(n, where));
    }
    return out;
}

std::vector<std::string> strings_of(const toml::node& n, const std::string& where) {
    std::vector<std::string> out;
    for (const auto& v : values_of(n, where)) {
        if (!v.is_string()) throw ParseError(where + ": expected strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

SubsetPolicy parse_policy(const std::string& s, bool has_list) {
    if (s == "all") return SubsetPolicy::All;
    if (s == "ranked") return SubsetPolicy::Ranked;
    if (s == "list") {
        if (!has_list) throw ParseError("subset policy 'list' needs a top-level subsets array");
        return SubsetPolicy::List;
    }
    throw ParseError("unknown subset policy '" + s + "'");
}

SubsetPolicy default_policy(Method m, bool has_list) {
    if (has_list) return SubsetPolicy::List;
    return m == Method::Knn || m == Method::Pdfe || m == Method::Rf ? SubsetPolicy::Ranked : SubsetPolicy::All;
}

MethodGrid parse_method_grid(const toml::table& t, std::size_t position, bool has_list) {
    const std::string where = "method[" + std::to_string(position) + "]";
    auto name = t["name"].value<std::string>();
    if (!name) throw ParseError(where + ": missing name");
    MethodGrid g;
    g.method = parse_method(*name);
    g.policy = default_policy(g.method, has_list);

    const auto keys = params_to_json(params_from_json(g.method, nlohmann::json::object()));
    std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
    for (auto it = keys.begin(); it != keys.end(); ++it) {
        if (auto n = t.get(it.key()))
            axes.emplace_back(it.key(), values_of(*n, where + "." + it.key()));
    }
    for (const auto& [k, v] : t) {
        const std::string key(k.str());
        if (key == "name") continue;
        if (key == "subsets") {
            auto s = v.value<std::string>();
            if (!s) throw ParseError(where + ": subsets must be a policy name");
            g.policy = parse_policy(*s, has_list);
            continue;
        }
        if (!keys.contains(key)) throw ParseError(where + ": unknown parameter '" + key + "'");
    }

    // Cartesian product in key order, last axis fastest; duplicates after
    // normalization (e.g. transform settings of a Euclidean kNN) are dropped.
    std::set<std::string> seen;
    std::vector<std::size_t> pos(axes.size(), 0);
    while (true) {
        nlohmann::json j = nlohmann::json::object();
        for (std::size_t a = 0; a < axes.size(); ++a) j[axes[a].first] = axes[a].second[pos[a]];
        MethodParams p;
        try {
            p = params_from_json(g.method, j);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (seen.insert(describe_params(p)).second) g.params.push_back(p);
        bool done = true;
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++pos[a] < axes[a].second.size()) {
                done = false;
                break;
            }
            pos[a] = 0;
        }
        if (done) break;
    }
    g.explicit_seed = t.contains("seed");
    return g;
}

}  // namespace

SearchSpace parse_search_space(std::istream& in, const std::string& origin) {
    std::stringstream buf;
    buf << in.rdbuf();
    toml::table root;
    try {
        root = toml::parse(buf.str(), origin);
    } catch (const toml::parse_error& e) {
        throw ParseError(origin + ":" + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
    }
    SearchSpace s;
    if (auto n = root.get("features")) s.features = strings_of(*n, "features");
    if (auto n = root.get("ranking")) s.ranking = strings_of(*n, "ranking");
    if (auto n = root.get("weights")) {
        s.weights.clear();
        for (const auto& v : values_of(*n, "weights")) {
            if (!v.is_number()) throw ParseError("weights: expected numbers");
            s.weights.push_back(v.get<double>());
        }
    }
    if (auto n = root.get("max_subset_size")) {
        auto v = n->value<std::int64_t>();
        if (!v || *v < 0) throw ParseError("max_subset_size: expected a non-negative integer");
        s.max_subset_size = static_cast<int>(*v);
    }
    if (auto n = root.get("subsets")) {
        auto arr = n->as_array();
        if (!arr) throw ParseError("subsets: expected an array of feature lists");
        for (const auto& e : *arr) s.subset_list.push_back(strings_of(e, "subsets"));
    }
    auto methods = root["method"].as_array();
    if (!methods || methods->empty()) throw ParseError(origin + ": no [[method]] tables");
    std::size_t i = 0;
    for (const auto& m : *methods) {
        auto t = m.as_table();
        if (!t) throw ParseError(origin + ": [[method]] entries must be tables");
        s.methods.push_back(parse_method_grid(*t, i++, !s.subset_list.empty()));
    }
    for (const auto& [k, v] : root) {
        static const std::set<std::string> known{"features", "ranking", "weights", "max_subset_size", "subsets", "method"};
        if (!known.contains(std::string(k.str()))) throw ParseError(origin + ": unknown key '" + std::string(k.str()) + "'");
    }
    return s;
}

void apply_forest_seed(SearchSpace& space, std::uint64_t seed) {
    for (auto& g : space.methods) {
        if (g.explicit_seed) continue;
        for (auto& p : g.params)
            if (auto* rf = std::get_if<RfParams>(&p)) rf->seed = seed;
    }
}

SearchSpace load_search_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read search space '" + path + "'");
    return parse_search_space(in, path);
}

ConfigEnumerator::ConfigEnumerator(const SearchSpace& space, const FeatureMatrix& fm) : weights_(space.weights) {
    if (weights_.empty()) throw DomainError("search space has no weights");
    std::vector<std::size_t> candidates;
    if (space.features.empty()) {
        for (std::size_t j = 0; j < fm.cols(); ++j) candidates.push_back(j);
    } else {
        candidates = fm.indices_of(space.features);
    }
    const auto cap = space.max_subset_size > 0 ? static_cast<std::size_t>(space.max_subset_size) : candidates.size();

    auto sorted = [](std::vector<std::size_t> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };

    std::vector<std::vector<std::size_t>> all, ranked, listed;
    bool have_all = false, have_ranked = false;
    for (const auto& g : space.methods) {
        Block b;
        b.grid = &g;
        switch (g.policy) {
            case SubsetPolicy::All:
                if (!have_all) {
                    if (candidates.size() > 24) throw DomainError("search: too many candidate features for all subsets");
                    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << candidates.size()); ++mask) {
                        if (static_cast<std::size_t>(std::popcount(mask)) > cap) continue;
                        std::vector<std::size_t> sub;
                        for (std::size_t j = 0; j < candidates.size(); ++j)
                            if (mask >> j & 1) sub.push_back(candidates[j]);
                        all.push_back(sorted(sub));
                    }
                    have_all = true;
                }
                b.subsets = all;
                break;
            case SubsetPolicy::Ranked:
                if (!have_ranked) {
                    std::vector<std::size_t> order;
                    if (!space.ranking.empty()) {
                        order = fm.indices_of(space.ranking);
                    } else {
                        Eigen::MatrixXd sub(fm.values.rows(), static_cast<Eigen::Index>(candidates.size()));
                        for (std::size_t j = 0; j < candidates.size(); ++j)
                            sub.col(static_cast<Eigen::Index>(j)) = fm.values.col(static_cast<Eigen::Index>(candidates[j]));
                        for (auto k : principal_variables(sub).order) order.push_back(candidates[k]);
                    }
                    for (std::size_t len = 1; len <= std::min(cap, order.size()); ++len)
                        ranked.push_back(sorted({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len)}));
                    have_ranked = true;
                }
                b.subsets = ranked;
                break;
            case SubsetPolicy::List:
                if (listed.empty())
                    for (const auto& names : space.subset_list) listed.push_back(sorted(fm.indices_of(names)));
                b.subsets = listed;
                break;
        }
        b.offset = total_;
        b.size = b.subsets.size() * g.params.size() * weights_.size();
        total_ += b.size;
        blocks_.push_back(std::move(b));
    }
}

ClassifierConfig ConfigEnumerator::at(std::size_t id) const {
    if (id >= total_) throw DomainError("config id out of range");
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), id, [](std::size_t v, const Block& b) { return v < b.offset; });
    const Block& b = *(it - 1);
    std::size_t local = id - b.offset;
    const std::size_t nw = weights_.size();
    const std::size_t np = b.grid->params.size();
    ClassifierConfig c;
    c.user_weight = weights_[local % nw];
    local /= nw;
    c.params = b.grid->params[local % np];
    local /= np;
    c.features = b.subsets[local];
    return c;
}

}  // namespace pleiades
