#ifndef LIVSIC_CONFIG_HPP
#define LIVSIC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "livsic/cocycle.hpp"

namespace livsic {

namespace cfg {

using nlohmann::json;

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object())
        throw ConfigError(where + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline Matrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a matrix (array of rows)");
    int rows = int(j.size());
    int cols = int(j[0].size());
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[std::size_t(r)].is_array() || int(j[std::size_t(r)].size()) != cols)
            throw ConfigError(where + ": ragged matrix");
        for (int c = 0; c < cols; ++c) {
            const auto& cell = j[std::size_t(r)][std::size_t(c)];
            if (!cell.is_number()) throw ConfigError(where + ": non-numeric entry");
            m(r, c) = cell.get<double>();
        }
    }
    return m;
}

inline CocycleSpec parse_cocycle(const json& j, const std::string& where) {
    require_keys(j, {"dim", "kind", "matrix", "terms", "window", "table", "of",
                     "alpha", "c0"},
                 where);
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ConfigError(where + ": missing integer 'dim'");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError(where + ": missing string 'kind'");
    int dim = j["dim"].get<int>();
    if (dim < 1 || dim > 8) throw ConfigError(where + ": dim out of range [1,8]");
    std::string kind = j["kind"].get<std::string>();

    CocycleSpec spec;
    if (kind == "constant") {
        if (!j.contains("matrix")) throw ConfigError(where + ": constant needs 'matrix'");
        Matrix m = parse_matrix(j["matrix"], where + ".matrix");
        if (m.rows() != dim || m.cols() != dim)
            throw ConfigError(where + ": matrix shape vs dim mismatch");
        spec = CocycleSpec::constant(m);
    } else if (kind == "exp_trig") {
        if (!j.contains("terms") || !j["terms"].is_array())
            throw ConfigError(where + ": exp_trig needs 'terms' array");
        std::vector<TrigTerm> terms;
        for (std::size_t i = 0; i < j["terms"].size(); ++i) {
            const auto& t = j["terms"][i];
            require_keys(t, {"coef", "freq", "phase"}, where + ".terms");
            TrigTerm term;
            term.coef = parse_matrix(t.at("coef"), where + ".terms.coef");
            if (term.coef.rows() != dim || term.coef.cols() != dim)
                throw ConfigError(where + ": term coef shape vs dim mismatch");
            if (!t.contains("freq") || !t["freq"].is_array() || t["freq"].size() != 2)
                throw ConfigError(where + ": term freq must be a pair");
            term.freq = {t["freq"][0].get<double>(), t["freq"][1].get<double>()};
            term.phase = t.value("phase", 0.0);
            terms.push_back(std::move(term));
        }
        spec = CocycleSpec::exp_trig(dim, std::move(terms));
    } else if (kind == "locally_constant") {
        if (!j.contains("window") || !j.contains("table"))
            throw ConfigError(where + ": locally_constant needs 'window' and 'table'");
        int window = j["window"].get<int>();
        if (window < 1 || window > 12)
            throw ConfigError(where + ": window out of range [1,12]");
        std::map<std::string, Matrix> table;
        for (auto it = j["table"].begin(); it != j["table"].end(); ++it) {
            Matrix m = parse_matrix(it.value(), where + ".table." + it.key());
            if (m.rows() != dim || m.cols() != dim)
                throw ConfigError(where + ": table entry shape vs dim mismatch");
            table[it.key()] = std::move(m);
        }
        spec = CocycleSpec::locally_constant(dim, window, std::move(table));
    } else if (kind == "coboundary") {
        if (!j.contains("of")) throw ConfigError(where + ": coboundary needs 'of'");
        CocycleSpec inner = parse_cocycle(j["of"], where + ".of");
        if (inner.dim != dim) throw ConfigError(where + ": inner dim mismatch");
        spec = CocycleSpec::coboundary_of(std::move(inner));
    } else {
        throw ConfigError(where + ": unknown kind '" + kind + "'");
    }

    if (j.contains("alpha")) {
        double a = j["alpha"].get<double>();
        if (!(a > 0.0 && a <= 1.0))
            throw ConfigError(where + ": alpha must lie in (0,1]");
        spec.holder_alpha = a;
    }
    if (j.contains("c0")) {
        if (j["c0"].is_string()) {
            if (j["c0"].get<std::string>() != "auto")
                throw ConfigError(where + ": c0 must be a number or \"auto\"");
            spec.holder_const = 0.0;  // auto: estimated empirically downstream
        } else {
            spec.holder_const = j["c0"].get<double>();
        }
    }
    return spec;
}

} // namespace cfg

/// Fully validated experiment description: base system, cocycle or transfer
/// block, and command parameters with pinned defaults.  CLI flags override
/// the corresponding parameters after parsing.
struct ExperimentConfig {
    std::string raw_text;  // exact file contents, echoed into every report

    // base system
    bool is_torus = true;
    IMat2 torus_matrix;
    Eigen::MatrixXi adjacency;
    double metric_base = 0.5;

    std::optional<CocycleSpec> cocycle;
    std::optional<CocycleSpec> transfer_spec;

    // command parameters
    int period_max = 6;
    long orbit_len = 2000;
    double grid_eps = 1e-3;
    double eps = -1.0;    // Lyapunov-norm epsilon; <0 means tau*alpha/8 default
    double theta = -1.0;  // bunching theta; <0 means unset
    int block_n = 1;      // bunching block length N
    int k_max = 10;
    double tol_base = 1e-9;
    double holonomy_tol = 1e-10;
    long n_cap = 400;
    double patch_radius = 0.125;
    double eta = 0.0;
    bool has_seed = false;
    std::uint64_t seed = 0;
    Norm norm = Norm::Inf;

    ToralAutomorphism make_torus() const {
        if (!is_torus) throw ConfigError("config: base is not toral");
        return ToralAutomorphism(torus_matrix);
    }
    Sft make_sft() const {
        if (is_torus) throw ConfigError("config: base is not an SFT");
        return Sft(adjacency, metric_base);
    }
};

inline ExperimentConfig parse_config(const std::string& text) {
    cfg::json j;
    try {
        j = cfg::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    cfg::require_keys(j, {"base", "cocycle", "transfer", "params"}, "config");

    ExperimentConfig c;
    c.raw_text = text;

    if (!j.contains("base")) throw ConfigError("config: missing 'base' block");
    const auto& b = j["base"];
    cfg::require_keys(b, {"type", "matrix", "adjacency", "metric_base"}, "base");
    if (!b.contains("type") || !b["type"].is_string())
        throw ConfigError("base: missing string 'type'");
    std::string type = b["type"].get<std::string>();
    if (type == "toral") {
        if (!b.contains("matrix")) throw ConfigError("base: toral needs 'matrix'");
        Matrix m = cfg::parse_matrix(b["matrix"], "base.matrix");
        if (m.rows() != 2 || m.cols() != 2)
            throw ConfigError("base: toral matrix must be 2x2");
        for (int r = 0; r < 2; ++r)
            for (int cidx = 0; cidx < 2; ++cidx)
                if (m(r, cidx) != std::floor(m(r, cidx)))
                    throw ConfigError("base: toral matrix must be integral");
        c.is_torus = true;
        c.torus_matrix = {std::int64_t(m(0, 0)), std::int64_t(m(0, 1)),
                          std::int64_t(m(1, 0)), std::int64_t(m(1, 1))};
        ToralAutomorphism probe(c.torus_matrix);  // constructor validates
        (void)probe;
    } else if (type == "sft") {
        if (!b.contains("adjacency")) throw ConfigError("base: sft needs 'adjacency'");
        Matrix m = cfg::parse_matrix(b["adjacency"], "base.adjacency");
        if (m.rows() != m.cols()) throw ConfigError("base: adjacency must be square");
        c.is_torus = false;
        c.adjacency = Eigen::MatrixXi(m.rows(), m.cols());
        for (int r = 0; r < m.rows(); ++r)
            for (int cidx = 0; cidx < m.cols(); ++cidx) {
                double v = m(r, cidx);
                if (v != 0.0 && v != 1.0)
                    throw ConfigError("base: adjacency entries must be 0/1");
                c.adjacency(r, cidx) = int(v);
            }
        c.metric_base = b.value("metric_base", 0.5);
        Sft probe(c.adjacency, c.metric_base);  // constructor validates
        (void)probe;
    } else {
        throw ConfigError("base: unknown type '" + type + "'");
    }

    if (j.contains("cocycle"))
        c.cocycle = cfg::parse_cocycle(j["cocycle"], "cocycle");
    if (j.contains("transfer"))
        c.transfer_spec = cfg::parse_cocycle(j["transfer"], "transfer");

    if (j.contains("params")) {
        const auto& p = j["params"];
        cfg::require_keys(p,
                          {"period_max", "orbit_len", "grid_eps", "eps", "theta",
                           "N", "k_max", "tol_base", "holonomy_tol", "n_cap",
                           "patch_radius", "eta", "seed", "norm"},
                          "params");
        c.period_max = p.value("period_max", c.period_max);
        c.orbit_len = p.value("orbit_len", c.orbit_len);
        c.grid_eps = p.value("grid_eps", c.grid_eps);
        c.eps = p.value("eps", c.eps);
        c.theta = p.value("theta", c.theta);
        c.block_n = p.value("N", c.block_n);
        c.k_max = p.value("k_max", c.k_max);
        c.tol_base = p.value("tol_base", c.tol_base);
        c.holonomy_tol = p.value("holonomy_tol", c.holonomy_tol);
        c.n_cap = p.value("n_cap", c.n_cap);
        c.patch_radius = p.value("patch_radius", c.patch_radius);
        c.eta = p.value("eta", c.eta);
        if (p.contains("seed")) {
            c.has_seed = true;
            c.seed = p["seed"].get<std::uint64_t>();
        }
        if (p.contains("norm")) {
            std::string n = p["norm"].get<std::string>();
            if (n == "inf") c.norm = Norm::Inf;
            else if (n == "two") c.norm = Norm::Two;
            else throw ConfigError("params: norm must be 'inf' or 'two'");
        }
    }

    if (c.period_max < 1 || c.period_max > 24)
        throw ConfigError("params: period_max out of range [1,24]");
    if (c.orbit_len < 1) throw ConfigError("params: orbit_len must be positive");
    if (!(c.grid_eps > 0.0)) throw ConfigError("params: grid_eps must be positive");
    if (!(c.tol_base > 0.0)) throw ConfigError("params: tol_base must be positive");
    return c;
}

} // namespace livsic

#endif
