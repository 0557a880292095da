// livsic: command-line workflows for cocycle obstruction tests, Lyapunov
// data, holonomies, and numerical solution of A(x) = C(fx)C(x)^{-1}.
//
// Exit status: 0 = all verdicts pass, 1 = any fail, 2 = inconclusive only,
// 3 = usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "livsic/livsic.hpp"

namespace fs = std::filesystem;
using namespace livsic;

namespace {

constexpr const char* kArtifactVersion = "1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

// ---------------------------------------------------------------- verdicts

struct Outcome {
    int pass = 0, fail = 0, inconclusive = 0;
    void add(Verdict v) {
        if (v == Verdict::Pass) ++pass;
        else if (v == Verdict::Fail) ++fail;
        else ++inconclusive;
    }
    int exit_code() const {
        if (fail > 0) return 1;
        if (inconclusive > 0) return 2;
        return 0;
    }
    JValue json() const {
        return JValue::object()
            .set("pass", JValue::integer(pass))
            .set("fail", JValue::integer(fail))
            .set("inconclusive", JValue::integer(inconclusive));
    }
};

// ------------------------------------------------------- point utilities

std::string point_repr(const ToralAutomorphism&, const TorusPoint& p) {
    return p.key();
}

std::string point_repr(const Sft&, const SymbolicPoint& p) {
    return p.word(-8, 0) + "." + p.word(0, 9);
}

TorusPoint random_point(const ToralAutomorphism&, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double a = unif(rng), b = unif(rng);
    return TorusPoint::from_double(a, b);
}

std::vector<std::uint8_t> random_walk(const Sft& base, std::mt19937_64& rng,
                                      int len, int start = -1) {
    std::uniform_int_distribution<int> pick(0, base.alphabet_size() - 1);
    std::vector<std::uint8_t> w;
    int cur = start >= 0 ? start : pick(rng);
    w.push_back(std::uint8_t(cur));
    while (int(w.size()) < len) {
        std::vector<int> nxt;
        for (int s = 0; s < base.alphabet_size(); ++s)
            if (base.admissible(cur, s)) nxt.push_back(s);
        cur = nxt[std::size_t(pick(rng)) % nxt.size()];
        w.push_back(std::uint8_t(cur));
    }
    return w;
}

SymbolicPoint random_point(const Sft& base, std::mt19937_64& rng) {
    auto w = random_walk(base, rng, 32);
    auto conn = base.connector(w.back(), w.front(), base.mixing_time());
    w.insert(w.end(), conn.begin(), conn.end());
    return SymbolicPoint::periodic(w);
}

/// Periodic point agreeing with y on symbol indices [lo, hi], random
/// elsewhere; used to manufacture controlled leaf pairs.
SymbolicPoint randomized_agree(const Sft& base, std::mt19937_64& rng,
                               const SymbolicPoint& y, long lo, long hi) {
    std::uniform_int_distribution<int> pick(0, base.alphabet_size() - 1);
    std::vector<std::uint8_t> center;
    for (long i = lo; i <= hi; ++i) center.push_back(std::uint8_t(y.at(i)));
    // Random admissible extension to the left of the center.
    std::vector<std::uint8_t> left;
    int cur = center.front();
    for (int k = 0; k < 16; ++k) {
        std::vector<int> prev;
        for (int s = 0; s < base.alphabet_size(); ++s)
            if (base.admissible(s, cur)) prev.push_back(s);
        cur = prev[std::size_t(pick(rng)) % prev.size()];
        left.insert(left.begin(), std::uint8_t(cur));
    }
    // Random admissible extension to the right, then close up.
    std::vector<std::uint8_t> word = left;
    word.insert(word.end(), center.begin(), center.end());
    auto right = random_walk(base, rng, 17, word.back());
    word.insert(word.end(), right.begin() + 1, right.end());
    auto conn = base.connector(word.back(), word.front(), base.mixing_time());
    word.insert(word.end(), conn.begin(), conn.end());
    SymbolicPoint q = SymbolicPoint::periodic(word);
    q.origin = long(left.size()) - lo;  // q.at(lo) = center[0]
    return q;
}

std::pair<TorusPoint, TorusPoint> leaf_pair(const ToralAutomorphism& base,
                                            std::mt19937_64& rng, Side side) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    TorusPoint y = random_point(base, rng);
    double t = std::pow(10.0, -4.0 + 3.3 * unif(rng)) *
               (unif(rng) < 0.5 ? -1.0 : 1.0);  // |t| in [1e-4, 0.2), signed
    const Eigen::Vector2d& dir =
        side == Side::Stable ? base.stable_dir() : base.unstable_dir();
    TorusPoint z = TorusPoint::from_double(y.c[0] + t * dir(0), y.c[1] + t * dir(1));
    return {y, z};
}

std::pair<SymbolicPoint, SymbolicPoint> leaf_pair(const Sft& base,
                                                  std::mt19937_64& rng, Side side) {
    std::uniform_int_distribution<int> depth(0, 10);
    for (int attempt = 0; attempt < 64; ++attempt) {
        SymbolicPoint y = random_point(base, rng);
        long m = depth(rng);
        SymbolicPoint q = side == Side::Stable
                              ? randomized_agree(base, rng, y, -m, 0)
                              : randomized_agree(base, rng, y, 0, m);
        SymbolicPoint z =
            side == Side::Stable ? base.bracket(y, q) : base.bracket(q, y);
        if (base.distance(y, z) > 0.0) return {y, z};
    }
    throw Error("leaf_pair: could not generate a distinct pair");
}

template <class Base>
std::vector<typename Base::Point> sample_points(const Base& base,
                                                std::mt19937_64& rng, int n) {
    std::vector<typename Base::Point> out;
    out.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) out.push_back(random_point(base, rng));
    return out;
}

template <class Base>
double r_bound_of(const CocycleSpec& spec, const Base& base, std::mt19937_64& rng,
                  Norm norm) {
    auto pts = sample_points(base, rng, 256);
    double r = generator_norm_bound(spec, base, pts, norm);
    return std::max(r, 1.0);
}

// -------------------------------------------------- spec re-serialization

JValue matrix_json(const Matrix& m) {
    JValue rows = JValue::array();
    for (int r = 0; r < m.rows(); ++r) {
        JValue row = JValue::array();
        for (int c = 0; c < m.cols(); ++c) row.push(JValue::real(m(r, c)));
        rows.push(std::move(row));
    }
    return rows;
}

JValue spec_json(const CocycleSpec& s) {
    JValue j = JValue::object();
    j.set("dim", JValue::integer(s.dim));
    switch (s.kind) {
        case CocycleSpec::Kind::Constant:
            j.set("kind", JValue::str("constant"));
            j.set("matrix", matrix_json(s.constant_op));
            break;
        case CocycleSpec::Kind::ExpTrig: {
            j.set("kind", JValue::str("exp_trig"));
            JValue terms = JValue::array();
            for (const auto& t : s.terms) {
                terms.push(JValue::object()
                               .set("coef", matrix_json(t.coef))
                               .set("freq", JValue::array()
                                                .push(JValue::real(t.freq(0)))
                                                .push(JValue::real(t.freq(1))))
                               .set("phase", JValue::real(t.phase)));
            }
            j.set("terms", std::move(terms));
            break;
        }
        case CocycleSpec::Kind::LocallyConstant: {
            j.set("kind", JValue::str("locally_constant"));
            j.set("window", JValue::integer(s.window));
            JValue table = JValue::object();
            for (const auto& [w, m] : s.table) table.set(w, matrix_json(m));
            j.set("table", std::move(table));
            break;
        }
        case CocycleSpec::Kind::Coboundary:
            j.set("kind", JValue::str("coboundary"));
            j.set("of", spec_json(*s.transfer));
            break;
    }
    j.set("alpha", JValue::real(s.holder_alpha));
    if (s.holder_const > 0.0) j.set("c0", JValue::real(s.holder_const));
    else j.set("c0", JValue::str("auto"));
    return j;
}

JValue base_json(const ExperimentConfig& cfg) {
    JValue b = JValue::object();
    if (cfg.is_torus) {
        b.set("type", JValue::str("toral"));
        b.set("matrix",
              JValue::array()
                  .push(JValue::array()
                            .push(JValue::integer(cfg.torus_matrix.a))
                            .push(JValue::integer(cfg.torus_matrix.b)))
                  .push(JValue::array()
                            .push(JValue::integer(cfg.torus_matrix.c))
                            .push(JValue::integer(cfg.torus_matrix.d))));
    } else {
        b.set("type", JValue::str("sft"));
        JValue rows = JValue::array();
        for (int r = 0; r < cfg.adjacency.rows(); ++r) {
            JValue row = JValue::array();
            for (int c = 0; c < cfg.adjacency.cols(); ++c)
                row.push(JValue::integer(cfg.adjacency(r, c)));
            rows.push(std::move(row));
        }
        b.set("adjacency", std::move(rows));
        b.set("metric_base", JValue::real(cfg.metric_base));
    }
    return b;
}

JValue params_json(const ExperimentConfig& cfg) {
    JValue p = JValue::object();
    p.set("period_max", JValue::integer(cfg.period_max));
    p.set("orbit_len", JValue::integer(cfg.orbit_len));
    p.set("grid_eps", JValue::real(cfg.grid_eps));
    p.set("eps", JValue::real(cfg.eps));
    p.set("theta", JValue::real(cfg.theta));
    p.set("N", JValue::integer(cfg.block_n));
    p.set("k_max", JValue::integer(cfg.k_max));
    p.set("tol_base", JValue::real(cfg.tol_base));
    p.set("holonomy_tol", JValue::real(cfg.holonomy_tol));
    p.set("n_cap", JValue::integer(cfg.n_cap));
    p.set("patch_radius", JValue::real(cfg.patch_radius));
    p.set("eta", JValue::real(cfg.eta));
    if (cfg.has_seed) p.set("seed", JValue::integer((long long)cfg.seed));
    p.set("norm", JValue::str(norm_name(cfg.norm)));
    return p;
}

// ----------------------------------------------------------------- runner

template <class Base>
struct Runner {
    const ExperimentConfig& cfg;
    Base base;
    fs::path out;
    int workers;
    CocycleSpec cocycle;  // resolved generator (perturbation applied)

    Runner(const ExperimentConfig& c, Base b, fs::path o, int w)
        : cfg(c), base(std::move(b)), out(std::move(o)), workers(w),
          cocycle(CocycleSpec::constant(Matrix::Identity(1, 1))) {}

    std::mt19937_64 seeded_rng(std::uint64_t salt) const {
        if (!cfg.has_seed)
            throw ConfigError("this command requires a seed (params.seed or --seed)");
        return std::mt19937_64(cfg.seed ^ salt);
    }

    void resolve_cocycle() {
        if (!cfg.cocycle) throw ConfigError("this command requires a 'cocycle' block");
        cocycle = *cfg.cocycle;
        if (cfg.eta > 0.0) {
            if (!cfg.has_seed) throw ConfigError("eta > 0 requires a seed");
            cocycle = make_perturbed(cocycle, base, cfg.eta, cfg.seed);
        }
    }

    void write_report(const std::string& command, const JValue& results,
                      const Outcome& outcome,
                      const std::vector<CsvTable>& tables) const {
        fs::create_directories(out);
        JValue rep = JValue::object();
        rep.set("artifact_version", JValue::str(kArtifactVersion));
        rep.set("command", JValue::str(command));
        rep.set("config", JValue::str(cfg.raw_text));
        rep.set("base", base_json(cfg));
        rep.set("params", params_json(cfg));
        rep.set("results", results);
        rep.set("verdicts", outcome.json());
        write_file(out / "report.json", rep.dump() + "\n");
        for (const auto& t : tables) write_file(out / (t.name + ".csv"), t.dump());
    }

    // ---- synth: manufacture a coboundary spec from the transfer block ----
    int cmd_synth() {
        if (!cfg.transfer_spec)
            throw ConfigError("synth requires a 'transfer' block");
        auto rng = seeded_rng(0x5e1f);
        auto pts = sample_points(base, rng, 256);
        SynthesizedCocycle syn =
            make_coboundary(*cfg.transfer_spec, base, pts, cfg.norm);

        JValue spec_file = JValue::object();
        spec_file.set("base", base_json(cfg));
        spec_file.set("cocycle", spec_json(syn.cocycle));
        spec_file.set("params", params_json(cfg));
        write_file(out.empty() ? "synth_spec.json" : out / "synth_spec.json",
                   spec_file.dump() + "\n");

        Outcome oc;
        oc.add(Verdict::Pass);
        JValue results = JValue::object();
        results.set("transfer_bound", JValue::real(syn.transfer_bound));
        results.set("spec_file", JValue::str("synth_spec.json"));
        write_report("synth", results, oc, {});
        return oc.exit_code();
    }

    // ---- obstruct: periodic identity battery ----
    int cmd_obstruct() {
        resolve_cocycle();
        auto rng = seeded_rng(0x0b57);
        double r_bound = r_bound_of(cocycle, base, rng, cfg.norm);

        std::vector<PeriodicOrbit<typename Base::Point>> orbits;
        for (int n = 1; n <= cfg.period_max; ++n)
            for (auto& orb : base.enumerate_periodic(n, cfg.period_max))
                orbits.push_back(std::move(orb));

        std::vector<ObstructionReport> reports(orbits.size());
        auto work = [&](int worker) {
            for (std::size_t i = std::size_t(worker); i < orbits.size();
                 i += std::size_t(workers))
                reports[i] = obstruction_single(cocycle, base, orbits[i],
                                                cfg.tol_base, r_bound, cfg.norm);
        };
        if (workers <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }

        Outcome oc;
        CsvTable tab;
        tab.name = "obstruction";
        tab.header = {"period", "orbit_key", "deviation", "tolerance",
                      "verdict", "log_norm", "log_inv_norm"};
        for (const auto& r : reports) {
            oc.add(r.verdict);
            tab.rows.push_back({fmt_int(r.period), r.key, fmt_real_csv(r.deviation),
                                fmt_real_csv(r.tolerance), verdict_name(r.verdict),
                                fmt_real_csv(r.log_norm), fmt_real_csv(r.log_inv_norm)});
        }
        JValue results = JValue::object();
        results.set("orbits_checked", JValue::integer((long long)reports.size()));
        results.set("r_bound", JValue::real(r_bound));
        double worst = 0.0;
        for (const auto& r : reports)
            worst = std::max(worst, r.deviation / std::max(r.tolerance, 1e-300));
        results.set("worst_deviation_ratio", JValue::real(worst));
        write_report("obstruct", results, oc, {tab});
        return oc.exit_code();
    }

    // ---- exponents: orbit Lyapunov estimates vs periodic data ----
    int cmd_exponents() {
        resolve_cocycle();
        auto rng = seeded_rng(0xe4b0);
        auto x0 = random_point(base, rng);
        ExponentEstimate est =
            lyapunov_exponents(cocycle, base, x0, cfg.orbit_len, cfg.norm);
        PeriodicExponents pe =
            periodic_exponents(cocycle, base, cfg.period_max, cfg.norm);
        double gap = std::abs(pe.sup_plus - est.lambda_plus);

        Outcome oc;
        oc.add(gap <= 0.05 ? Verdict::Pass : Verdict::Fail);

        CsvTable tab;
        tab.name = "periodic_exponents";
        tab.header = {"period", "orbit_key", "lambda_plus", "lambda_minus"};
        for (const auto& row : pe.table)
            tab.rows.push_back({fmt_int(row.period), row.key,
                                fmt_real_csv(row.lambda_plus),
                                fmt_real_csv(row.lambda_minus)});

        JValue results = JValue::object();
        results.set("start", JValue::str(point_repr(base, x0)));
        results.set("lambda_plus", JValue::real(est.lambda_plus));
        results.set("lambda_minus", JValue::real(est.lambda_minus));
        JValue cps = JValue::array();
        for (const auto& cp : est.checkpoints)
            cps.push(JValue::array()
                         .push(JValue::real(cp[0]))
                         .push(JValue::real(cp[1]))
                         .push(JValue::real(cp[2])));
        results.set("checkpoints", std::move(cps));
        results.set("periodic_sup_plus", JValue::real(pe.sup_plus));
        results.set("periodic_inf_minus", JValue::real(pe.inf_minus));
        results.set("kalinin_gap", JValue::real(gap));
        write_report("exponents", results, oc, {tab});
        return oc.exit_code();
    }

    // ---- bunching: D(N, theta) membership ----
    int cmd_bunching() {
        resolve_cocycle();
        if (!(cfg.theta > 0.0))
            throw ConfigError("bunching requires params.theta > 0");
        auto rng = seeded_rng(0xb4c1);
        auto x0 = random_point(base, rng);
        BunchingResult res = bunching_membership(cocycle, base, x0, cfg.block_n,
                                                 cfg.theta, cfg.k_max, cfg.norm);
        Outcome oc;
        oc.add(res.pass ? Verdict::Pass : Verdict::Fail);
        JValue results = JValue::object();
        results.set("start", JValue::str(point_repr(base, x0)));
        results.set("pass", JValue::boolean(res.pass));
        results.set("worst_margin", JValue::real(res.worst_margin));
        write_report("bunching", results, oc, {});
        return oc.exit_code();
    }

    // ---- goodtimes: near-additivity time set ----
    int cmd_goodtimes() {
        resolve_cocycle();
        auto rng = seeded_rng(0x60d7);
        auto x0 = random_point(base, rng);
        int n_max = int(std::min<long>(cfg.orbit_len, 2000));
        ExponentEstimate est =
            lyapunov_exponents(cocycle, base, x0, std::max(100, n_max), cfg.norm);
        GoodTimes gt = good_times(cocycle, base, x0, n_max, est.lambda_plus,
                                  [](int i) { return 0.5 / std::sqrt(double(i)); },
                                  cfg.norm);
        CsvTable tab;
        tab.name = "good_times";
        tab.header = {"n", "member"};
        for (std::size_t n = 0; n < gt.member.size(); ++n)
            tab.rows.push_back({fmt_int((long long)n), fmt_int(gt.member[n] ? 1 : 0)});
        Outcome oc;
        JValue results = JValue::object();
        results.set("start", JValue::str(point_repr(base, x0)));
        results.set("n_max", JValue::integer(n_max));
        results.set("lambda_est", JValue::real(est.lambda_plus));
        results.set("density", JValue::real(gt.density));
        write_report("goodtimes", results, oc, {tab});
        return oc.exit_code();
    }

    // ---- holonomy: batch stable/unstable holonomies on leaf pairs ----
    int cmd_holonomy() {
        resolve_cocycle();
        auto rng = seeded_rng(0x401a);
        Outcome oc;
        CsvTable tab;
        tab.name = "holonomy";
        tab.header = {"y", "z", "side", "iterations", "cauchy_gap",
                      "norm_H_minus_Id", "certified"};
        double max_truth_dev = 0.0;
        bool have_truth = cocycle.kind == CocycleSpec::Kind::Coboundary;
        for (Side side : {Side::Stable, Side::Unstable}) {
            for (int i = 0; i < 50; ++i) {
                auto [y, z] = leaf_pair(base, rng, side);
                HolonomyResult h = holonomy(cocycle, base, y, z, side,
                                            cfg.holonomy_tol, cfg.n_cap, cfg.norm);
                double hdev = operator_norm(
                    h.value.forward() - Matrix::Identity(cocycle.dim, cocycle.dim),
                    cfg.norm);
                tab.rows.push_back({point_repr(base, y), point_repr(base, z),
                                    side_name(side), fmt_int(h.iterations_used),
                                    fmt_real_csv(h.cauchy_gap), fmt_real_csv(hdev),
                                    h.certified ? "1" : "0"});
                oc.add(h.certified ? Verdict::Pass : Verdict::Inconclusive);
                if (have_truth && h.certified) {
                    // Lemma-style identity H_{y,z} = C(z) C(y)^{-1}.
                    InvertibleOp cy = eval_map(*cocycle.transfer, base, y);
                    InvertibleOp cz = eval_map(*cocycle.transfer, base, z);
                    double dev = op_metric(h.value, cz * cy.inverted(), cfg.norm);
                    max_truth_dev = std::max(max_truth_dev, dev);
                    oc.add(dev <= 10.0 * cfg.holonomy_tol ? Verdict::Pass
                                                          : Verdict::Fail);
                }
            }
        }
        // Chain defect on a few triples per side, all on one local leaf.
        double max_chain = 0.0;
        for (Side side : {Side::Stable, Side::Unstable}) {
            for (int i = 0; i < 10; ++i) {
                typename Base::Point x = random_point(base, rng);
                typename Base::Point y = x, z = x;
                if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
                    std::uniform_real_distribution<double> unif(0.0, 1.0);
                    const Eigen::Vector2d& dir = side == Side::Stable
                                                     ? base.stable_dir()
                                                     : base.unstable_dir();
                    double t1 = 0.001 + 0.08 * unif(rng);
                    double t2 = -(0.001 + 0.08 * unif(rng));
                    y = TorusPoint::from_double(x.c[0] + t1 * dir(0),
                                                x.c[1] + t1 * dir(1));
                    z = TorusPoint::from_double(x.c[0] + t2 * dir(0),
                                                x.c[1] + t2 * dir(1));
                } else {
                    auto vary = [&](long m) {
                        return side == Side::Stable
                                   ? base.bracket(x, randomized_agree(base, rng, x,
                                                                      -m, 0))
                                   : base.bracket(randomized_agree(base, rng, x, 0,
                                                                   m),
                                                  x);
                    };
                    y = vary(2);
                    z = vary(5);
                }
                double defect = holonomy_chain_check(cocycle, base, x, y, z, side,
                                                     cfg.holonomy_tol, cfg.n_cap,
                                                     cfg.norm);
                max_chain = std::max(max_chain, defect);
                oc.add(defect <= 10.0 * cfg.holonomy_tol ? Verdict::Pass
                                                         : Verdict::Fail);
            }
        }
        JValue results = JValue::object();
        results.set("pairs_per_side", JValue::integer(50));
        results.set("max_chain_defect", JValue::real(max_chain));
        if (have_truth)
            results.set("max_coboundary_deviation", JValue::real(max_truth_dev));
        write_report("holonomy", results, oc, {tab});
        return oc.exit_code();
    }

    // ---- solve: orbit propagation + serialization ----
    int cmd_solve() {
        resolve_cocycle();
        auto rng = seeded_rng(0x501e);
        double r_bound = r_bound_of(cocycle, base, rng, cfg.norm);

        PropagationOptions opt;
        opt.orbit_len = cfg.orbit_len;
        opt.grid_eps = cfg.grid_eps;
        opt.period_max = cfg.period_max;
        opt.tol_base = cfg.tol_base;
        opt.patch_radius = cfg.patch_radius;
        opt.norm = cfg.norm;

        typename Base::Point z0 = pick_solve_start(rng, opt);

        Outcome oc;
        JValue results = JValue::object();
        results.set("anchor", JValue::str(point_repr(base, z0)));
        try {
            SolveResult<Base> sol = solve_orbit_propagation(cocycle, base, z0,
                                                            r_bound, opt);
            oc.add(sol.max_on_orbit_residual <= 1e-8 ? Verdict::Pass
                                                     : Verdict::Fail);
            results.set("samples", JValue::integer(sol.transfer.size()));
            results.set("coverage_radius",
                        JValue::real(sol.transfer.coverage_radius));
            results.set("max_on_orbit_residual",
                        JValue::real(sol.max_on_orbit_residual));
            write_file(out / "transfer_map.json",
                       transfer_map_json(sol.transfer).dump() + "\n");
        } catch (const ObstructionFailed& e) {
            oc.add(Verdict::Fail);
            results.set("error", JValue::str(e.what()));
        } catch (const OrbitNotDense& e) {
            oc.add(Verdict::Fail);
            results.set("error", JValue::str(e.what()));
        }
        fs::create_directories(out);
        write_report("solve", results, oc, {});
        return oc.exit_code();
    }

    typename Base::Point pick_solve_start(std::mt19937_64& rng,
                                          PropagationOptions& opt) {
        if constexpr (std::is_same_v<Base, ToralAutomorphism>) {
            (void)opt;
            return random_point(base, rng);
        } else {
            int k = 1;
            while (std::pow(base.metric_base(), double(k)) > opt.grid_eps && k < 64)
                ++k;
            SymbolicPoint cp = base.cover_point(2 * k + 1);
            opt.orbit_len = std::max<long>(opt.orbit_len,
                                           long(cp.right_period.size()) + 1);
            return cp;
        }
    }

    JValue transfer_map_json(const TransferMap<Base>& map) const {
        JValue j = JValue::object();
        j.set("method", JValue::str(map.method));
        j.set("anchor", JValue::integer(map.anchor));
        j.set("coverage_radius", JValue::real(map.coverage_radius));
        j.set("norm", JValue::str(norm_name(cfg.norm)));
        JValue samples = JValue::array();
        for (const auto& s : map.samples) {
            JValue entry = JValue::object();
            entry.set("point", JValue::str(point_repr(base, s.point)));
            entry.set("matrix", matrix_json(s.op.forward()));
            entry.set("log_scale", JValue::real(0.0));
            samples.push(std::move(entry));
        }
        j.set("samples", std::move(samples));
        return j;
    }

    // ---- verify: declared transfer against the cocycle equation ----
    int cmd_verify() {
        resolve_cocycle();
        if (!cfg.transfer_spec)
            throw ConfigError("verify requires a 'transfer' block");
        auto rng = seeded_rng(0xf41e);
        auto pts = sample_points(base, rng, 200);
        double b = generator_norm_bound(*cfg.transfer_spec, base, pts, cfg.norm);
        double tol = 10.0 * cfg.tol_base * b * b;
        double max_dev = 0.0;
        Outcome oc;
        for (const auto& x : pts) {
            InvertibleOp cx = eval_map(*cfg.transfer_spec, base, x);
            InvertibleOp cfx =
                eval_map(*cfg.transfer_spec, base, base.iterate(x, 1));
            double dev = op_metric(cfx * cx.inverted(),
                                   eval_generator(cocycle, base, x), cfg.norm);
            max_dev = std::max(max_dev, dev);
            oc.add(dev <= tol ? Verdict::Pass
                   : dev <= 10.0 * tol ? Verdict::Inconclusive : Verdict::Fail);
        }
        JValue results = JValue::object();
        results.set("points", JValue::integer((long long)pts.size()));
        results.set("transfer_bound", JValue::real(b));
        results.set("tolerance", JValue::real(tol));
        results.set("max_deviation", JValue::real(max_dev));
        write_report("verify", results, oc, {});
        return oc.exit_code();
    }

    // ---- compare: the two solvers against each other ----
    int cmd_compare() {
        resolve_cocycle();
        auto rng = seeded_rng(0xc09a);
        double r_bound = r_bound_of(cocycle, base, rng, cfg.norm);

        PropagationOptions opt;
        opt.orbit_len = cfg.orbit_len;
        opt.grid_eps = cfg.grid_eps;
        opt.period_max = cfg.period_max;
        opt.tol_base = cfg.tol_base;
        opt.patch_radius = cfg.patch_radius;
        opt.norm = cfg.norm;
        typename Base::Point z0 = pick_solve_start(rng, opt);
        SolveResult<Base> sol = solve_orbit_propagation(cocycle, base, z0,
                                                        r_bound, opt);
        const TransferMap<Base>& map1 = sol.transfer;

        // Holonomy-extension targets: map1 sample points near the anchor.
        std::vector<typename Base::Point> targets;
        double reach = base.product_structure_radius() / 2.0;
        std::uniform_int_distribution<int> pick(0, map1.size() - 1);
        for (int i = 0; i < 400 && int(targets.size()) < 200; ++i) {
            const auto& p = map1.samples[std::size_t(pick(rng))].point;
            if (base.distance(z0, p) < reach) targets.push_back(p);
        }
        HolonomyExtensionResult<Base> ext = solve_holonomy_extension(
            cocycle, base, z0, targets, cfg.holonomy_tol, cfg.n_cap, cfg.norm);

        std::vector<typename Base::Point> probes;
        for (const auto& s : ext.transfer.samples) probes.push_back(s.point);
        TransferComparison cmp =
            compare_up_to_constant(base, map1, ext.transfer, probes, cfg.norm);

        // Combined budget: nearest-sample interpolation at the map's own
        // measured regularity, plus the holonomy certification tolerance.
        double budget = 1e-6 + 100.0 * cfg.holonomy_tol;
        try {
            LogLogFit fit = holder_exponent_estimate(base, map1, cfg.seed, 400,
                                                     cfg.norm);
            if (!fit.exact_zero)
                budget += std::exp(fit.intercept) *
                          std::pow(2.0 * map1.coverage_radius, fit.slope);
        } catch (const InsufficientSpread&) {}

        Outcome oc;
        oc.add(cmp.max_deviation <= budget ? Verdict::Pass : Verdict::Fail);
        JValue results = JValue::object();
        results.set("anchor", JValue::str(point_repr(base, z0)));
        results.set("samples_propagation", JValue::integer(map1.size()));
        results.set("samples_extension", JValue::integer(ext.transfer.size()));
        results.set("targets_skipped", JValue::integer(ext.skipped));
        results.set("max_deviation", JValue::real(cmp.max_deviation));
        results.set("budget", JValue::real(budget));
        results.set("conjugator", matrix_json(cmp.conjugator));
        write_report("compare", results, oc, {});
        return oc.exit_code();
    }

    int run(const std::string& command) {
        fs::create_directories(out);
        if (command == "synth") return cmd_synth();
        if (command == "obstruct") return cmd_obstruct();
        if (command == "exponents") return cmd_exponents();
        if (command == "bunching") return cmd_bunching();
        if (command == "goodtimes") return cmd_goodtimes();
        if (command == "holonomy") return cmd_holonomy();
        if (command == "solve") return cmd_solve();
        if (command == "verify") return cmd_verify();
        if (command == "compare") return cmd_compare();
        throw ConfigError("unknown command: " + command);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"livsic: executable checks for cocycle cohomology over "
                 "hyperbolic systems"};
    std::string command, spec_path, out_dir;
    long seed = -1;
    int period_max = -1;
    long orbit_len = -1;
    double grid_eps = -1.0, tol = -1.0;
    std::string norm_flag;
    int workers = 1;

    app.add_option("command", command,
                   "synth|obstruct|exponents|bunching|goodtimes|holonomy|solve|"
                   "verify|compare")
        ->required();
    app.add_option("--spec", spec_path, "experiment spec file (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", seed, "RNG seed (overrides params.seed)");
    app.add_option("--period-max", period_max, "periodic enumeration budget");
    app.add_option("--orbit-len", orbit_len, "orbit length");
    app.add_option("--grid-eps", grid_eps, "density / probe grid resolution");
    app.add_option("--tol", tol, "base tolerance");
    app.add_option("--norm", norm_flag, "operator norm: inf|two");
    app.add_option("--workers", workers, "worker threads for batch stages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 3;
    }

    try {
        ExperimentConfig cfg = parse_config(read_file(spec_path));
        if (seed >= 0) { cfg.has_seed = true; cfg.seed = std::uint64_t(seed); }
        if (period_max > 0) cfg.period_max = period_max;
        if (orbit_len > 0) cfg.orbit_len = orbit_len;
        if (grid_eps > 0) cfg.grid_eps = grid_eps;
        if (tol > 0) cfg.tol_base = tol;
        if (!norm_flag.empty()) {
            if (norm_flag == "inf") cfg.norm = Norm::Inf;
            else if (norm_flag == "two") cfg.norm = Norm::Two;
            else throw ConfigError("--norm must be inf or two");
        }
        if (workers < 1) throw ConfigError("--workers must be >= 1");

        if (cfg.is_torus) {
            Runner<ToralAutomorphism> r(cfg, cfg.make_torus(), out_dir, workers);
            return r.run(command);
        }
        Runner<Sft> r(cfg, cfg.make_sft(), out_dir, workers);
        return r.run(command);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
