// lipgeo: computational Lipschitz analysis on finite metric measure spaces.
//
// Subcommands mirror the library modules: space validate|generate, net build,
// poset chains|antichains, approx run, alberti build|validate|derive|algebra,
// lip profile|liplip, porosity scan|saturate, gap detect, zahorski
// build|report. Every run writes a JSON report (and CSV tables where they
// help plotting) into --out. Reports embed the tool version, the config echo
// and all tolerances, so certificates are self-describing; identical configs
// and seeds produce byte-identical files.
//
// Exit codes: 0 success, 1 a validation/certificate failure (report still
// written where possible), 2 bad input, 3 internal invariant breach.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipgeo/alberti.hpp"
#include "lipgeo/approx.hpp"
#include "lipgeo/fragment.hpp"
#include "lipgeo/io.hpp"
#include "lipgeo/kernels.hpp"
#include "lipgeo/lipscape.hpp"
#include "lipgeo/poset.hpp"
#include "lipgeo/space.hpp"
#include "lipgeo/zahorski.hpp"

namespace {

using lipgeo::Index;
using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string out_dir;
    double tol = lipgeo::kDefaultTol;
    std::uint64_t seed = 1;
    std::string kernel = "auto";
    unsigned workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
    const char* env_out = std::getenv("LIPGEO_OUT");
    c.out_dir = env_out ? env_out : "lipgeo-out";
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--tol", c.tol, "geometric tolerance");
    cmd->add_option("--seed", c.seed, "seed for any randomized path");
    cmd->add_option("--kernel", c.kernel, "kernel backend: auto|scalar|avx2");
    cmd->add_option("--workers", c.workers,
                    "worker threads for pair scans (results are independent)");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_report(const Common& c, const std::string& name, ojson body,
                  const ojson& config) {
    std::filesystem::create_directories(c.out_dir);
    ojson rep;
    rep["tool"] = {{"name", "lipgeo"}, {"version", kVersion}};
    rep["config"] = config;
    rep["tolerances"] = {{"tol", c.tol}};
    rep["seed"] = c.seed;
    rep["report"] = std::move(body);
    lipgeo::io::write_text(c.out_dir + "/" + name, rep.dump(2) + "\n");
}

void write_csv(const Common& c, const std::string& name,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::filesystem::create_directories(c.out_dir);
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i)
        body += (i ? "," : "") + header[i];
    body += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            body += (i ? "," : "") + row[i];
        body += "\n";
    }
    lipgeo::io::write_text(c.out_dir + "/" + name, body);
}

lipgeo::FiniteMetricSpace load_space(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return lipgeo::io::read_space_csv(path);
    return lipgeo::io::read_space_json(path);
}

std::vector<Index> load_ids(const std::string& path,
                            const lipgeo::FiniteMetricSpace& space) {
    std::ifstream in(path);
    if (!in) throw lipgeo::InputError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    const auto& arr = j.is_array() ? j : j.at("ids");
    std::vector<Index> out;
    for (const auto& v : arr) out.push_back(space.index_of(v.get<std::string>()));
    return out;
}

std::vector<double> parse_list(const std::string& spec) {
    // "top:count" expands to a dyadic grid; otherwise a comma list of values.
    std::vector<double> vals;
    if (spec.find(':') != std::string::npos) {
        const double top = std::stod(spec.substr(0, spec.find(':')));
        const int count = std::stoi(spec.substr(spec.find(':') + 1));
        for (int j = 0; j < count; ++j) vals.push_back(top * std::ldexp(1.0, -j));
    } else {
        std::string s = spec;
        std::size_t pos;
        while ((pos = s.find(',')) != std::string::npos) {
            vals.push_back(std::stod(s.substr(0, pos)));
            s.erase(0, pos + 1);
        }
        if (!s.empty()) vals.push_back(std::stod(s));
    }
    if (vals.empty()) throw lipgeo::InputError("empty numeric list");
    return vals;
}

// --- subcommand bodies -----------------------------------------------------

int run_space_generate(const Common& c, const std::string& kind, std::size_t n,
                       std::size_t dim, std::size_t level, long ambient_level) {
    ojson cfg{{"cmd", "space generate"}, {"kind", kind}};
    if (kind == "grid") {
        cfg["side"] = n;
        cfg["dim"] = dim;
        auto g = lipgeo::make_grid(n, dim);
        lipgeo::io::write_space_json(c.out_dir + "/space.json", g);
        write_report(c, "space_generate.json",
                     {{"points", g.size()}, {"total_mass", g.total_mass()}}, cfg);
    } else if (kind == "segment") {
        cfg["n"] = n;
        auto g = lipgeo::make_segment(n);
        lipgeo::io::write_space_json(c.out_dir + "/space.json", g);
        write_report(c, "space_generate.json",
                     {{"points", g.size()}, {"total_mass", g.total_mass()}}, cfg);
    } else if (kind == "cantor") {
        cfg["level"] = level;
        if (ambient_level >= 0) {
            cfg["ambient_level"] = ambient_level;
            auto amb = lipgeo::make_cantor_in_grid(level, std::size_t(ambient_level));
            lipgeo::io::write_space_json(c.out_dir + "/space.json", amb.space);
            ojson ids = ojson::array();
            for (Index i : amb.cantor_points) ids.push_back(amb.space.id(i));
            std::filesystem::create_directories(c.out_dir);
            lipgeo::io::write_text(c.out_dir + "/subset.json",
                                   ojson{{"ids", ids}}.dump(2) + "\n");
            write_report(c, "space_generate.json",
                         {{"points", amb.space.size()},
                          {"subset_points", amb.cantor_points.size()}},
                         cfg);
        } else {
            auto g = lipgeo::make_cantor(level);
            lipgeo::io::write_space_json(c.out_dir + "/space.json", g);
            write_report(c, "space_generate.json",
                         {{"points", g.size()}, {"total_mass", g.total_mass()}}, cfg);
        }
    } else {
        throw lipgeo::InputError("unknown generator kind '" + kind + "'");
    }
    return 0;
}

int run_space_validate(const Common& c, const std::string& in, bool matrix_csv) {
    ojson cfg{{"cmd", "space validate"}, {"in", in}};
    lipgeo::FiniteMetricSpace space;
    try {
        if (matrix_csv)
            space = lipgeo::io::read_space_csv(in, true);
        else
            space = load_space(in);
    } catch (const lipgeo::InputError& e) {
        const std::string what = e.what();
        // Unreadable or malformed files are bad input (exit 2); invariant
        // violations in well-formed data are validation failures (exit 1)
        // and still produce a report naming the offence.
        if (what.find("cannot open") != std::string::npos ||
            what.find("bad JSON") != std::string::npos ||
            what.find("expected header") != std::string::npos ||
            what.find("bad number") != std::string::npos ||
            what.find("not square") != std::string::npos)
            throw;
        write_report(c, "space_validate.json",
                     {{"valid", false}, {"error", what}}, cfg);
        std::fprintf(stderr, "validation failure: %s\n", what.c_str());
        return 1;
    }
    write_report(c, "space_validate.json",
                 {{"points", space.size()},
                  {"total_mass", space.total_mass()},
                  {"diameter", space.diameter()},
                  {"valid", true}},
                 cfg);
    return 0;
}

int run_net_build(const Common& c, const std::string& in, double eps) {
    ojson cfg{{"cmd", "net build"}, {"space", in}, {"net_eps", eps}};
    auto space = load_space(in);
    auto net = lipgeo::build_net(space, eps);
    ojson members = ojson::array();
    for (Index m : net.members) members.push_back(space.id(m));
    write_report(c, "net.json",
                 {{"separation", eps},
                  {"size", net.members.size()},
                  {"members", members}},
                 cfg);
    return 0;
}

std::vector<lipgeo::ChainNode> load_nodes(const std::string& path,
                                          const lipgeo::FiniteMetricSpace& space) {
    std::ifstream in(path);
    if (!in) throw lipgeo::InputError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    std::vector<lipgeo::ChainNode> nodes;
    for (const auto& nj : j.is_array() ? j : j.at("nodes")) {
        lipgeo::ChainNode nd;
        const auto& z = nj.at("z");
        nd.base =
            z.is_string() ? space.index_of(z.get<std::string>()) : z.get<Index>();
        nd.t = nj.at("t").get<double>();
        if (nj.contains("v")) nd.v = nj["v"].get<std::vector<double>>();
        nodes.push_back(std::move(nd));
    }
    return nodes;
}

int run_poset(const Common& c, const std::string& what, const std::string& in,
              const std::string& nodes_path, double delta, double alpha) {
    ojson cfg{{"cmd", "poset " + what}, {"space", in},    {"nodes", nodes_path},
              {"delta", delta},         {"alpha", alpha}};
    auto space = load_space(in);
    auto nodes = load_nodes(nodes_path, space);
    lipgeo::ChainPoset poset(
        nodes, delta, alpha, [&](Index a, Index b) { return space.dist(a, b); },
        c.tol);
    poset.check_transitivity(c.seed);
    auto dump = lipgeo::dump_poset(poset);
    ojson hasse = ojson::array();
    for (auto [a, b] : dump.hasse_edges) hasse.push_back(ojson::array({a, b}));

    ojson body{{"nodes", poset.size()}, {"hasse", hasse}, {"levels", dump.level}};
    if (what == "chains") {
        auto lc = lipgeo::longest_chain(poset);
        body["longest_chain_length"] = lc.length;
        body["longest_chain"] = lc.chain;
    } else {
        auto decomp = lipgeo::mirsky_decompose(poset);
        body["antichain_count"] = decomp.size();
        ojson acs = ojson::array();
        for (const auto& ac : decomp) acs.push_back(ac);
        body["antichains"] = acs;
    }
    write_report(c, "poset_" + what + ".json", std::move(body), cfg);
    return 0;
}

int run_approx(const Common& c, const std::string& in, const std::string& values,
               const std::string& subset, const std::string& w_spec, double delta,
               double alpha, std::size_t n) {
    ojson cfg{{"cmd", "approx run"}, {"space", in},    {"values", values},
              {"subset", subset},    {"delta", delta}, {"alpha", alpha},
              {"n", n},              {"w", w_spec}};
    if (!(delta > 0.0)) throw lipgeo::InputError("approx run: --delta must be > 0");
    auto space = load_space(in);
    std::size_t q = 0;
    auto f = lipgeo::io::read_values_csv(values, space, &q);
    std::vector<Index> S;
    if (!subset.empty()) S = load_ids(subset, space);
    std::vector<double> w = parse_list(w_spec.empty() ? "1" : w_spec);
    {
        double norm = 0.0;
        for (double v : w) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : w) v /= norm;
    }
    if (w.size() != q)
        throw lipgeo::InputError("approx run: w must have q components");

    auto res = lipgeo::onedim_approx(space, S, f, q, w, delta, alpha, n, c.tol);
    const auto& cert = res.certificate;
    ojson local = ojson::array();
    for (const auto& e : cert.local_lip_report)
        local.push_back({{"pointId", space.id(e.point)},
                         {"radius", e.radius},
                         {"constant", e.constant},
                         {"constant_base", e.constant_base}});
    write_report(c, "approx_certificate.json",
                 {{"M_n", cert.M_n},
                  {"n", cert.n},
                  {"M_n_over_n", double(cert.M_n) / double(cert.n)},
                  {"width", cert.width},
                  {"sup_error", cert.sup_error},
                  {"bound", cert.bound},
                  {"global_lip_D", cert.global_lip_violation},
                  {"boundary_mass", cert.boundary_mass},
                  {"uncovered_mass", cert.uncovered_mass},
                  {"local_lip_report", local}},
                 cfg);
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < space.size(); ++i)
        rows.push_back({space.id(i), fmt(res.tau_n[i])});
    write_csv(c, "tau_n.csv", {"id", "tau_n"}, rows);
    return cert.global_lip_violation <= c.tol && cert.sup_error <= cert.bound ? 0
                                                                              : 1;
}

int run_alberti_build(const Common& c, const std::string& in,
                      const std::string& values, const std::string& axis_spec,
                      double angle, double delta, double coverage) {
    ojson cfg{{"cmd", "alberti build"}, {"space", in},
              {"values", values},       {"cone_axis", axis_spec},
              {"cone_angle", angle},    {"delta", delta},
              {"coverage", coverage}};
    auto space = load_space(in);
    std::size_t q = 0;
    auto f = lipgeo::io::read_values_csv(values, space, &q);
    lipgeo::ConeSpec cone;
    cone.axis = parse_list(axis_spec);
    cone.angle = angle;
    {
        double norm = 0.0;
        for (double v : cone.axis) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : cone.axis) v /= norm;
    }
    if (cone.axis.size() != q)
        throw lipgeo::InputError("alberti build: cone axis must have q components");
    auto res = lipgeo::greedy_build_rep(space, f, q, cone, delta, coverage, c.tol);
    std::filesystem::create_directories(c.out_dir);
    lipgeo::io::write_rep_json(c.out_dir + "/rep.json", space, res.rep);
    ojson uncovered = ojson::array();
    for (Index u : res.uncovered) uncovered.push_back(space.id(u));
    write_report(c, "alberti_build.json",
                 {{"fragments", res.rep.size()},
                  {"coverage", res.coverage},
                  {"uncovered", uncovered}},
                 cfg);
    return 0;
}

int run_alberti_validate(const Common& c, const std::string& in,
                         const std::string& rep_path) {
    ojson cfg{{"cmd", "alberti validate"}, {"space", in}, {"rep", rep_path}};
    auto space = load_space(in);
    auto rep = lipgeo::io::read_rep_json(rep_path, space);
    auto rr = lipgeo::validate_rep(space, rep, 1e-12);
    write_report(c, "alberti_validate.json",
                 {{"max_residual", rr.max_residual},
                  {"total_residual", rr.total_residual},
                  {"pass", rr.pass},
                  {"finite_model_conditions", "satisfied (finite model)"}},
                 cfg);
    return rr.pass ? 0 : 1;
}

int run_alberti_derive(const Common& c, const std::string& in,
                       const std::string& rep_path, const std::string& values) {
    ojson cfg{{"cmd", "alberti derive"}, {"space", in},
              {"rep", rep_path},         {"values", values}};
    auto space = load_space(in);
    auto rep = lipgeo::io::read_rep_json(rep_path, space);
    std::size_t q = 0;
    auto f = lipgeo::io::read_values_csv(values, space, &q);
    auto D = lipgeo::derivation_apply(space, rep, f, q);
    auto sp = lipgeo::effective_speed(space, rep);

    std::vector<std::string> header{"id", "mu"};
    for (std::size_t k = 0; k < q; ++k) header.push_back("Df" + std::to_string(k + 1));
    header.push_back("sigma");
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < space.size(); ++i) {
        std::vector<std::string> row{space.id(i), fmt(space.weight(i))};
        for (std::size_t k = 0; k < q; ++k) row.push_back(fmt(D.values[i * q + k]));
        row.push_back(fmt(sp.sigma[i]));
        rows.push_back(std::move(row));
    }
    write_csv(c, "derivation.csv", header, rows);
    ojson excluded = ojson::array();
    for (Index e : D.excluded) excluded.push_back(space.id(e));
    // One-sided quotient asymmetry at interior domain gaps (> 10 percent).
    std::size_t asymmetric = 0;
    for (const auto& frag : rep.fragments) {
        if (frag.size() < 3) continue;
        for (bool fl : lipgeo::quotient_asymmetry_flags(frag, space))
            if (fl) ++asymmetric;
    }
    write_report(c, "alberti_derive.json",
                 {{"norm_bound", D.norm_bound},
                  {"pairing", D.pairing},
                  {"pairing_bound", D.pairing_bound},
                  {"asymmetric_quotient_points", asymmetric},
                  {"excluded_zero_mass", excluded}},
                 cfg);
    return 0;
}

int run_alberti_algebra(const Common& c, const std::string& in,
                        const std::string& rep_path, const std::string& op,
                        double a, double b, const std::string& subset,
                        const std::string& lambda_csv, double bound,
                        std::size_t depth, const std::string& rep2_path) {
    ojson cfg{{"cmd", "alberti algebra"}, {"space", in}, {"rep", rep_path},
              {"op", op}};
    auto space = load_space(in);
    auto rep = lipgeo::io::read_rep_json(rep_path, space);
    lipgeo::AlbertiRep out;
    if (op == "reparam") {
        cfg["a"] = a;
        cfg["b"] = b;
        out = lipgeo::reparametrize(rep, a, b);
    } else if (op == "restrict" || op == "indicator") {
        cfg["subset"] = subset;
        auto ids = load_ids(subset, space);
        std::vector<bool> mask(space.size(), false);
        for (Index i : ids) mask[i] = true;
        out = op == "restrict" ? lipgeo::restrict_rep(rep, mask)
                               : lipgeo::indicator_combine(rep, mask);
    } else if (op == "scale") {
        cfg["lambda"] = lambda_csv;
        cfg["bound"] = bound;
        cfg["depth"] = depth;
        auto lam = lipgeo::io::read_values_csv(lambda_csv, space);
        out = lipgeo::scale_rep(rep, lam, bound, depth);
    } else if (op == "sum" || op == "glue") {
        cfg["rep2"] = rep2_path;
        auto rep2 = lipgeo::io::read_rep_json(rep2_path, space);
        out = op == "sum" ? lipgeo::sum_reps({rep, rep2})
                          : lipgeo::glue_reps({rep, rep2});
    } else {
        throw lipgeo::InputError("unknown algebra op '" + op + "'");
    }
    std::filesystem::create_directories(c.out_dir);
    lipgeo::io::write_rep_json(c.out_dir + "/rep_out.json", space, out);
    write_report(c, "alberti_algebra.json", {{"fragments", out.size()}}, cfg);
    return 0;
}

int run_lip(const Common& c, const std::string& what, const std::string& in,
            const std::string& values, const std::string& scales_spec,
            double keith_tau) {
    ojson cfg{{"cmd", "lip " + what}, {"space", in},
              {"values", values},     {"scales", scales_spec}};
    auto space = load_space(in);
    auto f = lipgeo::io::read_values_csv(values, space);
    auto scales = parse_list(scales_spec);
    if (what == "profile") {
        auto prof = lipgeo::lip_profile(space, f, scales);
        std::vector<std::vector<std::string>> rows;
        for (Index i = 0; i < space.size(); ++i)
            for (std::size_t s = 0; s < prof.scales.size(); ++s)
                rows.push_back({space.id(i), fmt(prof.scales[s]),
                                fmt(prof.biglip_at(i, s)),
                                fmt(prof.smllip_at(i, s))});
        write_csv(c, "lip_profile.csv", {"id", "r", "biglip", "smllip"}, rows);
        write_report(c, "lip_profile.json",
                     {{"points", space.size()}, {"scales", prof.scales}}, cfg);
        return 0;
    }
    cfg["keith_tau"] = keith_tau;
    auto rep = lipgeo::liplip_check(space, f, scales, c.tol, keith_tau);
    ojson flagged = ojson::array();
    for (Index i : rep.flagged) flagged.push_back(space.id(i));
    ojson keith = ojson::array();
    for (Index i : rep.keith_failing) keith.push_back(space.id(i));
    write_report(c, "liplip.json", {{"flagged", flagged}, {"keith_failing", keith}},
                 cfg);
    return 0;
}

int run_porosity(const Common& c, const std::string& what, const std::string& in,
                 const std::string& subset, const std::string& scales_spec,
                 double cconst) {
    ojson cfg{{"cmd", "porosity " + what}, {"space", in},
              {"subset", subset},          {"scales", scales_spec}};
    auto space = load_space(in);
    auto Y = load_ids(subset, space);
    auto scales = parse_list(scales_spec);
    if (what == "scan") {
        auto scan = lipgeo::porosity_scan(space, Y, scales);
        ojson per_scale = ojson::array();
        for (std::size_t s = 0; s < scan.scales.size(); ++s) {
            ojson witnesses = ojson::array();
            for (const auto& wts : scan.per_scale[s]) {
                if (wts.constant <= 0.0) continue;
                witnesses.push_back({{"center", space.id(wts.center)},
                                     {"witness", space.id(wts.witness)},
                                     {"constant", wts.constant},
                                     {"scale", wts.scale}});
            }
            per_scale.push_back({{"scale", scan.scales[s]},
                                 {"certified", scan.certified[s]},
                                 {"witnesses", witnesses}});
        }
        write_report(c, "porosity_scan.json", {{"per_scale", per_scale}}, cfg);
        return 0;
    }
    cfg["c"] = cconst;
    auto sat = lipgeo::porosity_saturate(space, Y, cconst, scales);
    ojson pts = ojson::array();
    for (Index p : sat.points) pts.push_back(space.id(p));
    ojson recert = ojson::array();
    for (std::size_t s = 0; s < scales.size(); ++s)
        recert.push_back(
            {{"scale", scales[s]}, {"certified", sat.recertified.certified[s]}});
    write_report(c, "porosity_saturate.json",
                 {{"points", pts}, {"recertified", recert}}, cfg);
    return 0;
}

int run_gap(const Common& c, const std::string& in, const std::string& subset,
            const std::string& values, double alpha, double beta,
            const std::string& pool_path, const std::string& scales_spec) {
    ojson cfg{{"cmd", "gap detect"}, {"space", in},    {"subset", subset},
              {"values", values},    {"alpha", alpha}, {"beta", beta},
              {"pool", pool_path},   {"scales", scales_spec}};
    auto space = load_space(in);
    auto S = load_ids(subset, space);
    auto f = lipgeo::io::read_values_csv(values, space);
    auto pool = lipgeo::io::read_fragment_pool_json(pool_path, space);
    auto scales = parse_list(scales_spec);
    auto verdict = lipgeo::gap_detect(space, S, f, alpha, beta, pool, scales, c.tol);
    ojson fe = ojson::array(), fb = ojson::array();
    for (Index i : verdict.failing_estimate) fe.push_back(space.id(i));
    for (Index i : verdict.failing_biglip) fb.push_back(space.id(i));
    write_report(c, "gap_detect.json",
                 {{"gap_candidate", verdict.gap_candidate},
                  {"label", verdict.label},
                  {"max_estimate_on_S", verdict.max_estimate_on_S},
                  {"min_biglip_on_S", verdict.min_biglip_on_S},
                  {"failing_estimate", fe},
                  {"failing_biglip", fb}},
                 cfg);
    return verdict.gap_candidate ? 0 : 1;
}

int run_zahorski(const Common& c, const std::string& what, std::size_t level,
                 double delta0, double slope, double alpha, double L,
                 std::size_t M, std::size_t depth, double min_scale) {
    ojson cfg{{"cmd", "zahorski " + what},
              {"level", level},
              {"delta0", delta0},
              {"slope_budget", slope},
              {"alpha", alpha},
              {"L", L},
              {"M", M},
              {"depth", depth},
              {"min_scale", min_scale}};
    lipgeo::CantorFlatFamily fam(level, delta0, slope, min_scale);
    auto res = lipgeo::build_independent(fam, M, alpha, L, depth, c.tol);

    ojson sched = ojson::array();
    for (std::size_t k = 0; k < depth; ++k)
        sched.push_back({{"k", k + 1},
                         {"inv_m", res.schedule.inv_m[k]},
                         {"h", res.schedule.h[k]},
                         {"eps", res.schedule.eps[k]},
                         {"rho", res.schedule.rho[k]},
                         {"s_prime_mass", res.per_level_s_prime_mass[k]}});
    ojson body{{"schedule", sched},
               {"tail", res.schedule.tail(depth)},
               {"lip_bound", res.lip_bound},
               {"measured_lip", res.measured_lip},
               {"lower_bound", res.lower_bound},
               {"min_variation", res.min_variation},
               {"s_prime_size", res.S_prime.size()}};

    if (what == "report") {
        auto rep = lipgeo::liplip_violation_report(
            fam.space(), res.S_prime, res.g_levels, res.schedule, fam.delta0(),
            c.tol);
        ojson rows = ojson::array();
        for (const auto& row : rep.rows)
            rows.push_back({{"pointId", fam.space().id(row.point)},
                            {"biglip_fine", row.biglip_fine},
                            {"varlip_capped", row.varlip_capped},
                            {"window_bound", row.window_bound},
                            {"ratio", row.ratio}});
        body["violation"] = {{"all_violate", rep.all_violate}, {"rows", rows}};
    }
    write_report(c, "zahorski_" + what + ".json", std::move(body), cfg);

    std::vector<std::string> header{"id"};
    for (std::size_t j = 0; j < M; ++j) header.push_back("psi" + std::to_string(j));
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < fam.space().size(); ++i) {
        std::vector<std::string> row{fam.space().id(i)};
        for (std::size_t j = 0; j < M; ++j) row.push_back(fmt(res.psi[j][i]));
        rows.push_back(std::move(row));
    }
    write_csv(c, "psi.csv", header, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computational Lipschitz analysis on finite metric measure spaces"};
    app.require_subcommand(1);
    Common c;

    // space
    auto* sp = app.add_subcommand("space", "build and validate spaces");
    sp->require_subcommand(1);
    auto* spg = sp->add_subcommand("generate", "named generators");
    std::string kind = "grid";
    std::size_t gen_n = 16, gen_dim = 2, gen_level = 5;
    long ambient_level = -1;
    spg->add_option("--kind", kind, "grid|segment|cantor");
    spg->add_option("--n", gen_n, "side (grid) or point count (segment)");
    spg->add_option("--dim", gen_dim, "grid dimension");
    spg->add_option("--level", gen_level, "cantor level");
    spg->add_option("--ambient-level", ambient_level,
                    "embed cantor endpoints in a 3^-k grid");
    add_common(spg, c);

    auto* spv = sp->add_subcommand("validate", "validate a space file");
    std::string in_path, values_path, subset_path, rep_path;
    bool matrix_csv = false;
    spv->add_option("--in", in_path, "space JSON or CSV")->required();
    spv->add_flag("--matrix", matrix_csv, "treat CSV as a distance matrix");
    add_common(spv, c);

    // net
    auto* net = app.add_subcommand("net", "nets");
    auto* netb = net->add_subcommand("build", "greedy maximal separated set");
    double net_eps = 0.1;
    netb->add_option("--space", in_path)->required();
    netb->add_option("--net-eps", net_eps)->required();
    add_common(netb, c);

    // poset
    auto* po = app.add_subcommand("poset", "chain order analysis");
    po->require_subcommand(1);
    std::string nodes_path;
    double delta = 0.5, alpha = 0.785398163397448279;
    auto* poc = po->add_subcommand("chains", "longest chain");
    poc->add_option("--space", in_path)->required();
    poc->add_option("--nodes", nodes_path)->required();
    poc->add_option("--delta", delta);
    poc->add_option("--alpha", alpha);
    add_common(poc, c);
    auto* poa = po->add_subcommand("antichains", "Mirsky decomposition");
    poa->add_option("--space", in_path)->required();
    poa->add_option("--nodes", nodes_path)->required();
    poa->add_option("--delta", delta);
    poa->add_option("--alpha", alpha);
    add_common(poa, c);

    // approx
    auto* ap = app.add_subcommand("approx", "strip approximation scheme");
    auto* apr = ap->add_subcommand("run", "full pipeline with certificate");
    std::string w_spec = "1";
    std::size_t n_param = 32;
    apr->add_option("--space", in_path)->required();
    apr->add_option("--values", values_path)->required();
    apr->add_option("--subset", subset_path, "S as a JSON id list");
    apr->add_option("--w", w_spec, "axis components, comma separated");
    apr->add_option("--delta", delta);
    apr->add_option("--alpha", alpha);
    apr->add_option("--n", n_param, "net resolution parameter");
    add_common(apr, c);

    // alberti
    auto* al = app.add_subcommand("alberti", "Alberti representations");
    al->require_subcommand(1);
    auto* alb = al->add_subcommand("build", "greedy chain construction");
    std::string axis_spec = "1";
    double cone_angle = 0.785398163397448279, coverage = 1.0;
    alb->add_option("--space", in_path)->required();
    alb->add_option("--values", values_path)->required();
    alb->add_option("--cone-axis", axis_spec);
    alb->add_option("--cone-angle", cone_angle);
    alb->add_option("--delta", delta);
    alb->add_option("--coverage", coverage);
    add_common(alb, c);
    auto* alv = al->add_subcommand("validate", "check mu = int nu dP");
    alv->add_option("--space", in_path)->required();
    alv->add_option("--rep", rep_path)->required();
    add_common(alv, c);
    auto* ald = al->add_subcommand("derive", "derivation and speed fields");
    ald->add_option("--space", in_path)->required();
    ald->add_option("--rep", rep_path)->required();
    ald->add_option("--values", values_path)->required();
    add_common(ald, c);
    auto* ala = al->add_subcommand("algebra", "representation algebra ops");
    std::string op = "reparam", lambda_csv, rep2_path;
    double op_a = 1.0, op_b = 0.0, op_bound = 1.0;
    std::size_t op_depth = 10;
    ala->add_option("--space", in_path)->required();
    ala->add_option("--rep", rep_path)->required();
    ala->add_option("--op", op, "reparam|restrict|indicator|scale|sum|glue");
    ala->add_option("--a", op_a);
    ala->add_option("--b", op_b);
    ala->add_option("--subset", subset_path);
    ala->add_option("--lambda", lambda_csv);
    ala->add_option("--bound", op_bound);
    ala->add_option("--depth", op_depth);
    ala->add_option("--rep2", rep2_path);
    add_common(ala, c);

    // lip
    auto* li = app.add_subcommand("lip", "pointwise Lipschitz landscape");
    li->require_subcommand(1);
    std::string scales_spec = "0.5:6";
    double keith_tau = 1.0;
    auto* lip = li->add_subcommand("profile", "biglip/smllip profiles");
    lip->add_option("--space", in_path)->required();
    lip->add_option("--values", values_path)->required();
    lip->add_option("--scales", scales_spec, "top:count dyadic or comma list");
    add_common(lip, c);
    auto* lil = li->add_subcommand("liplip", "ratio and Keith check");
    lil->add_option("--space", in_path)->required();
    lil->add_option("--values", values_path)->required();
    lil->add_option("--scales", scales_spec);
    lil->add_option("--keith-tau", keith_tau);
    add_common(lil, c);

    // porosity
    auto* por = app.add_subcommand("porosity", "porosity scans");
    por->require_subcommand(1);
    double c_const = 0.25;
    auto* pos = por->add_subcommand("scan", "witness scan");
    pos->add_option("--space", in_path)->required();
    pos->add_option("--subset", subset_path)->required();
    pos->add_option("--scales", scales_spec);
    add_common(pos, c);
    auto* posat = por->add_subcommand("saturate", "completion construction");
    posat->add_option("--space", in_path)->required();
    posat->add_option("--subset", subset_path)->required();
    posat->add_option("--scales", scales_spec);
    posat->add_option("--c", c_const)->required();
    add_common(posat, c);

    // gap
    auto* gap = app.add_subcommand("gap", "gap sets");
    auto* gapd = gap->add_subcommand("detect", "pool-relative gap verdict");
    std::string pool_path;
    double gap_alpha = 0.25, gap_beta = 0.0;
    gapd->add_option("--space", in_path)->required();
    gapd->add_option("--subset", subset_path)->required();
    gapd->add_option("--values", values_path)->required();
    gapd->add_option("--alpha", gap_alpha);
    gapd->add_option("--beta", gap_beta);
    gapd->add_option("--pool", pool_path)->required();
    gapd->add_option("--scales", scales_spec);
    add_common(gapd, c);

    // zahorski
    auto* za = app.add_subcommand("zahorski", "independent Lipschitz functions");
    za->require_subcommand(1);
    std::size_t za_level = 6, za_M = 2, za_depth = 6;
    double za_delta0 = 0.5, za_slope = 1.0, za_alpha = 0.05, za_L = 1.0;
    double za_min_scale = 1e-45;
    for (const char* name : {"build", "report"}) {
        auto* cmd = za->add_subcommand(
            name, name[0] == 'b' ? "construction + certificates"
                                 : "construction + violation table");
        cmd->add_option("--level", za_level);
        cmd->add_option("--delta0", za_delta0);
        cmd->add_option("--slope-budget", za_slope);
        cmd->add_option("--alpha", za_alpha);
        cmd->add_option("--L", za_L);
        cmd->add_option("--M", za_M);
        cmd->add_option("--depth", za_depth);
        cmd->add_option("--min-scale", za_min_scale);
        add_common(cmd, c);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        lipgeo::kernels::set_backend(c.kernel);
        lipgeo::kernels::set_workers(c.workers);
        if (spg->parsed())
            return run_space_generate(c, kind, gen_n, gen_dim, gen_level,
                                      ambient_level);
        if (spv->parsed()) return run_space_validate(c, in_path, matrix_csv);
        if (netb->parsed()) return run_net_build(c, in_path, net_eps);
        if (poc->parsed())
            return run_poset(c, "chains", in_path, nodes_path, delta, alpha);
        if (poa->parsed())
            return run_poset(c, "antichains", in_path, nodes_path, delta, alpha);
        if (apr->parsed())
            return run_approx(c, in_path, values_path, subset_path, w_spec, delta,
                              alpha, n_param);
        if (alb->parsed())
            return run_alberti_build(c, in_path, values_path, axis_spec, cone_angle,
                                     delta, coverage);
        if (alv->parsed()) return run_alberti_validate(c, in_path, rep_path);
        if (ald->parsed())
            return run_alberti_derive(c, in_path, rep_path, values_path);
        if (ala->parsed())
            return run_alberti_algebra(c, in_path, rep_path, op, op_a, op_b,
                                       subset_path, lambda_csv, op_bound, op_depth,
                                       rep2_path);
        if (lip->parsed())
            return run_lip(c, "profile", in_path, values_path, scales_spec,
                           keith_tau);
        if (lil->parsed())
            return run_lip(c, "liplip", in_path, values_path, scales_spec, keith_tau);
        if (pos->parsed())
            return run_porosity(c, "scan", in_path, subset_path, scales_spec,
                                c_const);
        if (posat->parsed())
            return run_porosity(c, "saturate", in_path, subset_path, scales_spec,
                                c_const);
        if (gapd->parsed())
            return run_gap(c, in_path, subset_path, values_path, gap_alpha, gap_beta,
                           pool_path, scales_spec);
        if (za->get_subcommand("build")->parsed())
            return run_zahorski(c, "build", za_level, za_delta0, za_slope, za_alpha,
                                za_L, za_M, za_depth, za_min_scale);
        if (za->get_subcommand("report")->parsed())
            return run_zahorski(c, "report", za_level, za_delta0, za_slope, za_alpha,
                                za_L, za_M, za_depth, za_min_scale);
        std::fprintf(stderr, "lipgeo: no subcommand matched\n");
        return 2;
    } catch (const lipgeo::ValidationError& e) {
        std::fprintf(stderr, "validation failure: %s\n", e.what());
        return 1;
    } catch (const lipgeo::InputError& e) {
        std::fprintf(stderr, "bad input: %s\n", e.what());
        return 2;
    } catch (const lipgeo::InternalError& e) {
        std::fprintf(stderr, "internal invariant breach: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bad input: %s\n", e.what());
        return 2;
    }
}
