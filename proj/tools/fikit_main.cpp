#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fikit/convex.hpp"
#include "fikit/families.hpp"
#include "fikit/hopf_lax.hpp"
#include "fikit/inequalities.hpp"
#include "fikit/io.hpp"
#include "fikit/report.hpp"
#include "fikit/space.hpp"
#include "fikit/transport.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

int exit_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

std::uint64_t env_seed() {
    if (const char* s = std::getenv("FIKIT_SEED")) return std::strtoull(s, nullptr, 10);
    return 12345;
}

int env_threads() {
    if (const char* s = std::getenv("FIKIT_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    return 1;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

// "start:stop:count" inclusive linear grid
std::vector<double> parse_linear_grid(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:count, got " + s);
    double start = std::stod(parts[0]);
    double stop = std::stod(parts[1]);
    int count = std::stoi(parts[2]);
    if (count < 1) throw std::invalid_argument("grid count must be at least 1");
    std::vector<double> g;
    if (count == 1) {
        g.push_back(start);
        return g;
    }
    for (int i = 0; i < count; ++i)
        g.push_back(start + (stop - start) * i / (count - 1));
    return g;
}

// "start:stop:count" geometric grid for perturbation sizes
std::vector<double> parse_geometric_grid(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:count, got " + s);
    double start = std::stod(parts[0]);
    double stop = std::stod(parts[1]);
    int count = std::stoi(parts[2]);
    if (!(start > 0.0) || !(stop > 0.0))
        throw std::invalid_argument("geometric grid needs positive endpoints");
    if (count < 1) throw std::invalid_argument("grid count must be at least 1");
    std::vector<double> g;
    if (count == 1) {
        g.push_back(start);
        return g;
    }
    double ratio = std::log(stop / start) / (count - 1);
    for (int i = 0; i < count; ++i) g.push_back(start * std::exp(ratio * i));
    return g;
}

// "<name>" or "<name>:<comma separated numbers>"
struct InlineSpec {
    std::string head;
    std::vector<double> args;
};

std::optional<InlineSpec> match_inline(const std::string& spec,
                                       std::initializer_list<const char*> names) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    bool known = false;
    for (const char* n : names)
        if (head == n) known = true;
    if (!known || std::filesystem::exists(spec)) return std::nullopt;
    InlineSpec out;
    out.head = head;
    if (colon != std::string::npos)
        for (const auto& piece : split(spec.substr(colon + 1), ','))
            if (!piece.empty()) out.args.push_back(std::stod(piece));
    return out;
}

fikit::MetricSpace resolve_space(const std::string& spec) {
    using namespace fikit;
    auto in = match_inline(spec, {"grid1d", "grid2d", "heisenberg"});
    if (!in) return load_space(spec);
    const auto& args = in->args;
    if (in->head == "grid1d") {
        if (args.size() != 3) throw std::invalid_argument("grid1d:a,b,n");
        return build_grid_1d(args[0], args[1], static_cast<int>(args[2]));
    }
    if (in->head == "grid2d") {
        if (args.size() != 6) throw std::invalid_argument("grid2d:ax,bx,nx,ay,by,ny");
        return build_grid_2d(args[0], args[1], static_cast<int>(args[2]), args[3], args[4],
                             static_cast<int>(args[5]));
    }
    if (args.size() != 2) throw std::invalid_argument("heisenberg:levels,step");
    return build_heisenberg_grid(static_cast<int>(args[0]), args[1]);
}

fikit::ProbabilityMeasure resolve_measure(const std::string& spec, const fikit::MetricSpace& space,
                                          std::uint64_t seed) {
    using namespace fikit;
    auto in = match_inline(spec, {"uniform", "gaussian", "gibbs", "perturb"});
    if (!in) return load_measure(spec);
    const auto& args = in->args;
    if (in->head == "uniform") {
        std::vector<double> w(static_cast<std::size_t>(space.size()),
                              1.0 / static_cast<double>(space.size()));
        return ProbabilityMeasure{std::move(w)};
    }
    if (in->head == "gaussian") {
        if (args.empty()) throw std::invalid_argument("gaussian:sigma[,center...]");
        std::vector<double> center(static_cast<std::size_t>(std::max(space.coord_dim(), 1)), 0.0);
        for (std::size_t d = 0; d + 1 < args.size() && d < center.size(); ++d)
            center[d] = args[d + 1];
        return gaussian_measure(space, args[0], center);
    }
    if (in->head == "gibbs") {
        if (args.size() < 2) throw std::invalid_argument("gibbs:beta,p[,base]");
        int base = args.size() > 2 ? static_cast<int>(args[2]) : 0;
        return gibbs_measure(space, base, args[0], args[1]);
    }
    // perturb:lip[,index] perturbs the uniform measure
    if (args.empty()) throw std::invalid_argument("perturb:lip[,index]");
    std::vector<double> w(static_cast<std::size_t>(space.size()),
                          1.0 / static_cast<double>(space.size()));
    ProbabilityMeasure base{std::move(w)};
    int index = args.size() > 1 ? static_cast<int>(args[1]) : 0;
    auto fam = random_perturbed_family(space, base, args[0], index + 1, seed);
    return fam[static_cast<std::size_t>(index)];
}

fikit::ScalarField resolve_field(const std::string& spec, const fikit::MetricSpace& space,
                                 std::uint64_t seed) {
    using namespace fikit;
    auto in = match_inline(spec, {"coord", "abs", "exp", "trig", "random"});
    if (!in) return load_field(spec);
    const auto& args = in->args;
    if (in->head == "coord") return profile_coordinate(space);
    if (in->head == "abs") {
        auto x = profile_coordinate(space);
        for (int i = 0; i < x.size(); ++i) x[i] = std::abs(x[i]);
        return x;
    }
    if (in->head == "exp") {
        double lambda = args.empty() ? 1.0 : args[0];
        return exponential_family(space, {lambda})[0];
    }
    if (in->head == "trig") {
        if (args.size() != 3) throw std::invalid_argument("trig:amplitude,omega,phase");
        return trig_field(space, args[0], args[1], args[2]);
    }
    if (args.empty()) throw std::invalid_argument("random:lip[,index]");
    int index = args.size() > 1 ? static_cast<int>(args[1]) : 0;
    return random_lipschitz_family(space, args[0], index + 1,
                                   seed)[static_cast<std::size_t>(index)];
}

std::vector<fikit::ScalarField> resolve_family(const std::string& spec,
                                               const fikit::MetricSpace& space,
                                               std::uint64_t seed) {
    using namespace fikit;
    if (auto in = match_inline(spec, {"exp", "random"})) {
        if (in->head == "exp") {
            std::vector<double> lambdas =
                in->args.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0} : in->args;
            return exponential_family(space, lambdas);
        }
        if (in->args.size() != 2) throw std::invalid_argument("random:lip,count");
        return random_lipschitz_family(space, in->args[0], static_cast<int>(in->args[1]), seed);
    }
    std::vector<ScalarField> fam;
    fam.push_back(resolve_field(spec, space, seed));
    return fam;
}

struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    std::map<std::string, std::string> resolved;
    std::vector<std::string> argv;

    std::string path_of(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }

    void write_lock(const std::string& command) const {
        nlohmann::ordered_json j;
        j["tool"] = "fikit";
        j["version"] = kVersion;
        j["command"] = command;
        j["argv"] = argv;
        j["seed"] = seed;
        j["threads"] = env_threads();
        nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
        for (const auto& [k, v] : resolved) cfg[k] = v;
        j["config"] = cfg;
        fikit::atomic_write(path_of("run.lock.json"), j.dump(2) + "\n");
    }
};

void emit_report(const fikit::CheckReport& r, const RunContext& ctx, const std::string& stem) {
    fikit::save_report_json(r, ctx.path_of(stem + ".report.json"));
    std::ostringstream md;
    md << fikit::CheckReport::markdown_header() << "\n" << r.to_markdown_row() << "\n";
    fikit::atomic_write(ctx.path_of(stem + ".report.md"), md.str());
    std::cout << r.name << ": " << to_string(r.status) << " (margin " << r.margin() << ")\n";
}

int status_code(const fikit::CheckReport& r) {
    switch (r.status) {
        case fikit::CheckStatus::Pass: return 0;
        case fikit::CheckStatus::Fail: return 1;
        case fikit::CheckStatus::Inconclusive: return 3;
    }
    return 2;
}

// flat key-value config file; command-line flags win
std::vector<std::string> inject_config(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") config_path = args[i + 1];
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + config_path);
    nlohmann::json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string flag = "--" + it.key();
        bool present = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
        if (present) continue;
        std::string value = it.value().is_string() ? it.value().get<std::string>()
                                                   : it.value().dump();
        args.push_back(flag + "=" + value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fikit;
    CLI::App app{"finite metric-measure toolkit: Hopf-Lax flows, optimal transport, and "
                 "entropy-transport inequality checks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunContext ctx;
    ctx.seed = env_seed();
    std::string config_path;
    app.add_option("--config", config_path, "flat JSON key-value config; flags override");

    // ---- space gen ----
    auto* space_cmd = app.add_subcommand("space", "space generators");
    space_cmd->require_subcommand(1);
    auto* gen = space_cmd->add_subcommand("gen", "generate a space file");
    std::string gen_kind, gen_out;
    double gen_a = 0, gen_b = 1, gen_ax = 0, gen_bx = 1, gen_ay = 0, gen_by = 1, gen_step = 1;
    int gen_n = 2, gen_nx = 2, gen_ny = 2, gen_levels = 1;
    std::string gen_edges;
    gen->add_option("--kind", gen_kind, "grid1d|grid2d|graph|heisenberg")->required();
    gen->add_option("--a", gen_a);
    gen->add_option("--b", gen_b);
    gen->add_option("--n", gen_n);
    gen->add_option("--ax", gen_ax);
    gen->add_option("--bx", gen_bx);
    gen->add_option("--nx", gen_nx);
    gen->add_option("--ay", gen_ay);
    gen->add_option("--by", gen_by);
    gen->add_option("--ny", gen_ny);
    gen->add_option("--levels", gen_levels);
    gen->add_option("--step", gen_step);
    gen->add_option("--edges", gen_edges, "CSV u,v,length for --kind graph");
    gen->add_option("-o,--out", gen_out, "output space JSON")->required();

    // ---- hopflax ----
    auto* hl = app.add_subcommand("hopflax", "evaluate the infimum convolution");
    std::string hl_space, hl_g, hl_out, hl_check, hl_lcsv;
    double hl_t = 0, hl_q = 2, hl_s = 0;
    hl->add_option("--space", hl_space)->required();
    hl->add_option("--g", hl_g, "initial field (CSV path or generator spec)")->required();
    hl->add_option("--t", hl_t)->required();
    hl->add_option("--q", hl_q, "Hamiltonian exponent; L is its conjugate power");
    hl->add_option("--L-csv", hl_lcsv, "tabulated Lagrangian (CSV v,value)");
    hl->add_option("-o,--out", hl_out, "result CSV");
    hl->add_option("--check", hl_check, "semigroup|monotonicity|scaling");
    hl->add_option("--s", hl_s, "intermediate time for --check semigroup");

    // ---- check ----
    auto* check = app.add_subcommand("check", "inequality and theorem-shadow checks");
    check->require_subcommand(1);
    std::string ck_space, ck_measure = "uniform", ck_f, ck_family = "exp", ck_nu, ck_nu0, ck_nu1,
                ck_g;
    std::string ck_tgrid = "0.1:1:10", ck_epsgrid = "0.02:0.2:8", ck_audit_tgrid = "0:1:5";
    double ck_q = 2, ck_p = 2, ck_K = 1, ck_a = 1, ck_rho = -1;
    int ck_count = 20;
    double ck_lip = 0.5;
    bool ck_estimate = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--space", ck_space)->required();
        sub->add_option("--measure", ck_measure,
                        "reference measure (CSV path, uniform, gaussian:sigma, gibbs:beta,p)");
        sub->add_option("--out-dir", ctx.out_dir);
        sub->add_option("--seed", ctx.seed);
    };

    auto* c_lsi = check->add_subcommand("lsi", "q-log-Sobolev inequality over a family");
    add_common(c_lsi);
    c_lsi->add_option("--q", ck_q);
    c_lsi->add_option("--K", ck_K);
    c_lsi->add_flag("--estimate-K", ck_estimate, "use the family estimate instead of --K");
    c_lsi->add_option("--family", ck_family);

    auto* c_tal = check->add_subcommand("talagrand", "p-Talagrand transport inequality");
    add_common(c_tal);
    c_tal->add_option("--p", ck_p);
    c_tal->add_option("--K", ck_K);
    c_tal->add_option("--nu", ck_nu, "second measure (CSV path or perturb:lip[,index])")
        ->required();

    auto* c_dual = check->add_subcommand("dual-talagrand", "dual form via the Hopf-Lax flow");
    add_common(c_dual);
    c_dual->add_option("--p", ck_p);
    c_dual->add_option("--K", ck_K);
    c_dual->add_option("--f", ck_f)->required();

    auto* c_hc = check->add_subcommand("hc", "hypercontractivity of exp(Q_t f)");
    add_common(c_hc);
    c_hc->add_option("--q", ck_q);
    c_hc->add_option("--a", ck_a);
    c_hc->add_option("--rho", ck_rho, "norm growth rate; default balances --K exactly");
    c_hc->add_option("--K", ck_K);
    c_hc->add_option("--f", ck_f)->required();
    c_hc->add_option("--t-grid", ck_tgrid);

    auto* c_phi = check->add_subcommand("phi", "normalized log-integral monitor");
    add_common(c_phi);
    c_phi->add_option("--q", ck_q);
    c_phi->add_option("--K", ck_K);
    c_phi->add_option("--f", ck_f)->required();
    c_phi->add_option("--t-grid", ck_tgrid);

    auto* c_hwi = check->add_subcommand("hwi", "entropy vs transport-gradient coupling bounds");
    add_common(c_hwi);
    c_hwi->add_option("--p", ck_p);
    c_hwi->add_option("--f", ck_f, "positive density field")->required();

    auto* c_geo = check->add_subcommand("geodesic-entropy",
                                        "entropy convexity along 1D displacement interpolation");
    add_common(c_geo);
    c_geo->add_option("--p", ck_p);
    c_geo->add_option("--nu0", ck_nu0)->required();
    c_geo->add_option("--nu1", ck_nu1)->required();
    c_geo->add_option("--t-grid", ck_audit_tgrid);

    auto* c_slopes = check->add_subcommand("slopes", "entropy and transport perturbation orders");
    add_common(c_slopes);
    c_slopes->add_option("--p", ck_p);
    c_slopes->add_option("--g", ck_g, "perturbation direction")->required();
    c_slopes->add_option("--eps-grid", ck_epsgrid, "geometric start:stop:count");

    auto* c_l2t = check->add_subcommand("suite-lsi2tal",
                                        "estimate the log-Sobolev constant, then verify "
                                        "Talagrand with it");
    add_common(c_l2t);
    c_l2t->add_option("--q", ck_q);
    c_l2t->add_option("--family", ck_family);
    c_l2t->add_option("--count", ck_count, "number of sampled measures");
    c_l2t->add_option("--lip", ck_lip, "perturbation size of sampled measures");

    auto* c_t2l = check->add_subcommand("suite-tal2lsi",
                                        "audit displacement convexity, then verify the weak-"
                                        "constant log-Sobolev inequality");
    add_common(c_t2l);
    c_t2l->add_option("--p", ck_p);
    c_t2l->add_option("--K", ck_K);
    c_t2l->add_option("--family", ck_family);
    c_t2l->add_option("--count", ck_count, "number of audited endpoint pairs");
    c_t2l->add_option("--lip", ck_lip, "perturbation size of endpoint pairs");
    c_t2l->add_option("--t-grid", ck_audit_tgrid);

    // ---- report ----
    auto* rep = app.add_subcommand("report", "aggregate JSON reports into one table");
    std::string rep_dir, rep_out = "summary.md";
    rep->add_option("--dir", rep_dir)->required();
    rep->add_option("-o,--out", rep_out);

    // let --config (a global option) appear after the subcommand name
    for (CLI::App* sub : {space_cmd, gen, hl, check, c_lsi, c_tal, c_dual, c_hc, c_phi, c_hwi,
                          c_geo, c_slopes, c_l2t, c_t2l, rep})
        sub->fallthrough();

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = inject_config(std::move(args));
    } catch (const std::exception& e) {
        return exit_usage(e.what());
    }
    ctx.argv = args;
    try {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            std::filesystem::path out(gen_out);
            if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
            MetricSpace space;
            if (gen_kind == "grid1d") {
                space = build_grid_1d(gen_a, gen_b, gen_n);
            } else if (gen_kind == "grid2d") {
                space = build_grid_2d(gen_ax, gen_bx, gen_nx, gen_ay, gen_by, gen_ny);
            } else if (gen_kind == "heisenberg") {
                space = build_heisenberg_grid(gen_levels, gen_step);
            } else if (gen_kind == "graph") {
                if (gen_edges.empty()) return exit_usage("--kind graph needs --edges");
                std::ifstream in(gen_edges);
                if (!in) return exit_usage("cannot open " + gen_edges);
                std::vector<GraphEdge> edges;
                std::string line;
                std::getline(in, line);  // header u,v,length
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    auto parts = split(line, ',');
                    if (parts.size() != 3) return exit_usage("malformed edge row: " + line);
                    edges.push_back(
                        {std::stoi(parts[0]), std::stoi(parts[1]), std::stod(parts[2])});
                }
                space = build_graph(gen_n, edges);
            } else {
                return exit_usage("unknown kind " + gen_kind);
            }
            save_space(space, gen_out);
            ctx.out_dir = out.has_parent_path() ? out.parent_path().string() : ".";
            ctx.resolved = {{"kind", gen_kind}, {"out", gen_out},
                            {"n", std::to_string(space.size())}};
            ctx.write_lock("space gen");
            std::cout << "wrote " << gen_out << " (" << space.size() << " points)\n";
            return 0;
        }

        if (hl->parsed()) {
            auto space = resolve_space(hl_space);
            auto g = resolve_field(hl_g, space, ctx.seed);
            if (!(hl_t > 0.0)) return exit_usage("--t must be positive");
            ConvexOneDim L;
            if (!hl_lcsv.empty()) {
                std::ifstream in(hl_lcsv);
                if (!in) return exit_usage("cannot open " + hl_lcsv);
                std::vector<double> grid, values;
                std::string line;
                std::getline(in, line);  // header v,value
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    auto parts = split(line, ',');
                    if (parts.size() != 2) return exit_usage("malformed row in " + hl_lcsv);
                    grid.push_back(std::stod(parts[0]));
                    values.push_back(std::stod(parts[1]));
                }
                L = ConvexOneDim::tabulated(grid, values);
            } else {
                L = power_pair(hl_q).L;
            }
            std::filesystem::path outp(hl_out.empty() ? "u.csv" : hl_out);
            if (outp.has_parent_path()) std::filesystem::create_directories(outp.parent_path());
            ctx.out_dir = outp.has_parent_path() ? outp.parent_path().string() : ".";
            ctx.resolved = {{"space", hl_space}, {"g", hl_g},
                            {"t", format_double(hl_t)}, {"q", format_double(hl_q)}};
            int code = 0;
            if (hl_check.empty()) {
                auto res = hopf_lax(space, g, hl_t, L);
                save_hopf_lax_csv(res.u, res.argmin, outp.string());
                std::cout << "wrote " << outp.string() << "\n";
            } else if (hl_check == "semigroup") {
                if (!(hl_s > 0.0 && hl_s < hl_t))
                    return exit_usage("--check semigroup needs 0 < --s < --t");
                SemigroupOptions opts;
                if (space.has_geodesic_witnesses() && space.kind == SpaceKind::Grid1d)
                    opts.two_sided_tol = 5.0 * space.grid_step();
                auto r = semigroup_check(space, g, hl_s, hl_t, L, opts);
                ctx.resolved["s"] = format_double(hl_s);
                emit_report(r, ctx, "semigroup");
                code = status_code(r);
            } else if (hl_check == "monotonicity") {
                auto r = monotonicity_check(space, g, {hl_t / 4, hl_t / 2, hl_t, 2 * hl_t}, L);
                emit_report(r, ctx, "monotonicity");
                code = status_code(r);
            } else if (hl_check == "scaling") {
                auto r = scaling_check(space, g, hl_t, 0.5, hl_q);
                emit_report(r, ctx, "scaling");
                code = status_code(r);
            } else {
                return exit_usage("unknown --check " + hl_check);
            }
            ctx.write_lock("hopflax");
            return code;
        }

        auto finish_check = [&](const CheckReport& r, const std::string& stem,
                                const std::string& command) {
            std::filesystem::create_directories(ctx.out_dir);
            emit_report(r, ctx, stem);
            ctx.write_lock(command);
            return status_code(r);
        };

        if (c_lsi->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto family = resolve_family(ck_family, space, ctx.seed);
            double K = ck_K;
            if (ck_estimate) K = lsi_constant_estimate(space, mu, family, ck_q);
            double min_margin = std::numeric_limits<double>::infinity();
            CheckReport worst;
            std::vector<double> margins;
            for (const auto& f : family) {
                auto r = lsi_check(space, mu, f, ck_q, K);
                margins.push_back(r.margin());
                if (r.margin() < min_margin) {
                    min_margin = r.margin();
                    worst = r;
                }
            }
            worst.constants["family_size"] = static_cast<double>(family.size());
            worst.constants["K"] = K;
            worst.samples.emplace_back("margin", margins);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure},
                            {"family", ck_family}, {"q", format_double(ck_q)},
                            {"K", format_double(K)}};
            return finish_check(worst, "lsi", "check lsi");
        }
        if (c_tal->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            ProbabilityMeasure nu;
            if (auto pspec = match_inline(ck_nu, {"perturb"})) {
                const auto& args2 = pspec->args;
                if (args2.empty()) throw std::invalid_argument("perturb needs a Lipschitz bound");
                int index = args2.size() > 1 ? static_cast<int>(args2[1]) : 0;
                nu = random_perturbed_family(space, mu, args2[0], index + 1,
                                             ctx.seed)[static_cast<std::size_t>(index)];
            } else {
                nu = resolve_measure(ck_nu, space, ctx.seed);
            }
            auto r = talagrand_check(space, mu, nu, ck_p, ck_K);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"nu", ck_nu},
                            {"p", format_double(ck_p)}, {"K", format_double(ck_K)}};
            return finish_check(r, "talagrand", "check talagrand");
        }
        if (c_dual->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto f = resolve_field(ck_f, space, ctx.seed);
            auto r = talagrand_dual_check(space, mu, f, ck_p, ck_K);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"f", ck_f},
                            {"p", format_double(ck_p)}, {"K", format_double(ck_K)}};
            return finish_check(r, "dual_talagrand", "check dual-talagrand");
        }
        if (c_hc->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto f = resolve_field(ck_f, space, ctx.seed);
            double rho = ck_rho > 0 ? ck_rho : hc_rho_for_equality(ck_a, ck_K, ck_q);
            auto ts = parse_linear_grid(ck_tgrid);
            auto r = hypercontractivity_curve(space, mu, f, ck_a, rho, ck_q, ts);
            // sampled F(t) as CSV next to the report
            std::filesystem::create_directories(ctx.out_dir);
            std::ostringstream csv;
            csv << "t,F\n";
            for (std::size_t i = 0; i < ts.size(); ++i)
                csv << format_double(r.samples[0].second[i]) << ','
                    << format_double(r.samples[1].second[i]) << '\n';
            atomic_write(ctx.path_of("hc_curve.csv"), csv.str());
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"f", ck_f},
                            {"a", format_double(ck_a)}, {"rho", format_double(rho)},
                            {"q", format_double(ck_q)}, {"t-grid", ck_tgrid}};
            return finish_check(r, "hc", "check hc");
        }
        if (c_phi->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto f = resolve_field(ck_f, space, ctx.seed);
            auto ts = parse_linear_grid(ck_tgrid);
            auto r = phi_monitor(space, mu, f, ck_K, ck_q, ts);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"f", ck_f},
                            {"K", format_double(ck_K)}, {"q", format_double(ck_q)},
                            {"t-grid", ck_tgrid}};
            return finish_check(r, "phi", "check phi");
        }
        if (c_hwi->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto f = resolve_field(ck_f, space, ctx.seed);
            auto r = hwi_coupling_check(space, mu, f, ck_p);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"f", ck_f},
                            {"p", format_double(ck_p)}};
            return finish_check(r, "hwi", "check hwi");
        }
        if (c_geo->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto nu0 = resolve_measure(ck_nu0, space, ctx.seed);
            auto nu1 = resolve_measure(ck_nu1, space, ctx.seed + 1);
            auto ts = parse_linear_grid(ck_audit_tgrid);
            auto r = entropy_along_geodesic(mu, nu0, nu1, ts, space, ck_p);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure},
                            {"nu0", ck_nu0}, {"nu1", ck_nu1}, {"p", format_double(ck_p)}};
            return finish_check(r, "geodesic_entropy", "check geodesic-entropy");
        }
        if (c_slopes->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto g = resolve_field(ck_g, space, ctx.seed);
            auto eps = parse_geometric_grid(ck_epsgrid);
            auto slopes = scaling_exponent_probe(space, mu, g, ck_p, eps);
            CheckReport r;
            r.name = "scaling_slopes";
            r.constants = {{"p", ck_p},
                           {"slope_ent", slopes.slope_ent},
                           {"slope_wp", slopes.slope_wp}};
            r.lhs = 0.0;
            r.rhs = 0.0;
            r.tolerance = 0.0;
            r.samples = {{"eps", slopes.eps}, {"ent", slopes.ent}, {"wpp", slopes.wpp}};
            r.note = "informational: fitted perturbation orders";
            Digest d;
            d.add(mu.weights).add(g.values).add(ck_p);
            r.inputs_digest = d.hex();
            r.settle();
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure}, {"g", ck_g},
                            {"p", format_double(ck_p)}, {"eps-grid", ck_epsgrid}};
            return finish_check(r, "slopes", "check slopes");
        }
        if (c_l2t->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto family = resolve_family(ck_family, space, ctx.seed);
            double K = lsi_constant_estimate(space, mu, family, ck_q);
            auto nus = random_perturbed_family(space, mu, ck_lip, ck_count, ctx.seed);
            auto r = lsi_implies_talagrand_suite(space, mu, ck_q, K, nus);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure},
                            {"family", ck_family}, {"q", format_double(ck_q)},
                            {"K_hat", format_double(K)},
                            {"count", std::to_string(ck_count)},
                            {"lip", format_double(ck_lip)}};
            return finish_check(r, "suite_lsi2tal", "check suite-lsi2tal");
        }
        if (c_t2l->parsed()) {
            auto space = resolve_space(ck_space);
            auto mu = resolve_measure(ck_measure, space, ctx.seed);
            auto family = resolve_family(ck_family, space, ctx.seed);
            std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> pairs;
            auto ends = random_perturbed_family(space, mu, ck_lip, 2 * ck_count, ctx.seed);
            for (int k = 0; k < ck_count; ++k)
                pairs.emplace_back(ends[2 * k], ends[2 * k + 1]);
            TalagrandToLsiOptions opts;
            opts.ts = parse_linear_grid(ck_audit_tgrid);
            auto r = talagrand_implies_lsi_suite(space, mu, ck_p, ck_K, family, pairs, opts);
            ctx.resolved = {{"space", ck_space}, {"measure", ck_measure},
                            {"family", ck_family}, {"p", format_double(ck_p)},
                            {"K", format_double(ck_K)},
                            {"count", std::to_string(ck_count)},
                            {"lip", format_double(ck_lip)},
                            {"t-grid", ck_audit_tgrid}};
            return finish_check(r, "suite_tal2lsi", "check suite-tal2lsi");
        }

        if (rep->parsed()) {
            std::vector<CheckReport> reports;
            if (!std::filesystem::is_directory(rep_dir))
                return exit_usage(rep_dir + " is not a directory");
            std::vector<std::string> files;
            for (const auto& entry : std::filesystem::directory_iterator(rep_dir)) {
                auto p = entry.path().string();
                if (p.size() > 12 && p.rfind(".report.json") == p.size() - 12) files.push_back(p);
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) reports.push_back(load_report_json(f));
            if (reports.empty()) return exit_usage("no .report.json files in " + rep_dir);
            std::ostringstream md;
            md << CheckReport::markdown_header() << "\n";
            int fails = 0, inconclusive = 0;
            for (const auto& r : reports) {
                md << r.to_markdown_row() << "\n";
                if (r.status == CheckStatus::Fail) ++fails;
                if (r.status == CheckStatus::Inconclusive) ++inconclusive;
            }
            atomic_write(rep_out, md.str());
            std::cout << "aggregated " << reports.size() << " reports into " << rep_out << "\n";
            if (fails > 0) return 1;
            if (inconclusive > 0) return 3;
            return 0;
        }
    } catch (const std::exception& e) {
        return exit_usage(e.what());
    }
    return exit_usage("no subcommand handled");
}
