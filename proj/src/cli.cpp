#include "bdspec/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdspec/asymptotics.hpp"
#include "bdspec/errors.hpp"
#include "bdspec/pencil.hpp"
#include "bdspec/radial.hpp"
#include "bdspec/recovery.hpp"
#include "bdspec/spectrum.hpp"

namespace bdspec::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

class Csv {
public:
    Csv(const fs::path& path, std::vector<std::string> header) : path_(path), out_(path)
    {
        if (!out_) throw ConfigError("cannot write " + path.string());
        row(header);
    }
    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string num(double x) { return fmt(x); }
std::string num(int x) { return std::to_string(x); }

RadialPotential load_q(const std::string& spec)
{
    if (spec == "zero" || spec.empty()) return RadialPotential::zero();
    std::size_t used = 0;
    try {
        const double c = std::stod(spec, &used);
        if (used == spec.size()) return RadialPotential::constant(c);
    } catch (const std::exception&) {
    }
    return RadialPotential::from_csv(spec);
}

double require_b(const RunConfig& c)
{
    if (!c.b) throw ConfigError("--b is required for '" + c.command + "'");
    if (!(*c.b > 0.0) || !std::isfinite(*c.b)) throw ConfigError("--b must be positive, got " + fmt(*c.b));
    return *c.b;
}

struct Window {
    double lo, hi;
};


struct Run {
    RunConfig cfg;
    BoundaryParams params;
    RadialPotential q;
    json derived = json::object();
    std::vector<std::string> outputs;
    fs::path dir;

    Window window(double lo, double hi)
    {
        Window w{cfg.lambda_min.value_or(lo), cfg.lambda_max.value_or(hi)};
        if (!(w.lo < w.hi)) throw ConfigError("--lambda-min must be below --lambda-max");
        derived["lambda_min"] = w.lo;
        derived["lambda_max"] = w.hi;
        return w;
    }

    Csv csv(const std::string& name, std::vector<std::string> header)
    {
        outputs.push_back(name);
        return Csv(dir / name, std::move(header));
    }
};

void cmd_spectrum(Run& r, std::ostream& out)
{
    const Window w = r.window(-1e6, 50.0);
    SpectrumWindow sw{w.lo, w.hi, {}};
    if (r.cfg.max_mode >= 0)
        for (int n = 0; n <= r.cfg.max_mode; ++n) sw.modes.push_back(n);
    const ShiftResult s = resolvent_shift_if_needed(r.params, r.q, r.cfg.tol);
    sw.lambda_min += s.shift;
    sw.lambda_max += s.shift;
    auto recs = assemble_spectrum_Lprime(r.params, s.q, sw, r.cfg.tol);
    unshift(recs, s.shift);
    r.derived["resolvent_shift"] = s.shift;

    Csv f = r.csv("spectrum.csv", {"paper_index", "mode_n", "lambda", "bracket_residual", "shoot_residual"});
    int neg = 0;
    for (const auto& e : recs) {
        f.row({num(e.paper_index), num(e.mode), num(e.lambda), num(e.bracket_residual), num(e.shoot_residual)});
        neg += e.paper_index < 0;
    }
    out << "spectrum: " << recs.size() << " eigenvalues in [" << fmt(w.lo) << ", " << fmt(w.hi) << "], " << neg
        << " negative\n";
}

void cmd_asymptotics(Run& r, std::ostream& out)
{
    if (r.cfg.count < 3) throw ConfigError("--count must be at least 3");
    const auto recs = negative_tail(r.params, r.q, r.cfg.count, r.cfg.tol);
    const Theta0Result th = compute_theta0(r.params.b, r.cfg.tol);
    const ModelComparison cmp = compare_spectrum_to_model(recs, make_model(r.params, r.cfg.tol));

    Csv m = r.csv("asymptotics_model.csv", {"b", "beta", "theta0", "A", "B", "t_max", "index_offset"});
    m.row({num(r.params.b), num(r.params.beta), num(th.theta0), num(th.A), num(th.B), num(th.t_max),
           num(cmp.model.index_offset)});

    std::vector<std::string> head = {"n", "lambda", "lambda_asym", "ratio", "log_residual"};
    if (r.cfg.pseudo_modes) {
        head.push_back("pseudo_log_residual");
        head.push_back("pseudo_residual");
    }
    const RadialCutoff cut{r.cfg.plateau, r.cfg.support_end};
    Csv f = r.csv("asymptotics.csv", head);
    for (auto it = cmp.rows.rbegin(); it != cmp.rows.rend(); ++it) {
        std::vector<std::string> row = {num(it->n), num(it->lambda), num(it->lambda_asym), num(it->ratio),
                                        num(it->log_residual)};
        if (r.cfg.pseudo_modes) {
            const PseudoModeResult p = pseudo_mode_residual(it->n, r.params, cut, r.q, r.cfg.tol);
            row.push_back(num(p.log_residual));
            row.push_back(num(p.residual));
        }
        f.row(row);
    }
    r.derived["theta0"] = th.theta0;
    r.derived["index_offset"] = cmp.model.index_offset;
    out << "asymptotics: theta0 = " << fmt(th.theta0) << ", " << cmp.rows.size() << " rows, deepest ratio "
        << fmt(cmp.rows.front().ratio) << "\n";
}

PencilConfig pencil_config(const RunConfig& c)
{
    if (c.truncation < 1) throw ConfigError("--truncation must be positive");
    if (c.sine_modes < 1) throw ConfigError("--sine-modes must be positive");
    if (!(c.outer_radius > 1.0)) throw ConfigError("--outer-radius must exceed 1");
    return PencilConfig{c.truncation, c.sine_modes, c.outer_radius, c.local_expansion_below};
}

void cmd_pencil(Run& r, std::ostream& out)
{
    const Window w = r.window(-3000.0, -600.0);
    const PencilConfig pc = pencil_config(r.cfg);
    if (r.cfg.sweep_points < 2) throw ConfigError("--sweep-points must be at least 2");
    const PencilWindow pw{w.lo, w.hi};
    const PencilResult res = pencil_negative_eigenvalues(r.params, r.q, pw, pc, r.cfg.tol);
    r.derived["threshold"] = res.threshold;

    Csv poles = r.csv("pencil_poles.csv", {"index", "lambda"});
    for (std::size_t i = 0; i < res.poles.size(); ++i) poles.row({num(int(i)), num(res.poles[i])});
    Csv roots = r.csv("pencil_roots.csv", {"index", "lambda", "pole", "offset", "local", "certificate_residual"});
    for (std::size_t i = 0; i < res.roots.size(); ++i) {
        const PencilRoot& x = res.roots[i];
        roots.row({num(int(i)), num(x.lambda), num(x.pole), num(x.offset), num(int(x.local)),
                   num(x.certificate.residual)});
    }
    int interlaced = 0;
    for (std::size_t i = 0; i + 1 < res.poles.size(); ++i) {
        int k = 0;
        for (const auto& x : res.roots) k += strictly_between(x, res.poles[i], res.poles[i + 1]);
        interlaced += k == 1;
    }

    // log-spaced real sweep
    Csv sweep = r.csv("pencil_sweep.csv", {"lambda", "E_value", "min_eig_MplusC", "N_used"});
    const int P = r.cfg.sweep_points;
    for (int i = 0; i < P; ++i) {
        const double lam = i == 0       ? w.lo
                           : i == P - 1 ? w.hi
                                        : -std::exp(std::log(-w.lo) + (std::log(-w.hi) - std::log(-w.lo)) * i / (P - 1));
        const PencilSlice s = assemble_slice(lam, r.params, r.q, pc, false, r.cfg.tol);
        double E = std::nan("");
        try {
            E = (m_function(ModeIndex::make(0, r.params.b), lam, r.q, r.params, r.cfg.tol) + schur_part(s)).real();
        } catch (const PoleAtLambda&) {
        }
        sweep.row({num(lam), num(E), num(min_eig_MplusC(s)), num(pc.N)});
    }

    if (r.cfg.check_truncation) {
        const TruncationCheck tc = check_truncation(r.params, r.q, pw, pc, r.cfg.tol);
        Csv t = r.csv("pencil_truncation.csv", {"index", "root_N", "root_2N", "rel_drift"});
        for (std::size_t i = 0; i < tc.roots_N.size() && i < tc.roots_2N.size(); ++i)
            t.row({num(int(i)), num(tc.roots_N[i]), num(tc.roots_2N[i]),
                   num(std::abs(tc.roots_2N[i] - tc.roots_N[i]) / std::abs(tc.roots_2N[i]))});
        r.derived["max_rel_drift"] = tc.max_rel_drift;
        out << "pencil: N vs 2N max relative drift " << fmt(tc.max_rel_drift) << "\n";
    }

    if (r.cfg.complex_sweep) {
        static constexpr double ims[] = {0.1, -1.0, 10.0, -0.1, 1.0, -10.0};
        Csv h = r.csv("pencil_herglotz.csv", {"lambda_re", "lambda_im", "E_re", "E_im", "herglotz_sign"});
        double worst = INFINITY;
        for (int i = 0; i < P; ++i) {
            const cplx lam(w.lo + (w.hi - w.lo) * i / (P - 1), ims[i % 6]);
            const cplx E = scalar_reduction_E(lam, r.params, r.q, pc, r.cfg.tol);
            const double sign = E.imag() * lam.imag();
            worst = std::min(worst, sign);
            h.row({num(lam.real()), num(lam.imag()), num(E.real()), num(E.imag()), num(sign)});
        }
        r.derived["min_herglotz_sign"] = worst;
        out << "pencil: min Im E * Im lambda over the complex sweep " << fmt(worst) << "\n";
    }
    r.derived["interlaced_pole_pairs"] = interlaced;
    out << "pencil: " << res.poles.size() << " m0 poles, " << res.roots.size() << " roots, " << interlaced
        << " pole pairs with exactly one root (threshold " << fmt(res.threshold) << ")\n";
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto a = cell.find_first_not_of(" \t\r"), b = cell.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    return out;
}

std::vector<TailEntry> read_tail(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("--tail: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("--tail: empty file " + path);
    const auto head = split(line);
    int col_l = -1, col_n = -1, col_m = -1;
    for (int i = 0; i < int(head.size()); ++i) {
        if (head[i] == "lambda") col_l = i;
        if (head[i] == "paper_index") col_n = i;
        if (head[i] == "mode_n" || head[i] == "mode") col_m = i;
    }
    if (col_l < 0) throw ConfigError("--tail: no 'lambda' column in " + path);
    std::vector<TailEntry> with_index;
    std::vector<double> plain;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        auto field = [&](int c) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cells.at(c), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells.at(c).size())
                throw ConfigError("--tail: unparsable value in row " + std::to_string(row) + " of " + path);
            return v;
        };
        if (int(cells.size()) < int(head.size()))
            throw ConfigError("--tail: short row " + std::to_string(row) + " in " + path);
        if (col_m >= 0 && field(col_m) != 0.0) continue;
        const double lam = field(col_l);
        if (!(lam < 0.0)) continue;
        if (col_n >= 0)
            with_index.push_back({int(std::lround(field(col_n))), lam});
        else
            plain.push_back(lam);
    }
    return col_n >= 0 ? with_index : index_tail(plain);
}

void cmd_recover(Run& r, std::ostream& out)
{
    RecoveryResult res;
    if (!r.cfg.tail.empty()) {
        const double shift = r.q.is_constant() ? r.q(1.0) : 0.0;
        res = recover(read_tail(r.cfg.tail), shift);
    } else {
        require_b(r.cfg);
        res = recover_roundtrip(r.params, r.q, r.cfg.n_tail, {}, r.cfg.tol);
    }
    Csv f = r.csv("recovery.csv", {"n", "lambda", "raw_quotient", "gap_estimate", "atan_estimate", "model_residual"});
    for (std::size_t i = 0; i < res.tail.size(); ++i)
        f.row({num(res.tail[i].n), num(res.tail[i].lambda), num(res.b.raw_quotient[i]),
               i == 0 ? std::string() : num(res.b.gap_estimate[i - 1]), num(res.beta.atan_estimate[i]),
               num(res.model_residual[i])});
    std::vector<std::string> head = {"b_hat", "b_raw", "theta0", "atan_beta", "beta_hat", "branch_shift", "shift"};
    std::vector<std::string> row = {num(res.b.b_hat), num(res.b.b_raw), num(res.theta0), num(res.beta.atan_beta),
                                    num(res.beta.beta_hat), num(res.beta.branch_shift), num(res.shift)};
    if (r.cfg.tail.empty()) {
        for (const char* h : {"b_true", "beta_true", "b_error", "beta_error"}) head.push_back(h);
        for (double v : {r.params.b, r.params.beta, res.b_error, res.beta_error}) row.push_back(num(v));
    }
    Csv s = r.csv("recovery_summary.csv", head);
    s.row(row);
    out << "recover: b_hat = " << fmt(res.b.b_hat) << " (raw quotient " << fmt(res.b.b_raw) << "), beta_hat = "
        << fmt(res.beta.beta_hat) << " from " << res.tail.size() << " eigenvalues";
    if (r.cfg.tail.empty()) out << "; errors " << fmt(res.b_error) << ", " << fmt(res.beta_error);
    out << "\n";
}

json manifest(const Run& r, const std::vector<std::string>& args)
{
    const RunConfig& c = r.cfg;
    const Tolerances& t = c.tol;
    json m;
    m["tool"] = "bdspec";
    m["version"] = tool_version;
    m["command"] = c.command;
    m["arguments"] = args;
    m["config"] = {{"b", c.b ? json(*c.b) : json(nullptr)},
                   {"beta", c.beta},
                   {"q", c.q},
                   {"lambda_min", c.lambda_min ? json(*c.lambda_min) : json(nullptr)},
                   {"lambda_max", c.lambda_max ? json(*c.lambda_max) : json(nullptr)},
                   {"max_mode", c.max_mode},
                   {"count", c.count},
                   {"pseudo_modes", c.pseudo_modes},
                   {"plateau", c.plateau},
                   {"support_end", c.support_end},
                   {"truncation", c.truncation},
                   {"sine_modes", c.sine_modes},
                   {"outer_radius", c.outer_radius},
                   {"local_expansion_below", c.local_expansion_below},
                   {"check_truncation", c.check_truncation},
                   {"complex_sweep", c.complex_sweep},
                   {"sweep_points", c.sweep_points},
                   {"tail", c.tail},
                   {"n_tail", c.n_tail}};
    m["tolerances"] = {{"ode_rel", t.ode_rel},         {"ode_abs", t.ode_abs},
                       {"min_step", t.min_step},       {"max_step", t.max_step},
                       {"pole_tol", t.pole_tol},       {"shoot_tol", t.shoot_tol},
                       {"delta_max", t.delta_max},     {"delta_perturbation", t.delta_perturbation},
                       {"root_rel", t.root_rel},       {"wkb_switch", t.wkb_switch},
                       {"x_switch", t.x_switch},       {"precision_loss", t.precision_loss},
                       {"quad_abs", t.quad_abs},       {"theta0_t0", t.theta0_t0},
                       {"theta0_richardson", t.theta0_richardson}, {"shift_margin", t.shift_margin},
                       {"zero_eigen_tol", t.zero_eigen_tol}};
    m["derived"] = r.derived;
    m["outputs"] = r.outputs;
    return m;
}

// on the top-level app so that plain key=value config lines reach them
void add_shared(CLI::App* s, RunConfig& c)
{
    s->add_option("--b", c.b, "Robin slope b > 0");
    s->add_option("--beta", c.beta, "limit-circle parameter beta");
    s->add_option("--q", c.q, "potential: zero, a constant, or a CSV file of r,q rows");
    s->add_option("--lambda-min", c.lambda_min, "window lower edge");
    s->add_option("--lambda-max", c.lambda_max, "window upper edge");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--ode-rel", c.tol.ode_rel, "ODE relative tolerance");
    s->add_option("--ode-abs", c.tol.ode_abs, "ODE absolute tolerance");
    s->add_option("--max-step", c.tol.max_step, "ODE step cap in log r");
    s->add_option("--root-rel", c.tol.root_rel, "eigenvalue root tolerance, relative");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    CLI::App app{"Spectra of the singular Robin Laplacian on a half-disc"};
    app.set_config("--config", "", "key=value file; command-line flags override it");
    app.allow_config_extras(false);
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", tool_version);
    add_shared(&app, c);

    auto* sp = app.add_subcommand("spectrum", "eigenvalues of the Robin operator in a window");
    sp->add_option("--max-mode", c.max_mode, "highest angular mode (default: from the window)");

    auto* as = app.add_subcommand("asymptotics", "negative tail against the exponential law");
    as->add_option("--count", c.count, "number of negative eigenvalues");
    as->add_flag("--pseudo-modes", c.pseudo_modes, "add cut-off pseudo-mode residuals");
    as->add_option("--plateau", c.plateau, "cutoff plateau radius");
    as->add_option("--support-end", c.support_end, "cutoff support radius");

    auto* pe = app.add_subcommand("pencil", "interface pencil roots, poles and sweeps");
    pe->add_option("--truncation", c.truncation, "number of angular modes N beside mode 0");
    pe->add_option("--sine-modes", c.sine_modes, "Dirichlet sine modes of the outer domain");
    pe->add_option("--outer-radius", c.outer_radius, "outer radius of the glued annulus");
    pe->add_option("--local-expansion-below", c.local_expansion_below, "relative pole offset for the local expansion");
    pe->add_flag("--check-truncation", c.check_truncation, "recompute the roots at 2N");
    pe->add_flag("--complex-sweep", c.complex_sweep, "sample E at non-real lambda");
    pe->add_option("--sweep-points", c.sweep_points, "points per sweep");

    auto* re = app.add_subcommand("recover", "b and beta from a negative eigenvalue tail");
    re->add_option("--tail", c.tail, "CSV with a lambda column (spectrum.csv works)");
    re->add_option("--n-tail", c.n_tail, "forward tail length when no CSV is given");

    for (auto* s : {sp, as, pe, re}) s->fallthrough();

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Run r;
    try {
        c.command = app.get_subcommands().front()->get_name();
        r.cfg = c;
        r.q = load_q(c.q);
        r.dir = c.out;
        fs::create_directories(r.dir);
        if (c.command != "recover" || c.tail.empty()) r.params = {require_b(c), c.beta};
        if (!std::isfinite(c.beta)) throw ConfigError("--beta must be finite");
        if (c.command == "spectrum") cmd_spectrum(r, out);
        if (c.command == "asymptotics") cmd_asymptotics(r, out);
        if (c.command == "pencil") cmd_pencil(r, out);
        if (c.command == "recover") cmd_recover(r, out);
        std::ofstream(r.dir / ("manifest_" + c.command + ".json")) << manifest(r, args).dump(2) << '\n';
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace bdspec::cli
