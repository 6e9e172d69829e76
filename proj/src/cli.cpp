#include "catqnd/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "catqnd/design.hpp"
#include "catqnd/errors.hpp"
#include "catqnd/fock.hpp"
#include "catqnd/lindblad.hpp"
#include "catqnd/measurement.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/zeno.hpp"

namespace catqnd::cli {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ParamSpec make(std::string name, Kind kind, json def, std::string help) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = kind;
    p.default_value = std::move(def);
    p.help = std::move(help);
    return p;
}
ParamSpec real(std::string name, double def, std::string help) {
    return make(std::move(name), Kind::Positive, def, std::move(help));
}
ParamSpec integer(std::string name, int def, int min, std::string help) {
    ParamSpec p = make(std::move(name), Kind::Integer, def, std::move(help));
    p.min_int = min;
    return p;
}
ParamSpec grid(std::string name, std::string def, std::string help, bool zero = false) {
    ParamSpec p = make(std::move(name), Kind::Grid, std::move(def), std::move(help));
    p.grid_allows_zero = zero;
    return p;
}
ParamSpec list(std::string name, std::string def, std::string help) {
    return make(std::move(name), Kind::List, std::move(def), std::move(help));
}
ParamSpec choice(std::string name, std::string def, std::vector<std::string> opts, std::string help) {
    ParamSpec p = make(std::move(name), Kind::Choice, std::move(def), std::move(help));
    p.choices = std::move(opts);
    return p;
}
ParamSpec dim_param(const char* rule) {
    return integer("dim", 0, 0, std::string("Fock truncation per mode, 0 = ") + rule);
}
ParamSpec method_param() {
    return choice("method", "exact", {"exact", "numeric", "asymptotic"},
                  "projected spectrum: exact closed form, numeric projection or saddle-point sum");
}

const std::vector<CommandSpec>& table() {
    static const std::vector<CommandSpec> t = {
        {Command::Fig1a, "diagonal of the single-mode RWA Hamiltonian in the Fock basis", "n, h_nn [E_J]",
         {real("phi", 4.0, "junction phase phi_a"), integer("n-max", 16, 1, "largest Fock number")}},
        {Command::Fig1b, "c+ and c- on the two-photon manifold versus phi_a", "phi_a, c_plus, c_minus [E_J]",
         {real("alpha", 2.0, "cat amplitude"), grid("phi-grid", "0:8:0.05", "phi_a grid a:b:step", true)}},
        {Command::Fig1c, "four-photon projected spectrum versus phi_a", "phi_a, c00, c11, c22, c33 [E_J]",
         {real("alpha", 5.0, "cat amplitude"), grid("phi-grid", "0.05:14:0.05", "phi_a grid a:b:step"),
          method_param(), dim_param("default truncation rule")}},
        {Command::Fig1d, "four-photon parity degeneracy versus alpha",
         "alpha, alpha_sq, phi_a, c00, c11, c22, c33, delta_parity, small_delta_parity, ratio [E_J]",
         {grid("alpha-grid", "2:6:0.25", "alpha grid a:b:step"),
          choice("phi-rule", "2alpha", {"2alpha", "fixed"}, "phi_a = 2 alpha, or the fixed --phi"),
          real("phi", 4.0, "phi_a when --phi-rule fixed"), method_param(), dim_param("default truncation rule")}},
        {Command::Fig3, "measurement rate and efficiency versus phi_a for several epsilon_zeno",
         "phi_a, gamma_m [E_J], then gamma_z_eps<e> [E_J] and eta_eps<e> per epsilon",
         {real("alpha", 2.0, "cat amplitude"), grid("phi-grid", "2.5:5.5:0.25", "phi_a grid a:b:step"),
          list("eps", "0.1,0.2,0.5", "epsilon_zeno = E_J / kappa values"), real("phi-c", 0.1, "readout phase phi_c"),
          real("n-c", 1.0, "readout photon number"), dim_param("dynamics truncation rule")}},
        {Command::FigS1, "two-mode induced dephasing versus alpha at phi = 2 alpha",
         "alpha, gamma_ind, jump_term, anticommutator_term, gamma_corr [kappa]",
         {grid("alpha-grid", "2:4:0.5", "alpha grid a:b:step"), real("eps", 1.0, "epsilon_zeno = E_J / kappa"),
          dim_param("default truncation rule")}},
        {Command::FigS2, "Husimi Q of the leakage state and of its projection, phi = 2 alpha",
         "alpha, panel (0 = leakage state, 1 = projected), re_gamma, im_gamma, q",
         {grid("alpha-grid", "2:5:1", "alpha grid a:b:step"), integer("points", 61, 2, "points per phase-space axis"),
          dim_param("default truncation rule")}},
        {Command::FigS3, "three-junction degeneracy feasibility map",
         "phi2, phi3, feasible, E1, E2, E3 [max E = 1], check",
         {real("alpha", 2.0, "cat amplitude"), real("phi1", 4.0, "phase of the first junction"),
          grid("phi2-grid", "1:5:0.1", "phi_2 grid a:b:step"), grid("phi3-grid", "1:5:0.1", "phi_3 grid a:b:step"),
          dim_param("default truncation rule")}},
        {Command::FigS4, "Z_q projected spectrum versus phi_a", "phi_a, c0 .. c<q-1> [E_J]",
         {real("alpha", 5.0, "cat amplitude"), integer("q", 4, 2, "number of cat components"),
          grid("phi-grid", "0.05:14:0.05", "phi_a grid a:b:step"), method_param(),
          dim_param("default truncation rule")}},
        {Command::Rates, "device-level dispersive rates and dephasing ratios",
         "omega_a_hz, chi_hz, gamma_m_hz, gamma_m_joint_hz, plus_ratio, minus_ratio, gamma_phi_plus_hz, "
         "gamma_phi_minus_hz, l_max_used",
         {real("ej-hz", 300e6, "E_J / h in Hz"), real("alpha", 2.0, "cat amplitude of mode a"),
          real("beta", 2.0, "cat amplitude of mode b"), real("phi-a", 4.0, "phase of mode a"),
          real("phi-b", 4.0, "phase of mode b"), real("fa-hz", 9.10e9, "mode a frequency in Hz"),
          real("fb-hz", 7.5e9, "mode b frequency in Hz"), real("phi-c", 0.1, "readout phase phi_c"),
          real("n-c", 1.0, "readout photon number"), integer("l-max", 12, 1, "initial harmonic cutoff"),
          real("floor-hz", 10e6, "resonance floor in Hz"), dim_param("dephasing truncation rule")}},
        {Command::Sweep, "closed-form matrix elements and rates over an (alpha, phi_a) grid",
         "alpha, phi_a, c_plus, c_minus, omega_a, omega_a_approx, gamma_m [E_J]",
         {grid("alpha-grid", "1:4:0.5", "alpha grid a:b:step"), grid("phi-grid", "0.5:8:0.5", "phi_a grid a:b:step"),
          real("phi-c", 0.1, "readout phase phi_c"), real("n-c", 1.0, "readout photon number")}},
    };
    return t;
}

const char* kNames[] = {"fig1a", "fig1b", "fig1c", "fig1d", "fig3", "figS1", "figS2", "figS3", "figS4", "rates", "sweep"};

std::optional<double> to_real(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// Shortest round-trip text of a real, as in the JSON sidecar.
std::string fmt(double x) { return json(x).dump(); }

std::string num(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double get_real(const RunConfig& c, const char* k) { return c.params.at(k).get<double>(); }
int get_int(const RunConfig& c, const char* k) { return c.params.at(k).get<int>(); }
std::string get_str(const RunConfig& c, const char* k) { return c.params.at(k).get<std::string>(); }
std::vector<double> get_grid(const RunConfig& c, const char* k) { return parse_grid(get_str(c, k), k); }

SpectrumMethod method_of(const RunConfig& c) {
    const auto m = get_str(c, "method");
    if (m == "numeric") return SpectrumMethod::Numeric;
    if (m == "asymptotic") return SpectrumMethod::Asymptotic;
    return SpectrumMethod::Exact;
}

bool has(const CommandSpec& s, const std::string& name) {
    for (const auto& p : s.params)
        if (p.name == name) return true;
    return false;
}

ReadoutParams readout_of(const RunConfig& c) {
    ReadoutParams r;
    r.phi_c = get_real(c, "phi-c");
    r.n_c = get_real(c, "n-c");
    return r;
}

SweepResult run_fig1a(const RunConfig& c) {
    const FockSpace s(get_int(c, "n-max") + 1);
    JunctionParams p;
    p.phi_a = get_real(c, "phi");
    const auto h = h_rwa_single(p, s);
    SweepResult r;
    r.columns = {"n", "h_nn"};
    for (int n = 0; n < s.dim(); ++n) r.add_row({static_cast<double>(n), h(n, n).real()});
    return r;
}

SweepResult run_fig1b(const RunConfig& c) {
    const double a = get_real(c, "alpha");
    SweepResult r;
    r.columns = {"phi_a", "c_plus", "c_minus"};
    for (double phi : get_grid(c, "phi-grid")) {
        const auto x = c_pm_normalized(1.0, phi, a);
        r.add_row({phi, x.c_plus, x.c_minus});
    }
    return r;
}

SweepResult spectrum_rows(const RunConfig& c, double a, int q, const std::vector<double>& phis) {
    const auto m = method_of(c);
    const int dim = get_int(c, "dim");
    std::vector<std::vector<double>> rows(phis.size());
    parallel_for(static_cast<int>(phis.size()), [&](int i) {
        rows[i] = {phis[i]};
        for (double v : projected_spectrum_q(1.0, phis[i], a, q, m, dim)) rows[i].push_back(v);
    });
    SweepResult r;
    r.columns = {"phi_a"};
    for (int k = 0; k < q; ++k) r.columns.push_back(q == 4 ? "c" + std::to_string(k) + std::to_string(k) : "c" + std::to_string(k));
    for (auto& row : rows) r.add_row(std::move(row));
    r.metadata["dim"] = dim > 0 ? dim : default_truncation(a);
    return r;
}

SweepResult run_fig1d(const RunConfig& c) {
    const auto alphas = get_grid(c, "alpha-grid");
    const bool fixed = get_str(c, "phi-rule") == "fixed";
    const auto m = method_of(c);
    const int dim = get_int(c, "dim");
    std::vector<std::vector<double>> rows(alphas.size());
    parallel_for(static_cast<int>(alphas.size()), [&](int i) {
        const double a = alphas[i], phi = fixed ? get_real(c, "phi") : 2 * a;
        const auto s = projected_spectrum_q(1.0, phi, a, 4, m, dim);
        const auto d = degeneracy_from_spectrum(s);
        rows[i] = {a, a * a, phi, s[0], s[1], s[2], s[3], d.delta_parity, d.small_delta_parity,
                   d.small_delta_parity / d.delta_parity};
    });
    SweepResult r;
    r.columns = {"alpha", "alpha_sq", "phi_a", "c00", "c11", "c22", "c33", "delta_parity", "small_delta_parity", "ratio"};
    for (auto& row : rows) r.add_row(std::move(row));
    return r;
}

SweepResult run_fig3(const RunConfig& c) {
    const double a = get_real(c, "alpha");
    const auto phis = get_grid(c, "phi-grid");
    const auto eps = parse_list(get_str(c, "eps"), "eps");
    GammaZOptions opt;
    opt.dim = get_int(c, "dim");
    SweepResult r;
    r.columns = {"phi_a", "gamma_m"};
    for (double e : eps) {
        r.columns.push_back("gamma_z_eps" + fmt(e));
        r.columns.push_back("eta_eps" + fmt(e));
    }
    std::vector<std::vector<double>> rows(phis.size());
    json fits = json::array();
    for (double e : eps) {
        const auto curve = efficiency_curve(a, phis, e, get_real(c, "phi-c"), get_real(c, "n-c"), opt);
        for (std::size_t i = 0; i < phis.size(); ++i) {
            if (rows[i].empty()) rows[i] = {phis[i], curve.rows[i][1]};
            rows[i].push_back(curve.rows[i][2]);
            rows[i].push_back(curve.rows[i][3]);
        }
        r.metadata["integrator"] = curve.metadata["integrator"];
        r.metadata["dim"] = curve.metadata["dim"];
        fits.push_back({{"eps", e}, {"fit", curve.metadata["fit"]}});
    }
    r.metadata["fits"] = fits;
    r.metadata["kappa"] = "E_J / eps";
    for (auto& row : rows) r.add_row(std::move(row));
    return r;
}

SweepResult run_figS1(const RunConfig& c) {
    const auto alphas = get_grid(c, "alpha-grid");
    const double eps = get_real(c, "eps");
    GammaIndOptions opt;
    opt.dim = get_int(c, "dim");
    SweepResult r;
    r.columns = {"alpha", "gamma_ind", "jump_term", "anticommutator_term", "gamma_corr"};
    // two-mode spaces are large, so the alphas run one at a time
    json warnings = json::array();
    for (double a : alphas) {
        const auto g = gamma_ind(eps, 2 * a, a, 1.0, opt);
        r.add_row({a, g.gamma_ind, g.jump_term, g.anticommutator_term, g.gamma_corr});
        if (!g.report.warning.empty()) warnings.push_back({{"alpha", a}, {"warning", g.report.warning}});
    }
    r.metadata["kappa"] = 1.0;
    r.metadata["E_J"] = eps;
    r.metadata["pseudo_inverse_cutoff"] = kPseudoInverseCutoff;
    r.metadata["warnings"] = warnings;
    return r;
}

SweepResult run_figS2(const RunConfig& c) {
    const auto alphas = get_grid(c, "alpha-grid");
    const int dim = get_int(c, "dim");
    const auto axis = default_husimi_axis(alphas.back(), get_int(c, "points"));
    std::vector<Eigen::MatrixXd> q0(alphas.size()), q1(alphas.size());
    std::vector<double> pop(alphas.size());
    parallel_for(static_cast<int>(alphas.size()), [&](int i) {
        const double a = alphas[i];
        const auto psi = zeno_leakage_state(1.0, 2 * a, a, 1.0, dim);
        const FockSpace& s = psi.space;
        const CMat rho = psi.amplitudes * psi.amplitudes.adjoint();
        const CMat proj = AsymptoticMap(two_photon_dissipator(s, a, 1.0), make_cat_basis(s, a, 2)).apply(rho);
        const CVec coh = coherent_state(s, a).amplitudes;
        pop[i] = coh.dot(proj * coh).real();
        q0[i] = husimi_grid(rho, axis, axis);
        q1[i] = husimi_grid(proj, axis, axis);
    });
    SweepResult r;
    r.columns = {"alpha", "panel", "re_gamma", "im_gamma", "q"};
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (int panel = 0; panel < 2; ++panel) {
            const auto& q = panel == 0 ? q0[i] : q1[i];
            for (std::size_t iy = 0; iy < axis.size(); ++iy)
                for (std::size_t ix = 0; ix < axis.size(); ++ix)
                    r.add_row({alphas[i], static_cast<double>(panel), axis[ix], axis[iy], q(iy, ix)});
        }
    r.metadata["population_on_alpha"] = pop;
    return r;
}

SweepResult run_figS4(const RunConfig& c) {
    return spectrum_rows(c, get_real(c, "alpha"), get_int(c, "q"), get_grid(c, "phi-grid"));
}

SweepResult run_rates(const RunConfig& c) {
    const double EJ = kTwoPi * get_real(c, "ej-hz");
    const double a = get_real(c, "alpha"), b = get_real(c, "beta");
    const double pa = get_real(c, "phi-a"), pb = get_real(c, "phi-b");
    ModeFrequencies f;
    f.omega_a = kTwoPi * get_real(c, "fa-hz");
    f.omega_b = kTwoPi * get_real(c, "fb-hz");
    const auto ro = readout_of(c);
    Rwa2Options opt;
    opt.l_max = get_int(c, "l-max");
    opt.resonance_floor = kTwoPi * get_real(c, "floor-hz");
    const auto single = dispersive_rates_single(EJ, pa, a, ro);
    const auto joint = dispersive_rates_joint(EJ, pa, pb, a, b, ro);
    const auto d = dephasing_ratios_two_mode(EJ, pa, pb, a, b, f, opt, get_int(c, "dim"));
    SweepResult r;
    r.columns = {"omega_a_hz", "chi_hz", "gamma_m_hz", "gamma_m_joint_hz", "plus_ratio", "minus_ratio",
                 "gamma_phi_plus_hz", "gamma_phi_minus_hz", "l_max_used"};
    r.add_row({omega_a_exact(EJ, pa, a) / kTwoPi, single.chi / kTwoPi, single.gamma_m / kTwoPi,
               joint.gamma_m / kTwoPi, d.plus_ratio, d.minus_ratio, d.gamma_phi_plus / kTwoPi,
               d.gamma_phi_minus / kTwoPi, static_cast<double>(d.l_max_used)});
    r.metadata["dim"] = d.dim;
    r.metadata["tail"] = d.tail;
    r.metadata["units"] = "Hz (rate / 2 pi)";
    return r;
}

SweepResult run_sweep(const RunConfig& c) {
    const auto alphas = get_grid(c, "alpha-grid");
    const auto phis = get_grid(c, "phi-grid");
    const auto ro = readout_of(c);
    SweepResult r;
    r.columns = {"alpha", "phi_a", "c_plus", "c_minus", "omega_a", "omega_a_approx", "gamma_m"};
    for (double a : alphas)
        for (double phi : phis) {
            const auto x = c_pm_normalized(1.0, phi, a);
            r.add_row({a, phi, x.c_plus, x.c_minus, omega_a_exact(1.0, phi, a), omega_a_approx(1.0, phi, a),
                       dispersive_rates_single(1.0, phi, a, ro).gamma_m});
        }
    return r;
}

// Largest cat amplitude a command touches, for the truncation check.
std::optional<double> alpha_max(const RunConfig& c) {
    const auto& p = c.params;
    double a = 0;
    if (p.contains("alpha") && p["alpha"].is_number()) a = p["alpha"].get<double>();
    if (p.contains("beta") && p["beta"].is_number()) a = std::max(a, p["beta"].get<double>());
    if (p.contains("alpha-grid") && p["alpha-grid"].is_string()) {
        try {
            const auto g = parse_grid(p["alpha-grid"].get<std::string>(), "alpha-grid");
            a = std::max(a, g.back());
        } catch (const ValidationError&) {
            return std::nullopt;
        }
    }
    if (!(a > 0)) return std::nullopt;
    return a;
}

int truncation_rule(Command c, double a) {
    switch (c) {
        case Command::Fig3: return dynamics_truncation(a);
        case Command::Rates: return dephasing_truncation(a);
        default: return default_truncation(a);
    }
}

}  // namespace

const char* command_name(Command c) { return kNames[static_cast<int>(c)]; }

std::optional<Command> parse_command(const std::string& name) {
    for (Command c : all_commands())
        if (name == command_name(c)) return c;
    return std::nullopt;
}

const std::vector<Command>& all_commands() {
    static const std::vector<Command> v = {Command::Fig1a, Command::Fig1b, Command::Fig1c, Command::Fig1d,
                                           Command::Fig3,  Command::FigS1, Command::FigS2, Command::FigS3,
                                           Command::FigS4, Command::Rates, Command::Sweep};
    return v;
}

const CommandSpec& command_spec(Command c) { return table()[static_cast<int>(c)]; }

RunConfig default_config(Command c) {
    RunConfig r;
    r.command = c;
    for (const auto& p : command_spec(c).params) r.params[p.name] = p.default_value;
    return r;
}

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
    auto fail = [&](const std::string& why) -> std::vector<double> {
        throw ValidationError("--" + field + ": " + why + " (got \"" + text + "\", expected a:b:step)");
    };
    const auto parts = split(text, ':');
    if (parts.size() == 1) {
        const auto v = to_real(parts[0]);
        if (!v) return fail("not a number");
        return {*v};
    }
    if (parts.size() != 3) return fail("expected three fields");
    const auto a = to_real(parts[0]), b = to_real(parts[1]), s = to_real(parts[2]);
    if (!a || !b || !s) return fail("not a number");
    if (!(*s > 0)) return fail("step must be positive");
    if (*b < *a) return fail("end lies below start");
    const double n = std::floor((*b - *a) / *s + 1e-9) + 1;
    if (n > 1e6) return fail("more than 10^6 points");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = *a + static_cast<double>(i) * *s;
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> v;
    for (const auto& part : split(text, ',')) {
        const auto x = to_real(part);
        if (!x) throw ValidationError("--" + field + ": not a comma-separated list of numbers (got \"" + text + "\")");
        v.push_back(*x);
    }
    if (v.empty()) throw ValidationError("--" + field + ": empty list");
    return v;
}

std::vector<Diagnostic> validate(const RunConfig& cfg) {
    std::vector<Diagnostic> out;
    const auto& spec = command_spec(cfg.command);
    const auto& p = cfg.params;
    auto bad = [&](const std::string& f, const std::string& m) { out.push_back({f, m}); };
    auto ok = [&](const std::string& f) {
        for (const auto& d : out)
            if (d.field == f) return false;
        return true;
    };
    if (!p.is_object()) {
        bad("params", "must be an object");
        return out;
    }
    for (const auto& [k, v] : p.items())
        if (!has(spec, k)) bad(k, std::string("unknown parameter for ") + command_name(cfg.command));

    for (const auto& s : spec.params) {
        if (!p.contains(s.name)) {
            bad(s.name, "missing");
            continue;
        }
        const auto& v = p[s.name];
        switch (s.kind) {
            case Kind::Positive:
            case Kind::NonNegative:
                if (!v.is_number()) {
                    bad(s.name, "must be a number, got " + v.dump());
                } else {
                    const double x = v.get<double>();
                    if (!std::isfinite(x) || (s.kind == Kind::Positive ? !(x > 0) : !(x >= 0)))
                        bad(s.name, "must be " + std::string(s.kind == Kind::Positive ? "positive" : "non-negative") +
                                        ", got " + fmt(x));
                }
                break;
            case Kind::Integer:
                if (!v.is_number_integer())
                    bad(s.name, "must be an integer, got " + v.dump());
                else if (v.get<long>() < s.min_int)
                    bad(s.name, "must be at least " + std::to_string(s.min_int) + ", got " + v.dump());
                break;
            case Kind::Grid:
            case Kind::List:
                if (!v.is_string()) {
                    bad(s.name, "must be a string, got " + v.dump());
                    break;
                }
                try {
                    const auto g = s.kind == Kind::Grid ? parse_grid(v.get<std::string>(), s.name)
                                                        : parse_list(v.get<std::string>(), s.name);
                    for (double x : g)
                        if (s.grid_allows_zero ? x < 0 : !(x > 0)) {
                            bad(s.name, std::string("values must be ") +
                                            (s.grid_allows_zero ? "non-negative" : "positive") + ", got " + fmt(x));
                            break;
                        }
                } catch (const ValidationError& e) {
                    std::string m = e.what();
                    const auto colon = m.find(": ");
                    bad(s.name, colon == std::string::npos ? m : m.substr(colon + 2));
                }
                break;
            case Kind::Choice: {
                const bool in = v.is_string() &&
                                std::find(s.choices.begin(), s.choices.end(), v.get<std::string>()) != s.choices.end();
                if (!in) {
                    std::string opts;
                    for (const auto& o : s.choices) opts += (opts.empty() ? "" : ", ") + o;
                    bad(s.name, "must be one of " + opts + ", got " + v.dump());
                }
                break;
            }
        }
    }

    if (has(spec, "phi-c") && ok("phi-c") && ok("n-c")) {
        const double g = std::pow(p["phi-c"].get<double>(), 2) * p["n-c"].get<double>();
        if (g > kDispersiveGuard)
            bad("phi-c", "dispersive guard: phi_c^2 n_c = " + fmt(g) + " exceeds " + fmt(kDispersiveGuard));
    }
    if (has(spec, "dim") && ok("dim") && p["dim"].get<int>() > 0) {
        if (const auto a = alpha_max(cfg)) {
            const int rule = truncation_rule(cfg.command, *a);
            if (p["dim"].get<int>() < rule)
                bad("dim", p["dim"].dump() + " is below the truncation rule " + std::to_string(rule) +
                               " for |alpha| = " + fmt(*a));
        }
    }
    if (cfg.command == Command::FigS3 && ok("alpha")) {
        const double a = p["alpha"].get<double>();
        for (const char* g : {"phi2-grid", "phi3-grid"}) {
            if (!ok(g)) continue;
            for (double x : parse_grid(p[g].get<std::string>(), g))
                if (x < 0.1 * a || x > 3.0 * a) {
                    bad(g, "values must lie in [0.1, 3] alpha = [" + fmt(0.1 * a) + ", " + fmt(3.0 * a) + "]");
                    break;
                }
        }
    }
    if (cfg.command == Command::Rates && ok("fa-hz") && ok("fb-hz") && ok("l-max") && ok("floor-hz")) {
        ModeFrequencies f;
        f.omega_a = kTwoPi * p["fa-hz"].get<double>();
        f.omega_b = kTwoPi * p["fb-hz"].get<double>();
        const double floor = kTwoPi * p["floor-hz"].get<double>();
        for (const auto& [la, lb] : find_resonances(f, p["l-max"].get<int>(), floor)) {
            const double det = std::abs(la * f.omega_a - lb * f.omega_b) / kTwoPi;
            bad("fa-hz", "near-resonant term (l_a=" + std::to_string(la) + ", l_b=" + std::to_string(lb) +
                             "): |l_a f_a - l_b f_b| = " + fmt(det) + " Hz is below the floor");
        }
    }
    return out;
}

SweepResult compute(const RunConfig& cfg) {
    const auto diags = validate(cfg);
    if (!diags.empty()) {
        std::string m;
        for (const auto& d : diags) m += (m.empty() ? "" : "; ") + d.field + ": " + d.message;
        throw ValidationError(m);
    }
    switch (cfg.command) {
        case Command::Fig1a: return run_fig1a(cfg);
        case Command::Fig1b: return run_fig1b(cfg);
        case Command::Fig1c: return spectrum_rows(cfg, get_real(cfg, "alpha"), 4, get_grid(cfg, "phi-grid"));
        case Command::Fig1d: return run_fig1d(cfg);
        case Command::Fig3: return run_fig3(cfg);
        case Command::FigS1: return run_figS1(cfg);
        case Command::FigS2: return run_figS2(cfg);
        case Command::FigS3:
            return feasibility_scan(get_real(cfg, "alpha"), get_real(cfg, "phi1"), get_grid(cfg, "phi2-grid"),
                                    get_grid(cfg, "phi3-grid"), get_int(cfg, "dim"));
        case Command::FigS4: return run_figS4(cfg);
        case Command::Rates: return run_rates(cfg);
        case Command::Sweep: return run_sweep(cfg);
    }
    throw ValidationError("unknown command");
}

std::string to_csv(const SweepResult& r) {
    std::string s;
    for (std::size_t i = 0; i < r.columns.size(); ++i) s += (i ? "," : "") + r.columns[i];
    s += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + num(row[i]);
        s += '\n';
    }
    return s;
}

json config_to_json(const RunConfig& cfg) {
    return {{"command", command_name(cfg.command)},
            {"format", cfg.format == Format::Csv ? "csv" : "json"},
            {"params", cfg.params}};
}

RunConfig config_from_json(const json& j) {
    const json& c = j.is_object() && j.contains("config") ? j["config"] : j;
    if (!c.is_object() || !c.contains("command") || !c["command"].is_string())
        throw ValidationError("config: expected an object with a \"command\" string");
    const auto cmd = parse_command(c["command"].get<std::string>());
    if (!cmd) throw ValidationError("config: unknown command " + c["command"].dump());
    RunConfig r = default_config(*cmd);
    if (c.contains("params")) {
        if (!c["params"].is_object()) throw ValidationError("config: \"params\" must be an object");
        for (const auto& [k, v] : c["params"].items()) r.params[k] = v;
    }
    if (c.contains("format")) {
        if (c["format"] == "csv")
            r.format = Format::Csv;
        else if (c["format"] == "json")
            r.format = Format::Json;
        else
            throw ValidationError("config: format must be csv or json");
    }
    return r;
}

json sidecar(const RunConfig& cfg, const SweepResult& r) {
    const auto& spec = command_spec(cfg.command);
    return {{"config", config_to_json(cfg)},
            {"columns", r.columns},
            {"columns_doc", spec.columns},
            {"metadata", r.metadata},
            {"rows", r.rows.size()},
            {"units", "energies in units of E_J unless noted; *_hz columns and flags in Hz"},
            {"version", kVersion}};
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DispersiveRegimeError*>(&e) ||
        dynamic_cast<const ResonanceError*>(&e))
        return 2;
    return 3;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto diags = validate(cfg);
    if (!diags.empty()) {
        for (const auto& d : diags) err << "catqnd: --" << d.field << ": " << d.message << '\n';
        return 2;
    }
    SweepResult r;
    try {
        r = compute(cfg);
    } catch (const std::exception& e) {
        err << "catqnd: " << e.what() << '\n';
        return exit_code_for(e);
    }
    const bool csv = cfg.format == Format::Csv;
    const json meta = sidecar(cfg, r);
    std::string body;
    if (csv) {
        body = to_csv(r);
    } else {
        json j = meta;
        j["data"] = r.rows;
        body = j.dump(2) + '\n';
    }
    if (cfg.output == "-") {
        out << body;
        return 0;
    }
    namespace fs = std::filesystem;
    fs::path path = cfg.output.empty() ? fs::path(std::string(command_name(cfg.command)) + (csv ? ".csv" : ".json"))
                                       : fs::path(cfg.output);
    auto write = [&](const fs::path& f, const std::string& text) {
        std::ofstream os(f, std::ios::binary);
        os << text;
        if (!os) {
            err << "catqnd: cannot write " << f.string() << '\n';
            return false;
        }
        return true;
    };
    if (!write(path, body)) return 2;
    if (csv) {
        fs::path side = path;
        side.replace_extension(".meta.json");
        if (!write(side, meta.dump(2) + '\n')) return 2;
        out << side.string() << '\n';
    }
    out << path.string() << '\n';
    return 0;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Datasets for continuous parity measurement of cat qubits: projected Hamiltonians, measurement "
                 "rates, Zeno leakage and junction design."};
    app.footer(
        "Frequencies are given in Hz and converted to angular frequencies internally. Dimensionless outputs are in "
        "units of E_J (figS1: kappa). A CSV output gets a <name>.meta.json sidecar holding the resolved config; "
        "--config accepts that sidecar and reproduces the CSV. CATQND_THREADS sets the worker count. Exit codes: "
        "0 ok, 2 invalid configuration, 3 numerical failure.");
    app.set_version_flag("--version", kVersion);
    std::string config_path, output, format;
    app.add_option("--config", config_path, "JSON config or sidecar to start from");
    app.add_option("-o,--output", output, "output path, - for stdout (default <command>.csv)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::map<Command, std::map<std::string, std::string>> given;
    std::map<Command, CLI::App*> subs;
    for (Command c : all_commands()) {
        const auto& spec = command_spec(c);
        auto* sub = app.add_subcommand(command_name(c), spec.summary);
        sub->footer("Columns: " + spec.columns);
        for (const auto& p : spec.params) {
            const std::string def = p.default_value.is_string() ? p.default_value.get<std::string>()
                                                                : p.default_value.dump();
            sub->add_option("--" + p.name, given[c][p.name], p.help + " [default " + def + "]");
        }
        subs[c] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::optional<Command> cmd;
    for (Command c : all_commands())
        if (subs[c]->parsed()) cmd = c;

    RunConfig cfg;
    if (!config_path.empty()) {
        try {
            std::ifstream is(config_path);
            if (!is) throw ValidationError("--config: cannot read " + config_path);
            json j;
            try {
                j = json::parse(is);
            } catch (const json::exception& e) {
                throw ValidationError("--config: " + std::string(e.what()));
            }
            cfg = config_from_json(j);
        } catch (const ValidationError& e) {
            err << "catqnd: " << e.what() << '\n';
            return 2;
        }
        if (cmd && *cmd != cfg.command) {
            err << "catqnd: --config holds a " << command_name(cfg.command) << " config but " << command_name(*cmd)
                << " was requested\n";
            return 2;
        }
    } else if (cmd) {
        cfg = default_config(*cmd);
    } else {
        err << app.help();
        return 2;
    }

    const auto& spec = command_spec(cfg.command);
    auto* sub = subs[cfg.command];
    for (const auto& p : spec.params) {
        if (sub->count("--" + p.name) == 0) continue;
        const std::string& text = given[cfg.command][p.name];
        if (p.kind == Kind::Positive || p.kind == Kind::NonNegative) {
            const auto v = to_real(text);
            cfg.params[p.name] = v ? json(*v) : json(text);
        } else if (p.kind == Kind::Integer) {
            long v = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            cfg.params[p.name] = ec == std::errc() && ptr == text.data() + text.size() ? json(v) : json(text);
        } else {
            cfg.params[p.name] = text;
        }
    }
    if (!format.empty()) cfg.format = format == "json" ? Format::Json : Format::Csv;
    cfg.output = output;
    return run(cfg, out, err);
}

}  // namespace catqnd::cli
