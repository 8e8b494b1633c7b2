#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "fvps/entangled.hpp"
#include "fvps/errors.hpp"
#include "fvps/io.hpp"
#include "fvps/moyal.hpp"
#include "fvps/rotator.hpp"
#include "fvps/spectral.hpp"
#include "fvps/states.hpp"
#include "fvps/wigner.hpp"
#include "json.hpp"

namespace fvps::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) { return format_number(x); }

// Every option of the subcommand with its resolved value.
json resolved_config(const CLI::App& sub, const Globals& g) {
  json c;
  c["command"] = sub.get_name();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "h") continue;
    if (o->count() > 0) {
      const auto& r = o->results();
      c[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else if (o->get_default_str().empty()) {
      c[name] = nullptr;
    } else {
      c[name] = o->get_default_str();
    }
  }
  c["jobs"] = g.jobs;
  if (!g.config.empty()) c["config_file"] = g.config;
  return c;
}

void write_sidecar(const std::filesystem::path& path, const CLI::App& sub, const Globals& g, const json& tolerances,
                   const json& results) {
  json doc;
  doc["provenance"] = {{"tool", "fvps"}, {"version", version()}, {"config", resolved_config(sub, g)},
                       {"tolerances", tolerances}};
  doc["results"] = results;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
}

UnitSystem units_from(double mass, double c, double hbar) {
  UnitSystem u{mass, c, hbar};
  u.validate();
  return u;
}

// ---- factors ----

void add_factors(CLI::App& app, int& code) {
  struct P {
    double p1 = 0, p2 = 0, mass = 1, c = 1, hbar = 1;
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("factors", "Print eps, chi and the purity right-hand side for two momenta");
  sub->add_option("--p1", p->p1, "First momentum")->required();
  sub->add_option("--p2", p->p2, "Second momentum")->required();
  sub->add_option("--mass", p->mass, "Particle mass");
  sub->add_option("--c", p->c, "Speed of light");
  sub->add_option("--hbar", p->hbar, "Reduced Planck constant");
  sub->callback([p, &code] {
    const auto u = units_from(p->mass, p->c, p->hbar);
    std::cout << "eps=" << num(eps_factor(p->p1, p->p2, u)) << '\n'
              << "chi=" << num(chi_factor(p->p1, p->p2, u)) << '\n'
              << "rhs=" << num(purity_rhs(p->p1, p->p2, u) + 0.0) << '\n';
    code = kOk;
  });
}

// ---- wigner ----

void add_wigner(CLI::App& app, const Globals& g, int& code) {
  struct P {
    std::string preset;
    std::optional<double> lambda, sigma, p_max, dq;
    std::optional<std::size_t> n;
    double p_bar = 0, q_bar = 0;
    std::string mode = "relativistic";
    std::string out = "wigner.csv";
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("wigner", "Even Wigner component of a Gaussian packet: field CSV and moments JSON");
  sub->add_option("--preset", p->preset, "Named parameter set (fig1: lambda=8 on 512x512, p_max=80)")
      ->check(CLI::IsMember({"fig1"}));
  auto* lam = sub->add_option("--lambda", p->lambda, "Localization lambda_c/sigma");
  sub->add_option("--sigma", p->sigma, "Packet width")->excludes(lam);
  sub->add_option("--p-bar", p->p_bar, "Mean momentum");
  sub->add_option("--q-bar", p->q_bar, "Mean position");
  sub->add_option("--n", p->n, "Grid points per axis (power of two)");
  sub->add_option("--p-max", p->p_max, "Momentum half-width");
  sub->add_option("--dq", p->dq, "Position spacing; must satisfy dq*2dp*n = 2 pi hbar");
  sub->add_option("--mode", p->mode, "Kernel weight")->check(CLI::IsMember({"relativistic", "unity"}));
  sub->add_option("--out", p->out, "Field CSV (a JSON sidecar is written next to it)");
  sub->callback([p, sub, &g, &code] {
    const UnitSystem u;
    double lambda = 1.0;
    std::optional<std::size_t> n = p->n;
    std::optional<double> p_max = p->p_max;
    if (p->preset == "fig1") {
      lambda = 8.0;
      if (!n) n = 512;
      if (!p_max) p_max = 80.0;
    }
    if (p->lambda) lambda = *p->lambda;
    require_positive(lambda, "lambda");
    double sigma = sigma_from_lambda(lambda, u);
    if (p->sigma) {
      require_positive(*p->sigma, "sigma");
      sigma = *p->sigma;
      lambda = lambda_from_sigma(sigma, u);
    }
    if (p_max) require_positive(*p_max, "p-max");
    const double pm = p_max.value_or(std::abs(p->p_bar) + 12.0 * u.hbar / sigma);
    PhaseSpaceGrid grid = n ? PhaseSpaceGrid::conjugate_to(MomentumGrid(*n, pm), u)
                            : fit_phase_space_grid(sigma, pm, 8.0 * sigma + std::abs(p->q_bar), u);
    if (p->dq) {
      require_positive(*p->dq, "dq");
      grid = PhaseSpaceGrid(grid.momentum(), PositionAxis{grid.n_p(), *p->dq}, u);
      grid.require_conjugate("wigner");
    }
    const auto state = gaussian_state({sigma, p->p_bar, p->q_bar}, grid.momentum(), u);
    const auto mode = p->mode == "unity" ? EpsMode::unity : EpsMode::relativistic;
    const RealField w = wigner_even(state, Branch::plus, grid, mode);
    const auto m = moments(w, grid);

    CsvTable t = field_table(w, grid);
    t.metadata.insert(t.metadata.begin(), {{"lambda", num(lambda)},
                                           {"sigma", num(sigma)},
                                           {"p_bar", num(p->p_bar)},
                                           {"q_bar", num(p->q_bar)},
                                           {"mode", p->mode}});
    write_csv(p->out, t);
    const json moments_json = {{"norm", m.norm},   {"mean_q", m.mean_q}, {"mean_p", m.mean_p},
                               {"var_q", m.var_q}, {"var_p", m.var_p},   {"var_q_negative", m.var_q_negative}};
    write_sidecar(sidecar_path(p->out), *sub, g, json::object(),
                  {{"lambda", lambda}, {"sigma", sigma}, {"grid_points", grid.n_p()}, {"moments", moments_json}});
    std::cout << "lambda=" << num(lambda) << "\nnorm=" << num(m.norm) << "\nvar_q=" << num(m.var_q)
              << "\nvar_p=" << num(m.var_p) << "\nvar_q_negative=" << (m.var_q_negative ? "true" : "false") << '\n';
    code = kOk;
  });
}

// ---- evolve ----

void add_evolve(CLI::App& app, const Globals& g, int& code) {
  struct P {
    double lambda = 2, p_bar = 0.4, t = 5, tol = 1e-8;
    int reference_steps = 0;
    bool check = false;
    std::string out;
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("evolve", "Exact phase-space propagation compared with the evolved wavefunction");
  sub->add_option("--lambda", p->lambda, "Localization lambda_c/sigma");
  sub->add_option("--p-bar", p->p_bar, "Mean momentum");
  sub->add_option("--t", p->t, "Evolution time");
  sub->add_option("--tol", p->tol, "Tolerance used by --check");
  sub->add_option("--reference-steps", p->reference_steps, "Also run the midpoint reference with this many steps");
  sub->add_flag("--check", p->check, "Exit with code 3 if the deviation exceeds --tol");
  sub->add_option("--out", p->out, "Optional CSV of the evolved field");
  sub->callback([p, sub, &g, &code] {
    const UnitSystem u;
    require_positive(p->lambda, "lambda");
    require_positive(p->tol, "tol");
    if (!std::isfinite(p->t) || p->t < 0.0) throw DomainError("t must be finite and non-negative");
    if (p->reference_steps < 0) throw DomainError("reference-steps must be non-negative");
    const double sigma = sigma_from_lambda(p->lambda, u);
    const auto grid = fit_phase_space_grid(sigma, std::max(default_p_max(sigma, u), std::abs(p->p_bar) + 12.0 / sigma),
                                           8.0 * sigma + u.c * p->t, u);
    const auto state = gaussian_state({sigma, p->p_bar}, grid.momentum(), u);
    const auto e = relativistic_energy(u);
    const RealField w0 = wigner_even(state, Branch::plus, grid);
    const RealField wt = evolve_even(w0, grid, e, p->t);

    auto amp = state.amplitude(Branch::plus);
    for (std::size_t k = 0; k < amp.size(); ++k)
      amp[k] *= std::polar(1.0, -e(grid.momentum().node(static_cast<std::ptrdiff_t>(k))) * p->t / u.hbar);
    const RealField direct =
        wigner_even(ChargeBranchState::single(grid.momentum(), Branch::plus, amp), Branch::plus, grid);
    const double dev = (wt - direct).cwiseAbs().maxCoeff();
    const double drift = std::abs(moments(wt, grid).norm - moments(w0, grid).norm);

    json results = {{"grid_points", grid.n_p()}, {"max_deviation", dev}, {"norm_drift", drift}};
    std::cout << "grid_points=" << grid.n_p() << "\nmax_deviation=" << num(dev) << "\nnorm_drift=" << num(drift)
              << '\n';
    if (p->reference_steps > 0) {
      const RealField ref = evolve_timestep_reference(w0, grid, e, p->t, p->reference_steps);
      const double rdev = (ref - wt).cwiseAbs().maxCoeff();
      results["reference_deviation"] = rdev;
      std::cout << "reference_deviation=" << num(rdev) << '\n';
    }
    if (!p->out.empty()) {
      CsvTable t = field_table(wt, grid);
      t.metadata.insert(t.metadata.begin(), {{"lambda", num(p->lambda)}, {"t", num(p->t)}});
      write_csv(p->out, t);
      write_sidecar(sidecar_path(p->out), *sub, g, {{"check", p->tol}}, results);
    }
    const bool ok = dev < p->tol;
    if (p->check) std::cout << "check=" << (ok ? "pass" : "fail") << '\n';
    code = p->check && !ok ? kCheckFailed : kOk;
  });
}

// ---- coherent ----

void add_coherent(CLI::App& app, const Globals& g, int& code) {
  struct P {
    double alpha = 1, alpha_im = 0, lambda = 1;
    std::optional<double> sigma, b;
    std::size_t n_max = 0;
    std::string branch = "plus";
    std::string out = "coherent.csv";
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("coherent", "Free coherent state on a momentum grid, or rotator Fock coefficients");
  sub->add_option("--alpha", p->alpha, "Real part of alpha");
  sub->add_option("--alpha-im", p->alpha_im, "Imaginary part of alpha");
  auto* lam = sub->add_option("--lambda", p->lambda, "Localization lambda_c/sigma");
  sub->add_option("--sigma", p->sigma, "Packet width")->excludes(lam);
  sub->add_option("--b", p->b, "Field strength: emit Landau-level coefficients instead");
  sub->add_option("--n-max", p->n_max, "Landau cutoff (0 = automatic)");
  sub->add_option("--branch", p->branch, "Charge branch")->check(CLI::IsMember({"plus", "minus"}));
  sub->add_option("--out", p->out, "Output CSV");
  sub->callback([p, sub, &g, &code] {
    const UnitSystem u;
    const cplx alpha(p->alpha, p->alpha_im);
    if (p->b) {
      require_positive(*p->b, "b");
      const auto model = EnergyModel::landau(*p->b, u);
      std::size_t n_max = p->n_max ? p->n_max : 64;
      std::optional<FockExpansion> fe;
      while (!fe) {
        try {
          fe = rotator_coherent_state(alpha, model, n_max);
        } catch (const TruncationError& e) {
          if (p->n_max || e.suggested_n_max <= n_max) throw;
          n_max = e.suggested_n_max;
        }
      }
      CsvTable t;
      t.metadata = {{"b", num(*p->b)}, {"alpha_re", num(p->alpha)}, {"alpha_im", num(p->alpha_im)}};
      t.columns = {"n", "re", "im", "prob"};
      for (std::size_t n = 0; n < fe->coefficients.size(); ++n) {
        const cplx c = fe->coefficients[n];
        t.rows.push_back({static_cast<double>(n), c.real(), c.imag(), std::norm(c)});
      }
      write_csv(p->out, t);
      write_sidecar(sidecar_path(p->out), *sub, g, {{"fock_tail", kFockTailThreshold}},
                    {{"n_max", fe->n_max()}, {"tail", fe->tail}, {"norm", fe->norm()}});
      std::cout << "n_max=" << fe->n_max() << "\ntail=" << num(fe->tail) << '\n';
      code = kOk;
      return;
    }
    require_positive(p->lambda, "lambda");
    double sigma = sigma_from_lambda(p->lambda, u);
    if (p->sigma) {
      require_positive(*p->sigma, "sigma");
      sigma = *p->sigma;
    }
    const Branch br = p->branch == "plus" ? Branch::plus : Branch::minus;
    const CoherentSpec spec{alpha, sigma, br};
    const auto c = coherent_center(spec, u);
    const auto grid = fit_phase_space_grid(sigma, std::max(default_p_max(sigma, u), std::abs(c.p_bar) + 12.0 / sigma),
                                           8.0 * sigma + std::abs(c.q_bar), u);
    const auto state = free_coherent_state(spec, grid.momentum(), u);
    const double residual = coherent_eigen_residual(state, spec, u);
    const double leakage = opposite_branch_leakage(state, spec, u);
    CsvTable t = state_table(state, br);
    t.metadata.insert(t.metadata.begin(), {{"alpha_re", num(p->alpha)}, {"alpha_im", num(p->alpha_im)},
                                           {"sigma", num(sigma)}});
    write_csv(p->out, t);
    write_sidecar(sidecar_path(p->out), *sub, g, json::object(),
                  {{"q_bar", c.q_bar},
                   {"p_bar", c.p_bar},
                   {"mean_position", mean_position(state, br, u)},
                   {"mean_momentum", mean_momentum(state, br)},
                   {"eigen_residual", residual},
                   {"opposite_branch_leakage", leakage}});
    std::cout << "eigen_residual=" << num(residual) << "\nleakage=" << num(leakage) << '\n';
    code = kOk;
  });
}

// ---- rotator ----

void add_rotator(CLI::App& app, const Globals& g, int& code) {
  struct P {
    double b = 0.5, alpha = 3, alpha_im = 0, t_max = 2000, dt = 0.1;
    std::size_t n_max = 0;
    std::string spectrum = "relativistic";
    std::string out = "orbit.csv";
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("rotator", "Orbit radius of a nonlinear coherent state in a magnetic field");
  sub->add_option("--b", p->b, "Field strength hbar omega / m c^2");
  sub->add_option("--alpha", p->alpha, "Real part of alpha");
  sub->add_option("--alpha-im", p->alpha_im, "Imaginary part of alpha");
  sub->add_option("--t-max", p->t_max, "Series length");
  sub->add_option("--dt", p->dt, "Sampling step");
  sub->add_option("--n-max", p->n_max, "Landau cutoff (0 = automatic)");
  sub->add_option("--spectrum", p->spectrum, "Level spectrum")->check(CLI::IsMember({"relativistic", "equal"}));
  sub->add_option("--out", p->out, "Orbit CSV (peaks go to the JSON sidecar)");
  sub->callback([p, sub, &g, &code] {
    require_positive(p->b, "b");
    require_positive(p->dt, "dt");
    if (!(p->t_max > 0.0) || !std::isfinite(p->t_max)) throw DomainError("t-max must be positive and finite");
    const cplx alpha(p->alpha, p->alpha_im);
    RotatorModel model{p->b, p->n_max ? p->n_max : 64};
    std::optional<FockExpansion> fe;
    while (!fe) {
      try {
        fe = rotator_coherent_state(alpha, model.energy_model(), model.n_max);
      } catch (const TruncationError& e) {
        if (p->n_max || e.suggested_n_max <= model.n_max) throw;
        model.n_max = e.suggested_n_max;
      }
    }
    const auto spectrum = p->spectrum == "equal" ? Spectrum::equal_spacing : Spectrum::relativistic;
    const auto series = orbit_series(*fe, model, p->t_max, p->dt, spectrum, g.jobs);
    const auto sp = modulation_spectrum(series);
    const double w = series.omega;

    CsvTable t = orbit_table(series);
    t.metadata.insert(t.metadata.begin(), {{"b", num(p->b)}, {"alpha_re", num(p->alpha)},
                                           {"alpha_im", num(p->alpha_im)}, {"spectrum", p->spectrum}});
    write_csv(p->out, t);

    json peaks = json::array();
    for (const auto& pk : sp.peaks)
      peaks.push_back({{"frequency", pk.frequency}, {"frequency_over_omega", pk.frequency / w}, {"amplitude", pk.amplitude}});
    json results = {{"omega", w},
                    {"n_max", model.n_max},
                    {"modulation_depth", series.modulation_depth()},
                    {"collapse_rate", collapse_rate(series)},
                    {"resolution_warning", sp.resolution_warning},
                    {"peaks", peaks}};
    if (sp.lowest()) {
      results["lowest_peak_over_omega"] = sp.lowest()->frequency / w;
      results["dominant_peak_over_omega"] = sp.dominant()->frequency / w;
    }
    write_sidecar(sidecar_path(p->out), *sub, g, {{"fock_tail", kFockTailThreshold}}, results);
    std::cout << "omega=" << num(w) << "\nmodulation_depth=" << num(series.modulation_depth()) << '\n';
    if (sp.lowest()) {
      std::cout << "lowest_peak_over_omega=" << num(sp.lowest()->frequency / w) << '\n'
                << "dominant_peak_over_omega=" << num(sp.dominant()->frequency / w) << '\n';
    }
    if (sp.resolution_warning) std::cerr << "warning: series spans fewer than 4 envelope periods\n";
    code = kOk;
  });
}

// ---- entangle ----

void add_entangle(CLI::App& app, const Globals& g, int& code) {
  struct P {
    std::vector<double> sigma{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    std::vector<std::string> models{"nonrel", "rel"};
    std::vector<double> separation;
    double pair_sigma = 1.0;
    std::string out = "penalty.csv";
    std::string pair_out = "pair.csv";
  };
  auto p = std::make_shared<P>();
  auto* sub = app.add_subcommand("entangle", "Fermi overlap penalty and pair energies of identical particles");
  sub->add_option("--sigma", p->sigma, "Packet widths")->delimiter(',');
  sub->add_option("--models", p->models, "Kinematics columns")->delimiter(',')->check(CLI::IsMember({"nonrel", "rel"}));
  sub->add_option("--separation", p->separation, "Centre separations for a pair-energy table")->delimiter(',');
  sub->add_option("--pair-sigma", p->pair_sigma, "Packet width for the pair-energy table");
  sub->add_option("--out", p->out, "Penalty CSV");
  sub->add_option("--pair-out", p->pair_out, "Pair-energy CSV (only with --separation)");
  // vectors keep every value
  for (auto* o : sub->get_options()) o->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub->callback([p, sub, &g, &code] {
    if (p->sigma.empty()) throw DomainError("at least one sigma is required");
    for (double s : p->sigma) require_positive(s, "sigma");
    require_positive(p->pair_sigma, "pair-sigma");
    const bool want_nr = std::find(p->models.begin(), p->models.end(), "nonrel") != p->models.end();
    const bool want_rel = std::find(p->models.begin(), p->models.end(), "rel") != p->models.end();
    const auto rows = penalty_curve(p->sigma, {}, g.jobs);

    CsvTable t;
    t.columns = {"sigma"};
    if (want_nr) t.columns.push_back("nonrel");
    if (want_rel) t.columns.push_back("rel");
    if (want_nr && want_rel) t.columns.push_back("ratio");
    bool below = true;
    json jrows = json::array();
    for (const auto& r : rows) {
      std::vector<double> row{r.sigma};
      if (want_nr) row.push_back(r.nonrelativistic);
      if (want_rel) row.push_back(r.relativistic);
      if (want_nr && want_rel) row.push_back(r.ratio());
      t.rows.push_back(row);
      below = below && r.relativistic < r.nonrelativistic;
      jrows.push_back({{"sigma", r.sigma}, {"nonrel", r.nonrelativistic}, {"rel", r.relativistic}});
    }
    write_csv(p->out, t);
    json results = {{"rows", jrows}, {"rel_below_nonrel", below}};

    if (!p->separation.empty()) {
      CsvTable pt;
      pt.metadata = {{"sigma", num(p->pair_sigma)}};
      pt.columns = {"separation", "bose_nonrel", "fermi_nonrel", "bose_rel", "fermi_rel"};
      for (double d : p->separation) {
        std::vector<double> row{d};
        for (auto k : {Kinematics::nonrelativistic, Kinematics::relativistic})
          for (auto st : {Statistics::bose, Statistics::fermi})
            row.push_back(pair_energy({0.0, d, p->pair_sigma, st}, k).total);
        pt.rows.push_back(row);
      }
      write_csv(p->pair_out, pt);
      results["pair_table"] = p->pair_out;
    }
    write_sidecar(sidecar_path(p->out), *sub, g, json::object(), results);
    std::cout << "rows=" << rows.size() << "\nrel_below_nonrel=" << (below ? "true" : "false") << '\n';
    code = kOk;
  });
}

}  // namespace

std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot read " + path);
  std::vector<std::string> out;
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--config", path + ":" + std::to_string(no) + ": expected key=value");
    auto key = line.substr(b, eq - b);
    auto val = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    val.erase(val.find_last_not_of(" \t\r") + 1);
    if (key.empty()) throw CLI::ValidationError("--config", path + ":" + std::to_string(no) + ": empty key");
    out.push_back("--" + key + "=" + val);
  }
  return out;
}

void register_commands(CLI::App& app, const Globals& globals, int& exit_code) {
  add_factors(app, exit_code);
  add_wigner(app, globals, exit_code);
  add_evolve(app, globals, exit_code);
  add_coherent(app, globals, exit_code);
  add_rotator(app, globals, exit_code);
  add_entangle(app, globals, exit_code);
}

}  // namespace fvps::cli
