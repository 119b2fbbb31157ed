#include "wavespec/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "wavespec/bloch.hpp"
#include "wavespec/dispersion.hpp"
#include "wavespec/equilibria.hpp"
#include "wavespec/localized.hpp"
#include "wavespec/simulate.hpp"
#include "wavespec/wavetrain.hpp"

namespace wavespec {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, const std::string& provenance)
    : out_(path) {
  if (!out_) throw InvalidArgument("cannot write '" + path + "'");
  out_ << "# provenance " << provenance << "\n";
  for (size_t i = 0; i < header.size(); ++i) pending_header_ += (i ? "," : "") + header[i];
}

CsvWriter& CsvWriter::meta(const std::string& key, double value) {
  out_ << "# " << key << " = " << fmt17(value) << "\n";
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (!pending_header_.empty()) {
    out_ << pending_header_ << "\n";
    pending_header_.clear();
  }
  for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(fmt17(v));
  return row(s);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) t.meta.emplace_back(line.substr(2, eq - 2), std::strtod(line.c_str() + eq + 3, nullptr));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(std::strtod(c.c_str(), nullptr));
    if (r.size() != t.header.size()) throw InvalidArgument("'" + path + "': ragged row");
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_profile_csv(const std::string& path, const WaveProfile& p, const std::vector<std::string>& names,
                       const std::string& provenance) {
  const int N = p.n_species();
  std::vector<std::string> header = {"x"};
  for (int k = 0; k < N; ++k) header.push_back(k < static_cast<int>(names.size()) ? names[k] : "u" + std::to_string(k));
  for (int k = 0; k < N; ++k) header.push_back(header[1 + k] + "x");
  CsvWriter w(path, header, provenance);
  w.meta("L", p.length).meta("c", p.speed).meta("periodic", p.u.periodic ? 1.0 : 0.0);
  for (int i = 0; i < p.u.size(); ++i) {
    std::vector<double> r = {p.u.nodes[i]};
    for (int k = 0; k < N; ++k) r.push_back(p.u.values(k, i));
    for (int k = 0; k < N; ++k) r.push_back(p.ux.values(k, i));
    w.row(r);
  }
}

WaveProfile read_profile_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 3 || t.header.size() % 2 == 0 || t.rows.size() < 3) {
    throw InvalidArgument("'" + path + "' is not a profile file (x, u..., ux...)");
  }
  const int N = static_cast<int>(t.header.size() - 1) / 2;
  WaveProfile p;
  bool periodic = true;
  for (const auto& [k, v] : t.meta) {
    if (k == "L") p.length = v;
    if (k == "c") p.speed = v;
    if (k == "periodic") periodic = v != 0.0;
  }
  if (!(p.length > 0.0)) throw InvalidArgument("'" + path + "' lacks '# L = ...'");
  const int M = static_cast<int>(t.rows.size());
  p.u.nodes.resize(M);
  p.u.values.resize(N, M);
  p.ux = p.u;
  for (int i = 0; i < M; ++i) {
    p.u.nodes[i] = t.rows[i][0];
    for (int k = 0; k < N; ++k) {
      p.u.values(k, i) = t.rows[i][1 + k];
      p.ux.values(k, i) = t.rows[i][1 + N + k];
    }
  }
  p.ux.nodes = p.u.nodes;
  p.u.periodic = p.ux.periodic = periodic;
  if (periodic) p.u.period = p.ux.period = p.length;
  p.kind = periodic ? WaveKind::wavetrain : WaveKind::front;
  p.u.validate();
  return p;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  fs::path dir;
  std::string prov;
  ModelSpec m;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void say(const std::string& s) const {
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "[%7.1fs] ", el);
    log << buf << s << std::endl;
  }
  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) const {
    return CsvWriter(path(name), header, prov);
  }
};

std::vector<std::string> species_names(const ModelSpec& m) {
  if (m.name == "gsk") return {"w", "v"};
  std::vector<std::string> n;
  for (int k = 0; k < m.n_species; ++k) n.push_back(m.n_species == 1 ? "u" : "u" + std::to_string(k));
  return n;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Vec gsk_state_or_throw(const ModelSpec& m, const std::string& label) {
  const auto st = gsk_state(m.param("A"), m.param("B"), label);
  if (!st) throw InvalidArgument("state '" + label + "' does not exist at A = " + tag(m.param("A")));
  return st->u;
}

std::vector<SpectralCurve> write_dispersion(const Context& cx, const ModelSpec& m, const Vec& u, double c,
                                            const std::string& name) {
  const auto grid = default_kappa_grid(cx.cfg.integer("dispersion.kappa_points"), cx.cfg.real("dispersion.kappa_max"));
  const auto curves = spectrum_homogeneous(m, u, c, grid, cx.cfg.real("dispersion.jump_tol"));
  auto w = cx.csv(name, {"kappa", "branch", "re_lambda", "im_lambda"});
  for (const auto& cv : curves)
    for (size_t i = 0; i < cv.kappa.size(); ++i)
      w.row({cv.kappa[i], static_cast<double>(cv.branch), cv.lambda[i].real(), cv.lambda[i].imag()});
  return curves;
}

// ---------------------------------------------------------------- tasks

void task_equilibria(Context& cx) {
  std::vector<Equilibrium> eqs;
  const bool gsk = cx.m.name == "gsk";
  if (gsk) {
    eqs = gsk_equilibria(cx.m.param("A"), cx.m.param("B"));
  } else {
    SearchBox box{Vec::Constant(cx.m.n_species, -10.0), Vec::Constant(cx.m.n_species, 10.0)};
    eqs = find_equilibria(cx.m, box);
  }
  std::vector<std::string> header;
  if (gsk) header = {"A", "B", "label", "w", "v"};
  else {
    header = {"label"};
    for (const auto& n : species_names(cx.m)) header.push_back(n);
  }
  for (const char* h : {"parabolic", "max_re_lambda", "kappa_star"}) header.push_back(h);
  auto w = cx.csv("equilibria.csv", header);
  for (const auto& e : eqs) {
    std::vector<std::string> r;
    if (gsk) r = {fmt17(cx.m.param("A")), fmt17(cx.m.param("B"))};
    r.push_back(e.label.empty() ? "-" : e.label);
    for (int k = 0; k < e.u.size(); ++k) r.push_back(fmt17(e.u(k)));
    r.push_back(e.parabolic ? "1" : "0");
    if (e.parabolic) {
      const Growth g = max_growth(spectrum_homogeneous(cx.m, e.u, 0.0, default_kappa_grid()));
      r.push_back(fmt17(g.max_re));
      r.push_back(fmt17(g.kappa));
    } else {
      r.push_back("nan");
      r.push_back("nan");
    }
    w.row(r);
  }
  cx.say("equilibria: " + std::to_string(eqs.size()) + " states");
}

void task_dispersion(Context& cx) {
  const Vec u = gsk_state_or_throw(cx.m, cx.cfg.text("dispersion.state"));
  const auto curves = write_dispersion(cx, cx.m, u, cx.cfg.real("dispersion.c"), "dispersion.csv");
  const Growth g = max_growth(curves);
  cx.csv("dispersion_summary.csv", {"max_re_lambda", "kappa_star"}).row({g.max_re, g.kappa});
  cx.say("dispersion: max Re lambda = " + fmt17(g.max_re) + " at kappa = " + fmt17(g.kappa));
}

OnsetResult compute_onset(const Context& cx) {
  const ModelFamily fam = gsk_plus_family(cx.m.param("B"), cx.m.param("C"), cx.m.param("D"));
  return detect_turing_hopf(fam, 0.0, cx.cfg.real("onset.lo"), cx.cfg.real("onset.hi"), cx.cfg.real("onset.tol"),
                            default_kappa_grid(cx.cfg.integer("dispersion.kappa_points"),
                                               cx.cfg.real("dispersion.kappa_max")));
}

void task_turing_hopf(Context& cx) {
  const OnsetResult o = compute_onset(cx);
  cx.csv("onset.csv", {"A", "kappa", "im_lambda", "flag", "iterations"})
      .row({fmt17(o.theta), fmt17(o.kappa), fmt17(o.im_lambda), o.flag, std::to_string(o.iterations)});
  cx.say("onset: A = " + fmt17(o.theta) + " (" + o.flag + ")");
}

BranchOptions branch_options(const Context& cx) {
  BranchOptions o;
  o.log = [&cx](const std::string& s) { cx.say("  " + s); };
  o.bvp.defect_tol = cx.cfg.real("wavetrain.defect_tol");
  o.step.hmax = cx.cfg.real("wavetrain.hmax");
  o.max_points = cx.cfg.integer("wavetrain.max_points");
  return o;
}

WaveProfile seed_profile(const Context& cx) {
  const double L = cx.cfg.real("wavetrain.L");
  cx.say("seeding wavetrain at L = " + tag(L));
  BranchOptions o;
  o.log = [&cx](const std::string& s) { cx.say("  " + s); };
  const SeedResult s = gsk_seed_wavetrain(cx.m.param("A"), cx.m.param("B"), cx.m.param("C"), cx.m.param("D"), L, o);
  return s.profile;
}

struct Branches {
  WaveProfile seed;
  WaveBranch down;  // through the fold onto the upper branch
  WaveBranch up;
};

Branches compute_branches(const Context& cx) {
  Branches b;
  b.seed = seed_profile(cx);
  const BranchOptions o = branch_options(cx);
  const double lo = cx.cfg.real("wavetrain.L_min"), hi = cx.cfg.real("wavetrain.L_max");
  cx.say("continuing in L towards smaller wavelengths");
  b.down = continue_branch(cx.m, b.seed, "L", lo, hi, -1, o);
  cx.say("continuing in L towards larger wavelengths");
  b.up = continue_branch(cx.m, b.seed, "L", lo, hi, +1, o);
  return b;
}

void task_wavetrain(Context& cx) {
  const Branches b = compute_branches(cx);
  // one curve: the up branch reversed, then the down branch
  std::vector<std::pair<const WaveBranch*, size_t>> pts;
  for (size_t k = b.up.size(); k-- > 1;) pts.emplace_back(&b.up, k);
  for (size_t k = 0; k < b.down.size(); ++k) pts.emplace_back(&b.down, k);
  const bool profiles = cx.cfg.flag("wavetrain.profiles");
  auto w = cx.csv("branch.csv", {"idx", "L", "c", "s_max_w", "s_l2", "fold_flag"});
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& [br, k] = pts[i];
    w.row({static_cast<double>(i), br->L[k], br->c[k], br->s_max_w[k], br->s_l2[k], br->fold_flag[k] ? 1.0 : 0.0});
    if (profiles) write_profile_csv(cx.path("profile_" + std::to_string(i) + ".csv"), br->profiles[k],
                                    species_names(cx.m), cx.prov);
  }
  auto fw = cx.csv("folds.csv", {"L", "c", "s_max_w"});
  for (const auto& f : b.down.folds) fw.row({f.param, f.profile.speed, measure_max(f.profile)});
  for (const auto& f : b.up.folds) fw.row({f.param, f.profile.speed, measure_max(f.profile)});
  cx.say("wavetrain: " + std::to_string(pts.size()) + " points, " +
         std::to_string(b.down.folds.size() + b.up.folds.size()) + " fold(s)");
}

WaveProfile profile_for_bloch(const Context& cx) {
  const std::string file = cx.cfg.text("simulate.profile");
  const double L = cx.cfg.real("bloch.L");
  const WaveProfile guess = file.empty() ? seed_profile(cx) : read_profile_csv(file);
  cx.say("solving the wavetrain at L = " + tag(L));
  return solve_wavetrain(cx.m, L, guess, SpeedMode::free);
}

WavetrainSpectrum::Options spectrum_options(const Context& cx) {
  WavetrainSpectrum::Options o;
  o.M_grid = cx.cfg.integer("bloch.M_grid");
  return o;
}

void write_mode_csv(const Context& cx, const GrowthSetup& g, const std::string& name) {
  auto names = species_names(cx.m);
  std::vector<std::string> header = {"x"};
  header.insert(header.end(), names.begin(), names.end());
  auto w = cx.csv(name, header);
  w.meta("gamma", g.gamma).meta("re_lambda", g.predicted.real()).meta("im_lambda", g.predicted.imag());
  const double h = g.length / g.mode.cols();
  for (int i = 0; i < g.mode.cols(); ++i) {
    std::vector<double> r = {i * h};
    for (int k = 0; k < g.mode.rows(); ++k) r.push_back(g.mode(k, i));
    w.row(r);
  }
}

void task_bloch(Context& cx) {
  const WaveProfile p = profile_for_bloch(cx);
  write_profile_csv(cx.path("profile.csv"), p, species_names(cx.m), cx.prov);
  const WavetrainSpectrum ws(cx.m, p, spectrum_options(cx));
  const auto grid = gamma_grid(cx.cfg.integer("bloch.gamma_points"), cx.cfg.real("bloch.gamma_max"));
  cx.say("Bloch matrix spectrum on " + std::to_string(grid.size()) + " gamma values (M = " +
         std::to_string(ws.grid_points()) + ")");
  const auto curves = bloch_matrix_spectrum(ws, grid, cx.cfg.integer("bloch.n_modes"), cx.cfg.real("bloch.jump_tol"));
  cx.say("tracing the origin curve with the period map");
  const SpectralCurve traced = trace_origin_curve(ws, grid, cx.cfg.real("bloch.jump_tol"));
  auto w = cx.csv("bloch.csv", {"gamma", "kappa", "branch", "re_lambda", "im_lambda", "method"});
  for (const auto& cv : curves)
    for (size_t i = 0; i < cv.kappa.size(); ++i)
      w.row({fmt17(cv.kappa[i] * ws.period()), fmt17(cv.kappa[i]), std::to_string(cv.branch),
             fmt17(cv.lambda[i].real()), fmt17(cv.lambda[i].imag()), "bloch_matrix"});
  for (size_t i = 0; i < traced.kappa.size(); ++i)
    w.row({fmt17(traced.kappa[i] * ws.period()), fmt17(traced.kappa[i]), "0", fmt17(traced.lambda[i].real()),
           fmt17(traced.lambda[i].imag()), "monodromy"});
  const int q = cx.cfg.integer("simulate.periods");
  const GrowthSetup g = wavetrain_setup(cx.m, ws, q, cx.cfg.integer("simulate.j"),
                                        cx.cfg.integer("simulate.points_per_period"));
  write_mode_csv(cx, g, "mode.csv");
  cx.say("bloch: most unstable mode at gamma = " + fmt17(g.gamma) + ": lambda = " + fmt17(g.predicted.real()) +
         (g.predicted.imag() < 0 ? " - " : " + ") + fmt17(std::abs(g.predicted.imag())) + "i");
}

SidebandScan compute_sideband(const Context& cx, const WaveProfile& guess) {
  const int M = cx.cfg.integer("bloch.M_grid");
  return detect_sideband(
      [&](double L) {
        const double k = sideband_curvature_at(cx.m, guess, L, M);
        cx.say("  curvature at L = " + fmt17(L) + ": " + fmt17(k));
        return k;
      },
      cx.cfg.real("sideband.L_lo"), cx.cfg.real("sideband.L_hi"), cx.cfg.real("sideband.tol"));
}

void task_sideband(Context& cx) {
  const WaveProfile seed = seed_profile(cx);
  const SidebandScan s = compute_sideband(cx, seed);
  auto w = cx.csv("sideband.csv", {"L", "curvature"});
  for (size_t i = 0; i < s.L.size(); ++i) w.row({s.L[i], s.curvature[i]});
  cx.csv("sideband_summary.csv", {"L_star", "iterations"}).row({s.L_star, static_cast<double>(s.iterations)});
  cx.say("sideband: L* = " + fmt17(s.L_star));
}

void task_evans(Context& cx) {
  const FrontFixture fx = nagumo_front_fixture(cx.cfg.real("evans.a"), cx.cfg.real("evans.X"),
                                               cx.cfg.integer("evans.nodes"));
  EvansOptions eo;
  eo.step = cx.cfg.real("evans.step");
  const int n = cx.cfg.integer("evans.grid");
  const double r0 = cx.cfg.real("evans.re_min"), r1 = cx.cfg.real("evans.re_max");
  const double i0 = cx.cfg.real("evans.im_min"), i1 = cx.cfg.real("evans.im_max");
  const int threads = cx.cfg.threads();
  auto lam = [&](int k) {
    const int a = k / n, b = k % n;
    const double fr = n > 1 ? static_cast<double>(a) / (n - 1) : 0.0;
    const double fi = n > 1 ? static_cast<double>(b) / (n - 1) : 0.0;
    return cplx(r0 + (r1 - r0) * fr, i0 + (i1 - i0) * fi);
  };
  const auto vals = parallel_map<cplx>(n * n, threads, [&](int k) {
    try {
      return evans_function(fx.model, fx.profile, lam(k), eo).value;
    } catch (const InvalidArgument&) {
      return cplx(std::nan(""), std::nan(""));
    }
  });
  auto w = cx.csv("evans.csv", {"re_lambda", "im_lambda", "re_E", "im_E"});
  for (int k = 0; k < n * n; ++k) w.row({lam(k).real(), lam(k).imag(), vals[k].real(), vals[k].imag()});

  const cplx center(cx.cfg.real("evans.center_re"), cx.cfg.real("evans.center_im"));
  const double radius = cx.cfg.real("evans.radius");
  const int np = cx.cfg.integer("evans.contour_points");
  auto winding = [&](int pts) {
    const auto z = circle_contour(center, radius, pts);
    const auto e = parallel_map<cplx>(pts, threads, [&](int k) { return evans_function(fx.model, fx.profile, z[k], eo).value; });
    return winding_number(e);
  };
  const int w1 = winding(np), w2 = winding(2 * np);
  cx.csv("evans_winding.csv", {"center_re", "center_im", "radius", "points", "winding", "winding_refined"})
      .row({center.real(), center.imag(), radius, static_cast<double>(np), static_cast<double>(w1),
            static_cast<double>(w2)});
  cx.say("evans: winding number " + std::to_string(w1) + " (" + std::to_string(w2) + " with " +
         std::to_string(2 * np) + " points)");
}

GrowthOptions growth_options(const Context& cx) {
  GrowthOptions go;
  go.epsilon = cx.cfg.real("simulate.epsilon");
  go.T = cx.cfg.real("simulate.T");
  go.dt = cx.cfg.real("simulate.dt");
  go.record_every = cx.cfg.real("simulate.record_every");
  go.scheme = cx.cfg.text("simulate.scheme") == "tr-bdf2" ? TimeScheme::tr_bdf2 : TimeScheme::implicit_euler;
  go.stop_after_window = cx.cfg.flag("simulate.stop_after_window");
  return go;
}

GrowthSetup homogeneous_growth_setup(const Context& cx, const ModelSpec& m, const std::string& label) {
  const Vec u = gsk_state_or_throw(m, label);
  double kappa = cx.cfg.real("simulate.kappa");
  if (kappa == 0.0) {
    kappa = max_growth(spectrum_homogeneous(m, u, 0.0, default_kappa_grid(cx.cfg.integer("dispersion.kappa_points"),
                                                                           cx.cfg.real("dispersion.kappa_max"))))
                .kappa;
    if (!(kappa > 0.0)) throw InvalidArgument("simulate: the most unstable wavenumber is 0; set simulate.kappa");
  }
  return homogeneous_setup(m, u, kappa, 0.0, cx.cfg.integer("simulate.periods"),
                           cx.cfg.integer("simulate.points_per_period"));
}

GrowthSetup wavetrain_growth_setup(const Context& cx) {
  const std::string pfile = cx.cfg.text("simulate.profile");
  const std::string mfile = cx.cfg.text("simulate.mode");
  const int q = cx.cfg.integer("simulate.periods");
  const int P = cx.cfg.integer("simulate.points_per_period");
  if (pfile.empty()) throw InvalidArgument("simulate: simulate.profile is required for a wavetrain base");
  const WaveProfile p = read_profile_csv(pfile);
  if (mfile.empty()) {
    const WavetrainSpectrum ws(cx.m, p, spectrum_options(cx));
    return wavetrain_setup(cx.m, ws, q, cx.cfg.integer("simulate.j"), P);
  }
  GrowthSetup g;
  const DiscreteWave dw = discrete_wavetrain(cx.m, p, P);
  g.base = dw.u.replicate(1, q);
  g.length = q * dw.length;
  g.c = dw.c;
  g.base_period_points = P;
  const CsvTable t = read_csv(mfile);
  if (static_cast<int>(t.rows.size()) != q * P || static_cast<int>(t.header.size()) != cx.m.n_species + 1) {
    throw InvalidArgument("simulate: mode file does not match periods x points_per_period");
  }
  g.mode.resize(cx.m.n_species, q * P);
  for (int i = 0; i < q * P; ++i)
    for (int k = 0; k < cx.m.n_species; ++k) g.mode(k, i) = t.rows[i][1 + k];
  double re = std::nan(""), im = std::nan("");
  for (const auto& [k, v] : t.meta) {
    if (k == "re_lambda") re = v;
    if (k == "im_lambda") im = v;
    if (k == "gamma") g.gamma = v;
  }
  g.predicted = cplx(re, im);
  return g;
}

void write_growth(const Context& cx, const GrowthSetup& g, const GrowthResult& r, const std::string& prefix) {
  auto h = cx.csv(prefix + "history.csv", {"t", "q", "min_w"});
  for (size_t i = 0; i < r.history.t.size(); ++i) h.row({r.history.t[i], r.history.q[i], r.history.min_first[i]});
  cx.csv(prefix + "growth_summary.csv", {"sigma", "predicted_re", "predicted_im", "fit_ok", "q0", "max_ratio",
                                         "min_w", "t_lo", "t_hi", "diagnostic"})
      .row({fmt17(r.sigma), fmt17(g.predicted.real()), fmt17(g.predicted.imag()), r.ok ? "1" : "0", fmt17(r.q0),
            fmt17(r.max_ratio), fmt17(r.min_first), fmt17(r.t_lo), fmt17(r.t_hi),
            r.diagnostic.empty() ? "-" : "\"" + r.diagnostic + "\""});
}

void task_simulate(Context& cx) {
  const GrowthSetup g = cx.cfg.text("simulate.base") == "homogeneous"
                            ? homogeneous_growth_setup(cx, cx.m, cx.cfg.text("simulate.state"))
                            : wavetrain_growth_setup(cx);
  GrowthOptions go = growth_options(cx);
  const int nsnap = cx.cfg.integer("simulate.snapshots");
  int taken = 0;
  const auto names = species_names(cx.m);
  if (nsnap > 0) {
    go.on_record = [&](const SimState& s) {
      if (taken >= nsnap || s.t + 1e-9 < taken * go.T / std::max(1, nsnap - 1)) return;
      std::vector<std::string> header = {"x"};
      header.insert(header.end(), names.begin(), names.end());
      auto w = cx.csv("snap_" + std::to_string(taken) + ".csv", header);
      w.meta("t", s.t);
      for (int i = 0; i < s.points(); ++i) {
        std::vector<double> r = {i * s.h()};
        for (int k = 0; k < s.u.rows(); ++k) r.push_back(s.u(k, i));
        w.row(r);
      }
      ++taken;
    };
  }
  cx.say("simulating on " + std::to_string(g.base.cols()) + " points, length " + fmt17(g.length));
  const GrowthResult r = growth_experiment(cx.m, g, go);
  write_growth(cx, g, r, "");
  if (!r.diagnostic.empty()) cx.say("simulate: " + r.diagnostic);
  cx.say("simulate: sigma = " + fmt17(r.sigma) + " (predicted " + fmt17(g.predicted.real()) + ")");
}

// ------------------------------------------------------- reproduce-paper

void task_reproduce(Context& cx, std::vector<TargetCheck>& checks) {
  auto check = [&](const std::string& name, double value, const std::string& expected, bool pass) {
    checks.push_back({name, value, expected, pass});
    cx.say(std::string(pass ? "PASS " : "FAIL ") + name + ": " + fmt17(value) + " (expected " + expected + ")");
  };
  const int threads = cx.cfg.threads();

  // homogeneous states and dispersion
  const std::vector<double> As = {0.43, 0.53, 0.63};
  std::vector<Growth> gr(As.size());
  {
    auto w = cx.csv("equilibria.csv", {"A", "B", "label", "w", "v", "parabolic"});
    for (double A : As)
      for (const auto& e : gsk_equilibria(A, cx.m.param("B")))
        w.row({fmt17(A), fmt17(cx.m.param("B")), e.label, fmt17(e.u(0)), fmt17(e.u(1)), e.parabolic ? "1" : "0"});
  }
  const auto curves = parallel_map<std::vector<SpectralCurve>>(static_cast<int>(As.size()), threads, [&](int i) {
    const ModelSpec mA = with_param(cx.m, "A", As[i]);
    return spectrum_homogeneous(mA, gsk_state_or_throw(mA, "plus"), 0.0,
                                default_kappa_grid(cx.cfg.integer("dispersion.kappa_points"),
                                                   cx.cfg.real("dispersion.kappa_max")));
  });
  for (size_t i = 0; i < As.size(); ++i) {
    auto w = cx.csv("dispersion_A" + tag(As[i]) + ".csv", {"kappa", "branch", "re_lambda", "im_lambda"});
    for (const auto& cv : curves[i])
      for (size_t k = 0; k < cv.kappa.size(); ++k)
        w.row({cv.kappa[k], static_cast<double>(cv.branch), cv.lambda[k].real(), cv.lambda[k].imag()});
    gr[i] = max_growth(curves[i]);
  }
  check("A=0.63 max Re lambda < 0", gr[2].max_re, "< 0", gr[2].max_re < 0.0);
  check("A=0.43 max Re lambda > 0", gr[0].max_re, "> 0", gr[0].max_re > 0.0);
  check("A=0.43 kappa* != 0", gr[0].kappa, "> 0", gr[0].kappa > 1e-6);
  check("A=0.53 |max Re lambda| < 0.02", gr[1].max_re, "|.| < 0.02", std::abs(gr[1].max_re) < 0.02);
  const OnsetResult on = compute_onset(cx);
  cx.csv("onset.csv", {"A", "kappa", "im_lambda", "flag"}).row({fmt17(on.theta), fmt17(on.kappa), fmt17(on.im_lambda), on.flag});
  check("Turing-Hopf onset A", on.theta, "in (0.43, 0.63)", on.theta > 0.43 && on.theta < 0.63);

  // wavetrain branch
  RunConfig wcfg = cx.cfg;
  wcfg.set("model.A", "0.02");
  Context wx{wcfg, cx.log, cx.dir, cx.prov, wcfg.model(), cx.t0};
  const Branches b = compute_branches(wx);
  {
    auto w = cx.csv("branch.csv", {"idx", "L", "c", "s_max_w", "s_l2", "fold_flag"});
    size_t idx = 0;
    for (size_t k = b.up.size(); k-- > 1;)
      w.row({static_cast<double>(idx++), b.up.L[k], b.up.c[k], b.up.s_max_w[k], b.up.s_l2[k], b.up.fold_flag[k] ? 1.0 : 0.0});
    for (size_t k = 0; k < b.down.size(); ++k)
      w.row({static_cast<double>(idx++), b.down.L[k], b.down.c[k], b.down.s_max_w[k], b.down.s_l2[k],
             b.down.fold_flag[k] ? 1.0 : 0.0});
  }
  std::vector<FoldPoint> folds;
  for (const auto* br : {&b.down, &b.up})
    for (const auto& f : br->folds)
      if (f.param >= 3.0 && f.param <= 10.0) folds.push_back(f);
  check("folds in L in [3, 10]", static_cast<double>(folds.size()), "1", folds.size() == 1);
  const double fold_L = folds.empty() ? std::nan("") : folds.front().param;
  const double fold_w = folds.empty() ? std::nan("") : measure_max(folds.front().profile);
  check("fold L", fold_L, "3.45 +- 0.1", std::abs(fold_L - 3.45) <= 0.1);
  check("max w at the fold", fold_w, "in [0.4, 0.6]", fold_w >= 0.4 && fold_w <= 0.6);
  double Lmax = 0.0, wlo = 1e300, whi = -1e300;
  const int after = b.down.folds.empty() ? static_cast<int>(b.down.size()) : b.down.folds.front().index;
  int nupper = 0;
  for (size_t k = 0; k < b.down.size(); ++k) {
    Lmax = std::max(Lmax, b.down.L[k]);
    if (static_cast<int>(k) > after && b.down.L[k] >= 40.0 && b.down.L[k] <= 80.0) {
      ++nupper;
      wlo = std::min(wlo, b.down.s_max_w[k]);
      whi = std::max(whi, b.down.s_max_w[k]);
    }
  }
  for (double L : b.up.L) Lmax = std::max(Lmax, L);
  check("branch reaches L", Lmax, ">= 40", Lmax >= 40.0);
  check("upper branch max w, L in [40, 80] (min)", wlo, "in [0.9, 1.1]", nupper > 0 && wlo >= 0.9 && whi <= 1.1);
  check("upper branch max w, L in [40, 80] (max)", whi, "in [0.9, 1.1]", nupper > 0 && wlo >= 0.9 && whi <= 1.1);

  // Bloch spectra and sideband
  std::vector<double> curv;
  for (double L : {5.9, 5.98, 6.1}) {
    const WaveProfile p = solve_wavetrain(wx.m, L, b.seed, SpeedMode::free);
    write_profile_csv(cx.path("profile_L" + tag(L) + ".csv"), p, {"w", "v"}, cx.prov);
    const WavetrainSpectrum ws(wx.m, p, spectrum_options(cx));
    const auto grid = gamma_grid(33, kPi);
    const auto bc = bloch_matrix_spectrum(ws, grid, 8);
    auto w = cx.csv("bloch_L" + tag(L) + ".csv", {"gamma", "kappa", "branch", "re_lambda", "im_lambda", "method"});
    for (const auto& cv : bc)
      for (size_t i = 0; i < cv.kappa.size(); ++i)
        w.row({fmt17(cv.kappa[i] * L), fmt17(cv.kappa[i]), std::to_string(cv.branch), fmt17(cv.lambda[i].real()),
               fmt17(cv.lambda[i].imag()), "bloch_matrix"});
    curv.push_back(sideband_curvature_at(wx.m, p, L, cx.cfg.integer("bloch.M_grid")));
    cx.say("curvature at L = " + tag(L) + ": " + fmt17(curv.back()));
  }
  check("sideband curvature at L=5.9", curv[0], "< 0", curv[0] < 0.0);
  check("sideband curvature at L=6.1", curv[2], "> 0", curv[2] > 0.0);
  double Lstar = std::nan("");
  try {
    const SidebandScan s = compute_sideband(wx, b.seed);
    Lstar = s.L_star;
    auto w = cx.csv("sideband.csv", {"L", "curvature"});
    for (size_t i = 0; i < s.L.size(); ++i) w.row({s.L[i], s.curvature[i]});
  } catch (const BracketError& e) {
    cx.say(std::string("sideband: ") + e.what());
  }
  check("sideband threshold L*", Lstar, "5.98 +- 0.05", std::abs(Lstar - 5.98) <= 0.05);

  // growth experiments
  GrowthOptions go = growth_options(cx);
  double min_w = 1e300;
  {
    RunConfig hc = cx.cfg;
    hc.set("model.A", "0.43");
    hc.set("simulate.periods", "4");
    hc.set("simulate.points_per_period", "128");
    Context hx{hc, cx.log, cx.dir, cx.prov, hc.model(), cx.t0};
    const GrowthSetup g = homogeneous_growth_setup(hx, hx.m, "plus");
    GrowthOptions o = go;
    o.T = 3000.0;
    cx.say("growth experiment: homogeneous A = 0.43");
    const GrowthResult r = growth_experiment(hx.m, g, o);
    write_growth(cx, g, r, "growth_A0.43_");
    const double rel = std::abs(r.sigma - g.predicted.real()) / std::abs(g.predicted.real());
    check("growth A=0.43 relative error", r.ok ? rel : std::nan(""), "<= 0.10", r.ok && rel <= 0.10);
    min_w = std::min(min_w, r.min_first);
  }
  for (double L : {6.1, 5.9}) {
    const WaveProfile p = solve_wavetrain(wx.m, L, b.seed, SpeedMode::free);
    const WavetrainSpectrum ws(wx.m, p, spectrum_options(cx));
    const int q = cx.cfg.integer("simulate.periods");
    const GrowthSetup g = wavetrain_setup(wx.m, ws, q, cx.cfg.integer("simulate.j"),
                                          cx.cfg.integer("simulate.points_per_period"));
    GrowthOptions o = go;
    cx.say("growth experiment: wavetrain L = " + tag(L));
    if (L == 6.1) {
      o.T = 3000.0;
      const GrowthResult r = growth_experiment(wx.m, g, o);
      write_growth(cx, g, r, "growth_L6.1_");
      const double rel = std::abs(r.sigma - g.predicted.real()) / std::abs(g.predicted.real());
      check("growth L=6.1 sigma > 0", r.sigma, "> 0", r.ok && r.sigma > 0.0);
      check("growth L=6.1 relative error", r.ok ? rel : std::nan(""), "<= 0.15", r.ok && rel <= 0.15);
      min_w = std::min(min_w, r.min_first);
    } else {
      o.T = 500.0;
      o.stop_after_window = false;
      o.stop_ratio = 5.0;
      const GrowthResult r = growth_experiment(wx.m, g, o);
      write_growth(cx, g, r, "growth_L5.9_");
      check("growth L=5.9 max q/q0 over T=500", r.max_ratio, "<= 5", r.max_ratio <= 5.0 && r.history.t.back() >= o.T - 1e-9);
      min_w = std::min(min_w, r.min_first);
    }
  }
  check("min w over all runs", min_w, "> 0", min_w > 0.0);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    const std::string t = cfg.task();
    if (t != "equilibria" && t != "evans" && cfg.text("model.name") != "gsk") {
      throw ConfigError("task '" + t + "' is only available for the gsk model");
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << std::endl;
    return kExitConfig;
  }
  const fs::path dir = cfg.output();
  fs::create_directories(dir);
  Context cx{cfg, log, dir, "", cfg.model()};
  cx.prov = "config_hash=" + cfg.hash() + " version=" + WAVESPEC_VERSION + " task=" + cfg.task();
  const std::string task = cfg.task();
  try {
    if (task == "equilibria") task_equilibria(cx);
    else if (task == "dispersion") task_dispersion(cx);
    else if (task == "turing-hopf") task_turing_hopf(cx);
    else if (task == "wavetrain") task_wavetrain(cx);
    else if (task == "bloch") task_bloch(cx);
    else if (task == "sideband") task_sideband(cx);
    else if (task == "evans") task_evans(cx);
    else if (task == "simulate") task_simulate(cx);
    else if (task == "reproduce-paper") {
      std::vector<TargetCheck> checks;
      task_reproduce(cx, checks);
      auto w = cx.csv("summary.csv", {"target", "value", "expected", "status"});
      bool all = true;
      for (const auto& c : checks) {
        w.row({"\"" + c.target + "\"", fmt17(c.value), "\"" + c.expected + "\"", c.pass ? "PASS" : "FAIL"});
        all = all && c.pass;
      }
      if (!all) return kExitTargetMiss;
    }
  } catch (const Error& e) {
    nlohmann::json j;
    j["task"] = task;
    j["kind"] = e.kind();
    j["message"] = e.what();
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) j["residual_history"] = ce->history();
    if (const auto* pe = dynamic_cast<const ParabolicityError*>(&e)) j["location"] = pe->location();
    if (const auto* pe = dynamic_cast<const PositivityError*>(&e)) {
      j["time"] = pe->time();
      j["location"] = pe->location();
    }
    std::ofstream(cx.path("error.json")) << j.dump(2) << "\n";
    log << e.kind() << " error: " << e.what() << std::endl;
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace wavespec
