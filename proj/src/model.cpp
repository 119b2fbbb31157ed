#include "wavespec/model.hpp"

#include <cmath>
#include <sstream>

#include "wavespec/errors.hpp"
#include "wavespec/mesh.hpp"

namespace wavespec {

double ModelSpec::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw InvalidArgument("model '" + name + "' has no parameter '" + key + "'");
  return it->second;
}

ModelSpec make_gsk(double A, double B, double C, double D) {
  if (!(D > 0.0)) {
    throw InvalidArgument("gsk: diffusion D must be positive (got " + std::to_string(D) + ")");
  }
  ModelSpec m;
  m.name = "gsk";
  m.n_species = 2;
  m.params = {{"A", A}, {"B", B}, {"C", C}, {"D", D}};

  m.diffusion = [D](const Vec& u) {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 2.0 * u(0);
    a(1, 1) = D;
    return a;
  };
  m.diffusion_jacobian = [](const Vec&, const Vec& h) {
    Mat da = Mat::Zero(2, 2);
    da(0, 0) = 2.0 * h(0);
    return da;
  };
  m.diffusion_hessian = [](const Vec&, const Vec&, const Vec&) { return Mat::Zero(2, 2).eval(); };
  m.reaction = [A, B, C](const Vec& u, const Vec& p) {
    const double w = u(0), v = u(1);
    Vec f(2);
    f(0) = C * p(0) + A * (1.0 - w) - w * v * v;
    f(1) = -B * v + w * v * v;
    return f;
  };
  m.reaction_du = [A, B](const Vec& u, const Vec&) {
    const double w = u(0), v = u(1);
    Mat j(2, 2);
    j << -A - v * v, -2.0 * w * v, v * v, -B + 2.0 * w * v;
    return j;
  };
  m.reaction_dp = [C](const Vec&, const Vec&) {
    Mat j = Mat::Zero(2, 2);
    j(0, 0) = C;
    return j;
  };
  m.domain_predicate = [](const Vec& u) { return u(0) > 0.0; };
  return m;
}

ModelSpec make_scalar(const ScalarCoefficients& k) {
  ModelSpec m;
  m.name = "scalar";
  m.n_species = 1;
  m.params = {{"a0", k.a0}, {"a1", k.a1}, {"r0", k.r0}, {"r1", k.r1},
              {"r2", k.r2}, {"r3", k.r3}, {"b", k.b}};
  m.diffusion = [k](const Vec& u) { return Mat::Constant(1, 1, k.a0 + k.a1 * u(0)); };
  m.diffusion_jacobian = [k](const Vec&, const Vec& h) { return Mat::Constant(1, 1, k.a1 * h(0)); };
  m.diffusion_hessian = [](const Vec&, const Vec&, const Vec&) { return Mat::Zero(1, 1).eval(); };
  m.reaction = [k](const Vec& u, const Vec& p) {
    const double x = u(0);
    return Vec::Constant(1, k.r0 + x * (k.r1 + x * (k.r2 + x * k.r3)) + k.b * p(0));
  };
  m.reaction_du = [k](const Vec& u, const Vec&) {
    const double x = u(0);
    return Mat::Constant(1, 1, k.r1 + x * (2.0 * k.r2 + 3.0 * x * k.r3));
  };
  m.reaction_dp = [k](const Vec&, const Vec&) { return Mat::Constant(1, 1, k.b); };
  m.domain_predicate = [k](const Vec& u) { return k.a0 + k.a1 * u(0) > 0.0; };
  return m;
}

namespace {

Params merge_params(const std::string& model, const Params& defaults, const Params& given) {
  Params out = defaults;
  for (const auto& [key, value] : given) {
    if (!defaults.count(key)) throw InvalidArgument("model '" + model + "': unknown parameter '" + key + "'");
    out[key] = value;
  }
  return out;
}

}  // namespace

ModelSpec make_model(const std::string& name, const Params& params) {
  if (name == "gsk") {
    Params p = merge_params(name, {{"A", 0.02}, {"B", 0.2}, {"C", 0.2}, {"D", 0.001}}, params);
    return make_gsk(p["A"], p["B"], p["C"], p["D"]);
  }
  if (name == "scalar") {
    Params p = merge_params(name,
                            {{"a0", 1.0}, {"a1", 0.0}, {"r0", 0.0}, {"r1", 0.0},
                             {"r2", 0.0}, {"r3", 0.0}, {"b", 0.0}},
                            params);
    return make_scalar({p["a0"], p["a1"], p["r0"], p["r1"], p["r2"], p["r3"], p["b"]});
  }
  throw InvalidArgument("unknown model '" + name + "' (known: gsk, scalar)");
}

ModelSpec with_param(const ModelSpec& m, const std::string& key, double value) {
  Params p = m.params;
  if (!p.count(key)) throw InvalidArgument("model '" + m.name + "' has no parameter '" + key + "'");
  p[key] = value;
  return make_model(m.name, p);
}

namespace {

[[noreturn]] void domain_violation(const ModelSpec& m, const Vec& u) {
  std::ostringstream os;
  os << "state (" << u.transpose() << ") lies outside the parabolic region of model '" << m.name << "'";
  throw ParabolicityError(os.str());
}

}  // namespace

Mat eval_diffusion(const ModelSpec& m, const Vec& u) {
  if (!m.domain_predicate(u)) domain_violation(m, u);
  return m.diffusion(u);
}

Vec eval_reaction(const ModelSpec& m, const Vec& u, const Vec& p) {
  if (!m.domain_predicate(u)) domain_violation(m, u);
  return m.reaction(u, p);
}

bool check_parabolic(const ModelSpec& m, const Vec& u) {
  if (!u.allFinite() || !m.domain_predicate(u)) return false;
  const Mat a = m.diffusion(u);
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

PointCoefficients linearize_at(const ModelSpec& m, const Vec& u, const Vec& ux, const Vec& uxx,
                               double c) {
  const int n = m.n_species;
  PointCoefficients pc;
  pc.alpha = m.diffusion(u);
  pc.beta = m.diffusion_jacobian(u, ux) + c * Mat::Identity(n, n) + m.reaction_dp(u, ux);
  pc.gamma = m.reaction_du(u, ux);
  Vec e = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1.0;
    const Mat daj = m.diffusion_jacobian(u, e);
    pc.beta.col(j) += daj * ux;
    pc.gamma.col(j) += m.diffusion_hessian(u, ux, e) * ux + daj * uxx;
  }
  return pc;
}

LinearizationCoefficients linearization_coefficients(const ModelSpec& m, const WaveProfile& profile) {
  if (!profile.uxx) {
    throw InvalidArgument(
        "profile mesh lacks second-derivative samples; densify the mesh or call "
        "with_second_derivative() first");
  }
  LinearizationCoefficients lc;
  lc.speed = profile.speed;
  lc.period = profile.u.periodic ? profile.u.period : 0.0;
  lc.x = profile.u.nodes;
  const int n = profile.u.size();
  lc.alpha.reserve(n);
  lc.beta.reserve(n);
  lc.gamma.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vec u = profile.u.values.col(i);
    if (!check_parabolic(m, u)) {
      throw ParabolicityError("profile leaves the parabolic region at x = " + std::to_string(lc.x[i]),
                              lc.x[i]);
    }
    PointCoefficients pc = linearize_at(m, u, profile.ux.values.col(i), profile.uxx->values.col(i),
                                        profile.speed);
    lc.alpha.push_back(std::move(pc.alpha));
    lc.beta.push_back(std::move(pc.beta));
    lc.gamma.push_back(std::move(pc.gamma));
  }
  return lc;
}

}  // namespace wavespec
