#include "moreau/certify.hpp"

#include "moreau/sobol.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

namespace {

double scene_scale(const Trajectory& traj) {
  double s = 1.0;
  for (const auto& x : traj.states()) s = std::max(s, x.lpNorm<Eigen::Infinity>());
  return s;
}

// Magnitude-space control adjoint: derivative of <q, g(m)> in each
// control magnitude, with the fixed heading directions.
Vec control_adjoint(const Vec& q, const ControlledVelocityModel& model) {
  Vec psi(model.count());
  for (Eigen::Index i = 0; i < model.count(); ++i) {
    const Eigen::Vector2d dir(std::cos(model.angles(i)), std::sin(model.angles(i)));
    psi(i) = model.speeds(i) * q.segment<2>(2 * i).dot(dir);
  }
  return psi;
}

// Exact maximum of <psi, m> over the coupled magnitude box, by vertex
// enumeration of the free coordinates.
double box_max(const Vec& psi, const ControlledVelocityModel& model) {
  std::vector<Eigen::Index> free;
  std::vector<bool> coupled(static_cast<size_t>(model.count()), false);
  // Couplings in scope bind one magnitude to a linear map of the others.
  // Solve the first nonzero coefficient for each coupling.
  struct Bound { Eigen::Index idx; Vec coeffs; double rhs; };
  std::vector<Bound> bounds;
  for (const auto& cp : model.couplings) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = 0; i < model.count(); ++i)
      if (cp.coeffs(i) != 0.0 && !coupled[static_cast<size_t>(i)]) { pivot = i; break; }
    if (pivot < 0) throw std::domain_error("box_max: degenerate coupling");
    coupled[static_cast<size_t>(pivot)] = true;
    bounds.push_back({pivot, cp.coeffs, cp.rhs});
  }
  for (Eigen::Index i = 0; i < model.count(); ++i)
    if (!coupled[static_cast<size_t>(i)]) free.push_back(i);

  auto lift = [&](const Vec& fv) {
    Vec m = Vec::Zero(model.count());
    for (size_t i = 0; i < free.size(); ++i) m(free[i]) = fv(static_cast<Eigen::Index>(i));
    for (auto it = bounds.rbegin(); it != bounds.rend(); ++it) {
      double rest = it->rhs;
      for (Eigen::Index i = 0; i < model.count(); ++i)
        if (i != it->idx) rest -= it->coeffs(i) * m(i);
      m(it->idx) = rest / it->coeffs(it->idx);
    }
    for (Eigen::Index i = 0; i < model.count(); ++i)
      m(i) = std::clamp(m(i), model.lower(i), model.upper(i));
    return m;
  };

  const auto f = static_cast<Eigen::Index>(free.size());
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << f); ++mask) {
    Vec fv(f);
    for (Eigen::Index i = 0; i < f; ++i)
      fv(i) = (mask & (1u << i)) ? model.upper(free[static_cast<size_t>(i)])
                                 : model.lower(free[static_cast<size_t>(i)]);
    best = std::max(best, psi.dot(lift(fv)));
  }
  return best;
}

double sampled_max(const Vec& psi, const ControlledVelocityModel& model, int samples) {
  std::vector<Eigen::Index> free;
  std::vector<bool> coupled(static_cast<size_t>(model.count()), false);
  for (const auto& cp : model.couplings)
    for (Eigen::Index i = 0; i < model.count(); ++i)
      if (cp.coeffs(i) != 0.0 && !coupled[static_cast<size_t>(i)]) { coupled[static_cast<size_t>(i)] = true; break; }
  for (Eigen::Index i = 0; i < model.count(); ++i)
    if (!coupled[static_cast<size_t>(i)]) free.push_back(i);
  if (free.empty()) return -std::numeric_limits<double>::infinity();

  SobolSequence seq(static_cast<int>(free.size()));
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Vec u01 = seq.next();
    Vec m = Vec::Zero(model.count());
    for (size_t i = 0; i < free.size(); ++i) {
      const double lo = model.lower(free[i]);
      const double hi = model.upper(free[i]);
      m(free[i]) = lo + (hi - lo) * u01(static_cast<Eigen::Index>(i));
    }
    for (const auto& cp : model.couplings) {
      // resolve the coupled magnitude from the sampled ones
      Eigen::Index pivot = -1;
      for (Eigen::Index i = 0; i < model.count(); ++i)
        if (cp.coeffs(i) != 0.0 &&
            std::find(free.begin(), free.end(), i) == free.end()) { pivot = i; break; }
      if (pivot < 0) continue;
      double rest = cp.rhs;
      for (Eigen::Index i = 0; i < model.count(); ++i)
        if (i != pivot) rest -= cp.coeffs(i) * m(i);
      m(pivot) = std::clamp(rest / cp.coeffs(pivot), model.lower(pivot), model.upper(pivot));
    }
    best = std::max(best, psi.dot(m));
  }
  return best;
}

}  // namespace

Vec Certificate::q_at(double t, const Mat& rows) const {
  Vec q = p;
  for (const auto& atom : gamma_atoms)
    if (atom.time > t) q -= rows.transpose() * atom.mass;
  return q;
}

double Certificate::max_residual() const {
  double m = 0.0;
  for (const auto& [name, value] : residuals) m = std::max(m, value);
  return m;
}

bool Certificate::pass(double threshold) const {
  return nontrivial && max_residual() <= threshold;
}

MultiplierReconstruction reconstruct_multipliers(const ScenarioSpec& spec, const Trajectory& traj,
                                                 const ControlSignal& u, double tol_active) {
  const double scale = scene_scale(traj);
  const double tol = tol_active * scale;

  MultiplierReconstruction out;
  const Eigen::Index k = traj.grid().k;
  out.eta.reserve(static_cast<size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vec& x_next = traj.states()[static_cast<size_t>(i + 1)];
    const Configuration c_next = Configuration::from_stacked(x_next, spec.initial.radii);
    const MovingPolyhedron raw = scenario_constraints(spec, c_next);
    const Vec g = controlled_velocity(spec.model, u.sample(i));
    const Vec defect = g - traj.velocities()[static_cast<size_t>(i)];

    const Vec slack = (spec.constraint == ConstraintKind::SumNormChain)
                          ? Vec(raw.slacks(x_next))
                          : [&] {
                              Vec s(raw.count());
                              Eigen::Index r = 0;
                              for (Eigen::Index a = 0; a < c_next.count(); ++a)
                                for (Eigen::Index b = a + 1; b < c_next.count(); ++b, ++r)
                                  s(r) = disk_distance(c_next, a, b);
                              return s;
                            }();

    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < raw.count(); ++j)
      if (slack(j) <= tol) active.push_back(j);

    Vec eta = Vec::Zero(raw.count());
    double residual = defect.norm();
    if (!active.empty()) {
      Mat A(raw.dim(), static_cast<Eigen::Index>(active.size()));
      for (size_t c = 0; c < active.size(); ++c) A.col(static_cast<Eigen::Index>(c)) = raw.rows.row(active[c]).transpose();
      const NnlsResult fit = nnls(A, defect);
      for (size_t c = 0; c < active.size(); ++c) eta(active[c]) = fit.x(static_cast<Eigen::Index>(c));
      residual = fit.residual;
    }
    out.residual = std::max(out.residual, residual);
    out.eta.push_back(std::move(eta));
  }
  return out;
}

double check_complementary_slackness(const Trajectory& traj, const std::vector<Vec>& eta,
                                     const MovingPolyhedron& constraint, double tol_active) {
  const double scale = scene_scale(traj);
  const double tol = tol_active * scale;
  double residual = 0.0;
  for (size_t i = 0; i < eta.size(); ++i) {
    // The discrete multiplier of interval i acts at the post-step state.
    const Vec& x = traj.states()[i + 1];
    const Vec slack = constraint.slacks(x);
    for (Eigen::Index j = 0; j < constraint.count(); ++j)
      residual = std::max(residual, eta[i](j) * std::max(0.0, slack(j) - tol));
  }
  return residual;
}

AdjointMaxResiduals check_adjoint_and_max(const ScenarioSpec& spec, const Trajectory& traj,
                                          const ControlSignal& u, const Certificate& cert,
                                          int samples) {
  const MovingPolyhedron constraint = build_sum_norm_constraint_set(spec);
  AdjointMaxResiduals out;
  // The perturbation map has no state dependence, so the adjoint arc is
  // the stored constant vector; its variation is zero by construction.
  out.adjoint_constancy = 0.0;

  const Eigen::Index k = traj.grid().k;
  const Eigen::Index stride = std::max<Eigen::Index>(1, k / 16);
  const int samples_per_time = std::max(1, samples / 16);
  for (Eigen::Index i = 0; i < k; i += stride) {
    const double t = traj.grid().node(i) + 0.5 * traj.grid().h();
    const Vec psi = control_adjoint(cert.q_at(t, constraint.rows), spec.model);
    const double at_candidate = psi.dot(u.sample(i));
    const double best = std::max(box_max(psi, spec.model),
                                 sampled_max(psi, spec.model, samples_per_time));
    out.max_condition = std::max(out.max_condition, best - at_candidate);
  }
  return out;
}

TransversalityResiduals check_transversality(const ScenarioSpec& spec, const Trajectory& traj,
                                             const Certificate& cert) {
  const MovingPolyhedron constraint = build_sum_norm_constraint_set(spec);
  const Vec& x0 = traj.states().front();
  const Vec& xT = traj.states().back();
  const double T = traj.grid().T;

  TransversalityResiduals out;
  out.state = (cert.mu * xT + cert.p + constraint.rows.transpose() * cert.eta_terminal).norm();
  // p is constant, so the quadrature of <p, dx/dt> telescopes exactly.
  const double h_bar = cert.p.dot(xT - x0) / T;
  out.time = std::abs(h_bar - cert.mu * T);
  const Vec slack_T = constraint.slacks(xT);
  out.endpoint_slackness = (cert.eta_terminal.array() * slack_T.array().max(0.0)).maxCoeff();
  return out;
}

Certificate certify(const ScenarioSpec& spec, const Trajectory& traj, const ControlSignal& u,
                    const CertifyOptions& opts) {
  if (spec.constraint != ConstraintKind::SumNormChain)
    throw std::domain_error("certify: only the chain constraint geometry is supported");
  if (spec.cost != CostKind::QuadraticStateTime)
    throw std::domain_error("certify: unsupported cost");

  const MovingPolyhedron constraint = build_sum_norm_constraint_set(spec);
  const double T = traj.grid().T;
  const double scale = scene_scale(traj);
  const double tol = opts.tol_active * scale;
  const Vec x0 = traj.states().front();
  const Vec xT = traj.states().back();

  Certificate cert;
  cert.mu = opts.mu;

  // Sweeping representation.
  const MultiplierReconstruction rec = reconstruct_multipliers(spec, traj, u, opts.tol_active);
  cert.eta = rec.eta;
  cert.residuals["representation"] = rec.residual;

  // Activity structure (E0 report).
  const Eigen::Index k = traj.grid().k;
  const double eta_tol = 1e-10 * std::max(1.0, scale / std::max(T, 1e-300));
  bool in_run = false;
  double run_start = 0.0;
  bool ever_active = false;
  for (Eigen::Index i = 0; i < k; ++i) {
    const bool active = cert.eta[static_cast<size_t>(i)].maxCoeff() > eta_tol;
    ever_active = ever_active || active;
    if (active && !in_run) { in_run = true; run_start = traj.grid().node(i); }
    if (!active && in_run) { in_run = false; cert.active_intervals.emplace_back(run_start, traj.grid().node(i)); }
  }
  if (in_run) cert.active_intervals.emplace_back(run_start, T);
  cert.enhanced_nontriviality = !ever_active &&
      (constraint.slacks(xT).array() > tol).all();

  // Terminal multipliers and the measure atom at T from transversality
  // and the optimal-time characteristic. The cost gradient in x is the
  // terminal state itself.
  std::vector<Eigen::Index> terminal_active;
  const Vec slack_T = constraint.slacks(xT);
  for (Eigen::Index j = 0; j < constraint.count(); ++j)
    if (slack_T(j) <= tol) terminal_active.push_back(j);

  cert.eta_terminal = Vec::Zero(constraint.count());
  Vec gamma_mass = Vec::Zero(constraint.count());
  cert.p = Vec::Zero(constraint.dim());

  if (!terminal_active.empty()) {
    Mat R(static_cast<Eigen::Index>(terminal_active.size()), constraint.dim());
    for (size_t r = 0; r < terminal_active.size(); ++r)
      R.row(static_cast<Eigen::Index>(r)) = constraint.rows.row(terminal_active[r]);

    // Total terminal mass beta per active row fits -mu*grad phi.
    const Vec beta = (R * R.transpose()).ldlt().solve(R * (-opts.mu * xT));

    // Split beta into the atom mass and eta(T) through the optimal-time
    // characteristic H_bar = mu*T, using the Fermat form p in span(R).
    const Vec delta = xT - x0;
    const Vec r_delta = R * delta;
    Vec gamma_active = Vec::Zero(beta.size());
    if (r_delta.norm() > 1e-12 * std::max(1.0, scale)) {
      // Least-norm solution of <R^T gamma, delta> = mu*T^2.
      gamma_active = r_delta * (opts.mu * T * T / r_delta.squaredNorm());
    }
    for (Eigen::Index r = 0; r < gamma_active.size(); ++r)
      gamma_active(r) = std::max(0.0, gamma_active(r));
    const Vec eta_T = (beta - gamma_active).cwiseMax(0.0);

    for (size_t r = 0; r < terminal_active.size(); ++r) {
      cert.eta_terminal(terminal_active[r]) = eta_T(static_cast<Eigen::Index>(r));
      gamma_mass(terminal_active[r]) = gamma_active(static_cast<Eigen::Index>(r));
    }
    cert.p = R.transpose() * gamma_active;
    if (gamma_active.maxCoeff() > 0.0) cert.gamma_atoms.push_back({T, gamma_mass});
  }

  // Transversality residuals with the final multipliers.
  cert.H_bar = cert.p.dot(xT - x0) / T;
  const TransversalityResiduals tv = check_transversality(spec, traj, cert);
  cert.residuals["transversality_state"] = tv.state;
  cert.residuals["transversality_time"] = tv.time;
  cert.residuals["endpoint_slackness"] = tv.endpoint_slackness;

  // Dynamic complementary slackness: eta against the slack it acts on,
  // plus orthogonality of q to active rows along the sliding arc.
  double dyn = check_complementary_slackness(traj, cert.eta, constraint, opts.tol_active);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vec q = cert.q_at(traj.grid().node(i), constraint.rows);
    for (Eigen::Index j = 0; j < constraint.count(); ++j)
      if (cert.eta[static_cast<size_t>(i)](j) > eta_tol)
        dyn = std::max(dyn, std::abs(constraint.rows.row(j).dot(q)));
  }
  cert.residuals["dyn_slackness"] = dyn;

  // Adjoint arc and global maximization condition over the control set.
  const AdjointMaxResiduals am = check_adjoint_and_max(spec, traj, u, cert, opts.samples);
  cert.residuals["adjoint_constancy"] = am.adjoint_constancy;
  cert.residuals["max_condition"] = am.max_condition;

  // Interiority of the control within U (reported, not a residual).
  cert.interiority_violated = false;
  for (Eigen::Index i = 0; i < spec.model.count(); ++i) {
    const double m = u.sample(0)(i);
    if (m >= spec.model.upper(i) * (1.0 - 1e-9) ||
        (spec.model.lower(i) > 0.0 && m <= spec.model.lower(i) * (1.0 + 1e-9)))
      cert.interiority_violated = true;
  }

  // Support condition: atoms must not land inside the active-arc interior.
  cert.support_condition_ok = true;
  for (const auto& atom : cert.gamma_atoms)
    for (const auto& [lo, hi] : cert.active_intervals)
      if (atom.time > lo + 1e-12 && atom.time < hi - 1e-12) cert.support_condition_ok = false;

  double atoms_total = 0.0;
  for (const auto& atom : cert.gamma_atoms) atoms_total += atom.mass.lpNorm<1>();
  cert.nontrivial = std::max({cert.mu, cert.p.lpNorm<Eigen::Infinity>(), atoms_total}) > 1e-12;
  cert.residuals["nontriviality"] = cert.nontrivial ? 0.0 : 1.0;

  return cert;
}

bool check_nontriviality(const Certificate& cert) { return cert.nontrivial; }

Trajectory rescale_time(const Trajectory& traj, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("rescale_time: factor must be positive");
  Grid g(traj.grid().T * factor, traj.grid().k);
  return Trajectory(g, traj.states());
}

}  // namespace moreau
