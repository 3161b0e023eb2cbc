#include "foldtn/free_fermion.hpp"

#include <algorithm>
#include <cmath>

#include "foldtn/errors.hpp"

namespace foldtn::fermion {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::uniform: return "uniform";
    case Variant::sign_flipped: return "sign_flipped";
    case Variant::decoupled: return "decoupled";
    case Variant::nonhermitian_tilde: return "nonhermitian_tilde";
  }
  return "?";
}

const char* to_string(CouplingForm c) { return c == CouplingForm::imag_potential ? "imag_potential" : "imag_hopping"; }

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::uniform, Variant::sign_flipped, Variant::decoupled, Variant::nonhermitian_tilde})
    if (s == to_string(v)) return v;
  throw ConfigError("variant", "unknown variant '" + s + "'");
}

CouplingForm parse_coupling_form(const std::string& s) {
  if (s == "imag_hopping") return CouplingForm::imag_hopping;
  if (s == "imag_potential") return CouplingForm::imag_potential;
  throw ConfigError("coupling_form", "unknown coupling form '" + s + "'");
}

QuadraticHamiltonian build_hamiltonian(int n_half, Variant v, CouplingForm c) {
  if (n_half < 2) throw ConfigError("n", "need at least 2 sites per half");
  const Index n = 2 * static_cast<Index>(n_half);
  const Index mid = n_half - 1;  // bond (mid, mid + 1)
  QuadraticHamiltonian out;
  out.h = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    cplx t = 1.0;
    if (i == mid) {
      if (v == Variant::decoupled || v == Variant::nonhermitian_tilde) continue;
      if (v == Variant::sign_flipped) t = -1.0;
    } else if (i > mid && (v == Variant::sign_flipped || v == Variant::nonhermitian_tilde)) {
      t = -1.0;
    }
    out.h(i, i + 1) = t;
    out.h(i + 1, i) = t;
  }
  if (v == Variant::nonhermitian_tilde) {
    out.hermitian = false;
    if (c == CouplingForm::imag_hopping) {
      out.h(mid, mid + 1) = kI;
      out.h(mid + 1, mid) = kI;
    } else {
      out.h(mid, mid) = kI;
      out.h(mid + 1, mid + 1) = kI;
    }
  }
  return out;
}

SlaterMatrix ground_state_slater(const QuadraticHamiltonian& h, int n_particles) {
  if (!h.hermitian) throw ContractViolation("ground_state_slater: Hamiltonian is not Hermitian");
  if (n_particles < 0 || n_particles > h.h.rows()) throw ConfigError("n_particles", "out of range");
  const linalg::Spectrum e = linalg::eigh(h.h);
  // eigh is descending; the lowest levels are the last columns
  const ComplexMatrix& b = *e.basis;
  return {b.rightCols(n_particles).rowwise().reverse()};
}

SlaterMatrix evolve_slater_with(const SlaterMatrix& a, const ComplexMatrix& propagator, int steps) {
  SlaterMatrix out = a;
  for (int k = 0; k < steps; ++k) {
    try {
      out.a = linalg::orthonormalize_columns(propagator * out.a);
    } catch (const SingularInputError& e) {
      throw EvolutionDegenerateError(std::string("evolve_slater: orbitals collapsed at step ") + std::to_string(k + 1) +
                                     ": " + e.what());
    }
  }
  return out;
}

SlaterMatrix evolve_slater(const SlaterMatrix& a, const QuadraticHamiltonian& h, double dt, int steps) {
  return evolve_slater_with(a, linalg::matrix_exp(h.h, -kI * dt), steps);
}

ComplexMatrix greens_function(const SlaterMatrix& a) { return a.a * a.a.adjoint(); }

double entanglement_entropy(const ComplexMatrix& g, Index first, Index count) {
  if (first < 0 || count < 0 || first + count > g.rows()) throw ShapeError("entanglement_entropy: bad subsystem");
  if (count == 0) return 0.0;
  const RealVector lam = linalg::eigh(g.block(first, first, count, count)).values;
  double s = 0.0;
  for (Index i = 0; i < lam.size(); ++i) {
    const double x = lam(i);
    if (x < -1e-8 || x > 1.0 + 1e-8)
      throw InvalidCorrelationError("entanglement_entropy: correlation eigenvalue " + std::to_string(x) +
                                    " outside [0, 1]");
    const double p = std::clamp(x, 0.0, 1.0);
    if (p > 0.0) s -= p * std::log(p);
    if (p < 1.0) s -= (1.0 - p) * std::log(1.0 - p);
  }
  return s;
}

std::vector<GrowthSeries> growth_study(int n_half, double t_max, double dt, const std::vector<Variant>& variants,
                                       CouplingForm c, int sample_every) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw ConfigError("t", "need dt > 0 and t_max >= 0");
  if (sample_every < 1) throw ConfigError("sample_every", "must be >= 1");
  const int steps = static_cast<int>(std::llround(t_max / dt));
  const SlaterMatrix start = ground_state_slater(build_hamiltonian(n_half, Variant::decoupled), n_half);

  std::vector<GrowthSeries> out;
  for (Variant v : variants) {
    const ComplexMatrix u = linalg::matrix_exp(build_hamiltonian(n_half, v, c).h, -kI * dt);
    GrowthSeries series{v, {}, {}};
    SlaterMatrix a = start;
    for (int k = 0; k <= steps; k += sample_every) {
      if (k > 0) a = evolve_slater_with(a, u, sample_every);
      series.t.push_back(k * dt);
      series.entropy.push_back(entanglement_entropy(greens_function(a), 0, n_half));
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace foldtn::fermion
