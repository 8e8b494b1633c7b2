#include "fvps/moyal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "fvps/errors.hpp"
#include "fvps/wigner.hpp"

namespace fvps {

namespace {

using Index = Eigen::Index;

std::size_t wrap(std::ptrdiff_t m, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((m % nn) + nn) % nn);
}

std::ptrdiff_t signed_mode(std::size_t idx, std::size_t n) {
  return idx < n / 2 ? static_cast<std::ptrdiff_t>(idx) : static_cast<std::ptrdiff_t>(idx) - static_cast<std::ptrdiff_t>(n);
}

// C_s(p_i) with field(i, j) = sum_s C_s (-1)^s e^{2 pi i s j / n}. n is even so (-1)^s = (-1)^idx.
ComplexField to_modes(const ComplexField& f) {
  const auto np = f.rows(), nq = f.cols();
  ComplexField out(np, nq);
  std::vector<cplx> row(static_cast<std::size_t>(nq)), spec(static_cast<std::size_t>(nq));
  const double inv = 1.0 / static_cast<double>(nq);
  for (Index i = 0; i < np; ++i) {
    for (Index j = 0; j < nq; ++j) row[static_cast<std::size_t>(j)] = f(i, j);
    detail::dft(row, spec, -1);
    for (Index s = 0; s < nq; ++s) out(i, s) = (s % 2 == 0 ? inv : -inv) * spec[static_cast<std::size_t>(s)];
  }
  return out;
}

ComplexField from_modes(const ComplexField& c) {
  const auto np = c.rows(), nq = c.cols();
  ComplexField out(np, nq);
  std::vector<cplx> row(static_cast<std::size_t>(nq)), val(static_cast<std::size_t>(nq));
  for (Index i = 0; i < np; ++i) {
    for (Index s = 0; s < nq; ++s) row[static_cast<std::size_t>(s)] = (s % 2 == 0 ? 1.0 : -1.0) * c(i, s);
    detail::dft(row, val, +1);
    for (Index j = 0; j < nq; ++j) out(i, j) = val[static_cast<std::size_t>(j)];
  }
  return out;
}

// One symbol component in mode space. Analytic components carry a single
// mode (s = 0) tabulated on the extended lattice k in [-n, 2n).
struct Lattice {
  bool analytic = false;
  std::size_t n = 0;
  std::vector<std::ptrdiff_t> active;
  ComplexField modes;
  std::vector<cplx> ext;

  cplx at(std::ptrdiff_t s, std::ptrdiff_t k) const {
    if (analytic) return ext[static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(n))];
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(n)) return 0.0;
    return modes(k, static_cast<Index>(wrap(s, n)));
  }
};

Lattice sampled_lattice(const ComplexField& field) {
  Lattice l;
  l.n = static_cast<std::size_t>(field.rows());
  l.modes = to_modes(field);
  const double peak2 = l.modes.cwiseAbs2().maxCoeff();
  if (peak2 == 0.0) return l;
  for (Index s = 0; s < l.modes.cols(); ++s) {
    if (l.modes.col(s).cwiseAbs2().maxCoeff() > 1e-30 * peak2) l.active.push_back(signed_mode(static_cast<std::size_t>(s), l.n));
  }
  return l;
}

Lattice analytic_lattice(const MomentumFunction& f, const MomentumGrid& g) {
  Lattice l;
  l.analytic = true;
  l.n = g.size();
  const auto nn = static_cast<std::ptrdiff_t>(l.n);
  l.ext.resize(3 * l.n);
  bool nonzero = false;
  for (std::ptrdiff_t k = -nn; k < 2 * nn; ++k) {
    const cplx v = f(g.node(k));
    l.ext[static_cast<std::size_t>(k + nn)] = v;
    nonzero = nonzero || v != cplx(0.0);
  }
  if (nonzero) l.active.push_back(0);
  return l;
}

// acc(i, s1 + s2) += X_{s1}(p_{i + s2}) Y_{s2}(p_{i - s1})
void accumulate_star(const Lattice& x, const Lattice& y, ComplexField& acc) {
  const auto n = static_cast<std::ptrdiff_t>(x.n);
  for (std::ptrdiff_t s1 : x.active) {
    for (std::ptrdiff_t s2 : y.active) {
      const auto col = static_cast<Index>(wrap(s1 + s2, x.n));
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const cplx a = x.at(s1, i + s2);
        if (a == cplx(0.0)) continue;
        acc(i, col) += a * y.at(s2, i - s1);
      }
    }
  }
}

ComplexField position_field(const PhaseSpaceGrid& grid, cplx coefficient) {
  const auto n = static_cast<Index>(grid.n_p());
  ComplexField f(n, static_cast<Index>(grid.n_q()));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < f.cols(); ++j) f(i, j) = coefficient * grid.position().node(j);
  return f;
}

cplx analytic_derivative(const MomentumFunction& f, double p) {
  static constexpr double w[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const double h = 1e-2 * (1.0 + std::abs(p));
  cplx d = 0.0;
  for (int k = 1; k <= 4; ++k) d += w[k - 1] * (f(p + k * h) - f(p - k * h));
  return d / h;
}

// d/dp along each position column; eighth order in the interior, falling back
// to narrower central stencils and one-sided differences at the boundary.
ComplexField momentum_difference(const ComplexField& f, double dp) {
  static const std::vector<std::vector<double>> stencils = {
      {1.0 / 2.0},
      {2.0 / 3.0, -1.0 / 12.0},
      {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0},
      {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0},
  };
  const Index n = f.rows();
  ComplexField out = ComplexField::Zero(n, f.cols());
  if (n < 2) return out;
  for (Index i = 0; i < n; ++i) {
    const Index reach = std::min<Index>({i, n - 1 - i, 4});
    if (reach == 0) {
      out.row(i) = i == 0 ? (f.row(1) - f.row(0)) / dp : (f.row(n - 1) - f.row(n - 2)) / dp;
      continue;
    }
    const auto& w = stencils[static_cast<std::size_t>(reach - 1)];
    for (Index k = 1; k <= reach; ++k) out.row(i) += w[static_cast<std::size_t>(k - 1)] * (f.row(i + k) - f.row(i - k));
    out.row(i) /= dp;
  }
  return out;
}

ComplexField position_difference(const ComplexField& f, double dq) {
  ComplexField out(f.rows(), f.cols());
  std::vector<cplx> row(static_cast<std::size_t>(f.cols()));
  for (Index i = 0; i < f.rows(); ++i) {
    for (Index j = 0; j < f.cols(); ++j) row[static_cast<std::size_t>(j)] = f(i, j);
    const auto d = periodic_derivative(row, dq);
    for (Index j = 0; j < f.cols(); ++j) out(i, j) = d[static_cast<std::size_t>(j)];
  }
  return out;
}

void require_compatible(const Symbol& a, const Symbol& b, const char* op) {
  if (!(a.grid() == b.grid())) throw ConfigurationError(std::string(op) + ": symbols live on different grids");
  if (a.dim() != b.dim()) throw DimensionError(std::string(op) + ": symbol dimensions differ");
}

// Partial derivatives of a component evaluated on the grid.
ComplexField d_momentum(const Symbol& s, int r, int c) {
  const auto& g = s.grid();
  const auto np = static_cast<Index>(g.n_p()), nq = static_cast<Index>(g.n_q());
  switch (s.kind()) {
    case Symbol::Kind::position:
      return ComplexField::Zero(np, nq);
    case Symbol::Kind::momentum: {
      ComplexField out(np, nq);
      for (Index i = 0; i < np; ++i) {
        const cplx d = analytic_derivative([&](double p) { return s.at_momentum(r, c, p); }, g.momentum().node(i));
        out.row(i).setConstant(d);
      }
      return out;
    }
    case Symbol::Kind::sampled:
      break;
  }
  return momentum_difference(s.field(r, c), g.momentum().spacing());
}

ComplexField d_position(const Symbol& s, int r, int c) {
  const auto& g = s.grid();
  const auto np = static_cast<Index>(g.n_p()), nq = static_cast<Index>(g.n_q());
  switch (s.kind()) {
    case Symbol::Kind::position:
      return ComplexField::Constant(np, nq, s.position_coefficient()(r, c));
    case Symbol::Kind::momentum:
      return ComplexField::Zero(np, nq);
    case Symbol::Kind::sampled:
      break;
  }
  return position_difference(s.field(r, c), g.position().spacing);
}

Symbol assemble(const PhaseSpaceGrid& grid, int dim, std::array<ComplexField, 4> out) {
  if (dim == 1) return Symbol::sampled(grid, std::move(out[0]));
  return Symbol::sampled(grid, std::move(out));
}

// q M * B = q M B + (i hbar/2) M dB/dp, and A * q N = q A N - (i hbar/2) dA/dp N.
Symbol position_star(const Symbol& a, const Symbol& b) {
  const auto& g = a.grid();
  const int d = a.dim();
  const double hbar = g.units().hbar;
  const cplx half_i(0.0, 0.5 * hbar);
  const ComplexField q = position_field(g, 1.0);
  std::array<ComplexField, 4> out;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      ComplexField acc = ComplexField::Zero(static_cast<Index>(g.n_p()), static_cast<Index>(g.n_q()));
      for (int k = 0; k < d; ++k) {
        if (a.kind() == Symbol::Kind::position) {
          const cplx m = a.position_coefficient()(r, k);
          if (m == cplx(0.0)) continue;
          acc += m * (q.cwiseProduct(b.field(k, c)) + half_i * d_momentum(b, k, c));
        } else {
          const cplx m = b.position_coefficient()(k, c);
          if (m == cplx(0.0)) continue;
          acc += m * (q.cwiseProduct(a.field(r, k)) - half_i * d_momentum(a, r, k));
        }
      }
      out[static_cast<std::size_t>(d * r + c)] = std::move(acc);
    }
  }
  return assemble(g, d, std::move(out));
}

Lattice lattice_of(const Symbol& s, int r, int c) {
  if (s.kind() == Symbol::Kind::momentum) {
    return analytic_lattice([&s, r, c](double p) { return s.at_momentum(r, c, p); }, s.grid().momentum());
  }
  return sampled_lattice(s.field(r, c));
}

std::vector<cplx> mode_phases(const EnergyFunction& e, const PhaseSpaceGrid& grid, std::size_t row, double t,
                              double parity) {
  // exp(-(i/hbar) [E(p + s dp) + parity E(p - s dp)] t) for every stored mode.
  const std::size_t n = grid.n_q();
  const auto& g = grid.momentum();
  const double hbar = grid.units().hbar;
  std::vector<cplx> out(n);
  const auto k = static_cast<std::ptrdiff_t>(row);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::ptrdiff_t s = signed_mode(idx, n);
    const double phase = (e(g.node(k + s)) + parity * e(g.node(k - s))) * t / hbar;
    out[idx] = std::polar(1.0, -phase);
  }
  return out;
}

ComplexField apply_mode_phases(const ComplexField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t,
                               double parity, double sign) {
  grid.require_conjugate("evolve");
  if (w.rows() != static_cast<Index>(grid.n_p()) || w.cols() != static_cast<Index>(grid.n_q())) {
    throw DimensionError("evolve: field shape does not match grid");
  }
  const std::size_t n = grid.n_q();
  ComplexField out(w.rows(), w.cols());
  std::vector<cplx> row(n), spec(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = w(i, static_cast<Index>(j));
    detail::dft(row, spec, -1);
    const auto ph = mode_phases(e, grid, static_cast<std::size_t>(i), sign * t, parity);
    for (std::size_t s = 0; s < n; ++s) spec[s] *= ph[s];
    detail::dft(spec, row, +1);
    for (std::size_t j = 0; j < n; ++j) out(i, static_cast<Index>(j)) = inv * row[j];
  }
  return out;
}

}  // namespace

// ---- Symbol ----

Symbol Symbol::sampled(const PhaseSpaceGrid& grid, ComplexField field) {
  if (field.rows() != static_cast<Index>(grid.n_p()) || field.cols() != static_cast<Index>(grid.n_q())) {
    throw DimensionError("Symbol: field shape does not match grid");
  }
  Symbol s(grid, Kind::sampled, 1);
  s.fields_.push_back(std::move(field));
  return s;
}

Symbol Symbol::sampled(const PhaseSpaceGrid& grid, std::array<ComplexField, 4> fields) {
  Symbol s(grid, Kind::sampled, 2);
  for (auto& f : fields) {
    if (f.rows() != static_cast<Index>(grid.n_p()) || f.cols() != static_cast<Index>(grid.n_q())) {
      throw DimensionError("Symbol: field shape does not match grid");
    }
    s.fields_.push_back(std::move(f));
  }
  return s;
}

Symbol Symbol::from_real(const PhaseSpaceGrid& grid, const RealField& field) {
  return sampled(grid, field.cast<cplx>());
}

Symbol Symbol::momentum(const PhaseSpaceGrid& grid, MomentumFunction f) {
  if (!f) throw ConfigurationError("Symbol: empty momentum function");
  Symbol s(grid, Kind::momentum, 1);
  s.funcs_.push_back(std::move(f));
  return s;
}

Symbol Symbol::momentum(const PhaseSpaceGrid& grid, std::array<MomentumFunction, 4> f) {
  Symbol s(grid, Kind::momentum, 2);
  for (auto& fn : f) {
    s.funcs_.push_back(fn ? std::move(fn) : MomentumFunction([](double) { return cplx(0.0); }));
  }
  return s;
}

Symbol Symbol::position(const PhaseSpaceGrid& grid) {
  Symbol s(grid, Kind::position, 1);
  s.coef_(0, 0) = 1.0;
  return s;
}

Symbol Symbol::position(const PhaseSpaceGrid& grid, const Eigen::Matrix2cd& coefficient) {
  Symbol s(grid, Kind::position, 2);
  s.coef_ = coefficient;
  return s;
}

Symbol Symbol::constant(const PhaseSpaceGrid& grid, cplx value) {
  return momentum(grid, [value](double) { return value; });
}

Symbol Symbol::from_function(const PhaseSpaceGrid& grid, const std::function<cplx(double, double)>& f) {
  const auto np = static_cast<Index>(grid.n_p()), nq = static_cast<Index>(grid.n_q());
  ComplexField out(np, nq);
  for (Index i = 0; i < np; ++i)
    for (Index j = 0; j < nq; ++j) out(i, j) = f(grid.momentum().node(i), grid.position().node(j));
  return sampled(grid, std::move(out));
}

ComplexField Symbol::field(int r, int c) const {
  if (r < 0 || c < 0 || r >= dim_ || c >= dim_) throw DimensionError("Symbol::field: component out of range");
  const auto idx = static_cast<std::size_t>(dim_ * r + c);
  switch (kind_) {
    case Kind::sampled:
      return fields_[idx];
    case Kind::momentum: {
      const auto np = static_cast<Index>(grid_.n_p()), nq = static_cast<Index>(grid_.n_q());
      ComplexField out(np, nq);
      for (Index i = 0; i < np; ++i) out.row(i).setConstant(funcs_[idx](grid_.momentum().node(i)));
      return out;
    }
    case Kind::position:
      break;
  }
  return position_field(grid_, coef_(r, c));
}

RealField Symbol::real_field() const {
  if (dim_ != 1) throw DimensionError("Symbol::real_field: matrix symbol");
  return field().real();
}

cplx Symbol::at_momentum(int r, int c, double p) const {
  if (kind_ != Kind::momentum) throw ConfigurationError("Symbol::at_momentum: not a momentum-kind symbol");
  return funcs_[static_cast<std::size_t>(dim_ * r + c)](p);
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  require_compatible(a, b, "Symbol::operator+");
  const int d = a.dim();
  if (a.kind() == Symbol::Kind::momentum && b.kind() == Symbol::Kind::momentum) {
    Symbol s(a.grid(), Symbol::Kind::momentum, d);
    for (std::size_t k = 0; k < a.funcs_.size(); ++k) {
      s.funcs_.push_back([fa = a.funcs_[k], fb = b.funcs_[k]](double p) { return fa(p) + fb(p); });
    }
    return s;
  }
  if (a.kind() == Symbol::Kind::position && b.kind() == Symbol::Kind::position) {
    Symbol s(a.grid(), Symbol::Kind::position, d);
    s.coef_ = a.coef_ + b.coef_;
    return s;
  }
  std::array<ComplexField, 4> out;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(d * r + c)] = a.field(r, c) + b.field(r, c);
  return assemble(a.grid(), d, std::move(out));
}

Symbol operator*(cplx k, const Symbol& a) {
  Symbol s = a;
  for (auto& f : s.fields_) f *= k;
  for (auto& fn : s.funcs_) fn = [fn, k](double p) { return k * fn(p); };
  s.coef_ *= k;
  return s;
}

Symbol operator-(const Symbol& a, const Symbol& b) { return a + cplx(-1.0) * b; }

// ---- products and brackets ----

Symbol star_product(const Symbol& a, const Symbol& b) {
  require_compatible(a, b, "star_product");
  const auto& g = a.grid();
  g.require_conjugate("star_product");
  const int d = a.dim();

  if (a.kind() == Symbol::Kind::position || b.kind() == Symbol::Kind::position) return position_star(a, b);

  if (a.kind() == Symbol::Kind::momentum && b.kind() == Symbol::Kind::momentum) {
    std::array<MomentumFunction, 4> f;
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        f[static_cast<std::size_t>(d * r + c)] = [a, b, r, c, d](double p) {
          cplx v = 0.0;
          for (int k = 0; k < d; ++k) v += a.at_momentum(r, k, p) * b.at_momentum(k, c, p);
          return v;
        };
      }
    }
    return d == 1 ? Symbol::momentum(g, f[0]) : Symbol::momentum(g, f);
  }

  std::vector<Lattice> la, lb;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      la.push_back(lattice_of(a, r, c));
      lb.push_back(lattice_of(b, r, c));
    }
  const auto np = static_cast<Index>(g.n_p()), nq = static_cast<Index>(g.n_q());
  std::array<ComplexField, 4> out;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      ComplexField acc = ComplexField::Zero(np, nq);
      for (int k = 0; k < d; ++k) {
        accumulate_star(la[static_cast<std::size_t>(d * r + k)], lb[static_cast<std::size_t>(d * k + c)], acc);
      }
      out[static_cast<std::size_t>(d * r + c)] = from_modes(acc);
    }
  }
  return assemble(g, d, std::move(out));
}

Symbol moyal_bracket(const Symbol& a, const Symbol& b) {
  const double hbar = a.grid().units().hbar;
  return cplx(0.0, -1.0 / hbar) * (star_product(a, b) - star_product(b, a));
}

Symbol anti_moyal_bracket(const Symbol& a, const Symbol& b) { return star_product(a, b) + star_product(b, a); }

Symbol poisson_bracket(const Symbol& a, const Symbol& b) {
  require_compatible(a, b, "poisson_bracket");
  const auto& g = a.grid();
  const int d = a.dim();
  std::array<ComplexField, 4> out;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      ComplexField acc = ComplexField::Zero(static_cast<Index>(g.n_p()), static_cast<Index>(g.n_q()));
      for (int k = 0; k < d; ++k) {
        acc += d_position(a, r, k).cwiseProduct(d_momentum(b, k, c)) -
               d_momentum(a, r, k).cwiseProduct(d_position(b, k, c));
      }
      out[static_cast<std::size_t>(d * r + c)] = std::move(acc);
    }
  }
  return assemble(g, d, std::move(out));
}

double symbol_distance(const Symbol& a, const Symbol& b, std::size_t edge) {
  require_compatible(a, b, "symbol_distance");
  const int d = a.dim();
  const auto np = static_cast<Index>(a.grid().n_p());
  if (2 * static_cast<Index>(edge) >= np) throw ConfigurationError("symbol_distance: edge exceeds grid");
  RealField sq = RealField::Zero(np, static_cast<Index>(a.grid().n_q()));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) sq += (a.field(r, c) - b.field(r, c)).cwiseAbs2();
  const auto e = static_cast<Index>(edge);
  return std::sqrt(sq.middleRows(e, np - 2 * e).maxCoeff());
}

ClassicalLimitReport classical_limit_gap(const SymbolFactory& a, const SymbolFactory& b,
                                         const std::vector<double>& hbars, std::size_t n, double q_max) {
  if (hbars.size() < 2) throw ConfigurationError("classical_limit_gap: need at least two hbar values");
  ClassicalLimitReport rep;
  for (double h : hbars) {
    if (!(h > 0.0)) throw DomainError("classical_limit_gap: hbar must be positive");
    const UnitSystem units{1.0, 1.0, h};
    const auto grid = PhaseSpaceGrid::with_position_window(n, q_max, units);
    const Symbol sa = a(grid), sb = b(grid);
    rep.hbar.push_back(h);
    rep.gap.push_back(symbol_distance(moyal_bracket(sa, sb), poisson_bracket(sa, sb), 8));
  }
  const double largest = *std::max_element(rep.gap.begin(), rep.gap.end());
  if (largest == 0.0 || std::any_of(rep.gap.begin(), rep.gap.end(), [](double v) { return v == 0.0; })) {
    rep.identically_zero = largest == 0.0;
    rep.exponent = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(rep.hbar.size());
  for (std::size_t i = 0; i < rep.hbar.size(); ++i) {
    const double x = std::log(rep.hbar[i]), y = std::log(rep.gap[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return rep;
}

// ---- evolution ----

EnergyFunction relativistic_energy(const UnitSystem& units) {
  return [units](double p) { return energy(p, units); };
}

EnergyFunction branch_energy(const EnergyFunction& e, Branch branch) {
  if (branch == Branch::plus) return e;
  return [e](double p) { return -e(p); };
}

ComplexField evolve_even(const ComplexField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t) {
  return apply_mode_phases(w, grid, e, t, -1.0, 1.0);
}

RealField evolve_even(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t) {
  return evolve_even(ComplexField(w.cast<cplx>()), grid, e, t).real();
}

ComplexField evolve_odd(const ComplexField& w, Branch ordering, const PhaseSpaceGrid& grid, const EnergyFunction& e,
                        double t) {
  // minus ordering: exp(-i sum E t / hbar); plus ordering is the conjugate phase.
  return apply_mode_phases(w, grid, e, t, 1.0, ordering == Branch::minus ? 1.0 : -1.0);
}

double max_mode_frequency(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e) {
  grid.require_conjugate("max_mode_frequency");
  const ComplexField modes = to_modes(w.cast<cplx>());
  const double peak = modes.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  const auto& g = grid.momentum();
  const std::size_t n = grid.n_q();
  double best = 0.0;
  for (Index i = 0; i < modes.rows(); ++i) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (std::abs(modes(i, static_cast<Index>(idx))) <= 1e-12 * peak) continue;
      const std::ptrdiff_t s = signed_mode(idx, n);
      best = std::max(best, std::abs(e(g.node(i + s)) - e(g.node(i - s))));
    }
  }
  return best / grid.units().hbar;
}

RealField evolve_timestep_reference(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t,
                                    int steps) {
  if (steps < 1) throw StepSizeError("evolve_timestep_reference: need at least one step");
  const double dt = t / steps;
  const double omega = max_mode_frequency(w, grid, e);
  if (std::abs(dt) * omega > 0.5) {
    const auto needed = static_cast<long long>(std::ceil(std::abs(t) * omega / 0.5));
    throw StepSizeError("evolve_timestep_reference: dt * omega_max = " + std::to_string(std::abs(dt) * omega) +
                        " exceeds 0.5; use at least " + std::to_string(needed) + " steps");
  }
  // With E a pure momentum symbol, {E, W}_M acts mode by mode:
  // (E*W - W*E)_s(p_i) = [E(p_{i+s}) - E(p_{i-s})] W_s(p_i).
  // Stepping in mode space skips two FFT round trips per evaluation.
  const auto& g = grid.momentum();
  const std::size_t n = grid.n_q();
  const double hbar = grid.units().hbar;
  ComplexField rate(w.rows(), w.cols());
  for (Index i = 0; i < w.rows(); ++i) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      const std::ptrdiff_t sm = signed_mode(idx, n);
      rate(i, static_cast<Index>(idx)) = cplx(0.0, -1.0 / hbar) * (e(g.node(i + sm)) - e(g.node(i - sm)));
    }
  }
  ComplexField cur = to_modes(w.cast<cplx>());
  const double initial2 = cur.cwiseAbs2().maxCoeff();
  for (int k = 0; k < steps; ++k) {
    const ComplexField mid = cur + (0.5 * dt) * rate.cwiseProduct(cur);
    cur += dt * rate.cwiseProduct(mid);
    if (!(cur.cwiseAbs2().maxCoeff() <= 100.0 * initial2)) {
      throw StepSizeError("evolve_timestep_reference: amplitude growth after step " + std::to_string(k + 1) +
                          "; reduce the step size");
    }
  }
  return from_modes(cur).real();
}

EffectiveMass effective_mass_ratio(double lambda, double p_bar, double t, const UnitSystem& units) {
  if (p_bar == 0.0) throw DomainError("effective_mass_ratio: p_bar must be nonzero");
  if (!(t > 0.0)) throw DomainError("effective_mass_ratio: t must be positive");
  const double sigma = sigma_from_lambda(lambda, units);
  const double p_max = std::abs(p_bar) + 12.0 * units.hbar / sigma;
  const auto grid = fit_phase_space_grid(sigma, p_max, 8.0 * sigma + units.c * t, units);
  const auto state = gaussian_state({sigma, p_bar, 0.0, Branch::plus}, grid.momentum(), units);
  const RealField w0 = wigner_even(state, Branch::plus, grid);
  const RealField wt = evolve_even(w0, grid, relativistic_energy(units), t);
  EffectiveMass out;
  out.lambda = lambda;
  out.p_bar = p_bar;
  out.velocity = (moments(wt, grid).mean_q - moments(w0, grid).mean_q) / t;
  out.ratio = p_bar / (units.mass * out.velocity);
  out.grid_points = grid.n_p();
  return out;
}

}  // namespace fvps
