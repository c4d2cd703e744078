#include "holosim/abelian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "holosim/parallel.hpp"

namespace holosim {

StateChain::StateChain(std::vector<StateVector> states, bool closed)
    : states_(std::move(states)), closed_(closed) {
  if (states_.empty()) throw Error("empty state chain");
  for (const auto& s : states_)
    if (s.dim() != states_.front().dim()) throw Error("state chain mixes dimensions");
}

std::size_t StateChain::link_count() const noexcept {
  return closed_ ? states_.size() : states_.size() - 1;
}

Complex StateChain::link(std::size_t k, double overlap_tol) const {
  const std::size_t next = (k + 1) % states_.size();
  const Complex w = states_[k].overlap(states_[next]);
  if (!(std::abs(w) > overlap_tol)) {
    std::ostringstream msg;
    msg << "states " << k << " and " << next << " are numerically orthogonal (|overlap| = " << std::abs(w)
        << ")";
    throw OverlapError(msg.str(), k, std::abs(w));
  }
  return w;
}

StateChain StateChain::reversed() const {
  std::vector<StateVector> r;
  r.reserve(states_.size());
  if (closed_) {
    // keep the basepoint first so both orientations share it
    r.push_back(states_.front());
    for (std::size_t k = states_.size() - 1; k > 0; --k) r.push_back(states_[k]);
  } else {
    r.assign(states_.rbegin(), states_.rend());
  }
  return StateChain(std::move(r), closed_);
}

namespace {

struct LoopProduct {
  Complex unit_product{1.0, 0.0};
  double min_overlap = std::numeric_limits<double>::infinity();
};

LoopProduct cyclic_product(const StateChain& chain) {
  LoopProduct out;
  for (std::size_t k = 0; k < chain.link_count(); ++k) {
    const Complex w = chain.link(k);
    out.min_overlap = std::min(out.min_overlap, std::abs(w));
    out.unit_product *= w / std::abs(w);
  }
  return out;
}

}  // namespace

double pancharatnam_phase(const StateChain& chain) {
  if (!chain.closed()) throw Error("Pancharatnam phase needs a closed chain");
  if (chain.size() < 3) throw Error("Pancharatnam phase needs at least three states");
  return std::arg(cyclic_product(chain).unit_product);
}

GeometricPhaseResult discrete_geometric_phase(const StateChain& chain) {
  if (!chain.closed()) throw Error("discrete geometric phase needs a closed chain");
  const LoopProduct p = cyclic_product(chain);
  return {std::arg(p.unit_product), p.min_overlap, chain.size()};
}

ParallelTransport parallel_transport(const StateChain& chain) {
  std::vector<StateVector> out;
  out.reserve(chain.size());
  out.push_back(chain[0]);
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const Complex w = out.back().overlap(chain[k]);
    if (!(std::abs(w) > tol::overlap)) {
      std::ostringstream msg;
      msg << "states " << k - 1 << " and " << k << " are numerically orthogonal";
      throw OverlapError(msg.str(), k - 1, std::abs(w));
    }
    out.push_back(chain[k].rephased(-std::arg(w)));
  }
  double closure = 0.0;
  if (chain.closed()) {
    const Complex w = out.back().overlap(out.front());
    if (!(std::abs(w) > tol::overlap))
      throw OverlapError("closing link is numerically orthogonal", chain.size() - 1, std::abs(w));
    const StateVector image = out.front().rephased(-std::arg(w));
    closure = std::arg(image.overlap(out.front()));
  }
  return {StateChain(std::move(out), chain.closed()), closure};
}

namespace {

double band_gap(const EigenDecomposition& e, Index band) {
  if (band < 0 || band >= e.eigenvalues.size()) throw Error("band index outside the spectrum");
  double gap = std::numeric_limits<double>::infinity();
  if (band > 0) gap = std::min(gap, e.eigenvalues(band) - e.eigenvalues(band - 1));
  if (band + 1 < e.eigenvalues.size()) gap = std::min(gap, e.eigenvalues(band + 1) - e.eigenvalues(band));
  return gap;
}

[[noreturn]] void throw_degenerate(const HamiltonianModel& model, Index band, double s, double gap) {
  std::ostringstream msg;
  msg << model.label() << ": band " << band << " is degenerate";
  if (!std::isnan(s)) msg << " at s = " << s;
  msg << " (gap " << gap << "); use the holonomy routines for degenerate subspaces";
  throw GapClosureError(msg.str(), s, gap);
}

}  // namespace

StateVector band_state(const HamiltonianModel& model, Index band, const ParameterPoint& lambda) {
  const EigenDecomposition e = eigh(model(lambda));
  const double gap = band_gap(e, band);
  if (!(gap > tol::degeneracy * e.spectral_radius()))
    throw_degenerate(model, band, std::numeric_limits<double>::quiet_NaN(), gap);
  return StateVector(e.eigenvectors.col(band));
}

StateChain eigenstate_chain(const HamiltonianModel& model, Index band, const ParameterPath& path,
                            std::size_t samples) {
  const auto s = path.sample_positions(samples);
  std::vector<EigenDecomposition> eig(s.size());
  parallel_for(s.size(), [&](std::size_t k) { eig[k] = eigh(model(path(s[k]))); });
  // gaps are relative to the largest spectral radius along the path
  double scale = 0.0;
  for (const auto& e : eig) scale = std::max(scale, e.spectral_radius());
  std::vector<StateVector> states;
  states.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double gap = band_gap(eig[k], band);
    if (!(gap > tol::degeneracy * scale)) throw_degenerate(model, band, s[k], gap);
    states.emplace_back(eig[k].eigenvectors.col(band));
  }
  return StateChain(std::move(states), path.closed());
}

double berry_connection_fd(const StateField& field, const ParameterPoint& lambda, Index direction,
                           double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (direction < 0 || direction >= lambda.size()) throw Error("connection direction out of range");
  ParameterPoint plus = lambda, minus = lambda;
  plus(direction) += h;
  minus(direction) -= h;
  const StateVector centre = field(lambda);
  const ComplexVector derivative =
      (field(plus).amplitudes() - field(minus).amplitudes()) / (2.0 * h);
  // <psi|d psi> is imaginary, so i <psi|d psi> = -Im <psi|d psi>
  return -centre.amplitudes().dot(derivative).imag();
}

double berry_connection_fd(const HamiltonianModel& model, Index band, const ParameterPoint& lambda,
                           Index direction, double h) {
  return berry_connection_fd(
      [&](const ParameterPoint& l) { return band_state(model, band, l); }, lambda, direction, h);
}

namespace {

void check_plane(const ParameterPoint& lambda, std::pair<Index, Index> plane) {
  const auto [i, j] = plane;
  if (i == j || i < 0 || j < 0 || i >= lambda.size() || j >= lambda.size())
    throw Error("invalid parameter plane for curvature");
}

double loop_phase(std::span<const StateVector* const> corners) {
  Complex product{1.0, 0.0};
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const Complex w = corners[k]->overlap(*corners[(k + 1) % corners.size()]);
    if (!(std::abs(w) > tol::overlap))
      throw OverlapError("plaquette corners are numerically orthogonal", k, std::abs(w));
    product *= w / std::abs(w);
  }
  return std::arg(product);
}

}  // namespace

CurvatureSample berry_curvature_plaquette(const HamiltonianModel& model, Index band,
                                          const ParameterPoint& lambda, std::pair<Index, Index> plane,
                                          double a) {
  check_plane(lambda, plane);
  if (!(a > 0.0)) throw Error("plaquette edge must be positive");
  const auto [i, j] = plane;
  ParameterPoint c0 = lambda;
  c0(i) -= a / 2.0;
  c0(j) -= a / 2.0;
  ParameterPoint c1 = c0, c3 = c0;
  c1(i) += a;
  c3(j) += a;
  ParameterPoint c2 = c1;
  c2(j) += a;
  const std::array<StateVector, 4> s{band_state(model, band, c0), band_state(model, band, c1),
                                     band_state(model, band, c2), band_state(model, band, c3)};
  const std::array<const StateVector*, 4> corners{&s[0], &s[1], &s[2], &s[3]};
  return {lambda, plane, loop_phase(corners) / (a * a), a};
}

PlaquetteTiling tile_plaquettes(const HamiltonianModel& model, Index band, const ParameterPoint& origin,
                                std::pair<Index, Index> plane, std::size_t nx, std::size_t ny,
                                double hx, double hy) {
  check_plane(origin, plane);
  if (nx < 1 || ny < 1) throw Error("tiling needs at least one cell per side");
  const auto [i, j] = plane;
  const std::size_t row = nx + 1;
  std::vector<std::optional<StateVector>> nodes(row * (ny + 1));
  parallel_for(nodes.size(), [&](std::size_t k) {
    ParameterPoint p = origin;
    p(i) += static_cast<double>(k % row) * hx;
    p(j) += static_cast<double>(k / row) * hy;
    nodes[k].emplace(band_state(model, band, p));
  });
  auto node = [&](std::size_t ix, std::size_t iy) { return &*nodes[iy * row + ix]; };

  PlaquetteTiling out;
  out.nx = nx;
  out.ny = ny;
  out.cell_phases.resize(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::array<const StateVector*, 4> c{node(ix, iy), node(ix + 1, iy), node(ix + 1, iy + 1),
                                                node(ix, iy + 1)};
      out.cell_phases[iy * nx + ix] = loop_phase(c);
    }
  }
  for (double p : out.cell_phases) out.flux += p;

  std::vector<const StateVector*> boundary;
  for (std::size_t ix = 0; ix < nx; ++ix) boundary.push_back(node(ix, 0));
  for (std::size_t iy = 0; iy < ny; ++iy) boundary.push_back(node(nx, iy));
  for (std::size_t ix = nx; ix > 0; --ix) boundary.push_back(node(ix, ny));
  for (std::size_t iy = ny; iy > 0; --iy) boundary.push_back(node(0, iy));
  out.boundary_phase = loop_phase(boundary);
  return out;
}

double solid_angle(std::span<const Eigen::Vector3d> directions) {
  if (directions.empty()) throw Error("solid angle of an empty loop");
  std::vector<Eigen::Vector3d> unit;
  unit.reserve(directions.size());
  for (const auto& d : directions) {
    const double n = d.norm();
    if (!(n > 0.0)) throw Error("solid angle: zero direction vector");
    unit.push_back(d / n);
  }
  const std::size_t n = unit.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (unit[k].dot(unit[(k + 1) % n]) <= -1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "solid angle: directions " << k << " and " << (k + 1) % n << " are antipodal";
      throw OverlapError(msg.str(), k, 0.0);
    }
  }

  // Reference vertex: first axis that stays well away from every antipode.
  const std::array<Eigen::Vector3d, 6> candidates{
      Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(),
      -Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), -Eigen::Vector3d::UnitY()};
  Eigen::Vector3d ref = candidates[0];
  double best_margin = -1.0;
  for (const auto& c : candidates) {
    double margin = 2.0;
    for (const auto& u : unit) margin = std::min(margin, 1.0 + c.dot(u));
    if (margin >= 0.25) {
      ref = c;
      break;
    }
    if (margin > best_margin) {
      best_margin = margin;
      ref = c;
    }
  }

  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector3d& a = unit[k];
    const Eigen::Vector3d& b = unit[(k + 1) % n];
    const double num = ref.dot(a.cross(b));
    const double den = 1.0 + ref.dot(a) + a.dot(b) + b.dot(ref);
    total += 2.0 * std::atan2(num, den);
  }
  return total;
}

}  // namespace holosim
