#include "oswr/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oswr/error.hpp"
#include "oswr/mesh.hpp"

namespace oswr {

namespace {

constexpr int kLattice = 16;

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, scale);
}

bool on_lines(const std::vector<double> &lines, double v) {
  return std::any_of(lines.begin(), lines.end(),
                     [&](double l) { return close(l, v, std::abs(v)); });
}

struct Shared {
  bool adjacent = false;
  int normal_axis = 0;  // axis the interface is orthogonal to
  double lo = 0.0, hi = 0.0;
};

Shared shared_face(const Box &a, const Box &b) {
  Shared s;
  if (a.dim == 1) {
    if (close(a.x1, b.x0, a.x1) || close(b.x1, a.x0, a.x0)) {
      s.adjacent = true;
      s.lo = s.hi = close(a.x1, b.x0, a.x1) ? a.x1 : a.x0;
    }
    return s;
  }
  const double scale = std::max(a.x1 - a.x0, a.y1 - a.y0);
  if (close(a.x1, b.x0, scale) || close(b.x1, a.x0, scale)) {
    const double lo = std::max(a.y0, b.y0), hi = std::min(a.y1, b.y1);
    if (hi - lo > 1e-12 * scale) return {true, 0, lo, hi};
  }
  if (close(a.y1, b.y0, scale) || close(b.y1, a.y0, scale)) {
    const double lo = std::max(a.x0, b.x0), hi = std::min(a.x1, b.x1);
    if (hi - lo > 1e-12 * scale) return {true, 1, lo, hi};
  }
  return s;
}

double overlap_measure(const Box &a, const Box &b) {
  const double wx = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  if (a.dim == 1) return std::max(0.0, wx);
  const double wy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return wx > 0.0 && wy > 0.0 ? wx * wy : 0.0;
}

}  // namespace

std::vector<std::pair<int, int>> adjacent_pairs(const ExperimentConfig &cfg) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < cfg.subdomains.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.subdomains.size(); ++j) {
      const auto &a = cfg.subdomains[i];
      const auto &b = cfg.subdomains[j];
      if (shared_face(a.box, b.box).adjacent) {
        out.emplace_back(std::min(a.id, b.id), std::max(a.id, b.id));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate_problem(const ExperimentConfig &cfg) {
  std::vector<Diagnostic> out;
  auto error = [&](const std::string &m) { out.push_back({Diagnostic::Severity::error, m}); };
  auto warning = [&](const std::string &m) { out.push_back({Diagnostic::Severity::warning, m}); };

  if (!(cfg.T > 0.0)) error("final time T must be positive");
  if (cfg.windows < 1) error("window count must be at least 1");
  if (!(cfg.tolerance > 0.0)) error("tolerance must be positive");
  if (cfg.max_iterations < 1) error("max_iterations must be at least 1");
  if (!(cfg.exterior_p >= 0.0)) error("exterior_p must be nonnegative");
  for (double t : cfg.snapshots) {
    if (t < 0.0 || t > cfg.T) error("snapshot time outside [0, T]");
  }
  if (cfg.subdomains.empty()) {
    error("no subdomains");
    return out;
  }

  const int degree = cfg.subdomains.front().degree;
  double measure = 0.0;
  for (const auto &s : cfg.subdomains) {
    const std::string tag = "subdomain " + std::to_string(s.id) + ": ";
    if (s.degree != 0 && s.degree != 1) error(tag + "unsupported degree " + std::to_string(s.degree));
    if (s.degree != degree) error(tag + "mixed DG degrees are unsupported");
    if (s.nx < 1 || s.ny < 1 || s.nt < 1) error(tag + "grid counts must be at least 1");
    if (s.box.dim != cfg.domain.dim) error(tag + "box dimension differs from the domain");
    if (overlap_measure(s.box, cfg.domain) < s.box.measure() * (1.0 - 1e-12)) {
      error(tag + "box leaves the domain");
    }
    measure += s.box.measure();

    // Sign conditions on a cell-centred lattice.
    Expression divb = s.bx.derivative(Variable::x);
    if (cfg.domain.dim == 2) divb = divb + s.by.derivative(Variable::y);
    const int ny = cfg.domain.dim == 2 ? kLattice : 1;
    bool bad_nu = false, bad_omega = false, weak = false;
    try {
      for (int a = 0; a < kLattice; ++a) {
        for (int b = 0; b < ny; ++b) {
          const double x = s.box.x0 + (a + 0.5) * (s.box.x1 - s.box.x0) / kLattice;
          const double y = cfg.domain.dim == 2 ? s.box.y0 + (b + 0.5) * (s.box.y1 - s.box.y0) / ny : 0.0;
          if (!(s.nu(x, y) > 0.0)) bad_nu = true;
          if (!(s.omega(x, y) > 0.0)) bad_omega = true;
          if (!(s.c(x, y) + 0.5 * divb(x, y) > 0.0)) weak = true;
        }
      }
    } catch (const DomainError &e) {
      error(tag + "coefficient cannot be evaluated: " + e.what());
    }
    if (bad_nu) error(tag + "diffusion nu must be positive");
    if (bad_omega) error(tag + "porosity omega must be positive");
    if (weak) warning(tag + "c + div(b)/2 is not positive; convergence is not guaranteed");
  }

  for (std::size_t i = 0; i < cfg.subdomains.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.subdomains.size(); ++j) {
      if (overlap_measure(cfg.subdomains[i].box, cfg.subdomains[j].box) > 0.0) {
        error("subdomains " + std::to_string(cfg.subdomains[i].id) + " and " +
              std::to_string(cfg.subdomains[j].id) + " overlap");
      }
    }
  }
  if (std::abs(measure - cfg.domain.measure()) > 1e-12 * cfg.domain.measure()) {
    error("subdomain boxes do not tile the domain");
  }

  const auto pairs = adjacent_pairs(cfg);
  for (const auto &t : cfg.transmissions) {
    const auto key = std::make_pair(std::min(t.from, t.to), std::max(t.from, t.to));
    if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) {
      error("transmission " + std::to_string(t.from) + " -> " + std::to_string(t.to) +
            " does not refer to adjacent subdomains");
    }
  }
  for (const auto &[a, b] : pairs) {
    const std::string tag = "interface " + std::to_string(a) + "/" + std::to_string(b) + ": ";
    const TransmissionSpec *ab = cfg.transmission(a, b);
    const TransmissionSpec *ba = cfg.transmission(b, a);
    if (!ab || !ba) {
      error(tag + "transmission parameters missing for direction " +
            (!ab ? std::to_string(a) + " -> " + std::to_string(b)
                 : std::to_string(b) + " -> " + std::to_string(a)));
      continue;
    }
    if (!(ab->p + ba->p > 0.0)) error(tag + "p_ij + p_ji must be positive");
    for (const TransmissionSpec *t : {ab, ba}) {
      if (t->q < 0.0) error(tag + "q must be nonnegative");
      if (t->q > 0.0 && !(t->s > 0.0) && cfg.domain.dim == 2) {
        error(tag + "s must be positive when q > 0");
      }
    }
    if (cfg.domain.dim == 2) {
      const SubdomainSpec &sa = cfg.subdomain(a);
      const SubdomainSpec &sb = cfg.subdomain(b);
      const Shared sh = shared_face(sa.box, sb.box);
      const bool vertical = sh.normal_axis == 0;
      for (const SubdomainSpec *s : {&sa, &sb}) {
        const auto lines = vertical ? grid_lines(s->box.y0, s->box.y1, s->ny)
                                    : grid_lines(s->box.x0, s->box.x1, s->nx);
        if (!on_lines(lines, sh.lo) || !on_lines(lines, sh.hi)) {
          error(tag + "interface end points are not mesh nodes of subdomain " +
                std::to_string(s->id));
        }
      }
      const double d0 = vertical ? cfg.domain.y0 : cfg.domain.x0;
      const double d1 = vertical ? cfg.domain.y1 : cfg.domain.x1;
      if (!close(sh.lo, d0, d1 - d0) || !close(sh.hi, d1, d1 - d0)) {
        error(tag + "interface must end on the exterior boundary (cross points are unsupported)");
      }
    }
  }
  return out;
}

void require_valid(const std::vector<Diagnostic> &diagnostics) {
  std::ostringstream os;
  int count = 0;
  for (const auto &d : diagnostics) {
    if (!d.is_error()) continue;
    os << (count++ ? "; " : "") << d.message;
  }
  if (count) throw ValidationError(os.str());
}

}  // namespace oswr
