// Conformal target domains: map derivatives, interior values, boundary
// geometry, H^p classification, and the pole-clearance check.

#include "bpl/domains.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include "bpl/rational.hpp"
#include "gauss12.hpp"

namespace bpl {

namespace {

constexpr size_t kHolderTable = 1 << 14;
constexpr int kHolderCoarseStep = 64;

// Distance from w to the segment [p, q].
double seg_dist(cplx w, cplx p, cplx q) {
  const cplx d = q - p;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(w - p);
  double t = ((w.real() - p.real()) * d.real() + (w.imag() - p.imag()) * d.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(w - (p + t * d));
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

std::string trim_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

// ----------------------------------------------------------- construction

DomainMap DomainMap::disk() {
  DomainMap d;
  d.kind_ = DomainKind::unit_disk;
  d.name_ = "disk";
  return d;
}

DomainMap DomainMap::holder(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("domain: holder exponent must lie strictly between 0 and 1");
  DomainMap d;
  d.kind_ = DomainKind::model_holder;
  d.alpha_ = alpha;
  d.name_ = "holder" + trim_num(alpha);
  d.boundary_table_.resize(kHolderTable);
  for (size_t j = 0; j < kHolderTable; ++j) {
    const double th = kTwoPi * double(j) / double(kHolderTable);
    d.boundary_table_[j] = d.phi(cplx{std::cos(th), std::sin(th)});
  }
  return d;
}

DomainMap DomainMap::polygon(int sides, double circumradius) {
  if (sides < 3) throw Error("domain: polygon needs at least 3 sides");
  if (!(circumradius > 0.0)) throw Error("domain: circumradius must be positive");
  DomainMap d;
  d.kind_ = DomainKind::regular_polygon;
  d.sides_ = sides;
  d.circumradius_ = circumradius;
  d.name_ = "polygon" + std::to_string(sides);
  const double n = sides;
  // phi_1(prevertex) = I_N = Gamma(1/N) Gamma(1-2/N) / (N Gamma(1-1/N)) for
  // the unscaled map; the scale c makes that the circumradius.
  const double in = std::exp(std::lgamma(1.0 / n) + std::lgamma(1.0 - 2.0 / n) -
                             std::lgamma(1.0 - 1.0 / n)) / n;
  d.scale_ = circumradius / in;
  d.prevertex_angles_.resize(sides);
  d.vertices_.resize(sides);
  for (int k = 0; k < sides; ++k) {
    const double th = (2.0 * k + 1.0) * kPi / n;
    d.prevertex_angles_[k] = th;
    d.vertices_[k] = circumradius * cplx{std::cos(th), std::sin(th)};
  }
  return d;
}

DomainMap DomainMap::rectangle(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("domain: rectangle half-sides must be positive");
  DomainMap d;
  d.kind_ = DomainKind::rectangle;
  d.a_ = a;
  d.b_ = b;
  d.name_ = "rect" + trim_num(a) + "x" + trim_num(b);
  // Half-sides for scale 1 as functions of the prevertex angle mu: phi(1)
  // is the midpoint of the right edge and phi(i) the midpoint of the top
  // edge, so a1 = Re phi(1), b1 = Im phi(i). Their ratio is monotone in mu.
  auto half_sides = [&d](double mu, double* a1, double* b1) {
    d.mu_ = mu;
    d.prevertex_angles_ = {mu, kPi - mu, kPi + mu, kTwoPi - mu};
    d.scale_ = 1.0;
    *a1 = d.segment_integral({0, 0}, {1, 0}).real();
    *b1 = d.segment_integral({0, 0}, {0, 1}).imag();
  };
  const double target = b / a;
  double lo = 1e-6, hi = kPi / 2 - 1e-6;
  double a1 = 0, b1 = 0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    half_sides(mid, &a1, &b1);
    (b1 / a1 < target ? lo : hi) = mid;
    if (hi - lo < 1e-15) break;
  }
  half_sides(0.5 * (lo + hi), &a1, &b1);
  d.scale_ = a / a1;
  d.vertices_ = {cplx{a, b}, cplx{-a, b}, cplx{-a, -b}, cplx{a, -b}};
  return d;
}

// ----------------------------------------------------------- map values

double DomainMap::holder_exponent() const {
  switch (kind_) {
    case DomainKind::unit_disk: return 0.0;
    case DomainKind::model_holder: return alpha_;
    case DomainKind::regular_polygon: return 2.0 / double(sides_);
    case DomainKind::rectangle: return 0.5;
  }
  return 0.0;
}

cplx DomainMap::sc_prime(cplx z) const {
  if (kind_ == DomainKind::regular_polygon) {
    // prod_k (1 - z e^{-i theta_k}) over the prevertices collapses to
    // 1 + z^N, which stays in the right half-plane on the disk, so the
    // principal power is the smooth branch.
    cplx zn{1.0, 0.0};
    for (int k = 0; k < sides_; ++k) zn *= z;
    return std::pow(1.0 + zn, -2.0 / double(sides_));
  }
  // Rectangle: the collapsed quartic can cross the negative real axis, so
  // take principal logs factor by factor (each factor has positive real
  // part on the disk).
  cplx acc{0.0, 0.0};
  for (double th : prevertex_angles_) {
    const cplx f = 1.0 - z * cplx{std::cos(th), -std::sin(th)};
    acc += std::log(f);
  }
  return std::exp(-0.5 * acc);
}

cplx DomainMap::phi_prime(cplx z) const {
  switch (kind_) {
    case DomainKind::unit_disk:
      return cplx{1.0, 0.0};
    case DomainKind::model_holder:
      return std::pow(1.0 - z, -alpha_);
    default:
      return scale_ * sc_prime(z);
  }
}

cplx DomainMap::segment_integral(cplx z0, cplx z1) const {
  const auto& g = detail::gauss12();
  struct Iv {
    double a, b, err;
    cplx val;
  };
  auto eval_iv = [&](double a, double b) {
    Iv iv;
    iv.a = a;
    iv.b = b;
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    cplx contrib[12], acc{0.0, 0.0}, sub{0.0, 0.0};
    for (int i = 0; i < 12; ++i) {
      const double s = mid + hw * g.x[i];
      contrib[i] = (hw * g.w[i]) * sc_prime(z0 + s * (z1 - z0));
      acc += contrib[i];
    }
    for (int j = 0; j < 6; ++j) {
      const int i = g.sub_idx[j];
      sub += (g.sub_w[j] / g.w[i]) * contrib[i];
    }
    iv.val = acc;
    iv.err = 0.25 * std::abs(acc - sub);
    return iv;
  };

  std::vector<Iv> ivs{eval_iv(0.0, 1.0)};
  for (int round = 0; round < 400; ++round) {
    double tot = 0, abs_acc = 0;
    size_t worst = 0;
    for (size_t i = 0; i < ivs.size(); ++i) {
      tot += ivs[i].err;
      abs_acc += std::abs(ivs[i].val);
      if (ivs[i].err > ivs[worst].err) worst = i;
    }
    if (tot <= 1e-12 + 1e-11 * abs_acc || ivs.size() >= 256) break;
    const Iv w = ivs[worst];
    const double mid = 0.5 * (w.a + w.b);
    ivs[worst] = eval_iv(w.a, mid);
    ivs.push_back(eval_iv(mid, w.b));
  }
  std::sort(ivs.begin(), ivs.end(),
            [](const Iv& x, const Iv& y) { return x.a < y.a; });
  cplx total{0.0, 0.0};
  for (const Iv& iv : ivs) total += iv.val;
  return scale_ * (z1 - z0) * total;
}

cplx DomainMap::phi(cplx z) const {
  switch (kind_) {
    case DomainKind::unit_disk:
      return z;
    case DomainKind::model_holder:
      // antiderivative of (1-z)^{-alpha} vanishing at 0.
      return (1.0 - std::pow(1.0 - z, 1.0 - alpha_)) / (1.0 - alpha_);
    default:
      return segment_integral({0.0, 0.0}, z);
  }
}

cplx DomainMap::phi_step(cplx z_from, cplx z_to, cplx phi_from) const {
  switch (kind_) {
    case DomainKind::unit_disk:
      return z_to;
    case DomainKind::model_holder:
      return phi(z_to);
    default:
      return phi_from + segment_integral(z_from, z_to);
  }
}

cplx DomainMap::phi_inverse(cplx w, cplx z_guess, cplx phi_of_guess) const {
  if (kind_ == DomainKind::unit_disk) return w;
  cplx z = z_guess, fz = phi_of_guess;
  for (int it = 0; it < 60; ++it) {
    const cplx resid = fz - w;
    if (std::abs(resid) < 1e-13 * (1.0 + std::abs(w))) return z;
    cplx step = resid / phi_prime(z);
    cplx zn = z - step;
    // keep the iterate inside the disk; a shortened step still contracts
    while (std::abs(zn) >= 1.0 - 1e-9 && std::abs(step) > 1e-15) {
      step *= 0.5;
      zn = z - step;
    }
    fz = phi_step(z, zn, fz);
    z = zn;
  }
  throw Error("domain: phi inversion did not converge");
}

// ----------------------------------------------------------- geometry

double DomainMap::dist_to_boundary(cplx w) const {
  switch (kind_) {
    case DomainKind::unit_disk: {
      const double d = 1.0 - std::abs(w);
      if (d < -1e-12) throw Error("domain: point outside the disk");
      return std::max(d, 0.0);
    }
    case DomainKind::rectangle: {
      const double dx = a_ - std::abs(w.real()), dy = b_ - std::abs(w.imag());
      if (dx < -1e-12 * a_ || dy < -1e-12 * b_)
        throw Error("domain: point outside the rectangle");
      return std::max(std::min(dx, dy), 0.0);
    }
    case DomainKind::regular_polygon: {
      // Interior distance is the minimum over edge-line distances; for a
      // convex polygon the vertex normal cones point outward, so the
      // perpendicular foot of an interior point lies on the edge.
      double dmin = std::numeric_limits<double>::infinity();
      const size_t n = vertices_.size();
      for (size_t k = 0; k < n; ++k) {
        const cplx p = vertices_[k], q = vertices_[(k + 1) % n];
        const double c = cross(q - p, w - p) / std::abs(q - p);
        if (c < -1e-12 * circumradius_)
          throw Error("domain: point outside the polygon");
        dmin = std::min(dmin, std::max(c, 0.0));
      }
      return dmin;
    }
    case DomainKind::model_holder: {
      // Two-stage nearest-point search over the sampled boundary, then
      // golden-section refinement of |w - phi(e^{i theta})| in the
      // bracketing table interval.
      const size_t m = boundary_table_.size();
      size_t coarse = 0;
      double best = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < m; j += kHolderCoarseStep) {
        const double d = std::norm(w - boundary_table_[j]);
        if (d < best) {
          best = d;
          coarse = j;
        }
      }
      size_t jmin = coarse;
      for (size_t o = 0; o <= 2 * kHolderCoarseStep; ++o) {
        const size_t j = (coarse + m - kHolderCoarseStep + o) % m;
        const double d = std::norm(w - boundary_table_[j]);
        if (d < best) {
          best = d;
          jmin = j;
        }
      }
      const double h = kTwoPi / double(m);
      double lo = h * (double(jmin) - 1.0), hi = h * (double(jmin) + 1.0);
      auto f = [&](double th) {
        return std::norm(w - phi(cplx{std::cos(th), std::sin(th)}));
      };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = f(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = f(x2);
        }
      }
      return std::sqrt(std::min(f1, f2));
    }
  }
  return 0.0;
}

HpClass DomainMap::hp_classification(double p) const {
  if (!(p > 0.0)) throw Error("domain: classification needs p > 0");
  const double a = holder_exponent();
  return p * a < 1.0 ? HpClass::finite : HpClass::infinite;
}

cplx DomainMap::boundary_point(double t) const {
  t -= std::floor(t);
  switch (kind_) {
    case DomainKind::unit_disk:
      return cplx{std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
    case DomainKind::model_holder: {
      const double th = kTwoPi * t;
      return phi(cplx{std::cos(th), std::sin(th)});
    }
    default: {
      const size_t n = vertices_.size();
      std::vector<double> cum(n + 1, 0.0);
      for (size_t k = 0; k < n; ++k)
        cum[k + 1] = cum[k] + std::abs(vertices_[(k + 1) % n] - vertices_[k]);
      const double s = t * cum[n];
      const size_t k = std::min<size_t>(
          n - 1, std::upper_bound(cum.begin(), cum.end(), s) - cum.begin() - 1);
      const double f = (s - cum[k]) / (cum[k + 1] - cum[k]);
      return vertices_[k] + f * (vertices_[(k + 1) % n] - vertices_[k]);
    }
  }
}

BoundarySup DomainMap::sup_on_boundary(const std::function<cplx(cplx)>& f,
                                       int samples) const {
  const int k = std::max(samples, 64);
  std::vector<double> ts;
  ts.reserve(size_t(k) + vertices_.size());
  for (int j = 0; j < k; ++j) ts.push_back(double(j) / double(k));
  if (!vertices_.empty()) {
    // vertex parameters of the arclength parameterization
    const size_t n = vertices_.size();
    double per = 0;
    for (size_t e = 0; e < n; ++e)
      per += std::abs(vertices_[(e + 1) % n] - vertices_[e]);
    double cum = 0;
    for (size_t e = 0; e < n; ++e) {
      ts.push_back(cum / per);
      cum += std::abs(vertices_[(e + 1) % n] - vertices_[e]);
    }
  }
  std::sort(ts.begin(), ts.end());
  auto val = [&](double t) { return std::abs(f(boundary_point(t))); };
  double best = -1.0, tbest = 0.0;
  for (double t : ts) {
    const double v = val(t);
    if (v > best) {
      best = v;
      tbest = t;
    }
  }
  // Golden-section refinement in the neighbouring bracket.
  double lo = tbest - 1.0 / double(k), hi = tbest + 1.0 / double(k);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = val(x1), f2 = val(x2);
  for (int it = 0; it < 64; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = val(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = val(x2);
    }
  }
  BoundarySup out;
  out.value = std::max({best, f1, f2});
  out.samples = int(ts.size()) + 128;
  return out;
}

double DomainMap::inradius() const {
  switch (kind_) {
    case DomainKind::unit_disk: return 1.0;
    case DomainKind::rectangle: return std::min(a_, b_);
    case DomainKind::regular_polygon:
      return circumradius_ * std::cos(kPi / double(sides_));
    case DomainKind::model_holder: return dist_to_boundary({0.0, 0.0});
  }
  return 0.0;
}

double DomainMap::perimeter() const {
  switch (kind_) {
    case DomainKind::unit_disk: return kTwoPi;
    case DomainKind::rectangle: return 4.0 * (a_ + b_);
    case DomainKind::regular_polygon:
      return 2.0 * double(sides_) * circumradius_ * std::sin(kPi / double(sides_));
    case DomainKind::model_holder: {
      double len = 0;
      const size_t m = boundary_table_.size();
      for (size_t j = 0; j < m; ++j)
        len += std::abs(boundary_table_[(j + 1) % m] - boundary_table_[j]);
      return len;
    }
  }
  return 0.0;
}

// ----------------------------------------------------------- pole check

namespace {

// Exterior clearance of w from the closed domain; negative inside.
double exterior_clearance(const DomainMap& d, cplx w) {
  switch (d.kind()) {
    case DomainKind::unit_disk:
      return std::abs(w) - 1.0;
    case DomainKind::rectangle:
    case DomainKind::regular_polygon: {
      const auto& v = d.vertices();
      const size_t n = v.size();
      bool outside = false;
      double dmin = std::numeric_limits<double>::infinity();
      double inner = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < n; ++k) {
        const cplx p = v[k], q = v[(k + 1) % n];
        const double c = cross(q - p, w - p) / std::abs(q - p);
        if (c < 0.0) outside = true;
        inner = std::min(inner, c);
        dmin = std::min(dmin, seg_dist(w, p, q));
      }
      return outside ? dmin : -std::max(inner, 0.0);
    }
    case DomainKind::model_holder: {
      // Even-odd test against the sampled boundary polyline, then distance
      // to the polyline.
      std::vector<cplx> poly;
      const int probes = 512;
      poly.reserve(probes);
      for (int j = 0; j < probes; ++j)
        poly.push_back(d.boundary_point(double(j) / probes));
      bool inside = false;
      double dmin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < probes; ++j) {
        const cplx p = poly[j], q = poly[(j + 1) % probes];
        if ((p.imag() > w.imag()) != (q.imag() > w.imag())) {
          const double xint = p.real() + (w.imag() - p.imag()) *
                                             (q.real() - p.real()) /
                                             (q.imag() - p.imag());
          if (xint > w.real()) inside = !inside;
        }
        dmin = std::min(dmin, seg_dist(w, p, q));
      }
      return inside ? -dmin : dmin;
    }
  }
  return 0.0;
}

}  // namespace

PoleCheck validate_poles_outside(const DomainMap& d, const RationalFunction& r,
                                 double margin) {
  const auto& poles = r.poles();
  if (!poles) return PoleCheck::unknown;
  for (const cplx& p : *poles)
    if (exterior_clearance(d, p) < margin) return PoleCheck::violation;
  return PoleCheck::ok;
}

}  // namespace bpl
