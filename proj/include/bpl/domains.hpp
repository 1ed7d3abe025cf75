#pragma once
// Simply connected target domains presented through a conformal map
// phi: unit disk -> G with directly evaluable derivative, interior values by
// segment quadrature, exact boundary geometry for distance and sup-norm
// computations, and the H^p classification of phi' that selects which
// inequality's hypotheses a domain satisfies.
//
// Kinds:
//   unit_disk        phi = id.
//   model_holder(a)  phi'(z) = (1-z)^{-a}, the pure model of the growth bound
//                    |phi'| <= C/(1-|z|)^a; phi has a closed form.
//   regular_polygon  Schwarz-Christoffel map onto the regular N-gon with
//                    vertices at angles (2k+1)pi/N (N = 4 gives the
//                    axis-aligned square); symmetry collapses the prevertex
//                    product to phi'(z) = c (1+z^N)^{-2/N} and fixes the
//                    scale c in closed form from the circumradius.
//   rectangle        Schwarz-Christoffel with prevertices e^{+-i mu},
//                    e^{i(pi -+ mu)}; mu calibrated by bisection so the image
//                    is { |x| < a, |y| < b }.

#include <functional>
#include <string>
#include <vector>

#include "bpl/util.hpp"

namespace bpl {

enum class DomainKind { unit_disk, model_holder, regular_polygon, rectangle };
enum class HpClass { finite, infinite };

// Boundary sup of |f| with the grid it was computed on.
struct BoundarySup {
  double value = 0.0;
  int samples = 0;
};

class DomainMap {
 public:
  static DomainMap disk();
  // exponent strictly between 0 and 1.
  static DomainMap holder(double alpha);
  // sides >= 3, circumradius > 0.
  static DomainMap polygon(int sides, double circumradius);
  // half-sides a, b > 0 (image is |x| < a, |y| < b).
  static DomainMap rectangle(double a, double b);

  DomainKind kind() const { return kind_; }
  // Short identifier for result records ("disk", "holder0.5", "polygon5",
  // "rect2x1").
  const std::string& name() const { return name_; }

  // The exponent in |phi'(z)| <= C/(1-|z|)^alpha: 0 (disk), alpha (holder),
  // 2/N (polygon), 1/2 (rectangle).
  double holder_exponent() const;

  // Derivative of the conformal map; |z| < 1. O(1) per point.
  cplx phi_prime(cplx z) const;

  // phi(z) = integral of phi' along [0, z] (phi(0) = 0 for every kind).
  // Closed form for disk/holder kinds, adaptive segment quadrature otherwise
  // (absolute accuracy ~1e-10 * scale away from the prevertices).
  cplx phi(cplx z) const;

  // phi(z_to) given phi(z_from), integrating along the straight segment
  // between them (both strictly inside the disk). Lets ray-marching callers
  // reuse previous values instead of re-integrating from 0.
  cplx phi_step(cplx z_from, cplx z_to, cplx phi_from) const;

  // Newton inversion of phi starting from an interior guess that already
  // maps near w (callers march along curves and hand in the previous
  // preimage). phi(z_guess) is passed so steps accumulate incrementally.
  cplx phi_inverse(cplx w, cplx z_guess, cplx phi_of_guess) const;

  // Exact geometric distance from an interior point to the boundary (disk,
  // polygon, rectangle); distance to a dense sampled boundary polyline with
  // local refinement for model_holder. Throws when w lies outside the closed
  // domain (geometry kinds only; holder callers obtain w = phi(z)).
  double dist_to_boundary(cplx w) const;

  // Whether circle means of |phi'|^p stay bounded as r -> 1.
  HpClass hp_classification(double p) const;

  // max |f| over the boundary: coarse scan of >= samples points (vertices
  // always included) plus golden-section refinement around the champion.
  BoundarySup sup_on_boundary(const std::function<cplx(cplx)>& f,
                              int samples) const;

  // Boundary point at parameter t in [0,1): arclength parameterization for
  // polygon/rectangle, angle parameterization phi(e^{2 pi i t}) otherwise.
  cplx boundary_point(double t) const;

  // Corner list in boundary order (empty for disk/holder).
  const std::vector<cplx>& vertices() const { return vertices_; }

  double inradius() const;
  double perimeter() const;

 private:
  DomainMap() = default;
  cplx sc_prime(cplx z) const;   // unscaled prevertex product
  cplx segment_integral(cplx z0, cplx z1) const;  // of phi' along [z0,z1]

  DomainKind kind_ = DomainKind::unit_disk;
  std::string name_ = "disk";
  double alpha_ = 0.0;       // holder exponent
  int sides_ = 0;            // polygon
  double circumradius_ = 0;  // polygon
  double mu_ = 0.0;          // rectangle prevertex angle
  double a_ = 0.0, b_ = 0.0;  // rectangle half-sides
  double scale_ = 1.0;       // Schwarz-Christoffel scale c
  std::vector<double> prevertex_angles_;
  std::vector<cplx> vertices_;
  std::vector<cplx> boundary_table_;  // holder kind: dense phi(e^{i theta})
};

}  // namespace bpl
