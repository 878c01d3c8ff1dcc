#pragma once

// Orthogonal projection onto K = Null(div) on the extended grid:
//   P w = w - grad( Lap^+ div w ).

#include "tvstokes/spectral.hpp"

namespace tvs {

// Global projection on one grid. Immutable; apply() is thread-safe.
class Projector {
 public:
  explicit Projector(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return pinv_.grid(); }
  VectorField2 apply(const VectorField2& w) const;

 private:
  LaplacianPinv pinv_;
};

VectorField2 project_global(const VectorField2& w);

// R_target P E_source evaluated from the tiles of a TilingTriple only:
// the identity part is a copy of the overlap, the correction is
// grad_{B_m}( R_{B_m} Lap^+ E_{A_k} div_{A_k} w ) restricted to target.
class LocalProjector {
 public:
  LocalProjector(const TilingTriple& tilings, double h);

  const SubdomainRect& source() const noexcept { return plan_.tilings().source; }
  const SubdomainRect& target() const noexcept { return plan_.tilings().target; }
  const LocalPinvPlan& pinv_plan() const noexcept { return plan_; }

  // w_k lives on source(); the result on target().
  VectorField2 apply(const VectorField2& w_k, Execution exec = Execution::Serial) const;

 private:
  LocalPinvPlan plan_;
};

VectorField2 project_local(const VectorField2& w_k, const TilingTriple& tilings,
                           Execution exec = Execution::Serial);

}  // namespace tvs
