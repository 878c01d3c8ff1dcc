#include "tvstokes/projection.hpp"

#include "tvstokes/diff_ops.hpp"

namespace tvs {

Projector::Projector(const GridSpec& grid) : pinv_(grid) {}

VectorField2 Projector::apply(const VectorField2& w) const {
  const ScalarField z = pinv_.apply(div(w));
  VectorField2 out = w;
  out -= grad(z);
  return out;
}

VectorField2 project_global(const VectorField2& w) { return Projector(w.grid()).apply(w); }

LocalProjector::LocalProjector(const TilingTriple& tilings, double h) : plan_(tilings, h) {}

VectorField2 LocalProjector::apply(const VectorField2& w_k, Execution exec) const {
  const SubdomainRect& src = source();
  const SubdomainRect& dst = target();
  const SubdomainRect ak = plan_.a_k();
  const SubdomainRect bm = plan_.b_m();

  // div of the source-supported field lives on A_k
  const ScalarField d_k = div(transfer(w_k, src, ak));
  const ScalarField z_m = plan_.apply(d_k, exec);
  const VectorField2 correction = transfer(grad(z_m), bm, dst);

  VectorField2 out = transfer(w_k, src, dst);
  out -= correction;
  return out;
}

VectorField2 project_local(const VectorField2& w_k, const TilingTriple& tilings,
                           Execution exec) {
  return LocalProjector(tilings, w_k.h()).apply(w_k, exec);
}

}  // namespace tvs
