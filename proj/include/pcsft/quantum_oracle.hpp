#pragma once

#include "pcsft/hilbert.hpp"

namespace pcsft {

/// Observable shifted by its quantum mean so that its own average vanishes.
struct CenteredObservable {
  SymOperator original;
  double mean = 0.0;
  SymOperator centered;
};

/// Both evaluations of <A1 (x) A2>_Psi. `direct` is the inner product in the
/// tensor space, `trace_route` is Tr(Psi^ A2 Psi^* A1).
struct ProductAverage {
  double direct = 0.0;
  double trace_route = 0.0;

  double value() const { return direct; }
};

/// Quantum covariance computed as <A1 (x) A2> - <A1><A2> and, separately,
/// as the product average of the centered observables.
struct QuantumCovariance {
  double uncentered_route = 0.0;
  double centered_route = 0.0;

  double value() const { return uncentered_route; }
};

/// Tr(rho^(side) A).
double qm_average_single(const SymOperator& a, const BipartiteState& psi, Side side);

/// Throws ConsistencyError if the two routes differ by more than 1e-10 (1 + |value|).
ProductAverage qm_average_product(const SymOperator& a1, const SymOperator& a2,
                                  const BipartiteState& psi);

/// A - <A>_Psi I, using the exact quantum mean.
CenteredObservable center(const SymOperator& a, const BipartiteState& psi, Side side);

/// Throws ConsistencyError if the two routes differ by more than 1e-10 (1 + |value|).
QuantumCovariance qm_covariance(const SymOperator& a1, const SymOperator& a2,
                                const BipartiteState& psi);

}  // namespace pcsft
