#pragma once

#include <array>
#include <string>
#include <vector>

#include "wvsim/framework.hpp"
#include "wvsim/linalg.hpp"

namespace wvsim {

/// Four-node operator loop, stored in clockwise trace order. For the
/// canonical measurement loop the order is [rho_i, T0^dag, rho_f, T1]:
/// node 1 holds the already-daggered top arc, so evaluation is a plain
/// ordered product.
struct Diagram {
  std::array<Operator, 4> nodes;
  Complex scale{1.0, 0.0};

  Diagram(std::array<Operator, 4> nodes_in, Complex scale_in = Complex{1.0, 0.0});
};

/// A runnable measurement instance equivalent to a compiled diagram:
/// scale x extract_complex(joint_probabilities(ct, boundary)) reproduces the
/// source diagram's trace.
struct FrameworkInstance {
  ControlledTransform ct;
  Boundary boundary;
  Complex scale;
};

/// scale x tr(n0 n1 n2 n3).
Complex evaluate(const Diagram& d);

/// Cyclic shift of the loop: node i moves to slot (i + k) mod 4.
/// Trace and scale are unchanged.
Diagram rotate(const Diagram& d, int k);

/// Spectral decomposition of a Hermitian node: one child per eigenvector,
/// the node replaced by the eigenprojector |a_j><a_j| and weighted by the
/// eigenvalue a_j. The weighted child traces recombine to evaluate(d).
struct SplitTerm {
  double weight;
  Diagram child;
};
std::vector<SplitTerm> spectral_split(const Diagram& d, std::size_t idx);

/// Reinterpret the loop as a measurement: node 0 becomes the prepared state
/// (normalized by its trace), node 2 the measurement effect, nodes 1 and 3
/// the transform branches (node 1 is un-daggered into T0). Out-of-range
/// slots are repaired by dividing by their spectral norm; every divisor is
/// multiplied back into the instance scale. Throws PhysicalityError when a
/// state/effect slot is not PSD (the message names the slot).
FrameworkInstance compile(const Diagram& d);

/// JSON round-trip: {"nodes": [[ [re, im], ... ] x4], "scale": [re, im]}.
/// Node entries are row-major; the dimension is inferred.
std::string serialize_diagram(const Diagram& d);
Diagram parse_diagram(const std::string& json_text);

}  // namespace wvsim
