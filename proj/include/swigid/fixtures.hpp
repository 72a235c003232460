#pragma once

// Reference graphs used by the tests, the acceptance suite and the
// bundled .swig files.

#include <string>
#include <vector>

#include "swigid/model_ir.hpp"

namespace swigid::fixtures {

/// L -> D1, L -> Y1, D1 -> M1, M1 -> Y1; target D1.
BaseDag point_treatment();

/// Longitudinal version over n time points with targets D1..Dn. The
/// outcome is Y<n>, so longitudinal(1) has the structure of point_treatment.
BaseDag longitudinal(int n);

/// longitudinal(n) with the mediators M1..Mn as targets.
BaseDag mediator_split(int n);

/// D1 -> Y1 -> C <- D2; targets D1, D2. Dropping Do2 from a term that
/// conditions on C is unsound.
BaseDag collider();

/// L -> D1, L -> Y1, D1 -> Y1 with L unobserved: not identifiable.
BaseDag negative_control();

/// Copy of `base` with the named variables marked unobserved.
BaseDag with_unobserved(BaseDag base, const std::vector<std::string>& names);

}  // namespace swigid::fixtures
