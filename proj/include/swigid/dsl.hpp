#pragma once

// Text formats: the .swig graph language, estimand and d-separation
// queries, and Graphviz output.
//
//   graph point_treatment {
//     var L @0 role=covariate unobserved;   # comment
//     var D1 @1 role=target levels=2;
//     edge L -> D1;
//     target D1 order=1;
//   }

#include <string>
#include <string_view>

#include "swigid/diagnostics.hpp"
#include "swigid/graph_query.hpp"
#include "swigid/model_ir.hpp"

namespace swigid {

/// Syntax only; run `validate` for graph-level problems. Throws ParseError.
BaseDag parse_graph(std::string_view text);
/// Inverse of parse_graph: parse_graph(emit_graph(g)) == g.
std::string emit_graph(const BaseDag& base);

/// parse_graph followed by validate; violations become a ModelError.
BaseDag load_graph(std::string_view text);

/// "q[1](Y1 | do D1=d1)"; `do X` names the intervention node of X. An
/// optional leading "identify" is accepted. Checked against `swig`.
Estimand parse_estimand(std::string_view text, const Swig& swig);

/// "q[1]: Y1 _||_ Do1 | M1, D1", optional leading "dsep".
CiQuery parse_ci_query(std::string_view text);

/// "0", "1", "q2", "q[2]", "{1,3}", "q{1,3}".
Regime parse_regime(std::string_view text);

/// Regime graph in DOT. Intervention nodes are boxes, unobserved nodes are
/// dashed, and severed copy edges are left out.
std::string emit_dot(const Swig& swig, const Regime& regime);

}  // namespace swigid
