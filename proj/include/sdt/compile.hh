// compile.hh -- turning core transducer expressions into pipelines of
// small, individually checkable two-way stages
#pragma once

#include "sdt/sdrte.hh"
#include "sdt/twoway.hh"

namespace sdt {

// On #u₁#u₂#…#uₙ#, emits the k-wide sliding windows: #u₁⋯u_k#u₂⋯u_{k+1}#…#.
// Undefined on inputs with fewer than k blocks; k = 1 is the identity on
// well-formed input.
TwoWayTransducer make_kwindow(int k, const Alphabet& sigma, Sym hash = '#');

// One-way stage factoring its input along the prefix code l: u₁⋯uₙ becomes
// #u₁#…#uₙ#.  Domain l*; the empty word becomes a lone #.
TwoWayTransducer make_boundary_marker(const RegexPtr& l, const Alphabet& sigma,
                                      Sym hash = '#');

// Reverses the order of the #-delimited segments, keeping each segment's
// content intact: #v₁#…#v_m# becomes #v_m#…#v₁#.
TwoWayTransducer make_segment_reverse(const Alphabet& sigma, Sym hash = '#');

// Runs a on every #-delimited segment: #v₁#…#v_m# yields ⟦a⟧(v₁)⋯⟦a⟧(v_m),
// undefined if any vᵢ ∉ dom a.  With keepMarker the #s separating (and
// surrounding) the per-segment outputs are kept, so stages can be chained.
TwoWayTransducer make_segmentwise(const TwoWayTransducer& a, Sym hash = '#',
                                  bool keepMarker = false);

// On u·m·v, runs a on u and copies v verbatim (left), or copies u and runs a
// on v (right); the marker m acts as a's missing endmarker.  keepMarker keeps
// m in the output between the two halves.  copyable lists the letters the
// verbatim half may contain.
TwoWayTransducer make_relativize_left(const TwoWayTransducer& a, Sym m,
                                      const Alphabet& copyable,
                                      bool keepMarker = false);
TwoWayTransducer make_relativize_right(const TwoWayTransducer& a, Sym m,
                                       const Alphabet& copyable,
                                       bool keepMarker = false);

// Compiles a core expression (no compose/dup/rev) into an equivalent
// pipeline; each stage carries a descriptive tag.  Fresh marker letters are
// drawn deterministically from printable symbols (then bytes ≥ 0x80) not
// occurring in the expression.  Throws std::invalid_argument on non-core
// input and std::runtime_error on marker exhaustion.
Pipeline compile(const SdrtePtr& c);

struct StageIssue {
  int stage = -1;       // index into the pipeline
  std::string tag;      // the stage's kind tag
  std::string witness;  // a monoid element generating a nontrivial cycle
};
struct StageReport {
  bool ok = true;
  std::vector<StageIssue> failures;
};

// Runs the aperiodicity check on every stage.
StageReport assert_stage_aperiodicity(const Pipeline& p);

}  // namespace sdt
