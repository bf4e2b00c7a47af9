// extract.hh -- synthesizing transducer expressions from aperiodic two-way
// machines: class-preimage regexes, step expressions, full extraction
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdt/monoid.hh"
#include "sdt/sdrte.hh"
#include "sdt/twoway.hh"

namespace sdt {

// α : A → regexes over B = B₁⊎B₂ with ⟦α(a)⟧ ⊆ B₁*B₂ and pairwise-disjoint
// images.  Substituting such images into an expression preserves unambiguity,
// bounds the synchronisation delay of starred parsers, and keeps them
// stabilising, so they are the glue of the class-preimage construction.
struct MarkedSubstitution {
  Alphabet source;  // A
  Alphabet b1, b2;  // partition of the target alphabet
  std::vector<std::pair<Sym, RegexPtr>> images;

  // Verifies the shape conditions (disjoint partition, every image inside
  // B₁*B₂, pairwise-disjoint images) with automata; throws
  // std::invalid_argument with a witness word when one fails.
  static MarkedSubstitution make(const Alphabet& source, const Alphabet& b1,
                                 const Alphabet& b2,
                                 std::vector<std::pair<Sym, RegexPtr>> images);

  RegexPtr apply(const RegexPtr& e) const;
};

// One node of the recursion behind uss_expressions, for inspection.
struct UssTrace {
  std::string rule;    // trivial / neutral-letters / cyclic / chain / split
  std::string detail;  // eliminated letters, generator, chosen partition, ...
  std::vector<UssTrace> children;
};

// For every element s of phi's target: an unambiguous, stabilising,
// SD-regular expression E_s with ⟦E_s⟧ = φ⁻¹(s); elements outside the image
// of φ map to the empty regex.  The target must be aperiodic (throws
// std::invalid_argument otherwise); surjectivity is not required.
std::map<int, RegexPtr> uss_expressions(const Morphism& phi,
                                        UssTrace* trace = nullptr);

// Step expressions for one machine.  For a regex e over Σ⊎{⊢,⊣} that is
// unambiguous, stabilising and SD, a transition-monoid element s and a step
// x ∈ s, step_expr builds an expression whose domain is ⟦e⟧ ∩ φ⁻¹(s) and
// whose value on w is the output the machine produces running over w
// according to step x.  All intermediate results are memoized, so the table
// can be reused across steps and subexpressions.
class StepExprTable {
 public:
  explicit StepExprTable(const TwoWayTransducer& a);

  const TrMonoid& transition() const { return tm_; }

  // φ(⟦e⟧), computed structurally alongside the expressions
  const ElementSet& image(const RegexPtr& e);
  // a regex denoting ⟦e⟧ ∩ φ⁻¹(s) (Regex::empty when the slice is empty)
  RegexPtr slice(const RegexPtr& e, int s);

  SdrtePtr step_expr(const RegexPtr& e, int s, Step x);

  // Output of the maximal zigzag run between a block matched by (e,s) and a
  // block matched by (f,t), entered in state p with an LL-step into the
  // right block or an RR-step into the left one.  An empty zigzag yields
  // (⟦e,s⟧⟦f,t⟧ ▷ ε); a looping zigzag yields ⊥.
  SdrtePtr zigzag_expr(const RegexPtr& e, int s, const RegexPtr& f, int t,
                       int p, StepDir start);

  // window widths picked per starred parser, in discovery order
  const std::vector<std::pair<std::string, int>>& star_widths() const {
    return starLog_;
  }

 private:
  using StepKey = std::tuple<const Regex*, int, int, int, int>;
  using ZigKey = std::tuple<const Regex*, int, const Regex*, int, int, int>;

  RegexPtr power(const RegexPtr& f, int n);
  int width_of(const RegexPtr& f);  // stabilising index of φ(⟦f⟧)
  SdrtePtr build(const RegexPtr& e, int s, Step x);
  SdrtePtr concat_case(const RegexPtr& l, const RegexPtr& r, int s, Step x);
  SdrtePtr star_case(const RegexPtr& e, int s, Step x);

  TwoWayTransducer a_;
  TrMonoid tm_;
  std::map<const Regex*, RegexPtr> keep_;  // pins nodes used as map keys
  std::map<const Regex*, ElementSet> images_;
  std::map<std::pair<const Regex*, int>, RegexPtr> slices_;
  std::map<std::pair<const Regex*, int>, RegexPtr> powers_;
  std::map<const Regex*, int> widths_;
  std::vector<std::pair<std::string, int>> starLog_;
  std::map<StepKey, SdrtePtr> table_;
  std::map<ZigKey, SdrtePtr> zigzags_;
};

// An expression over the machine's input alphabet with the same semantics
// as the machine; requires aperiodicity (throws std::invalid_argument).
// When traceJson is given it receives the class-preimage recursion tree and
// the chosen star widths as a JSON document.
SdrtePtr extract(const TwoWayTransducer& a, std::string* traceJson = nullptr);

}  // namespace sdt
