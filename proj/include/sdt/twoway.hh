// twoway.hh -- deterministic two-way transducers: evaluation, step sets,
// zigzag composition, transition monoid, pipelines
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdt/monoid.hh"
#include "sdt/regex.hh"

namespace sdt {

// Reads the tape ⊢w⊣ (endmarkers kLeftMark/kRightMark); position 0 is ⊢,
// position |w|+1 is ⊣.  δ(q,⊢) must move +1, δ(q,⊣) must move −1 and is
// forbidden for final states.  Acceptance: reaching position |w|+1 in a
// final state; nothing is produced at the accepting configuration.
struct TwoWayTransducer {
  struct Rule {
    int to = 0;
    int move = +1;  // −1 or +1
    std::string out;
  };

  std::vector<std::string> stateNames;
  std::string tag;  // optional description, e.g. the stage kind in a pipeline
  Alphabet input, output;
  int initial = 0;
  std::vector<bool> finals;
  std::vector<std::map<Sym, Rule>> delta;  // delta[q][letter]

  int num_states() const { return (int)stateNames.size(); }
  int add_state(const std::string& name, bool final = false);
  int state_index(const std::string& name) const;  // -1 if absent
  void add_rule(int from, Sym on, int to, int move, const std::string& out);
  const Rule* rule(int q, Sym a) const;
  void check() const;  // throws std::invalid_argument on broken invariants
};

std::optional<std::string> eval(const TwoWayTransducer& A, const std::string& w);

enum class StepDir { LR, LL, RR, RL };
std::string step_dir_name(StepDir d);

struct Step {
  StepDir dir;
  int from = 0, to = 0;
};

// Deterministic by construction: at most one step per (entry side, state).
struct StepSet {
  std::map<int, std::pair<StepDir, int>> leftEntry;   // p -> (LL|LR, q)
  std::map<int, std::pair<StepDir, int>> rightEntry;  // p -> (RL|RR, q)

  bool operator==(const StepSet& o) const {
    return leftEntry == o.leftEntry && rightEntry == o.rightEntry;
  }
  bool operator<(const StepSet& o) const {
    if (leftEntry != o.leftEntry) return leftEntry < o.leftEntry;
    return rightEntry < o.rightEntry;
  }
  bool has(StepDir d, int p, int q) const;
  std::vector<Step> steps() const;  // flattened, sorted
};

// Step set realised by a nonempty word over Σ⊎{⊢,⊣}; the endmarkers are
// treated as plain letters here.
StepSet behavior(const TwoWayTransducer& A, const std::string& w);

StepSet stepset_unit(int numStates);
StepSet stepset_product(const StepSet& s, const StepSet& t);

// The zigzag run between adjacent blocks with step sets s (left) and t
// (right), entered in state p heading into t from the left (start = LL) or
// into s from the right (start = RR).  The recorded steps alternate between
// LL-steps of t and RR-steps of s.  exit is (RR,x): the run is about to
// enter t from the left in state x but t has no LL-step there; or (LL,y):
// about to enter s from the right in state y with no RR-step; nullopt when
// the zigzag repeats a configuration and loops forever.
struct ZigzagResult {
  std::vector<Step> steps;
  std::optional<std::pair<StepDir, int>> exit;
};
ZigzagResult zigzag(const StepSet& s, const StepSet& t, int p, StepDir start);

struct TrMonoid {
  MonoidPtr monoid;
  Morphism phi;                   // letters of Σ⊎{⊢,⊣} to elements
  std::vector<StepSet> payload;   // element index -> step set
};

TrMonoid transition_monoid(const TwoWayTransducer& A);
bool is_aperiodic_2dft(const TwoWayTransducer& A);

std::string dump_stepset(const TwoWayTransducer& A, const StepSet& s);

// Stage i+1 consumes stage i's output; alphabets must chain.
struct Pipeline {
  std::vector<TwoWayTransducer> stages;
  void check() const;  // throws std::invalid_argument
};

std::optional<std::string> pipeline_eval(const Pipeline& P,
                                         const std::string& w);

}  // namespace sdt
