// fixtures.hh -- shared test machines and a reference two-way simulator
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "sdt/twoway.hh"

namespace fixtures {

using sdt::Sym;
using sdt::TwoWayTransducer;

// Rotating-blocks transducer over {a,#,$}:
//   $a^{m₁}#a^{m₂}$a^{m₃}#a^{m₄}$… ↦ b^{m₂}a^{m₁}b^{m₄}a^{m₃}…
inline TwoWayTransducer rotator() {
  TwoWayTransducer A;
  for (const char* n : {"q0", "q1", "q2", "q3", "q4", "q5", "q6"})
    A.add_state(n);
  A.initial = 0;
  A.finals[1] = true;
  A.input = sdt::alphabet_from_string("a#$");
  A.output = sdt::alphabet_from_string("ab");
  auto r = [&](int f, char c, int t, int mv, const char* out) {
    A.add_rule(f, (Sym)(unsigned char)c, t, mv, out);
  };
  r(0, sdt::kLeftMark, 0, +1, "");
  r(0, '$', 1, +1, "");
  r(1, 'a', 1, +1, "");
  r(1, '#', 2, +1, "");
  r(2, 'a', 2, +1, "b");
  r(2, '$', 3, -1, "");
  r(3, 'a', 3, -1, "");
  r(3, '#', 4, -1, "");
  r(4, 'a', 4, -1, "");
  r(4, '$', 5, +1, "");
  r(5, 'a', 5, +1, "a");
  r(5, '#', 6, +1, "");
  r(6, 'a', 6, +1, "");
  r(6, '$', 1, +1, "");
  A.check();
  return A;
}

// Block-shuffling transducer over {a,b} with domain b(a*b)^{≥2}a*:
//   b·u₁u₂⋯uₙ·a^k ↦ u₃u₁u₄u₂⋯uₙu_{n−2}·a^k  (uᵢ ∈ a*b; just a^k when n=2)
inline TwoWayTransducer shuffler() {
  TwoWayTransducer A;
  for (const char* n : {"s", "q0", "q1", "q2", "q3", "q4", "q5", "q6"})
    A.add_state(n);
  A.initial = 0;
  A.finals[3] = true;  // q2
  A.input = sdt::alphabet_from_string("ab");
  A.output = sdt::alphabet_from_string("ab");
  auto r = [&](const char* f, char c, const char* t, int mv, const char* out) {
    A.add_rule(A.state_index(f), (Sym)(unsigned char)c, A.state_index(t), mv,
               out);
  };
  r("s", sdt::kLeftMark, "s", +1, "");
  r("s", 'b', "q0", +1, "");
  r("q0", 'a', "q0", +1, "");
  r("q0", 'b', "q1", +1, "");
  r("q1", 'a', "q1", +1, "");
  r("q1", 'b', "q2", +1, "");
  r("q2", 'a', "q2", +1, "a");
  r("q2", 'b', "q3", -1, "b");
  r("q3", 'a', "q3", -1, "");
  r("q3", 'b', "q4", -1, "");
  r("q4", 'a', "q4", -1, "");
  r("q4", 'b', "q5", -1, "");
  r("q5", 'a', "q5", -1, "");
  r("q5", 'b', "q6", +1, "");
  r("q6", 'a', "q6", +1, "a");
  r("q6", 'b', "q0", +1, "b");
  A.check();
  return A;
}

// Reference simulator: tracks the full configuration set and reports a loop
// on exact repetition.  Kept deliberately independent from sdt::eval.
inline std::optional<std::string> simulate(const TwoWayTransducer& A,
                                           const std::string& w) {
  const int n = (int)w.size();
  int q = A.initial, pos = 0;
  std::string out;
  std::set<std::pair<int, int>> seen;
  while (true) {
    if (pos == n + 1 && A.finals[q]) return out;
    if (!seen.insert({q, pos}).second) return std::nullopt;  // loop
    Sym a = pos == 0 ? sdt::kLeftMark
            : pos == n + 1 ? sdt::kRightMark
                           : (Sym)(unsigned char)w[pos - 1];
    const TwoWayTransducer::Rule* r = A.rule(q, a);
    if (!r) return std::nullopt;
    out += r->out;
    q = r->to;
    pos += r->move;
  }
}

// Replay a claimed (d,p,q)-run on w (letters taken verbatim, no endmarkers):
// enter from the given side in state p and report (exitedRight, exitState).
inline std::optional<std::pair<bool, int>> replay(const TwoWayTransducer& A,
                                                  const std::string& w, int p,
                                                  bool enterLeft) {
  const int n = (int)w.size();
  int q = p, pos = enterLeft ? 0 : n - 1;
  std::set<std::pair<int, int>> seen;
  while (true) {
    if (!seen.insert({q, pos}).second) return std::nullopt;
    const TwoWayTransducer::Rule* r =
        A.rule(q, (Sym)(unsigned char)w[pos]);
    if (!r) return std::nullopt;
    q = r->to;
    pos += r->move;
    if (pos < 0) return std::make_pair(false, q);
    if (pos >= n) return std::make_pair(true, q);
  }
}

}  // namespace fixtures
