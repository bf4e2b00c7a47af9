// twoway.cc -- two-way transducer evaluation and step-set algebra
#include "sdt/twoway.hh"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sdt {

int TwoWayTransducer::add_state(const std::string& name, bool final) {
  stateNames.push_back(name);
  finals.push_back(final);
  delta.emplace_back();
  return (int)stateNames.size() - 1;
}

int TwoWayTransducer::state_index(const std::string& name) const {
  for (int i = 0; i < (int)stateNames.size(); ++i)
    if (stateNames[i] == name) return i;
  return -1;
}

void TwoWayTransducer::add_rule(int from, Sym on, int to, int move,
                                const std::string& out) {
  delta[from][on] = Rule{to, move, out};
}

const TwoWayTransducer::Rule* TwoWayTransducer::rule(int q, Sym a) const {
  auto it = delta[q].find(a);
  return it == delta[q].end() ? nullptr : &it->second;
}

void TwoWayTransducer::check() const {
  if (stateNames.empty()) throw std::invalid_argument("2dft: no states");
  if (initial < 0 || initial >= num_states())
    throw std::invalid_argument("2dft: bad initial state");
  for (int q = 0; q < num_states(); ++q)
    for (auto& [a, r] : delta[q]) {
      if (r.to < 0 || r.to >= num_states())
        throw std::invalid_argument("2dft: bad target state");
      if (r.move != -1 && r.move != +1)
        throw std::invalid_argument("2dft: bad move");
      if (a == kLeftMark && r.move != +1)
        throw std::invalid_argument("2dft: left endmarker must move right");
      if (a == kRightMark && r.move != -1)
        throw std::invalid_argument("2dft: right endmarker must move left");
      if (a == kRightMark && finals[q])
        throw std::invalid_argument(
            "2dft: final state may not read the right endmarker");
      if (a != kLeftMark && a != kRightMark && !alphabet_contains(input, a))
        throw std::invalid_argument("2dft: transition on foreign letter");
      for (char c : r.out)
        if (!alphabet_contains(output, (Sym)(unsigned char)c))
          throw std::invalid_argument("2dft: production outside output alphabet");
    }
}

std::optional<std::string> eval(const TwoWayTransducer& A,
                                const std::string& w) {
  const int n = (int)w.size();
  auto letter_at = [&](int pos) -> Sym {
    if (pos == 0) return kLeftMark;
    if (pos == n + 1) return kRightMark;
    return (Sym)(unsigned char)w[pos - 1];
  };
  int q = A.initial, pos = 0;
  std::string out;
  long budget = (long)A.num_states() * (n + 2);
  for (long step = 0; step <= budget; ++step) {
    if (pos == n + 1 && A.finals[q]) return out;
    const TwoWayTransducer::Rule* r = A.rule(q, letter_at(pos));
    if (!r) return std::nullopt;
    out += r->out;
    q = r->to;
    pos += r->move;
  }
  return std::nullopt;  // a configuration repeated: the run loops
}

std::string step_dir_name(StepDir d) {
  switch (d) {
    case StepDir::LR: return "LR";
    case StepDir::LL: return "LL";
    case StepDir::RR: return "RR";
    case StepDir::RL: return "RL";
  }
  return "?";
}

bool StepSet::has(StepDir d, int p, int q) const {
  const auto& m =
      (d == StepDir::LL || d == StepDir::LR) ? leftEntry : rightEntry;
  auto it = m.find(p);
  return it != m.end() && it->second == std::make_pair(d, q);
}

std::vector<Step> StepSet::steps() const {
  std::vector<Step> out;
  for (auto& [p, dq] : leftEntry) out.push_back({dq.first, p, dq.second});
  for (auto& [p, dq] : rightEntry) out.push_back({dq.first, p, dq.second});
  return out;
}

StepSet behavior(const TwoWayTransducer& A, const std::string& w) {
  if (w.empty()) throw std::invalid_argument("behavior: empty word");
  const int n = (int)w.size();
  StepSet out;
  // simulate within positions 0..n-1; exiting at −1 is a left exit, at n a
  // right exit; loop detection per (state, position)
  auto run = [&](int p, bool fromLeft) -> std::optional<std::pair<bool, int>> {
    int q = p, pos = fromLeft ? 0 : n - 1;
    std::vector<bool> seen((size_t)A.num_states() * n, false);
    while (true) {
      size_t key = (size_t)q * n + pos;
      if (seen[key]) return std::nullopt;
      seen[key] = true;
      const TwoWayTransducer::Rule* r =
          A.rule(q, (Sym)(unsigned char)w[pos]);
      if (!r) return std::nullopt;
      q = r->to;
      pos += r->move;
      if (pos < 0) return std::make_pair(false, q);  // exits left
      if (pos >= n) return std::make_pair(true, q);  // exits right
    }
  };
  for (int p = 0; p < A.num_states(); ++p) {
    if (auto e = run(p, true))
      out.leftEntry[p] = {e->first ? StepDir::LR : StepDir::LL, e->second};
    if (auto e = run(p, false))
      out.rightEntry[p] = {e->first ? StepDir::RR : StepDir::RL, e->second};
  }
  return out;
}

StepSet stepset_unit(int numStates) {
  StepSet u;
  for (int p = 0; p < numStates; ++p) {
    u.leftEntry[p] = {StepDir::LR, p};
    u.rightEntry[p] = {StepDir::RL, p};
  }
  return u;
}

ZigzagResult zigzag(const StepSet& s, const StepSet& t, int p, StepDir start) {
  if (start != StepDir::LL && start != StepDir::RR)
    throw std::invalid_argument("zigzag: start must be LL or RR");
  ZigzagResult res;
  bool intoT = start == StepDir::LL;  // else heading into s from the right
  int x = p;
  std::set<std::pair<bool, int>> visited;
  while (true) {
    if (!visited.insert({intoT, x}).second) {
      res.exit = std::nullopt;  // the zigzag repeats: infinite run
      return res;
    }
    if (intoT) {
      auto it = t.leftEntry.find(x);
      if (it == t.leftEntry.end() || it->second.first != StepDir::LL) {
        res.exit = std::make_pair(StepDir::RR, x);
        return res;
      }
      res.steps.push_back({StepDir::LL, x, it->second.second});
      x = it->second.second;
      intoT = false;
    } else {
      auto it = s.rightEntry.find(x);
      if (it == s.rightEntry.end() || it->second.first != StepDir::RR) {
        res.exit = std::make_pair(StepDir::LL, x);
        return res;
      }
      res.steps.push_back({StepDir::RR, x, it->second.second});
      x = it->second.second;
      intoT = true;
    }
  }
}

StepSet stepset_product(const StepSet& s, const StepSet& t) {
  StepSet out;
  for (auto& [p, dq] : s.leftEntry) {
    if (dq.first == StepDir::LL) {
      out.leftEntry[p] = dq;
      continue;
    }
    // LR into the right block, then zigzag until one side lets us out
    ZigzagResult z = zigzag(s, t, dq.second, StepDir::LL);
    if (!z.exit) continue;
    auto [side, x] = *z.exit;
    if (side == StepDir::RR) {
      auto it = t.leftEntry.find(x);
      if (it != t.leftEntry.end() && it->second.first == StepDir::LR)
        out.leftEntry[p] = {StepDir::LR, it->second.second};
    } else {
      auto it = s.rightEntry.find(x);
      if (it != s.rightEntry.end() && it->second.first == StepDir::RL)
        out.leftEntry[p] = {StepDir::LL, it->second.second};
    }
  }
  for (auto& [p, dq] : t.rightEntry) {
    if (dq.first == StepDir::RR) {
      out.rightEntry[p] = dq;
      continue;
    }
    ZigzagResult z = zigzag(s, t, dq.second, StepDir::RR);
    if (!z.exit) continue;
    auto [side, x] = *z.exit;
    if (side == StepDir::LL) {
      auto it = s.rightEntry.find(x);
      if (it != s.rightEntry.end() && it->second.first == StepDir::RL)
        out.rightEntry[p] = {StepDir::RL, it->second.second};
    } else {
      auto it = t.leftEntry.find(x);
      if (it != t.leftEntry.end() && it->second.first == StepDir::LR)
        out.rightEntry[p] = {StepDir::RR, it->second.second};
    }
  }
  return out;
}

TrMonoid transition_monoid(const TwoWayTransducer& A) {
  std::vector<Sym> letters;
  for (Sym a : A.input) letters.push_back(a);
  letters.push_back(kLeftMark);
  letters.push_back(kRightMark);
  std::sort(letters.begin(), letters.end());

  std::vector<StepSet> elems{stepset_unit(A.num_states())};
  std::vector<std::string> names{""};
  std::map<StepSet, int> index{{elems[0], 0}};
  std::map<Sym, StepSet> letterBehavior;
  std::map<Sym, int> letterImage;
  for (Sym a : letters)
    letterBehavior[a] = behavior(A, std::string(1, (char)a));

  // BFS over words in shortlex order: canonical element numbering
  for (size_t qi = 0; qi < elems.size(); ++qi) {
    StepSet cur = elems[qi];
    std::string curName = names[qi];
    for (Sym a : letters) {
      StepSet next = stepset_product(cur, letterBehavior[a]);
      auto [it, fresh] = index.emplace(next, (int)elems.size());
      if (fresh) {
        elems.push_back(next);
        names.push_back(curName + (char)a);
      }
      if (qi == 0) letterImage[a] = it->second;
    }
  }

  auto m = std::make_shared<FiniteMonoid>();
  m->size = (int)elems.size();
  m->unit = 0;
  m->names = names;
  m->table.assign(m->size, std::vector<int>(m->size));
  for (int i = 0; i < m->size; ++i)
    for (int j = 0; j < m->size; ++j) {
      StepSet prod = stepset_product(elems[i], elems[j]);
      auto it = index.find(prod);
      if (it == index.end())
        throw std::logic_error("transition monoid not closed");
      m->table[i][j] = it->second;
    }

  TrMonoid trm;
  trm.monoid = m;
  trm.phi.alphabet = Alphabet(letters.begin(), letters.end());
  trm.phi.target = m;
  trm.phi.letterImage = std::move(letterImage);
  trm.payload = std::move(elems);
  return trm;
}

bool is_aperiodic_2dft(const TwoWayTransducer& A) {
  return is_aperiodic(*transition_monoid(A).monoid).aperiodic;
}

std::string dump_stepset(const TwoWayTransducer& A, const StepSet& s) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const Step& st : s.steps()) {
    if (!first) os << ", ";
    first = false;
    os << step_dir_name(st.dir) << "(" << A.stateNames[st.from] << ","
       << A.stateNames[st.to] << ")";
  }
  os << "}";
  return os.str();
}

void Pipeline::check() const {
  if (stages.empty()) throw std::invalid_argument("pipeline: no stages");
  for (auto& st : stages) st.check();
  for (size_t i = 0; i + 1 < stages.size(); ++i)
    for (Sym a : stages[i].output)
      if (!alphabet_contains(stages[i + 1].input, a))
        throw std::invalid_argument(
            "pipeline: stage output alphabet not accepted by next stage");
}

std::optional<std::string> pipeline_eval(const Pipeline& P,
                                         const std::string& w) {
  std::string cur = w;
  for (auto& st : P.stages) {
    auto next = eval(st, cur);
    if (!next) return std::nullopt;
    cur = std::move(*next);
  }
  return cur;
}

}  // namespace sdt
