// twoway_io.cc -- JSON and DOT formats for two-way transducers
#include "sdt/twoway_io.hh"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sdt {

using nlohmann::json;

namespace {

Sym sym_of(const std::string& s, const char* what) {
  if (s.size() != 1)
    throw TransducerIoError(std::string("expected a single character for ") +
                            what + ", got \"" + s + "\"");
  return (Sym)(unsigned char)s[0];
}

TwoWayTransducer of_json(const json& j) {
  try {
    TwoWayTransducer A;
    A.tag = j.value("kind", std::string());
    for (auto& s : j.at("states"))
      A.add_state(s.get<std::string>());
    for (auto& s : j.at("input"))
      A.input.push_back(sym_of(s.get<std::string>(), "input letter"));
    for (auto& s : j.at("output"))
      A.output.push_back(sym_of(s.get<std::string>(), "output letter"));
    std::sort(A.input.begin(), A.input.end());
    std::sort(A.output.begin(), A.output.end());
    A.initial = A.state_index(j.at("initial").get<std::string>());
    if (A.initial < 0) throw TransducerIoError("unknown initial state");
    for (auto& s : j.at("finals")) {
      int q = A.state_index(s.get<std::string>());
      if (q < 0) throw TransducerIoError("unknown final state");
      A.finals[q] = true;
    }
    for (auto& t : j.at("trans")) {
      int from = A.state_index(t.at("from").get<std::string>());
      int to = A.state_index(t.at("to").get<std::string>());
      if (from < 0 || to < 0)
        throw TransducerIoError("transition references unknown state");
      Sym on = sym_of(t.at("on").get<std::string>(), "transition letter");
      int move = t.at("move").get<int>();
      std::string out = t.value("out", std::string());
      if (A.delta[from].count(on))
        throw TransducerIoError("duplicate transition for (" +
                                A.stateNames[from] + ", " + t.at("on").get<std::string>() + ")");
      A.add_rule(from, on, to, move, out);
    }
    A.check();
    return A;
  } catch (const json::exception& e) {
    throw TransducerIoError(std::string("malformed transducer JSON: ") +
                            e.what());
  } catch (const std::invalid_argument& e) {
    throw TransducerIoError(std::string("invalid transducer: ") + e.what());
  }
}

json to_json(const TwoWayTransducer& A) {
  json j;
  if (!A.tag.empty()) j["kind"] = A.tag;
  j["states"] = A.stateNames;
  json in = json::array(), out = json::array();
  for (Sym a : A.input) in.push_back(std::string(1, (char)a));
  for (Sym a : A.output) out.push_back(std::string(1, (char)a));
  j["input"] = in;
  j["output"] = out;
  j["initial"] = A.stateNames[A.initial];
  json fin = json::array();
  for (int q = 0; q < A.num_states(); ++q)
    if (A.finals[q]) fin.push_back(A.stateNames[q]);
  j["finals"] = fin;
  json trans = json::array();
  for (int q = 0; q < A.num_states(); ++q)
    for (auto& [a, r] : A.delta[q])
      trans.push_back({{"from", A.stateNames[q]},
                       {"on", std::string(1, (char)a)},
                       {"to", A.stateNames[r.to]},
                       {"move", r.move},
                       {"out", r.out}});
  j["trans"] = trans;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransducerIoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TransducerIoError("cannot write " + path);
  out << text;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw TransducerIoError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace

TwoWayTransducer twoway_from_json(const std::string& text) {
  return of_json(parse(text));
}

std::string twoway_to_json(const TwoWayTransducer& A) {
  return to_json(A).dump(2) + "\n";
}

TwoWayTransducer load_twoway(const std::string& path) {
  return twoway_from_json(slurp(path));
}

void save_twoway(const TwoWayTransducer& A, const std::string& path) {
  spit(path, twoway_to_json(A));
}

std::string twoway_to_dot(const TwoWayTransducer& A) {
  std::ostringstream os;
  os << "digraph transducer {\n  rankdir=LR;\n";
  os << "  _start [shape=point];\n";
  for (int q = 0; q < A.num_states(); ++q)
    os << "  q" << q << " [label=\"" << A.stateNames[q] << "\" shape="
       << (A.finals[q] ? "doublecircle" : "circle") << "];\n";
  os << "  _start -> q" << A.initial << ";\n";
  for (int q = 0; q < A.num_states(); ++q)
    for (auto& [a, r] : A.delta[q]) {
      std::string lbl(1, (char)a);
      lbl += "/" + (r.out.empty() ? std::string("\xce\xb5") : r.out);
      lbl += r.move > 0 ? ",+1" : ",-1";
      os << "  q" << q << " -> q" << r.to << " [label=\"" << lbl << "\"];\n";
    }
  os << "}\n";
  return os.str();
}

Pipeline pipeline_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_array() || j.empty())
    throw TransducerIoError("pipeline JSON must be a nonempty array");
  Pipeline P;
  for (auto& e : j) P.stages.push_back(of_json(e));
  P.check();
  return P;
}

std::string pipeline_to_json(const Pipeline& P) {
  json j = json::array();
  for (auto& st : P.stages) j.push_back(to_json(st));
  return j.dump(2) + "\n";
}

Pipeline load_pipeline(const std::string& path) {
  return pipeline_from_json(slurp(path));
}

void save_pipeline(const Pipeline& P, const std::string& path) {
  spit(path, pipeline_to_json(P));
}

}  // namespace sdt
