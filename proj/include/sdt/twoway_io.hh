// twoway_io.hh -- JSON serialization and DOT export for two-way transducers
#pragma once

#include <string>

#include "sdt/twoway.hh"

namespace sdt {

struct TransducerIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON schema:
//   {"states":["q0",...], "input":["a",...], "output":["b",...],
//    "initial":"q0", "finals":["q1"],
//    "trans":[{"from":"q0","on":"a","to":"q1","move":1,"out":"bb"}]}
// with "<" / ">" standing for the endmarkers in "on".
TwoWayTransducer twoway_from_json(const std::string& text);
std::string twoway_to_json(const TwoWayTransducer& A);

TwoWayTransducer load_twoway(const std::string& path);
void save_twoway(const TwoWayTransducer& A, const std::string& path);

std::string twoway_to_dot(const TwoWayTransducer& A);

// A pipeline file is a JSON array of transducer objects, first stage first.
Pipeline pipeline_from_json(const std::string& text);
std::string pipeline_to_json(const Pipeline& P);
Pipeline load_pipeline(const std::string& path);
void save_pipeline(const Pipeline& P, const std::string& path);

}  // namespace sdt
