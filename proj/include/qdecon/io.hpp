// Copyright 2026 the qdecon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdecon/channels.hpp"
#include "qdecon/deconstruction.hpp"

namespace qdecon {

using Json = nlohmann::ordered_json;

// File formats.  Doubles are serialized by nlohmann's shortest-round-trip
// printer, so every value survives a write/read cycle bit-exactly.
//
//   state:    {"labels": [...], "dims": [...], "matrix": [[[re,im],...],...]}
//   channel:  {"in_dims": [...], "out_dims": [...], "kraus": [matrix,...]}
//   protocol: {"ancilla": state|null, "copies": n,
//              "ensemble": [matrix,...], "erase": [label,...]}
//
// Matrices are row-major; entry [i][j] is the two-element array [re, im].
// Channel files carry dimensions only; on load the subsystems are named
// in1..inK / out1..outK.

namespace detail {

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw InputError(std::string(what) + ": matrix must be a non-empty array");
  const long rows = static_cast<long>(j.size());
  long cols = -1;
  ComplexMatrix m;
  for (long i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array())
      throw InputError(std::string(what) + ": matrix row is not an array");
    if (cols < 0) {
      cols = static_cast<long>(row.size());
      m = zero_matrix(static_cast<int>(rows), static_cast<int>(cols));
    }
    if (static_cast<long>(row.size()) != cols)
      throw InputError(std::string(what) + ": ragged matrix rows");
    for (long k = 0; k < cols; ++k) {
      const Json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number())
        throw InputError(std::string(what) +
                         ": matrix entries must be [re, im] pairs");
      m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("JSON parse error in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << text;
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace detail

inline Json state_to_json(const LabeledState& s) {
  Json j;
  j["labels"] = s.factorization.labels;
  j["dims"] = s.factorization.dims;
  j["matrix"] = detail::matrix_to_json(s.matrix);
  return j;
}

inline LabeledState state_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("state: not a JSON object");
  for (const char* key : {"labels", "dims", "matrix"})
    if (!j.contains(key))
      throw InputError(std::string("state: missing field '") + key + "'");
  Factorization f;
  try {
    f.labels = j["labels"].get<std::vector<std::string>>();
    f.dims = j["dims"].get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("state: bad labels/dims: ") + e.what());
  }
  f.check();
  const ComplexMatrix m = detail::matrix_from_json(j["matrix"], "state");
  if (m.rows() != m.cols() || m.rows() != f.total_dim())
    throw InputError("state: matrix dimension does not match dims");
  return validate_density(m, f);
}

inline void write_state(const std::string& path, const LabeledState& s) {
  detail::write_text_file(path, state_to_json(s).dump(2) + "\n");
}

inline LabeledState read_state(const std::string& path) {
  return state_from_json(detail::read_json_file(path));
}

inline Json channel_to_json(const QuantumChannel& ch) {
  Json j;
  j["in_dims"] = ch.input.dims;
  j["out_dims"] = ch.output.dims;
  Json ks = Json::array();
  for (const auto& k : ch.kraus) ks.push_back(detail::matrix_to_json(k));
  j["kraus"] = std::move(ks);
  return j;
}

inline QuantumChannel channel_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("channel: not a JSON object");
  for (const char* key : {"in_dims", "out_dims", "kraus"})
    if (!j.contains(key))
      throw InputError(std::string("channel: missing field '") + key + "'");
  QuantumChannel ch;
  std::vector<int> in_dims, out_dims;
  try {
    in_dims = j["in_dims"].get<std::vector<int>>();
    out_dims = j["out_dims"].get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("channel: bad dims: ") + e.what());
  }
  for (std::size_t i = 0; i < in_dims.size(); ++i)
    ch.input.labels.push_back("in" + std::to_string(i + 1));
  ch.input.dims = in_dims;
  for (std::size_t i = 0; i < out_dims.size(); ++i)
    ch.output.labels.push_back("out" + std::to_string(i + 1));
  ch.output.dims = out_dims;
  if (!j["kraus"].is_array() || j["kraus"].empty())
    throw InputError("channel: 'kraus' must be a non-empty array");
  for (const auto& k : j["kraus"])
    ch.kraus.push_back(detail::matrix_from_json(k, "channel"));
  ch.check_valid();
  return ch;
}

inline void write_channel(const std::string& path, const QuantumChannel& ch) {
  detail::write_text_file(path, channel_to_json(ch).dump(2) + "\n");
}

inline QuantumChannel read_channel(const std::string& path) {
  return channel_from_json(detail::read_json_file(path));
}

inline Json protocol_to_json(const DeconstructionProtocol& p) {
  Json j;
  if (p.ancilla.dim() == 1)
    j["ancilla"] = nullptr;
  else
    j["ancilla"] = state_to_json(p.ancilla);
  j["copies"] = p.copies;
  Json ens = Json::array();
  for (const auto& u : p.ensemble.unitaries)
    ens.push_back(detail::matrix_to_json(u));
  j["ensemble"] = std::move(ens);
  j["erase"] = p.erase_labels;
  return j;
}

inline DeconstructionProtocol protocol_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("protocol: not a JSON object");
  for (const char* key : {"copies", "ensemble"})
    if (!j.contains(key))
      throw InputError(std::string("protocol: missing field '") + key + "'");
  DeconstructionProtocol p;
  if (j.contains("ancilla") && !j["ancilla"].is_null())
    p.ancilla = state_from_json(j["ancilla"]);
  else
    p.ancilla = detail::trivial_ancilla();
  if (!j["copies"].is_number_integer() || j["copies"].get<int>() < 1)
    throw InputError("protocol: 'copies' must be a positive integer");
  p.copies = j["copies"].get<int>();
  if (!j["ensemble"].is_array() || j["ensemble"].empty())
    throw InputError("protocol: 'ensemble' must be a non-empty array");
  std::vector<ComplexMatrix> us;
  for (const auto& u : j["ensemble"])
    us.push_back(detail::matrix_from_json(u, "protocol"));
  try {
    p.ensemble = UnitaryEnsemble(std::move(us));
  } catch (const InputError& e) {
    throw InputError(std::string("protocol: ") + e.what());
  }
  if (j.contains("erase") && !j["erase"].is_null()) {
    try {
      p.erase_labels = j["erase"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("protocol: bad erase list: ") + e.what());
    }
  }
  return p;
}

inline void write_protocol(const std::string& path,
                           const DeconstructionProtocol& p) {
  detail::write_text_file(path, protocol_to_json(p).dump(2) + "\n");
}

inline DeconstructionProtocol read_protocol(const std::string& path) {
  return protocol_from_json(detail::read_json_file(path));
}

}  // namespace qdecon
