#include "effeq/snapshot.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace effeq {

std::string hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hex_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument("not a floating-point literal: '" + text + "'");
  return x;
}

std::string write_snapshot(const FieldState& state, const std::string& model) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["dim"] = state.box.dim();
  j["cutoff"] = state.box.cutoff();
  j["tau"] = hex_double(state.tau);
  j["real"] = state.real;
  auto modes = nlohmann::json::array();
  for (std::size_t i = 0; i < state.amp.size(); ++i) {
    const auto z = state.amp[i];
    if (z == Complex(0.0)) continue;
    auto row = nlohmann::json::array();
    for (int c : state.box.vector(i).components()) row.push_back(c);
    row.push_back(hex_double(z.real()));
    row.push_back(hex_double(z.imag()));
    modes.push_back(std::move(row));
  }
  j["modes"] = std::move(modes);
  return j.dump() + "\n";
}

Snapshot read_snapshot(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    Snapshot s;
    s.model = j.at("model").get<std::string>();
    const int dim = j.at("dim").get<int>();
    const int cutoff = j.at("cutoff").get<int>();
    s.state = FieldState(LatticeBox(dim, cutoff), j.value("real", false));
    s.state.tau = parse_hex_double(j.at("tau").get<std::string>());
    for (const auto& row : j.at("modes")) {
      if (row.size() != static_cast<std::size_t>(dim) + 2) throw std::invalid_argument("snapshot mode row has wrong length");
      WaveVector k = WaveVector::zero(dim);
      for (int c = 0; c < dim; ++c) k[c] = row[static_cast<std::size_t>(c)].get<int>();
      if (!s.state.box.contains(k)) throw std::invalid_argument("snapshot mode " + to_string(k) + " outside cutoff");
      const double re = parse_hex_double(row[static_cast<std::size_t>(dim)].get<std::string>());
      const double im = parse_hex_double(row[static_cast<std::size_t>(dim) + 1].get<std::string>());
      s.state.amp[s.state.box.index(k)] = Complex(re, im);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace effeq
