#pragma once

#include "effeq/field.hpp"

#include <string>

namespace effeq {

/// Hex-float text ("%a") that round-trips a double bit for bit.
std::string hex_double(double x);
double parse_hex_double(const std::string& text);

/// JSON {model, cutoff, tau, real, modes: [[k..., re, im], ...]} with re/im as
/// hex-float strings. Zero modes are omitted.
std::string write_snapshot(const FieldState& state, const std::string& model);

struct Snapshot {
  std::string model;
  FieldState state;
};

/// Throws std::invalid_argument on malformed input.
Snapshot read_snapshot(const std::string& json_text);

}  // namespace effeq
