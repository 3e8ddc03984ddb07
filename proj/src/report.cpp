// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ntw {

bool VerificationReport::pass() const {
  if (stages.empty()) return false;
  for (const Stage& s : stages)
    if (!s.pass()) return false;
  return true;
}

void VerificationReport::add(const std::string& name, double residual, int points,
                             double stage_tol) {
  stages.push_back({name, residual, points, stage_tol});
}

std::string canonical_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot emit non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void emit_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

void emit_stage(const Stage& s, std::string& out) {
  // keys in sorted order
  out += "{\"max_residual\":";
  out += canonical_double(s.max_residual);
  out += ",\"name\":";
  emit_string(s.name, out);
  out += ",\"pass\":";
  out += s.pass() ? "true" : "false";
  out += ",\"points_tested\":";
  out += std::to_string(s.points_tested);
  out += ",\"tol\":";
  out += canonical_double(s.tol);
  out += '}';
}

}  // namespace

std::string emit(const VerificationReport& r) {
  if (r.stages.empty()) throw std::invalid_argument("report must contain at least one stage");
  std::string out = "{\"command\":";
  emit_string(r.command, out);
  out += ",\"metadata\":{\"box\":{\"hi\":[";
  for (std::size_t i = 0; i < r.box.hi.size(); ++i) {
    if (i) out += ',';
    out += canonical_double(r.box.hi[i]);
  }
  out += "],\"lo\":[";
  for (std::size_t i = 0; i < r.box.lo.size(); ++i) {
    if (i) out += ',';
    out += canonical_double(r.box.lo[i]);
  }
  out += "]},\"seed\":";
  out += std::to_string(r.seed);
  out += ",\"tol\":";
  out += canonical_double(r.tol);
  out += ",\"versions\":{\"report\":1}}";
  out += ",\"pass\":";
  out += r.pass() ? "true" : "false";
  out += ",\"stages\":[";
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    if (i) out += ',';
    emit_stage(r.stages[i], out);
  }
  out += "]}\n";
  return out;
}

}  // namespace ntw
