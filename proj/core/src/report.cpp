#include "gradlab/report.hpp"

#include <cstdio>
#include <fstream>

#include "gradlab/common.hpp"

namespace gradlab {
namespace {

// Shortest round-trip decimal for CSV cells; JSON output keeps nlohmann's
// own serialization so report.json stays a pure function of the values.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ordered_json check_to_json(const InequalityReport& rep) {
  ordered_json j;
  j["theorem"] = rep.theorem;
  j["tolerance"] = rep.tolerance;
  j["masked_count"] = rep.masked_count;
  j["violations"] = rep.violations;
  j["min_slack"] = rep.min_slack;
  j["worst_row"] = rep.worst_row;
  j["worst_node"] = rep.worst_node;
  ordered_json constants;
  for (const auto& [name, value] : rep.constants) constants[name] = value;
  j["constants"] = constants;
  j["pass"] = rep.pass();
  return j;
}

ordered_json drift_to_json(const DriftReport& rep, double h_relerr) {
  ordered_json j;
  j["kind"] = rep.kind;
  j["masked_sup"] = rep.masked_sup;
  j["tolerance"] = rep.tolerance;
  j["masked_count"] = rep.masked_count;
  j["worst_row"] = rep.worst_row;
  j["worst_node"] = rep.worst_node;
  if (h_relerr >= 0.0) j["h_identity_relerr"] = h_relerr;
  j["pass"] = rep.pass;
  return j;
}

ordered_json weak_error_to_json(const WeakErrorReport& rep) {
  ordered_json j;
  j["observable"] = rep.observable;
  j["mean"] = rep.mean;
  j["std_error"] = rep.std_error;
  j["reference"] = rep.reference;
  j["allowance"] = rep.allowance;
  j["n_paths"] = rep.n_paths;
  j["pass"] = rep.pass;
  return j;
}

ordered_json supermartingale_to_json(const SupermartingaleReport& rep) {
  ordered_json j;
  j["kind"] = rep.kind;
  ordered_json stats = ordered_json::array();
  for (const auto& s : rep.stats) {
    ordered_json row;
    row["r"] = s.r;
    row["t"] = s.t;
    row["mean"] = s.mean;
    row["std_error"] = s.std_error;
    stats.push_back(row);
  }
  j["checkpoints"] = stats;
  j["worst_margin"] = rep.worst_margin;
  j["pass"] = rep.pass;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failure on '" + path + "'");
}

std::string check_csv(const InequalityReport& rep) {
  std::string csv = "t,node,lhs,rhs,slack\n";
  const int ns = rep.grid.spatial_size();
  for (int j = 0; j < rep.grid.nt; ++j) {
    for (int s = 0; s < ns; ++s) {
      const int id = rep.grid.node(j, s);
      if (!rep.mask[id]) continue;
      csv += num(rep.grid.time(j));
      csv += ',';
      csv += std::to_string(s);
      csv += ',';
      csv += num(rep.lhs[id]);
      csv += ',';
      csv += num(rep.rhs[id]);
      csv += ',';
      csv += num(rep.rhs[id] - rep.lhs[id]);
      csv += '\n';
    }
  }
  return csv;
}

std::string drift_csv(const DriftReport& rep) {
  std::string csv = "t,node,drift,masked\n";
  const GridSpec& grid = rep.drift.grid;
  const double floor = grid.mask_floor() - 1e-12;
  const int ns = grid.spatial_size();
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    for (int s = 0; s < ns; ++s) {
      if (!rep.drift.ok(j, s)) continue;
      csv += num(t);
      csv += ',';
      csv += std::to_string(s);
      csv += ',';
      csv += num(rep.drift.at(j, s));
      csv += ',';
      csv += (t >= floor) ? '1' : '0';
      csv += '\n';
    }
  }
  return csv;
}

std::string mc_csv(const SupermartingaleReport& rep) {
  std::string csv = "r,t,mean,std_error\n";
  for (const auto& s : rep.stats) {
    csv += num(s.r);
    csv += ',';
    csv += num(s.t);
    csv += ',';
    csv += num(s.mean);
    csv += ',';
    csv += num(s.std_error);
    csv += '\n';
  }
  return csv;
}

}  // namespace gradlab
