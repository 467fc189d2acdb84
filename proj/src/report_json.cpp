#include "momopt/report_json.hpp"

#include <cmath>
#include <cstdio>

namespace momopt {

namespace {

using nlohmann::ordered_json;

ordered_json real(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json order_entry(const OrderTrace& tr, bool diagnostics) {
  ordered_json e;
  e["order"] = tr.order;
  e["v_mom"] = real(tr.v_mom);
  e["v_sos"] = real(tr.v_sos);
  e["gap"] = real(tr.gap);
  if (diagnostics) {
    if (tr.branch >= 0) e["branch"] = tr.branch;
    e["solve_status"] = to_string(tr.solve_status);
    e["level"] = real(tr.level);
    e["level_searched"] = tr.level_searched;
    e["generic_status"] = to_string(tr.generic_status);
    e["extracted"] = tr.extracted;
    e["extraction_failure"] = to_string(tr.extraction_failure);
    e["ranks"] = tr.ranks;
    e["residual"] = real(tr.residual);
    e["message"] = tr.message;
  }
  return e;
}

ordered_json measure_json(const ExtractedMeasure& m) {
  ordered_json arr = ordered_json::array();
  for (std::size_t k = 0; k < m.points.size(); ++k) {
    ordered_json p = ordered_json::array();
    for (double x : m.points[k]) p.push_back(real(x));
    arr.push_back({{"point", p}, {"weight", real(m.weights[k])}});
  }
  return arr;
}

ordered_json timings(const std::vector<OrderTrace>& trace, double total) {
  double s = 0, g = 0, x = 0;
  for (const auto& tr : trace) {
    s += tr.solve_ms;
    g += tr.generic_ms;
    x += tr.extract_ms;
  }
  return {{"total", total}, {"solve", s}, {"generic_point", g}, {"extract", x}};
}

void write(const ordered_json& j, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case ordered_json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      return;
    }
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ordered_json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write(v, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

ordered_json report_to_json(const RunReport& rep, bool diagnostics) {
  ordered_json j;
  j["status"] = to_string(rep.status);
  j["f_star"] = rep.status == RunStatus::Infeasible ? ordered_json(nullptr) : real(rep.f_star);
  ordered_json orders = ordered_json::array();
  for (const auto& tr : rep.trace) orders.push_back(order_entry(tr, diagnostics));
  j["v_by_order"] = orders;
  j["minimizers"] = measure_json(rep.minimizers);
  j["residual"] = rep.status == RunStatus::Exact ? real(rep.minimizers.residual) : ordered_json(nullptr);
  j["timings_ms"] = timings(rep.trace, rep.total_ms);
  if (diagnostics) j["message"] = rep.message;
  return j;
}

ordered_json minimize_to_json(const MinimizeResult& res, bool diagnostics) {
  ordered_json j;
  j["status"] = to_string(res.solve.status);
  j["f_star"] = real(res.trace.v_mom);
  j["v_by_order"] = ordered_json::array({order_entry(res.trace, diagnostics)});
  bool ok = res.extraction.ok;
  j["minimizers"] = ok ? measure_json(res.extraction.measure) : ordered_json::array();
  j["residual"] = ok ? real(res.extraction.residual) : ordered_json(nullptr);
  double total = res.trace.solve_ms + res.trace.extract_ms;
  j["timings_ms"] = timings({res.trace}, total);
  if (diagnostics) j["message"] = res.solve.message;
  return j;
}

std::string dump_json(const ordered_json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  return out;
}

}  // namespace momopt
