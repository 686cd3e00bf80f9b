#include <cmath>
#include <cstdio>
#include <ostream>

#include "bprelab/experiments.hpp"
#include "json.hpp"

namespace bprelab::experiments {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

bool ResultRecord::all_pass() const {
  for (const auto& [name, ok] : verdicts) {
    if (!ok) return false;
  }
  return true;
}

void ResultRecord::write_csv(std::ostream& os) const {
  os << "metric,n,x,t,estimate,stderr,ci_low,ci_high,ess,reference,verdict\n";
  for (const auto& r : rows) {
    os << r.metric << ',' << fmt(r.n) << ',' << fmt(r.x) << ',' << fmt(r.t) << ','
       << fmt(r.estimate) << ',' << fmt(r.stderr_) << ',' << fmt(r.ci_low) << ','
       << fmt(r.ci_high) << ',' << fmt(r.ess) << ',' << fmt(r.reference) << ','
       << r.verdict << '\n';
  }
}

namespace {

nlohmann::ordered_json row_to_json(const ResultRow& r) {
  nlohmann::ordered_json j;
  j["metric"] = r.metric;
  const auto put = [&j](const char* key, double v) {
    if (!std::isnan(v)) j[key] = v;
  };
  put("n", r.n);
  put("x", r.x);
  put("t", r.t);
  put("estimate", r.estimate);
  put("stderr", r.stderr_);
  put("ci_low", r.ci_low);
  put("ci_high", r.ci_high);
  put("ess", r.ess);
  put("reference", r.reference);
  if (!r.verdict.empty()) j["verdict"] = r.verdict;
  return j;
}

}  // namespace

void ResultRecord::write_rows_json(std::ostream& os) const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) doc.push_back(row_to_json(r));
  os << doc.dump(2) << '\n';
}

void ResultRecord::write_summary_json(std::ostream& os) const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replicas"] = replicas;
  j["law"] = nlohmann::ordered_json::parse(law_text.empty() ? "null" : law_text);
  nlohmann::ordered_json th;
  for (const auto& [name, value] : thresholds) th[name] = value;
  j["thresholds"] = th;
  nlohmann::ordered_json vd;
  for (const auto& [name, ok] : verdicts) vd[name] = ok ? "pass" : "fail";
  j["verdicts"] = vd;
  j["all_pass"] = all_pass();
  j["warnings"] = warnings;
  j["wall_time_s"] = wall_time_s;
  os << j.dump(2) << '\n';
}

}  // namespace bprelab::experiments
