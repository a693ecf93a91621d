#ifndef SHELFCHECK_REPORT_HPP_
#define SHELFCHECK_REPORT_HPP_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelfcheck/eval.hpp"
#include "shelfcheck/io.hpp"
#include "shelfcheck/pipeline.hpp"

namespace shelfcheck {

inline json bbox_to_json(const BBox& b) {
  return json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

inline json eval_to_json(const EvalResult& e) {
  return json{{"tp", e.tp},           {"fp", e.fp},
              {"fn", e.fn},           {"precision", e.precision},
              {"recall", e.recall},   {"f_measure", e.f_measure}};
}

/// Compliance report for one checked scene.
inline json report_to_json(const SceneRun& run, const std::string& planogram_path) {
  json assignments = json::array();
  for (const Assignment& a : run.outcome.solution.assignments) {
    assignments.push_back({{"ref_node", a.ref_node},
                           {"obs_node", a.obs_node},
                           {"score_at_pick", a.score_at_pick}});
  }

  json verified = json::array();
  for (const Detection& d : run.outcome.verified) {
    verified.push_back({{"det_id", d.det_id},
                        {"product", d.product},
                        {"bbox", bbox_to_json(d.bbox)},
                        {"raw_score", d.confidence}});
  }

  json issues = json::array();
  for (const ComplianceIssue& issue : run.outcome.issues) {
    json entry{{"ref_node", issue.ref_node},
               {"expected_product", issue.expected_product},
               {"reason", std::string(issue_reason_name(issue.reason))}};
    entry["expected_roi"] = issue.expected_roi ? bbox_to_json(*issue.expected_roi)
                                               : json(nullptr);
    issues.push_back(entry);
  }

  json localization(nullptr);
  if (run.match.localization) {
    const GridExtent& e = *run.match.localization;
    localization = json{{"min_row", e.min_row},
                        {"min_col", e.min_col},
                        {"max_row", e.max_row},
                        {"max_col", e.max_col}};
  }

  json missing = json::array();
  for (const std::string& id : run.match.missing_ref_nodes) missing.push_back(id);

  return json{
      {"planogram", {{"path", planogram_path}, {"index", run.planogram_index}}},
      {"confidence", run.outcome.solution.confidence},
      {"localization", localization},
      {"assignments", assignments},
      {"missing_before_verification", missing},
      {"verified", verified},
      {"issues", issues},
      {"compliant", run.outcome.issues.empty()},
      {"timings_ms",
       {{"build", run.timings.build_ms},
        {"solve", run.timings.solve_ms},
        {"verify", run.timings.verify_ms},
        {"total", run.timings.total_ms}}}};
}

/// Shelf sketch with matched items in green and compliance issues in red.
inline void write_svg(const std::string& path, int width, int height,
                      const std::vector<BBox>& matched, const std::vector<BBox>& issues) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#f4f4f4\"/>\n";
  for (const BBox& b : matched) {
    out << "  <rect x=\"" << b.x << "\" y=\"" << b.y << "\" width=\"" << b.w
        << "\" height=\"" << b.h
        << "\" fill=\"none\" stroke=\"green\" stroke-width=\"2\"/>\n";
  }
  for (const BBox& b : issues) {
    out << "  <rect x=\"" << b.x << "\" y=\"" << b.y << "\" width=\"" << b.w
        << "\" height=\"" << b.h
        << "\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_REPORT_HPP_
