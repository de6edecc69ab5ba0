#include "pdthreat/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pdthreat/corruptions.hpp"
#include "pdthreat/error.hpp"

namespace pdthreat::report {

namespace {

using nlohmann::json;

constexpr std::string_view kThreatHeader = "input_id,metric,threat,attr_class,attr_source_id";

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_int(std::string_view s, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cannot parse {} from '{}'", what, s));
  }
  return value;
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string copy(s);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(copy, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != copy.size()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("cannot parse {} from '{}'", what, s));
  }
  return value;
}

json attribution_json(const std::optional<Attribution>& a) {
  if (!a) return nullptr;
  return json{{"class", a->source_class}, {"source_id", a->source_id}};
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

std::string threats_to_csv(const std::vector<ThreatRecord>& records) {
  std::string out(kThreatHeader);
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},", r.input_id, metric_name(r.metric), r.threat);
    if (r.attribution) {
      out += fmt::format("{},{}", r.attribution->source_class, r.attribution->source_id);
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

std::string threats_to_json(const std::vector<ThreatRecord>& records) {
  json rows = json::array();
  for (const auto& r : records) {
    rows.push_back({{"input_id", r.input_id},
                    {"metric", std::string(metric_name(r.metric))},
                    {"threat", r.threat},
                    {"attribution", attribution_json(r.attribution)}});
  }
  return json{{"threats", rows}}.dump(2) + "\n";
}

std::vector<ThreatRow> parse_threat_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kThreatHeader) {
    throw Error(ErrorCode::kHeaderMismatch,
                fmt::format("threat CSV must start with '{}'", kThreatHeader));
  }
  std::vector<ThreatRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != 5) {
      throw Error(ErrorCode::kHeaderMismatch,
                  fmt::format("threat CSV line {} has {} columns, expected 5", line_no,
                              cells.size()));
    }
    ThreatRow row;
    row.input_id = parse_int<std::size_t>(trim(cells[0]), "input_id");
    row.metric = std::string(trim(cells[1]));
    row.threat = parse_double(trim(cells[2]), "threat");
    if (!std::isfinite(row.threat)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  fmt::format("threat CSV line {} has a non-finite threat", line_no));
    }
    if (!trim(cells[3]).empty()) {
      row.attr_class = parse_int<std::uint32_t>(trim(cells[3]), "attr_class");
    }
    if (!trim(cells[4]).empty()) {
      row.attr_source_id = parse_int<std::uint64_t>(trim(cells[4]), "attr_source_id");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string calibration_to_csv(const CalibrationResult& result) {
  std::string out = "k,min_cross_pair_threat,pairs_sampled\n";
  for (const auto& p : result.curve) {
    out += fmt::format("{},{},{}\n", p.k, p.min_cross_pair_threat, p.pairs_sampled);
  }
  return out;
}

double Thresholds::for_metric(const std::string& metric) const {
  if (const auto it = by_metric.find(metric); it != by_metric.end()) return it->second;
  return by_metric.at("ext");
}

Thresholds parse_thresholds(const std::string& spec) {
  Thresholds t;
  if (trim(spec).empty()) return t;
  for (const auto& item : split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("threshold '{}' is not of the form metric=value", item));
    }
    const std::string key(trim(std::string_view(item).substr(0, eq)));
    const double value = parse_double(trim(std::string_view(item).substr(eq + 1)), key);
    if (key.empty() || !std::isfinite(value) || value < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("bad threshold '{}'", item));
    }
    t.by_metric[key] = value;
  }
  return t;
}

std::string_view quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::kI: return "I";
    case Quadrant::kII: return "II";
    case Quadrant::kIII: return "III";
    case Quadrant::kIV: return "IV";
  }
  return "?";
}

Quadrant classify_quadrant(double pd_avg, double pd_threshold, double other_avg,
                           double other_threshold) {
  const bool pd_low = pd_avg <= pd_threshold;
  const bool other_low = other_avg <= other_threshold;
  if (pd_low) return other_low ? Quadrant::kIV : Quadrant::kI;
  return other_low ? Quadrant::kIII : Quadrant::kII;
}

CorruptionName parse_corruption_name(const std::string& name) {
  const auto at = name.find('@');
  if (at == std::string::npos) {
    return {name, 0, name == "unsafe" ? "unsafe" : "other"};
  }
  CorruptionName out;
  out.style = name.substr(0, at);
  out.severity = parse_int<int>(std::string_view(name).substr(at + 1), "severity");
  try {
    out.category = std::string(style_category(parse_style(out.style)));
  } catch (const Error&) {
    out.category = "other";
  }
  return out;
}

Report build_report(const std::vector<ReportInput>& raw_inputs, const Thresholds& thresholds,
                    const PdwContext& pdw) {
  Report report;

  // Groups sharing a name are one corruption (e.g. one file per metric).
  std::vector<ReportInput> inputs;
  for (const auto& in : raw_inputs) {
    auto it = std::find_if(inputs.begin(), inputs.end(),
                           [&](const ReportInput& g) { return g.name == in.name; });
    if (it == inputs.end()) {
      inputs.push_back(in);
    } else {
      it->rows.insert(it->rows.end(), in.rows.begin(), in.rows.end());
    }
  }

  for (const auto& input : inputs) {
    const auto parsed = parse_corruption_name(input.name);
    std::map<std::string, std::vector<double>> by_metric;
    for (const auto& row : input.rows) by_metric[row.metric].push_back(row.threat);
    for (const auto& [metric, values] : by_metric) {
      report.averages.push_back({input.name, parsed, metric, mean_of(values), values.size()});
    }
  }

  for (const auto& input : inputs) {
    const auto parsed = parse_corruption_name(input.name);
    if (parsed.severity == 0) continue;
    const AvgRow* pd_row = nullptr;
    for (const auto& a : report.averages) {
      if (a.corruption == input.name && a.metric == "pd") pd_row = &a;
    }
    if (pd_row == nullptr) continue;
    for (const auto& a : report.averages) {
      if (a.corruption != input.name) continue;
      bool pd_family = true;
      try {
        pd_family = is_pd_family(parse_metric(a.metric));
      } catch (const Error&) {
        pd_family = false;
      }
      if (pd_family) continue;
      report.quadrants.push_back(
          {input.name, parsed, pd_row->avg, a.metric, a.avg,
           classify_quadrant(pd_row->avg, thresholds.pd(), a.avg,
                             thresholds.for_metric(a.metric))});
    }
  }

  std::map<std::tuple<std::string, int, std::string>, std::vector<double>> cells;
  for (const auto& a : report.averages) {
    if (a.parsed.severity == 0) continue;
    cells[{a.parsed.category, a.parsed.severity, a.metric}].push_back(a.avg);
  }
  for (const auto& [key, values] : cells) {
    report.heatmap.push_back(
        {std::get<0>(key), std::get<1>(key), std::get<2>(key), mean_of(values), values.size()});
  }

  if (pdw.weights != nullptr && pdw.inputs != nullptr && pdw.buckets > 0) {
    std::vector<std::pair<double, double>> points;  // (W, threat)
    for (const auto& input : inputs) {
      if (input.name != "unsafe") continue;
      for (const auto& row : input.rows) {
        if (row.metric != "pd_w") continue;
        if (row.input_id >= pdw.inputs->n) {
          throw Error(ErrorCode::kShapeMismatch,
                      fmt::format("threat row {} has no input label", row.input_id));
        }
        const std::uint32_t y = pdw.inputs->labels[row.input_id];
        std::optional<std::uint32_t> c;
        if (pdw.targets != nullptr && row.input_id < pdw.targets->n) {
          c = pdw.targets->labels[row.input_id];
        } else {
          c = row.attr_class;
        }
        if (!c || *c >= pdw.weights->num_classes || y >= pdw.weights->num_classes) continue;
        points.emplace_back(pdw.weights->at(y, *c), row.threat);
      }
    }
    double max_threat = 0.0;
    for (const auto& p : points) max_threat = std::max(max_threat, p.second);
    const double width = 1.0 / static_cast<double>(pdw.buckets);
    std::vector<std::vector<double>> bins(pdw.buckets);
    for (const auto& [w, t] : points) {
      auto b = static_cast<std::size_t>(std::clamp(w, 0.0, 1.0) / width);
      b = std::min(b, pdw.buckets - 1);
      bins[b].push_back(max_threat > 0.0 ? t / max_threat : 0.0);
    }
    for (std::size_t b = 0; b < pdw.buckets; ++b) {
      report.pdw.push_back({static_cast<double>(b) * width,
                            static_cast<double>(b + 1) * width, mean_of(bins[b]),
                            bins[b].size()});
    }
  }
  return report;
}

std::map<std::string, std::string> report_to_csv(const Report& report) {
  std::map<std::string, std::string> out;
  std::string& avg = out["avg"];
  avg = "corruption,style,severity,category,metric,avg,count\n";
  for (const auto& a : report.averages) {
    avg += fmt::format("{},{},{},{},{},{},{}\n", a.corruption, a.parsed.style, a.parsed.severity,
                       a.parsed.category, a.metric, a.avg, a.count);
  }
  std::string& quad = out["quadrants"];
  quad = "corruption,severity,category,pd_avg,other_metric,other_avg,quadrant\n";
  for (const auto& q : report.quadrants) {
    quad += fmt::format("{},{},{},{},{},{},{}\n", q.corruption, q.parsed.severity,
                        q.parsed.category, q.pd_avg, q.other_metric, q.other_avg,
                        quadrant_name(q.quadrant));
  }
  std::string& heat = out["heatmap"];
  heat = "category,severity,metric,mean_avg,corruptions\n";
  for (const auto& h : report.heatmap) {
    heat += fmt::format("{},{},{},{},{}\n", h.category, h.severity, h.metric, h.mean_avg,
                        h.corruptions);
  }
  std::string& pdw = out["pdw"];
  pdw = "bucket_lo,bucket_hi,mean_relative_threat,count\n";
  for (const auto& p : report.pdw) {
    pdw += fmt::format("{},{},{},{}\n", p.lo, p.hi, p.mean_relative_threat, p.count);
  }
  return out;
}

std::string report_to_json(const Report& report) {
  json avg = json::array(), quad = json::array(), heat = json::array(), pdw = json::array();
  for (const auto& a : report.averages) {
    avg.push_back({{"corruption", a.corruption},
                   {"style", a.parsed.style},
                   {"severity", a.parsed.severity},
                   {"category", a.parsed.category},
                   {"metric", a.metric},
                   {"avg", a.avg},
                   {"count", a.count}});
  }
  for (const auto& q : report.quadrants) {
    quad.push_back({{"corruption", q.corruption},
                    {"severity", q.parsed.severity},
                    {"category", q.parsed.category},
                    {"pd_avg", q.pd_avg},
                    {"other_metric", q.other_metric},
                    {"other_avg", q.other_avg},
                    {"quadrant", std::string(quadrant_name(q.quadrant))}});
  }
  for (const auto& h : report.heatmap) {
    heat.push_back({{"category", h.category},
                    {"severity", h.severity},
                    {"metric", h.metric},
                    {"mean_avg", h.mean_avg},
                    {"corruptions", h.corruptions}});
  }
  for (const auto& p : report.pdw) {
    pdw.push_back({{"bucket_lo", p.lo},
                   {"bucket_hi", p.hi},
                   {"mean_relative_threat", p.mean_relative_threat},
                   {"count", p.count}});
  }
  return json{{"avg", avg}, {"quadrants", quad}, {"heatmap", heat}, {"pdw", pdw}}.dump(2) +
         "\n";
}

std::string hash_hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::string manifest_path(const std::string& output_path) {
  return output_path + ".manifest.json";
}

std::string manifest_to_json(const RunManifest& m) {
  json j{{"command", m.command},
         {"flags", m.flags},
         {"seeds", m.seeds},
         {"input_hashes", m.input_hashes},
         {"outputs", m.outputs},
         {"tool_version", m.tool_version},
         {"wall_clock_seconds", m.wall_clock_seconds}};
  return j.dump(2) + "\n";
}

}  // namespace pdthreat::report
