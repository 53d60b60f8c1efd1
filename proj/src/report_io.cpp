// Copyright 2026-present the volsearch project
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

#include "volsearch/report_io.hpp"

#include <algorithm>
#include <cstdio>

#include "report_json.hpp"

namespace volsearch {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_report(const EvalReport& r) {
  std::size_t name_width = std::string("Overall average").size();
  for (std::size_t c = 0; c < r.classes(); ++c) {
    name_width = std::max(name_width, class_name(r.level, c).size());
  }
  name_width += 2;

  std::string out = "level: " + std::string(to_string(r.level)) + "\n";
  out += pad("class", name_width) + pad("recall", 10) + pad("precision", 11) + "queries\n";
  for (std::size_t c = 0; c < r.classes(); ++c) {
    const bool present = r.present(c);
    out += pad(std::string(class_name(r.level, c)), name_width);
    out += pad(present ? fixed4(r.recall[c]) : "-", 10);
    out += pad(r.column_sum(c) > 0 ? fixed4(r.precision[c]) : "-", 11);
    out += std::to_string(r.row_sum(c)) + "\n";
  }
  out += pad("Overall average", name_width) + pad(fixed4(r.overall_recall), 10) +
         pad(fixed4(r.overall_precision), 11) + std::to_string(r.total()) + "\n";

  out += "\nconfusion (rows true, columns predicted)\n" + pad("", name_width);
  for (std::size_t c = 0; c < r.classes(); ++c) out += " " + std::string(class_name(r.level, c));
  out += "\n";
  for (std::size_t t = 0; t < r.classes(); ++t) {
    out += pad(std::string(class_name(r.level, t)), name_width);
    for (std::size_t p = 0; p < r.classes(); ++p) {
      const std::string cell = std::to_string(r.confusion[t][p]);
      const std::size_t width = class_name(r.level, p).size();
      out += " " + std::string(width > cell.size() ? width - cell.size() : 0, ' ') + cell;
    }
    out += "\n";
  }
  return out;
}

std::string report_to_json(const EvalReport& report) { return detail::report_json(report).dump(2) + "\n"; }

namespace detail {

nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.classes(); ++c) {
    classes.push_back({{"name", class_name(r.level, c)},
                       {"queries", r.row_sum(c)},
                       {"predicted", r.column_sum(c)},
                       {"recall", r.recall[c]},
                       {"precision", r.precision[c]}});
  }
  return {{"level", to_string(r.level)},
          {"total", r.total()},
          {"overall_recall", r.overall_recall},
          {"overall_precision", r.overall_precision},
          {"classes", classes},
          {"confusion", r.confusion}};
}

}  // namespace detail

}  // namespace volsearch
