// Copyright 2026 The chronoscope Authors
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


#include "chronoscope/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>

namespace chronoscope {

namespace {

const char kSchemaText[] =
#include "schema.inc"
    ;

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class Scanner {
 public:
  Scanner(std::string_view text, std::map<std::string, int>& lines) : s_(text), lines_(lines) {}

  void run() {
    skip_ws();
    value("");
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        out += s_[i_ + 1];
        i_ += 2;
        continue;
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      for (;;) {
        skip_ws();
        if (i_ >= s_.size() || s_[i_] == '}') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        const int at = line_;
        const std::string child = path + "/" + escape_pointer_token(string_token());
        lines_.emplace(child, at);
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ':') ++i_;
        skip_ws();
        value(child);
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      int k = 0;
      for (;;) {
        skip_ws();
        if (i_ >= s_.size() || s_[i_] == ']') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        const std::string child = path + "/" + std::to_string(k++);
        lines_.emplace(child, line_);
        value(child);
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      }
    }
  }

  std::string_view s_;
  std::map<std::string, int>& lines_;
  std::size_t i_ = 0;
  int line_ = 1;
};

const json& resolve_ref(const json& root, const std::string& ref) {
  if (ref.rfind("#", 0) != 0) throw std::logic_error("unsupported schema $ref " + ref);
  return root.at(json::json_pointer(ref.substr(1)));
}

std::string type_of(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

bool type_matches(const json& v, const std::string& t) {
  const std::string actual = type_of(v);
  return actual == t || (t == "number" && actual == "integer");
}

class Validator {
 public:
  Validator(const json& root, const JsonLocator& where) : root_(root), where_(where) {}

  void check(const json& v, const json& schema, const std::string& path) const {
    if (schema.contains("$ref")) {
      check(v, resolve_ref(root_, schema["$ref"].get<std::string>()), path);
      return;
    }
    if (schema.contains("type")) {
      const auto& t = schema["type"];
      bool ok = false;
      if (t.is_array()) {
        for (const auto& e : t) ok = ok || type_matches(v, e.get<std::string>());
      } else {
        ok = type_matches(v, t.get<std::string>());
      }
      if (!ok) fail(path, "expected " + t.dump() + ", got " + type_of(v));
    }
    if (schema.contains("enum")) {
      const auto& options = schema["enum"];
      if (std::find(options.begin(), options.end(), v) == options.end()) {
        fail(path, "value " + v.dump() + " not one of " + options.dump());
      }
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (schema.contains("minimum") && x < schema["minimum"].get<double>()) {
        fail(path, "value " + v.dump() + " below minimum " + schema["minimum"].dump());
      }
      if (schema.contains("maximum") && x > schema["maximum"].get<double>()) {
        fail(path, "value " + v.dump() + " above maximum " + schema["maximum"].dump());
      }
      if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>()) {
        fail(path, "value " + v.dump() + " must exceed " + schema["exclusiveMinimum"].dump());
      }
      if (schema.contains("exclusiveMaximum") && x >= schema["exclusiveMaximum"].get<double>()) {
        fail(path, "value " + v.dump() + " must be below " + schema["exclusiveMaximum"].dump());
      }
    }
    if (v.is_string()) {
      const auto& s = v.get_ref<const std::string&>();
      if (schema.contains("minLength") && s.size() < schema["minLength"].get<std::size_t>()) {
        fail(path, "string too short");
      }
      if (schema.contains("pattern") && !std::regex_search(s, std::regex(schema["pattern"].get<std::string>()))) {
        fail(path, "string " + v.dump() + " does not match " + schema["pattern"].dump());
      }
    }
    if (v.is_array()) {
      if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) {
        fail(path, "array needs at least " + schema["minItems"].dump() + " items");
      }
      if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>()) {
        fail(path, "array allows at most " + schema["maxItems"].dump() + " items");
      }
      if (schema.contains("items")) {
        for (std::size_t k = 0; k < v.size(); ++k) check(v[k], schema["items"], path + "/" + std::to_string(k));
      }
    }
    if (v.is_object()) {
      const json empty = json::object();
      const json& props = schema.contains("properties") ? schema["properties"] : empty;
      if (schema.contains("required")) {
        for (const auto& r : schema["required"]) {
          if (!v.contains(r.get<std::string>())) fail(path, "missing required key '" + r.get<std::string>() + "'");
        }
      }
      for (const auto& [key, child] : v.items()) {
        const std::string child_path = path + "/" + escape_pointer_token(key);
        if (props.contains(key)) {
          check(child, props[key], child_path);
        } else if (schema.value("additionalProperties", true) == false) {
          fail(child_path, "unknown key '" + key + "'");
        }
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError((path.empty() ? std::string("/") : path) + ": " + msg, where_.line(path));
  }

  const json& root_;
  const JsonLocator& where_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

JsonLocator::JsonLocator(std::string_view text) {
  lines_.emplace("", 1);
  Scanner(text, lines_).run();
}

int JsonLocator::line(const std::string& pointer) const {
  std::string p = pointer;
  for (;;) {
    const auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    const auto cut = p.rfind('/');
    if (cut == std::string::npos) return 0;
    p.erase(cut);
  }
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Count lines up to the reported byte offset.
    const std::size_t end = std::min(text.size(), e.byte == 0 ? std::size_t{0} : e.byte - 1);
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
}

const std::string& config_schema_text() {
  static const std::string text(kSchemaText);
  return text;
}

const json& config_schema() {
  static const json schema = json::parse(config_schema_text());
  return schema;
}

void validate_schema(const json& doc, const json& schema, const JsonLocator& where) {
  Validator(schema, where).check(doc, schema, "");
}

json field_json(const AotField& field) {
  json vectors = json::array();
  for (const auto& v : field.vectors) {
    json contributions = json::array();
    for (int k = 0; k < 8; ++k) contributions.push_back(nullptr);
    for (const auto& c : v.contributions) contributions[static_cast<std::size_t>(c.neighbor.index - 1)] = c.ci;
    vectors.push_back({{"t_index", v.t},
                       {"x", v.x},
                       {"t", v.t * field.dt},
                       {"v_t", v.v_t},
                       {"v_x", v.v_x},
                       {"contributions", contributions}});
  }
  return {{"n_sites", field.n_sites},
          {"n_slices", field.n_slices},
          {"dt", field.dt},
          {"dx", field.dx},
          {"neighbor_order", "1(-1,-1) 2(-1,0) 3(-1,+1) 4(0,+1) 5(+1,+1) 6(+1,0) 7(+1,-1) 8(0,-1) in (t,x) steps"},
          {"vectors", vectors}};
}

std::string entropy_csv(const AotField& field) {
  std::string out = "t,x,von_neumann,renyi2\n";
  for (int t = 0; t < field.n_slices; ++t) {
    for (Site x = 0; x < field.n_sites; ++x) {
      out += fmt("%.17g", t * field.dt) + "," + std::to_string(x) + "," + fmt("%.17g", field.entropy.vn(t, x)) +
             "," + fmt("%.17g", field.entropy.s2(t, x)) + "\n";
    }
  }
  return out;
}

SvgRendering field_svg(const AotField& field, const std::string& title) {
  const double width = 480.0;
  const double height = 600.0;
  const double margin = 40.0;
  const double cw = width / field.n_sites;
  const double ch = height / field.n_slices;
  // t increases upward.
  auto ypos = [&](double t_index) { return margin + height - (t_index + 0.5) * ch; };
  auto xpos = [&](double x) { return margin + (x + 0.5) * cw; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width + 2 * margin) + "\" height=\"" +
       fmt("%.0f", height + 2 * margin) + "\">\n";
  s += "<title>" + title + "</title>\n";
  const double smax = std::log(2.0);
  for (int t = 0; t < field.n_slices; ++t) {
    for (Site x = 0; x < field.n_sites; ++x) {
      const double u = std::clamp(field.entropy.vn(t, x) / smax, 0.0, 1.0);
      const int r = static_cast<int>(std::lround(255 * u));
      const int g = static_cast<int>(std::lround(255 * (0.3 + 0.5 * u)));
      const int b = static_cast<int>(std::lround(255 * (1.0 - u)));
      s += "<rect x=\"" + fmt("%.3f", margin + x * cw) + "\" y=\"" + fmt("%.3f", ypos(t) - 0.5 * ch) +
           "\" width=\"" + fmt("%.3f", cw) + "\" height=\"" + fmt("%.3f", ch) + "\" fill=\"rgb(" +
           std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")\"/>\n";
    }
  }

  const int rows = std::min(field.n_slices, 40);
  const int stride = std::max(1, field.n_slices / rows);
  // Components in cell units: v_t / dt slices, v_x / dx sites.
  double vmax = 0.0;
  for (const auto& v : field.vectors) vmax = std::max(vmax, std::hypot(v.v_t / field.dt, v.v_x / field.dx));
  const double spacing = std::min(cw, stride * ch);
  SvgRendering out;
  out.arrow_scale = vmax > 0.0 ? 0.8 / vmax : 0.0;
  for (int t = 0; t < field.n_slices; t += stride) {
    for (Site x = 0; x < field.n_sites; ++x) {
      const auto& v = field.at(t, x);
      const double ax = v.v_x / field.dx * out.arrow_scale * spacing;
      const double at = v.v_t / field.dt * out.arrow_scale * spacing;
      const double x0 = xpos(x) - ax / 2;
      const double y0 = ypos(t) + at / 2;
      s += "<line x1=\"" + fmt("%.3f", x0) + "\" y1=\"" + fmt("%.3f", y0) + "\" x2=\"" + fmt("%.3f", x0 + ax) +
           "\" y2=\"" + fmt("%.3f", y0 - at) + "\" stroke=\"black\" stroke-width=\"1\" marker-end=\"url(#head)\"/>\n";
    }
  }
  s.insert(s.find("<title>"),
           "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" "
           "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\"/></marker></defs>\n");
  s += "<text x=\"" + fmt("%.0f", margin) + "\" y=\"" + fmt("%.0f", margin - 12) +
       "\" font-size=\"12\">x (sites) horizontal, t upward; arrow scale " + fmt("%.6g", out.arrow_scale) +
       " cells per unit</text>\n";
  s += "</svg>\n";
  out.svg = std::move(s);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

StagedOutput::StagedOutput(std::filesystem::path dir) : dir_(std::move(dir)) {}

StagedOutput::~StagedOutput() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& p : staged_) std::filesystem::remove(p.string() + ".partial", ec);
}

void StagedOutput::write(const std::string& name, const std::string& contents) {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / name;
  staged_.push_back(path);
  std::ofstream f(path.string() + ".partial", std::ios::binary);
  f << contents;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::filesystem::path> StagedOutput::commit() {
  for (const auto& p : staged_) std::filesystem::rename(p.string() + ".partial", p);
  committed_ = true;
  return staged_;
}

}  // namespace chronoscope
