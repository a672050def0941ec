// SPDX-License-Identifier: Apache-2.0
#include "attndse/design_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "attndse/error.hpp"
#include "attndse/io.hpp"

namespace adse {
namespace {

double parse_number(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("malformed number '" + std::string(s) + "' in " + std::string(context));
  return v;
}

std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

bool is_stage_label(std::string_view s) {
  return std::find(std::begin(kStageLabels), std::end(kStageLabels), s) != std::end(kStageLabels);
}

std::string ParameterSpec::label(std::size_t i) const {
  if (categorical) return labels.at(i);
  return format_double(values.at(i));
}

GridSpec parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
    throw InputError("grid '" + std::string(text) + "' is not of the form start:end:stride");
  GridSpec g;
  g.start = parse_number(text.substr(0, c1), text);
  g.end = parse_number(text.substr(c1 + 1, c2 - c1 - 1), text);
  g.stride = parse_number(text.substr(c2 + 1), text);
  return g;
}

std::vector<double> expand_grid(const GridSpec& g) {
  if (!(g.stride > 0.0))
    throw InputError("grid stride must be positive, got " + format_double(g.stride));
  if (g.start > g.end)
    throw InputError("grid start " + format_double(g.start) + " exceeds end " + format_double(g.end));
  // Tolerate representation error so 1:3:0.5 includes 3.
  const auto steps = static_cast<std::size_t>(std::floor((g.end - g.start) / g.stride + 1e-9));
  std::vector<double> values;
  values.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) values.push_back(g.start + static_cast<double>(i) * g.stride);
  return values;
}

std::string DesignPoint::key() const {
  std::string s;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(indices[i]);
  }
  return s;
}

DesignSpace::DesignSpace(std::string name, std::vector<ParameterSpec> params)
    : name_(std::move(name)), params_(std::move(params)) {
  std::set<std::string> seen;
  for (const auto& p : params_) {
    if (p.name.empty()) throw InputError("parameter with empty name");
    if (!seen.insert(p.name).second) throw InputError("duplicate parameter name '" + p.name + "'");
    if (p.values.empty()) throw InputError("parameter '" + p.name + "' has no candidates");
    if (!is_stage_label(p.stage))
      throw InputError("parameter '" + p.name + "' has unknown stage '" + p.stage + "'");
    if (p.categorical) {
      if (p.labels.size() != p.values.size())
        throw InputError("parameter '" + p.name + "' label count mismatch");
      std::set<std::string> labs(p.labels.begin(), p.labels.end());
      if (labs.size() != p.labels.size())
        throw InputError("parameter '" + p.name + "' has duplicate categories");
    } else {
      for (std::size_t i = 1; i < p.values.size(); ++i)
        if (!(p.values[i] > p.values[i - 1]))
          throw InputError("parameter '" + p.name + "' candidates are not strictly increasing");
    }
  }
}

std::optional<std::size_t> DesignSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  return std::nullopt;
}

unsigned __int128 DesignSpace::total_size() const {
  unsigned __int128 total = 1;
  const unsigned __int128 max = ~static_cast<unsigned __int128>(0);
  for (const auto& p : params_) {
    const auto c = static_cast<unsigned __int128>(p.cardinality());
    if (total > max / c) throw std::overflow_error("design space size exceeds 128 bits");
    total *= c;
  }
  return total;
}

std::string DesignSpace::total_size_string() const { return u128_to_string(total_size()); }

bool DesignSpace::contains(const DesignPoint& p) const {
  if (p.indices.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (p.indices[i] >= params_[i].cardinality()) return false;
  return true;
}

void DesignSpace::validate(const DesignPoint& p) const {
  if (p.indices.size() != params_.size())
    throw InputError("design point has " + std::to_string(p.indices.size()) + " entries, space has " +
                     std::to_string(params_.size()) + " parameters");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (p.indices[i] >= params_[i].cardinality())
      throw InputError("index " + std::to_string(p.indices[i]) + " out of range for '" +
                       params_[i].name + "'");
}

std::vector<double> DesignSpace::encode(const DesignPoint& p) const {
  validate(p);
  std::vector<double> x(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) x[i] = params_[i].values[p.indices[i]];
  return x;
}

DesignPoint DesignSpace::decode(std::span<const double> values) const {
  if (values.size() != params_.size())
    throw InputError("feature vector has " + std::to_string(values.size()) + " entries, expected " +
                     std::to_string(params_.size()));
  DesignPoint p;
  p.indices.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& cand = params_[i].values;
    const auto it = std::find(cand.begin(), cand.end(), values[i]);
    if (it == cand.end())
      throw InputError("value " + format_double(values[i]) + " is not a candidate of '" +
                       params_[i].name + "'");
    p.indices[i] = static_cast<std::uint32_t>(it - cand.begin());
  }
  return p;
}

DesignSpace DesignSpace::subspace(std::span<const std::string> names, std::string name) const {
  std::vector<ParameterSpec> kept;
  for (const auto& n : names)
    if (!index_of(n)) throw InputError("subspace parameter '" + n + "' not in space '" + name_ + "'");
  for (const auto& p : params_)
    if (std::find(names.begin(), names.end(), p.name) != names.end()) kept.push_back(p);
  return DesignSpace(std::move(name), std::move(kept));
}

nlohmann::json DesignSpace::to_json() const {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : params_) {
    nlohmann::json e;
    e["name"] = p.name;
    e["stage"] = p.stage;
    if (p.categorical) {
      e["values"] = p.labels;
    } else if (p.grid) {
      e["values"] = format_double(p.grid->start) + ":" + format_double(p.grid->end) + ":" +
                    format_double(p.grid->stride);
    } else {
      e["values"] = p.values;
    }
    params.push_back(std::move(e));
  }
  return {{"name", name_}, {"parameters", params}};
}

DesignSpace parse_design_space(std::string_view config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("design space: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array())
    throw InputError("design space: expected an object with a 'parameters' array");
  std::vector<ParameterSpec> params;
  for (const auto& e : doc["parameters"]) {
    if (!e.is_object() || !e.contains("name") || !e.contains("values"))
      throw InputError("design space: each parameter needs 'name' and 'values'");
    ParameterSpec p;
    p.name = e["name"].get<std::string>();
    p.stage = e.value("stage", std::string{});
    const auto& v = e["values"];
    if (v.is_string()) {
      p.grid = parse_grid(v.get<std::string>());
      p.values = expand_grid(*p.grid);
    } else if (v.is_array()) {
      if (v.empty()) throw InputError("parameter '" + p.name + "' has no candidates");
      if (v.front().is_string()) {
        p.categorical = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!v[i].is_string())
            throw InputError("parameter '" + p.name + "' mixes numeric and categorical values");
          p.labels.push_back(v[i].get<std::string>());
          p.values.push_back(static_cast<double>(i));
        }
      } else {
        for (const auto& x : v) {
          if (!x.is_number()) throw InputError("parameter '" + p.name + "' has a non-numeric value");
          p.values.push_back(x.get<double>());
        }
      }
    } else {
      throw InputError("parameter '" + p.name + "': 'values' must be \"a:b:c\" or a list");
    }
    params.push_back(std::move(p));
  }
  return DesignSpace(doc.value("name", std::string("design_space")), std::move(params));
}

DesignSpace load_design_space(const std::string& path) { return parse_design_space(read_file(path)); }

std::vector<DesignPoint> random_sample(const DesignSpace& space, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DesignPoint> out(n);
  for (auto& p : out) {
    p.indices.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      p.indices[i] = static_cast<std::uint32_t>(uniform_index(rng, space.param(i).cardinality()));
  }
  return out;
}

std::vector<DesignPoint> enumerate_space(const DesignSpace& space, std::size_t limit) {
  const auto total = space.total_size();
  if (total > limit)
    throw InputError("space '" + space.name() + "' has " + space.total_size_string() +
                     " points, more than the enumeration limit");
  std::vector<DesignPoint> out;
  out.reserve(static_cast<std::size_t>(total));
  DesignPoint p{std::vector<std::uint32_t>(space.size(), 0)};
  for (std::size_t n = 0; n < static_cast<std::size_t>(total); ++n) {
    out.push_back(p);
    for (std::size_t i = space.size(); i-- > 0;) {
      if (++p.indices[i] < space.param(i).cardinality()) break;
      p.indices[i] = 0;
    }
  }
  return out;
}

StepResult step_parameter(const DesignSpace& space, const DesignPoint& p, std::size_t index,
                          int direction) {
  if (index >= space.size()) throw std::out_of_range("parameter index out of range");
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  StepResult r{p, false};
  const std::uint32_t cur = p.indices[index];
  if (direction > 0) {
    if (cur + 1 >= space.param(index).cardinality())
      r.at_boundary = true;
    else
      r.point.indices[index] = cur + 1;
  } else {
    if (cur == 0)
      r.at_boundary = true;
    else
      r.point.indices[index] = cur - 1;
  }
  return r;
}

}  // namespace adse
