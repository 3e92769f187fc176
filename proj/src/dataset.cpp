#include "datalearner/dataset.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "datalearner/error.hpp"

namespace datalearner {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::nominal: return "nominal";
    case AttributeKind::string: return "string";
  }
  return "unknown";
}

std::optional<std::size_t> Attribute::value_index(std::string_view label) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == label) return i;
  return std::nullopt;
}

Dataset::Dataset(std::string relation, std::vector<Attribute> attributes)
    : relation_(std::move(relation)), attributes_(std::move(attributes)) {
  for (std::size_t i = 0; i < attributes_.size(); ++i) attributes_[i].index = i;
  class_index_ = attributes_.empty() ? 0 : attributes_.size() - 1;
}

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const {
  for (const auto& a : attributes_)
    if (a.name == name) return a.index;
  return std::nullopt;
}

double Dataset::intern(std::string text) {
  strings_.push_back(std::move(text));
  return static_cast<double>(strings_.size() - 1);
}

void Dataset::add(Instance inst) {
  if (inst.values.size() != attributes_.size())
    throw ValidationError("instance has " + std::to_string(inst.values.size()) + " cells, expected " +
                          std::to_string(attributes_.size()));
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const double v = inst.values[i];
    if (is_missing(v)) continue;
    const auto& a = attributes_[i];
    if (a.is_nominal() && (v < 0 || v >= static_cast<double>(a.arity()) || v != std::floor(v)))
      throw ValidationError("invalid nominal index for attribute '" + a.name + "'");
    if (a.is_string() && (v < 0 || v >= static_cast<double>(strings_.size())))
      throw ValidationError("invalid string reference for attribute '" + a.name + "'");
  }
  instances_.push_back(std::move(inst));
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out = empty_copy();
  out.strings_ = strings_;
  out.instances_.reserve(rows.size());
  for (std::size_t r : rows) out.instances_.push_back(instances_.at(r));
  return out;
}

Dataset Dataset::empty_copy() const {
  Dataset out;
  out.relation_ = relation_;
  out.attributes_ = attributes_;
  out.class_index_ = class_index_;
  return out;
}

std::vector<std::size_t> Dataset::predictor_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (i != class_index_) out.push_back(i);
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.relation_ != b.relation_ || a.attributes_ != b.attributes_ || a.class_index_ != b.class_index_ ||
      a.instances_.size() != b.instances_.size())
    return false;
  for (std::size_t r = 0; r < a.instances_.size(); ++r) {
    for (std::size_t c = 0; c < a.attributes_.size(); ++c) {
      const double x = a.instances_[r].values[c];
      const double y = b.instances_[r].values[c];
      if (is_missing(x) || is_missing(y)) {
        if (is_missing(x) != is_missing(y)) return false;
        continue;
      }
      if (a.attributes_[c].is_string()) {
        if (a.string_value(x) != b.string_value(y)) return false;
      } else if (x != y) {
        return false;
      }
    }
  }
  return true;
}

Dataset set_class_index(const Dataset& ds, std::size_t index) {
  if (index >= ds.num_attributes())
    throw ValidationError("class index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(ds.num_attributes()) + ")");
  Dataset out = ds;
  out.set_class_index_unchecked(index);
  return out;
}

void require_classification_schema(const Dataset& ds) {
  if (ds.num_attributes() == 0) throw ValidationError("dataset has no attributes");
  if (!ds.class_attribute().is_nominal()) throw ValidationError("class attribute must be nominal");
  for (const auto& a : ds.attributes())
    if (a.is_string())
      throw ValidationError("string attribute '" + a.name + "' is not supported by this algorithm");
}

DatasetSummary summarize(const Dataset& ds) {
  DatasetSummary s;
  s.relation = ds.relation();
  s.instances = ds.size();
  s.attributes = ds.num_attributes();
  s.class_index = ds.class_index();
  for (const auto& a : ds.attributes()) {
    AttributeSummary as{a.name, a.kind, 0, 0};
    std::set<double> seen;
    std::set<std::string> seen_text;
    for (const auto& inst : ds.instances()) {
      const double v = inst[a.index];
      if (is_missing(v)) {
        ++as.missing;
      } else if (a.is_string()) {
        seen_text.insert(ds.string_value(v));
      } else {
        seen.insert(v);
      }
    }
    as.distinct = a.is_string() ? seen_text.size() : seen.size();
    s.per_attribute.push_back(std::move(as));
  }
  if (ds.num_attributes() > 0 && ds.class_attribute().is_nominal()) {
    const auto& cls = ds.class_attribute();
    std::vector<std::size_t> counts(cls.arity(), 0);
    for (const auto& inst : ds.instances())
      if (!inst.missing(cls.index)) ++counts[inst.nominal(cls.index)];
    for (std::size_t i = 0; i < cls.arity(); ++i) s.class_distribution.emplace_back(cls.values[i], counts[i]);
  }
  return s;
}

std::string render_summary(const DatasetSummary& s) {
  std::ostringstream out;
  out << "Relation:   " << s.relation << '\n'
      << "Instances:  " << s.instances << '\n'
      << "Attributes: " << s.attributes << '\n'
      << "Class:      " << (s.class_index < s.per_attribute.size() ? s.per_attribute[s.class_index].name : "")
      << " (index " << s.class_index + 1 << ")\n\n";
  out << std::left << std::setw(4) << "#" << std::setw(28) << "Name" << std::setw(10) << "Type" << std::right
      << std::setw(10) << "Distinct" << std::setw(10) << "Missing" << '\n';
  for (std::size_t i = 0; i < s.per_attribute.size(); ++i) {
    const auto& a = s.per_attribute[i];
    out << std::left << std::setw(4) << i + 1 << std::setw(28) << a.name << std::setw(10) << to_string(a.kind)
        << std::right << std::setw(10) << a.distinct << std::setw(10) << a.missing << '\n';
  }
  if (!s.class_distribution.empty()) {
    out << "\nClass distribution:\n";
    for (const auto& [label, n] : s.class_distribution) out << "  " << label << ": " << n << '\n';
  }
  return out.str();
}

}  // namespace datalearner
