#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace datalearner {

enum class AttributeKind { numeric, nominal, string };

std::string_view to_string(AttributeKind kind);

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> values;  // nominal only, declaration order
  std::size_t index = 0;

  bool is_numeric() const noexcept { return kind == AttributeKind::numeric; }
  bool is_nominal() const noexcept { return kind == AttributeKind::nominal; }
  bool is_string() const noexcept { return kind == AttributeKind::string; }
  std::size_t arity() const noexcept { return values.size(); }

  std::optional<std::size_t> value_index(std::string_view label) const;

  bool operator==(const Attribute&) const = default;
};

/// Cells are stored as doubles: the number itself, the nominal value index, or an
/// index into the dataset's string pool. Missing is a quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double cell) noexcept { return std::isnan(cell); }

struct Instance {
  std::vector<double> values;

  double operator[](std::size_t i) const { return values[i]; }
  bool missing(std::size_t i) const { return is_missing(values[i]); }
  std::size_t nominal(std::size_t i) const { return static_cast<std::size_t>(values[i]); }
};

/// A parsed relation. Immutable once built and safe to share between runs.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::string relation, std::vector<Attribute> attributes);

  const std::string& relation() const noexcept { return relation_; }
  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::size_t num_attributes() const noexcept { return attributes_.size(); }

  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const Instance& instance(std::size_t i) const { return instances_.at(i); }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }

  std::size_t class_index() const noexcept { return class_index_; }
  const Attribute& class_attribute() const { return attributes_.at(class_index_); }
  std::size_t num_classes() const { return class_attribute().arity(); }
  std::size_t class_of(std::size_t row) const { return instances_[row].nominal(class_index_); }

  /// Returns the index of the attribute named `name`, if any.
  std::optional<std::size_t> find_attribute(std::string_view name) const;

  /// String-attribute cells hold an index into this pool.
  const std::string& string_value(double cell) const { return strings_.at(static_cast<std::size_t>(cell)); }
  double intern(std::string text);

  /// Appends a row after checking arity and nominal indices.
  void add(Instance inst);

  /// New dataset sharing schema and class index, holding the given rows of this one.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  /// Copy with no instances.
  Dataset empty_copy() const;

  void set_class_index_unchecked(std::size_t i) noexcept { class_index_ = i; }

  /// Every attribute except the class, in schema order.
  std::vector<std::size_t> predictor_indices() const;

  /// Structural equality: schema, class index and every cell (missing equals missing;
  /// string cells compare by text).
  friend bool operator==(const Dataset& a, const Dataset& b);

private:
  std::string relation_;
  std::vector<Attribute> attributes_;
  std::vector<Instance> instances_;
  std::vector<std::string> strings_;
  std::size_t class_index_ = 0;
};

/// Returns a copy whose class attribute is `index`. Data is unchanged.
/// Throws ValidationError when the index is out of range.
Dataset set_class_index(const Dataset& ds, std::size_t index);

/// Throws ValidationError unless the class attribute is nominal and every
/// predictor is numeric or nominal.
void require_classification_schema(const Dataset& ds);

struct AttributeSummary {
  std::string name;
  AttributeKind kind;
  std::size_t distinct = 0;
  std::size_t missing = 0;
};

struct DatasetSummary {
  std::string relation;
  std::size_t instances = 0;
  std::size_t attributes = 0;
  std::size_t class_index = 0;
  std::vector<AttributeSummary> per_attribute;
  /// Label -> count, in declaration order of the class values. Empty when the
  /// class attribute is not nominal.
  std::vector<std::pair<std::string, std::size_t>> class_distribution;
};

DatasetSummary summarize(const Dataset& ds);

/// Human-readable rendering of a summary.
std::string render_summary(const DatasetSummary& summary);

}  // namespace datalearner
