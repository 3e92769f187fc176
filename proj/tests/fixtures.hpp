#pragma once

// Small datasets shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <string>

#include "datalearner/arff.hpp"
#include "datalearner/dataset.hpp"
#include "datalearner/random.hpp"

namespace fixtures {

inline const char* kWeatherNominal = R"(@relation weather.symbolic
@attribute outlook {sunny, overcast, rainy}
@attribute temperature {hot, mild, cool}
@attribute humidity {high, normal}
@attribute windy {TRUE, FALSE}
@attribute play {yes, no}
@data
sunny,hot,high,FALSE,no
sunny,hot,high,TRUE,no
overcast,hot,high,FALSE,yes
rainy,mild,high,FALSE,yes
rainy,cool,normal,FALSE,yes
rainy,cool,normal,TRUE,no
overcast,cool,normal,TRUE,yes
sunny,mild,high,FALSE,no
sunny,cool,normal,FALSE,yes
rainy,mild,normal,FALSE,yes
sunny,mild,normal,TRUE,yes
overcast,mild,high,TRUE,yes
overcast,hot,normal,FALSE,yes
rainy,mild,high,TRUE,no
)";

inline const char* kWeatherNumeric = R"(@relation weather
@attribute outlook {sunny, overcast, rainy}
@attribute temperature numeric
@attribute humidity numeric
@attribute windy {TRUE, FALSE}
@attribute play {yes, no}
@data
sunny,85,85,FALSE,no
sunny,80,90,TRUE,no
overcast,83,86,FALSE,yes
rainy,70,96,FALSE,yes
rainy,68,80,FALSE,yes
rainy,65,70,TRUE,no
overcast,64,65,TRUE,yes
sunny,72,95,FALSE,no
sunny,69,70,FALSE,yes
rainy,75,80,FALSE,yes
sunny,75,70,TRUE,yes
overcast,72,90,TRUE,yes
overcast,81,75,FALSE,yes
rainy,71,91,TRUE,no
)";

inline datalearner::Dataset weather() { return datalearner::parse_arff(kWeatherNominal); }
inline datalearner::Dataset weather_numeric() { return datalearner::parse_arff(kWeatherNumeric); }

inline std::filesystem::path uci_dir() {
  if (const char* env = std::getenv("DATALEARNER_UCI_DIR")) return env;
  return DATALEARNER_UCI_DIR;
}

inline std::filesystem::path test_data_dir() { return DATALEARNER_TEST_DATA_DIR; }

/// Random dataset exercising names that need quoting, all three attribute kinds
/// and missing cells.
inline datalearner::Dataset random_dataset(std::uint64_t seed) {
  using namespace datalearner;
  Rng rng(seed);
  static const char* kPieces[] = {"a", "b c", "it's", "x,y", "%pct", "q\"uote", "{br}", "back\\slash", "ü", "?", "z"};
  auto word = [&](std::size_t i) {
    std::string w = kPieces[rng.uniform_index(std::size(kPieces))];
    return w + std::to_string(i);
  };
  const std::size_t na = 1 + rng.uniform_index(6);
  std::vector<Attribute> attrs;
  for (std::size_t a = 0; a < na; ++a) {
    Attribute at;
    at.name = word(a);
    const auto kind = rng.uniform_index(5);
    if (kind < 2) {
      at.kind = AttributeKind::numeric;
    } else if (kind < 4 || a + 1 == na) {
      at.kind = AttributeKind::nominal;
      const std::size_t nv = 1 + rng.uniform_index(4);
      for (std::size_t v = 0; v < nv; ++v) at.values.push_back(word(v));
    } else {
      at.kind = AttributeKind::string;
    }
    attrs.push_back(at);
  }
  Dataset ds(word(99), attrs);
  const std::size_t rows = rng.uniform_index(20);
  for (std::size_t r = 0; r < rows; ++r) {
    Instance inst;
    for (const auto& at : attrs) {
      if (rng.uniform_index(8) == 0) {
        inst.values.push_back(kMissing);
        continue;
      }
      switch (at.kind) {
        case AttributeKind::numeric: {
          const double scale = std::pow(10.0, static_cast<double>(rng.uniform_index(12)) - 6);
          inst.values.push_back((rng.uniform01() - 0.5) * scale);
          break;
        }
        case AttributeKind::nominal:
          inst.values.push_back(static_cast<double>(rng.uniform_index(at.arity())));
          break;
        case AttributeKind::string: inst.values.push_back(ds.intern(word(r))); break;
      }
    }
    ds.add(std::move(inst));
  }
  return ds;
}

}  // namespace fixtures
