#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "datalearner/dataset.hpp"

namespace datalearner {

/// Parses an ARFF document (dense format). Keywords are case-insensitive, '%'
/// starts a comment, '?' is missing, and LF or CRLF line endings are accepted.
/// Throws ParseError carrying the offending line number.
Dataset parse_arff(std::string_view text);

/// Reads and parses a file. Throws std::runtime_error if it cannot be opened.
Dataset load_arff(const std::filesystem::path& path);

/// Serializes a dataset so that parse_arff(write_arff(ds)) == ds.
std::string write_arff(const Dataset& ds);

/// Quotes a name or value when ARFF syntax requires it.
std::string quote_arff_token(std::string_view token);

}  // namespace datalearner
