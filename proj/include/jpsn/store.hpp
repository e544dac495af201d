#ifndef JPSN_STORE_HPP
#define JPSN_STORE_HPP

#include <map>
#include <string>

#include "jpsn/gibbs.hpp"

namespace jpsn {

/// Write a posterior sample store: a directory of columnar TSV files (one
/// per parameter family) plus manifest.json. All numeric output uses 17
/// significant digits so files round-trip exactly and re-runs with the same
/// seed are bit-identical.
void write_store(const PosteriorSamples& samples, const std::string& dir,
                 const std::map<std::string, std::string>& manifest_extra);

PosteriorSamples read_store(const std::string& dir);

/// The manifest as a flat string map (values are JSON-decoded scalars).
std::map<std::string, std::string> read_manifest(const std::string& dir);

}  // namespace jpsn

#endif  // JPSN_STORE_HPP
