#pragma once

#include <string>
#include <vector>

#include "henonlab/henon.hpp"
#include "henonlab/paramset.hpp"
#include "henonlab/unimodal.hpp"

namespace henonlab {

// FNV-1a hash of a string; keys config-derived artifacts and cache entries.
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

std::string unimodal_to_json(const UnimodalMap& f);
UnimodalMap unimodal_from_json(const std::string& text);

std::string tower_manifest_json(const RenormTower& tower, const std::string& config_hash);
std::string cover_to_json(const Cover& cover, const std::string& config_hash);

// Minimal CSV writer: quotes nothing, callers pass clean cells.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);

private:
    void* out_;  // FILE*
};

std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Binary blob of doubles keyed by content hash, for resumable sweeps.
void write_coeff_blob(const std::string& dir, const std::string& key,
                      const std::vector<double>& data);
bool read_coeff_blob(const std::string& dir, const std::string& key, std::vector<double>& data);

}  // namespace henonlab
