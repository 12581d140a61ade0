#pragma once

// Versioned binary checkpoint format:
//   magic "HDV1", then one record per entry:
//     u64 name length, name bytes,
//     u64 rank, u64 dims[rank],
//     f64 values (row-major)
// All integers and floats little-endian.

#include <string>
#include <vector>

#include "hdiv/tensor.hpp"

namespace hdiv {

struct CheckpointRecord {
    std::string name;
    Shape shape;
    std::vector<double> values;
};

void save_checkpoint(const std::string& path, const std::vector<CheckpointRecord>& records);
std::vector<CheckpointRecord> load_checkpoint(const std::string& path);

}  // namespace hdiv
