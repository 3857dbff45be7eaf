#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "logdef/tensor.hpp"

namespace logdef {

struct Preprocessing {
    int64_t resize_short_side = 512;
    int64_t center_crop = 512;
    std::array<double, 2> value_range{-1.0, 1.0};
};

struct ManifestEntry {
    std::string path;
    std::string category;
};

// Dataset description: entries sorted by (category, path) for stable order.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    Preprocessing preprocessing;

    std::vector<std::string> categories() const; // sorted unique
};

// Parses and validates a JSON manifest: every path must exist and decode as
// an image, duplicates are rejected, categories must be non-empty.
DatasetManifest load_manifest(const std::string& path);

// Decode, resize the short side (bicubic), center-crop, scale to [-1, 1].
// Output is [3, C, C] in RGB channel order. A file already at the crop size
// is passed through with only the value rescaling applied.
Tensor preprocess_image(const std::string& path, const Preprocessing& pp);

// Preprocesses every manifest entry in manifest order.
std::vector<Tensor> load_dataset(const DatasetManifest& manifest);

} // namespace logdef
