#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logdef/backend.hpp"
#include "logdef/embedding.hpp"

namespace logdef {

// Inference request. A prompt containing "[V]" needs an embedding; the
// placeholder expands to the embedding's row count. The trained negative
// suffix is not used unless negative_suffix is opted in.
struct SampleRequest {
    std::string prompt_text;
    std::optional<LogicalEmbedding> embedding;
    int64_t steps = 25;
    double cfg_scale = 7.5;
    double eta = 0.0; // 0 = deterministic stepping, 1 = ancestral
    int64_t seed = 0;
    int64_t count = 1;
    bool negative_suffix = false;
};

// Descending timestep subset used for sampling (unique, ends at >= 1).
std::vector<int64_t> sampling_timesteps(int64_t T, int64_t steps);

// Conditioning for a free-form prompt, expanding "[V]" and splicing the
// embedding rows when present.
Conditioning conditioning_for_prompt(const std::string& prompt, const LogicalEmbedding* embedding,
                                     DiffusionBackend& backend);

// Iterative denoising from pure noise with classifier-free guidance against
// the empty prompt. Returns decoded outputs (images, or 2-vectors on the toy
// backend); deterministic per seed.
std::vector<Tensor> generate(const SampleRequest& req, DiffusionBackend& backend);

enum class GridMode { Initial, Rules, Ours };

GridMode parse_grid_mode(const std::string& name);
std::string grid_mode_name(GridMode m);

struct GridRequest {
    std::vector<std::string> categories;
    std::vector<GridMode> modes;
    SampleRequest defaults;       // prompt_text ignored; embedding used for "ours"
    std::string rule_description; // appended verbatim for the "rules" mode
    std::string out_dir;
};

// Writes one PNG per (category, mode) named "<category>_<mode>_<seed>.png"
// and returns the file paths in generation order.
std::vector<std::string> generate_grid(const GridRequest& req, DiffusionBackend& backend);

} // namespace logdef
