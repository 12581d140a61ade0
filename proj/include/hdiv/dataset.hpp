#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdiv/rng.hpp"
#include "hdiv/util.hpp"

namespace hdiv {

struct LabeledImageSet {
    int64_t n = 0;
    int channels = 3;
    int side = 0;
    int num_classes = 0;
    std::string split;            // "train" or "test"
    std::vector<double> images;   // n × channels × side × side, values in [0,1]
    std::vector<int> labels;

    std::size_t image_size() const {
        return static_cast<std::size_t>(channels) * side * side;
    }
    const double* image(int64_t i) const { return images.data() + i * image_size(); }
};

enum class CifarVariant { cifar10, cifar100 };

// Decodes one CIFAR binary file. Record layout, bit-exact:
//   cifar10:  1 label byte + 3072 pixel bytes (R, G, B planes, row-major)
//   cifar100: coarse byte + fine byte + 3072 pixel bytes (fine label is used)
// The file length must be an exact multiple of the record size.
LabeledImageSet load_cifar_binary(const std::string& path, CifarVariant variant,
                                  const std::string& split);

struct SyntheticSets {
    LabeledImageSet train;
    LabeledImageSet test;
};

// Procedural 3×side×side textures: each class is a fixed-orientation,
// fixed-frequency grating; images vary by amplitude, small phase jitter and
// pixel noise. Deterministic in seed, split 80/20 per class.
SyntheticSets gen_synthetic(int num_classes, int n_per_class, int side, uint64_t seed);

struct AugmentOptions {
    bool crop = true;
    bool flip = true;
    bool jitter = true;
    double min_area = 0.2;       // crop area fraction lower bound
    double jitter_limit = 0.4;   // brightness/contrast range
};

struct ViewPair {
    std::vector<double> view_a;
    std::vector<double> view_b;
    int64_t source_index = -1;
};

std::vector<double> augment_view(const double* img, int channels, int side, Rng& rng,
                                 const AugmentOptions& opt);
ViewPair augment_pair(const double* img, int channels, int side, int64_t source_index,
                      Rng& rng, const AugmentOptions& opt);

// Rotation by k*90 degrees counterclockwise; requires a square image.
std::vector<double> rotate4(const double* img, int channels, int h, int w, int k);

}  // namespace hdiv
