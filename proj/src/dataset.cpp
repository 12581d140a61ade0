#include "hdiv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace hdiv {

LabeledImageSet load_cifar_binary(const std::string& path, CifarVariant variant,
                                  const std::string& split) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail("cannot open CIFAR file: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    const std::size_t pixels = 3 * 32 * 32;
    const std::size_t label_bytes = variant == CifarVariant::cifar100 ? 2 : 1;
    const std::size_t record = label_bytes + pixels;
    if (buf.empty() || buf.size() % record != 0) {
        fail("truncated CIFAR file (" + std::to_string(buf.size()) + " bytes, record size " +
             std::to_string(record) + "): " + path);
    }

    LabeledImageSet set;
    set.n = static_cast<int64_t>(buf.size() / record);
    set.channels = 3;
    set.side = 32;
    set.num_classes = variant == CifarVariant::cifar100 ? 100 : 10;
    set.split = split;
    set.images.resize(static_cast<std::size_t>(set.n) * pixels);
    set.labels.resize(static_cast<std::size_t>(set.n));

    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (int64_t i = 0; i < set.n; ++i) {
        const unsigned char* rec = p + static_cast<std::size_t>(i) * record;
        // cifar100 stores coarse then fine; the fine label is the class
        const unsigned char label = rec[label_bytes - 1];
        if (label >= set.num_classes) {
            fail("CIFAR label " + std::to_string(label) + " out of range in " + path);
        }
        set.labels[static_cast<std::size_t>(i)] = label;
        double* dst = set.images.data() + static_cast<std::size_t>(i) * pixels;
        const unsigned char* src = rec + label_bytes;
        for (std::size_t j = 0; j < pixels; ++j) {
            dst[j] = static_cast<double>(src[j]) / 255.0;
        }
    }
    return set;
}

SyntheticSets gen_synthetic(int num_classes, int n_per_class, int side, uint64_t seed) {
    if (num_classes < 2) fail("gen_synthetic: need at least 2 classes");
    if (n_per_class < 1 || side < 1) fail("gen_synthetic: bad size arguments");

    const std::size_t img_sz = static_cast<std::size_t>(3) * side * side;
    const int n_test = std::max(1, n_per_class / 5);  // 80/20 per class
    const int n_train = n_per_class - n_test;

    auto init = [&](LabeledImageSet& s, int per_class, const char* split) {
        s.n = static_cast<int64_t>(num_classes) * per_class;
        s.channels = 3;
        s.side = side;
        s.num_classes = num_classes;
        s.split = split;
        s.images.reserve(static_cast<std::size_t>(s.n) * img_sz);
        s.labels.reserve(static_cast<std::size_t>(s.n));
    };
    SyntheticSets out;
    init(out.train, n_train, "train");
    init(out.test, n_test, "test");

    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<double> img(img_sz);
    for (int c = 0; c < num_classes; ++c) {
        const double theta = 3.14159265358979323846 * c / num_classes;
        const double freq = 2.0 + static_cast<double>(c % 3);
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (int i = 0; i < n_per_class; ++i) {
            Rng rng(mix_seed(seed, static_cast<uint64_t>(c), static_cast<uint64_t>(i)));
            const double amp = rng.uniform(0.75, 1.0);
            const double phase = rng.uniform(-0.25, 0.25);
            for (int ch = 0; ch < 3; ++ch) {
                const double ch_phase = 0.9 * ch;
                for (int y = 0; y < side; ++y) {
                    for (int x = 0; x < side; ++x) {
                        const double u = (x * ct + y * st) / side;
                        double v = 0.5 + 0.38 * amp * std::sin(two_pi * freq * u + phase + ch_phase);
                        v += 0.05 * rng.normal();
                        img[(static_cast<std::size_t>(ch) * side + y) * side + x] =
                            std::clamp(v, 0.0, 1.0);
                    }
                }
            }
            LabeledImageSet& dst = i < n_train ? out.train : out.test;
            dst.images.insert(dst.images.end(), img.begin(), img.end());
            dst.labels.push_back(c);
        }
    }
    return out;
}

namespace {

// Bilinear sample of a crop window resized back to the original side.
void resize_crop(const double* img, int channels, int side, int y0, int x0, int crop,
                 std::vector<double>& out) {
    const double scale = static_cast<double>(crop) / side;
    for (int ch = 0; ch < channels; ++ch) {
        const double* plane = img + static_cast<std::size_t>(ch) * side * side;
        double* oplane = out.data() + static_cast<std::size_t>(ch) * side * side;
        for (int y = 0; y < side; ++y) {
            double sy = (y + 0.5) * scale - 0.5 + y0;
            sy = std::clamp(sy, static_cast<double>(y0), static_cast<double>(y0 + crop - 1));
            const int iy = std::min(static_cast<int>(sy), y0 + crop - 2 >= y0 ? y0 + crop - 2 : y0);
            const double fy = crop > 1 ? sy - iy : 0.0;
            for (int x = 0; x < side; ++x) {
                double sx = (x + 0.5) * scale - 0.5 + x0;
                sx = std::clamp(sx, static_cast<double>(x0), static_cast<double>(x0 + crop - 1));
                const int ix =
                    std::min(static_cast<int>(sx), x0 + crop - 2 >= x0 ? x0 + crop - 2 : x0);
                const double fx = crop > 1 ? sx - ix : 0.0;
                const double a = plane[iy * side + ix];
                const double b = plane[iy * side + std::min(ix + 1, side - 1)];
                const double c = plane[std::min(iy + 1, side - 1) * side + ix];
                const double d = plane[std::min(iy + 1, side - 1) * side + std::min(ix + 1, side - 1)];
                oplane[y * side + x] =
                    a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx;
            }
        }
    }
}

}  // namespace

std::vector<double> augment_view(const double* img, int channels, int side, Rng& rng,
                                 const AugmentOptions& opt) {
    if (side < 8) fail("augment_view: image side must be >= 8");
    const std::size_t img_sz = static_cast<std::size_t>(channels) * side * side;
    std::vector<double> view(img, img + img_sz);

    if (opt.crop) {
        const double area = rng.uniform(opt.min_area, 1.0);
        int crop = static_cast<int>(std::lround(side * std::sqrt(area)));
        crop = std::clamp(crop, 1, side);
        const int y0 = static_cast<int>(rng.randint(0, side - crop));
        const int x0 = static_cast<int>(rng.randint(0, side - crop));
        std::vector<double> resized(img_sz);
        resize_crop(view.data(), channels, side, y0, x0, crop, resized);
        view.swap(resized);
    }
    if (opt.flip && rng.coin()) {
        for (int ch = 0; ch < channels; ++ch) {
            double* plane = view.data() + static_cast<std::size_t>(ch) * side * side;
            for (int y = 0; y < side; ++y) {
                std::reverse(plane + y * side, plane + (y + 1) * side);
            }
        }
    }
    if (opt.jitter) {
        for (int ch = 0; ch < channels; ++ch) {
            const double brightness = rng.uniform(-opt.jitter_limit, opt.jitter_limit);
            const double contrast = 1.0 + rng.uniform(-opt.jitter_limit, opt.jitter_limit);
            double* plane = view.data() + static_cast<std::size_t>(ch) * side * side;
            const std::size_t hw = static_cast<std::size_t>(side) * side;
            double mean = 0.0;
            for (std::size_t j = 0; j < hw; ++j) mean += plane[j];
            mean /= static_cast<double>(hw);
            for (std::size_t j = 0; j < hw; ++j) {
                plane[j] = std::clamp((plane[j] - mean) * contrast + mean + brightness, 0.0, 1.0);
            }
        }
    }
    return view;
}

ViewPair augment_pair(const double* img, int channels, int side, int64_t source_index,
                      Rng& rng, const AugmentOptions& opt) {
    ViewPair p;
    p.view_a = augment_view(img, channels, side, rng, opt);
    p.view_b = augment_view(img, channels, side, rng, opt);
    p.source_index = source_index;
    return p;
}

std::vector<double> rotate4(const double* img, int channels, int h, int w, int k) {
    if (h != w) fail("rotate4: image must be square, got " + std::to_string(h) + "x" +
                     std::to_string(w));
    const int n = h;
    const int kk = ((k % 4) + 4) % 4;
    std::vector<double> out(static_cast<std::size_t>(channels) * n * n);
    for (int ch = 0; ch < channels; ++ch) {
        const double* src = img + static_cast<std::size_t>(ch) * n * n;
        double* dst = out.data() + static_cast<std::size_t>(ch) * n * n;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                double v;
                switch (kk) {
                    case 1: v = src[c * n + (n - 1 - r)]; break;
                    case 2: v = src[(n - 1 - r) * n + (n - 1 - c)]; break;
                    case 3: v = src[(n - 1 - c) * n + r]; break;
                    default: v = src[r * n + c]; break;
                }
                dst[r * n + c] = v;
            }
        }
    }
    return out;
}

}  // namespace hdiv
