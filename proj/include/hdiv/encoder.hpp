#pragma once

// Small residual convolutional encoder with named probe taps.
//
// Layout: conv1 (3x3, stride 1) -> 4+ residual stages (stage i halves the
// spatial size for i > 0 and has base_channels * width_mult * 2^i channels)
// -> global average pool -> linear embedding h (embed_dim) -> 2-layer MLP
// projection z (proj_dim). Taps: conv1 / res2 / res4 are spatially pooled
// feature maps, head is the trunk embedding h.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdiv/checkpoint.hpp"
#include "hdiv/ops.hpp"
#include "hdiv/tensor.hpp"

namespace hdiv {

enum class NormKind { batch, layer };
enum class Mode { train, eval };

NormKind norm_kind_from_string(const std::string& s);
std::string to_string(NormKind k);

struct EncoderSpec {
    std::vector<int> stage_blocks{1, 1, 1, 1};
    int width_mult = 1;
    int base_channels = 16;
    NormKind norm = NormKind::batch;
    int embed_dim = 128;
    int proj_dim = 64;

    int stage_channels(int stage) const { return base_channels * width_mult * (1 << stage); }
};

// Depth presets d1..d4 (stage block counts).
std::vector<int> depth_preset_blocks(const std::string& name);
const std::vector<std::string>& depth_preset_names();

const std::vector<std::string>& tap_names();  // conv1, res2, res4, head

struct FeatureBatch {
    std::string layer;
    int64_t n = 0;
    int64_t d = 0;
    std::vector<double> values;  // n × d row-major
    const double* row(int64_t i) const { return values.data() + i * d; }
};

struct TapSet {
    FeatureBatch conv1, res2, res4, head;
    const FeatureBatch& by_name(const std::string& name) const;
    std::vector<const FeatureBatch*> ordered() const;
};

struct ForwardResult {
    TapSet taps;
    Tensor h;  // trunk embedding, B × embed_dim
    Tensor z;  // projection output, B × proj_dim (not normalized; the loss normalizes)
};

class Encoder {
  public:
    Encoder(const EncoderSpec& spec, uint64_t seed);

    ForwardResult forward_with_taps(const Tensor& batch, Mode mode);
    Tensor forward_embedding(const Tensor& batch, Mode mode);  // h only

    int64_t parameter_count() const;
    std::vector<NamedTensor> parameters();             // all trainable params
    std::vector<NamedTensor> trunk_parameters();       // without the projection MLP
    std::vector<NamedTensor> projection_parameters();

    std::vector<CheckpointRecord> export_state() const;  // params + running stats
    void import_state(const std::vector<CheckpointRecord>& records);

    const EncoderSpec& spec() const { return spec_; }

    // Per-output-neuron weight rows of the layer feeding a tap; used by the
    // weight-side energy reading.
    FeatureBatch neuron_weight_rows(const std::string& tap) const;

  private:
    struct ConvLayer {
        Tensor w;
        int stride = 1;
        int pad = 1;
    };
    struct NormLayer {
        Tensor gamma, beta;
        NormState state;
    };
    struct LinearLayer {
        Tensor w;  // in × out
        Tensor b;
    };
    struct ResBlock {
        ConvLayer conv_a;
        NormLayer norm_a;
        ConvLayer conv_b;
        NormLayer norm_b;
        std::optional<ConvLayer> proj;
        std::optional<NormLayer> proj_norm;
    };

    Tensor apply_norm(const NormLayer& n, const Tensor& x, Mode mode);
    Tensor run_block(ResBlock& blk, const Tensor& x, Mode mode);
    void collect(std::vector<NamedTensor>& out, bool trunk, bool projection);
    void for_each_norm(const std::function<void(const std::string&, const NormLayer&)>& fn) const;

    EncoderSpec spec_;
    ConvLayer stem_;
    NormLayer stem_norm_;
    std::vector<std::vector<ResBlock>> stages_;
    LinearLayer embed_;
    LinearLayer proj_fc1_;
    LinearLayer proj_fc2_;
};

// Pooled (B×C) copy of a B×C×H×W activation, outside the autodiff graph.
FeatureBatch pool_feature_map(const std::string& layer, const Tensor& fmap);

uint64_t encoder_state_hash(const Encoder& enc);

}  // namespace hdiv
