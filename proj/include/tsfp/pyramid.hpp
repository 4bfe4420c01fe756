// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// The saliency model: lateral projections onto a common channel width, the
// top-down temporal-spatial feature pyramid, one decoder branch per level
// fused by elementwise sum, and the time-collapsing output head. The two
// reduced architectures keep the exact same parameter shapes where they share
// structure:
//   full             - laterals + top-down sum + all four decoder branches
//   only_multi_level - laterals only (no top-down sum) + all four branches
//   only_final_level - deepest lateral + its single branch
// so only_final_level has strictly fewer parameters and the other two are
// identical in size.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "tsfp/audio.hpp"
#include "tsfp/checkpoint.hpp"
#include "tsfp/encoder.hpp"
#include "tsfp/resize.hpp"

namespace tsfp {

enum class Variant { full, only_multi_level, only_final_level };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::only_multi_level: return "only_multi_level";
        case Variant::only_final_level: return "only_final_level";
    }
    return "full";
}

inline Variant variant_from_name(const std::string& name) {
    if (name == "full") return Variant::full;
    if (name == "only_multi_level") return Variant::only_multi_level;
    if (name == "only_final_level") return Variant::only_final_level;
    throw ConfigError("unknown variant '" + name + "'");
}

struct PyramidConfig {
    int channels = 32;  // uniform across levels
    Variant variant = Variant::full;
};

struct ModelConfig {
    EncoderConfig encoder;
    PyramidConfig pyramid;
    AudioConfig audio;
    bool audio_enabled = false;
    int clip_len = 32;
    int height = 192;
    int width = 352;
    std::uint64_t seed = 1;

    int decode_t() const { return clip_len / encoder.temporal_stride_product(); }
    int decode_h() const { return height / 4; }
    int decode_w() const { return width / 4; }

    void validate() const {
        encoder.validate();
        if (pyramid.channels < 1) throw ConfigError("pyramid channels must be positive");
        if (clip_len < encoder.temporal_stride_product() ||
            clip_len % encoder.temporal_stride_product() != 0)
            throw ConfigError("clip length " + std::to_string(clip_len) +
                              " must be a positive multiple of the temporal stride product " +
                              std::to_string(encoder.temporal_stride_product()));
        if (height % EncoderConfig::spatial_stride_product() != 0 ||
            width % EncoderConfig::spatial_stride_product() != 0)
            throw ConfigError("frame size " + std::to_string(height) + "x" +
                              std::to_string(width) + " must be a multiple of 32");
        const int td = decode_t();
        if ((td & (td - 1)) != 0)
            throw ConfigError("decode length " + std::to_string(td) +
                              " must be a power of two for the output head");
        if (audio_enabled) audio.validate();
    }
};

template <typename T>
class TsfpModel {
public:
    explicit TsfpModel(const ModelConfig& config) : cfg_(config) {
        cfg_.validate();
        Rng rng(cfg_.seed);
        encoder_ = S3dEncoder<T>(cfg_.encoder, rng.next_u64());

        const int cp = cfg_.pyramid.channels;
        for (int i = 0; i < 4; ++i) {
            if (cfg_.pyramid.variant == Variant::only_final_level && i != 3) continue;
            ConvSpec lateral;
            lateral.in_channels = cfg_.encoder.stage_channels[i];
            lateral.out_channels = cp;
            laterals_[i] = Conv3dLayer<T>::make(lateral, rng);
            has_lateral_[i] = true;
        }
        for (int i = 0; i < 4; ++i) {
            if (cfg_.pyramid.variant == Variant::only_final_level && i != 3) continue;
            const int upsamples = i;  // spatial doublings from level scale to /4
            const int blocks = std::max(1, upsamples);
            std::vector<ConvBlock<T>> branch;
            for (int b = 0; b < blocks; ++b)
                branch.push_back(ConvBlock<T>::make(cp, cp, {3, 3, 3}, {1, 1, 1}, {1, 1, 1},
                                                    cfg_.encoder.separable, rng));
            branches_[i] = std::move(branch);
        }
        int td = cfg_.decode_t();
        while (td > 1) {
            head_blocks_.push_back(ConvBlock<T>::make(cp, cp, {3, 3, 3}, {2, 1, 1}, {1, 1, 1},
                                                      cfg_.encoder.separable, rng));
            td /= 2;
        }
        ConvSpec out;
        out.in_channels = cp;
        out.out_channels = 1;
        head_out_ = Conv3dLayer<T>::make(out, rng);

        if (cfg_.audio_enabled) {
            audio_encoder_ = AudioEncoder<T>(cfg_.audio, rng);
            fusion_ = BilinearFusion<T>::make(cfg_.encoder.stage_channels[2],
                                              cfg_.audio.feature_dim, rng);
        }
    }

    const ModelConfig& config() const { return cfg_; }
    const S3dEncoder<T>& encoder() const { return encoder_; }
    const AudioEncoder<T>& audio_encoder() const { return audio_encoder_; }
    Variant variant() const { return cfg_.pyramid.variant; }

    std::array<Tensor<T>, 4> encoder_features(const Tensor<T>& clip) const {
        return encoder_.forward(clip);
    }

    // Laterals only, no top-down enhancement (the only_multi_level pathway).
    std::array<Tensor<T>, 4> lateral_projections(const std::array<Tensor<T>, 4>& feats) const {
        require_multi_level("lateral_projections");
        std::array<Tensor<T>, 4> out;
        for (int i = 0; i < 4; ++i) out[i] = laterals_[i](feats[i]);
        return out;
    }

    // Lateral projection + top-down path: each deeper pyramid level is
    // trilinearly upsampled to the shallower level's dims and added in.
    std::array<Tensor<T>, 4> build_pyramid(const std::array<Tensor<T>, 4>& feats) const {
        require_multi_level("build_pyramid");
        std::array<Tensor<T>, 4> pyr = lateral_projections(feats);
        for (int i = 2; i >= 0; --i) {
            const auto& target = pyr[i].shape();
            pyr[i] = ops::add(pyr[i],
                              resize_trilinear(pyr[i + 1], target[1], target[2], target[3]));
        }
        return pyr;
    }

    // One decoder branch: conv blocks interleaved with x2 spatial upsampling
    // (and x2 temporal while below the decode length), then a final resize to
    // the exact decode target. With the default stride ledger the final
    // resize is the identity for the two deepest levels and a pure temporal
    // reduction for the two shallowest.
    Tensor<T> decode_branch(int level, Tensor<T> x) const {
        const int th = cfg_.decode_h(), tw = cfg_.decode_w(), tt = cfg_.decode_t();
        for (const auto& block : branches_[level]) {
            x = block(x);
            if (x.dim(2) < th || x.dim(3) < tw) {
                const int nt = x.dim(1) < tt ? std::min(tt, x.dim(1) * 2) : x.dim(1);
                x = resize_trilinear(x, nt, std::min(th, x.dim(2) * 2),
                                     std::min(tw, x.dim(3) * 2));
            }
        }
        if (x.dim(1) != tt || x.dim(2) != th || x.dim(3) != tw)
            x = resize_trilinear(x, tt, th, tw);
        return x;
    }

    // Per-level decoding fused by elementwise sum.
    Tensor<T> hierarchical_decode(const std::array<Tensor<T>, 4>& pyr) const {
        require_multi_level("hierarchical_decode");
        Tensor<T> fused = decode_branch(0, pyr[0]);
        for (int i = 1; i < 4; ++i) fused = ops::add(fused, decode_branch(i, pyr[i]));
        return fused;
    }

    // Fused decode features at (C_p, T_d, H/4, W/4) for the active variant.
    Tensor<T> decode_features(const Tensor<T>& clip) const {
        const auto feats = encoder_features(clip);
        return decode_features(feats);
    }

    Tensor<T> decode_features(const std::array<Tensor<T>, 4>& feats) const {
        switch (cfg_.pyramid.variant) {
            case Variant::full: return hierarchical_decode(build_pyramid(feats));
            case Variant::only_multi_level:
                return hierarchical_decode(lateral_projections(feats));
            case Variant::only_final_level: return decode_branch(3, laterals_[3](feats[3]));
        }
        throw ConfigError("unreachable variant");
    }

    // Collapse time with stride-2 temporal conv blocks, project to one
    // channel, squash, and upsample x4 to the input frame size. Returns an
    // (H, W) map with every value strictly inside (0,1).
    Tensor<T> output_head(Tensor<T> fused) const {
        for (const auto& block : head_blocks_) fused = block(fused);
        Tensor<T> logits = head_out_(fused);
        Tensor<T> map = resize_bilinear(ops::sigmoid(logits), cfg_.height, cfg_.width);
        return ops::reshape(map, {cfg_.height, cfg_.width});
    }

    // Visual-only forward: saliency map for the clip's last frame.
    Tensor<T> forward(const Tensor<T>& clip) const { return output_head(decode_features(clip)); }

    // Audio-visual forward: the fused decode features are gated by the
    // attention map and kept through a residual sum before the head.
    Tensor<T> forward(const Tensor<T>& clip, const Tensor<T>& waveform) const {
        if (!cfg_.audio_enabled) throw ConfigError("model was built without the audio branch");
        const auto feats = encoder_features(clip);
        Tensor<T> fused = decode_features(feats);
        Tensor<T> attn = audio_attention(feats, waveform);
        return output_head(apply_audio_attention(fused, attn));
    }

    // Attention map from the stage-3 features and the waveform, upsampled to
    // the decode grid.
    Tensor<T> audio_attention(const std::array<Tensor<T>, 4>& feats,
                              const Tensor<T>& waveform) const {
        if (!cfg_.audio_enabled) throw ConfigError("model was built without the audio branch");
        Tensor<T> sound = audio_encoder_.forward(waveform);
        Tensor<T> attn = fusion_.attention(feats[2], sound);
        return resize_trilinear(attn, cfg_.decode_t(), cfg_.decode_h(), cfg_.decode_w());
    }

    ParamMap<T> parameters() const {
        ParamMap<T> params;
        encoder_.collect_params(params);
        for (int i = 0; i < 4; ++i)
            if (has_lateral_[i])
                laterals_[i].collect(params, "pyr.lateral" + std::to_string(i + 1));
        for (int i = 0; i < 4; ++i)
            for (std::size_t b = 0; b < branches_[i].size(); ++b)
                branches_[i][b].collect(params, "pyr.branch" + std::to_string(i + 1) + ".block" +
                                                    std::to_string(b + 1));
        for (std::size_t b = 0; b < head_blocks_.size(); ++b)
            head_blocks_[b].collect(params, "head.block" + std::to_string(b + 1));
        head_out_.collect(params, "head.out");
        if (cfg_.audio_enabled) {
            audio_encoder_.collect_params(params);
            fusion_.collect_params(params);
        }
        return params;
    }

    std::int64_t parameter_count() const { return parameters().total_elements(); }

    void save(const std::filesystem::path& path) const {
        const ParamMap<T> params = parameters();
        save_checkpoint(path, params, variant_name(cfg_.pyramid.variant));
    }

    void load(const std::filesystem::path& path) {
        const std::string tag = read_checkpoint_variant(path);
        if (!tag.empty() && tag != variant_name(cfg_.pyramid.variant))
            throw ConfigError("checkpoint variant '" + tag + "' does not match model variant '" +
                              std::string(variant_name(cfg_.pyramid.variant)) + "'");
        ParamMap<T> params = parameters();
        load_checkpoint(path, params);
    }

private:
    void require_multi_level(const char* what) const {
        if (cfg_.pyramid.variant == Variant::only_final_level)
            throw ConfigError(std::string(what) +
                              " requires the full or only_multi_level variant");
    }

    ModelConfig cfg_;
    S3dEncoder<T> encoder_;
    std::array<Conv3dLayer<T>, 4> laterals_;
    std::array<bool, 4> has_lateral_{false, false, false, false};
    std::array<std::vector<ConvBlock<T>>, 4> branches_;
    std::vector<ConvBlock<T>> head_blocks_;
    Conv3dLayer<T> head_out_;
    AudioEncoder<T> audio_encoder_;
    BilinearFusion<T> fusion_;
};

}  // namespace tsfp
