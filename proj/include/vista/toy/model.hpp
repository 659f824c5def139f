#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vista/raster.hpp"

namespace vista::toy {

inline constexpr int kFeatureDim = 8;

// Unit-norm descriptor of a clip's frames: quadrant luma means, channel means,
// global luma mean. Deterministic in the frame bytes.
struct FrameFeature {
    std::string clip_id;
    std::vector<double> values; // length kFeatureDim, unit L2 norm

    static FrameFeature from_rasters(const std::string& clip_id,
                                     std::span<const Raster> frames) {
        if (frames.empty()) throw std::invalid_argument("FrameFeature: no frames");
        std::vector<double> acc(kFeatureDim, 0.0);
        for (const auto& img : frames) {
            const auto f = raster_feature(img);
            for (int i = 0; i < kFeatureDim; ++i) acc[i] += f[i];
        }
        for (auto& v : acc) v /= static_cast<double>(frames.size());
        normalize(acc);
        return FrameFeature{clip_id, std::move(acc)};
    }

    static std::vector<double> raster_feature(const Raster& img) {
        std::vector<double> f(kFeatureDim, 0.0);
        const int hw = img.width / 2, hh = img.height / 2;
        double quad[4] = {0, 0, 0, 0};
        long quad_n[4] = {0, 0, 0, 0};
        double chan[3] = {0, 0, 0};
        double luma_sum = 0.0;
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const std::uint8_t* p = img.pixel(x, y);
                const double luma = (p[0] + p[1] + p[2]) / 3.0;
                const int q = (y >= hh ? 2 : 0) + (x >= hw ? 1 : 0);
                quad[q] += luma;
                ++quad_n[q];
                chan[0] += p[0];
                chan[1] += p[1];
                chan[2] += p[2];
                luma_sum += luma;
            }
        }
        const double npx = static_cast<double>(img.width) * img.height;
        for (int q = 0; q < 4; ++q) f[q] = quad_n[q] ? quad[q] / quad_n[q] / 255.0 : 0.0;
        for (int c = 0; c < 3; ++c) f[4 + c] = chan[c] / npx / 255.0;
        f[7] = luma_sum / npx / 255.0;
        return f;
    }

    static void normalize(std::vector<double>& v) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            v[0] = 1.0;
            return;
        }
        for (double& x : v) x /= norm;
    }
};

// Next-token model: logits are a previous-token table row plus a linear projection
// of the frame feature. Linear in its parameters, so gradients are exact outer
// products. Double precision throughout.
struct ToyModel {
    int vocab_size = 0;
    int feature_dim = kFeatureDim;
    int bos_id = 0;
    int eos_id = 1;
    std::vector<double> token_table;      // vocab_size x vocab_size, row = previous token
    std::vector<double> frame_projection; // feature_dim x vocab_size

    static ToyModel zeros(int vocab_size, int feature_dim = kFeatureDim) {
        ToyModel m;
        m.vocab_size = vocab_size;
        m.feature_dim = feature_dim;
        m.token_table.assign(static_cast<size_t>(vocab_size) * vocab_size, 0.0);
        m.frame_projection.assign(static_cast<size_t>(feature_dim) * vocab_size, 0.0);
        return m;
    }

    double* table_row(int prev) { return token_table.data() + static_cast<size_t>(prev) * vocab_size; }
    const double* table_row(int prev) const {
        return token_table.data() + static_cast<size_t>(prev) * vocab_size;
    }
    double* proj_row(int f) { return frame_projection.data() + static_cast<size_t>(f) * vocab_size; }
    const double* proj_row(int f) const {
        return frame_projection.data() + static_cast<size_t>(f) * vocab_size;
    }
};

// Gradient buffer shaped like the parameters.
struct ToyGradient {
    std::vector<double> token_table;
    std::vector<double> frame_projection;

    static ToyGradient zeros_like(const ToyModel& m) {
        ToyGradient g;
        g.token_table.assign(m.token_table.size(), 0.0);
        g.frame_projection.assign(m.frame_projection.size(), 0.0);
        return g;
    }

    void add_scaled(const ToyGradient& other, double scale) {
        for (size_t i = 0; i < token_table.size(); ++i) token_table[i] += scale * other.token_table[i];
        for (size_t i = 0; i < frame_projection.size(); ++i)
            frame_projection[i] += scale * other.frame_projection[i];
    }
};

inline std::vector<double> forward_logits(const ToyModel& model,
                                          const std::vector<double>& feature, int prefix_token) {
    if (prefix_token < 0 || prefix_token >= model.vocab_size)
        throw std::out_of_range("forward_logits: prefix token out of range");
    std::vector<double> z(model.table_row(prefix_token),
                          model.table_row(prefix_token) + model.vocab_size);
    for (int f = 0; f < model.feature_dim; ++f) {
        const double w = feature[f];
        if (w == 0.0) continue;
        const double* row = model.proj_row(f);
        for (int v = 0; v < model.vocab_size; ++v) z[v] += w * row[v];
    }
    return z;
}

// Max-subtracted softmax.
inline std::vector<double> softmax(std::span<const double> z) {
    std::vector<double> p(z.size());
    double zmax = z[0];
    for (double v : z)
        if (v > zmax) zmax = v;
    double sum = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - zmax);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

// Per-sequence cross entropy: -(1/L) * sum over t of log p[y_t], first step
// conditioned on bos_id.
inline double sequence_ce_loss(const ToyModel& model, const std::vector<double>& feature,
                               std::span<const int> tokens) {
    if (tokens.empty()) throw std::invalid_argument("sequence_ce_loss: empty sequence");
    double loss = 0.0;
    int prev = model.bos_id;
    for (int y : tokens) {
        if (y < 0 || y >= model.vocab_size)
            throw std::out_of_range("sequence_ce_loss: token id out of range");
        const auto z = forward_logits(model, feature, prev);
        const auto p = softmax(z);
        loss -= std::log(p[static_cast<size_t>(y)]);
        prev = y;
    }
    return loss / static_cast<double>(tokens.size());
}

// Analytic gradient of sequence_ce_loss: per step, (softmax - onehot) / L lands on
// the previous token's table row and, scaled by each feature component, on the
// projection rows.
inline ToyGradient loss_gradient(const ToyModel& model, const std::vector<double>& feature,
                                 std::span<const int> tokens) {
    if (tokens.empty()) throw std::invalid_argument("loss_gradient: empty sequence");
    ToyGradient grad = ToyGradient::zeros_like(model);
    const double inv_len = 1.0 / static_cast<double>(tokens.size());
    int prev = model.bos_id;
    for (int y : tokens) {
        const auto z = forward_logits(model, feature, prev);
        auto p = softmax(z);
        p[static_cast<size_t>(y)] -= 1.0;
        double* trow = grad.token_table.data() + static_cast<size_t>(prev) * model.vocab_size;
        for (int v = 0; v < model.vocab_size; ++v) trow[v] += inv_len * p[v];
        for (int f = 0; f < model.feature_dim; ++f) {
            const double w = feature[f] * inv_len;
            if (w == 0.0) continue;
            double* prow = grad.frame_projection.data() + static_cast<size_t>(f) * model.vocab_size;
            for (int v = 0; v < model.vocab_size; ++v) prow[v] += w * p[v];
        }
        prev = y;
    }
    return grad;
}

} // namespace vista::toy
