#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vista/toy/model.hpp"

namespace vista::toy {

struct TrainItem {
    std::vector<double> feature; // length feature_dim
    std::vector<int> tokens;     // target sequence, EOS included by the caller
};

// Dataset-mean objective and its gradient in one pass.
inline double dataset_loss_and_gradient(const ToyModel& model,
                                        const std::vector<TrainItem>& items,
                                        ToyGradient* grad_out) {
    double total = 0.0;
    if (grad_out) *grad_out = ToyGradient::zeros_like(model);
    const double inv_n = 1.0 / static_cast<double>(items.size());
    for (const auto& item : items) {
        total += sequence_ce_loss(model, item.feature, item.tokens);
        if (grad_out) {
            const ToyGradient g = loss_gradient(model, item.feature, item.tokens);
            grad_out->add_scaled(g, inv_n);
        }
    }
    return total * inv_n;
}

inline double dataset_loss(const ToyModel& model, const std::vector<TrainItem>& items) {
    return dataset_loss_and_gradient(model, items, nullptr);
}

struct TrainResult {
    // Entry 0 is the loss before any update; entry e is the loss after epoch e.
    std::vector<double> trajectory;
};

// Plain gradient descent on the dataset objective, one step per item in dataset
// order, no momentum. Each trajectory entry is the dataset-mean cross entropy
// after a full pass; the run aborts if it leaves the finite range.
inline TrainResult train_sft(ToyModel& model, const std::vector<TrainItem>& items, int epochs,
                             double learning_rate) {
    if (items.empty()) throw std::invalid_argument("train_sft: empty dataset");
    if (learning_rate < 0.0) throw std::invalid_argument("train_sft: negative learning rate");
    TrainResult result;
    result.trajectory.push_back(dataset_loss(model, items));
    for (int e = 0; e < epochs; ++e) {
        for (const auto& item : items) {
            const ToyGradient grad = loss_gradient(model, item.feature, item.tokens);
            for (size_t i = 0; i < model.token_table.size(); ++i)
                model.token_table[i] -= learning_rate * grad.token_table[i];
            for (size_t i = 0; i < model.frame_projection.size(); ++i)
                model.frame_projection[i] -= learning_rate * grad.frame_projection[i];
        }
        const double loss = dataset_loss(model, items);
        if (!std::isfinite(loss))
            throw std::runtime_error("train_sft: diverged (non-finite mean loss) at epoch " +
                                     std::to_string(e + 1));
        result.trajectory.push_back(loss);
    }
    return result;
}

// Argmax chain from BOS; ties break toward the lowest token id; stops at the end
// token or max_len.
inline std::vector<int> greedy_decode(const ToyModel& model, const std::vector<double>& feature,
                                      int max_len) {
    if (max_len < 1) throw std::invalid_argument("greedy_decode: max_len must be >= 1");
    std::vector<int> out;
    int prev = model.bos_id;
    for (int step = 0; step < max_len; ++step) {
        const auto z = forward_logits(model, feature, prev);
        int best = 0;
        for (int v = 1; v < model.vocab_size; ++v)
            if (z[v] > z[best]) best = v;
        if (best == model.eos_id) break;
        out.push_back(best);
        prev = best;
    }
    return out;
}

// Seeded init with small uniform weights. Uses raw mt19937_64 output scaled to
// [-scale, scale) so the byte stream is identical across standard libraries.
inline void random_init(ToyModel& model, std::uint64_t seed, double scale = 0.01) {
    std::mt19937_64 rng(seed);
    auto next = [&] {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
        return (2.0 * u - 1.0) * scale;
    };
    for (auto& w : model.token_table) w = next();
    for (auto& w : model.frame_projection) w = next();
}

// Text checkpoint with hexfloat weights for exact round trips.
inline void save_checkpoint(const std::string& path, const ToyModel& model,
                            const std::vector<std::string>& vocab_words,
                            const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot write " + path);
    out << "toyckpt v1\n";
    out << "provenance " << provenance << "\n";
    out << "vocab_size " << model.vocab_size << "\n";
    out << "feature_dim " << model.feature_dim << "\n";
    out << "bos " << model.bos_id << " eos " << model.eos_id << "\n";
    char buf[64];
    auto dump_matrix = [&](const char* name, const std::vector<double>& m, int rows) {
        out << name << " " << rows << "\n";
        const int cols = model.vocab_size;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                std::snprintf(buf, sizeof(buf), "%a", m[static_cast<size_t>(r) * cols + c]);
                out << buf << (c + 1 == cols ? '\n' : ' ');
            }
        }
    };
    dump_matrix("token_table", model.token_table, model.vocab_size);
    dump_matrix("frame_projection", model.frame_projection, model.feature_dim);
    out << "vocab_words " << vocab_words.size() << "\n";
    for (const auto& w : vocab_words) out << w << "\n";
}

struct Checkpoint {
    ToyModel model;
    std::vector<std::string> vocab_words;
    std::string provenance;
};

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot read " + path);
    std::string line, word;
    std::getline(in, line);
    if (line != "toyckpt v1") throw std::runtime_error("load_checkpoint: bad magic in " + path);
    Checkpoint ck;
    std::getline(in, line);
    if (line.rfind("provenance ", 0) != 0) throw std::runtime_error("load_checkpoint: bad header");
    ck.provenance = line.substr(11);
    int vocab_size = 0, feature_dim = 0;
    in >> word >> vocab_size >> word >> feature_dim;
    in >> word >> ck.model.bos_id >> word >> ck.model.eos_id;
    ck.model.vocab_size = vocab_size;
    ck.model.feature_dim = feature_dim;
    auto read_matrix = [&](std::vector<double>& m, int rows) {
        int declared = 0;
        in >> word >> declared;
        if (declared != rows) throw std::runtime_error("load_checkpoint: shape mismatch");
        m.resize(static_cast<size_t>(rows) * vocab_size);
        for (auto& v : m) {
            in >> word;
            v = std::strtod(word.c_str(), nullptr);
        }
    };
    read_matrix(ck.model.token_table, vocab_size);
    read_matrix(ck.model.frame_projection, feature_dim);
    size_t n_words = 0;
    in >> word >> n_words;
    std::getline(in, line); // rest of count line
    ck.vocab_words.reserve(n_words);
    for (size_t i = 0; i < n_words; ++i) {
        std::getline(in, line);
        ck.vocab_words.push_back(line);
    }
    return ck;
}

} // namespace vista::toy
