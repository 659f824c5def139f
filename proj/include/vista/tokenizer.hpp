#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vista {

inline constexpr int kMaxTokenLength = 8192;

struct TokenSequence {
    std::vector<int> ids;
    bool truncated = false;

    int length() const { return static_cast<int>(ids.size()); }
};

// Whitespace tokenizer with byte fallback: reserved ids for BOS/EOS/newline, 256
// byte tokens, then words in first-appearance order. Unknown words decompose into
// their bytes, so tokenization is total over any input.
class Vocabulary {
public:
    static constexpr int kBosId = 0;
    static constexpr int kEosId = 1;
    static constexpr int kNewlineId = 2;
    static constexpr int kByteBase = 3;
    static constexpr int kWordBase = kByteBase + 256;

    Vocabulary() = default;

    explicit Vocabulary(const std::vector<std::string>& words) {
        for (const auto& w : words) add_word(w);
    }

    static Vocabulary build(const std::vector<std::string>& corpus) {
        Vocabulary v;
        for (const auto& text : corpus) {
            for_each_token(text, [&](std::string_view word, bool is_newline) {
                if (!is_newline) v.add_word(std::string(word));
            });
        }
        return v;
    }

    int add_word(const std::string& word) {
        auto it = index_.find(word);
        if (it != index_.end()) return it->second;
        const int id = kWordBase + static_cast<int>(words_.size());
        words_.push_back(word);
        index_[word] = id;
        return id;
    }

    int size() const { return kWordBase + static_cast<int>(words_.size()); }
    const std::vector<std::string>& words() const { return words_; }

    int word_id(std::string_view word) const {
        auto it = index_.find(std::string(word));
        return it == index_.end() ? -1 : it->second;
    }

    template <typename Fn>
    static void for_each_token(std::string_view text, Fn&& fn) {
        size_t start = std::string_view::npos;
        for (size_t i = 0; i <= text.size(); ++i) {
            const char c = i < text.size() ? text[i] : ' ';
            const bool ws = c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
            if (ws) {
                if (start != std::string_view::npos) {
                    fn(text.substr(start, i - start), false);
                    start = std::string_view::npos;
                }
                if (c == '\n') fn(std::string_view{}, true);
            } else if (start == std::string_view::npos) {
                start = i;
            }
        }
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;
};

// Sequences longer than the cap keep their head (scene text comes first) and set
// the truncation flag.
inline TokenSequence tokenize(std::string_view text, const Vocabulary& vocab) {
    if (text.empty()) throw std::invalid_argument("tokenize: empty text");
    TokenSequence seq;
    Vocabulary::for_each_token(text, [&](std::string_view word, bool is_newline) {
        if (is_newline) {
            seq.ids.push_back(Vocabulary::kNewlineId);
            return;
        }
        const int id = vocab.word_id(word);
        if (id >= 0) {
            seq.ids.push_back(id);
        } else {
            for (unsigned char b : word) seq.ids.push_back(Vocabulary::kByteBase + b);
        }
    });
    if (seq.ids.size() > static_cast<size_t>(kMaxTokenLength)) {
        seq.ids.resize(kMaxTokenLength);
        seq.truncated = true;
    }
    return seq;
}

inline std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
    std::string out;
    bool word_open = false; // inside a byte-assembled word
    auto separator = [&] {
        if (!out.empty() && out.back() != '\n') out.push_back(' ');
    };
    for (int id : seq.ids) {
        if (id == Vocabulary::kBosId || id == Vocabulary::kEosId) continue;
        if (id == Vocabulary::kNewlineId) {
            out.push_back('\n');
            word_open = false;
        } else if (id >= Vocabulary::kByteBase && id < Vocabulary::kWordBase) {
            if (!word_open) separator();
            out.push_back(static_cast<char>(id - Vocabulary::kByteBase));
            word_open = true;
        } else if (id >= Vocabulary::kWordBase) {
            const size_t idx = static_cast<size_t>(id - Vocabulary::kWordBase);
            if (idx >= vocab.words().size())
                throw std::out_of_range("detokenize: id beyond vocabulary");
            separator();
            out += vocab.words()[idx];
            word_open = false;
        } else {
            throw std::out_of_range("detokenize: negative id");
        }
    }
    return out;
}

} // namespace vista
