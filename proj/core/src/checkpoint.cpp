#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tokparity/neural_lm.hpp"

namespace tokparity {

namespace {

void write_f32_le(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) {
        const auto f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        const unsigned char bytes[4] = {
            static_cast<unsigned char>(bits & 0xFF),
            static_cast<unsigned char>((bits >> 8) & 0xFF),
            static_cast<unsigned char>((bits >> 16) & 0xFF),
            static_cast<unsigned char>((bits >> 24) & 0xFF),
        };
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
}

void read_f32_le(std::istream& in, std::vector<double>& values, std::size_t count) {
    values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned char bytes[4];
        in.read(reinterpret_cast<char*>(bytes), 4);
        if (!in) throw std::runtime_error("checkpoint binary is truncated");
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                                   (static_cast<std::uint32_t>(bytes[1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[3]) << 24);
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        values[i] = static_cast<double>(f);
    }
}

}  // namespace

void save_checkpoint(const NeuralLm& lm, const std::string& base_path) {
    const auto v = lm.vocab_size_;
    const auto d = static_cast<std::size_t>(lm.config_.embed_dim);
    const auto w = static_cast<std::size_t>(lm.config_.context_window);
    const auto h = static_cast<std::size_t>(lm.config_.hidden_dim);

    nlohmann::json sidecar;
    sidecar["format"] = "tokparity-nlm-f32le-v1";
    sidecar["vocab_size"] = v;
    sidecar["embed_dim"] = d;
    sidecar["context_window"] = w;
    sidecar["hidden_dim"] = h;
    sidecar["seed"] = lm.config_.seed;
    sidecar["mode"] = lm.last_train_mode_;
    std::size_t offset = 0;
    auto tensor = [&offset](const char* name, std::size_t rows, std::size_t cols) {
        nlohmann::json t{{"name", name}, {"rows", rows}, {"cols", cols}, {"offset", offset}};
        offset += rows * cols;
        return t;
    };
    sidecar["tensors"] = nlohmann::json::array({
        tensor("embedding", v, d),
        tensor("hidden_weight", h, w * d),
        tensor("hidden_bias", 1, h),
        tensor("output_weight", v, h),
        tensor("output_bias", 1, v),
    });

    std::ofstream bin(base_path + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write checkpoint: " + base_path + ".bin");
    write_f32_le(bin, lm.embedding_);
    write_f32_le(bin, lm.w1_);
    write_f32_le(bin, lm.b1_);
    write_f32_le(bin, lm.w2_);
    write_f32_le(bin, lm.b2_);

    std::ofstream js(base_path + ".json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write checkpoint sidecar: " + base_path + ".json");
    js << sidecar.dump(2) << '\n';
}

NeuralLm load_checkpoint(const std::string& base_path) {
    std::ifstream js(base_path + ".json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot open checkpoint sidecar: " + base_path + ".json");
    nlohmann::json sidecar = nlohmann::json::parse(js);
    if (sidecar.at("format").get<std::string>() != "tokparity-nlm-f32le-v1")
        throw std::runtime_error("unknown checkpoint format");

    NeuralLm lm;
    lm.vocab_size_ = sidecar.at("vocab_size").get<std::size_t>();
    lm.config_.embed_dim = sidecar.at("embed_dim").get<int>();
    lm.config_.context_window = sidecar.at("context_window").get<int>();
    lm.config_.hidden_dim = sidecar.at("hidden_dim").get<int>();
    lm.config_.seed = sidecar.at("seed").get<std::uint64_t>();
    lm.last_train_mode_ = sidecar.at("mode").get<std::string>();

    const auto v = lm.vocab_size_;
    const auto d = static_cast<std::size_t>(lm.config_.embed_dim);
    const auto w = static_cast<std::size_t>(lm.config_.context_window);
    const auto h = static_cast<std::size_t>(lm.config_.hidden_dim);

    std::ifstream bin(base_path + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open checkpoint: " + base_path + ".bin");
    read_f32_le(bin, lm.embedding_, v * d);
    read_f32_le(bin, lm.w1_, h * w * d);
    read_f32_le(bin, lm.b1_, h);
    read_f32_le(bin, lm.w2_, v * h);
    read_f32_le(bin, lm.b2_, v);
    char extra;
    if (bin.read(&extra, 1))
        throw std::runtime_error("checkpoint binary has trailing bytes");
    return lm;
}

}  // namespace tokparity
