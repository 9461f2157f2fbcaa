#include "tagirl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace tagirl {

namespace {

constexpr std::size_t kMagicSize = sizeof(kCheckpointMagic) - 1;

class Writer {
  public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) bytes_.push_back((v >> (8 * k)) & 0xffu);
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
        }
    }
    void f64s(const std::vector<double>& vs) {
        for (double v : vs) f64(v);
    }
    void raw(const char* data, std::size_t n) {
        bytes_.insert(bytes_.end(), data, data + n);
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

  private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
  public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * k);
        }
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) {
            bits |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * k);
        }
        return std::bit_cast<double>(bits);
    }
    std::vector<double> f64s(std::size_t n) {
        need(n * 8);
        std::vector<double> out(n);
        for (auto& v : out) v = f64();
        return out;
    }
    bool match(const char* data, std::size_t n) {
        need(n);
        const bool ok = std::memcmp(bytes_.data() + pos_, data, n) == 0;
        pos_ += n;
        return ok;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

  private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw CheckpointError("checkpoint is truncated");
        }
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const NetworkParameters& params) {
    Writer w;
    w.raw(kCheckpointMagic, kMagicSize);
    w.u32(static_cast<std::uint32_t>(params.layer_count()));
    for (const auto& layer : params.layers()) {
        w.u32(static_cast<std::uint32_t>(layer.spec.input_width));
        w.u32(static_cast<std::uint32_t>(layer.spec.output_width));
        w.u8(static_cast<std::uint8_t>(layer.spec.activation));
    }
    for (const auto& layer : params.layers()) {
        w.f64s(layer.weight_means);
        w.f64s(layer.weight_variances);
        w.f64s(layer.bias_means);
        w.f64s(layer.bias_variances);
    }
    return w.take();
}

NetworkParameters decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (!r.match(kCheckpointMagic, kMagicSize)) {
        throw CheckpointError("not a TAGI1 checkpoint (bad magic)");
    }
    const std::uint32_t count = r.u32();
    if (count == 0) throw CheckpointError("checkpoint has no layers");
    std::vector<LayerSpec> specs(count);
    for (auto& spec : specs) {
        spec.input_width = r.u32();
        spec.output_width = r.u32();
        const std::uint8_t act = r.u8();
        if (act > static_cast<std::uint8_t>(Activation::identity)) {
            throw CheckpointError("checkpoint has unknown activation code " +
                                  std::to_string(act));
        }
        spec.activation = static_cast<Activation>(act);
    }
    std::vector<LayerParameters> layers;
    layers.reserve(count);
    for (const auto& spec : specs) {
        LayerParameters layer;
        layer.spec = spec;
        const std::size_t nw = spec.input_width * spec.output_width;
        layer.weight_means = r.f64s(nw);
        layer.weight_variances = r.f64s(nw);
        layer.bias_means = r.f64s(spec.output_width);
        layer.bias_variances = r.f64s(spec.output_width);
        layers.push_back(std::move(layer));
    }
    if (!r.at_end()) {
        throw CheckpointError("checkpoint has trailing bytes");
    }
    try {
        return NetworkParameters(std::move(layers));
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("invalid checkpoint: ") + e.what());
    }
}

void save_checkpoint(const NetworkParameters& params,
                     const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(params);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw CheckpointError("cannot open '" + path.string() +
                              "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw CheckpointError("failed writing '" + path.string() + "'");
    }
}

NetworkParameters load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace tagirl
