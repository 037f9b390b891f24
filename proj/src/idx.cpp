#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "eoslab/toy_nn.hpp"

namespace eoslab {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
    if (b.size() < off + 4) throw IdxError("truncated header", b.size());
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
           std::uint32_t{b[off + 3]};
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
    if (read_be32(bytes, 0) != kImageMagic) throw IdxError("bad image magic", 0);
    IdxImages img;
    img.count = read_be32(bytes, 4);
    img.rows = read_be32(bytes, 8);
    img.cols = read_be32(bytes, 12);
    const std::size_t need = img.count * img.rows * img.cols;
    if (bytes.size() - 16 < need) throw IdxError("truncated image data", bytes.size());
    img.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(need));
    return img;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    if (read_be32(bytes, 0) != kLabelMagic) throw IdxError("bad label magic", 0);
    const std::size_t count = read_be32(bytes, 4);
    if (bytes.size() - 8 < count) throw IdxError("truncated label data", bytes.size());
    return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<long>(count)};
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path, std::size_t subset_size,
                 std::uint64_t seed, std::size_t classes) {
    const auto img_bytes = slurp(images_path);
    const auto lbl_bytes = slurp(labels_path);
    const IdxImages img = parse_idx_images(img_bytes);
    const auto labels = parse_idx_labels(lbl_bytes);
    if (labels.size() != img.count)
        throw std::runtime_error("image count " + std::to_string(img.count) + " != label count " +
                                 std::to_string(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= classes) throw IdxError("label out of range", 8 + i);
    if (subset_size == 0 || subset_size > img.count)
        throw std::invalid_argument("subset size " + std::to_string(subset_size) + " not in [1, " +
                                    std::to_string(img.count) + "]");

    std::vector<std::size_t> order(img.count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (subset_size < img.count) {
        std::mt19937_64 rng(seed);
        // partial Fisher-Yates; std::shuffle's algorithm is implementation-defined
        for (std::size_t i = 0; i < subset_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (img.count - i));
            std::swap(order[i], order[j]);
        }
        order.resize(subset_size);
    }

    const std::size_t dim = img.rows * img.cols;
    Dataset d{Matrix(subset_size, dim), Matrix(subset_size, classes), "idx:" + images_path};
    for (std::size_t r = 0; r < subset_size; ++r) {
        const std::size_t src = order[r];
        for (std::size_t c = 0; c < dim; ++c) d.inputs(r, c) = img.pixels[src * dim + c] / 255.0;
        d.targets(r, labels[src]) = 1.0;
    }
    return d;
}

}  // namespace eoslab
