#include "gasil/mlp.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "gasil/errors.hpp"

namespace gasil {

MlpNetwork::MlpNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw DimensionError("MlpNetwork needs at least input and output sizes");
    for (int s : sizes_) {
        if (s <= 0) throw DimensionError("layer sizes must be positive");
    }
    layers_.reserve(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        Layer layer;
        layer.in = sizes_[l];
        layer.out = sizes_[l + 1];
        layer.weights.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
        layer.biases.assign(layer.out, 0.0);
        param_count_ += layer.weights.size() + layer.biases.size();
        layers_.push_back(std::move(layer));
    }
}

namespace {

// Random matrix with orthonormal rows or columns (whichever fits), scaled by
// `gain`. Gram-Schmidt over the smaller dimension.
void orthogonal_fill(std::vector<double>& w, int rows, int cols, double gain, Rng& rng) {
    const int big = std::max(rows, cols);
    const int small = std::min(rows, cols);
    // columns of a (big x small) matrix, stored column-by-column
    std::vector<std::vector<double>> basis(small, std::vector<double>(big));
    for (auto& col : basis)
        for (auto& v : col) v = rng.normal();
    for (int j = 0; j < small; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < big; ++i) dot += basis[j][i] * basis[k][i];
            for (int i = 0; i < big; ++i) basis[j][i] -= dot * basis[k][i];
        }
        double norm = 0.0;
        for (double v : basis[j]) norm += v * v;
        norm = std::sqrt(norm);
        if (norm < 1e-12) norm = 1.0;  // astronomically unlikely; keep finite
        for (auto& v : basis[j]) v /= norm;
    }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            w[static_cast<std::size_t>(r) * cols + c] =
                gain * (rows >= cols ? basis[c][r] : basis[r][c]);
}

}  // namespace

MlpNetwork MlpNetwork::initialized(std::vector<int> layer_sizes, double output_gain, Rng& rng) {
    MlpNetwork net(std::move(layer_sizes));
    const std::size_t last = net.layers_.size() - 1;
    for (std::size_t l = 0; l < net.layers_.size(); ++l) {
        auto& layer = net.layers_[l];
        const double gain = (l == last) ? output_gain : std::sqrt(2.0);
        orthogonal_fill(layer.weights, layer.out, layer.in, gain, rng);
    }
    return net;
}

std::vector<double> MlpNetwork::forward(std::span<const double> input, ForwardCache* cache) const {
    if (static_cast<int>(input.size()) != input_dim())
        throw DimensionError("forward: input length " + std::to_string(input.size()) +
                             " does not match first layer size " + std::to_string(input_dim()));
    if (cache) {
        cache->activations.clear();
        cache->activations.emplace_back(input.begin(), input.end());
    }
    std::vector<double> current(input.begin(), input.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        next.assign(layer.out, 0.0);
        for (int r = 0; r < layer.out; ++r) {
            const double* wrow = layer.weights.data() + static_cast<std::size_t>(r) * layer.in;
            double acc = layer.biases[r];
            for (int c = 0; c < layer.in; ++c) acc += wrow[c] * current[c];
            next[r] = acc;
        }
        if (l + 1 < layers_.size()) {
            for (auto& v : next) v = std::tanh(v);
        }
        if (cache) cache->activations.push_back(next);
        current.swap(next);
    }
    return current;
}

void MlpNetwork::backward_accumulate(const ForwardCache& cache, std::span<const double> output_grad,
                                     std::span<double> param_grad) const {
    if (cache.activations.size() != layers_.size() + 1)
        throw DimensionError("backward: cache does not match network depth");
    for (std::size_t l = 0; l <= layers_.size(); ++l) {
        const int expect = sizes_[l];
        if (static_cast<int>(cache.activations[l].size()) != expect)
            throw DimensionError("backward: stale cache, activation shape mismatch");
    }
    if (static_cast<int>(output_grad.size()) != output_dim())
        throw DimensionError("backward: output gradient length mismatch");
    if (param_grad.size() != param_count_)
        throw DimensionError("backward: parameter gradient length mismatch");

    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> prev_delta;
    // walk layer offsets from the back
    std::vector<std::size_t> offsets(layers_.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        offsets[l] = off;
        off += layers_[l].weights.size() + layers_[l].biases.size();
    }
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto& layer = layers_[li];
        const auto& below = cache.activations[li];  // input to this layer
        double* wgrad = param_grad.data() + offsets[li];
        double* bgrad = wgrad + layer.weights.size();
        for (int r = 0; r < layer.out; ++r) {
            const double d = delta[r];
            bgrad[r] += d;
            double* wg = wgrad + static_cast<std::size_t>(r) * layer.in;
            for (int c = 0; c < layer.in; ++c) wg[c] += d * below[c];
        }
        if (li == 0) break;
        prev_delta.assign(layer.in, 0.0);
        for (int r = 0; r < layer.out; ++r) {
            const double d = delta[r];
            const double* wrow = layer.weights.data() + static_cast<std::size_t>(r) * layer.in;
            for (int c = 0; c < layer.in; ++c) prev_delta[c] += d * wrow[c];
        }
        // chain through tanh: activation stored post-tanh
        for (int c = 0; c < layer.in; ++c) {
            const double h = below[c];
            prev_delta[c] *= 1.0 - h * h;
        }
        delta.swap(prev_delta);
    }
}

std::vector<double> MlpNetwork::backward(const ForwardCache& cache,
                                         std::span<const double> output_grad) const {
    std::vector<double> grad(param_count_, 0.0);
    backward_accumulate(cache, output_grad, grad);
    return grad;
}

std::vector<double> MlpNetwork::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count_);
    for (const auto& layer : layers_) {
        flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
        flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
    }
    return flat;
}

void MlpNetwork::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count_) throw DimensionError("unflatten: wrong parameter count");
    std::size_t off = 0;
    for (auto& layer : layers_) {
        std::memcpy(layer.weights.data(), flat.data() + off, layer.weights.size() * sizeof(double));
        off += layer.weights.size();
        std::memcpy(layer.biases.data(), flat.data() + off, layer.biases.size() * sizeof(double));
        off += layer.biases.size();
    }
}

namespace {

constexpr char kMagic[6] = {'G', 'A', 'S', 'I', 'L', '1'};

void write_i32(std::ostream& out, std::int32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::int32_t read_i32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return static_cast<std::int32_t>(v);
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const MlpNetwork& net,
                     std::span<const double> extra_params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_i32(out, static_cast<std::int32_t>(net.layer_sizes().size()));
    for (int s : net.layer_sizes()) write_i32(out, s);
    write_i32(out, static_cast<std::int32_t>(extra_params.size()));
    for (double v : net.flatten()) write_f64(out, v);
    for (double v : extra_params) write_f64(out, v);
    if (!out) throw IoError("write failed: " + path);
}

MlpNetwork load_checkpoint(const std::string& path, std::vector<double>* extra_params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, kMagic, 6) != 0)
        throw IoError("bad checkpoint magic: " + path);
    const std::int32_t n_sizes = read_i32(in);
    if (n_sizes < 2 || n_sizes > 64) throw IoError("corrupt checkpoint header: " + path);
    std::vector<int> sizes(n_sizes);
    for (auto& s : sizes) s = read_i32(in);
    const std::int32_t n_extra = read_i32(in);
    MlpNetwork net(sizes);
    std::vector<double> flat(net.param_count());
    for (auto& v : flat) v = read_f64(in);
    net.unflatten(flat);
    std::vector<double> extra(n_extra);
    for (auto& v : extra) v = read_f64(in);
    if (!in) throw IoError("truncated checkpoint: " + path);
    if (extra_params) *extra_params = std::move(extra);
    return net;
}

}  // namespace gasil
