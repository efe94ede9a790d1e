#pragma once

#include <span>
#include <string>
#include <vector>

#include "gasil/rng.hpp"

namespace gasil {

// Fully-connected network with tanh hidden activations and a linear output
// layer. Gradients are computed by manual backpropagation; parameters are
// exposed as a single flat vector so one optimizer state covers the whole net.
class MlpNetwork {
public:
    struct Layer {
        int in = 0;
        int out = 0;
        std::vector<double> weights;  // out x in, row-major
        std::vector<double> biases;   // out
    };

    // Activation record produced by forward(); consumed by backward().
    // activations[0] is the input, activations[l] the post-tanh output of
    // hidden layer l, and activations.back() the linear output.
    struct ForwardCache {
        std::vector<std::vector<double>> activations;
    };

    explicit MlpNetwork(std::vector<int> layer_sizes);

    // Orthogonal-style init: hidden layers gain sqrt(2), output layer
    // `output_gain`, biases zero.
    static MlpNetwork initialized(std::vector<int> layer_sizes, double output_gain, Rng& rng);

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    const std::vector<int>& layer_sizes() const { return sizes_; }
    std::size_t param_count() const { return param_count_; }

    std::vector<double> forward(std::span<const double> input, ForwardCache* cache = nullptr) const;

    // Gradient of a scalar loss w.r.t. all parameters given its gradient
    // w.r.t. the network output. Accumulates into `param_grad` (length
    // param_count()). Returns nothing; use backward() for the allocating form.
    void backward_accumulate(const ForwardCache& cache, std::span<const double> output_grad,
                             std::span<double> param_grad) const;
    std::vector<double> backward(const ForwardCache& cache, std::span<const double> output_grad) const;

    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }

private:
    std::vector<int> sizes_;
    std::vector<Layer> layers_;
    std::size_t param_count_ = 0;
};

// Checkpoint file: "GASIL1" magic, int32 layer count, layer sizes (int32 LE),
// int32 extra-parameter count, then all parameters as float64 LE in layer
// order (weights row-major, then biases), extras (the policy log_std) last.
void save_checkpoint(const std::string& path, const MlpNetwork& net,
                     std::span<const double> extra_params = {});
MlpNetwork load_checkpoint(const std::string& path, std::vector<double>* extra_params = nullptr);

}  // namespace gasil
