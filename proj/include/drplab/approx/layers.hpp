#pragma once

#include <string>
#include <vector>

#include "drplab/approx/bundle.hpp"
#include "drplab/util/rng.hpp"

namespace drplab::approx {

enum class Act { Tanh, Relu, Identity };

struct DenseLayerSpec {
    int in_dim = 1;
    int out_dim = 1;
    Act activation = Act::Identity;
};

struct RecurrentBranchSpec {
    int input_dim = 1;
    int hidden_dim = 16;
    int sequence_len = 32;
};

// Fully connected layer whose parameters live at fixed offsets of a Bundle.
// forward caches the activated output; backward consumes it together with
// the cached input. Gradients go to `g`, a flat vector congruent with the
// bundle; `dx` may be null when input gradients are not needed.
struct Dense {
    DenseLayerSpec spec;
    std::size_t w = 0;  // out x in, row-major
    std::size_t b = 0;

    static Dense make(Bundle& bundle, const std::string& prefix, const DenseLayerSpec& spec);

    void init(Bundle& bundle, Rng& rng) const;
    void forward(const double* theta, const double* x, double* y) const;
    void backward(const double* theta, const double* x, const double* y, const double* dy,
                  double* dx, double* g) const;
    // Input gradient without parameter gradients; the actor's path through a
    // frozen critic.
    void backward_input_only(const double* theta, const double* x, const double* y,
                             const double* dy, double* dx) const;
};

// Single-layer gated recurrence (input/forget/output gates, tanh candidate).
// Gate order in the stacked weight rows is i, f, g, o. Only the final hidden
// state leaves the branch; backward runs truncation-free through every step.
struct Lstm {
    RecurrentBranchSpec spec;
    std::size_t wx = 0;  // 4H x in
    std::size_t wh = 0;  // 4H x H
    std::size_t b = 0;   // 4H

    struct Cache {
        // seq x H each; x is seq x in
        std::vector<double> x, gi, gf, gg, go, c, tc, h;
        void resize(const RecurrentBranchSpec& s);
    };

    static Lstm make(Bundle& bundle, const std::string& prefix,
                     const RecurrentBranchSpec& spec);

    void init(Bundle& bundle, Rng& rng) const;  // forget-gate bias starts at 1
    void forward(const double* theta, const double* x_seq, Cache& cache,
                 double* h_final) const;
    void backward(const double* theta, const Cache& cache, const double* dh_final,
                  double* g) const;
};

}  // namespace drplab::approx
