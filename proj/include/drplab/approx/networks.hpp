#pragma once

#include <array>
#include <string>

#include "drplab/approx/layers.hpp"
#include "drplab/scenario.hpp"

namespace drplab::approx {

enum class ExtractorKind { Mbtf, Mlp };

ExtractorKind extractor_kind_from_string(const std::string& name);
std::string to_string(ExtractorKind k);

// Fixed input scaling applied before the first layer; divides PV, price and
// satisfaction readings down to O(1) so the gates start in their active range.
struct ObsScales {
    double pv = 1.0;
    double price = 1.0;
    double sat = 10.0;
};

struct ExtractorSpec {
    ExtractorKind kind = ExtractorKind::Mbtf;
    RecurrentBranchSpec pv_branch{1, 16, 32};
    RecurrentBranchSpec dso_branch{1, 16, 32};
    DenseLayerSpec scalar_branch{8, 8, Act::Tanh};
    int fused_dim = 64;
    int mlp_hidden = 64;  // dense baseline only
    int seq_len = 32;     // window length of each market series
    ObsScales scales;

    int obs_len() const { return 2 * seq_len + 8; }
    int concat_dim() const {
        return pv_branch.hidden_dim + dso_branch.hidden_dim + scalar_branch.out_dim;
    }
};

// Spec with Table-like default sizes resized to the scenario's windows, and
// normalization scales taken from the scenario's market series.
ExtractorSpec make_extractor_spec(const Scenario& s, ExtractorKind kind,
                                  int lstm_hidden = 16, int fused_dim = 64,
                                  int scalar_hidden = 8);

// Two recurrent branches plus a scalar branch fused by one linear layer, or
// the flattened dense baseline; selected by spec.kind.
struct Extractor {
    ExtractorSpec spec;
    Lstm pv, dso;
    Dense scalar, fuse;
    Dense l1, l2;  // baseline path

    struct Ws {
        std::vector<double> norm;
        Lstm::Cache pv_cache, dso_cache;
        std::vector<double> concat;  // branch outputs back to back
        std::vector<double> feat;
        std::vector<double> dconcat;
        std::vector<double> h1;  // baseline hidden
        std::vector<double> dh1;
    };

    static Extractor build(Bundle& bundle, const std::string& prefix,
                           const ExtractorSpec& spec);
    void init(Bundle& bundle, Rng& rng) const;
    Ws make_ws() const;

    void forward(const double* theta, const double* obs_flat, Ws& ws) const;
    void backward(const double* theta, const Ws& ws, const double* dfeat, double* g) const;
};

struct ActorArch {
    ExtractorSpec espec;
    Extractor ex;
    Dense h1, h2, out;

    struct Ws {
        Extractor::Ws ex;
        std::vector<double> a1, a2, y;
        std::vector<double> da1, da2, dfeat;
    };

    static ActorArch build(const ExtractorSpec& spec, Bundle& bundle);
    void init(Bundle& bundle, Rng& rng) const;
    Ws make_ws() const;

    void forward(const double* theta, const double* obs_flat, Ws& ws,
                 std::array<double, 2>& action) const;
    void backward(const double* theta, const Ws& ws, const std::array<double, 2>& daction,
                  double* g) const;
};

struct CriticArch {
    ExtractorSpec espec;
    Extractor ex;
    Dense h1, h2, out;  // h1 takes [feat, action]

    struct Ws {
        Extractor::Ws ex;
        std::vector<double> cin, a1, a2, y;
        std::vector<double> da1, da2, dcin;
    };

    static CriticArch build(const ExtractorSpec& spec, Bundle& bundle);
    void init(Bundle& bundle, Rng& rng) const;
    Ws make_ws() const;

    double forward(const double* theta, const double* obs_flat,
                   const std::array<double, 2>& action, Ws& ws) const;
    // Full parameter gradients for dLoss/dq = dq.
    void backward_params(const double* theta, const Ws& ws, double dq, double* g) const;
    // Gradient of q with respect to the action inputs only (head layers).
    void backward_action(const double* theta, const Ws& ws, double dq,
                         std::array<double, 2>& daction) const;
};

}  // namespace drplab::approx
