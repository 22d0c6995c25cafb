#include "drplab/approx/networks.hpp"

#include <algorithm>
#include <cmath>

#include "drplab/util/errors.hpp"

namespace drplab::approx {

ExtractorKind extractor_kind_from_string(const std::string& name) {
    if (name == "mbtf") return ExtractorKind::Mbtf;
    if (name == "mlp") return ExtractorKind::Mlp;
    throw ValidationError("unknown extractor '" + name + "' (mbtf|mlp)");
}

std::string to_string(ExtractorKind k) { return k == ExtractorKind::Mbtf ? "mbtf" : "mlp"; }

ExtractorSpec make_extractor_spec(const Scenario& s, ExtractorKind kind, int lstm_hidden,
                                  int fused_dim, int scalar_hidden) {
    ExtractorSpec spec;
    spec.kind = kind;
    spec.seq_len = s.seq_len();
    spec.pv_branch = {1, lstm_hidden, spec.seq_len};
    spec.dso_branch = {1, lstm_hidden, spec.seq_len};
    spec.scalar_branch = {8, scalar_hidden, Act::Tanh};
    spec.fused_dim = fused_dim;
    spec.mlp_hidden = fused_dim;
    double pv_max = 1e-9, price_max = 1e-9;
    for (double v : s.market.pv) pv_max = std::max(pv_max, v);
    for (double v : s.market.dso_price) price_max = std::max(price_max, v);
    spec.scales.pv = pv_max;
    spec.scales.price = price_max;
    return spec;
}

// --- Extractor -------------------------------------------------------------

Extractor Extractor::build(Bundle& bundle, const std::string& prefix,
                           const ExtractorSpec& spec) {
    Extractor e;
    e.spec = spec;
    if (spec.kind == ExtractorKind::Mbtf) {
        e.pv = Lstm::make(bundle, prefix + "/pv_lstm", spec.pv_branch);
        e.dso = Lstm::make(bundle, prefix + "/dso_lstm", spec.dso_branch);
        e.scalar = Dense::make(bundle, prefix + "/scalar", spec.scalar_branch);
        e.fuse = Dense::make(bundle, prefix + "/fuse",
                             {spec.concat_dim(), spec.fused_dim, Act::Identity});
    } else {
        e.l1 = Dense::make(bundle, prefix + "/l1",
                           {spec.obs_len(), spec.mlp_hidden, Act::Relu});
        e.l2 = Dense::make(bundle, prefix + "/l2",
                           {spec.mlp_hidden, spec.fused_dim, Act::Identity});
    }
    return e;
}

void Extractor::init(Bundle& bundle, Rng& rng) const {
    if (spec.kind == ExtractorKind::Mbtf) {
        pv.init(bundle, rng);
        dso.init(bundle, rng);
        scalar.init(bundle, rng);
        fuse.init(bundle, rng);
    } else {
        l1.init(bundle, rng);
        l2.init(bundle, rng);
    }
}

Extractor::Ws Extractor::make_ws() const {
    Ws ws;
    ws.norm.resize(spec.obs_len());
    ws.feat.resize(spec.fused_dim);
    if (spec.kind == ExtractorKind::Mbtf) {
        ws.pv_cache.resize(spec.pv_branch);
        ws.dso_cache.resize(spec.dso_branch);
        ws.concat.resize(spec.concat_dim());
        ws.dconcat.resize(spec.concat_dim());
    } else {
        ws.h1.resize(spec.mlp_hidden);
        ws.dh1.resize(spec.mlp_hidden);
    }
    return ws;
}

void Extractor::forward(const double* theta, const double* obs_flat, Ws& ws) const {
    const int L = spec.seq_len;
    for (int j = 0; j < L; ++j) ws.norm[j] = obs_flat[j] / spec.scales.pv;
    for (int j = 0; j < L; ++j) ws.norm[L + j] = obs_flat[L + j] / spec.scales.price;
    ws.norm[2 * L] = obs_flat[2 * L] / spec.scales.sat;
    for (int j = 1; j < 8; ++j) ws.norm[2 * L + j] = obs_flat[2 * L + j];

    if (spec.kind == ExtractorKind::Mbtf) {
        const int hp = spec.pv_branch.hidden_dim;
        const int hd = spec.dso_branch.hidden_dim;
        pv.forward(theta, ws.norm.data(), ws.pv_cache, ws.concat.data());
        dso.forward(theta, ws.norm.data() + L, ws.dso_cache, ws.concat.data() + hp);
        scalar.forward(theta, ws.norm.data() + 2 * L, ws.concat.data() + hp + hd);
        fuse.forward(theta, ws.concat.data(), ws.feat.data());
    } else {
        l1.forward(theta, ws.norm.data(), ws.h1.data());
        l2.forward(theta, ws.h1.data(), ws.feat.data());
    }
}

void Extractor::backward(const double* theta, const Ws& ws, const double* dfeat,
                         double* g) const {
    if (spec.kind == ExtractorKind::Mbtf) {
        const int hp = spec.pv_branch.hidden_dim;
        const int hd = spec.dso_branch.hidden_dim;
        const int L = spec.seq_len;
        auto& dconcat = const_cast<std::vector<double>&>(ws.dconcat);
        fuse.backward(theta, ws.concat.data(), ws.feat.data(), dfeat, dconcat.data(), g);
        pv.backward(theta, ws.pv_cache, dconcat.data(), g);
        dso.backward(theta, ws.dso_cache, dconcat.data() + hp, g);
        scalar.backward(theta, ws.norm.data() + 2 * L, ws.concat.data() + hp + hd,
                        dconcat.data() + hp + hd, nullptr, g);
    } else {
        auto& dh1 = const_cast<std::vector<double>&>(ws.dh1);
        l2.backward(theta, ws.h1.data(), ws.feat.data(), dfeat, dh1.data(), g);
        l1.backward(theta, ws.norm.data(), ws.h1.data(), dh1.data(), nullptr, g);
    }
}

// --- ActorArch ---------------------------------------------------------------

ActorArch ActorArch::build(const ExtractorSpec& spec, Bundle& bundle) {
    ActorArch a;
    a.espec = spec;
    a.ex = Extractor::build(bundle, "actor/ex", spec);
    a.h1 = Dense::make(bundle, "actor/h1", {spec.fused_dim, 64, Act::Relu});
    a.h2 = Dense::make(bundle, "actor/h2", {64, 64, Act::Relu});
    a.out = Dense::make(bundle, "actor/out", {64, 2, Act::Tanh});
    return a;
}

void ActorArch::init(Bundle& bundle, Rng& rng) const {
    ex.init(bundle, rng);
    h1.init(bundle, rng);
    h2.init(bundle, rng);
    out.init(bundle, rng);
}

ActorArch::Ws ActorArch::make_ws() const {
    Ws ws;
    ws.ex = ex.make_ws();
    ws.a1.resize(64);
    ws.a2.resize(64);
    ws.y.resize(2);
    ws.da1.resize(64);
    ws.da2.resize(64);
    ws.dfeat.resize(espec.fused_dim);
    return ws;
}

void ActorArch::forward(const double* theta, const double* obs_flat, Ws& ws,
                        std::array<double, 2>& action) const {
    ex.forward(theta, obs_flat, ws.ex);
    h1.forward(theta, ws.ex.feat.data(), ws.a1.data());
    h2.forward(theta, ws.a1.data(), ws.a2.data());
    out.forward(theta, ws.a2.data(), ws.y.data());
    action[0] = ws.y[0];
    action[1] = ws.y[1];
}

void ActorArch::backward(const double* theta, const Ws& ws,
                         const std::array<double, 2>& daction, double* g) const {
    auto& da2 = const_cast<std::vector<double>&>(ws.da2);
    auto& da1 = const_cast<std::vector<double>&>(ws.da1);
    auto& dfeat = const_cast<std::vector<double>&>(ws.dfeat);
    out.backward(theta, ws.a2.data(), ws.y.data(), daction.data(), da2.data(), g);
    h2.backward(theta, ws.a1.data(), ws.a2.data(), da2.data(), da1.data(), g);
    h1.backward(theta, ws.ex.feat.data(), ws.a1.data(), da1.data(), dfeat.data(), g);
    ex.backward(theta, ws.ex, dfeat.data(), g);
}

// --- CriticArch ----------------------------------------------------------------

CriticArch CriticArch::build(const ExtractorSpec& spec, Bundle& bundle) {
    CriticArch c;
    c.espec = spec;
    c.ex = Extractor::build(bundle, "critic/ex", spec);
    c.h1 = Dense::make(bundle, "critic/h1", {spec.fused_dim + 2, 64, Act::Relu});
    c.h2 = Dense::make(bundle, "critic/h2", {64, 64, Act::Relu});
    c.out = Dense::make(bundle, "critic/out", {64, 1, Act::Identity});
    return c;
}

void CriticArch::init(Bundle& bundle, Rng& rng) const {
    ex.init(bundle, rng);
    h1.init(bundle, rng);
    h2.init(bundle, rng);
    out.init(bundle, rng);
}

CriticArch::Ws CriticArch::make_ws() const {
    Ws ws;
    ws.ex = ex.make_ws();
    ws.cin.resize(espec.fused_dim + 2);
    ws.a1.resize(64);
    ws.a2.resize(64);
    ws.y.resize(1);
    ws.da1.resize(64);
    ws.da2.resize(64);
    ws.dcin.resize(espec.fused_dim + 2);
    return ws;
}

double CriticArch::forward(const double* theta, const double* obs_flat,
                           const std::array<double, 2>& action, Ws& ws) const {
    ex.forward(theta, obs_flat, ws.ex);
    std::copy(ws.ex.feat.begin(), ws.ex.feat.end(), ws.cin.begin());
    ws.cin[espec.fused_dim] = action[0];
    ws.cin[espec.fused_dim + 1] = action[1];
    h1.forward(theta, ws.cin.data(), ws.a1.data());
    h2.forward(theta, ws.a1.data(), ws.a2.data());
    out.forward(theta, ws.a2.data(), ws.y.data());
    return ws.y[0];
}

void CriticArch::backward_params(const double* theta, const Ws& ws, double dq,
                                 double* g) const {
    auto& da2 = const_cast<std::vector<double>&>(ws.da2);
    auto& da1 = const_cast<std::vector<double>&>(ws.da1);
    auto& dcin = const_cast<std::vector<double>&>(ws.dcin);
    const double dy[1] = {dq};
    out.backward(theta, ws.a2.data(), ws.y.data(), dy, da2.data(), g);
    h2.backward(theta, ws.a1.data(), ws.a2.data(), da2.data(), da1.data(), g);
    h1.backward(theta, ws.cin.data(), ws.a1.data(), da1.data(), dcin.data(), g);
    ex.backward(theta, ws.ex, dcin.data(), g);
}

void CriticArch::backward_action(const double* theta, const Ws& ws, double dq,
                                 std::array<double, 2>& daction) const {
    auto& da2 = const_cast<std::vector<double>&>(ws.da2);
    auto& da1 = const_cast<std::vector<double>&>(ws.da1);
    auto& dcin = const_cast<std::vector<double>&>(ws.dcin);
    const double dy[1] = {dq};
    out.backward_input_only(theta, ws.a2.data(), ws.y.data(), dy, da2.data());
    h2.backward_input_only(theta, ws.a1.data(), ws.a2.data(), da2.data(), da1.data());
    h1.backward_input_only(theta, ws.cin.data(), ws.a1.data(), da1.data(), dcin.data());
    daction[0] = dcin[espec.fused_dim];
    daction[1] = dcin[espec.fused_dim + 1];
}

}  // namespace drplab::approx
