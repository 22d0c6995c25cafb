#include "drplab/approx/layers.hpp"

#include <cmath>

namespace drplab::approx {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double uniform_init(Rng& rng, double bound) { return rng.uniform(-bound, bound); }

}  // namespace

// --- Dense ---------------------------------------------------------------

Dense Dense::make(Bundle& bundle, const std::string& prefix, const DenseLayerSpec& spec) {
    Dense d;
    d.spec = spec;
    d.w = bundle.add(prefix + "/w", spec.out_dim, spec.in_dim);
    d.b = bundle.add(prefix + "/b", spec.out_dim, 1);
    return d;
}

void Dense::init(Bundle& bundle, Rng& rng) const {
    double bound = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
    for (int i = 0; i < spec.out_dim * spec.in_dim; ++i)
        bundle.value[w + i] = uniform_init(rng, bound);
    for (int i = 0; i < spec.out_dim; ++i) bundle.value[b + i] = uniform_init(rng, bound);
}

void Dense::forward(const double* theta, const double* x, double* y) const {
    const double* W = theta + w;
    const double* B = theta + b;
    for (int o = 0; o < spec.out_dim; ++o) {
        double acc = B[o];
        const double* row = W + static_cast<std::size_t>(o) * spec.in_dim;
        for (int i = 0; i < spec.in_dim; ++i) acc += row[i] * x[i];
        switch (spec.activation) {
            case Act::Tanh: y[o] = std::tanh(acc); break;
            case Act::Relu: y[o] = acc > 0.0 ? acc : 0.0; break;
            case Act::Identity: y[o] = acc; break;
        }
    }
}

void Dense::backward(const double* theta, const double* x, const double* y,
                     const double* dy, double* dx, double* g) const {
    const double* W = theta + w;
    if (dx)
        for (int i = 0; i < spec.in_dim; ++i) dx[i] = 0.0;
    for (int o = 0; o < spec.out_dim; ++o) {
        double dz = dy[o];
        switch (spec.activation) {
            case Act::Tanh: dz *= 1.0 - y[o] * y[o]; break;
            case Act::Relu: dz = y[o] > 0.0 ? dz : 0.0; break;
            case Act::Identity: break;
        }
        const std::size_t row = static_cast<std::size_t>(o) * spec.in_dim;
        double* gw = g + w + row;
        const double* wrow = W + row;
        for (int i = 0; i < spec.in_dim; ++i) {
            gw[i] += dz * x[i];
            if (dx) dx[i] += dz * wrow[i];
        }
        g[b + o] += dz;
    }
}

void Dense::backward_input_only(const double* theta, const double* x, const double* y,
                                const double* dy, double* dx) const {
    (void)x;
    const double* W = theta + w;
    for (int i = 0; i < spec.in_dim; ++i) dx[i] = 0.0;
    for (int o = 0; o < spec.out_dim; ++o) {
        double dz = dy[o];
        switch (spec.activation) {
            case Act::Tanh: dz *= 1.0 - y[o] * y[o]; break;
            case Act::Relu: dz = y[o] > 0.0 ? dz : 0.0; break;
            case Act::Identity: break;
        }
        const double* wrow = W + static_cast<std::size_t>(o) * spec.in_dim;
        for (int i = 0; i < spec.in_dim; ++i) dx[i] += dz * wrow[i];
    }
}

// --- Lstm ----------------------------------------------------------------

void Lstm::Cache::resize(const RecurrentBranchSpec& s) {
    std::size_t n = static_cast<std::size_t>(s.sequence_len) * s.hidden_dim;
    x.resize(static_cast<std::size_t>(s.sequence_len) * s.input_dim);
    gi.resize(n);
    gf.resize(n);
    gg.resize(n);
    go.resize(n);
    c.resize(n);
    tc.resize(n);
    h.resize(n);
}

Lstm Lstm::make(Bundle& bundle, const std::string& prefix, const RecurrentBranchSpec& spec) {
    Lstm l;
    l.spec = spec;
    l.wx = bundle.add(prefix + "/wx", 4 * spec.hidden_dim, spec.input_dim);
    l.wh = bundle.add(prefix + "/wh", 4 * spec.hidden_dim, spec.hidden_dim);
    l.b = bundle.add(prefix + "/b", 4 * spec.hidden_dim, 1);
    return l;
}

void Lstm::init(Bundle& bundle, Rng& rng) const {
    const int H = spec.hidden_dim;
    double bound = 1.0 / std::sqrt(static_cast<double>(spec.input_dim + H));
    for (int i = 0; i < 4 * H * spec.input_dim; ++i)
        bundle.value[wx + i] = uniform_init(rng, bound);
    for (int i = 0; i < 4 * H * H; ++i) bundle.value[wh + i] = uniform_init(rng, bound);
    for (int i = 0; i < 4 * H; ++i) bundle.value[b + i] = uniform_init(rng, bound);
    for (int i = 0; i < H; ++i) bundle.value[b + H + i] = 1.0;  // forget gate
}

void Lstm::forward(const double* theta, const double* x_seq, Cache& cache,
                   double* h_final) const {
    const int H = spec.hidden_dim;
    const int I = spec.input_dim;
    const double* Wx = theta + wx;
    const double* Wh = theta + wh;
    const double* B = theta + b;
    std::vector<double> z(4 * H);

    for (int t = 0; t < spec.sequence_len; ++t) {
        const double* xt = x_seq + static_cast<std::size_t>(t) * I;
        const double* h_prev = t > 0 ? cache.h.data() + static_cast<std::size_t>(t - 1) * H
                                     : nullptr;
        const double* c_prev = t > 0 ? cache.c.data() + static_cast<std::size_t>(t - 1) * H
                                     : nullptr;
        for (int r = 0; r < 4 * H; ++r) {
            double acc = B[r];
            const double* wx_row = Wx + static_cast<std::size_t>(r) * I;
            for (int i = 0; i < I; ++i) acc += wx_row[i] * xt[i];
            if (h_prev) {
                const double* wh_row = Wh + static_cast<std::size_t>(r) * H;
                for (int j = 0; j < H; ++j) acc += wh_row[j] * h_prev[j];
            }
            z[r] = acc;
        }
        const std::size_t at = static_cast<std::size_t>(t) * H;
        for (int j = 0; j < H; ++j) {
            double i_g = sigmoid(z[j]);
            double f_g = sigmoid(z[H + j]);
            double g_c = std::tanh(z[2 * H + j]);
            double o_g = sigmoid(z[3 * H + j]);
            double c_new = (c_prev ? f_g * c_prev[j] : 0.0) + i_g * g_c;
            double tc_new = std::tanh(c_new);
            cache.gi[at + j] = i_g;
            cache.gf[at + j] = f_g;
            cache.gg[at + j] = g_c;
            cache.go[at + j] = o_g;
            cache.c[at + j] = c_new;
            cache.tc[at + j] = tc_new;
            cache.h[at + j] = o_g * tc_new;
        }
        for (int i = 0; i < I; ++i) cache.x[static_cast<std::size_t>(t) * I + i] = xt[i];
    }
    const std::size_t last = static_cast<std::size_t>(spec.sequence_len - 1) * H;
    for (int j = 0; j < H; ++j) h_final[j] = cache.h[last + j];
}

void Lstm::backward(const double* theta, const Cache& cache, const double* dh_final,
                    double* g) const {
    const int H = spec.hidden_dim;
    const int I = spec.input_dim;
    const double* Wh = theta + wh;

    std::vector<double> dh(H), dc(H, 0.0), dz(4 * H), dh_next(H, 0.0);
    for (int j = 0; j < H; ++j) dh[j] = dh_final[j];

    for (int t = spec.sequence_len - 1; t >= 0; --t) {
        const std::size_t at = static_cast<std::size_t>(t) * H;
        const double* c_prev =
            t > 0 ? cache.c.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
        for (int j = 0; j < H; ++j) {
            double i_g = cache.gi[at + j];
            double f_g = cache.gf[at + j];
            double g_c = cache.gg[at + j];
            double o_g = cache.go[at + j];
            double tc_v = cache.tc[at + j];

            double dh_j = dh[j];
            double do_g = dh_j * tc_v;
            double dc_j = dc[j] + dh_j * o_g * (1.0 - tc_v * tc_v);

            double di = dc_j * g_c;
            double dg = dc_j * i_g;
            double df = c_prev ? dc_j * c_prev[j] : 0.0;

            dz[j] = di * i_g * (1.0 - i_g);
            dz[H + j] = df * f_g * (1.0 - f_g);
            dz[2 * H + j] = dg * (1.0 - g_c * g_c);
            dz[3 * H + j] = do_g * o_g * (1.0 - o_g);

            dc[j] = dc_j * f_g;  // carried to step t-1
        }

        const double* xt = cache.x.data() + static_cast<std::size_t>(t) * I;
        const double* h_prev =
            t > 0 ? cache.h.data() + static_cast<std::size_t>(t - 1) * H : nullptr;
        for (int j = 0; j < H; ++j) dh_next[j] = 0.0;
        for (int r = 0; r < 4 * H; ++r) {
            double dzr = dz[r];
            double* gwx = g + wx + static_cast<std::size_t>(r) * I;
            for (int i = 0; i < I; ++i) gwx[i] += dzr * xt[i];
            if (h_prev) {
                double* gwh = g + wh + static_cast<std::size_t>(r) * H;
                const double* wh_row = Wh + static_cast<std::size_t>(r) * H;
                for (int j = 0; j < H; ++j) {
                    gwh[j] += dzr * h_prev[j];
                    dh_next[j] += dzr * wh_row[j];
                }
            }
            g[b + r] += dzr;
        }
        dh.swap(dh_next);
    }
}

}  // namespace drplab::approx
