#include "doctest.h"
#include "drplab/approx/archive.hpp"
#include "drplab/approx/grad_check.hpp"
#include "drplab/approx/networks.hpp"
#include "drplab/market_env.hpp"
#include "drplab/synth.hpp"
#include "drplab/util/rng.hpp"
#include "test_support.hpp"

#include <numeric>

using namespace drplab;
using namespace drplab::approx;

namespace {

std::vector<double> random_vec(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("dense forward basics") {
    Bundle b;
    Dense d = Dense::make(b, "d", {2, 1, Act::Identity});
    b.value[d.w + 0] = 1.0;
    b.value[d.w + 1] = 1.0;
    b.value[d.b] = 0.5;
    double x[2] = {1.0, 2.0};
    double y[1];
    d.forward(b.value.data(), x, y);
    CHECK(y[0] == doctest::Approx(3.5));

    Bundle bz;
    Dense dz = Dense::make(bz, "d", {3, 3, Act::Tanh});
    double x3[3] = {0.7, -0.2, 0.1};
    double y3[3];
    dz.forward(bz.value.data(), x3, y3);
    for (double v : y3) CHECK(v == doctest::Approx(0.0));

    Bundle bi;
    Dense di = Dense::make(bi, "d", {3, 3, Act::Identity});
    for (int i = 0; i < 3; ++i) bi.value[di.w + i * 3 + i] = 1.0;
    di.forward(bi.value.data(), x3, y3);
    for (int i = 0; i < 3; ++i) CHECK(y3[i] == doctest::Approx(x3[i]));
}

TEST_CASE("lstm forward basics") {
    // all-zero parameters: gates sit at 1/2, candidate at 0, cell stays 0
    Bundle b;
    Lstm l = Lstm::make(b, "l", {1, 4, 5});
    Lstm::Cache cache;
    cache.resize(l.spec);
    std::vector<double> x(5, 1.0);
    std::vector<double> h(4);
    l.forward(b.value.data(), x.data(), cache, h.data());
    for (double v : h) CHECK(v == doctest::Approx(0.0));
    CHECK(cache.gi[0] == doctest::Approx(0.5));
    CHECK(cache.gf[0] == doctest::Approx(0.5));
    CHECK(cache.gg[0] == doctest::Approx(0.0));

    // sequence_len 1 reduces to a single cell application
    Bundle b1;
    Lstm l1 = Lstm::make(b1, "l", {1, 3, 1});
    Rng rng(2);
    l1.init(b1, rng);
    Lstm::Cache c1;
    c1.resize(l1.spec);
    double x1 = 0.4;
    std::vector<double> h1(3);
    l1.forward(b1.value.data(), &x1, c1, h1.data());
    for (int j = 0; j < 3; ++j) {
        double zi = b1.value[l1.wx + j] * x1 + b1.value[l1.b + j];
        double zf = b1.value[l1.wx + 3 + j] * x1 + b1.value[l1.b + 3 + j];
        double zg = b1.value[l1.wx + 6 + j] * x1 + b1.value[l1.b + 6 + j];
        double zo = b1.value[l1.wx + 9 + j] * x1 + b1.value[l1.b + 9 + j];
        (void)zf;  // no previous cell: forget gate has nothing to keep
        double cset = 1.0 / (1.0 + std::exp(-zi)) * std::tanh(zg);
        double expect = 1.0 / (1.0 + std::exp(-zo)) * std::tanh(cset);
        CHECK(h1[j] == doctest::Approx(expect));
    }

    // longer all-zero-weight sequences still produce zeros
    Bundle b2;
    Lstm l2 = Lstm::make(b2, "l", {1, 4, 10});
    Lstm::Cache c2;
    c2.resize(l2.spec);
    std::vector<double> x10(10, 2.5);
    std::vector<double> h2(4);
    l2.forward(b2.value.data(), x10.data(), c2, h2.data());
    for (double v : h2) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("extractor output shape and zero map") {
    Scenario s = synth_scenario(0, SynthProfile::Winter);
    ExtractorSpec spec = make_extractor_spec(s, ExtractorKind::Mbtf);
    Bundle b;
    Extractor ex = Extractor::build(b, "ex", spec);
    Extractor::Ws ws = ex.make_ws();

    auto [st, obs] = reset(s, 0);
    std::vector<double> flat = obs.flatten();
    ex.forward(b.value.data(), flat.data(), ws);
    CHECK(static_cast<int>(ws.feat.size()) == 64);
    for (double v : ws.feat) CHECK(v == doctest::Approx(0.0));  // zero params

    // permuting the two windows changes the output under random parameters
    Rng rng(5);
    ex.init(b, rng);
    ex.forward(b.value.data(), flat.data(), ws);
    std::vector<double> feat1 = ws.feat;
    std::vector<double> swapped = flat;
    for (int j = 0; j < spec.seq_len; ++j)
        std::swap(swapped[j], swapped[spec.seq_len + j]);
    ex.forward(b.value.data(), swapped.data(), ws);
    CHECK(feat1 != ws.feat);
}

TEST_CASE("actor outputs live in [-1,1]^2 and are reproducible") {
    Scenario s = synth_scenario(0, SynthProfile::Summer);
    ExtractorSpec spec = make_extractor_spec(s, ExtractorKind::Mbtf, 8, 32);
    Bundle b;
    ActorArch actor = ActorArch::build(spec, b);
    Rng rng(7);
    actor.init(b, rng);
    ActorArch::Ws ws = actor.make_ws();

    auto [st, obs] = reset(s, 0);
    std::vector<double> flat = obs.flatten();
    std::array<double, 2> a1{}, a2{};
    actor.forward(b.value.data(), flat.data(), ws, a1);
    actor.forward(b.value.data(), flat.data(), ws, a2);
    CHECK(a1 == a2);
    CHECK(a1[0] >= -1.0);
    CHECK(a1[0] <= 1.0);
    CHECK(a1[1] >= -1.0);
    CHECK(a1[1] <= 1.0);

    Bundle zero;
    ActorArch actor0 = ActorArch::build(spec, zero);
    actor0.forward(zero.value.data(), flat.data(), ws, a1);
    CHECK(a1[0] == doctest::Approx(0.0));
    CHECK(a1[1] == doctest::Approx(0.0));
}

TEST_CASE("critic responds to the action input") {
    Scenario s = synth_scenario(0, SynthProfile::Summer);
    ExtractorSpec spec = make_extractor_spec(s, ExtractorKind::Mbtf, 8, 32);
    Bundle b;
    CriticArch critic = CriticArch::build(spec, b);
    Rng rng(13);
    critic.init(b, rng);
    CriticArch::Ws ws = critic.make_ws();

    auto [st, obs] = reset(s, 0);
    std::vector<double> flat = obs.flatten();
    double qa = critic.forward(b.value.data(), flat.data(), {0.2, -0.3}, ws);
    double qb = critic.forward(b.value.data(), flat.data(), {0.2, -0.3}, ws);
    double qc = critic.forward(b.value.data(), flat.data(), {-0.6, 0.9}, ws);
    CHECK(qa == qb);
    CHECK(qa != qc);

    Bundle zero;
    CriticArch critic0 = CriticArch::build(spec, zero);
    CHECK(critic0.forward(zero.value.data(), flat.data(), {0.5, 0.5}, ws) ==
          doctest::Approx(0.0));
}

TEST_CASE("analytic gradient of w^2 is 2w") {
    // 1->1 identity layer, x=1, loss = y^2: dL/dw at w=3 must be 6
    Bundle b;
    Dense d = Dense::make(b, "d", {1, 1, Act::Identity});
    b.value[d.w] = 3.0;
    double x = 1.0, y;
    d.forward(b.value.data(), &x, &y);
    std::vector<double> g(b.size(), 0.0);
    double dy = 2.0 * y;
    d.backward(b.value.data(), &x, &y, &dy, nullptr, g.data());
    CHECK(g[d.w] == doctest::Approx(6.0));
}

TEST_CASE("dense gradients match finite differences") {
    Rng rng(31);
    for (Act act : {Act::Tanh, Act::Relu, Act::Identity}) {
        Bundle b;
        Dense d = Dense::make(b, "d", {6, 5, act});
        d.init(b, rng);
        std::vector<double> x = random_vec(6, rng);
        std::vector<double> wloss = random_vec(5, rng);

        auto loss = [&](const double* theta) {
            std::vector<double> y(5);
            d.forward(theta, x.data(), y.data());
            return std::inner_product(y.begin(), y.end(), wloss.begin(), 0.0);
        };
        std::vector<double> y(5);
        d.forward(b.value.data(), x.data(), y.data());
        std::vector<double> g(b.size(), 0.0);
        d.backward(b.value.data(), x.data(), y.data(), wloss.data(), nullptr, g.data());

        auto res = finite_difference_check(b.value, loss, g, 1000, rng);
        CHECK(res.max_rel_err < 1e-4);
    }
}

TEST_CASE("lstm gradients match finite differences on a length-4 sequence") {
    Rng rng(37);
    Bundle b;
    Lstm l = Lstm::make(b, "l", {1, 5, 4});
    l.init(b, rng);
    std::vector<double> x = random_vec(4, rng);
    std::vector<double> wloss = random_vec(5, rng);

    auto loss = [&](const double* theta) {
        Lstm::Cache cache;
        cache.resize(l.spec);
        std::vector<double> h(5);
        l.forward(theta, x.data(), cache, h.data());
        return std::inner_product(h.begin(), h.end(), wloss.begin(), 0.0);
    };
    Lstm::Cache cache;
    cache.resize(l.spec);
    std::vector<double> h(5);
    l.forward(b.value.data(), x.data(), cache, h.data());
    std::vector<double> g(b.size(), 0.0);
    l.backward(b.value.data(), cache, wloss.data(), g.data());

    auto res = finite_difference_check(b.value, loss, g, 1000, rng);
    CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("input-only backward equals the action slice of the full backward") {
    Scenario s = synth_scenario(0, SynthProfile::Winter);
    ExtractorSpec spec = make_extractor_spec(s, ExtractorKind::Mbtf, 6, 24);
    Bundle b;
    CriticArch critic = CriticArch::build(spec, b);
    Rng rng(41);
    critic.init(b, rng);
    CriticArch::Ws ws = critic.make_ws();

    auto [st, obs] = reset(s, 0);
    std::vector<double> flat = obs.flatten();
    std::array<double, 2> action{0.3, -0.7};
    critic.forward(b.value.data(), flat.data(), action, ws);
    std::array<double, 2> da{};
    critic.backward_action(b.value.data(), ws, 1.0, da);

    // finite differences on the action itself
    for (int k = 0; k < 2; ++k) {
        std::array<double, 2> ap = action, am = action;
        ap[k] += 1e-6;
        am[k] -= 1e-6;
        double up = critic.forward(b.value.data(), flat.data(), ap, ws);
        double dn = critic.forward(b.value.data(), flat.data(), am, ws);
        CHECK(da[k] == doctest::Approx((up - dn) / 2e-6).epsilon(1e-5));
    }
}

TEST_CASE("adam optimizer") {
    Bundle b;
    b.add("w", 1, 1);
    b.value[0] = 1.0;

    SUBCASE("zero gradient leaves parameters unchanged") {
        b.grad[0] = 0.0;
        adam_step(b, {0.001, 0.9, 0.999, 1e-8});
        CHECK(b.value[0] == doctest::Approx(1.0));
    }

    SUBCASE("first unit-gradient step is about -lr") {
        b.grad[0] = 1.0;
        adam_step(b, {0.001, 0.9, 0.999, 1e-8});
        CHECK(b.value[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-6));
    }

    SUBCASE("identical bundles stay identical") {
        Bundle c = b;
        for (int i = 0; i < 10; ++i) {
            b.grad[0] = 0.25;
            c.grad[0] = 0.25;
            adam_step(b, {0.01, 0.9, 0.999, 1e-8});
            adam_step(c, {0.01, 0.9, 0.999, 1e-8});
        }
        CHECK(b.value == c.value);
    }
}

TEST_CASE("soft update blends values") {
    Bundle online, target;
    online.add("w", 2, 1);
    target.add("w", 2, 1);
    online.value = {1.0, -2.0};
    target.value = {0.0, 0.0};
    soft_update(target, online, 1.0);
    CHECK(target.value == online.value);
    target.value = {0.5, 0.5};
    std::vector<double> before = target.value;
    soft_update(target, online, 0.0);
    CHECK(target.value == before);
}

TEST_CASE("archive round trip is bit-exact") {
    testing::TempDir tmp("archive");
    Scenario s = synth_scenario(0, SynthProfile::Winter);
    ExtractorSpec spec = make_extractor_spec(s, ExtractorKind::Mbtf, 8, 32);
    Bundle b;
    ActorArch actor = ActorArch::build(spec, b);
    Rng rng(53);
    actor.init(b, rng);

    Archive ar;
    ar.meta["format"] = "test";
    ar.put_bundle("actor", b);
    std::string path = tmp.str() + "/params.bin";
    save_archive(path, ar);
    Archive loaded = load_archive(path);
    CHECK(loaded.meta.at("format") == "test");

    Bundle b2;
    ActorArch actor2 = ActorArch::build(spec, b2);
    loaded.get_bundle("actor", b2);
    CHECK(b.value == b2.value);  // exact
}
