#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "gridflow/autodiff/gradcheck.hpp"
#include "gridflow/common/error.hpp"
#include "gridflow/models/checkpoint.hpp"
#include "gridflow/models/gcn.hpp"
#include "gridflow/models/ggnn.hpp"
#include "gridflow/models/model.hpp"
#include "gridflow/pf/newton_raphson.hpp"
#include "support.hpp"

namespace gridflow::models {
namespace {

using ad::Tape;
using ad::Tensor;
using ad::Var;

Tensor from_json(nlohmann::json const& j) {
    std::vector<double> values;
    for (auto const& row : j) {
        for (auto const& x : row) values.push_back(x.get<double>());
    }
    return Tensor(j.size(), j[0].size(), std::move(values));
}

Tensor random_tensor(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Tensor t(rows, cols);
    for (auto& x : t.values()) x = u(rng);
    return t;
}

scenario::NormStats identity_stats() {
    scenario::NormStats s;
    s.std.fill(1.0);
    return s;
}

scenario::GraphSample solved_sample(grid::Network const& net) {
    return scenario::build_graph_sample(net, pf::nr_solve(net));
}

std::vector<double> to_vector(Tensor const& t) { return {t.values().begin(), t.values().end()}; }

ModelConfig small_ggnn(std::size_t steps = 3) {
    ModelConfig cfg;
    cfg.arch = Arch::GGNN;
    cfg.steps = steps;
    cfg.seed = 5;
    return cfg;
}

TEST(Ggnn, InitHiddenZero) {
    Tape tape;
    auto const h = ggnn::init_hidden(tape, tape.constant(Tensor(4, 7)), tape.constant(Tensor(7, 32)),
                                     tape.constant(Tensor(1, 32)));
    EXPECT_EQ(tape.value(h), Tensor(4, 32));
}

TEST(Ggnn, InitHiddenPaddedIdentity) {
    std::mt19937_64 rng(1);
    Tensor const x = random_tensor(rng, 3, 7, 2.0);
    Tensor w(7, 10);
    for (std::size_t i = 0; i < 7; ++i) w(i, i) = 1.0;
    Tape tape;
    auto const h = ggnn::init_hidden(tape, tape.constant(x), tape.constant(w), tape.constant(Tensor(1, 10)));
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 10; ++c) {
            EXPECT_EQ(tape.value(h)(r, c), c < 7 ? std::tanh(x(r, c)) : 0.0);
        }
    }
}

TEST(Ggnn, InitHiddenRangeAndWidthCheck) {
    std::mt19937_64 rng(2);
    Tape tape;
    auto const h = ggnn::init_hidden(tape, tape.constant(random_tensor(rng, 6, 7, 2.0)),
                                     tape.constant(random_tensor(rng, 7, 8)), tape.constant(Tensor(1, 8)));
    for (double v : tape.value(h).values()) {
        EXPECT_GT(v, -1.0);
        EXPECT_LT(v, 1.0);
    }
    EXPECT_THROW(ggnn::init_hidden(tape, tape.constant(Tensor(6, 5)), tape.constant(Tensor(7, 8)),
                                   tape.constant(Tensor(1, 8))),
                 ShapeError);
}

TEST(Ggnn, AggregateIsolatedNode) {
    Tape tape;
    auto const m = ggnn::aggregate_messages(tape, tape.constant(Tensor(1, 3, {1, 2, 3})), {}, 1,
                                            tape.constant(Tensor(3, 3, 1.0)));
    EXPECT_EQ(tape.value(m), Tensor(1, 3));
}

TEST(Ggnn, AggregateTwoNodesIdentity) {
    Tensor eye(2, 2, {1, 0, 0, 1});
    std::vector<ad::IndexPair> const pairs{{0, 1}, {1, 0}};
    Tape tape;
    auto const m = ggnn::aggregate_messages(tape, tape.constant(Tensor(2, 2, {1, 2, 3, 4})), pairs, 2,
                                            tape.constant(eye));
    EXPECT_EQ(tape.value(m), Tensor(2, 2, {3, 4, 1, 2}));
}

TEST(Ggnn, AggregateTriangleBruteForce) {
    std::mt19937_64 rng(3);
    Tensor const h = random_tensor(rng, 3, 4);
    Tensor const w = random_tensor(rng, 4, 4);
    std::vector<ad::IndexPair> const pairs{{0, 1}, {1, 0}, {1, 2}, {2, 1}, {0, 2}, {2, 0}};
    Tape tape;
    auto const m = ggnn::aggregate_messages(tape, tape.constant(h), pairs, 3, tape.constant(w));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t c = 0; c < 4; ++c) {
            double expected = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                if (j == i) continue;
                for (std::size_t k = 0; k < 4; ++k) expected += h(j, k) * w(k, c);
            }
            EXPECT_NEAR(tape.value(m)(i, c), expected, 1e-13);
        }
    }
}

ggnn::GruVars constant_gru(Tape& tape, nlohmann::json const& fx) {
    ggnn::GruVars g;
    g.w_z = tape.constant(from_json(fx["w_z"]));
    g.u_z = tape.constant(from_json(fx["u_z"]));
    g.b_z = tape.constant(from_json(fx["b_z"]));
    g.w_r = tape.constant(from_json(fx["w_r"]));
    g.u_r = tape.constant(from_json(fx["u_r"]));
    g.b_r = tape.constant(from_json(fx["b_r"]));
    g.w_h = tape.constant(from_json(fx["w_h"]));
    g.u_h = tape.constant(from_json(fx["u_h"]));
    g.b_h = tape.constant(from_json(fx["b_h"]));
    return g;
}

// Values of every sigmoid and tanh node recorded after `from`.
std::pair<std::vector<double>, std::vector<double>> gate_values(Tape const& tape, std::size_t from) {
    std::vector<double> sig;
    std::vector<double> th;
    for (std::size_t id = from; id < tape.size(); ++id) {
        Var const v{static_cast<std::uint32_t>(id)};
        auto const vals = tape.value(v).values();
        if (tape.op(v) == ad::Op::Sigmoid) sig.insert(sig.end(), vals.begin(), vals.end());
        if (tape.op(v) == ad::Op::Tanh) th.insert(th.end(), vals.begin(), vals.end());
    }
    return {sig, th};
}

TEST(Gru, MatchesFixture) {
    auto const fx = test::load_fixture("gru_step.json");
    Tape tape;
    auto const g = constant_gru(tape, fx);
    auto const start = tape.size();
    auto const h = ggnn::gru_update(tape, tape.constant(from_json(fx["m"])), tape.constant(from_json(fx["h_prev"])), g);
    auto const expected = from_json(fx["h"]);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(tape.value(h)[k], expected[k], 1e-12);

    auto const [sig, th] = gate_values(tape, start);
    auto const z = from_json(fx["z"]);
    auto const r = from_json(fx["r"]);
    auto const c = from_json(fx["candidate"]);
    ASSERT_EQ(sig.size(), 4u);
    ASSERT_EQ(th.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(sig[k], z[k], 1e-12);
        EXPECT_NEAR(sig[2 + k], r[k], 1e-12);
        EXPECT_NEAR(th[k], c[k], 1e-12);
    }
}

TEST(Gru, ZeroInputZeroState) {
    std::mt19937_64 rng(4);
    Tape tape;
    ggnn::GruVars g;
    g.w_z = tape.constant(random_tensor(rng, 2, 2));
    g.u_z = tape.constant(random_tensor(rng, 2, 2));
    g.w_r = tape.constant(random_tensor(rng, 2, 2));
    g.u_r = tape.constant(random_tensor(rng, 2, 2));
    g.w_h = tape.constant(random_tensor(rng, 2, 2));
    g.u_h = tape.constant(random_tensor(rng, 2, 2));
    g.b_z = g.b_r = g.b_h = tape.constant(Tensor(1, 2));
    auto const start = tape.size();
    auto const h = ggnn::gru_update(tape, tape.constant(Tensor(1, 2)), tape.constant(Tensor(1, 2)), g);
    EXPECT_EQ(tape.value(h), Tensor(1, 2));
    auto const [sig, th] = gate_values(tape, start);
    for (double v : sig) EXPECT_EQ(v, 0.5);
    for (double v : th) EXPECT_EQ(v, 0.0);
}

TEST(Gru, SaturatedUpdateGateRetainsState) {
    Tape tape;
    ggnn::GruVars g;
    g.w_z = g.u_z = g.w_r = g.u_r = g.w_h = g.u_h = tape.constant(Tensor(3, 3));
    g.b_z = tape.constant(Tensor(1, 3, 40.0));
    g.b_r = tape.constant(Tensor(1, 3));
    g.b_h = tape.constant(Tensor(1, 3, 0.7));
    Tensor const h_prev(2, 3, {0.1, -0.2, 0.3, 0.9, -0.8, 0.0});
    auto const h = ggnn::gru_update(tape, tape.constant(Tensor(2, 3, 1.0)), tape.constant(h_prev), g);
    for (std::size_t k = 0; k < h_prev.size(); ++k) EXPECT_NEAR(tape.value(h)[k], h_prev[k], 1e-15);
}

TEST(Gru, GateRanges) {
    std::mt19937_64 rng(5);
    Tape tape;
    ggnn::GruVars g;
    g.w_z = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.u_z = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.w_r = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.u_r = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.w_h = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.u_h = tape.constant(random_tensor(rng, 8, 8, 2.0));
    g.b_z = tape.constant(random_tensor(rng, 1, 8));
    g.b_r = tape.constant(random_tensor(rng, 1, 8));
    g.b_h = tape.constant(random_tensor(rng, 1, 8));
    auto const start = tape.size();
    ggnn::gru_update(tape, tape.constant(random_tensor(rng, 20, 8, 2.0)), tape.constant(random_tensor(rng, 20, 8)), g);
    auto const [sig, th] = gate_values(tape, start);
    ASSERT_EQ(sig.size(), 2u * 160u);
    for (double v : sig) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    for (double v : th) {
        EXPECT_GT(v, -1.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(GgnnForward, SingleStepIsComposition) {
    auto const model = init_model(small_ggnn(1));
    auto const sample = solved_sample(test::ieee30());
    auto const stats = identity_stats();
    auto const batch = make_batch(sample, stats);
    auto const pred = predict(model, sample, stats);

    Tape tape;
    auto const p = bind_parameters(tape, model.params);
    auto const h0 = ggnn::init_hidden(tape, tape.constant(batch.features), p[ggnn::kWIn], p[ggnn::kBIn]);
    auto const m = ggnn::aggregate_messages(tape, h0, batch.pairs, batch.total_nodes(), p[ggnn::kWM]);
    auto const h1 = ggnn::gru_update(tape, m, h0, ggnn::gru_vars(p));
    auto const hidden = tape.tanh(tape.add(tape.matmul(h1, p[ggnn::kWOut1]), p[ggnn::kBOut1]));
    auto const out = tape.add(tape.matmul(hidden, p[ggnn::kWOut2]), p[ggnn::kBOut2]);
    for (std::size_t i = 0; i < sample.num_nodes; ++i) {
        EXPECT_NEAR(pred.v_hat[i], tape.value(out)(i, 0), 1e-14);
        EXPECT_NEAR(pred.theta_hat[i], tape.value(out)(i, 1), 1e-14);
    }
}

TEST(GgnnForward, EvalIsDeterministic) {
    auto const model = init_model(ModelConfig{});
    auto const sample = solved_sample(test::ieee30());
    auto const a = predict(model, sample, identity_stats());
    auto const b = predict(model, sample, identity_stats());
    EXPECT_EQ(a.v_hat, b.v_hat);
    EXPECT_EQ(a.theta_hat, b.theta_hat);
}

TEST(GgnnForward, TrainModeDropoutVaries) {
    auto const model = init_model(ModelConfig{});
    auto const batch = make_batch(solved_sample(test::ieee30()), identity_stats());
    auto run = [&](Mode mode, std::uint64_t seed) {
        Tape tape;
        Rng rng(seed);
        auto const p = bind_parameters(tape, model.params);
        return tape.value(model_forward(tape, model, p, batch, mode, rng));
    };
    EXPECT_NE(run(Mode::Train, 1), run(Mode::Train, 2));
    EXPECT_EQ(run(Mode::Train, 1), run(Mode::Train, 1));
    EXPECT_EQ(run(Mode::Eval, 1), run(Mode::Eval, 2));
}

TEST(GgnnForward, PermutationEquivariance) {
    auto const model = init_model(ModelConfig{});
    auto const sample = solved_sample(test::ieee30());
    auto const stats = identity_stats();
    std::size_t const n = sample.num_nodes;

    std::vector<std::uint32_t> perm(n);  // new index of old node i
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(99));

    auto permuted = sample;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < scenario::kFeatureCount; ++c) {
            permuted.node_features[perm[i] * scenario::kFeatureCount + c] = sample.feature(i, c);
        }
        permuted.targets[2 * perm[i]] = sample.targets[2 * i];
        permuted.targets[2 * perm[i] + 1] = sample.targets[2 * i + 1];
    }
    for (auto& e : permuted.edges) {
        e.src = perm[e.src];
        e.dst = perm[e.dst];
    }
    auto const a = predict(model, sample, stats);
    auto const b = predict(model, permuted, stats);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(a.v_hat[i], b.v_hat[perm[i]], 1e-9);
        EXPECT_NEAR(a.theta_hat[i], b.theta_hat[perm[i]], 1e-9);
    }
}

TEST(GgnnForward, SameParametersAnyGraphSize) {
    auto const model = init_model(ModelConfig{});
    auto const stats = identity_stats();
    auto const small = predict(model, solved_sample(test::two_bus(0.5, 0.1)), stats);
    auto const large = predict(model, solved_sample(test::ieee30()), stats);
    EXPECT_EQ(small.size(), 2u);
    EXPECT_EQ(large.size(), 30u);
    for (double v : small.v_hat) EXPECT_TRUE(std::isfinite(v));
}

TEST(GgnnForward, BatchEqualsPerSample) {
    auto const model = init_model(ModelConfig{});
    auto const stats = identity_stats();
    auto const a = solved_sample(test::ieee30());
    auto const b = solved_sample(test::two_bus(0.5, 0.1));
    std::vector<scenario::GraphSample const*> const members{&a, &b};
    auto const preds = predict(model, make_batch(members, stats));
    ASSERT_EQ(preds.size(), 2u);
    auto const pa = predict(model, a, stats);
    auto const pb = predict(model, b, stats);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(preds[0].v_hat[i], pa.v_hat[i], 1e-13);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(preds[1].theta_hat[i], pb.theta_hat[i], 1e-13);
}

TEST(GgnnForward, LossGradcheckFiveNodes) {
    std::mt19937_64 rng(6);
    scenario::GraphSample s;
    s.num_nodes = 5;
    s.node_features = to_vector(random_tensor(rng, 5, scenario::kFeatureCount));
    s.targets = to_vector(random_tensor(rng, 5, 2));
    for (auto [a, b] : {std::pair{0u, 1u}, {1u, 2u}, {2u, 3u}, {3u, 4u}, {4u, 0u}, {1u, 3u}}) {
        s.edges.push_back({a, b});
        s.edges.push_back({b, a});
        s.edge_features.insert(s.edge_features.end(), {1.0, 0.0, 1.0, 0.0});
    }
    auto cfg = small_ggnn(3);
    auto const model = init_model(cfg);
    auto const batch = make_batch(s, identity_stats());
    auto const r = ad::gradcheck(
        [&](Tape& tape, std::span<Var const> p) {
            Rng unused(0);
            return tape.mse_reduce(model_forward(tape, model, p, batch, Mode::Eval, unused), batch.targets);
        },
        model.params.values());
    EXPECT_LT(r.max_rel_error, 1e-5) << model.params.name(r.worst_param) << "[" << r.worst_index << "]";
}

ModelConfig gcn_config(std::size_t n) {
    ModelConfig cfg;
    cfg.arch = Arch::GCN;
    cfg.num_nodes = n;
    cfg.seed = 8;
    return cfg;
}

TEST(Gcn, HeadShapesFor30Bus) {
    auto const model = init_model(gcn_config(30));
    EXPECT_EQ(model.params[gcn::kSelf0].shape(), (std::array<std::size_t, 2>{7, 12}));
    EXPECT_EQ(model.params[gcn::kNbr1].shape(), (std::array<std::size_t, 2>{12, 12}));
    EXPECT_EQ(model.params[gcn::kWHead1].shape(), (std::array<std::size_t, 2>{360, 128}));
    EXPECT_EQ(model.params[gcn::kWHead2].shape(), (std::array<std::size_t, 2>{128, 60}));
    EXPECT_EQ(model.params[gcn::kBHead2].shape(), (std::array<std::size_t, 2>{1, 60}));
}

TEST(Gcn, ZeroWeightsGiveZeroPrediction) {
    auto model = init_model(gcn_config(30));
    for (auto& t : model.params.values()) {
        for (auto& x : t.values()) x = 0.0;
    }
    auto const pred = predict(model, solved_sample(test::ieee30()), identity_stats());
    ASSERT_EQ(pred.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) {
        EXPECT_EQ(pred.v_hat[i], 0.0);
        EXPECT_EQ(pred.theta_hat[i], 0.0);
    }
}

TEST(Gcn, SingleNodeLayerByHand) {
    Tape tape;
    Tensor const h(1, 2, {1.0, -2.0});
    Tensor const w_self(2, 2, {0.5, -1.0, 0.25, 0.75});
    auto const out = gcn::layer(tape, tape.constant(h), {}, 1, tape.constant(w_self), tape.constant(Tensor(2, 2, 9.0)));
    // h W_self = (0.5 - 0.5, -1.0 - 1.5) = (0, -2.5) -> relu -> (0, 0)
    EXPECT_EQ(tape.value(out), Tensor(1, 2, {0.0, 0.0}));
    Tensor const h2(1, 2, {2.0, 1.0});
    auto const out2 =
        gcn::layer(tape, tape.constant(h2), {}, 1, tape.constant(w_self), tape.constant(Tensor(2, 2, 9.0)));
    EXPECT_EQ(tape.value(out2), Tensor(1, 2, {1.25, 0.0}));
}

TEST(Gcn, OutputIsInterleavedPerNode) {
    auto model = init_model(gcn_config(2));
    // Only the output bias is non-zero: [V1, theta1, V2, theta2].
    for (auto& t : model.params.values()) {
        for (auto& x : t.values()) x = 0.0;
    }
    model.params[gcn::kBHead2] = Tensor(1, 4, {1.1, 0.1, 1.2, 0.2});
    auto const pred = predict(model, solved_sample(test::two_bus(0.5)), identity_stats());
    EXPECT_EQ(pred.v_hat, (std::vector<double>{1.1, 1.2}));
    EXPECT_EQ(pred.theta_hat, (std::vector<double>{0.1, 0.2}));
}

TEST(Gcn, RejectsSizeMismatch) {
    auto const model = init_model(gcn_config(30));
    EXPECT_THROW(predict(model, solved_sample(test::two_bus(0.5)), identity_stats()), ShapeError);
    EXPECT_THROW(init_model(gcn_config(0)), ConfigError);
}

TEST(Gcn, LossGradcheck) {
    auto const model = init_model(gcn_config(2));
    auto const batch = make_batch(solved_sample(test::two_bus(0.5, 0.2)), identity_stats());
    auto const r = ad::gradcheck(
        [&](Tape& tape, std::span<Var const> p) {
            Rng unused(0);
            return tape.mse_reduce(model_forward(tape, model, p, batch, Mode::Eval, unused), batch.targets);
        },
        model.params.values());
    EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(ModelConfig, Validation) {
    ModelConfig cfg;
    cfg.steps = 0;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = {};
    cfg.dropout = 1.0;
    EXPECT_THROW(validate(cfg), ConfigError);
    EXPECT_THROW(arch_from_string("mlp"), ConfigError);
    EXPECT_EQ(arch_from_string("gcn"), Arch::GCN);
}

TEST(Init, SeededAndGlorotBounded) {
    auto const a = init_model(ModelConfig{});
    auto const b = init_model(ModelConfig{});
    EXPECT_EQ(a, b);
    auto cfg = ModelConfig{};
    cfg.seed = 1;
    EXPECT_NE(init_model(cfg).params, a.params);

    auto const& w = a.params[ggnn::kWZ];
    double const bound = std::sqrt(6.0 / 64.0);
    for (double x : w.values()) EXPECT_LE(std::abs(x), bound);
    for (double x : a.params[ggnn::kBZ].values()) EXPECT_EQ(x, 1.0);
    for (double x : a.params[ggnn::kBR].values()) EXPECT_EQ(x, 0.0);
}

TEST(Checkpoint, BitExactRoundTrip) {
    Checkpoint ckpt;
    ckpt.model = init_model(ModelConfig{});
    ckpt.model.params[0][3] = 0.1 + 0.2;  // a value with a long binary expansion
    ckpt.norm_stats = identity_stats();
    ckpt.norm_stats.mean[0] = -0.123456789012345678;
    ckpt.metadata = {{"epochs", 3}};
    auto const bytes = encode_checkpoint(ckpt);
    EXPECT_EQ(bytes.substr(0, 8), "GFCKPT01");
    auto const back = decode_checkpoint(bytes);
    EXPECT_EQ(back, ckpt);
    EXPECT_EQ(encode_checkpoint(back), bytes);

    auto const path = test::temp_dir("ckpt") / "model.ckpt";
    write_checkpoint(ckpt, path);
    EXPECT_EQ(read_checkpoint(path), ckpt);

    auto gcn_ckpt = ckpt;
    gcn_ckpt.model = init_model(gcn_config(30));
    EXPECT_EQ(decode_checkpoint(encode_checkpoint(gcn_ckpt)), gcn_ckpt);
}

TEST(Checkpoint, MalformedRejected) {
    Checkpoint ckpt;
    ckpt.model = init_model(small_ggnn());
    ckpt.norm_stats = identity_stats();
    auto const bytes = encode_checkpoint(ckpt);
    EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 8)), IoError);
    EXPECT_THROW(decode_checkpoint("GFCKPT02" + bytes.substr(8)), IoError);
    EXPECT_THROW(decode_checkpoint(""), IoError);
    EXPECT_THROW(decode_checkpoint(bytes + "x"), IoError);
}

}  // namespace
}  // namespace gridflow::models
