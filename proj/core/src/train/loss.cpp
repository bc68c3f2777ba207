#include "gridflow/train/loss.hpp"

#include "gridflow/common/error.hpp"
#include "gridflow/pf/injections.hpp"
#include "gridflow/scenario/perturb.hpp"

namespace gridflow::train {

using ad::Tape;
using ad::Tensor;
using ad::Var;

double mse_loss(models::Prediction const& pred, scenario::GraphSample const& sample) {
    std::size_t const n = sample.num_nodes;
    if (pred.v_hat.size() != n || pred.theta_hat.size() != n) {
        throw ShapeError("mse_loss: prediction for " + std::to_string(pred.v_hat.size()) + " buses, sample has " +
                         std::to_string(n));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double const dv = pred.v_hat[i] - sample.v_target(i);
        double const dt = pred.theta_hat[i] - sample.theta_target(i);
        sum += dv * dv + dt * dt;
    }
    return sum / static_cast<double>(n);
}

Var mse_loss(Tape& tape, Var pred, models::GraphBatch const& batch) {
    std::vector<double> w(batch.total_nodes());
    double const members = static_cast<double>(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        double const wb = 1.0 / (static_cast<double>(batch.nodes(b)) * members);
        std::fill(w.begin() + batch.offsets[b], w.begin() + batch.offsets[b + 1], wb);
    }
    return tape.mse_reduce(pred, batch.targets, w);
}

namespace {

void append_ybus(PhysicsTerms& t, grid::AdmittanceMatrix const& y) {
    for (std::size_t i = 0; i < y.n; ++i) {
        for (std::size_t k = y.row_start[i]; k < y.row_start[i + 1]; ++k) {
            t.row.push_back(static_cast<std::uint32_t>(i));
            t.col.push_back(static_cast<std::uint32_t>(y.col[k]));
            t.g.push_back(y.g[k]);
            t.b.push_back(y.b[k]);
        }
    }
}

}  // namespace

PhysicsTerms physics_terms(grid::Network const& net, grid::AdmittanceMatrix const& ybus) {
    PhysicsTerms t;
    append_ybus(t, ybus);
    auto const sched = pf::scheduled_injections(net);
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto const kind = net.buses[i].kind;
        if (kind != grid::BusKind::Slack) {
            t.p_rows.push_back(static_cast<std::uint32_t>(i));
            t.p_sched.push_back(sched.p[i]);
        }
        if (kind == grid::BusKind::PQ) {
            t.q_rows.push_back(static_cast<std::uint32_t>(i));
            t.q_sched.push_back(sched.q[i]);
        }
    }
    return t;
}

PhysicsTerms physics_terms(grid::Network const& base, scenario::GraphSample const& sample) {
    if (base.size() != sample.num_nodes) {
        throw ShapeError("physics_terms: base network has " + std::to_string(base.size()) + " buses, sample " +
                         std::to_string(sample.num_nodes));
    }
    grid::Network const net = scenario::apply_topology_change(base, sample.topology);
    PhysicsTerms t;
    append_ybus(t, grid::build_ybus(net));
    for (std::size_t i = 0; i < sample.num_nodes; ++i) {
        auto const kind = sample.kind(i);
        if (kind != grid::BusKind::Slack) {
            t.p_rows.push_back(static_cast<std::uint32_t>(i));
            t.p_sched.push_back(sample.feature(i, scenario::kP));
        }
        if (kind == grid::BusKind::PQ) {
            t.q_rows.push_back(static_cast<std::uint32_t>(i));
            t.q_sched.push_back(sample.feature(i, scenario::kQ));
        }
    }
    return t;
}

double physics_residual_loss(models::Prediction const& pred, grid::Network const& net,
                             grid::AdmittanceMatrix const& ybus) {
    pf::VoltageState state{pred.v_hat, pred.theta_hat};
    auto const inj = pf::compute_injections(ybus, state);
    auto const t = physics_terms(net, ybus);
    double sum = 0.0;
    for (std::size_t k = 0; k < t.p_rows.size(); ++k) {
        double const d = inj.p[t.p_rows[k]] - t.p_sched[k];
        sum += d * d;
    }
    for (std::size_t k = 0; k < t.q_rows.size(); ++k) {
        double const d = inj.q[t.q_rows[k]] - t.q_sched[k];
        sum += d * d;
    }
    std::size_t const count = t.p_rows.size() + t.q_rows.size();
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

Var physics_residual_loss(Tape& tape, Var pred, models::GraphBatch const& batch,
                          std::span<PhysicsTerms const* const> terms) {
    if (terms.size() != batch.size()) {
        throw ShapeError("physics_residual_loss: " + std::to_string(terms.size()) + " term sets for " +
                         std::to_string(batch.size()) + " batch members");
    }
    std::vector<std::uint32_t> rows, cols, p_rows, q_rows;
    std::vector<double> g, b, p_sched, q_sched, p_w, q_w;
    double const members = static_cast<double>(batch.size());
    for (std::size_t m = 0; m < batch.size(); ++m) {
        auto const& t = *terms[m];
        auto const off = static_cast<std::uint32_t>(batch.offsets[m]);
        for (std::size_t k = 0; k < t.row.size(); ++k) {
            rows.push_back(off + t.row[k]);
            cols.push_back(off + t.col[k]);
        }
        g.insert(g.end(), t.g.begin(), t.g.end());
        b.insert(b.end(), t.b.begin(), t.b.end());
        std::size_t const count = t.p_rows.size() + t.q_rows.size();
        double const w = count == 0 ? 0.0 : 1.0 / (static_cast<double>(count) * members);
        for (std::size_t k = 0; k < t.p_rows.size(); ++k) {
            p_rows.push_back(off + t.p_rows[k]);
            p_sched.push_back(t.p_sched[k]);
            p_w.push_back(w);
        }
        for (std::size_t k = 0; k < t.q_rows.size(); ++k) {
            q_rows.push_back(off + t.q_rows[k]);
            q_sched.push_back(t.q_sched[k]);
            q_w.push_back(w);
        }
    }
    std::size_t const nnz = rows.size();
    std::size_t const n = batch.total_nodes();

    Var const v = tape.slice_cols(pred, 0, 1);
    Var const th = tape.slice_cols(pred, 1, 2);
    Var const vv = tape.mul(tape.gather_rows(v, rows), tape.gather_rows(v, cols));
    Var const d = tape.sub(tape.gather_rows(th, rows), tape.gather_rows(th, cols));
    Var const c = tape.cos(d);
    Var const s = tape.sin(d);
    Var const gm = tape.constant(Tensor(nnz, 1, g));
    Var const bm = tape.constant(Tensor(nnz, 1, b));
    Var const p_terms = tape.mul(vv, tape.add(tape.mul(gm, c), tape.mul(bm, s)));
    Var const q_terms = tape.mul(vv, tape.sub(tape.mul(gm, s), tape.mul(bm, c)));

    std::vector<ad::IndexPair> to_row(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        to_row[k] = {static_cast<std::uint32_t>(k), rows[k]};
    }
    Var const p = tape.scatter_sum(p_terms, to_row, n);
    Var const q = tape.scatter_sum(q_terms, to_row, n);

    Var loss = tape.constant(Tensor::scalar(0.0));
    if (!p_rows.empty()) {
        Tensor target(p_rows.size(), 1, p_sched);
        loss = tape.add(loss, tape.mse_reduce(tape.gather_rows(p, p_rows), target, p_w));
    }
    if (!q_rows.empty()) {
        Tensor target(q_rows.size(), 1, q_sched);
        loss = tape.add(loss, tape.mse_reduce(tape.gather_rows(q, q_rows), target, q_w));
    }
    return loss;
}

}  // namespace gridflow::train
