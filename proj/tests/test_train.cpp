#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace lno;

TEST(Augment, GroupClosureAndInverses) {
    for (Symmetry a : kAllSymmetries) {
        EXPECT_EQ(compose(a, inverse(a)), Symmetry::Identity);
        for (Symmetry b : kAllSymmetries) {
            const Symmetry c = compose(a, b);
            EXPECT_NE(std::find(kAllSymmetries.begin(), kAllSymmetries.end(), c), kAllSymmetries.end());
        }
    }
    const GridField f = testutil::random_field(2, {6, 6}, 1);
    for (Symmetry a : kAllSymmetries)
        for (bool vec : {false, true}) {
            EXPECT_EQ(augment(augment(f, a, vec), inverse(a), vec).storage(), f.storage());
            for (Symmetry b : kAllSymmetries)
                EXPECT_EQ(augment(augment(f, b, vec), a, vec).storage(), augment(f, compose(a, b), vec).storage());
        }
}

TEST(Augment, IdentityAndRot90Cycle) {
    const GridField f = testutil::random_field(2, {5, 5}, 2);
    EXPECT_EQ(augment(f, Symmetry::Identity, true).storage(), f.storage());
    GridField g = f;
    for (int k = 0; k < 4; ++k) g = augment(g, Symmetry::Rot90, true);
    EXPECT_EQ(g.storage(), f.storage());
    GridField h = augment(f, Symmetry::Rot90, true);
    EXPECT_NE(h.storage(), f.storage());
}

TEST(Augment, Rot180ReversesIndicesAndNegates) {
    const std::size_t n = 7;
    const GridField f = testutil::random_field(2, {n, n}, 3);
    const GridField r = augment(f, Symmetry::Rot180, true);
    const GridField s = augment(f, Symmetry::Rot180, false);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_EQ(r.at(c, i, j), -f.at(c, n - 1 - i, n - 1 - j));
                EXPECT_EQ(s.at(c, i, j), f.at(c, n - 1 - i, n - 1 - j));
            }
}

TEST(Augment, FlipXAndTransposeByHand) {
    const GridField f = testutil::random_field(2, {4, 4}, 4);
    const GridField fx = augment(f, Symmetry::FlipX, true);
    const GridField tr = augment(f, Symmetry::FlipDiag, true);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(fx.at(0, i, j), -f.at(0, 3 - i, j));
            EXPECT_EQ(fx.at(1, i, j), f.at(1, 3 - i, j));
            EXPECT_EQ(tr.at(0, i, j), f.at(1, j, i));
            EXPECT_EQ(tr.at(1, i, j), f.at(0, j, i));
        }
}

TEST(Augment, ShapeChecks) {
    EXPECT_THROW(augment(GridField(2, {4, 6}, 0.1), Symmetry::Rot90, true), ShapeError);
    EXPECT_NO_THROW(augment(GridField(2, {4, 6}, 0.1), Symmetry::FlipY, true));
    EXPECT_THROW(augment(GridField(1, {4}, 0.1), Symmetry::FlipX, false), ShapeError);
}

TEST(Schedule, StepDecay) {
    TrainSchedule s;
    EXPECT_DOUBLE_EQ(s.lr(0), 1e-3);
    EXPECT_DOUBLE_EQ(s.lr(9999), 1e-3);
    EXPECT_NEAR(s.lr(10000), 7e-4, 1e-18);
    EXPECT_NEAR(s.lr(25000), 1e-3 * 0.49, 1e-18);
    EXPECT_NEAR(s.lr(99999), 1e-3 * std::pow(0.7, 9), 1e-18);
}

TEST(Adam, ZeroGradientLeavesWeights) {
    WeightTensor w("w", {3});
    w.values = {0.5, -1.0, 2.0};
    Adam a;
    a.step({&w}, 1e-3);
    EXPECT_EQ(w.values, (std::vector<double>{0.5, -1.0, 2.0}));
}

TEST(Adam, FirstTwoStepsByHand) {
    WeightTensor w("w", {2});
    w.values = {1.0, 1.0};
    Adam a;
    w.grad = {0.3, -2.0};
    a.step({&w}, 0.01);
    // m_hat = g, v_hat = g^2 -> step = lr * g / (|g| + eps)
    EXPECT_NEAR(w.values[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
    EXPECT_NEAR(w.values[1], 1.0 + 0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
    const double w0 = w.values[0];
    w.grad = {0.1, 0.0};
    a.step({&w}, 0.01);
    const double m = (0.9 * 0.1 * 0.3 + 0.1 * 0.1) / (1 - 0.81);
    const double v = (0.999 * 0.001 * 0.09 + 0.001 * 0.01) / (1 - 0.999 * 0.999);
    EXPECT_NEAR(w.values[0], w0 - 0.01 * m / (std::sqrt(v) + 1e-8), 1e-15);
}

namespace {

LnoModel tiny(std::size_t d, std::uint64_t seed) {
    LnoConfig c;
    c.d = d;
    c.d_u = d == 1 ? 1 : 2;
    c.width = 3;
    c.proj_hidden = 4;
    c.n_blocks = 1;
    c.window = 4;
    c.modes = 2;
    c.repetitions = 2;
    c.dt = 0.05;
    return LnoModel::build(c, seed);
}

std::vector<Trajectory> toy_data(std::size_t count, std::size_t frames, std::size_t n) {
    std::vector<Trajectory> out;
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(solve_burgers(random_ic_1d(100 + k, n, 2.0 / n), 0.05, 0.05, frames - 1));
    return out;
}

} // namespace

TEST(Loss, SelfTargetsAndZeroModel) {
    auto m = tiny(2, 1);
    const GridField start = testutil::random_field(2, {9, 9}, 2);
    const auto spec = BoundarySpec::periodic(2);
    std::vector<GridField> self{march(m, start, spec)};
    self.push_back(march(m, self[0], spec));
    EXPECT_EQ(rollout_loss(m, start, self, spec), 0.0);
    for (WeightTensor* w : m.parameters()) std::fill(w->values.begin(), w->values.end(), 0.0);
    EXPECT_EQ(rollout_loss(m, start, {GridField(2, {9, 9}, 0.1)}, spec), 0.0);
}

TEST(Loss, HandExpandedThreeByThree) {
    const auto m = tiny(2, 3);
    const GridField start = testutil::random_field(2, {3, 3}, 4);
    const GridField target = testutil::random_field(2, {3, 3}, 5);
    const auto spec = BoundarySpec::periodic(2);
    const GridField pred = march(m, start, spec);
    double hand = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const double a = pred.at(0, i, j) - target.at(0, i, j), b = pred.at(1, i, j) - target.at(1, i, j);
            hand += std::sqrt(a * a + b * b);
        }
    EXPECT_NEAR(rollout_loss(m, start, {target}, spec), hand / 9.0, 1e-14);
}

TEST(Loss, RolloutGradientMatchesFiniteDifferences) {
    auto m = tiny(1, 6);
    const auto data = toy_data(1, 4, 16);
    const auto spec = BoundarySpec::periodic(1);
    std::vector<GridField> targets(data[0].frames.begin() + 1, data[0].frames.end());
    m.zero_grad();
    Tape t;
    t.backward(rollout_loss(t, m, data[0][0], targets, spec));
    auto loss = [&] { return rollout_loss(m, data[0][0], targets, spec); };
    for (WeightTensor* w : m.parameters()) EXPECT_LT(testutil::fd_check(*w, loss), 1e-4) << w->name;
}

TEST(ErrorMetric, TruthAndConstantOffset) {
    const GridField u = testutil::random_field(2, {6, 6}, 7);
    EXPECT_EQ(mean_l2_error(u, u), 0.0);
    GridField shifted = u;
    for (std::size_t i = 0; i < u.points(); ++i) shifted.at(0, i) += -0.35;
    EXPECT_NEAR(mean_l2_error(shifted, u), 0.35, 1e-15);
}

TEST(Validate, TimesMustFitTrajectories) {
    const auto m = tiny(1, 8);
    const auto data = toy_data(2, 5, 16);
    const auto spec = BoundarySpec::periodic(1);
    const auto rows = validate_error(m, data, {0.05, 0.2}, spec);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GT(rows[0].mean, 0.0);
    EXPECT_THROW(validate_error(m, data, {0.25}, spec), ShapeError);
    EXPECT_THROW(validate_error(m, data, {0.07}, spec), ShapeError);
}

TEST(Train, DeterministicForSeedAndLogsWindowMean) {
    const auto data = toy_data(3, 8, 16);
    TrainSchedule s;
    s.iterations = 12;
    s.rollout = 3;
    s.log_every = 5;
    auto a = tiny(1, 1), b = tiny(1, 1);
    const auto ra = train_loop(a, data, s, 42);
    const auto rb = train_loop(b, data, s, 42);
    EXPECT_EQ(ra.losses, rb.losses);
    for (std::size_t i = 0; i < a.parameters().size(); ++i)
        EXPECT_EQ(a.parameters()[i]->values, b.parameters()[i]->values);
    ASSERT_EQ(ra.log.size(), 4u); // 0, 5, 10, 11
    EXPECT_EQ(ra.log[1].iteration, 5u);
    double mean = 0.0;
    for (std::size_t i = 1; i <= 5; ++i) mean += ra.losses[i];
    EXPECT_NEAR(ra.log[1].loss, mean / 5, 1e-15);
    EXPECT_EQ(ra.initial_loss, ra.losses[0]);
    auto c = tiny(1, 1);
    EXPECT_NE(train_loop(c, data, s, 43).losses, ra.losses);
}

TEST(Train, CheckpointCadenceAndGuards) {
    const auto data = toy_data(2, 6, 16);
    TrainSchedule s;
    s.iterations = 6;
    s.rollout = 2;
    s.checkpoint_every = 2;
    std::vector<std::size_t> saved;
    TrainHooks hooks;
    hooks.on_checkpoint = [&](std::size_t it, const LnoModel&) { saved.push_back(it); };
    auto m = tiny(1, 2);
    train_loop(m, data, s, 1, hooks);
    EXPECT_EQ(saved, (std::vector<std::size_t>{2, 4, 6}));

    s.rollout = 6;
    EXPECT_THROW(train_loop(m, data, s, 1), ShapeError);
    auto m2 = tiny(2, 2);
    s.rollout = 2;
    EXPECT_THROW(train_loop(m2, data, s, 1), ShapeError);

    // a huge learning rate trips the divergence guard
    s.iterations = 200;
    s.lr0 = 50.0;
    s.divergence_factor = 2.0;
    auto m3 = tiny(1, 3);
    EXPECT_THROW(train_loop(m3, data, s, 1), NumericalError);
}

TEST(Train, WindowsStayInsideTrajectories) {
    const auto data = toy_data(2, 6, 16);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const Window w = sample_window(data, 5, rng);
        EXPECT_EQ(w.offset, 0u);
        EXPECT_EQ(w.symmetry, Symmetry::Identity); // 1-D data is never augmented
        EXPECT_EQ(w.targets.size(), 5u);
    }
}

TEST(Dataset, RoundTripAndHeaderErrors) {
    auto data = toy_data(2, 3, 8);
    Dataset ds;
    ds.info = describe(data, 9);
    ds.trajectories = data;
    std::stringstream buf;
    save_dataset(ds, buf);
    const std::string bytes = buf.str();
    std::stringstream in(bytes);
    const Dataset back = load_dataset(in);
    EXPECT_EQ(back.info.trajectory_count, 2u);
    EXPECT_EQ(back.info.frame_count, 3u);
    EXPECT_EQ(back.info.seed, 9u);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t i = 0; i < 8; ++i)
                EXPECT_EQ(back.trajectories[k][f].at(0, i), double(float(data[k][f].at(0, i))));

    auto err = [&](const std::string& b) {
        std::stringstream s(b);
        try {
            load_dataset(s);
        } catch (const FormatError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const auto nl = bytes.find('\n');
    auto edited = [&](const char* key, io::json v) {
        io::json h = io::json::parse(bytes.substr(0, nl));
        if (v.is_null()) h.erase(key);
        else h[key] = v;
        return h.dump() + bytes.substr(nl);
    };
    EXPECT_NE(err(bytes.substr(0, bytes.size() - 1)).find("truncated"), std::string::npos);
    EXPECT_NE(err(bytes + "zz").find("trailing"), std::string::npos);
    EXPECT_NE(err(edited("dims", nullptr)).find("'dims'"), std::string::npos);
    EXPECT_NE(err(edited("dt", -1.0)).find("'dt'"), std::string::npos);
    EXPECT_NE(err(edited("d", 3)).find("'d'"), std::string::npos);
    EXPECT_NE(err(edited("frame_count", "many")).find("'frame_count'"), std::string::npos);
}
