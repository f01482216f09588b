#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "malign/common.hpp"
#include "malign/model.hpp"

using namespace malign;

namespace {

FeatureMatrix matrix_of(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    FeatureMatrix m;
    m.n_blocks = rows.empty() ? 0 : int64_t(rows[0].size() / 2);
    for (size_t i = 0; i < rows.size(); ++i) m.sample_ids.push_back("s" + std::to_string(i));
    m.labels = std::move(labels);
    m.rows = std::move(rows);
    return m;
}

FeatureVector fv_of(std::vector<double> values) {
    FeatureVector fv;
    fv.sample_id = "q";
    fv.values = std::move(values);
    return fv;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(31);
    const size_t n = 24, d = 6;
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
        for (auto& v : x[i]) v = rng.real() * 4.0 - 2.0;
        y[i] = rng.below(2) ? 1 : 0;
    }
    const double lambda1 = 0.37, lambda2 = 0.21;
    const double h = 1e-6;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> w(d);
        // Keep every coordinate away from the L1 kink.
        for (auto& wi : w) {
            wi = (rng.real() + 0.15) * (rng.below(2) ? 1.0 : -1.0);
        }
        double b = rng.real() * 2.0 - 1.0;

        std::vector<double> grad;
        double grad_b = 0.0;
        elastic_loss_gradient(x, y, w, b, lambda1, lambda2, grad, grad_b);

        for (size_t c = 0; c <= d; ++c) {
            auto wl = w, wr = w;
            double bl = b, br = b;
            if (c < d) {
                wl[c] -= h;
                wr[c] += h;
            } else {
                bl -= h;
                br += h;
            }
            const double fd = (elastic_loss(x, y, wr, br, lambda1, lambda2) -
                               elastic_loss(x, y, wl, bl, lambda1, lambda2)) /
                              (2.0 * h);
            const double an = (c < d) ? grad[c] : grad_b;
            const double rel = std::abs(fd - an) / std::max(1e-2, std::abs(an));
            CHECK(rel <= 1e-5);
        }
    }
}

TEST_CASE("separable single feature trains to perfect accuracy") {
    // n must be large enough that the L1 weight of the default C does not
    // null the solution: lambda1 = l1_ratio/(c*n) = 0.25 < 0.5 here.
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        rows.push_back({0.0, 0.0});
        labels.push_back(0);
        rows.push_back({100.0, 1.0});
        labels.push_back(1);
    }
    const auto m = matrix_of(rows, labels);
    const auto model = fit(m, "fam", "fp", "blocks:1");
    CHECK(model.weights[0] > 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto p = predict(model, fv_of(rows[i]));
        CHECK(p.positive == (labels[i] == 1));
    }
}

TEST_CASE("symmetric data puts the midpoint at exactly one half") {
    const auto m = matrix_of({{-1.0, 0.0}, {1.0, 0.0}}, {0, 1});
    const auto model = fit(m, "fam", "fp", "blocks:1");
    CHECK(model.bias == 0.0);
    const auto p = predict(model, fv_of({0.0, 0.0}));
    CHECK(p.probability == 0.5);
    CHECK(p.positive);  // threshold is inclusive
}

TEST_CASE("zero weights and bias give exactly one half") {
    FamilyModel model;
    model.weights = {0.0, 0.0};
    model.means = {0.0, 0.0};
    model.stds = {1.0, 1.0};
    const auto p = predict(model, fv_of({3.0, 4.0}));
    CHECK(p.probability == 0.5);
}

TEST_CASE("negating weights and bias flips the probability") {
    FamilyModel model;
    model.weights = {0.7, -1.3};
    model.bias = 0.4;
    model.means = {1.0, 2.0};
    model.stds = {2.0, 3.0};
    auto flipped = model;
    for (auto& w : flipped.weights) w = -w;
    flipped.bias = -flipped.bias;
    const auto fv = fv_of({3.5, -1.25});
    const double p = predict(model, fv).probability;
    const double q = predict(flipped, fv).probability;
    CHECK(std::abs(p + q - 1.0) <= 1e-12);
}

TEST_CASE("training is deterministic") {
    Rng rng(55);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        const int y = i % 2;
        rows.push_back({rng.real() * 10 + (y ? 8.0 : 0.0), double(rng.below(4)),
                        rng.real() * 5 + (y ? 0.0 : 2.0), double(rng.below(3))});
        labels.push_back(y);
    }
    const auto m = matrix_of(rows, labels);
    const auto m1 = fit(m, "fam", "fp", "blocks:1,2");
    const auto m2 = fit(m, "fam", "fp", "blocks:1,2");
    CHECK(m1.weights == m2.weights);
    CHECK(m1.bias == m2.bias);
}

TEST_CASE("scaling a raw feature column does not change labels") {
    Rng rng(56);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        const int y = i % 2;
        rows.push_back({rng.real() * 3 + (y ? 2.0 : 0.0), rng.real() * 2 + (y ? 1.0 : 0.0)});
        labels.push_back(y);
    }
    auto scaled = rows;
    for (auto& r : scaled) r[1] *= 1000.0;

    TrainConfig cfg;
    cfg.c = 1.0;  // light regularization so weights stay live
    const auto m1 = fit(matrix_of(rows, labels), "fam", "fp", "blocks:1", cfg);
    const auto m2 = fit(matrix_of(scaled, labels), "fam", "fp", "blocks:1", cfg);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto p1 = predict(m1, fv_of(rows[i]));
        const auto p2 = predict(m2, fv_of(scaled[i]));
        CHECK(p1.positive == p2.positive);
        CHECK(std::abs(p1.probability - p2.probability) <= 1e-6);
    }
}

TEST_CASE("constant features get unit std and zero weight") {
    const auto m = matrix_of({{0.0, 7.0}, {1.0, 7.0}, {2.0, 7.0}, {3.0, 7.0}}, {0, 0, 1, 1});
    TrainConfig cfg;
    cfg.c = 10.0;  // keep the informative column's weight alive at n=4
    const auto model = fit(m, "fam", "fp", "blocks:1", cfg);
    CHECK(model.stds[1] == 1.0);
    CHECK(model.weights[1] == 0.0);
    CHECK(model.weights[0] != 0.0);
}

TEST_CASE("degenerate training inputs are rejected") {
    CHECK_THROWS_AS(fit(matrix_of({{1.0, 0.0}, {2.0, 0.0}}, {1, 1}), "f", "fp", "blocks:1"),
                    error);
    CHECK_THROWS_AS(fit(matrix_of({}, {}), "f", "fp", "blocks:1"), error);

    auto bad = matrix_of({{1.0, 0.0}, {std::nan(""), 0.0}}, {0, 1});
    CHECK_THROWS_WITH_AS(fit(bad, "f", "fp", "blocks:1"), doctest::Contains("s1"), error);

    const auto good = matrix_of({{0.0, 0.0}, {1.0, 1.0}}, {0, 1});
    TrainConfig cfg;
    cfg.c = 0.0;
    CHECK_THROWS_AS(fit(good, "f", "fp", "blocks:1", cfg), error);
}

TEST_CASE("bias-only model handles empty feature space") {
    FeatureMatrix m;
    m.n_blocks = 0;
    m.sample_ids = {"a", "b", "c", "d"};
    m.labels = {0, 1, 0, 1};
    m.rows = {{}, {}, {}, {}};
    const auto model = fit(m, "fam", "fp", "blocks:");
    CHECK(model.weights.empty());
    const auto p = predict(model, fv_of({}));
    CHECK(std::abs(p.probability - 0.5) <= 1e-4);  // balanced classes
}

TEST_CASE("model JSON round trips exactly") {
    Rng rng(57);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const int y = i % 2;
        rows.push_back({rng.real() * 7 + (y ? 3.0 : 0.0), double(rng.below(5))});
        labels.push_back(y);
    }
    const auto model = fit(matrix_of(rows, labels), "famZ", "2bit-msb;zrun=16", "blocks:4,9");
    const std::string path = "model_rt.tmp";
    save_model(model, path);
    const auto back = load_model(path);
    CHECK(back.family == model.family);
    CHECK(back.encoder_fingerprint == model.encoder_fingerprint);
    CHECK(back.feature_order == model.feature_order);
    CHECK(back.weights == model.weights);
    CHECK(back.bias == model.bias);
    CHECK(back.means == model.means);
    CHECK(back.stds == model.stds);
    CHECK(back.c == model.c);
    CHECK(back.l1_ratio == model.l1_ratio);
    CHECK(back.threshold == model.threshold);
    std::remove(path.c_str());
}

TEST_CASE("corrupt model files are rejected") {
    const std::string path = "model_bad.tmp";
    auto expect_throw = [&](const std::string& text) {
        write_text_file(path, text);
        CHECK_THROWS_AS(load_model(path), error);
    };
    expect_throw("not json at all");
    expect_throw(R"({"format":"other"})");
    expect_throw(
        R"({"format":"malign-model-v1","family":"f","encoder_fingerprint":"fp",
            "feature_order":"blocks:1","weights":[1.0,2.0],"bias":0.0,
            "means":[0.0],"stds":[1.0,1.0],"c":0.05,"l1_ratio":0.5,"threshold":0.5})");
    expect_throw(
        R"({"format":"malign-model-v1","family":"f","encoder_fingerprint":"fp",
            "feature_order":"blocks:1","weights":[1.0,2.0],"bias":0.0,
            "means":[0.0,0.0],"stds":[1.0,0.0],"c":0.05,"l1_ratio":0.5,"threshold":0.5})");
    std::remove(path.c_str());
}

TEST_CASE("mismatched feature width is rejected at predict time") {
    FamilyModel model;
    model.family = "fam";
    model.feature_order = "blocks:1";
    model.weights = {0.5, 0.5};
    model.means = {0.0, 0.0};
    model.stds = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(predict(model, fv_of({1.0})), doctest::Contains("blocks:1"), error);
}

TEST_SUITE_END();
