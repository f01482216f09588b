#include "malign/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "malign/common.hpp"

namespace malign {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double log1p_exp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double margin(const std::vector<double>& row, const std::vector<double>& w, double bias) {
    double z = bias;
    for (size_t d = 0; d < w.size(); ++d) z += w[d] * row[d];
    return z;
}

// Largest eigenvalue of (1/n) * A^T A where A is the standardized design
// matrix with a trailing all-ones bias column. Fixed-iteration power method,
// deterministic.
double power_iteration_rowscale(const std::vector<std::vector<double>>& x) {
    const size_t n = x.size();
    const size_t d = x.empty() ? 0 : x[0].size();
    const size_t cols = d + 1;
    Rng rng(0x9e3779b97f4a7c15ull);
    std::vector<double> v(cols);
    for (auto& e : v) e = rng.real() + 0.1;
    std::vector<double> av(n), atav(cols);
    double eig = 1.0;
    for (int it = 0; it < 100; ++it) {
        for (size_t i = 0; i < n; ++i) {
            double s = v[d];
            for (size_t c = 0; c < d; ++c) s += x[i][c] * v[c];
            av[i] = s;
        }
        std::fill(atav.begin(), atav.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t c = 0; c < d; ++c) atav[c] += x[i][c] * av[i];
            atav[d] += av[i];
        }
        double norm = 0.0;
        for (const double e : atav) norm += e * e;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 1.0 / double(n);
        eig = norm;
        for (size_t c = 0; c < cols; ++c) v[c] = atav[c] / norm;
    }
    return eig / double(n);
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

std::string feature_order_fingerprint(const Signature& sig) {
    std::string s = "blocks:";
    for (size_t i = 0; i < sig.blocks.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(sig.blocks[i].block_id);
    }
    return s;
}

double elastic_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const std::vector<double>& w, double bias, double lambda1, double lambda2) {
    const size_t n = x.size();
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double z = margin(x[i], w, bias);
        loss += log1p_exp(z) - (y[i] ? z : 0.0);
    }
    loss /= double(n);
    double l1 = 0.0, l2 = 0.0;
    for (const double wi : w) {
        l1 += std::abs(wi);
        l2 += wi * wi;
    }
    return loss + lambda1 * l1 + lambda2 * 0.5 * l2;
}

void elastic_loss_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                           const std::vector<double>& w, double bias, double lambda1,
                           double lambda2, std::vector<double>& grad_w, double& grad_b) {
    const size_t n = x.size();
    const size_t d = w.size();
    grad_w.assign(d, 0.0);
    grad_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = sigmoid(margin(x[i], w, bias)) - (y[i] ? 1.0 : 0.0);
        for (size_t c = 0; c < d; ++c) grad_w[c] += r * x[i][c];
        grad_b += r;
    }
    for (size_t c = 0; c < d; ++c) {
        grad_w[c] = grad_w[c] / double(n) + lambda2 * w[c] +
                    lambda1 * (w[c] > 0.0 ? 1.0 : (w[c] < 0.0 ? -1.0 : 0.0));
    }
    grad_b /= double(n);
}

FamilyModel fit(const FeatureMatrix& features, const std::string& family,
                const std::string& encoder_fingerprint, const std::string& feature_order,
                const TrainConfig& cfg) {
    const size_t n = features.rows.size();
    const size_t d = size_t(2 * features.n_blocks);
    if (n == 0) throw error("fit: no training samples");
    if (cfg.c <= 0.0) throw error("fit: c must be positive");
    if (cfg.l1_ratio < 0.0 || cfg.l1_ratio > 1.0) throw error("fit: l1_ratio must be in [0,1]");
    if (cfg.threshold <= 0.0 || cfg.threshold >= 1.0) {
        throw error("fit: threshold must be in (0,1)");
    }

    bool has_pos = false, has_neg = false;
    for (const int y : features.labels) (y ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw error("fit: training data has a single class");

    for (size_t i = 0; i < n; ++i) {
        if (features.rows[i].size() != d) {
            throw error("fit: sample '" + features.sample_ids[i] + "' has " +
                        std::to_string(features.rows[i].size()) + " features, expected " +
                        std::to_string(d));
        }
        for (const double v : features.rows[i]) {
            if (!std::isfinite(v)) {
                throw error("fit: non-finite feature in sample '" + features.sample_ids[i] + "'");
            }
        }
    }

    FamilyModel model;
    model.family = family;
    model.encoder_fingerprint = encoder_fingerprint;
    model.feature_order = feature_order;
    model.c = cfg.c;
    model.l1_ratio = cfg.l1_ratio;
    model.threshold = cfg.threshold;
    model.means.assign(d, 0.0);
    model.stds.assign(d, 1.0);

    std::vector<char> constant(d, 0);
    for (size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (size_t i = 0; i < n; ++i) mean += features.rows[i][c];
        mean /= double(n);
        double var = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double dlt = features.rows[i][c] - mean;
            var += dlt * dlt;
        }
        var /= double(n);
        model.means[c] = mean;
        if (var > 0.0) {
            model.stds[c] = std::sqrt(var);
        } else {
            constant[c] = 1;  // std stays 1, weight stays pinned at 0
        }
    }

    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < d; ++c) {
            x[i][c] = (features.rows[i][c] - model.means[c]) / model.stds[c];
        }
    }

    const double lambda1 = cfg.l1_ratio / (cfg.c * double(n));
    const double lambda2 = (1.0 - cfg.l1_ratio) / (cfg.c * double(n));

    // Proximal gradient with momentum. The logistic hessian is bounded by
    // A^T A / (4n), so this step size is safe for the smooth part.
    const double lip = power_iteration_rowscale(x) / 4.0 + lambda2;
    const double step = 1.0 / std::max(lip, 1e-12);

    std::vector<double> w(d, 0.0), w_prev(d, 0.0), yv(d, 0.0), grad(d, 0.0);
    double b = 0.0, b_prev = 0.0, yb = 0.0;
    double t_momentum = 1.0;
    double last_obj = elastic_loss(x, features.labels, w, b, lambda1, lambda2);

    for (int64_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        // Smooth gradient at the lookahead point (no L1 term; prox handles it).
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = sigmoid(margin(x[i], yv, yb)) - (features.labels[i] ? 1.0 : 0.0);
            for (size_t c = 0; c < d; ++c) grad[c] += r * x[i][c];
            grad_b += r;
        }

        std::vector<double> w_next(d);
        for (size_t c = 0; c < d; ++c) {
            if (constant[c]) {
                w_next[c] = 0.0;
                continue;
            }
            const double g = grad[c] / double(n) + lambda2 * yv[c];
            w_next[c] = soft_threshold(yv[c] - step * g, step * lambda1);
        }
        const double b_next = yb - step * (grad_b / double(n));

        const double obj = elastic_loss(x, features.labels, w_next, b_next, lambda1, lambda2);
        if (obj > last_obj) {
            // Momentum overshot; restart from the last accepted iterate.
            yv = w;
            yb = b;
            t_momentum = 1.0;
            continue;
        }

        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum)) / 2.0;
        const double beta = (t_momentum - 1.0) / t_next;
        for (size_t c = 0; c < d; ++c) yv[c] = w_next[c] + beta * (w_next[c] - w_prev[c]);
        yb = b_next + beta * (b_next - b_prev);
        t_momentum = t_next;

        w_prev = w;
        b_prev = b;
        w = std::move(w_next);
        b = b_next;

        if (std::abs(last_obj - obj) < cfg.tol) {
            last_obj = obj;
            break;
        }
        last_obj = obj;
    }

    model.weights = std::move(w);
    model.bias = b;
    return model;
}

Prediction predict(const FamilyModel& model, const FeatureVector& fv) {
    if (fv.values.size() != model.weights.size()) {
        throw error("predict: sample '" + fv.sample_id + "' has " +
                    std::to_string(fv.values.size()) + " features, model '" + model.family +
                    "' expects " + std::to_string(model.weights.size()) + " (" +
                    model.feature_order + ")");
    }
    double z = model.bias;
    for (size_t c = 0; c < model.weights.size(); ++c) {
        z += model.weights[c] * (fv.values[c] - model.means[c]) / model.stds[c];
    }
    Prediction p;
    p.sample_id = fv.sample_id;
    p.probability = sigmoid(z);
    p.positive = p.probability >= model.threshold;
    return p;
}

void save_model(const FamilyModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "malign-model-v1";
    j["family"] = model.family;
    j["encoder_fingerprint"] = model.encoder_fingerprint;
    j["feature_order"] = model.feature_order;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["means"] = model.means;
    j["stds"] = model.stds;
    j["c"] = model.c;
    j["l1_ratio"] = model.l1_ratio;
    j["threshold"] = model.threshold;
    write_text_file(path, j.dump(2) + "\n");
}

FamilyModel load_model(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw error("load_model: " + path + ": " + e.what());
    }
    try {
        if (j.at("format") != "malign-model-v1") {
            throw error("unrecognized format tag");
        }
        FamilyModel m;
        m.family = j.at("family").get<std::string>();
        m.encoder_fingerprint = j.at("encoder_fingerprint").get<std::string>();
        m.feature_order = j.at("feature_order").get<std::string>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.means = j.at("means").get<std::vector<double>>();
        m.stds = j.at("stds").get<std::vector<double>>();
        m.c = j.at("c").get<double>();
        m.l1_ratio = j.at("l1_ratio").get<double>();
        m.threshold = j.at("threshold").get<double>();
        if (m.means.size() != m.weights.size() || m.stds.size() != m.weights.size()) {
            throw error("weights, means and stds disagree on length");
        }
        for (const double s : m.stds) {
            if (!(s > 0.0)) throw error("stds must be positive");
        }
        for (const double v : m.weights) {
            if (!std::isfinite(v)) throw error("non-finite weight");
        }
        if (!std::isfinite(m.bias)) throw error("non-finite bias");
        if (!(m.threshold > 0.0 && m.threshold < 1.0)) throw error("threshold out of range");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw error("load_model: " + path + ": " + e.what());
    }
}

Detection detect(const NucleotideSequence& sample, const std::vector<FamilyDetector>& detectors,
                 const FeaturizeParams& params) {
    if (detectors.empty()) throw error("detect: no family detectors");
    for (const auto& fd : detectors) {
        if (fd.model.encoder_fingerprint != detectors.front().model.encoder_fingerprint) {
            throw error("detect: detectors disagree on encoder fingerprint");
        }
        if (fd.model.encoder_fingerprint != fd.signature.fingerprint) {
            throw error("detect: model '" + fd.model.family +
                        "' does not match its signature's encoder fingerprint");
        }
        if (feature_order_fingerprint(fd.signature) != fd.model.feature_order) {
            throw error("detect: model '" + fd.model.family +
                        "' does not match its signature's block layout");
        }
    }
    Detection det;
    det.sample_id = sample.id;
    for (const auto& fd : detectors) {
        const auto fv = score_sample(sample, fd.signature, params);
        const auto p = predict(fd.model, fv);
        det.per_family.emplace_back(fd.model.family, p.probability);
        if (p.positive && (det.benign || p.probability > det.probability)) {
            det.benign = false;
            det.family = fd.model.family;
            det.probability = p.probability;
        }
    }
    return det;
}

}  // namespace malign
