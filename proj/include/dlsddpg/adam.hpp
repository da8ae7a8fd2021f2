#pragma once

#include "dlsddpg/linalg.hpp"

#include <cstdint>
#include <vector>

namespace dlsddpg {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First/second moment accumulators for a fixed list of tensors, plus the
// shared step counter. The tensor order is fixed by the caller and must be
// the same on every step.
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t t = 0;

    AdamState() = default;

    explicit AdamState(const std::vector<const Matrix*>& tensors) {
        for (const Matrix* p : tensors) {
            m.push_back(Matrix::Zero(p->rows(), p->cols()));
            v.push_back(Matrix::Zero(p->rows(), p->cols()));
        }
    }

    void step(const std::vector<Matrix*>& params,
              const std::vector<const Matrix*>& grads,
              const AdamConfig& cfg) {
        ++t;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Matrix& g = *grads[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
            const Matrix m_hat = m[i] / bc1;
            const Matrix v_hat = v[i] / bc2;
            params[i]->array() -=
                cfg.learning_rate * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
        }
    }
};

} // namespace dlsddpg
