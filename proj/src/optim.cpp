#include "motif/optim.h"

#include <cmath>
#include <vector>

namespace motif {

AdamW::AdamW(AdamWConfig cfg, const ModelWeights& like) : cfg_(cfg), m_(zeros_like(like)), v_(zeros_like(like)) {}

void AdamW::step(ModelWeights& params, const ModelWeights& grads,
                 const std::function<bool(const std::string&)>& trainable) {
  ++t_;
  const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

  std::vector<Mat*> p, m, v;
  std::vector<const Mat*> g;
  std::vector<std::string> names;
  for_each_param(params, [&](const std::string& name, Mat& x) {
    names.push_back(name);
    p.push_back(&x);
  });
  for_each_param(m_, [&](const std::string&, Mat& x) { m.push_back(&x); });
  for_each_param(v_, [&](const std::string&, Mat& x) { v.push_back(&x); });
  for_each_param(grads, [&](const std::string&, const Mat& x) { g.push_back(&x); });

  for (size_t i = 0; i < p.size(); ++i) {
    if (trainable && !trainable(names[i])) continue;
    *m[i] = cfg_.beta1 * *m[i] + (1.0 - cfg_.beta1) * *g[i];
    *v[i] = cfg_.beta2 * *v[i] + (1.0 - cfg_.beta2) * g[i]->cwiseProduct(*g[i]);
    if (cfg_.weight_decay > 0.0 && names[i].ends_with(".weight")) {
      *p[i] *= (1.0 - cfg_.learning_rate * cfg_.weight_decay);
    }
    p[i]->array() -= cfg_.learning_rate * (m[i]->array() / bias1) / ((v[i]->array() / bias2).sqrt() + cfg_.eps);
  }
}

}  // namespace motif
