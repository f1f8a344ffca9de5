// Copyright 2026 The hypernews Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "hypernews/dhsl.hpp"
#include "hypernews/hyper_encoder.hpp"
#include "hypernews/model.hpp"
#include "hypernews/prop_encoder.hpp"

namespace hypernews::testing {

struct GradCase {
  std::string name;
  std::vector<Parameter*> params;
  std::function<Var(Tape&)> loss;
};

/// Finite-difference cases for every recorded op, each encoder stage and the
/// full objective on an 8-news / 3-hyperedge / d_in = 8 instance. Owns the
/// parameters the cases close over, so it is neither copied nor moved.
class GradientSuite {
 public:
  GradientSuite() : inst_(random_instance(77, 8, 3, 8)) {
    Rng rng(2024);
    a_ = &make("a", random_matrix(4, 3, rng));
    b_ = &make("b", random_matrix(4, 3, rng));
    c_ = &make("c", random_matrix(3, 5, rng));
    row_ = &make("row", random_matrix(1, 3, rng));
    pos_ = &make("pos", random_matrix(4, 3, rng, 0.5, 2.0));
    inc_ = &make("inc", random_matrix(4, 2, rng, 0.1, 1.0));
    alpha_ = &make("alpha", random_matrix(1, 3, rng));
    probs_ = &make("probs", random_matrix(8, 2, rng, 0.1, 1.0));

    config_ = small_config(8, 6);
    for (bool dhsl : {false, true}) {
      ModelConfig c = config_;
      c.dhsl = dhsl;
      models_.push_back(std::make_unique<ModelParams>(ModelParams::init(c, rng)));
      models_.back()->fusion.value() = random_matrix(1, 3, rng);
      models_.back()->dhsl.w_ebd.value() = random_matrix(1, 6, rng, 0.2, 1.5);
      models_.back()->dhsl.w_text.value() = random_matrix(1, 6, rng, 0.2, 1.5);
    }
    build();
  }
  GradientSuite(const GradientSuite&) = delete;
  GradientSuite& operator=(const GradientSuite&) = delete;

  const std::vector<GradCase>& cases() const { return cases_; }

 private:
  Parameter& make(std::string name, Matrix value) { return store_.emplace_back(std::move(name), std::move(value)); }

  void add_case(std::string name, std::vector<Parameter*> ps, std::function<Var(Tape&)> f) {
    cases_.push_back({std::move(name), std::move(ps), std::move(f)});
  }

  void build() {
    Parameter* a = a_;
    Parameter* b = b_;
    Parameter* c = c_;
    Parameter* row = row_;
    Parameter* pos = pos_;
    Parameter* inc = inc_;

    add_case("matmul", {a, c}, [=](Tape& t) { return weighted_sum(matmul(t.parameter(*a), t.parameter(*c)), 1); });
    add_case("transpose", {a}, [=](Tape& t) { return weighted_sum(transpose(t.parameter(*a)), 2); });
    add_case("add", {a, b}, [=](Tape& t) { return weighted_sum(add(t.parameter(*a), t.parameter(*b)), 3); });
    add_case("sub", {a, b}, [=](Tape& t) { return weighted_sum(sub(t.parameter(*a), t.parameter(*b)), 4); });
    add_case("scale", {a}, [=](Tape& t) { return weighted_sum(scale(t.parameter(*a), -1.7), 5); });
    add_case("hadamard", {a, b}, [=](Tape& t) { return weighted_sum(hadamard(t.parameter(*a), t.parameter(*b)), 6); });
    add_case("add_row", {a, row}, [=](Tape& t) { return weighted_sum(add_row(t.parameter(*a), t.parameter(*row)), 7); });
    add_case("mul_row", {a, row}, [=](Tape& t) { return weighted_sum(mul_row(t.parameter(*a), t.parameter(*row)), 8); });
    add_case("scale_by_entry", {a, row},
        [=](Tape& t) { return weighted_sum(scale_by_entry(t.parameter(*a), t.parameter(*row), 1), 9); });
    add_case("relu", {a}, [=](Tape& t) { return weighted_sum(relu(t.parameter(*a)), 10); });
    add_case("leaky_relu", {a}, [=](Tape& t) { return weighted_sum(leaky_relu(t.parameter(*a), 0.2), 11); });
    add_case("exp", {a}, [=](Tape& t) { return weighted_sum(exp(t.parameter(*a)), 12); });
    add_case("log_clamped", {pos}, [=](Tape& t) { return weighted_sum(log_clamped(t.parameter(*pos), 1e-12), 13); });
    add_case("clamp", {a}, [=](Tape& t) { return weighted_sum(clamp(t.parameter(*a), -0.5, 0.5), 14); });
    add_case("sum", {a}, [=](Tape& t) { return sum(t.parameter(*a)); });
    add_case("mean", {a}, [=](Tape& t) { return mean(hadamard(t.parameter(*a), t.parameter(*a))); });
    add_case("row_sums", {a}, [=](Tape& t) { return weighted_sum(row_sums(t.parameter(*a)), 15); });
    add_case("gather_rows", {a}, [=](Tape& t) {
      const std::vector<Eigen::Index> rows{3, 0, 3};
      return weighted_sum(gather_rows(t.parameter(*a), rows), 16);
    });
    add_case("gather_entries", {a}, [=](Tape& t) {
      const std::vector<std::pair<Eigen::Index, Eigen::Index>> picks{{0, 1}, {2, 2}, {0, 1}};
      return weighted_sum(gather_entries(t.parameter(*a), picks), 17);
    });
    add_case("normalize_rows", {a}, [=](Tape& t) { return weighted_sum(normalize_rows(t.parameter(*a)), 18); });
    add_case("cosine_matrix", {a, b},
        [=](Tape& t) { return weighted_sum(cosine_matrix(t.parameter(*a), t.parameter(*b)), 19); });
    add_case("softmax_rows", {a}, [=](Tape& t) { return weighted_sum(softmax_rows(t.parameter(*a)), 20); });
    add_case("masked softmax_rows", {a}, [=](Tape& t) {
      BoolMatrix mask(4, 3);
      mask << true, false, true, false, false, false, true, true, true, false, true, false;
      return weighted_sum(softmax_rows(t.parameter(*a), mask), 21);
    });
    add_case("dropout", {a}, [=](Tape& t) {
      Rng rng(99);
      return weighted_sum(dropout(t.parameter(*a), 0.3, Mode::kTrain, rng), 22);
    });
    auto sp = std::make_shared<SparseMatrix>(3, 4);
    sp->insert(0, 1) = 0.5;
    sp->insert(0, 3) = 0.5;
    sp->insert(2, 0) = 1.0;
    sp->makeCompressed();
    std::shared_ptr<const SparseMatrix> csp = sp;
    add_case("spmm", {a}, [=](Tape& t) { return weighted_sum(spmm(csp, t.parameter(*a)), 23); });
    add_case("div_rows_guarded", {a, pos}, [=](Tape& t) {
      return weighted_sum(div_rows_guarded(t.parameter(*a), row_sums(t.parameter(*pos))), 24);
    });
    add_case("weighted_column_mean", {inc, a},
        [=](Tape& t) { return weighted_sum(weighted_column_mean(t.parameter(*inc), t.parameter(*a)), 25); });

    build_stages();
    build_objectives();
  }

  void build_stages() {
    ModelParams& m = *models_.back();
    const Instance* inst = &inst_;
    Parameter* alpha = alpha_;
    Parameter* probs = probs_;
    const double p_thd = config_.p_thd;

    std::vector<Parameter*> sage{&m.prop.layers[0].self, &m.prop.layers[0].neighbor};
    add_case("sage_layer", sage, [=, &m](Tape& t) {
      return weighted_sum(sage_layer(t.constant(inst->inputs.prop.features), inst->inputs.prop.mean_adj,
                                     t.parameter(m.prop.layers[0].self), t.parameter(m.prop.layers[0].neighbor)),
                          30);
    });

    auto& l0 = m.hg.layers[0];
    add_case("v2e_layer", {&l0.w1, &l0.att}, [=, &l0](Tape& t) {
      Var p = matmul(t.constant(inst->inputs.text), t.parameter(l0.w1));
      return weighted_sum(v2e_layer(p, t.constant(inst->inputs.incidence), t.parameter(l0.att)), 31);
    });
    add_case("e2v_layer", {&l0.w1, &l0.w2, &l0.att}, [=, &l0](Tape& t) {
      Var p = matmul(t.constant(inst->inputs.text), t.parameter(l0.w1));
      Var h = t.constant(inst->inputs.incidence);
      Var u = v2e_layer(p, h, t.parameter(l0.att));
      return weighted_sum(e2v_layer(p, u, h, t.parameter(l0.w2), t.parameter(l0.att)), 32);
    });
    add_case("similarity_matrix", {&l0.w1, &m.dhsl.w_ebd}, [=, &l0, &m](Tape& t) {
      Var p = matmul(t.constant(inst->inputs.text), t.parameter(l0.w1));
      Var u = weighted_column_mean(t.constant(inst->inputs.incidence), p);
      return weighted_sum(similarity_matrix(p, u, t.parameter(m.dhsl.w_ebd)), 33);
    });
    add_case("topk_structure", {&l0.w1, &m.dhsl.w_ebd}, [=, &l0, &m](Tape& t) {
      Var p = matmul(t.constant(inst->inputs.text), t.parameter(l0.w1));
      Var u = weighted_column_mean(t.constant(inst->inputs.incidence), p);
      return weighted_sum(topk_structure(similarity_matrix(p, u, t.parameter(m.dhsl.w_ebd)), p_thd), 34);
    });
    add_case("text_structure", {&m.dhsl.text_proj, &m.dhsl.w_text}, [=, &m](Tape& t) {
      Var projected = matmul(t.constant(inst->inputs.text), t.parameter(m.dhsl.text_proj));
      return weighted_sum(
          text_structure(projected, t.constant(inst->inputs.incidence), t.parameter(m.dhsl.w_text), p_thd), 35);
    });
    add_case("fuse_structures", {inc_, alpha}, [=, this](Tape& t) {
      Var h = t.parameter(*inc_);
      Var scaled = scale(h, 0.5);
      return weighted_sum(fuse_structures(h, scaled, relu(sub(h, t.constant(Matrix::Constant(4, 2, 0.3)))),
                                          t.parameter(*alpha)),
                          36);
    });
    add_case("ce_loss", {probs}, [=](Tape& t) {
      const auto batch = all_indices(8);
      return ce_loss(softmax_rows(t.parameter(*probs)), inst->inputs.labels, batch);
    });
    add_case("infonce_loss", {&l0.w1, probs}, [=, &l0](Tape& t) {
      const auto batch = all_indices(8);
      Var x = matmul(t.constant(inst->inputs.text), t.parameter(l0.w1));
      Var y = matmul(t.parameter(*probs), t.constant(Matrix::Ones(2, 6)));
      return infonce_loss(x, add(y, x), inst->inputs.labels, batch, 0.5);
    });
  }

  void build_objectives() {
    for (std::size_t k = 0; k < models_.size(); ++k) {
      ModelParams* m = models_[k].get();
      ModelConfig cfg = config_;
      cfg.dhsl = k == 1;
      const Instance* inst = &inst_;
      add_case(cfg.dhsl ? "end-to-end loss (structure learning on)" : "end-to-end loss (structure learning off)", m->all(),
          [=](Tape& t) {
            Rng rng(0);
            const std::vector<Eigen::Index> batch{0, 1, 2, 4, 5, 7};
            ForwardResult f = model_forward(t, inst->inputs, cfg, *m, Mode::kEval, rng);
            return compute_loss(f, inst->inputs, cfg, batch).total;
          });
    }
  }

  std::deque<Parameter> store_;
  Parameter *a_, *b_, *c_, *row_, *pos_, *inc_, *alpha_, *probs_;
  Instance inst_;
  ModelConfig config_;
  std::vector<std::unique_ptr<ModelParams>> models_;
  std::vector<GradCase> cases_;
};

}  // namespace hypernews::testing
