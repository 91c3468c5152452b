#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "localmq/errors.hpp"
#include "localmq/learners.hpp"
#include "localmq/oracles.hpp"

namespace localmq {

using NoisyLearner = std::function<LearnOutcome(OracleSession&, const LearnerConfig&)>;

struct EtaSearchOptions {
  std::size_t validation_samples = 20000;
  double tie_tolerance = 0.005;  // validation errors this close count as tied
};

struct EtaCandidate {
  double eta = 0;
  double validation_error = 1;
  bool completed = false;
};

struct EtaSearchResult {
  LearnOutcome outcome;
  double selected_eta = 0;
  double step = 0;
  std::vector<EtaCandidate> grid;

  nlohmann::json to_json() const {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& c : grid)
      g.push_back({{"eta", c.eta}, {"validation_error", c.validation_error}, {"completed", c.completed}});
    return {{"selected_eta", selected_eta}, {"step", step}, {"grid", g}, {"outcome", outcome.to_json()}};
  }
};

// Unknown noise rate: run the learner at every guess on a grid of step
// epsilon/8 over [0, 1/2) and score each hypothesis on a validation sample
// drawn first. Among runs whose validation error is within the tolerance of
// the best, the guess closest to that best error wins; a good hypothesis errs
// on noisy labels at roughly the noise rate. Runs that exceed their set cap
// are skipped.
inline EtaSearchResult eta_binary_search(OracleSession& session, const NoisyLearner& learner,
                                         LearnerConfig cfg, EtaSearchOptions opt = {}) {
  cfg.validate();
  if (opt.validation_samples == 0) throw ConfigError("eta search needs a validation sample");
  std::vector<std::uint32_t> vx(opt.validation_samples);
  std::vector<double> vy(opt.validation_samples);
  for (std::size_t j = 0; j < vx.size(); ++j) {
    const auto ex = session.draw_example();
    vx[j] = ex.bits;
    vy[j] = ex.label;
  }
  EtaSearchResult res;
  res.step = cfg.epsilon / 8.0;
  std::vector<std::optional<LearnOutcome>> runs;
  for (int k = 0;; ++k) {
    const double guess = k * res.step;
    if (guess >= 0.5) break;
    EtaCandidate cand;
    cand.eta = guess;
    LearnerConfig c = cfg;
    c.eta = guess;
    try {
      auto out = learner(session, c);
      std::size_t wrong = 0;
      for (std::size_t j = 0; j < vx.size(); ++j)
        if (out.predict(vx[j]) != vy[j]) ++wrong;
      cand.validation_error = static_cast<double>(wrong) / static_cast<double>(vx.size());
      cand.completed = true;
      runs.emplace_back(std::move(out));
    } catch (const BudgetExceeded&) {
      runs.emplace_back(std::nullopt);
    }
    res.grid.push_back(cand);
  }
  double best = 2.0;
  for (const auto& c : res.grid)
    if (c.completed) best = std::min(best, c.validation_error);
  if (best > 1.0) throw BudgetExceeded("eta search: every guess exceeded its set cap");
  std::size_t pick = 0;
  double pick_gap = 2.0;
  for (std::size_t k = 0; k < res.grid.size(); ++k) {
    const auto& c = res.grid[k];
    if (!c.completed || c.validation_error > best + opt.tie_tolerance) continue;
    const double gap = std::abs(c.eta - best);
    if (gap < pick_gap) {
      pick_gap = gap;
      pick = k;
    }
  }
  res.selected_eta = res.grid[pick].eta;
  res.outcome = std::move(*runs[pick]);
  res.outcome.params["eta_search"] = {{"selected", res.selected_eta},
                                      {"validation_error", res.grid[pick].validation_error},
                                      {"validation_samples", opt.validation_samples}};
  return res;
}

}  // namespace localmq
