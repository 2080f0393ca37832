#include "omdp/sd_mdp.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "omdp/kernels.hpp"

namespace omdp {

std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::shrinking_dartboard: return "sd-mdp";
    case UpdateRule::exponential_weights: return "ewa-mdp";
  }
  return "?";
}

std::optional<UpdateRule> parse_update_rule(std::string_view name) {
  if (name == "sd-mdp") return UpdateRule::shrinking_dartboard;
  if (name == "ewa-mdp") return UpdateRule::exponential_weights;
  return std::nullopt;
}

namespace {

std::size_t checked_class_size(const std::shared_ptr<const std::vector<Policy>>& policies) {
  if (!policies || policies->empty()) {
    throw std::invalid_argument("SdMdpLearner: empty policy class");
  }
  return policies->size();
}

}  // namespace

SdMdpLearner::SdMdpLearner(std::shared_ptr<const std::vector<Policy>> policy_class,
                           ProblemShape shape, std::size_t horizon, std::size_t x0,
                           UpdateRule rule)
    : policies_(std::move(policy_class)),
      shape_(shape),
      horizon_(horizon),
      x0_(x0),
      rule_(rule),
      experts_(checked_class_size(policies_), learning_rate(policies_->size(), horizon)),
      dists_(policies_->size() * shape.num_states, 0.0),
      costs_(policies_->size(), 0.0) {
  if (x0 >= shape.num_states) {
    throw std::out_of_range(fmt::format("SdMdpLearner: x0 = {} out of range", x0));
  }
  for (const auto& p : *policies_) {
    if (p.shape() != shape) throw ShapeMismatch("SdMdpLearner: policy shape differs");
  }
  for (std::size_t i = 0; i < policies_->size(); ++i) dists_[i * shape.num_states + x0] = 1.0;
}

SdMdpLearner::SdMdpLearner(std::vector<Policy> policy_class, ProblemShape shape,
                           std::size_t horizon, std::size_t x0, UpdateRule rule)
    : SdMdpLearner(std::make_shared<const std::vector<Policy>>(std::move(policy_class)), shape,
                   horizon, x0, rule) {}

ExpertChoice SdMdpLearner::choose_policy(RandomStream& rng) {
  return rule_ == UpdateRule::shrinking_dartboard ? sd_choose(experts_, rng)
                                                   : ewa_choose(experts_, rng);
}

std::span<const double> SdMdpLearner::observe(const TransitionModel& model,
                                              const LossFunction& loss) {
  if (model.shape() != shape_ || loss.shape() != shape_) {
    throw ShapeMismatch("SdMdpLearner::observe: model or loss shape differs");
  }
  if (policies_->size() >= kernels::kParallelClassThreshold) {
    kernels::observe_class_parallel(*policies_, model, loss, dists_, costs_);
  } else {
    kernels::observe_class_serial(*policies_, model, loss, dists_, costs_);
  }
  if (rule_ == UpdateRule::shrinking_dartboard) {
    sd_update(experts_, costs_);
  } else {
    ewa_update(experts_, costs_);
  }
  return costs_;
}

}  // namespace omdp
