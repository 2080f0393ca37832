#include "omdp/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "omdp/kernels.hpp"
#include "omdp/mixing.hpp"
#include "omdp/random.hpp"

namespace omdp {

namespace {

// Stream tags for the fixed components of a script.
constexpr std::uint64_t kModelA = 0x100;
constexpr std::uint64_t kModelB = 0x101;
constexpr std::uint64_t kLossA = 0x200;
constexpr std::uint64_t kLossB = 0x201;
constexpr std::uint64_t kPhases = 0x300;
constexpr std::uint64_t kRoundBase = 0x1'0000'0000ULL;

RandomStream component_stream(std::uint64_t seed, std::uint64_t tag) {
  return RandomStream(mix_seed(seed, tag));
}

RandomStream round_stream(std::uint64_t seed, std::size_t t) {
  return RandomStream(mix_seed(seed, kRoundBase + t));
}

TransitionModel smoothed_component(const AdversaryScript& s, std::uint64_t tag) {
  auto rng = component_stream(s.seed, tag);
  return smooth_model(random_model(s.shape, rng), s.gamma);
}

LossFunction uniform_loss(const ProblemShape& shape, RandomStream& rng, double scale = 1.0) {
  std::vector<double> values(shape.num_states * shape.num_actions);
  for (double& v : values) v = scale * rng.uniform();
  return LossFunction(shape, std::move(values));
}

LossFunction loss_component(const AdversaryScript& s, std::uint64_t tag, double scale = 1.0) {
  auto rng = component_stream(s.seed, tag);
  return uniform_loss(s.shape, rng, scale);
}

LossFunction sinusoidal(const AdversaryScript& s, std::size_t t) {
  auto rng = component_stream(s.seed, kPhases);
  std::vector<double> values(s.shape.num_states * s.shape.num_actions);
  const double omega = 2.0 * std::numbers::pi / static_cast<double>(s.period);
  for (double& v : values) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    v = std::clamp(0.5 + 0.5 * std::sin(omega * static_cast<double>(t) + phase), 0.0, 1.0);
  }
  return LossFunction(s.shape, std::move(values));
}

// Replays the script's own comparators over all deterministic policies and
// loads loss 1 onto the actions of the one with the smallest cumulative
// expected loss, refreshing the target every `period` rounds.
class LeaderPunisher {
 public:
  explicit LeaderPunisher(const AdversaryScript& s)
      : script_(s),
        model_(smoothed_component(s, kModelA)),
        base_(loss_component(s, kLossA, 0.5)),
        policies_(enumerate_deterministic_policies(s.shape)),
        dists_(policies_.size() * s.shape.num_states, 0.0),
        costs_(policies_.size(), 0.0),
        cumulative_(policies_.size(), 0.0) {
    if (s.x0 >= s.shape.num_states) {
      throw std::out_of_range("leader-punisher: x0 out of range");
    }
    for (std::size_t i = 0; i < policies_.size(); ++i) {
      dists_[i * s.shape.num_states + s.x0] = 1.0;
    }
  }

  RoundData next() {
    ++t_;
    if ((t_ - 1) % script_.period == 0) {
      leader_ = static_cast<std::size_t>(
          std::min_element(cumulative_.begin(), cumulative_.end()) - cumulative_.begin());
    }
    const auto& shape = script_.shape;
    std::vector<double> values(base_.data().begin(), base_.data().end());
    const Policy& target = policies_[leader_];
    for (std::size_t x = 0; x < shape.num_states; ++x) {
      for (std::size_t a = 0; a < shape.num_actions; ++a) {
        if (target(x, a) == 1.0) values[x * shape.num_actions + a] = 1.0;
      }
    }
    LossFunction loss(shape, std::move(values));
    kernels::observe_class_serial(policies_, model_, loss, dists_, costs_);
    for (std::size_t i = 0; i < costs_.size(); ++i) cumulative_[i] += costs_[i];
    return RoundData{model_, std::move(loss)};
  }

 private:
  const AdversaryScript& script_;
  TransitionModel model_;
  LossFunction base_;
  std::vector<Policy> policies_;
  std::vector<double> dists_;
  std::vector<double> costs_;
  std::vector<double> cumulative_;
  std::size_t leader_ = 0;
  std::size_t t_ = 0;
};

void check_round(const AdversaryScript& script, std::size_t t) {
  if (t == 0 || t > script.horizon) {
    throw std::out_of_range(
        fmt::format("adversary: round {} outside 1..{}", t, script.horizon));
  }
}

RoundData emit_stateless(const AdversaryScript& s, std::size_t t) {
  switch (s.kind) {
    case AdversaryKind::fixed:
      return {smoothed_component(s, kModelA), loss_component(s, kLossA)};
    case AdversaryKind::model_switching: {
      const bool second = ((t - 1) / s.period) % 2 == 1;
      return {smoothed_component(s, second ? kModelB : kModelA),
              loss_component(s, second ? kLossB : kLossA)};
    }
    case AdversaryKind::random_smoothed: {
      auto rng = round_stream(s.seed, t);
      auto model = smooth_model(random_model(s.shape, rng), s.gamma);
      auto loss = uniform_loss(s.shape, rng);
      return {std::move(model), std::move(loss)};
    }
    case AdversaryKind::sinusoidal_loss:
      return {smoothed_component(s, kModelA), sinusoidal(s, t)};
    case AdversaryKind::scripted: {
      const auto& models = *s.scripted_models;
      const auto& losses = *s.scripted_losses;
      return {models[(t - 1) % models.size()], losses[(t - 1) % losses.size()]};
    }
    case AdversaryKind::leader_punisher: break;
  }
  throw std::logic_error("emit_stateless: unsupported kind");
}

}  // namespace

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::fixed: return "fixed";
    case AdversaryKind::model_switching: return "model-switching";
    case AdversaryKind::random_smoothed: return "random-smoothed";
    case AdversaryKind::leader_punisher: return "leader-punisher-oblivious";
    case AdversaryKind::sinusoidal_loss: return "sinusoidal-loss";
    case AdversaryKind::scripted: return "scripted";
  }
  return "?";
}

std::optional<AdversaryKind> parse_adversary_kind(std::string_view name) {
  for (auto kind : {AdversaryKind::fixed, AdversaryKind::model_switching,
                    AdversaryKind::random_smoothed, AdversaryKind::leader_punisher,
                    AdversaryKind::sinusoidal_loss, AdversaryKind::scripted}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string AdversaryScript::describe() const {
  return fmt::format("{}(seed={},gamma={},period={})", to_string(kind), seed, gamma, period);
}

void AdversaryScript::validate() const {
  if (kind != AdversaryKind::scripted && !(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument(fmt::format("adversary: gamma {} outside (0,1]", gamma));
  }
  if (period == 0) throw std::invalid_argument("adversary: period must be positive");
  if (kind == AdversaryKind::scripted) {
    if (!scripted_models || scripted_models->empty() || !scripted_losses ||
        scripted_losses->empty()) {
      throw std::invalid_argument("adversary: scripted kind needs models and losses");
    }
    for (const auto& m : *scripted_models) {
      if (m.shape() != shape) throw ShapeMismatch("adversary: scripted model shape differs");
    }
    for (const auto& l : *scripted_losses) {
      if (l.shape() != shape) throw ShapeMismatch("adversary: scripted loss shape differs");
    }
  }
}

RoundData emit(const AdversaryScript& script, std::size_t t) {
  script.validate();
  check_round(script, t);
  if (script.kind != AdversaryKind::leader_punisher) return emit_stateless(script, t);
  LeaderPunisher replay(script);
  for (std::size_t s = 1; s < t; ++s) replay.next();
  return replay.next();
}

AdversarySequence::AdversarySequence(ProblemShape shape, std::vector<TransitionModel> models,
                                     std::vector<LossFunction> losses)
    : shape_(shape), models_(std::move(models)), losses_(std::move(losses)) {
  if (models_.size() != losses_.size()) {
    throw ShapeMismatch("AdversarySequence: models and losses differ in length");
  }
  for (const auto& m : models_) {
    if (m.shape() != shape_) throw ShapeMismatch("AdversarySequence: model shape differs");
  }
  for (const auto& l : losses_) {
    if (l.shape() != shape_) throw ShapeMismatch("AdversarySequence: loss shape differs");
  }
}

AdversarySequence AdversarySequence::prefix(std::size_t T) const {
  if (T > horizon()) throw std::out_of_range("AdversarySequence::prefix: beyond horizon");
  return AdversarySequence(shape_, {models_.begin(), models_.begin() + static_cast<std::ptrdiff_t>(T)},
                           {losses_.begin(), losses_.begin() + static_cast<std::ptrdiff_t>(T)});
}

std::size_t sequence_bytes(const ProblemShape& shape, std::size_t T) {
  const std::size_t per_round =
      sizeof(double) * (shape.num_states * shape.num_actions * (shape.num_states + 1)) +
      sizeof(TransitionModel) + sizeof(LossFunction);
  return per_round * T;
}

AdversarySequence precompute(const AdversaryScript& script, std::size_t T,
                             std::size_t memory_cap) {
  script.validate();
  if (T > script.horizon) {
    throw std::out_of_range(fmt::format("precompute: T = {} beyond script horizon {}", T, script.horizon));
  }
  if (sequence_bytes(script.shape, T) > memory_cap) {
    throw std::length_error(fmt::format("precompute: {} rounds need {} bytes, cap is {}", T,
                                        sequence_bytes(script.shape, T), memory_cap));
  }
  std::vector<TransitionModel> models;
  std::vector<LossFunction> losses;
  models.reserve(T);
  losses.reserve(T);
  if (script.kind == AdversaryKind::leader_punisher) {
    LeaderPunisher gen(script);
    for (std::size_t t = 1; t <= T; ++t) {
      auto round = gen.next();
      models.push_back(std::move(round.model));
      losses.push_back(std::move(round.loss));
    }
  } else {
    for (std::size_t t = 1; t <= T; ++t) {
      auto round = emit_stateless(script, t);
      models.push_back(std::move(round.model));
      losses.push_back(std::move(round.loss));
    }
  }
  return AdversarySequence(script.shape, std::move(models), std::move(losses));
}

std::vector<TransitionModel> distinct_models(const AdversarySequence& sequence) {
  std::vector<TransitionModel> out;
  for (const auto& m : sequence.models()) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

std::string_view to_string(ExpertStreamKind kind) {
  switch (kind) {
    case ExpertStreamKind::fixed_gap: return "fixed-gap";
    case ExpertStreamKind::phase_shifted_punisher: return "phase-shifted-punisher";
    case ExpertStreamKind::random: return "random";
  }
  return "?";
}

std::optional<ExpertStreamKind> parse_expert_stream_kind(std::string_view name) {
  for (auto kind : {ExpertStreamKind::fixed_gap, ExpertStreamKind::phase_shifted_punisher,
                    ExpertStreamKind::random}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> expert_losses(const ExpertStreamScript& script, std::size_t T) {
  const std::size_t n = script.num_experts;
  if (n == 0) throw std::invalid_argument("expert_losses: need at least one expert");
  if (script.phase_length == 0) throw std::invalid_argument("expert_losses: phase_length is 0");
  if (!(script.gap >= 0.0 && script.gap <= 0.5)) {
    throw std::invalid_argument("expert_losses: gap outside [0, 0.5]");
  }
  std::vector<std::vector<double>> out(T, std::vector<double>(n, 0.0));
  std::vector<double> cumulative(n, 0.0);
  std::size_t target = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    auto& c = out[t - 1];
    switch (script.kind) {
      case ExpertStreamKind::fixed_gap: {
        // The last expert is the good one, so lowest-index tie breaking
        // never favours it.
        auto rng = round_stream(script.seed, t);
        for (std::size_t i = 0; i < n; ++i) {
          const double mean = i + 1 == n ? 0.5 - script.gap : 0.5;
          c[i] = rng.uniform() < mean ? 1.0 : 0.0;
        }
        break;
      }
      case ExpertStreamKind::phase_shifted_punisher: {
        if ((t - 1) % script.phase_length == 0) {
          target = static_cast<std::size_t>(
              std::min_element(cumulative.begin(), cumulative.end()) - cumulative.begin());
        }
        c[target] = 1.0;
        break;
      }
      case ExpertStreamKind::random: {
        auto rng = round_stream(script.seed, t);
        for (double& v : c) v = rng.uniform();
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) cumulative[i] += c[i];
  }
  return out;
}

}  // namespace omdp
