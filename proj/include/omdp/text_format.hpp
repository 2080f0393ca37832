#pragma once

// Plain-text matrix format for policies, models and losses.
//
// A file is a sequence of blocks. Each block starts with a header line
//
//     <kind> <num_states> <num_actions>
//
// where kind is `policy`, `model` or `loss`, followed by rows of
// whitespace-separated decimal floats:
//
//     policy: |X| rows of |A| values, row x = pi(.|x)
//     model:  |X|*|A| rows of |X| values, row (x, a) = m(.|x,a), a varies fastest
//     loss:   |X| rows of |A| values, row x = l(x, .)
//
// Blank lines and lines starting with '#' are ignored. Values are written
// with 17 significant digits so a write/read cycle is exact.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "omdp/mdp_core.hpp"

namespace omdp {

class TextFormatError : public std::runtime_error {
 public:
  TextFormatError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class BlockKind { policy, model, loss };

struct MatrixBlock {
  BlockKind kind;
  ProblemShape shape;
  std::vector<double> values;
  std::size_t line;  // header line, 1-based
};

std::vector<MatrixBlock> read_blocks(std::istream& in);

void write_policy(std::ostream& out, const Policy& policy);
void write_model(std::ostream& out, const TransitionModel& model);
void write_loss(std::ostream& out, const LossFunction& loss);

/// Every block must be of the requested kind; the shapes must agree.
std::vector<Policy> read_policies(std::istream& in);
std::vector<TransitionModel> read_models(std::istream& in);
std::vector<LossFunction> read_losses(std::istream& in);

std::vector<Policy> load_policies(const std::filesystem::path& path);
std::vector<TransitionModel> load_models(const std::filesystem::path& path);
std::vector<LossFunction> load_losses(const std::filesystem::path& path);

}  // namespace omdp
