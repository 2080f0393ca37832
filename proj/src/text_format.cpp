#include "omdp/text_format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace omdp {

TextFormatError::TextFormatError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::optional<BlockKind> parse_kind(const std::string& word) {
  if (word == "policy") return BlockKind::policy;
  if (word == "model") return BlockKind::model;
  if (word == "loss") return BlockKind::loss;
  return std::nullopt;
}

const char* kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::policy: return "policy";
    case BlockKind::model: return "model";
    case BlockKind::loss: return "loss";
  }
  return "?";
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || value == 0) {
    throw TextFormatError(line, fmt::format("expected a positive integer, got '{}'", tok));
  }
  return value;
}

double parse_value(const std::string& tok, std::size_t line) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw TextFormatError(line, fmt::format("expected a decimal number, got '{}'", tok));
  }
  return value;
}

std::pair<std::size_t, std::size_t> rows_and_width(BlockKind kind, const ProblemShape& shape) {
  switch (kind) {
    case BlockKind::policy:
    case BlockKind::loss: return {shape.num_states, shape.num_actions};
    case BlockKind::model: return {shape.num_states * shape.num_actions, shape.num_states};
  }
  return {0, 0};
}

void write_rows(std::ostream& out, BlockKind kind, const ProblemShape& shape,
                std::span<const double> values) {
  const auto [rows, width] = rows_and_width(kind, shape);
  fmt::print(out, "{} {} {}\n", kind_name(kind), shape.num_states, shape.num_actions);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      fmt::print(out, c == 0 ? "{:.17g}" : " {:.17g}", values[r * width + c]);
    }
    out << '\n';
  }
}

template <typename T, typename Make>
std::vector<T> read_kind(std::istream& in, BlockKind kind, Make make) {
  std::vector<T> out;
  std::optional<ProblemShape> shape;
  for (auto& block : read_blocks(in)) {
    if (block.kind != kind) {
      throw TextFormatError(block.line, fmt::format("expected a {} block, found {}",
                                                    kind_name(kind), kind_name(block.kind)));
    }
    if (shape && *shape != block.shape) {
      throw TextFormatError(block.line, "block dimensions differ from the first block");
    }
    shape = block.shape;
    try {
      out.push_back(make(block));
    } catch (const std::invalid_argument& e) {
      throw TextFormatError(block.line, e.what());
    }
  }
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

std::vector<MatrixBlock> read_blocks(std::istream& in) {
  std::vector<MatrixBlock> blocks;
  std::string line;
  std::size_t line_no = 0;
  MatrixBlock* open = nullptr;
  std::size_t rows_needed = 0, width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;

    if (open == nullptr || rows_needed == 0) {
      auto kind = parse_kind(tokens.front());
      if (!kind || tokens.size() != 3) {
        throw TextFormatError(line_no, "expected a header '<policy|model|loss> <states> <actions>'");
      }
      ProblemShape shape(parse_count(tokens[1], line_no), parse_count(tokens[2], line_no));
      blocks.push_back(MatrixBlock{*kind, shape, {}, line_no});
      open = &blocks.back();
      std::tie(rows_needed, width) = rows_and_width(*kind, shape);
      open->values.reserve(rows_needed * width);
      continue;
    }

    if (tokens.size() != width) {
      throw TextFormatError(line_no,
                            fmt::format("expected {} values, found {}", width, tokens.size()));
    }
    for (const auto& tok : tokens) open->values.push_back(parse_value(tok, line_no));
    --rows_needed;
  }
  if (open != nullptr && rows_needed != 0) {
    throw TextFormatError(line_no, fmt::format("{} block starting at line {} is missing {} rows",
                                               kind_name(open->kind), open->line, rows_needed));
  }
  return blocks;
}

void write_policy(std::ostream& out, const Policy& policy) {
  write_rows(out, BlockKind::policy, policy.shape(), policy.data());
}

void write_model(std::ostream& out, const TransitionModel& model) {
  write_rows(out, BlockKind::model, model.shape(), model.data());
}

void write_loss(std::ostream& out, const LossFunction& loss) {
  write_rows(out, BlockKind::loss, loss.shape(), loss.data());
}

std::vector<Policy> read_policies(std::istream& in) {
  return read_kind<Policy>(in, BlockKind::policy,
                           [](MatrixBlock& b) { return Policy(b.shape, std::move(b.values)); });
}

std::vector<TransitionModel> read_models(std::istream& in) {
  return read_kind<TransitionModel>(
      in, BlockKind::model, [](MatrixBlock& b) { return TransitionModel(b.shape, std::move(b.values)); });
}

std::vector<LossFunction> read_losses(std::istream& in) {
  return read_kind<LossFunction>(
      in, BlockKind::loss, [](MatrixBlock& b) { return LossFunction(b.shape, std::move(b.values)); });
}

std::vector<Policy> load_policies(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_policies(in);
}

std::vector<TransitionModel> load_models(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_models(in);
}

std::vector<LossFunction> load_losses(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_losses(in);
}

}  // namespace omdp
