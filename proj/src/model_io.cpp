// Model file layout ("rbr/1"), one record per line, fixed order:
//
//   rbr-model rbr/1
//   task <regression|classification>
//   k <count>
//   seed <u64>
//   lambda <real>
//   m <count>
//   columns <count>           followed by <count> lines, one predictor name each
//   means <m> <real>...
//   stds <m> <real>...
//   features <k-1>            followed by k-1 lines:
//   f <size> <index>... <weight>... <threshold>
//   beta <k> <real>...
//   end <k-1>
//
// Reals are printed with 17 significant digits so they reload bit-exactly.

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rbr/error.hpp"
#include "rbr/model.hpp"

namespace rbr {

namespace {

constexpr std::string_view kMagic = "rbr-model";

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_reals(std::ostream& out, std::string_view name, std::span<const double> values) {
  out << name << ' ' << values.size();
  for (double v : values) out << ' ' << format_real(v);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next line split on spaces. Throws on end of input.
  std::vector<std::string> record(std::string_view expected_tag) {
    std::string line = raw_line(expected_tag);
    std::vector<std::string> tokens;
    std::istringstream fields(line);
    for (std::string token; fields >> token;) tokens.push_back(std::move(token));
    if (tokens.empty() || tokens.front() != expected_tag) {
      fail("expected '" + std::string(expected_tag) + "' record, found '" + line + "'");
    }
    return tokens;
  }

  std::string raw_line(std::string_view what) {
    std::string line;
    if (!std::getline(in_, line)) fail("truncated model file (missing '" + std::string(what) + "')");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream msg;
    msg << "model line " << line_no_ << ": " << message;
    throw ModelError(msg.str());
  }

  template <typename T>
  T number(const std::string& token) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("cannot parse '" + token + "' as a number");
    }
    return value;
  }

  // "<tag> <value>"
  template <typename T>
  T scalar(std::string_view tag) {
    const auto tokens = record(tag);
    if (tokens.size() != 2) fail("'" + std::string(tag) + "' takes exactly one value");
    return number<T>(tokens[1]);
  }

  // "<tag> <count> <v>..." with count == expected.
  std::vector<double> reals(std::string_view tag, std::size_t expected) {
    const auto tokens = record(tag);
    if (tokens.size() < 2) fail("'" + std::string(tag) + "' is missing its count");
    const auto count = number<std::size_t>(tokens[1]);
    if (count != expected) fail("'" + std::string(tag) + "' has the wrong count");
    if (tokens.size() != count + 2) fail("'" + std::string(tag) + "' is truncated");
    std::vector<double> out(count);
    for (std::size_t t = 0; t < count; ++t) out[t] = number<double>(tokens[t + 2]);
    return out;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_model(const RbrModel& model, std::ostream& out) {
  validate(model);
  out << kMagic << ' ' << model.format_version << '\n';
  out << "task " << to_string(model.task) << '\n';
  out << "k " << model.k << '\n';
  out << "seed " << model.seed << '\n';
  out << "lambda " << format_real(model.lambda) << '\n';
  out << "m " << model.m() << '\n';
  out << "columns " << model.column_names.size() << '\n';
  for (const auto& name : model.column_names) out << name << '\n';
  write_reals(out, "means", model.standardizer.means);
  write_reals(out, "stds", model.standardizer.stds);
  out << "features " << model.bank.specs.size() << '\n';
  for (const auto& spec : model.bank.specs) {
    out << "f " << spec.var_indices.size();
    for (auto idx : spec.var_indices) out << ' ' << idx;
    for (double w : spec.weights) out << ' ' << format_real(w);
    out << ' ' << format_real(spec.threshold) << '\n';
  }
  write_reals(out, "beta", model.beta);
  out << "end " << model.bank.specs.size() << '\n';
}

RbrModel read_model(std::istream& in) {
  Reader reader(in);
  RbrModel model;

  const auto magic = reader.record(kMagic);
  if (magic.size() != 2) reader.fail("malformed header");
  if (magic[1] != kModelFormatVersion) {
    throw ModelError("unsupported model format version '" + magic[1] + "' (this build reads '" +
                     std::string(kModelFormatVersion) + "')");
  }
  model.format_version = magic[1];

  const auto task = reader.record("task");
  if (task.size() != 2) reader.fail("malformed task record");
  try {
    model.task = parse_task(task[1]);
  } catch (const ArgumentError& e) {
    reader.fail(e.what());
  }
  model.k = reader.scalar<std::size_t>("k");
  model.seed = reader.scalar<std::uint64_t>("seed");
  model.lambda = reader.scalar<double>("lambda");
  const auto m = reader.scalar<std::size_t>("m");
  if (m == 0) reader.fail("model width m must be >= 1");
  if (model.k == 0) reader.fail("model k must be >= 1");

  const auto columns = reader.scalar<std::size_t>("columns");
  if (columns != 0 && columns != m) reader.fail("column count must be 0 or m");
  for (std::size_t c = 0; c < columns; ++c) model.column_names.push_back(reader.raw_line("column name"));

  model.standardizer.means = reader.reals("means", m);
  model.standardizer.stds = reader.reals("stds", m);

  const auto features = reader.scalar<std::size_t>("features");
  if (features + 1 != model.k) reader.fail("feature count must be k - 1");
  model.bank.m = m;
  model.bank.seed = model.seed;
  model.bank.specs.resize(features);
  for (auto& spec : model.bank.specs) {
    const auto tokens = reader.record("f");
    if (tokens.size() < 2) reader.fail("feature record is missing its size");
    const auto size = reader.number<std::size_t>(tokens[1]);
    if (size < 1 || size > kMaxSubsetSize) reader.fail("feature subset size out of range");
    if (tokens.size() != 2 + 2 * size + 1) reader.fail("feature record is truncated");
    for (std::size_t t = 0; t < size; ++t) {
      spec.var_indices.push_back(reader.number<std::uint32_t>(tokens[2 + t]));
    }
    for (std::size_t t = 0; t < size; ++t) {
      spec.weights.push_back(reader.number<double>(tokens[2 + size + t]));
    }
    spec.threshold = reader.number<double>(tokens.back());
  }
  model.beta = reader.reals("beta", model.k);
  if (reader.scalar<std::size_t>("end") != features) reader.fail("end record count mismatch");

  try {
    validate(model);
  } catch (const ModelError& e) {
    throw ModelError(std::string("invalid model: ") + e.what());
  }
  return model;
}

void save_model(const RbrModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot open '" + path.string() + "' for writing");
  write_model(model, out);
  out.flush();
  if (!out) throw ModelError("failed writing model to '" + path.string() + "'");
}

RbrModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  return read_model(in);
}

}  // namespace rbr
