#include "recalnet/data.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "recalnet/errors.hpp"
#include "recalnet/rng.hpp"

namespace recalnet {

namespace {

Dataset gen_split(const DatasetSpec& spec, std::size_t split_index) {
  bool shifted = split_index == 3;  // testII draws from the shifted law
  const std::vector<std::size_t>& per_class = spec.counts[split_index];
  std::size_t total = 0;
  for (std::size_t c : per_class) total += c;

  Rng rng(spec.seed, std::string("data/") + kSplitNames[split_index]);
  Dataset out;
  out.split = kSplitNames[split_index];
  out.features = Tensor::zeros(total, spec.d_in);
  out.labels.reserve(total);
  std::size_t row = 0;
  for (std::size_t j = 0; j < spec.M; ++j) {
    double sigma = spec.sigma[j] * (shifted ? spec.gamma : 1.0);
    for (std::size_t s = 0; s < per_class[j]; ++s) {
      for (std::size_t i = 0; i < spec.d_in; ++i) {
        double mean = spec.means[j][i] + (shifted ? spec.delta[i] : 0.0);
        out.features.at(row, i) = mean + sigma * rng.next_normal();
      }
      out.labels.push_back(j);
      ++row;
    }
  }
  return out;
}

void write_double(std::string& line, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line_no, const std::string& what) {
  throw ConfigError(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

void DatasetSpec::validate() const {
  if (d_in < 1) throw ConfigError("data spec: d_in must be >= 1");
  if (M < 1) throw ConfigError("data spec: M must be >= 1");
  if (means.size() != M) {
    throw ConfigError("data spec: " + std::to_string(means.size()) + " mean vectors for " +
                      std::to_string(M) + " classes");
  }
  for (const auto& mu : means) {
    if (mu.size() != d_in) {
      throw ConfigError("data spec: mean vector of length " + std::to_string(mu.size()) +
                        ", expected " + std::to_string(d_in));
    }
  }
  if (sigma.size() != M) {
    throw ConfigError("data spec: " + std::to_string(sigma.size()) + " sigma values for " +
                      std::to_string(M) + " classes");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw ConfigError("data spec: sigma must be > 0");
  }
  for (std::size_t split = 0; split < 4; ++split) {
    if (counts[split].size() != M) {
      throw ConfigError(std::string("data spec: counts for split ") + kSplitNames[split] +
                        " must list one value per class");
    }
  }
  if (delta.size() != d_in) {
    throw ConfigError("data spec: shift delta of length " + std::to_string(delta.size()) +
                      ", expected " + std::to_string(d_in));
  }
  if (!(gamma > 0.0)) throw ConfigError("data spec: shift gamma must be > 0");
}

DataSplits gen_synthetic(const DatasetSpec& spec) {
  spec.validate();
  DataSplits splits;
  for (std::size_t i = 0; i < 4; ++i) {
    splits[i] = gen_split(spec, i);
  }
  return splits;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  std::size_t d = dataset.features.cols();
  std::string line;
  for (std::size_t i = 0; i < d; ++i) {
    line += 'f';
    line += std::to_string(i);
    line += ',';
  }
  line += "label\n";
  out << line;
  for (std::size_t r = 0; r < dataset.features.rows(); ++r) {
    line.clear();
    for (std::size_t i = 0; i < d; ++i) {
      write_double(line, dataset.features.at(r, i));
      line += ',';
    }
    line += std::to_string(dataset.labels[r]);
    line += '\n';
    out << line;
  }
  if (!out) throw ConfigError("failed while writing " + path);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) parse_error(path, 1, "empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
  }
  if (cols.size() < 2 || cols.back() != "label") {
    parse_error(path, 1, "header must be f0,...,f{d-1},label");
  }
  std::size_t d = cols.size() - 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (cols[i] != "f" + std::to_string(i)) {
      parse_error(path, 1, "unexpected column name '" + cols[i] + "'");
    }
  }

  std::vector<double> values;
  std::vector<std::size_t> labels;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      parse_error(path, line_no, "empty row");
    }
    std::size_t field = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      const char* comma = p;
      while (comma != end && *comma != ',') ++comma;
      if (field < d) {
        double v = 0.0;
        auto res = std::from_chars(p, comma, v);
        if (res.ec != std::errc() || res.ptr != comma) {
          parse_error(path, line_no, "malformed value in column f" + std::to_string(field));
        }
        values.push_back(v);
      } else if (field == d) {
        unsigned long long y = 0;
        auto res = std::from_chars(p, comma, y);
        if (res.ec != std::errc() || res.ptr != comma) {
          parse_error(path, line_no, "label must be a nonnegative integer");
        }
        labels.push_back(static_cast<std::size_t>(y));
      } else {
        parse_error(path, line_no, "too many fields");
      }
      ++field;
      if (comma == end) break;
      p = comma + 1;
    }
    if (field != d + 1) {
      parse_error(path, line_no, "expected " + std::to_string(d + 1) + " fields, got " +
                                     std::to_string(field));
    }
  }

  Dataset out;
  out.features = Tensor({labels.size(), d}, std::move(values));
  out.labels = std::move(labels);
  out.split = std::filesystem::path(path).stem().string();
  return out;
}

std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t seed,
                           bool shuffle) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::size_t n = dataset.features.rows();
  std::size_t d = dataset.features.cols();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle) {
    Rng rng(seed, "shuffle");
    recalnet::shuffle(order, rng);
  }

  std::vector<Batch> out;
  out.reserve((n + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < n; start += batch_size) {
    std::size_t count = std::min(batch_size, n - start);
    Batch b;
    b.features = Tensor::zeros(count, d);
    b.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t src = order[start + i];
      for (std::size_t j = 0; j < d; ++j) b.features.at(i, j) = dataset.features.at(src, j);
      b.labels.push_back(dataset.labels[src]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace recalnet
