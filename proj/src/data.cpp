#include "spmtl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "spmtl/rng.hpp"

namespace spmtl {
namespace {

std::string parse_message(const std::string& path, long line, const std::string& what) {
  std::ostringstream os;
  os << path;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  return os.str();
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
  }
  return M;
}

Vector gaussian_vector(Index n, Rng& rng) { return gaussian_matrix(n, 1, rng).col(0); }

std::vector<Index> permutation(Index n, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Fisher-Yates, drawing from the generator directly.
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

TaskDataset regression_task(int id, const Vector& w, double sigma, Index n, Rng& rng) {
  Matrix X = gaussian_matrix(n, w.size(), rng);
  const Vector noise = gaussian_vector(n, rng);
  Vector y = X * w + sigma * noise;
  return make_task(id, std::move(X), std::move(y), TaskKind::Regression);
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      return out;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TaskDataset sub_task(const TaskDataset& task, const std::vector<Index>& rows) {
  Matrix X(static_cast<Index>(rows.size()), task.dim());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Index>(i)) = task.X.row(rows[i]);
    y[static_cast<Index>(i)] = task.y[rows[i]];
  }
  return TaskDataset{task.task_id, std::move(X), std::move(y), task.kind};
}

std::vector<Index> complement(Index n, const std::vector<Index>& taken) {
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (Index i : taken) used[static_cast<std::size_t>(i)] = 1;
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i) {
    if (!used[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& path, long line, const std::string& what)
    : Error(parse_message(path, line, what)), line_(line) {}

SynConfig SynConfig::syn1(std::uint64_t seed) {
  SynConfig cfg;
  cfg.seed = seed;
  cfg.n_tasks = 30;
  cfg.n_per_task = 15;
  cfg.d = 20;
  return cfg;
}

SynConfig SynConfig::syn2(std::uint64_t seed) {
  SynConfig cfg;
  cfg.seed = seed;
  cfg.n_tasks = 30;
  cfg.n_per_task = 15;
  cfg.d = 30;
  return cfg;
}

void check_invariants(const SynConfig& cfg, bool syn2) {
  if (cfg.n_tasks < 1) throw InvalidArgument("n_tasks must be at least 1");
  if (cfg.n_per_task < 1) throw InvalidArgument("n_per_task must be at least 1");
  if (cfg.n_test_per_task < 0) throw InvalidArgument("n_test_per_task must be >= 0");
  if (cfg.d < 1) throw InvalidArgument("d must be at least 1");
  if (syn2) {
    if (cfg.d != cfg.n_tasks) throw InvalidArgument("syn2 needs d == n_tasks");
    if (!(cfg.sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
    return;
  }
  if (cfg.n_groups < 1 || cfg.n_groups > cfg.n_tasks) {
    throw InvalidArgument("n_groups must lie in [1, n_tasks]");
  }
  if (cfg.group_rank < 1 || cfg.group_rank > cfg.d) {
    throw InvalidArgument("group_rank must lie in [1, d]");
  }
  if (!(cfg.sigma_easy > 0.0) || !(cfg.sigma_hard > 0.0)) {
    throw InvalidArgument("noise levels must be positive");
  }
  if (!(cfg.hard_fraction >= 0.0 && cfg.hard_fraction <= 1.0)) {
    throw InvalidArgument("hard_fraction must lie in [0, 1]");
  }
}

SyntheticData generate_syn1(const SynConfig& cfg) {
  check_invariants(cfg, false);
  Rng rng = make_rng(cfg.seed, Stream::kData, 1);
  const Index T = cfg.n_tasks;
  const Index d = cfg.d;
  const Index n = cfg.n_per_task + cfg.n_test_per_task;

  std::vector<Matrix> bases;
  for (int g = 0; g < cfg.n_groups; ++g) bases.push_back(gaussian_matrix(d, cfg.group_rank, rng));

  SyntheticData out;
  out.true_W = Matrix(d, T);
  out.group.resize(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const int g = static_cast<int>(t * cfg.n_groups / T);
    out.group[static_cast<std::size_t>(t)] = g;
    out.true_W.col(t) = bases[static_cast<std::size_t>(g)] * gaussian_vector(cfg.group_rank, rng);
  }

  const auto n_hard = static_cast<Index>(std::lround(cfg.hard_fraction * static_cast<double>(T)));
  const std::vector<Index> order = permutation(T, rng);
  out.noise_sigma = Vector::Constant(T, cfg.sigma_easy);
  for (Index i = 0; i < n_hard; ++i) out.noise_sigma[order[static_cast<std::size_t>(i)]] = cfg.sigma_hard;

  std::vector<TaskDataset> tasks;
  for (Index t = 0; t < T; ++t) {
    tasks.push_back(regression_task(static_cast<int>(t + 1), out.true_W.col(t),
                                    out.noise_sigma[t], n, rng));
  }
  out.data = MultitaskDataset(std::move(tasks));
  return out;
}

SyntheticData generate_syn2(const SynConfig& cfg) {
  check_invariants(cfg, true);
  Rng rng = make_rng(cfg.seed, Stream::kData, 2);
  const Index T = cfg.n_tasks;
  const Index d = cfg.d;
  const Index n = cfg.n_per_task + cfg.n_test_per_task;

  SyntheticData out;
  out.shared_s = gaussian_vector(d, rng);
  out.true_W = Matrix::Zero(d, T);
  for (Index t = 0; t < T; ++t) out.true_W.col(t).head(t + 1) = out.shared_s.head(t + 1);
  out.noise_sigma = Vector::Constant(T, cfg.sigma);

  std::vector<TaskDataset> tasks;
  for (Index t = 0; t < T; ++t) {
    tasks.push_back(regression_task(static_cast<int>(t + 1), out.true_W.col(t), cfg.sigma, n, rng));
  }
  out.data = MultitaskDataset(std::move(tasks));
  return out;
}

MultitaskDataset parse_csv_dataset(const std::string& text, const CsvSchema& schema,
                                   const std::string& source) {
  std::istringstream in(text);
  std::string line;
  long line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw ParseError(source, 0, "missing header row");
  if (!header.empty() && header[0].size() >= 3 &&
      static_cast<unsigned char>(header[0][0]) == 0xEF) {
    header[0] = header[0].substr(3);  // UTF-8 BOM
  }
  const long header_line = line_no;

  auto column_of = [&](const std::string& name, const char* role) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError(source, header_line,
                       std::string("schema ") + role + " column '" + name + "' not in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t task_col = column_of(schema.task_column, "task");
  const std::size_t target_col = column_of(schema.target_column, "target");
  if (task_col == target_col) throw ParseError(source, header_line, "task and target columns coincide");

  std::vector<bool> is_categorical(header.size(), false);
  for (const auto& name : schema.categorical_columns) {
    const std::size_t c = column_of(name, "categorical");
    if (c == task_col || c == target_col) {
      throw ParseError(source, header_line, "column '" + name + "' cannot be categorical");
    }
    is_categorical[c] = true;
  }
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != task_col && c != target_col) feature_cols.push_back(c);
  }

  struct Row {
    int task;
    double target;
    std::vector<std::string> fields;
    long line;
  };
  std::vector<Row> rows;
  // Levels per categorical column in first-occurrence order.
  std::map<std::size_t, std::vector<std::string>> levels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "expected " << header.size() << " fields, found " << fields.size();
      throw ParseError(source, line_no, os.str());
    }
    Row row{0, 0.0, {}, line_no};
    if (!parse_int(fields[task_col], row.task)) {
      throw ParseError(source, line_no, "task id '" + fields[task_col] + "' is not an integer");
    }
    if (!parse_double(fields[target_col], row.target)) {
      throw ParseError(source, line_no,
                       "target '" + fields[target_col] + "' is not numeric");
    }
    for (std::size_t c : feature_cols) {
      if (is_categorical[c]) {
        auto& lv = levels[c];
        if (std::find(lv.begin(), lv.end(), fields[c]) == lv.end()) lv.push_back(fields[c]);
      } else {
        double v;
        if (!parse_double(fields[c], v)) {
          throw ParseError(source, line_no,
                           "column '" + header[c] + "' value '" + fields[c] + "' is not numeric");
        }
      }
    }
    row.fields = std::move(fields);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, line_no, "no data rows");

  Index d = 0;
  for (std::size_t c : feature_cols) {
    d += is_categorical[c] ? static_cast<Index>(levels[c].size()) : 1;
  }
  if (schema.add_bias) ++d;
  if (d == 0) throw ParseError(source, header_line, "no feature columns");

  std::vector<int> task_order;
  std::unordered_map<int, std::vector<std::size_t>> by_task;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto [it, inserted] = by_task.try_emplace(rows[r].task);
    if (inserted) task_order.push_back(rows[r].task);
    it->second.push_back(r);
  }

  std::vector<TaskDataset> tasks;
  for (int id : task_order) {
    const auto& members = by_task[id];
    Matrix X = Matrix::Zero(static_cast<Index>(members.size()), d);
    Vector y(static_cast<Index>(members.size()));
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Row& row = rows[members[i]];
      const auto ri = static_cast<Index>(i);
      y[ri] = row.target;
      Index col = 0;
      for (std::size_t c : feature_cols) {
        if (is_categorical[c]) {
          const auto& lv = levels[c];
          const auto pos = std::find(lv.begin(), lv.end(), row.fields[c]) - lv.begin();
          X(ri, col + pos) = 1.0;
          col += static_cast<Index>(lv.size());
        } else {
          double v = 0.0;
          parse_double(row.fields[c], v);
          X(ri, col++) = v;
        }
      }
      if (schema.add_bias) X(ri, col) = 1.0;
    }
    try {
      tasks.push_back(make_task(id, std::move(X), std::move(y), schema.kind));
    } catch (const Error& e) {
      throw ParseError(source, rows[members.front()].line, e.what());
    }
  }
  return MultitaskDataset(std::move(tasks));
}

MultitaskDataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_dataset(buf.str(), schema, path.string());
}

void write_csv_dataset(const MultitaskDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "task,y";
  for (Index j = 0; j < data.dim(); ++j) out << ",x" << (j + 1);
  out << "\n";
  for (const auto& task : data.tasks()) {
    for (Index i = 0; i < task.size(); ++i) {
      out << task.task_id << "," << format_double(task.y[i]);
      for (Index j = 0; j < task.dim(); ++j) out << "," << format_double(task.X(i, j));
      out << "\n";
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

MultitaskDataset select_rows(const MultitaskDataset& data,
                             const std::vector<std::vector<Index>>& rows) {
  std::vector<TaskDataset> tasks;
  tasks.reserve(data.tasks().size());
  for (std::size_t t = 0; t < data.tasks().size(); ++t) tasks.push_back(sub_task(data[t], rows[t]));
  return MultitaskDataset(std::move(tasks));
}

DataSplit split_once(const MultitaskDataset& data, const SplitSpec& spec, int repeat) {
  if (spec.train_fraction.has_value() == spec.train_count.has_value()) {
    throw InvalidArgument("split: set exactly one of train_fraction and train_count");
  }
  if (spec.train_fraction && !(*spec.train_fraction > 0.0 && *spec.train_fraction < 1.0)) {
    throw InvalidArgument("split: train_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<Index>> train_rows;
  std::vector<std::vector<Index>> test_rows;
  for (const auto& task : data.tasks()) {
    const Index n = task.size();
    if (n < 2) {
      throw InvalidArgument("split: task " + std::to_string(task.task_id) +
                            " has fewer than 2 examples");
    }
    const Index count = spec.train_count
                            ? static_cast<Index>(*spec.train_count)
                            : static_cast<Index>(std::lround(*spec.train_fraction * static_cast<double>(n)));
    if (count >= n || count < 1) {
      std::ostringstream os;
      os << "split: task " << task.task_id << " has " << n << " examples, cannot take "
         << count << " for training";
      throw InvalidArgument(os.str());
    }
    Rng rng = make_rng(spec.seed, Stream::kSplit, static_cast<std::uint64_t>(repeat),
                       static_cast<std::uint64_t>(static_cast<std::int64_t>(task.task_id)));
    std::vector<Index> train;
    if (spec.stratified) {
      if (task.kind != TaskKind::BinaryClassification) {
        throw InvalidArgument("split: stratified splitting needs classification tasks");
      }
      std::vector<Index> pos;
      std::vector<Index> neg;
      for (Index i = 0; i < n; ++i) (task.y[i] > 0.0 ? pos : neg).push_back(i);
      const auto n_pos = static_cast<Index>(pos.size());
      Index take_pos = static_cast<Index>(
          std::lround(static_cast<double>(count) * static_cast<double>(n_pos) / static_cast<double>(n)));
      take_pos = std::clamp(take_pos, count - static_cast<Index>(neg.size()), std::min(count, n_pos));
      const Index take_neg = count - take_pos;
      const auto perm_pos = permutation(n_pos, rng);
      const auto perm_neg = permutation(static_cast<Index>(neg.size()), rng);
      for (Index i = 0; i < take_pos; ++i) train.push_back(pos[static_cast<std::size_t>(perm_pos[static_cast<std::size_t>(i)])]);
      for (Index i = 0; i < take_neg; ++i) train.push_back(neg[static_cast<std::size_t>(perm_neg[static_cast<std::size_t>(i)])]);
    } else {
      const auto perm = permutation(n, rng);
      train.assign(perm.begin(), perm.begin() + count);
    }
    std::sort(train.begin(), train.end());
    test_rows.push_back(complement(n, train));
    train_rows.push_back(std::move(train));
  }
  return DataSplit{select_rows(data, train_rows), select_rows(data, test_rows)};
}

std::vector<DataSplit> split(const MultitaskDataset& data, const SplitSpec& spec) {
  if (spec.n_repeats < 1) throw InvalidArgument("split: n_repeats must be at least 1");
  std::vector<DataSplit> out;
  out.reserve(static_cast<std::size_t>(spec.n_repeats));
  for (int r = 0; r < spec.n_repeats; ++r) out.push_back(split_once(data, spec, r));
  return out;
}

std::vector<DataSplit> kfold(const MultitaskDataset& data, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("kfold: k must be at least 2");
  std::vector<std::vector<Index>> fold_of(data.tasks().size());
  for (std::size_t t = 0; t < data.tasks().size(); ++t) {
    const TaskDataset& task = data[t];
    if (task.size() < k) {
      std::ostringstream os;
      os << "kfold: task " << task.task_id << " has " << task.size() << " examples, fewer than k="
         << k;
      throw InvalidArgument(os.str());
    }
    Rng rng = make_rng(seed, Stream::kFold, static_cast<std::uint64_t>(static_cast<std::int64_t>(task.task_id)));
    const auto perm = permutation(task.size(), rng);
    fold_of[t].assign(static_cast<std::size_t>(task.size()), 0);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      fold_of[t][static_cast<std::size_t>(perm[i])] = static_cast<Index>(i % static_cast<std::size_t>(k));
    }
  }
  std::vector<DataSplit> out;
  for (int f = 0; f < k; ++f) {
    std::vector<std::vector<Index>> train(data.tasks().size());
    std::vector<std::vector<Index>> valid(data.tasks().size());
    for (std::size_t t = 0; t < data.tasks().size(); ++t) {
      for (std::size_t i = 0; i < fold_of[t].size(); ++i) {
        (fold_of[t][i] == f ? valid : train)[t].push_back(static_cast<Index>(i));
      }
    }
    out.push_back(DataSplit{select_rows(data, train), select_rows(data, valid)});
  }
  return out;
}

}  // namespace spmtl
