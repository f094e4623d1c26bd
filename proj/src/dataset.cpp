#include "spectral/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "spectral/error.hpp"
#include "spectral/io_util.hpp"

namespace spectral {

void Dataset::validate(bool allow_empty) const {
  if (features.rows() == 0 && !allow_empty) throw InputError("dataset has no rows");
  if (features.cols() == 0) throw InputError("dataset has no feature columns");
  if (responses && responses->size() != features.rows()) {
    throw InputError("response length " + std::to_string(responses->size()) +
                     " does not match row count " + std::to_string(features.rows()));
  }
  if (!features.allFinite()) throw InputError("features contain NaN or Inf");
  if (responses && !responses->allFinite()) throw InputError("responses contain NaN or Inf");
  if (!column_names.empty() && static_cast<Index>(column_names.size()) != features.cols()) {
    throw InputError("column name count does not match feature count");
  }
}

Dataset Dataset::subset(const IndexList& rows) const {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), features.cols());
  if (responses) out.responses = Eigen::VectorXd(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    out.features.row(static_cast<Index>(k)) = features.row(r);
    if (responses) (*out.responses)(static_cast<Index>(k)) = (*responses)(r);
  }
  out.column_names = column_names;
  return out;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != means.size()) {
    throw InputError("standardizer expects " + std::to_string(means.size()) + " columns, got " +
                     std::to_string(x.cols()));
  }
  Eigen::MatrixXd z(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    if (constant[static_cast<std::size_t>(c)]) {
      z.col(c).setZero();
    } else {
      z.col(c) = (x.col(c).array() - means(c)) / sds(c);
    }
  }
  return z;
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& z) const {
  if (z.cols() != means.size()) throw InputError("standardizer column mismatch");
  Eigen::MatrixXd x(z.rows(), z.cols());
  for (Index c = 0; c < z.cols(); ++c) {
    if (constant[static_cast<std::size_t>(c)]) {
      x.col(c).setConstant(means(c));
    } else {
      x.col(c) = z.col(c).array() * sds(c) + means(c);
    }
  }
  return x;
}

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw InputError("split fractions must lie in (0, 1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-12) {
    throw InputError("split fractions must sum to 1");
  }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, std::size_t line_no, std::size_t col) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size()) {
    throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                     ": non-numeric value '" + field + "'");
  }
  if (!std::isfinite(v)) {
    throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                     ": non-finite value '" + field + "'");
  }
  return v;
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t arity = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = !options.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (!header_seen) {
      header = std::move(fields);
      arity = header.size();
      header_seen = true;
      continue;
    }
    if (arity == 0) arity = fields.size();
    if (fields.size() != arity) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                       " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(arity);
    for (std::size_t c = 0; c < arity; ++c) row[c] = parse_number(fields[c], line_no, c);
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");

  if (arity == 0) {
    if (options.allow_empty) return Dataset{};
    throw InputError("'" + path.string() + "' contains no data");
  }

  std::optional<std::size_t> response_col;
  if (options.response_column) {
    const std::string& name = *options.response_column;
    auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end()) {
      response_col = static_cast<std::size_t>(it - header.begin());
    } else if (is_index(name) && std::stoul(name) < arity) {
      response_col = std::stoul(name);
    } else if (!options.response_optional) {
      throw InputError("missing response column '" + name + "'");
    }
  }

  const std::size_t d = arity - (response_col ? 1 : 0);
  if (d == 0) throw InputError("no feature columns besides the response");
  Dataset data;
  data.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(d));
  if (response_col) data.responses = Eigen::VectorXd(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Index out_c = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (response_col && c == *response_col) {
        (*data.responses)(static_cast<Index>(r)) = rows[r][c];
      } else {
        data.features(static_cast<Index>(r), out_c++) = rows[r][c];
      }
    }
  }
  if (!header.empty()) {
    for (std::size_t c = 0; c < arity; ++c) {
      if (!(response_col && c == *response_col)) data.column_names.push_back(header[c]);
    }
  }
  data.validate(options.allow_empty);
  return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  for (Index c = 0; c < data.dims(); ++c) {
    if (c) out << ',';
    out << (data.column_names.empty() ? "x" + std::to_string(c + 1)
                                      : data.column_names[static_cast<std::size_t>(c)]);
  }
  if (data.responses) out << (data.dims() ? "," : "") << 'y';
  out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.dims(); ++c) {
      if (c) out << ',';
      out << format_double(data.features(r, c));
    }
    if (data.responses) out << ',' << format_double((*data.responses)(r));
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Preprocessing

std::pair<Dataset, Standardizer> standardize(const Dataset& data) {
  const Index n = data.rows();
  if (n < 2) throw InputError("standardize needs at least 2 rows");
  Standardizer st;
  st.means = data.features.colwise().mean().transpose();
  st.sds.resize(data.dims());
  st.constant.assign(static_cast<std::size_t>(data.dims()), false);
  for (Index c = 0; c < data.dims(); ++c) {
    const auto centered = (data.features.col(c).array() - st.means(c)).eval();
    const double sd = std::sqrt(centered.square().sum() / static_cast<double>(n - 1));
    const double scale = std::max(1.0, data.features.col(c).cwiseAbs().maxCoeff());
    if (!(sd > 1e-14 * scale)) {
      st.sds(c) = 0.0;
      st.constant[static_cast<std::size_t>(c)] = true;
    } else {
      st.sds(c) = sd;
    }
  }
  Dataset out = data;
  out.features = st.apply(data.features);
  return {std::move(out), std::move(st)};
}

Eigen::MatrixXd unit_normalize_rows(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Index r = 0; r < x.rows(); ++r) {
    const double norm = x.row(r).norm();
    if (!(norm > 0.0)) throw InputError("row " + std::to_string(r) + " has zero norm");
    out.row(r) /= norm;
  }
  return out;
}

Dataset unit_normalize_rows(const Dataset& data) {
  Dataset out = data;
  out.features = unit_normalize_rows(data.features);
  return out;
}

SplitIndices split_indices(Index n, const SplitSpec& spec) {
  spec.validate();
  if (n < 3) throw InputError("split needs at least 3 rows");
  const auto n_val = static_cast<Index>(std::floor(spec.val_frac * static_cast<double>(n)));
  const auto n_test = static_cast<Index>(std::floor(spec.test_frac * static_cast<double>(n)));
  const Index n_train = n - n_val - n_test;

  IndexList perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + n_train);
  out.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  out.test.assign(perm.begin() + n_train + n_val, perm.end());
  return out;
}

DatasetSplit split(const Dataset& data, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(data.rows(), spec);
  return {data.subset(idx.train), data.subset(idx.val), data.subset(idx.test)};
}

// ---------------------------------------------------------------------------
// Generators

Eigen::Vector2d spiral_point(double u) {
  const double t = std::sqrt(u);
  return {t * std::cos(t), t * std::sin(t)};
}

Dataset gen_spiral(const SpiralOptions& o) {
  if (o.n < 1) throw InputError("spiral: n must be at least 1");
  if (!(o.noise_sd >= 0.0)) throw InputError("spiral: noise_sd must be nonnegative");
  if (!(o.u_max > 0.0)) throw InputError("spiral: u_max must be positive");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unif(0.0, o.u_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset data;
  data.features.resize(o.n, 2);
  data.responses = Eigen::VectorXd(o.n);
  for (Index i = 0; i < o.n; ++i) {
    const double u = unif(rng);
    const Eigen::Vector2d p = spiral_point(u);
    const double ex = noise(rng), ey = noise(rng);
    data.features(i, 0) = p.x() + o.noise_sd * ex;
    data.features(i, 1) = p.y() + o.noise_sd * ey;
    (*data.responses)(i) = std::sqrt(u);
  }
  return data;
}

Dataset gen_circle(const CircleOptions& o) {
  if (o.d < 2) throw InputError("circle: d must be at least 2");
  if (o.n < 1) throw InputError("circle: n must be at least 1");
  if (!(o.noise_var >= 0.0)) throw InputError("circle: noise_var must be nonnegative");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(o.noise_var);

  Dataset data;
  data.features = Eigen::MatrixXd::Zero(o.n, o.d);
  data.responses = Eigen::VectorXd(o.n);
  for (Index i = 0; i < o.n; ++i) {
    const double theta = angle(rng);
    data.features(i, 0) = std::cos(theta);
    data.features(i, 1) = std::sin(theta);
    const double e = normal(rng);
    (*data.responses)(i) = o.noise_var > 0.0 ? theta + noise_sd * e : theta;
  }
  if (o.rotate) {
    Eigen::MatrixXd g(o.d, o.d);
    for (Index c = 0; c < o.d; ++c)
      for (Index r = 0; r < o.d; ++r) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& rmat = qr.matrixQR();
    for (Index c = 0; c < o.d; ++c) {
      if (rmat(c, c) < 0.0) q.col(c) = -q.col(c);
    }
    data.features = data.features * q.transpose();
  }
  return data;
}

Dataset gen_uniform_interval(Index n, double lo, double hi, std::uint64_t seed) {
  if (!(lo < hi)) throw InputError("uniform: lo must be less than hi");
  if (n < 1) throw InputError("uniform: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  Dataset data;
  data.features.resize(n, 1);
  for (Index i = 0; i < n; ++i) {
    double v = unif(rng);
    while (v <= lo) v = unif(rng);
    data.features(i, 0) = v;
  }
  return data;
}

}  // namespace spectral
