#include "spectral/archive.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "spectral/error.hpp"
#include "spectral/io_util.hpp"

namespace spectral {

namespace {

using json = nlohmann::json;
constexpr char kMagic[8] = {'S', 'P', 'S', 'E', 'R', 'I', 'E', 'S'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  v = to_little(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

void put_block(std::string& out, const Eigen::MatrixXd& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

class Reader {
public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw IoError("model archive is truncated");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }

  std::string bytes(std::size_t count) {
    if (pos_ + count > data_.size()) throw IoError("model archive is truncated");
    std::string s = data_.substr(pos_, count);
    pos_ += count;
    return s;
  }

  Eigen::MatrixXd block() {
    const auto rows = get<std::uint64_t>();
    const auto cols = get<std::uint64_t>();
    if (rows > (1ull << 32) || cols > (1ull << 32) || rows * cols * 8 > data_.size() - pos_) {
      throw IoError("model archive block has an invalid size");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>();
    return m;
  }

  bool done() const { return pos_ == data_.size(); }

private:
  std::string data_;
  std::size_t pos_ = 0;
};

Eigen::MatrixXd as_row(const Eigen::VectorXd& v) { return v.transpose(); }

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m) {
  if (m.rows() > 1 && m.cols() > 1) throw IoError("model archive: expected a vector block");
  return m.reshaped();
}

}  // namespace

Eigen::MatrixXd Preprocessing::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = standardizer ? standardizer->apply(x) : x;
  if (unit_norm) out = unit_normalize_rows(out);
  return out;
}

Eigen::VectorXd ModelArchive::predict(const Eigen::MatrixXd& raw) const {
  if (raw.cols() != model.basis->dims()) {
    throw InputError("query has " + std::to_string(raw.cols()) + " columns, model expects " +
                     std::to_string(model.basis->dims()));
  }
  if (raw.rows() == 0) return Eigen::VectorXd(0);
  return spectral::predict(model, preprocessing.apply(raw));
}

void save_model(const std::filesystem::path& path, const ModelArchive& archive) {
  const SeriesModeld& model = archive.model;
  if (!model.basis) throw InputError("save_model: model has no basis");
  const EigenBasisd& b = *model.basis;

  std::map<std::string, Eigen::MatrixXd> blocks;
  std::vector<std::string> order = {"training_points", "eigenvalues", "eigenvectors",
                                    "stationary", "row_scale", "coefficients"};
  blocks["training_points"] = b.training_points;
  blocks["eigenvalues"] = as_row(b.eigenvalues);
  blocks["eigenvectors"] = b.eigenvectors;
  blocks["stationary"] = as_row(b.stationary);
  blocks["row_scale"] = as_row(b.row_scale);
  blocks["coefficients"] = as_row(model.coefficients);

  json prep = {{"standardize", archive.preprocessing.standardizer.has_value()},
               {"unit_norm", archive.preprocessing.unit_norm}};
  if (const auto& st = archive.preprocessing.standardizer) {
    order.push_back("standardizer_means");
    order.push_back("standardizer_sds");
    blocks["standardizer_means"] = as_row(st->means);
    blocks["standardizer_sds"] = as_row(st->sds);
    prep["constant_columns"] = st->constant;
  }

  json header = {
      {"format_version", archive.format_version},
      {"n", b.size()},
      {"d", b.dims()},
      {"kernel", {{"family", b.kernel.family_name()}, {"bandwidth", b.kernel.bandwidth}, {"degree", b.kernel.degree}}},
      {"normalization", to_string(b.mode)},
      {"method",
       {{"kind", b.method.is_randomized() ? "randomized" : "full"},
        {"oversample", b.method.oversample},
        {"power_iters", b.method.power_iters},
        {"seed", b.method.seed}}},
      {"floor_ratio", b.floor_ratio},
      {"j_max", model.j_max()},
      {"truncation", model.truncation},
      {"ssl", model.ssl},
      {"preprocessing", prep},
      {"blocks", order},
  };

  std::string out(kMagic, sizeof kMagic);
  const std::string text = header.dump();
  put<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& name : order) put_block(out, blocks.at(name));
  write_file_atomic(path, out);
}

ModelArchive load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model archive '" + path.string() + "'");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader reader(std::move(data));

  if (reader.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw IoError("'" + path.string() + "' is not a model archive");
  }
  const auto header_len = reader.get<std::uint64_t>();
  json header;
  try {
    header = json::parse(reader.bytes(static_cast<std::size_t>(header_len)));
  } catch (const json::exception& e) {
    throw IoError(std::string("model archive header is corrupt: ") + e.what());
  }

  try {
    const int version = header.at("format_version").get<int>();
    if (version != kArchiveFormatVersion) {
      throw IoError("model archive format_version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kArchiveFormatVersion) + ")");
    }
    std::map<std::string, Eigen::MatrixXd> blocks;
    for (const auto& name : header.at("blocks")) blocks[name.get<std::string>()] = reader.block();
    if (!reader.done()) throw IoError("model archive has trailing data");

    auto basis = std::make_shared<EigenBasisd>();
    const auto& k = header.at("kernel");
    basis->kernel = k.at("family").get<std::string>() == "gaussian"
                        ? KernelSpec::gaussian(k.at("bandwidth").get<double>())
                        : KernelSpec::polynomial(k.at("degree").get<int>());
    basis->mode = normalization_from_string(header.at("normalization").get<std::string>());
    const auto& m = header.at("method");
    basis->method.kind =
        m.at("kind").get<std::string>() == "randomized" ? EigenMethod::Kind::Randomized : EigenMethod::Kind::Full;
    basis->method.oversample = m.at("oversample").get<int>();
    basis->method.power_iters = m.at("power_iters").get<int>();
    basis->method.seed = m.at("seed").get<std::uint64_t>();
    basis->floor_ratio = header.at("floor_ratio").get<double>();
    basis->training_points = blocks.at("training_points");
    basis->eigenvalues = as_vector(blocks.at("eigenvalues"));
    basis->eigenvectors = blocks.at("eigenvectors");
    basis->stationary = as_vector(blocks.at("stationary"));
    basis->row_scale = as_vector(blocks.at("row_scale"));

    const Eigen::Index n = header.at("n").get<Eigen::Index>();
    const Eigen::Index d = header.at("d").get<Eigen::Index>();
    const Eigen::Index j_max = header.at("j_max").get<Eigen::Index>();
    if (basis->training_points.rows() != n || basis->training_points.cols() != d ||
        basis->eigenvalues.size() != j_max + 1 || basis->eigenvectors.rows() != n ||
        basis->eigenvectors.cols() != j_max + 1 || basis->stationary.size() != n) {
      throw IoError("model archive blocks do not match the header dimensions");
    }

    ModelArchive archive;
    archive.format_version = version;
    archive.model.basis = basis;
    archive.model.coefficients = as_vector(blocks.at("coefficients"));
    archive.model.truncation = header.at("truncation").get<Eigen::Index>();
    archive.model.ssl = header.at("ssl").get<bool>();
    if (archive.model.coefficients.size() != j_max + 1 || archive.model.truncation < 0 ||
        archive.model.truncation > j_max) {
      throw IoError("model archive coefficients are inconsistent");
    }

    const auto& prep = header.at("preprocessing");
    archive.preprocessing.unit_norm = prep.at("unit_norm").get<bool>();
    if (prep.at("standardize").get<bool>()) {
      Standardizer st;
      st.means = as_vector(blocks.at("standardizer_means"));
      st.sds = as_vector(blocks.at("standardizer_sds"));
      st.constant = prep.at("constant_columns").get<std::vector<bool>>();
      if (st.means.size() != d || st.sds.size() != d || static_cast<Eigen::Index>(st.constant.size()) != d) {
        throw IoError("model archive standardizer is inconsistent");
      }
      archive.preprocessing.standardizer = std::move(st);
    }
    return archive;
  } catch (const json::exception& e) {
    throw IoError(std::string("model archive header is corrupt: ") + e.what());
  } catch (const std::out_of_range&) {
    throw IoError("model archive is missing a block");
  } catch (const InputError& e) {
    throw IoError(std::string("model archive is invalid: ") + e.what());
  }
}

}  // namespace spectral
