// Copyright 2026 The CLiD Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "clid/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace clid {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_doubles(std::span<const double> values) {
    put<std::uint64_t>(values.size());
    out_.append(reinterpret_cast<const char*>(values.data()),
                values.size() * sizeof(double));
  }
  void put_raw(const char* data, std::size_t n) { out_.append(data, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::vector<double> get_doubles() {
    const auto n = get<std::uint64_t>();
    need(n * sizeof(double));
    std::vector<double> values(n);
    std::memcpy(values.data(), in_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return values;
  }
  void expect_raw(const char* data, std::size_t n) {
    need(n);
    if (in_.compare(pos_, n, data, n) != 0) {
      throw ValidationError("not a checkpoint file (bad magic)");
    }
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw ValidationError("truncated checkpoint");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ModelCheckpoint& ckpt) {
  Writer w;
  w.put_raw(kCheckpointMagic, 8);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::int64_t>(ckpt.step);
  w.put<std::uint64_t>(ckpt.seeds.world_seed);
  w.put<std::uint64_t>(ckpt.seeds.init_seed);
  w.put<std::uint64_t>(ckpt.seeds.train_seed);

  const DenoiserNet& net = ckpt.model;
  w.put<std::int32_t>(net.data_dim());
  w.put<std::int32_t>(net.cond_dim());
  w.put<std::int32_t>(net.time_dim());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.layer_widths().size()));
  for (int width : net.layer_widths()) w.put<std::int32_t>(width);
  w.put_doubles(net.parameters());

  w.put<std::int32_t>(ckpt.schedule.total_steps);
  w.put<double>(ckpt.schedule.beta_start);
  w.put<double>(ckpt.schedule.beta_end);
  w.put<std::uint8_t>(ckpt.schedule.sigma_mode == SigmaMode::kBeta ? 0 : 1);

  const Mat& table = ckpt.embedder.table();
  w.put<std::int32_t>(static_cast<std::int32_t>(table.rows()));
  w.put<std::int32_t>(static_cast<std::int32_t>(table.cols()));
  w.put_doubles(std::span<const double>(table.data(),
                                        static_cast<std::size_t>(table.size())));

  w.put_doubles(ckpt.optimizer.first_moment);
  w.put_doubles(ckpt.optimizer.second_moment);
  return w.take();
}

ModelCheckpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  r.expect_raw(kCheckpointMagic, 8);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " +
                          std::to_string(version));
  }
  ModelCheckpoint ckpt;
  ckpt.step = r.get<std::int64_t>();
  ckpt.seeds.world_seed = r.get<std::uint64_t>();
  ckpt.seeds.init_seed = r.get<std::uint64_t>();
  ckpt.seeds.train_seed = r.get<std::uint64_t>();

  const int data_dim = r.get<std::int32_t>();
  const int cond_dim = r.get<std::int32_t>();
  const int time_dim = r.get<std::int32_t>();
  const auto n_widths = r.get<std::uint32_t>();
  std::vector<int> widths(n_widths);
  for (auto& width : widths) width = r.get<std::int32_t>();
  ckpt.model = DenoiserNet::from_parts(data_dim, cond_dim, time_dim,
                                       std::move(widths), r.get_doubles());

  const int total_steps = r.get<std::int32_t>();
  const double beta_start = r.get<double>();
  const double beta_end = r.get<double>();
  const auto mode = r.get<std::uint8_t>();
  ckpt.schedule = make_linear_schedule(
      total_steps, beta_start, beta_end,
      mode == 0 ? SigmaMode::kBeta : SigmaMode::kPosterior);

  const int rows = r.get<std::int32_t>();
  const int cols = r.get<std::int32_t>();
  const auto table_values = r.get_doubles();
  require(table_values.size() == static_cast<std::size_t>(rows) * cols,
          "embedder table size mismatch");
  ckpt.embedder = ConditionEmbedder(
      Eigen::Map<const Mat>(table_values.data(), rows, cols));

  ckpt.optimizer.first_moment = r.get_doubles();
  ckpt.optimizer.second_moment = r.get_doubles();
  if (!r.done()) throw ValidationError("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path,
                     const ModelCheckpoint& ckpt) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write checkpoint " + path.string());
    const std::string bytes = serialize_checkpoint(ckpt);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw RuntimeFailure("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw RuntimeFailure("cannot move checkpoint into place: " + ec.message());
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace clid
