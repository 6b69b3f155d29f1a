// Checkpoint layout (all little-endian):
//
//   "IABQ"                 4 bytes magic
//   version                u16
//   dim count              u32
//   dims                   u32 x dim count
//   adam step count        u64
//   body                   f64 values:
//                            weights, biases per layer
//                            Adam first moments (same order)
//                            Adam second moments (same order)
//                            beta1, beta2, eps_hat
//   checksum               u32 CRC-32 of the body bytes

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "iabsim/error.hpp"
#include "iabsim/rl_engine.hpp"

namespace iabsim {
namespace {

constexpr char kMagic[4] = {'I', 'A', 'B', 'Q'};

class Writer {
 public:
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { bytes.insert(bytes.end(), p, p + n); }

  std::vector<std::uint8_t> bytes;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorKind::Format, "checkpoint truncated");
  }

 private:
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename Fn>
void for_each_tensor(ParamTensors& layers, Fn&& fn) {
  for (auto& layer : layers) {
    fn(layer.weights);
    fn(layer.biases);
  }
}

}  // namespace

std::vector<std::uint8_t> checkpoint_encode(const QNetwork& net, const AdamState& adam) {
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kCheckpointVersion);
  const auto& dims = net.layer_dims();
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (int d : dims) w.u32(static_cast<std::uint32_t>(d));
  w.u64(static_cast<std::uint64_t>(adam.step_count));
  const std::size_t body_start = w.bytes.size();

  ParamTensors params = net.layers();
  ParamTensors m = adam.first_moment;
  ParamTensors v = adam.second_moment;
  if (m.size() != params.size() || v.size() != params.size())
    throw Error(ErrorKind::Shape, "Adam state does not match network");
  auto emit = [&w](std::vector<double>& t) {
    for (double x : t) w.f64(x);
  };
  for_each_tensor(params, emit);
  for_each_tensor(m, emit);
  for_each_tensor(v, emit);
  w.f64(adam.beta1);
  w.f64(adam.beta2);
  w.f64(adam.eps_hat);

  const auto body_len = w.bytes.size() - body_start;
  const auto crc = crc32(0L, w.bytes.data() + body_start, static_cast<uInt>(body_len));
  w.u32(static_cast<std::uint32_t>(crc));
  return std::move(w.bytes);
}

std::pair<QNetwork, AdamState> checkpoint_decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorKind::Format, "bad checkpoint magic");
  (void)r.u32();
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::UnsupportedVersion,
                "unsupported checkpoint version " + std::to_string(version) + " (supported: " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const auto ndims = r.u32();
  if (ndims < 2 || ndims > 64) throw Error(ErrorKind::Format, "implausible layer count in checkpoint");
  std::vector<int> dims;
  std::size_t params = 0;
  for (std::uint32_t i = 0; i < ndims; ++i) {
    const auto d = r.u32();
    if (d == 0 || d > (1u << 20)) throw Error(ErrorKind::Format, "implausible layer dim in checkpoint");
    dims.push_back(static_cast<int>(d));
    if (i > 0) params += static_cast<std::size_t>(dims[i - 1]) * d + d;
  }
  const auto step = r.u64();
  const std::size_t body_start = r.pos();
  const std::size_t body_len = (3 * params + 3) * 8;
  if (r.remaining() != body_len + 4)
    throw Error(ErrorKind::Format, "checkpoint body size does not match declared dims");

  const auto crc = crc32(0L, bytes.data() + body_start, static_cast<uInt>(body_len));

  QNetwork net(dims);
  AdamState adam = AdamState::for_network(net);
  adam.step_count = static_cast<std::int64_t>(step);
  auto fill = [&r](std::vector<double>& t) {
    for (double& x : t) x = r.f64();
  };
  for_each_tensor(net.layers(), fill);
  for_each_tensor(adam.first_moment, fill);
  for_each_tensor(adam.second_moment, fill);
  adam.beta1 = r.f64();
  adam.beta2 = r.f64();
  adam.eps_hat = r.f64();
  if (r.u32() != static_cast<std::uint32_t>(crc)) throw Error(ErrorKind::Format, "checkpoint checksum mismatch");
  return {std::move(net), std::move(adam)};
}

void checkpoint_save(const QNetwork& net, const AdamState& adam, const std::filesystem::path& path) {
  const auto bytes = checkpoint_encode(net, adam);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

std::pair<QNetwork, AdamState> checkpoint_load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return checkpoint_decode(bytes);
}

}  // namespace iabsim
