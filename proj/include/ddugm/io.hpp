// DDT1 tensor files and JSON reconstruction configs.
//
// DDT1 layout (all integers little-endian):
//   "DDT1" | u32 ndim | ndim x u64 dims | u32 dtype | payload (row-major)
// dtype 0 = complex64 (interleaved f32 re, im), 1 = f32, 2 = u8 mask.
#pragma once

#include <bit>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddugm/engine.hpp"
#include "ddugm/tensor.hpp"

namespace ddugm {

enum class DType : std::uint32_t { complex64 = 0, float32 = 1, mask_u8 = 2 };

inline std::size_t element_size(DType d) {
  switch (d) {
    case DType::complex64: return 8;
    case DType::float32: return 4;
    case DType::mask_u8: return 1;
  }
  return 0;
}

class TensorFileError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, truncated, unknown_dtype, bad_dims, dtype_mismatch, trailing_bytes };
  TensorFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Raw decoded file: header fields plus the untouched payload bytes.
struct TensorFile {
  std::vector<std::uint64_t> dims;
  DType dtype = DType::complex64;
  std::vector<std::uint8_t> payload;

  /// 3-D dims as (T, H, W); 2-D files are read as a single frame.
  Shape3 shape() const {
    if (dims.size() == 3) return {dims[0], dims[1], dims[2]};
    if (dims.size() == 2) return {1, dims[0], dims[1]};
    throw TensorFileError(TensorFileError::Kind::bad_dims,
                          "expected a 2-D or 3-D tensor, file has " + std::to_string(dims.size()) + " dims");
  }
};

namespace detail {

inline void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint32_t float_bits(float f) { return std::bit_cast<std::uint32_t>(f); }
inline float bits_float(std::uint32_t b) { return std::bit_cast<float>(b); }

}  // namespace detail

inline std::vector<std::uint8_t> encode_tensor_file(const TensorFile& f) {
  std::vector<std::uint8_t> out{'D', 'D', 'T', '1'};
  detail::put_le(out, f.dims.size(), 4);
  for (auto d : f.dims) detail::put_le(out, d, 8);
  detail::put_le(out, static_cast<std::uint32_t>(f.dtype), 4);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

inline TensorFile decode_tensor_file(const std::vector<std::uint8_t>& bytes) {
  using K = TensorFileError::Kind;
  if (bytes.size() < 8) throw TensorFileError(K::truncated, "file shorter than the DDT1 header");
  if (!(bytes[0] == 'D' && bytes[1] == 'D' && bytes[2] == 'T' && bytes[3] == '1'))
    throw TensorFileError(K::bad_magic, "not a DDT1 tensor file (bad magic)");
  TensorFile f;
  const auto ndim = detail::get_le(bytes.data() + 4, 4);
  if (ndim == 0 || ndim > 8) throw TensorFileError(K::bad_dims, "unsupported rank " + std::to_string(ndim));
  std::size_t pos = 8;
  if (bytes.size() < pos + 8 * ndim + 4) throw TensorFileError(K::truncated, "file truncated inside the dims block");
  std::uint64_t count = 1;
  for (std::uint64_t k = 0; k < ndim; ++k, pos += 8) {
    const auto d = detail::get_le(bytes.data() + pos, 8);
    if (d == 0) throw TensorFileError(K::bad_dims, "zero-length dimension");
    if (count > std::numeric_limits<std::uint64_t>::max() / d)
      throw TensorFileError(K::bad_dims, "dimension product overflows");
    count *= d;
    f.dims.push_back(d);
  }
  const auto code = detail::get_le(bytes.data() + pos, 4);
  pos += 4;
  if (code > 2) throw TensorFileError(K::unknown_dtype, "unknown dtype code " + std::to_string(code));
  f.dtype = static_cast<DType>(code);
  const std::uint64_t esize = element_size(f.dtype);
  if (count > std::numeric_limits<std::uint64_t>::max() / esize)
    throw TensorFileError(K::bad_dims, "payload size overflows");
  const std::uint64_t need = count * esize;
  const std::uint64_t have = bytes.size() - pos;
  if (have < need)
    throw TensorFileError(K::truncated, "payload has " + std::to_string(have) + " bytes, dims require " +
                                            std::to_string(need));
  if (have > need)
    throw TensorFileError(K::trailing_bytes, std::to_string(have - need) + " unexpected bytes after the payload");
  f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return f;
}

inline void write_tensor_file(const std::string& path, const TensorFile& f) {
  const auto bytes = encode_tensor_file(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TensorFileError(TensorFileError::Kind::io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TensorFileError(TensorFileError::Kind::io, "write to '" + path + "' failed");
}

inline TensorFile read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorFileError(TensorFileError::Kind::io, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor_file(bytes);
  } catch (const TensorFileError& e) {
    throw TensorFileError(e.kind(), path + ": " + e.what());
  }
}

inline TensorFile to_tensor_file(const DynamicTensor& x) {
  TensorFile f{{x.frames(), x.height(), x.width()}, DType::complex64, {}};
  f.payload.reserve(x.size() * 8);
  for (const auto& z : x.values()) {
    detail::put_le(f.payload, detail::float_bits(static_cast<float>(z.real())), 4);
    detail::put_le(f.payload, detail::float_bits(static_cast<float>(z.imag())), 4);
  }
  return f;
}

inline TensorFile to_tensor_file(const RealTensor& x) {
  TensorFile f{{x.frames(), x.height(), x.width()}, DType::float32, {}};
  f.payload.reserve(x.size() * 4);
  for (float v : x.values()) detail::put_le(f.payload, detail::float_bits(v), 4);
  return f;
}

inline TensorFile to_tensor_file(const SamplingMask& m) {
  const auto& bits = m.bits();
  return TensorFile{{bits.frames(), bits.height(), bits.width()},
                    DType::mask_u8,
                    std::vector<std::uint8_t>(bits.values().begin(), bits.values().end())};
}

namespace detail {
inline void expect_dtype(const TensorFile& f, DType want) {
  if (f.dtype != want)
    throw TensorFileError(TensorFileError::Kind::dtype_mismatch,
                          "tensor has dtype " + std::to_string(static_cast<unsigned>(f.dtype)) + ", expected " +
                              std::to_string(static_cast<unsigned>(want)));
}
}  // namespace detail

/// Complex tensor; float32 files are promoted with a zero imaginary part.
inline DynamicTensor to_complex(const TensorFile& f) {
  if (f.dtype == DType::float32) {
    DynamicTensor x(f.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = detail::bits_float(static_cast<std::uint32_t>(detail::get_le(f.payload.data() + 4 * i, 4)));
    return x;
  }
  detail::expect_dtype(f, DType::complex64);
  DynamicTensor x(f.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto re = detail::bits_float(static_cast<std::uint32_t>(detail::get_le(f.payload.data() + 8 * i, 4)));
    const auto im = detail::bits_float(static_cast<std::uint32_t>(detail::get_le(f.payload.data() + 8 * i + 4, 4)));
    x[i] = {re, im};
  }
  return x;
}

inline RealTensor to_real(const TensorFile& f) {
  detail::expect_dtype(f, DType::float32);
  RealTensor x(f.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = detail::bits_float(static_cast<std::uint32_t>(detail::get_le(f.payload.data() + 4 * i, 4)));
  return x;
}

inline SamplingMask to_mask(const TensorFile& f) {
  detail::expect_dtype(f, DType::mask_u8);
  return SamplingMask(Array3<std::uint8_t>(f.shape(), f.payload));
}

template <class T>
void write_tensor(const std::string& path, const T& x) {
  write_tensor_file(path, to_tensor_file(x));
}

inline DynamicTensor read_complex_tensor(const std::string& path) { return to_complex(read_tensor_file(path)); }
inline RealTensor read_real_tensor(const std::string& path) { return to_real(read_tensor_file(path)); }
inline SamplingMask read_mask(const std::string& path) { return to_mask(read_tensor_file(path)); }

// ---------------------------------------------------------------------------
// ReconConfig <-> flat JSON

inline nlohmann::json to_json(const ReconConfig& c, std::optional<std::size_t> frames = std::nullopt) {
  nlohmann::json j;
  j["steps"] = c.steps;
  j["corrector_steps"] = c.corrector_steps;
  j["sigma_min"] = c.sigma_min;
  j["sigma_max"] = c.sigma_max;
  j["snr"] = c.snr;
  j["weight_p"] = c.weight.p;
  j["weight_q"] = c.weight.q;
  j["weight_floor"] = c.weight.floor;
  if (frames && *frames >= 2) {
    const auto h = c.hankel(*frames);
    j["hankel_window"] = h.window;
    j["hankel_rank"] = h.rank;
  } else {
    j["hankel_window"] = c.hankel_window;
    j["hankel_rank"] = c.hankel_rank;
  }
  j["lowrank_every"] = c.lowrank_every;
  j["eta1"] = c.fusion.eta1;
  j["eta2"] = c.fusion.eta2;
  if (std::isinf(c.fusion.mu))
    j["mu"] = "inf";
  else
    j["mu"] = c.fusion.mu;
  j["seed"] = c.seed;
  j["domain_mode"] = std::string(to_string(c.domain_mode));
  j["log_every"] = c.log_every;
  return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline ReconConfig recon_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{"steps",       "corrector_steps", "sigma_min",     "sigma_max",
                                           "snr",         "weight_p",        "weight_q",      "weight_floor",
                                           "hankel_window", "hankel_rank",   "lowrank_every", "eta1",
                                           "eta2",        "mu",              "seed",          "domain_mode",
                                           "log_every"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");

  ReconConfig c;
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
    }
  };
  get("steps", c.steps);
  get("corrector_steps", c.corrector_steps);
  get("sigma_min", c.sigma_min);
  get("sigma_max", c.sigma_max);
  get("snr", c.snr);
  get("weight_p", c.weight.p);
  get("weight_q", c.weight.q);
  get("weight_floor", c.weight.floor);
  get("hankel_window", c.hankel_window);
  get("hankel_rank", c.hankel_rank);
  get("lowrank_every", c.lowrank_every);
  get("eta1", c.fusion.eta1);
  get("eta2", c.fusion.eta2);
  get("seed", c.seed);
  get("log_every", c.log_every);
  if (j.contains("mu")) {
    const auto& mu = j["mu"];
    if (mu.is_string() && mu.get<std::string>() == "inf")
      c.fusion.mu = kInfiniteMu;
    else if (mu.is_number())
      c.fusion.mu = mu.get<double>();
    else
      throw std::invalid_argument("config key 'mu' must be a number or \"inf\"");
  }
  if (j.contains("domain_mode")) {
    if (!j["domain_mode"].is_string()) throw std::invalid_argument("config key 'domain_mode' must be a string");
    c.domain_mode = parse_domain_mode(j["domain_mode"].get<std::string>());
  }
  c.validate();
  return c;
}

inline ReconConfig read_recon_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return recon_config_from_json(j);
}

// ---------------------------------------------------------------------------
// CSV / JSON reports

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Columns: step, sigma, psnr, dc_residual. psnr is empty when no reference was given.
inline std::string convergence_csv(const ConvergenceLog& log) {
  std::string out = "step,sigma,psnr,dc_residual\n";
  for (const auto& e : log.entries) {
    out += std::to_string(e.step) + "," + format_number(e.sigma) + "," + (e.psnr ? format_number(*e.psnr) : "") +
           "," + format_number(e.dc_residual) + "\n";
  }
  return out;
}

inline nlohmann::json metric_json_value(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j;
  j["psnr_db"] = metric_json_value(r.mean_psnr_db);
  j["ssim"] = r.mean_ssim;
  j["mse"] = r.mean_mse;
  j["psnr_db_global"] = metric_json_value(r.psnr_db_global);
  auto& frames = j["frames"] = nlohmann::json::array();
  for (std::size_t t = 0; t < r.psnr_db.size(); ++t)
    frames.push_back({{"frame", t}, {"psnr_db", metric_json_value(r.psnr_db[t])}, {"ssim", r.ssim[t]}, {"mse", r.mse[t]}});
  return j;
}

}  // namespace ddugm
