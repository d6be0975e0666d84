#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "logtr/tensor.hpp"

namespace logtr {

// TNSR v1: "TNSR", version byte 0x01, u32 LE ndim, ndim x u64 LE extents,
// then row-major f64 LE values.
class TnsrError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TnsrBadMagic : public TnsrError {
 public:
  using TnsrError::TnsrError;
};
class TnsrBadVersion : public TnsrError {
 public:
  using TnsrError::TnsrError;
};
class TnsrTruncated : public TnsrError {
 public:
  using TnsrError::TnsrError;
};
class TnsrDimOverflow : public TnsrError {
 public:
  using TnsrError::TnsrError;
};
class TnsrTrailingBytes : public TnsrError {
 public:
  using TnsrError::TnsrError;
};
class TnsrIoError : public TnsrError {
 public:
  using TnsrError::TnsrError;
};

inline constexpr std::uint8_t kTnsrVersion = 0x01;

std::vector<std::uint8_t> encode_tnsr(const Tensor& t);
Tensor decode_tnsr(const std::vector<std::uint8_t>& bytes);

void write_tnsr(const std::filesystem::path& path, const Tensor& t);
Tensor read_tnsr(const std::filesystem::path& path);

}  // namespace logtr
