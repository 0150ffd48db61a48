#ifndef PASFORGE_TENSOR_IO_H_
#define PASFORGE_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pasforge {

inline constexpr std::string_view kTensorFileMagic = "PASNT1\n";

// Row-major 32-bit tensor with a name.
struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> dims;
  std::vector<float> values;

  std::int64_t NumElements() const;
  bool operator==(const NamedTensor&) const = default;
};

// Named-tensor container: the magic line, then per tensor a name line, a
// "<rank> <d1> ... <dk>" line and the little-endian float32 payload.
std::string EncodeTensors(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> DecodeTensors(const std::string& bytes,
                                       const std::string& source = "<tensors>");

void WriteTensorFile(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> ReadTensorFile(const std::filesystem::path& path);

}  // namespace pasforge

#endif  // PASFORGE_TENSOR_IO_H_
