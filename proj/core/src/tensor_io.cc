#include "pasforge/tensor_io.h"

#include <cstring>
#include <stdexcept>

#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge {

std::int64_t NamedTensor::NumElements() const {
  std::int64_t n = 1;
  for (std::int64_t d : dims) n *= d;
  return n;
}

std::string EncodeTensors(const std::vector<NamedTensor>& tensors) {
  std::string out(kTensorFileMagic);
  for (const NamedTensor& t : tensors) {
    if (t.name.empty() || t.name.find('\n') != std::string::npos) {
      throw std::invalid_argument("tensor names must be non-empty single lines");
    }
    if (t.NumElements() != static_cast<std::int64_t>(t.values.size())) {
      throw ShapeError("tensor " + t.name + " has " + std::to_string(t.values.size()) +
                       " values for its dims");
    }
    out += t.name;
    out += '\n';
    out += std::to_string(t.dims.size());
    for (std::int64_t d : t.dims) out += " " + std::to_string(d);
    out += '\n';
    for (float v : t.values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      for (int k = 0; k < 4; ++k) out += static_cast<char>((bits >> (8 * k)) & 0xffu);
    }
  }
  return out;
}

std::vector<NamedTensor> DecodeTensors(const std::string& bytes, const std::string& source) {
  if (bytes.compare(0, kTensorFileMagic.size(), kTensorFileMagic) != 0) {
    throw ValidationError(source + ": not a named-tensor file (bad magic)");
  }
  std::vector<NamedTensor> tensors;
  std::size_t pos = kTensorFileMagic.size();
  auto read_line = [&](const char* what) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) {
      throw ValidationError(source + ": truncated file while reading " + what);
    }
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  while (pos < bytes.size()) {
    NamedTensor t;
    t.name = read_line("tensor name");
    std::vector<std::string_view> shape;
    std::string shape_line = read_line("tensor shape");
    shape = SplitFields(shape_line);
    if (shape.empty()) throw ValidationError(source + ": empty shape line for " + t.name);
    const int rank = ParseInt(shape[0]);
    if (rank < 0 || static_cast<int>(shape.size()) != rank + 1) {
      throw ValidationError(source + ": malformed shape line for " + t.name);
    }
    for (int k = 0; k < rank; ++k) {
      std::int64_t d = ParseInt(shape[k + 1]);
      if (d < 0) throw ValidationError(source + ": negative dim for " + t.name);
      t.dims.push_back(d);
    }
    const std::size_t n = static_cast<std::size_t>(t.NumElements());
    if (pos + 4 * n > bytes.size()) {
      throw ValidationError(source + ": truncated payload for " + t.name);
    }
    t.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int k = 0; k < 4; ++k) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + 4 * i + k]))
                << (8 * k);
      }
      std::memcpy(&t.values[i], &bits, sizeof(bits));
    }
    pos += 4 * n;
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void WriteTensorFile(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  WriteFile(path, EncodeTensors(tensors));
}

std::vector<NamedTensor> ReadTensorFile(const std::filesystem::path& path) {
  return DecodeTensors(ReadFile(path), path.string());
}

}  // namespace pasforge
