#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ausn {

enum class ElementType { f32, f64 };

struct TensorFile {
    std::string name;
    ElementType dtype = ElementType::f32;
    std::vector<std::size_t> shape;
    std::vector<double> data;  // row-major

    std::size_t size() const { return data.size(); }
};

// Loads either an NPY version-1 file (C-order float32/float64 only) or a
// raw little-endian float file with a JSON sidecar at <path>.json holding
// {"name": ..., "shape": [...], "dtype": "float32"|"float64"}. The format
// is chosen by the .npy extension. Throws std::runtime_error on malformed
// headers, shape/size mismatches, or unsupported dtypes/layouts.
TensorFile load_tensor(const std::filesystem::path& path);

// Inverse of load_tensor; .npy paths get an NPY file, anything else a raw
// payload plus sidecar. Round trips are bit-exact.
void save_tensor(const TensorFile& tensor, const std::filesystem::path& path);

}  // namespace ausn
