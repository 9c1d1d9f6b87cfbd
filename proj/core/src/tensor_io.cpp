#include "ausn/tensor_io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "tensor files are little-endian; big-endian hosts are unsupported");

namespace ausn {

namespace {

using nlohmann::json;

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    return bytes;
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::size_t element_size(ElementType t) { return t == ElementType::f32 ? 4 : 8; }

std::vector<double> decode_payload(const char* bytes, std::size_t count, ElementType dtype) {
    std::vector<double> data(count);
    if (dtype == ElementType::f32) {
        for (std::size_t i = 0; i < count; ++i) {
            float v;
            std::memcpy(&v, bytes + i * 4, 4);
            data[i] = static_cast<double>(v);
        }
    } else {
        std::memcpy(data.data(), bytes, count * 8);
    }
    return data;
}

std::vector<char> encode_payload(const std::vector<double>& data, ElementType dtype) {
    std::vector<char> bytes(data.size() * element_size(dtype));
    if (dtype == ElementType::f32) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const float v = static_cast<float>(data[i]);
            std::memcpy(bytes.data() + i * 4, &v, 4);
        }
    } else {
        std::memcpy(bytes.data(), data.data(), bytes.size());
    }
    return bytes;
}

constexpr char kNpyMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

TensorFile load_npy(const std::filesystem::path& path) {
    const std::vector<char> bytes = read_file(path);
    if (bytes.size() < 10 || std::memcmp(bytes.data(), kNpyMagic, 6) != 0) {
        throw std::runtime_error(path.string() + ": not an NPY file");
    }
    const int major = bytes[6];
    if (major != 1) {
        throw std::runtime_error(path.string() + ": only NPY version 1 is supported");
    }
    const std::size_t header_len =
        static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
    if (bytes.size() < 10 + header_len) {
        throw std::runtime_error(path.string() + ": truncated NPY header");
    }
    const std::string header(bytes.data() + 10, header_len);

    std::smatch m;
    if (!std::regex_search(header, m, std::regex("'descr'\\s*:\\s*'([^']+)'"))) {
        throw std::runtime_error(path.string() + ": NPY header lacks descr");
    }
    const std::string descr = m[1];
    ElementType dtype;
    if (descr == "<f4") {
        dtype = ElementType::f32;
    } else if (descr == "<f8") {
        dtype = ElementType::f64;
    } else {
        throw std::runtime_error(path.string() + ": unsupported dtype " + descr);
    }
    if (!std::regex_search(header, m, std::regex("'fortran_order'\\s*:\\s*(True|False)"))) {
        throw std::runtime_error(path.string() + ": NPY header lacks fortran_order");
    }
    if (m[1] == "True") {
        throw std::runtime_error(path.string() + ": Fortran-order layout is unsupported");
    }
    if (!std::regex_search(header, m, std::regex("'shape'\\s*:\\s*\\(([^)]*)\\)"))) {
        throw std::runtime_error(path.string() + ": NPY header lacks shape");
    }
    std::vector<std::size_t> shape;
    {
        std::stringstream dims(m[1]);
        std::string dim;
        while (std::getline(dims, dim, ',')) {
            if (dim.find_first_not_of(" \t") == std::string::npos) continue;
            shape.push_back(std::stoull(dim));
        }
    }
    if (shape.empty()) {
        throw std::runtime_error(path.string() + ": zero-dimensional NPY is unsupported");
    }

    const std::size_t count = element_count(shape);
    const std::size_t payload = bytes.size() - 10 - header_len;
    if (payload != count * element_size(dtype)) {
        throw std::runtime_error(path.string() + ": payload size disagrees with shape");
    }

    TensorFile tensor;
    tensor.name = path.stem().string();
    tensor.dtype = dtype;
    tensor.shape = std::move(shape);
    tensor.data = decode_payload(bytes.data() + 10 + header_len, count, dtype);
    return tensor;
}

void save_npy(const TensorFile& tensor, const std::filesystem::path& path) {
    std::ostringstream dict;
    dict << "{'descr': '" << (tensor.dtype == ElementType::f32 ? "<f4" : "<f8")
         << "', 'fortran_order': False, 'shape': (";
    for (std::size_t i = 0; i < tensor.shape.size(); ++i) {
        dict << tensor.shape[i];
        if (tensor.shape.size() == 1 || i + 1 < tensor.shape.size()) dict << ",";
        if (i + 1 < tensor.shape.size()) dict << " ";
    }
    dict << "), }";
    std::string header = dict.str();
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(kNpyMagic, 6);
    out.put('\x01');
    out.put('\x00');
    const std::size_t len = header.size();
    out.put(static_cast<char>(len & 0xff));
    out.put(static_cast<char>((len >> 8) & 0xff));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    const std::vector<char> payload = encode_payload(tensor.data, tensor.dtype);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

TensorFile load_raw(const std::filesystem::path& path) {
    const std::filesystem::path sidecar = path.string() + ".json";
    json meta;
    {
        std::ifstream in(sidecar);
        if (!in) {
            throw std::runtime_error("missing sidecar " + sidecar.string());
        }
        try {
            in >> meta;
        } catch (const json::exception& e) {
            throw std::runtime_error(sidecar.string() + ": " + e.what());
        }
    }
    TensorFile tensor;
    tensor.name = meta.value("name", path.stem().string());
    const std::string dtype = meta.value("dtype", "float32");
    if (dtype == "float32") {
        tensor.dtype = ElementType::f32;
    } else if (dtype == "float64") {
        tensor.dtype = ElementType::f64;
    } else {
        throw std::runtime_error(sidecar.string() + ": unsupported dtype " + dtype);
    }
    if (!meta.contains("shape") || !meta["shape"].is_array() || meta["shape"].empty()) {
        throw std::runtime_error(sidecar.string() + ": shape missing or empty");
    }
    tensor.shape = meta["shape"].get<std::vector<std::size_t>>();

    const std::vector<char> bytes = read_file(path);
    const std::size_t count = element_count(tensor.shape);
    if (bytes.size() != count * element_size(tensor.dtype)) {
        throw std::runtime_error(path.string() + ": payload size disagrees with shape");
    }
    tensor.data = decode_payload(bytes.data(), count, tensor.dtype);
    return tensor;
}

void save_raw(const TensorFile& tensor, const std::filesystem::path& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        const std::vector<char> payload = encode_payload(tensor.data, tensor.dtype);
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
    json meta;
    meta["name"] = tensor.name;
    meta["shape"] = tensor.shape;
    meta["dtype"] = tensor.dtype == ElementType::f32 ? "float32" : "float64";
    std::ofstream out(path.string() + ".json");
    out << meta.dump(2) << "\n";
}

}  // namespace

TensorFile load_tensor(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("no such file: " + path.string());
    }
    TensorFile tensor = path.extension() == ".npy" ? load_npy(path) : load_raw(path);
    if (element_count(tensor.shape) != tensor.data.size()) {
        throw std::runtime_error(path.string() + ": shape/size mismatch");
    }
    return tensor;
}

void save_tensor(const TensorFile& tensor, const std::filesystem::path& path) {
    if (element_count(tensor.shape) != tensor.data.size()) {
        throw std::runtime_error("save_tensor: shape/size mismatch");
    }
    if (path.extension() == ".npy") {
        save_npy(tensor, path);
    } else {
        save_raw(tensor, path);
    }
}

}  // namespace ausn
