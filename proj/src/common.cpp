#include "nopeplus/common.hpp"

#include <fstream>
#include <sstream>

namespace nopeplus {

std::vector<float> read_f32_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  require(bytes % sizeof(float) == 0, ErrorCode::IoError,
          "blob size not a multiple of 4: " + path.string());
  std::vector<float> data(bytes / sizeof(float));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  require(in.good(), ErrorCode::IoError, "short read on " + path.string());
  return data;
}

void write_f32_blob(const std::filesystem::path& path,
                    const std::vector<float>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  require(out.good(), ErrorCode::IoError, "short write on " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  require(out.good(), ErrorCode::IoError, "short write on " + path.string());
}

}  // namespace nopeplus
