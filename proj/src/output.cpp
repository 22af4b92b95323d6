#include "mhom/output.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace mhom {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

OutputTransaction::OutputTransaction(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

OutputTransaction::~OutputTransaction() {
  if (committed_) return;
  std::error_code ec;
  for (const auto &[tmp, final_path] : staged_) std::filesystem::remove(tmp, ec);
  for (const auto &p : published_) std::filesystem::remove(p, ec);
}

void OutputTransaction::write(const std::string &name, const std::string &content) {
  const auto final_path = dir_ / name;
  const auto tmp = dir_ / ("." + name + ".partial");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  staged_.emplace_back(tmp, final_path);
}

void OutputTransaction::commit() {
  for (const auto &[tmp, final_path] : staged_) {
    std::filesystem::rename(tmp, final_path);
    published_.push_back(final_path);
  }
  staged_.clear();
  committed_ = true;
}

}  // namespace mhom
