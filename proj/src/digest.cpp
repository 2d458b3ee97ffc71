#include "hateprobe/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>

namespace hateprobe {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string prompt_digest(std::string_view prompt_text, std::string_view model_id, double temperature) {
  char temp[64];
  std::snprintf(temp, sizeof temp, "%.17g", temperature);
  std::string payload = "hateprobe-v1\n";
  payload += std::to_string(prompt_text.size()) + ":" + std::string(prompt_text) + "\n";
  payload += std::to_string(model_id.size()) + ":" + std::string(model_id) + "\n";
  payload += temp;
  return sha256_hex(payload);
}

}  // namespace hateprobe
